//! Drive the spec runner from code: parse a TOML spec, run it, sweep one
//! parameter, and write the table with its metadata sidecar.
//!
//! cargo run --release --example run_spec -- [output dir]

use std::path::PathBuf;

use photonic_ising::cli::{parse_spec, run, sweep, write_outputs, Format};

const SPEC: &str = r#"
kind = "ising-memory"
seed = 7

[parameters]
M = 5
beta = 0.6
T = 200
n_traj = 2000
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "target/run_spec".into()));
    let spec = parse_spec(SPEC)?;
    println!("resolved spec:\n{}", spec.to_toml());

    let single = run(&spec)?;
    print!("{}", single.table.to_csv_string());

    let swept = sweep(&spec, "M", &[3.0, 5.0, 7.0])?;
    let out = dir.join("memory_sweep.csv");
    write_outputs(&swept, &out, Format::Csv)?;
    print!("{}", swept.table.to_csv_string());
    println!("wrote {}", out.display());
    Ok(())
}
