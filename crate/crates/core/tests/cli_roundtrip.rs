use photonic_ising::cli::{
    self, parse_spec, parse_spec_with, run, sweep, write_outputs, Cell, CliError, Format, Overrides, Table,
};
use proptest::prelude::*;

const MEMORY: &str = r#"
kind = "ising-memory"
seed = 7

[parameters]
M = 5
beta = 0.6
kappa = 1.0
T = 800
n_traj = 1000
"#;

fn with_workers(text: &str, workers: usize) -> cli::ExperimentSpec {
    parse_spec_with(text, &Overrides { workers: Some(workers), ..Default::default() }).unwrap()
}

#[test]
fn identical_bytes_for_any_worker_count() {
    let a = run(&with_workers(MEMORY, 1)).unwrap().table.to_csv_string();
    let b = run(&with_workers(MEMORY, 3)).unwrap().table.to_csv_string();
    let c = run(&with_workers(MEMORY, 1)).unwrap().table.to_csv_string();
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn sidecar_is_enough_to_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sub/mem.csv");
    let first = run(&parse_spec(MEMORY).unwrap()).unwrap();
    write_outputs(&first, &out, Format::Csv).unwrap();
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(cli::meta_path(&out)).unwrap()).unwrap();
    assert_eq!(meta["schema_version"], 1);
    assert_eq!(meta["seed"], 7);
    let again = run(&parse_spec(meta["spec_toml"].as_str().unwrap()).unwrap()).unwrap();
    assert_eq!(std::fs::read_to_string(&out).unwrap(), again.table.to_csv_string());
    let parsed = Table::read_csv(std::fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(parsed, first.table);
}

#[test]
fn memory_sweep_has_one_row_per_value() {
    let spec = parse_spec(MEMORY).unwrap();
    let r = sweep(&spec, "M", &[3.0, 5.0, 7.0, 9.0]).unwrap();
    assert_eq!(r.table.rows.len(), 4);
    let ms: Vec<_> = r.table.column("M").unwrap().into_iter().cloned().collect();
    assert_eq!(ms, vec![Cell::Int(3), Cell::Int(5), Cell::Int(7), Cell::Int(9)]);
    let seeds = &r.meta.sweep.as_ref().unwrap().seeds;
    assert_eq!(seeds.len(), 4);
    assert!(seeds.windows(2).all(|w| w[0] != w[1]));
    assert!(matches!(sweep(&spec, "M", &[]), Err(CliError::Validation(_))));
}

#[test]
fn negative_rate_names_the_key() {
    let text = "kind = \"cavity-steady\"\n[parameters]\nmodel = \"model1\"\nN = [4]\nkappa1 = [-0.1]\n";
    match parse_spec(text) {
        Err(e @ CliError::Validation(_)) => {
            assert!(e.to_string().contains("parameters.kappa1"));
            assert_eq!(e.exit_code(), 2);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn json_output_matches_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("oracle.json");
    let r = run(&parse_spec("kind = \"oracle-check\"").unwrap()).unwrap();
    write_outputs(&r, &out, Format::Json).unwrap();
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["columns"][0], "check");
    assert_eq!(v["rows"].as_array().unwrap().len(), 6);
    assert_eq!(v["rows"][0][5], true);
}

#[test]
fn every_kind_parses_with_defaults() {
    let specs = [
        "kind = \"oracle-check\"",
        "kind = \"toom-demo\"",
        "kind = \"gap-scan\"\n[parameters]\nmodel = \"model2\"\nlam = [2]\nkappa1 = 0.001",
        "kind = \"toy-fidelity\"\n[parameters]\nN = [2]\nkappa1 = 0.1\nkappad = 0.1\nkappann = 0.3",
        "kind = \"meanfield-phase\"\n[parameters]\nkappa1_min = 0\nkappa1_max = 1\nkappa1_steps = 3\ndiagonal = true",
    ];
    for s in specs {
        let spec = parse_spec(s).unwrap();
        assert_eq!(parse_spec(&spec.to_toml()).unwrap().params, spec.params);
    }
}

fn cell() -> impl Strategy<Value = Cell> {
    prop_oneof![
        any::<i64>().prop_map(Cell::Int),
        any::<f64>().prop_filter("finite", |x| x.is_finite()).prop_map(Cell::Float),
        any::<bool>().prop_map(Cell::Bool),
        "[a-z_,\" ]{1,12}".prop_filter("not numeric or boolean", |s| Cell::parse(s) == Cell::Text(s.clone())).prop_map(Cell::Text),
    ]
}

proptest! {
    #[test]
    fn csv_round_trips(rows in proptest::collection::vec(proptest::collection::vec(cell(), 3), 0..20)) {
        let mut t = Table::new(&["a", "b", "c"]);
        for r in rows {
            t.push(r);
        }
        let text = t.to_csv_string();
        prop_assert_eq!(Table::read_csv(text.as_bytes()).unwrap(), t);
    }

    #[test]
    fn oracle_runs_are_deterministic(beta in 0.05f64..1.0) {
        let text = format!("kind = \"oracle-check\"\n[parameters]\nbeta = [{beta:?}]\n");
        let a = run(&parse_spec(&text).unwrap()).unwrap();
        prop_assert!(a.all_passed());
        prop_assert_eq!(a.table.to_csv_string(), run(&parse_spec(&text).unwrap()).unwrap().table.to_csv_string());
    }
}
