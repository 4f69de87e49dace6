use std::collections::VecDeque;
use std::fmt;

use rand::Rng;
use serde::Serialize;

use super::lattice::SpinConfig;
use crate::rng::stream_rng;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decoder {
    /// Flip the globally smaller spin population.
    #[default]
    Majority,
    /// Keep the value of the largest connected domain.
    LargestDomain,
}

impl fmt::Display for Decoder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decoder::Majority => "majority",
            Decoder::LargestDomain => "largest-domain",
        })
    }
}

impl std::str::FromStr for Decoder {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "majority" => Ok(Decoder::Majority),
            "largest-domain" => Ok(Decoder::LargestDomain),
            _ => Err(format!("unknown decoder '{s}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decoded {
    pub bit: u8,
    pub tie: bool,
}

fn coin<R: Rng>(rng: &mut R) -> u8 {
    rng.random::<bool>() as u8
}

pub fn majority_with<R: Rng>(config: &SpinConfig, rng: &mut R) -> Decoded {
    let up = config.n_up();
    let down = config.n_sites() - up;
    match up.cmp(&down) {
        std::cmp::Ordering::Less => Decoded { bit: 0, tie: false },
        std::cmp::Ordering::Greater => Decoded { bit: 1, tie: false },
        std::cmp::Ordering::Equal => Decoded { bit: coin(rng), tie: true },
    }
}

/// Logical bit by global majority; exact ties go to a coin seeded by `tie_seed`.
pub fn decode_majority(config: &SpinConfig, tie_seed: u64) -> u8 {
    majority_with(config, &mut stream_rng(tie_seed, 0)).bit
}

/// Sizes and values of the connected same-spin domains (periodic, 4-neighbour).
pub fn domains(config: &SpinConfig) -> Vec<(usize, u8)> {
    let n = config.n_sites();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let v = config.spin(start);
        seen[start] = true;
        queue.push_back(start);
        let mut size = 0;
        while let Some(s) = queue.pop_front() {
            size += 1;
            for j in config.neighbors(s) {
                if !seen[j] && config.spin(j) == v {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        out.push((size, v));
    }
    out
}

pub fn largest_domain_with<R: Rng>(config: &SpinConfig, rng: &mut R) -> Decoded {
    let ds = domains(config);
    let best = ds.iter().map(|d| d.0).max().unwrap_or(0);
    let has = |v: u8| ds.iter().any(|&(s, x)| s == best && x == v);
    match (has(0), has(1)) {
        (true, true) => Decoded { bit: coin(rng), tie: true },
        (_, true) => Decoded { bit: 1, tie: false },
        _ => Decoded { bit: 0, tie: false },
    }
}

pub fn decode_with<R: Rng>(decoder: Decoder, config: &SpinConfig, rng: &mut R) -> Decoded {
    match decoder {
        Decoder::Majority => majority_with(config, rng),
        Decoder::LargestDomain => largest_domain_with(config, rng),
    }
}
