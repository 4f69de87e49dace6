//! Monte Carlo wavefunction (quantum-jump) unraveling.

use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;

use super::generator::Generator;
use super::LindbladModel;
use crate::error::{Error, Result};
use crate::ode::{single_step, Dopri5, Tolerances};
use crate::operators::{Operator, StateVector};
use crate::rng::stream_rng;
use crate::stats::mean_stderr;

#[derive(Clone, Copy, Debug)]
pub struct TrajectoryOptions {
    pub tol: Tolerances,
    /// Relative tolerance on the located jump time.
    pub jump_time_rtol: f64,
    pub max_jumps: usize,
}

impl Default for TrajectoryOptions {
    fn default() -> Self {
        Self {
            tol: Tolerances { rtol: 1e-9, atol: 1e-12, ..Tolerances::default() },
            jump_time_rtol: 1e-10,
            max_jumps: 10_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JumpEvent {
    pub time: f64,
    pub channel: usize,
}

#[derive(Clone, Debug)]
pub struct TrajectoryResult {
    /// Normalized state at each requested time.
    pub states: Vec<StateVector>,
    pub jumps: Vec<JumpEvent>,
}

impl TrajectoryResult {
    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("at least one output time")
    }
}

fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn normalized(v: &[C64]) -> StateVector {
    let n = norm_sqr(v).sqrt();
    StateVector::new(v.iter().map(|z| z / n).collect())
}

fn run<R: Rng>(
    gen: &Generator,
    psi0: &StateVector,
    times: &[f64],
    rng: &mut R,
    opts: &TrajectoryOptions,
) -> Result<TrajectoryResult> {
    if psi0.dim() != gen.dim() {
        return Err(Error::DimensionMismatch { expected: gen.dim(), found: psi0.dim() });
    }
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::Integration("output times must be nonnegative and increasing".into()));
    }
    let mut psi: Vec<C64> = psi0
        .normalized()
        .ok_or_else(|| Error::InvalidParams("initial state is the zero vector".into()))?
        .into_amplitudes();
    let mut f = |_: f64, y: &[C64], out: &mut [C64]| gen.apply_drift(y, out);
    let mut states = Vec::with_capacity(times.len());
    let mut jumps = Vec::new();
    let mut t = 0.0;
    let mut next = 0;
    while next < times.len() && times[next] == 0.0 {
        states.push(normalized(&psi));
        next += 1;
    }
    let mut threshold: f64 = rng.random();
    let mut scratch = vec![C64::new(0.0, 0.0); psi.len()];

    'outer: while next < times.len() {
        let mut stepper = Dopri5::new(&mut f, t, psi.clone(), opts.tol);
        loop {
            let target = times[next];
            stepper.step(&mut f, target)?;
            if norm_sqr(stepper.y()) <= threshold {
                let (tp, yp) = stepper.previous();
                let yp = yp.to_vec();
                let (mut lo, mut hi) = (0.0, stepper.t() - tp);
                while hi - lo > opts.jump_time_rtol * (tp + hi).abs().max(f64::MIN_POSITIVE) {
                    let mid = 0.5 * (lo + hi);
                    if norm_sqr(&single_step(&mut f, tp, &yp, mid)) <= threshold {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                let t_jump = tp + hi;
                let y = single_step(&mut f, tp, &yp, hi);
                let weights: Vec<f64> = (0..gen.jump_count())
                    .map(|k| {
                        gen.apply_jump(k, &y, &mut scratch);
                        norm_sqr(&scratch)
                    })
                    .collect();
                let total: f64 = weights.iter().sum();
                if !(total > 0.0) {
                    return Err(Error::Integration(format!(
                        "norm decayed at t = {t_jump} but no jump channel is active"
                    )));
                }
                let mut pick = rng.random::<f64>() * total;
                let mut channel = weights.len() - 1;
                for (k, w) in weights.iter().enumerate() {
                    if pick < *w {
                        channel = k;
                        break;
                    }
                    pick -= w;
                }
                gen.apply_jump(channel, &y, &mut scratch);
                let n = norm_sqr(&scratch).sqrt();
                psi = scratch.iter().map(|z| z / n).collect();
                jumps.push(JumpEvent { time: t_jump, channel });
                if jumps.len() > opts.max_jumps {
                    return Err(Error::Integration(format!("more than {} jumps", opts.max_jumps)));
                }
                t = t_jump;
                threshold = rng.random();
                continue 'outer;
            }
            if stepper.t() >= target {
                states.push(normalized(stepper.y()));
                next += 1;
                if next == times.len() {
                    break 'outer;
                }
            }
        }
    }
    Ok(TrajectoryResult { states, jumps })
}

/// One quantum-jump trajectory to `t_final`. The random stream is stream 0
/// of `seed`, so this equals the single member of a one-trajectory ensemble.
pub fn trajectory(
    model: &LindbladModel,
    psi0: &StateVector,
    t_final: f64,
    seed: u64,
) -> Result<TrajectoryResult> {
    trajectory_with_checkpoints(model, psi0, &[t_final], seed, 0, &TrajectoryOptions::default())
}

/// Trajectory number `index` of `seed`, recording the state at each time.
pub fn trajectory_with_checkpoints(
    model: &LindbladModel,
    psi0: &StateVector,
    times: &[f64],
    seed: u64,
    index: u64,
    opts: &TrajectoryOptions,
) -> Result<TrajectoryResult> {
    let gen = Generator::new(model);
    run(&gen, psi0, times, &mut stream_rng(seed, index), opts)
}

#[derive(Clone, Debug)]
pub struct EnsembleResult {
    pub times: Vec<f64>,
    /// means[time][observable]
    pub means: Vec<Vec<f64>>,
    pub stderrs: Vec<Vec<f64>>,
    pub n_traj: usize,
}

/// Means and standard errors of Re<ψ|O|ψ> over `n_traj` trajectories at
/// `t_final`.
pub fn ensemble_average(
    model: &LindbladModel,
    psi0: &StateVector,
    t_final: f64,
    n_traj: usize,
    observables: &[Operator],
    seed: u64,
) -> Result<EnsembleResult> {
    ensemble_average_at(model, psi0, &[t_final], n_traj, observables, seed, &TrajectoryOptions::default())
}

/// Ensemble statistics at several times. Trajectory `i` uses stream `i` of
/// `seed` and results are reduced in index order, so the output does not
/// depend on the number of worker threads.
pub fn ensemble_average_at(
    model: &LindbladModel,
    psi0: &StateVector,
    times: &[f64],
    n_traj: usize,
    observables: &[Operator],
    seed: u64,
    opts: &TrajectoryOptions,
) -> Result<EnsembleResult> {
    if n_traj == 0 {
        return Err(Error::InvalidParams("n_traj must be at least 1".into()));
    }
    for o in observables {
        if o.dim() != model.dim() {
            return Err(Error::DimensionMismatch { expected: model.dim(), found: o.dim() });
        }
    }
    let gen = Generator::new(model);
    let samples: Vec<Vec<Vec<f64>>> = (0..n_traj as u64)
        .into_par_iter()
        .map(|i| {
            let r = run(&gen, psi0, times, &mut stream_rng(seed, i), opts)?;
            Ok(r.states
                .iter()
                .map(|s| observables.iter().map(|o| o.expectation(s).re).collect())
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut means = Vec::with_capacity(times.len());
    let mut stderrs = Vec::with_capacity(times.len());
    for ti in 0..times.len() {
        let mut m = Vec::with_capacity(observables.len());
        let mut s = Vec::with_capacity(observables.len());
        for oi in 0..observables.len() {
            let column: Vec<f64> = samples.iter().map(|traj| traj[ti][oi]).collect();
            let (mean, se) = mean_stderr(&column);
            m.push(mean);
            s.push(se);
        }
        means.push(m);
        stderrs.push(s);
    }
    Ok(EnsembleResult { times: times.to_vec(), means, stderrs, n_traj })
}
