//! Mean-field fixed points and equations of motion for the toy model and
//! the 2D photonic-Ising lattice.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ising::rates::kappa_tilde;
use crate::ode::{integrate_dense, Tolerances};

/// Below this |κ_nn − 4κ̃_nn| the quadratic for ⟨Q⟩² is treated as linear.
pub const DEGENERATE_LEADING: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MFInputs {
    pub kappa1: f64,
    pub kappad: f64,
    pub kappann: f64,
    pub lam: f64,
    pub kappa2: f64,
}

impl MFInputs {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa2 > 0.0) {
            return Err(Error::InvalidParams(format!("kappa2 must be positive, got {}", self.kappa2)));
        }
        for (name, v) in [("kappa1", self.kappa1), ("kappad", self.kappad), ("kappann", self.kappann), ("lam", self.lam)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite and nonnegative, got {v}")));
            }
        }
        Ok(())
    }

    /// κ̃_nn = √(κ₁κ_nn + κ₁²) − κ₁.
    pub fn kappann_tilde(&self) -> f64 {
        kappa_tilde(self.kappa1, self.kappann)
    }

    /// (γ₄, γ₂, γ₀) of the recovery-induced damping γ₄q² + γ₂q + γ₀.
    pub fn gammas(&self) -> (f64, f64, f64) {
        let (k, kt) = (self.kappann, self.kappann_tilde());
        ((-3.0 * k + 4.0 * kt) / 16.0, (k - 4.0 * kt) / 8.0, (k + 4.0 * kt) / 16.0)
    }

    /// Coefficients (A, B, C) of -(1/2|α|²) dQ/dt = A Q⁵ + B Q³ − C Q.
    pub fn q_coefficients(&self) -> (f64, f64, f64) {
        let (k, kt) = (self.kappann, self.kappann_tilde());
        ((k - 4.0 * kt) / 16.0, (k + 4.0 * kt) / 8.0, (3.0 * k + 4.0 * kt) / 16.0 - self.kappa1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// Both the bit (⟨Q⟩ or ⟨Z⟩) and the cat amplitude are ordered.
    FerroCat,
    /// Cat amplitude only.
    CatOnly,
    Trivial,
}

impl Phase {
    fn classify(order: f64, alpha_sq: f64) -> Self {
        if alpha_sq <= 0.0 {
            Phase::Trivial
        } else if order > 0.0 {
            Phase::FerroCat
        } else {
            Phase::CatOnly
        }
    }

    /// Position along ferro_cat → cat_only → trivial.
    pub fn rank(self) -> u8 {
        self as u8
    }
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Phase::FerroCat => "ferro_cat",
            Phase::CatOnly => "cat_only",
            Phase::Trivial => "trivial",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanFieldPoint {
    /// ⟨Q⟩² for the lattice; ⟨Z⟩² for the toy model.
    #[serde(rename = "Q_sq")]
    pub q_sq: f64,
    pub alpha_sq: f64,
    #[serde(rename = "Z_exp")]
    pub z_exp: Option<f64>,
    pub phase: Phase,
}

/// Toy model: ⟨Z⟩ = κ_nn/(κ_nn + 2κ₁) and
/// κ₂|α|² = λ − ½(κ₁ + κ_d + κ₁κ_nn/(κ_nn + 2κ₁)), clamped at 0.
pub fn toy_fixed_point(inputs: &MFInputs) -> Result<MeanFieldPoint> {
    inputs.validate()?;
    let denom = inputs.kappann + 2.0 * inputs.kappa1;
    let (z, flip_loss) = if denom > 0.0 {
        (inputs.kappann / denom, inputs.kappa1 * inputs.kappann / denom)
    } else {
        (0.0, 0.0)
    };
    let alpha_sq = ((inputs.lam - 0.5 * (inputs.kappa1 + inputs.kappad + flip_loss)) / inputs.kappa2).max(0.0);
    Ok(MeanFieldPoint { q_sq: z * z, alpha_sq, z_exp: Some(z), phase: Phase::classify(z.abs(), alpha_sq) })
}

/// Mean-field recovery overlap of the toy model, (1 + ⟨Z⟩)/2.
pub fn toy_recovery_plateau(inputs: &MFInputs) -> Result<f64> {
    Ok((1.0 + toy_fixed_point(inputs)?.z_exp.unwrap_or(0.0)) / 2.0)
}

/// Nonzero fixed point q = ⟨Q⟩² of the lattice equation, if one lies in (0, 1].
pub fn q_squared_root(inputs: &MFInputs) -> Option<f64> {
    let (a, b, c) = inputs.q_coefficients();
    let q = if a.abs() < DEGENERATE_LEADING {
        if b == 0.0 {
            return None;
        }
        c / b
    } else {
        let k = inputs.kappann;
        let kt = inputs.kappann_tilde();
        let disc = k * k - 4.0 * inputs.kappa1 * (k - 4.0 * kt);
        if disc < 0.0 {
            return None;
        }
        (2.0 * disc.sqrt() - k - 4.0 * kt) / (k - 4.0 * kt)
    };
    if q > 0.0 && q <= 1.0 + 1e-12 {
        Some(q.min(1.0))
    } else {
        None
    }
}

/// Right side of -(1/2|α|²) dQ/dt at Q.
pub fn q_rate(inputs: &MFInputs, q: f64) -> f64 {
    let (a, b, c) = inputs.q_coefficients();
    a * q.powi(5) + b * q.powi(3) - c * q
}

fn alpha_sq_at(inputs: &MFInputs, q_sq: f64) -> f64 {
    let (g4, g2, g0) = inputs.gammas();
    (2.0 * inputs.lam - inputs.kappa1 - 2.0 * inputs.kappad - g4 * q_sq * q_sq - g2 * q_sq - g0)
        / (2.0 * inputs.kappa2)
}

/// Lattice fixed point: ⟨Q⟩² from the stable root, |α_MF|² from the
/// drive balance. A bit order needs a cat amplitude, so ⟨Q⟩² is dropped
/// when |α_MF|² is not positive at it.
pub fn photonic_ising_fixed_point(inputs: &MFInputs) -> Result<MeanFieldPoint> {
    inputs.validate()?;
    let mut q_sq = q_squared_root(inputs).unwrap_or(0.0);
    let mut alpha_sq = alpha_sq_at(inputs, q_sq);
    if alpha_sq <= 0.0 && q_sq > 0.0 {
        q_sq = 0.0;
        alpha_sq = alpha_sq_at(inputs, 0.0);
    }
    let alpha_sq = alpha_sq.max(0.0);
    if alpha_sq == 0.0 {
        q_sq = 0.0;
    }
    Ok(MeanFieldPoint { q_sq, alpha_sq, z_exp: None, phase: Phase::classify(q_sq, alpha_sq) })
}

#[derive(Clone, Debug)]
pub struct MeanFieldTrajectory {
    pub times: Vec<f64>,
    pub q: Vec<f64>,
    /// ⟨a²⟩
    pub a2: Vec<C64>,
}

/// Integrate the lattice mean-field equations
///   dQ/dt = −2|⟨a²⟩| (A Q⁵ + B Q³ − C Q),
///   d⟨a²⟩/dt = −2κ₂|⟨a²⟩|⟨a²⟩ − 2iλ|⟨a²⟩| − (κ₁ + 2κ_d + γ₄Q⁴ + γ₂Q² + γ₀)⟨a²⟩,
/// the large-amplitude form whose fixed points are the closed forms of
/// [`photonic_ising_fixed_point`]. Output at the increasing `times`.
pub fn meanfield_ode_at(inputs: &MFInputs, q0: f64, a0: C64, times: &[f64]) -> Result<MeanFieldTrajectory> {
    inputs.validate()?;
    if !(-1.0..=1.0).contains(&q0) {
        return Err(Error::Domain(format!("initial ⟨Q⟩ must lie in [-1, 1], got {q0}")));
    }
    let (g4, g2, g0) = inputs.gammas();
    let base = inputs.kappa1 + 2.0 * inputs.kappad;
    let rhs = |_: f64, y: &[f64], dy: &mut [f64]| {
        let (q, a) = (y[0], C64::new(y[1], y[2]));
        let n = a.norm();
        dy[0] = -2.0 * n * q_rate(inputs, q);
        let q2 = q * q;
        let gamma = base + g4 * q2 * q2 + g2 * q2 + g0;
        let da = -a * (2.0 * inputs.kappa2 * n + gamma) - C64::new(0.0, 2.0 * inputs.lam * n);
        dy[1] = da.re;
        dy[2] = da.im;
    };
    let tol = Tolerances { rtol: 1e-10, atol: 1e-13, ..Tolerances::default() };
    let states = integrate_dense(rhs, 0.0, vec![q0, a0.re, a0.im], times, tol)?;
    Ok(MeanFieldTrajectory {
        times: times.to_vec(),
        q: states.iter().map(|y| y[0]).collect(),
        a2: states.iter().map(|y| C64::new(y[1], y[2])).collect(),
    })
}

/// [`meanfield_ode_at`] sampled at 201 equally spaced times in [0, t_final].
pub fn meanfield_ode(inputs: &MFInputs, q0: f64, a0: C64, t_final: f64) -> Result<MeanFieldTrajectory> {
    let times: Vec<f64> = (0..=200).map(|k| t_final * k as f64 / 200.0).collect();
    meanfield_ode_at(inputs, q0, a0, &times)
}

#[derive(Clone, Debug)]
pub enum DiagramAxes {
    /// Full κ₁ × κ_d grid.
    Grid { kappa1: Vec<f64>, kappad: Vec<f64> },
    /// κ_d = κ₁ along the listed values.
    Diagonal { kappa1: Vec<f64> },
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PhaseCell {
    pub kappa1: f64,
    pub kappad: f64,
    #[serde(rename = "Q_sq")]
    pub q_sq: f64,
    pub alpha_sq: f64,
    pub phase: Phase,
}

/// Lattice fixed points over (κ₁, κ_d) at fixed κ_nn, λ, κ₂. Grid cells are
/// ordered with κ_d varying fastest.
pub fn phase_diagram(axes: &DiagramAxes, kappann: f64, lam: f64, kappa2: f64) -> Result<Vec<PhaseCell>> {
    let pairs: Vec<(f64, f64)> = match axes {
        DiagramAxes::Grid { kappa1, kappad } => {
            kappa1.iter().flat_map(|&k1| kappad.iter().map(move |&kd| (k1, kd))).collect()
        }
        DiagramAxes::Diagonal { kappa1 } => kappa1.iter().map(|&k| (k, k)).collect(),
    };
    pairs
        .into_iter()
        .map(|(kappa1, kappad)| {
            let p = photonic_ising_fixed_point(&MFInputs { kappa1, kappad, kappann, lam, kappa2 })?;
            Ok(PhaseCell { kappa1, kappad, q_sq: p.q_sq, alpha_sq: p.alpha_sq, phase: p.phase })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs(kappa1: f64, kappann: f64) -> MFInputs {
        MFInputs { kappa1, kappad: 0.0, kappann, lam: 1.0, kappa2: 1.0 }
    }

    #[test]
    fn toy_values() {
        let p = toy_fixed_point(&inputs(0.1, 0.3)).unwrap();
        assert!((p.z_exp.unwrap() - 0.6).abs() < 1e-15);
        assert!((toy_recovery_plateau(&inputs(0.1, 0.3)).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(toy_fixed_point(&inputs(0.1, 0.0)).unwrap().z_exp, Some(0.0));
        let clean = MFInputs { lam: 2.5, kappa2: 0.5, ..inputs(0.0, 0.3) };
        assert!((toy_fixed_point(&clean).unwrap().alpha_sq * 0.5 - 2.5).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_quadratic_roots() {
        let i = inputs(0.01, 0.3);
        assert!((i.kappann_tilde() - (0.0031f64.sqrt() - 0.01)).abs() < 1e-15);
        let q = q_squared_root(&i).unwrap();
        // independent route: roots of A q² + B q − C
        let (a, b, c) = i.q_coefficients();
        let r = (-b + (b * b + 4.0 * a * c).sqrt()) / (2.0 * a);
        assert!((q - r).abs() < 1e-12);
        assert!((q - 0.865).abs() < 1e-3);
        assert!(q_rate(&i, q.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn strong_loss_has_no_bit_order() {
        let p = photonic_ising_fixed_point(&inputs(0.1, 0.3)).unwrap();
        assert_eq!(p.q_sq, 0.0);
        assert_eq!(p.phase, Phase::CatOnly);
    }

    #[test]
    fn vanishing_loss_limit() {
        let p = photonic_ising_fixed_point(&inputs(1e-8, 0.3)).unwrap();
        assert!((p.q_sq - 1.0).abs() < 1e-6);
    }

    #[test]
    fn degenerate_leading_coefficient_uses_linear_branch() {
        // κ_nn = 4κ̃ ⇔ κ_nn = 8κ₁
        let i = inputs(0.05, 0.4);
        let (a, b, c) = i.q_coefficients();
        assert!(a.abs() < 1e-12);
        let q = q_squared_root(&i).unwrap();
        assert!((q - c / b).abs() < 1e-12);
    }

    #[test]
    fn ode_fixed_points_and_symmetry() {
        let i = inputs(0.01, 0.3);
        let fp = photonic_ising_fixed_point(&i).unwrap();
        let a0 = C64::new(0.3, -0.2);
        let up = meanfield_ode(&i, 0.9, a0, 400.0).unwrap();
        let down = meanfield_ode(&i, -0.9, a0, 400.0).unwrap();
        assert!((up.q.last().unwrap() - fp.q_sq.sqrt()).abs() < 1e-6);
        assert!((up.a2.last().unwrap().norm() - fp.alpha_sq).abs() < 1e-6);
        for (u, d) in up.q.iter().zip(&down.q) {
            assert!((u + d).abs() < 1e-8);
        }
        let zero = meanfield_ode(&i, 0.0, a0, 50.0).unwrap();
        assert!(zero.q.iter().all(|&q| q == 0.0));
    }

    #[test]
    fn diagonal_diagram_ordering() {
        let ks: Vec<f64> = (1..=100).map(|k| k as f64 * 0.01).collect();
        let cells = phase_diagram(&DiagramAxes::Diagonal { kappa1: ks }, 0.3, 1.0, 1.0).unwrap();
        assert_eq!(cells[0].phase, Phase::FerroCat);
        assert_eq!(cells.last().unwrap().phase, Phase::Trivial);
        assert!(cells.windows(2).all(|w| w[0].phase.rank() <= w[1].phase.rank()));
        assert!(cells.iter().any(|c| c.phase == Phase::CatOnly));
    }
}
