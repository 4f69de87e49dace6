//! Concrete cavity models built on the Lindblad engine: the two-photon
//! driven cat cavity with raw or codespace-restricted photon loss, and the
//! cavity⊗spin toy model with its fidelity protocol.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lindblad::{
    liouvillian_spectrum, project_onto_slow_manifold, DensityMatrix, EvolveOptions, Evolver,
    LindbladModel, SlowManifold,
};
use crate::operators::{
    annihilation, cat_amplitude, cat_states, codespace_projector, coherent_state, number,
    pauli_x, pauli_z, qubit_identity, cavity_identity, tensor, FockSpace, Operator, StateVector,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CavityParams {
    /// Two-photon drive λ.
    pub lam: f64,
    /// Two-photon loss κ₂.
    pub kappa2: f64,
    /// Single-photon loss κ₁.
    pub kappa1: f64,
    /// Dephasing κ_d.
    pub kappad: f64,
    /// Spin-flip recovery rate κ_nn.
    pub kappann: f64,
    pub space: FockSpace,
}

impl CavityParams {
    /// Noise-free parameters with the default cutoff for N = λ/κ₂.
    pub fn new(lam: f64, kappa2: f64) -> Result<Self> {
        let p = Self {
            lam,
            kappa2,
            kappa1: 0.0,
            kappad: 0.0,
            kappann: 0.0,
            space: FockSpace::for_photon_number(if kappa2 > 0.0 { lam / kappa2 } else { 0.0 }),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_kappa1(self, kappa1: f64) -> Self {
        Self { kappa1, ..self }
    }

    pub fn with_kappad(self, kappad: f64) -> Self {
        Self { kappad, ..self }
    }

    pub fn with_kappann(self, kappann: f64) -> Self {
        Self { kappann, ..self }
    }

    pub fn with_space(self, space: FockSpace) -> Self {
        Self { space, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa2 > 0.0) {
            return Err(Error::InvalidParams(format!("kappa2 must be positive, got {}", self.kappa2)));
        }
        for (name, v) in [("lam", self.lam), ("kappa1", self.kappa1), ("kappad", self.kappad), ("kappann", self.kappann)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite and nonnegative, got {v}")));
            }
        }
        Ok(())
    }

    /// Target photon number λ/κ₂.
    pub fn n(&self) -> f64 {
        self.lam / self.kappa2
    }

    pub fn alpha(&self) -> C64 {
        cat_amplitude(self.n())
    }

    /// Mean photon number with single-photon loss, (2λ − κ₁)/(2κ₂).
    pub fn nbar(&self) -> f64 {
        (2.0 * self.lam - self.kappa1) / (2.0 * self.kappa2)
    }

    /// Loss-shifted coherent amplitude √n̄ e^{-iπ/4}.
    pub fn mu(&self) -> Result<C64> {
        let nbar = self.nbar();
        if nbar < 0.0 {
            return Err(Error::Domain(format!("single-photon loss exceeds twice the drive (n̄ = {nbar})")));
        }
        Ok(C64::from_polar(nbar.sqrt(), -PI / 4.0))
    }
}

/// Leading-order overlap |<α|μ>|² ≈ exp[-κ₁²/(16κ₂λ)].
pub fn overlap_formula(kappa1: f64, kappa2: f64, lam: f64) -> f64 {
    (-kappa1 * kappa1 / (16.0 * kappa2 * lam)).exp()
}

/// |<α|μ>|² from the truncated coherent states of `params`.
pub fn alpha_mu_overlap(params: &CavityParams) -> Result<f64> {
    let a = coherent_state(params.alpha(), &params.space)?;
    let m = coherent_state(params.mu()?, &params.space)?;
    Ok(a.inner(&m).norm_sqr() / (a.norm_sqr() * m.norm_sqr()))
}

fn two_photon_jump(params: &CavityParams) -> Operator {
    let s = &params.space;
    let a = annihilation(s);
    let a2 = &a * &a;
    let shift = cavity_identity(s).scale(params.alpha() * params.alpha());
    (&a2 - &shift).scale_real(params.kappa2.sqrt())
}

fn require_cavity_only(params: &CavityParams) -> Result<()> {
    params.validate()?;
    if params.kappad != 0.0 || params.kappann != 0.0 {
        return Err(Error::InvalidParams("single-cavity models take no dephasing or flip recovery".into()));
    }
    Ok(())
}

/// Two-photon driven cavity with raw single-photon loss: jumps
/// [√κ₂(a² − α²), √κ₁ a], H = 0.
pub fn model1(params: &CavityParams) -> Result<LindbladModel> {
    require_cavity_only(params)?;
    let l1 = annihilation(&params.space).scale_real(params.kappa1.sqrt());
    LindbladModel::new(number(&params.space).scale_real(0.0), vec![two_photon_jump(params), l1])
}

/// As [`model1`] with the loss restricted to the cat codespace: √κ₁ aV.
pub fn model2(params: &CavityParams) -> Result<LindbladModel> {
    require_cavity_only(params)?;
    let v = codespace_projector(params.alpha(), &params.space)?;
    let e1 = (&annihilation(&params.space) * &v).scale_real(params.kappa1.sqrt());
    LindbladModel::new(number(&params.space).scale_real(0.0), vec![two_photon_jump(params), e1])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelFamily {
    Model1,
    Model2,
}

impl ModelFamily {
    pub fn build(self, params: &CavityParams) -> Result<LindbladModel> {
        match self {
            ModelFamily::Model1 => model1(params),
            ModelFamily::Model2 => model2(params),
        }
    }
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelFamily::Model1 => "model1",
            ModelFamily::Model2 => "model2",
        })
    }
}

impl FromStr for ModelFamily {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "model1" => Ok(ModelFamily::Model1),
            "model2" => Ok(ModelFamily::Model2),
            _ => Err(format!("unknown model family '{s}'")),
        }
    }
}

/// Spin ⊗ cavity jumps [l_c, l₁, l_d, l_nn]:
/// l_c = √κ₂ 1⊗(a² − α²), l₁ = √κ₁ X⊗a, l_d = √κ_d 1⊗a†a,
/// l_nn = √κ_nn ½X(1 − Z)⊗a. H = 0.
pub fn toy_model(params: &CavityParams) -> Result<LindbladModel> {
    params.validate()?;
    let s = &params.space;
    let a = annihilation(s);
    let x = pauli_x();
    let id2 = qubit_identity();
    let lower = &x * &(&id2 - &pauli_z()).scale_real(0.5);
    let jumps = vec![
        tensor(&[&id2, &two_photon_jump(params)])?,
        tensor(&[&x, &a])?.scale_real(params.kappa1.sqrt()),
        tensor(&[&id2, &number(s)])?.scale_real(params.kappad.sqrt()),
        tensor(&[&lower, &a])?.scale_real(params.kappann.sqrt()),
    ];
    let h = tensor(&[&id2, &cavity_identity(s)])?.scale_real(0.0);
    LindbladModel::new(h, jumps)
}

/// (1/√5)|↓>|α_e> + (2e^{iπ/4}/√5)|↓>|α_o>.
pub fn toy_initial_state(alpha: C64, space: &FockSpace) -> Result<StateVector> {
    let (even, odd) = cat_states(alpha, space)?;
    let down = StateVector::basis(2, 0);
    let c_e = C64::new(1.0 / 5f64.sqrt(), 0.0);
    let c_o = C64::from_polar(2.0 / 5f64.sqrt(), PI / 4.0);
    Ok(down.tensor(&even).scale(c_e).add_scaled(c_o, &down.tensor(&odd)))
}

/// Population of the highest Fock level, summed over the `outer` factor
/// that precedes the cavity.
pub fn top_level_population(rho: &DensityMatrix, space: &FockSpace) -> f64 {
    let d = space.dim();
    let outer = rho.dim() / d;
    (0..outer).map(|q| rho.get(q * d + space.n_max(), q * d + space.n_max()).re).sum()
}

fn check_leak(rho: &DensityMatrix, space: &FockSpace) -> Result<()> {
    let p = top_level_population(rho, space);
    if p > space.leak_tol() {
        return Err(Error::Truncation { deficit: p, tol: space.leak_tol() });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryMode {
    /// Recovery stage keeps κ_nn.
    KeepKnn,
    /// Recovery stage also switches κ_nn off.
    ZeroKnn,
}

impl fmt::Display for RecoveryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RecoveryMode::KeepKnn => "keep_knn",
            RecoveryMode::ZeroKnn => "zero_knn",
        })
    }
}

impl FromStr for RecoveryMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "keep_knn" => Ok(RecoveryMode::KeepKnn),
            "zero_knn" => Ok(RecoveryMode::ZeroKnn),
            _ => Err(format!("unknown recovery mode '{s}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToyProtocol {
    pub t_noisy: f64,
    pub t_recovery: f64,
    pub mode: RecoveryMode,
}

impl Default for ToyProtocol {
    fn default() -> Self {
        Self { t_noisy: 15.0, t_recovery: 15.0, mode: RecoveryMode::KeepKnn }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FidelityCurve {
    pub n_values: Vec<f64>,
    pub fidelity: Vec<f64>,
    /// Bound on the integration error of each fidelity.
    pub tolerance: f64,
    pub t_noisy: f64,
    pub t_recovery: f64,
    pub mode: RecoveryMode,
}

/// Evolve the toy model with all noise on for `t_noisy`, then with
/// κ₁ = κ_d = 0 (and κ_nn per `mode`) for `t_recovery`, and return
/// <ψ|ρ_f|ψ> for the protocol's initial state ψ.
pub fn toy_fidelity(params: &CavityParams, protocol: &ToyProtocol) -> Result<f64> {
    let psi = toy_initial_state(params.alpha(), &params.space)?;
    let rho0 = DensityMatrix::pure(&psi)?;
    let noisy = toy_model(params)?;
    let recovery_knn = match protocol.mode {
        RecoveryMode::KeepKnn => params.kappann,
        RecoveryMode::ZeroKnn => 0.0,
    };
    let quiet = toy_model(&params.with_kappa1(0.0).with_kappad(0.0).with_kappann(recovery_knn))?;
    let opts = EvolveOptions::default();
    let mid = Evolver::new(&noisy, opts).evolve(&rho0, protocol.t_noisy)?;
    check_leak(&mid, &params.space)?;
    let fin = Evolver::new(&quiet, opts).evolve(&mid, protocol.t_recovery)?;
    check_leak(&fin, &params.space)?;
    Ok(fin.overlap_with_pure(&psi))
}

/// [`toy_fidelity`] for each photon number, with λ = Nκ₂ and the default
/// cutoff for each N. Points run in parallel.
pub fn toy_fidelity_experiment(base: &CavityParams, n_list: &[f64], protocol: &ToyProtocol) -> Result<FidelityCurve> {
    let fidelity = n_list
        .par_iter()
        .map(|&n| {
            let p = CavityParams { lam: n * base.kappa2, space: FockSpace::for_photon_number(n), ..*base };
            toy_fidelity(&p, protocol)
        })
        .collect::<Result<Vec<_>>>()?;
    let tol = EvolveOptions::default().krylov.tol;
    Ok(FidelityCurve {
        n_values: n_list.to_vec(),
        fidelity,
        tolerance: tol * (protocol.t_noisy + protocol.t_recovery),
        t_noisy: protocol.t_noisy,
        t_recovery: protocol.t_recovery,
        mode: protocol.mode,
    })
}

/// Slow eigenmodes holding the symmetry-broken steady states: the kernel
/// when photon loss is off, otherwise the stationary state and the slow
/// tunnelling mode between |±μ>.
pub fn slow_manifold(params: &CavityParams) -> SlowManifold {
    if params.kappa1 == 0.0 {
        SlowManifold::Kernel
    } else {
        SlowManifold::Slowest(2)
    }
}

/// Steady state reached from |α><α| once the tunnelling between the two
/// cat lobes is neglected.
pub fn broken_symmetry_state(family: ModelFamily, params: &CavityParams) -> Result<DensityMatrix> {
    let model = family.build(params)?;
    let alpha = coherent_state(params.alpha(), &params.space)?
        .normalized()
        .ok_or(Error::DegenerateCat)?;
    let rho = project_onto_slow_manifold(&model, &DensityMatrix::pure(&alpha)?, slow_manifold(params))?;
    check_leak(&rho, &params.space)?;
    Ok(rho)
}

#[derive(Clone, Debug, Serialize)]
pub struct OverlapRow {
    pub model: ModelFamily,
    #[serde(rename = "N")]
    pub n: f64,
    pub kappa1: f64,
    pub overlap: f64,
}

/// <μ|ρ_ss|μ> over a grid of photon numbers and loss rates (κ₂ fixed).
pub fn steady_overlap_scan(
    family: ModelFamily,
    n_list: &[f64],
    kappa1_list: &[f64],
    kappa2: f64,
) -> Result<Vec<OverlapRow>> {
    let grid: Vec<(f64, f64)> =
        n_list.iter().flat_map(|&n| kappa1_list.iter().map(move |&k| (n, k))).collect();
    grid.par_iter()
        .map(|&(n, kappa1)| {
            let p = CavityParams::new(n * kappa2, kappa2)?.with_kappa1(kappa1);
            let rho = broken_symmetry_state(family, &p)?;
            let mu = coherent_state(p.mu()?, &p.space)?.normalized().ok_or(Error::DegenerateCat)?;
            Ok(OverlapRow { model: family, n, kappa1, overlap: rho.overlap_with_pure(&mu) })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct GapRow {
    pub model: ModelFamily,
    pub lam: f64,
    pub kappa1: f64,
    pub gap: f64,
}

/// Decay rate of the slowest mode above the slow manifold.
pub fn manifold_gap(family: ModelFamily, params: &CavityParams) -> Result<f64> {
    let spec = liouvillian_spectrum(&family.build(params)?)?;
    let k = match slow_manifold(params) {
        SlowManifold::Kernel => spec.kernel_dim(),
        SlowManifold::Slowest(k) => k,
    };
    spec.gap_above(k).ok_or_else(|| Error::Eigensolver("spectrum smaller than the slow manifold".into()))
}

/// Dissipative gap as a function of the drive.
pub fn gap_scan(family: ModelFamily, lam_list: &[f64], kappa1: f64, kappa2: f64) -> Result<Vec<GapRow>> {
    lam_list
        .par_iter()
        .map(|&lam| {
            let p = CavityParams::new(lam, kappa2)?.with_kappa1(kappa1);
            Ok(GapRow { model: family, lam, kappa1, gap: manifold_gap(family, &p)? })
        })
        .collect()
}
