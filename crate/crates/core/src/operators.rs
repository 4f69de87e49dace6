//! Bosonic and spin operators on truncated Hilbert spaces.
//!
//! Everything here is dense. A cavity mode lives on the Fock states
//! `|0>, ..., |n_max>`; composite spaces are built with [`tensor`], with the
//! first factor being the most significant index.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Default tolerance on the norm lost to Fock truncation.
pub const DEFAULT_LEAK_TOL: f64 = 1e-8;

/// Fock cutoff that keeps the coherent-state tail of `photon_number`
/// photons below ~1e-10.
pub fn default_cutoff(photon_number: f64) -> usize {
    let n = photon_number.max(0.0);
    (n + 8.0 * n.sqrt() + 10.0).ceil() as usize
}

/// A truncated single-mode Fock space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FockSpace {
    n_max: usize,
    leak_tol: f64,
}

impl FockSpace {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidParams("Fock cutoff must be at least 1".into()));
        }
        Ok(Self { n_max, leak_tol: DEFAULT_LEAK_TOL })
    }

    /// Space with the default cutoff for a mean photon number.
    pub fn for_photon_number(photon_number: f64) -> Self {
        Self { n_max: default_cutoff(photon_number).max(1), leak_tol: DEFAULT_LEAK_TOL }
    }

    pub fn with_leak_tol(self, leak_tol: f64) -> Result<Self> {
        if !(leak_tol > 0.0) {
            return Err(Error::InvalidParams("leak tolerance must be positive".into()));
        }
        Ok(Self { leak_tol, ..self })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn leak_tol(&self) -> f64 {
        self.leak_tol
    }
}

/// One tensor factor of a composite space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    Cavity { n_max: usize },
    Qubit,
    Generic { dim: usize },
}

impl Factor {
    pub fn dim(&self) -> usize {
        match *self {
            Factor::Cavity { n_max } => n_max + 1,
            Factor::Qubit => 2,
            Factor::Generic { dim } => dim,
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Cavity { n_max } => write!(f, "cavity(n_max={n_max})"),
            Factor::Qubit => write!(f, "qubit"),
            Factor::Generic { dim } => write!(f, "generic({dim})"),
        }
    }
}

/// Tag describing the factor structure of an operator's space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceTag(Vec<Factor>);

impl SpaceTag {
    pub fn new(factors: Vec<Factor>) -> Self {
        Self(factors)
    }

    pub fn cavity(space: &FockSpace) -> Self {
        Self(vec![Factor::Cavity { n_max: space.n_max() }])
    }

    pub fn qubit() -> Self {
        Self(vec![Factor::Qubit])
    }

    pub fn generic(dim: usize) -> Self {
        Self(vec![Factor::Generic { dim }])
    }

    pub fn factors(&self) -> &[Factor] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.iter().map(Factor::dim).product()
    }
}

impl fmt::Display for SpaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join("⊗"))
    }
}

/// Dense complex operator with its factor structure.
#[derive(Clone, Debug)]
pub struct Operator {
    mat: Mat<C64>,
    tag: SpaceTag,
}

impl Operator {
    pub fn from_matrix(mat: Mat<C64>, tag: SpaceTag) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch { expected: mat.nrows(), found: mat.ncols() });
        }
        if tag.dim() != mat.nrows() {
            return Err(Error::DimensionMismatch { expected: tag.dim(), found: mat.nrows() });
        }
        for j in 0..mat.ncols() {
            if mat.col_as_slice(j).iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidParams("operator has non-finite entries".into()));
            }
        }
        Ok(Self { mat, tag })
    }

    /// Operator on an unstructured space of dimension `mat.nrows()`.
    pub fn generic(mat: Mat<C64>) -> Result<Self> {
        let tag = SpaceTag::generic(mat.nrows());
        Self::from_matrix(mat, tag)
    }

    pub fn identity(tag: SpaceTag) -> Self {
        let d = tag.dim();
        Self { mat: Mat::identity(d, d), tag }
    }

    pub fn zeros(tag: SpaceTag) -> Self {
        let d = tag.dim();
        Self { mat: Mat::zeros(d, d), tag }
    }

    pub(crate) fn from_fn(tag: SpaceTag, f: impl FnMut(usize, usize) -> C64) -> Self {
        let d = tag.dim();
        Self { mat: Mat::from_fn(d, d, f), tag }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn tag(&self) -> &SpaceTag {
        &self.tag
    }

    pub fn matrix(&self) -> &Mat<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> Mat<C64> {
        self.mat
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self { mat: self.mat.adjoint().to_owned(), tag: self.tag.clone() }
    }

    pub fn scale(&self, c: C64) -> Self {
        let mat = Mat::from_fn(self.dim(), self.dim(), |i, j| self.mat[(i, j)] * c);
        Self { mat, tag: self.tag.clone() }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.mat[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for j in 0..self.dim() {
            for z in self.mat.col_as_slice(j) {
                m = m.max(z.norm());
            }
        }
        m
    }

    /// max |A - A†| over entries.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut m = 0.0f64;
        for j in 0..d {
            for i in 0..=j {
                m = m.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        m
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        &(self * other) - &(other * self)
    }

    /// Matrix power by repeated multiplication.
    pub fn powi(&self, k: u32) -> Operator {
        let mut out = Operator::identity(self.tag.clone());
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn apply(&self, psi: &StateVector) -> StateVector {
        assert_eq!(self.dim(), psi.dim(), "operator/state dimension mismatch");
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for (j, &x) in psi.amplitudes().iter().enumerate() {
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(self.mat.col_as_slice(j)) {
                *o += m * x;
            }
        }
        StateVector::new(out)
    }

    /// <psi|A|psi> (no normalization applied).
    pub fn expectation(&self, psi: &StateVector) -> C64 {
        psi.inner(&self.apply(psi))
    }

    /// <bra|A|ket>.
    pub fn matrix_element(&self, bra: &StateVector, ket: &StateVector) -> C64 {
        bra.inner(&self.apply(ket))
    }

    /// Outer product |ket><bra| on the given space.
    pub fn outer(ket: &StateVector, bra: &StateVector, tag: SpaceTag) -> Result<Self> {
        if ket.dim() != tag.dim() || bra.dim() != tag.dim() {
            return Err(Error::DimensionMismatch { expected: tag.dim(), found: ket.dim() });
        }
        let (k, b) = (ket.amplitudes(), bra.amplitudes());
        Ok(Self::from_fn(tag, |i, j| k[i] * b[j].conj()))
    }

    fn check_same_space(&self, other: &Operator) {
        assert_eq!(self.dim(), other.dim(), "operator dimension mismatch");
    }
}

impl Mul<&Operator> for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        self.check_same_space(rhs);
        Operator { mat: &self.mat * &rhs.mat, tag: self.tag.clone() }
    }
}

impl Add<&Operator> for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        self.check_same_space(rhs);
        Operator { mat: &self.mat + &rhs.mat, tag: self.tag.clone() }
    }
}

impl Sub<&Operator> for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        self.check_same_space(rhs);
        Operator { mat: &self.mat - &rhs.mat, tag: self.tag.clone() }
    }
}

/// A (not necessarily normalized) pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Self {
        Self { amps }
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[k] = C64::new(1.0, 0.0);
        Self { amps }
    }

    /// Fock state |n>.
    pub fn fock(space: &FockSpace, n: usize) -> Result<Self> {
        if n > space.n_max() {
            return Err(Error::Truncation { deficit: 1.0, tol: space.leak_tol() });
        }
        Ok(Self::basis(space.dim(), n))
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Unit-norm copy; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| self.scale(C64::new(1.0 / n, 0.0)))
    }

    /// <self|other>.
    pub fn inner(&self, other: &StateVector) -> C64 {
        assert_eq!(self.dim(), other.dim(), "state dimension mismatch");
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { amps: self.amps.iter().map(|z| z * c).collect() }
    }

    /// self + c * other
    pub fn add_scaled(&self, c: C64, other: &StateVector) -> Self {
        assert_eq!(self.dim(), other.dim(), "state dimension mismatch");
        Self { amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a + c * b).collect() }
    }

    /// Kronecker product, `self` being the most significant factor.
    pub fn tensor(&self, other: &StateVector) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        Self { amps }
    }

    pub fn distance(&self, other: &StateVector) -> f64 {
        self.add_scaled(C64::new(-1.0, 0.0), other).norm()
    }
}

/// Cavity annihilation operator `a` with <n-1|a|n> = sqrt(n).
pub fn annihilation(space: &FockSpace) -> Operator {
    Operator::from_fn(SpaceTag::cavity(space), |i, j| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

pub fn creation(space: &FockSpace) -> Operator {
    annihilation(space).adjoint()
}

/// Photon number a†a, diagonal with entries n.
pub fn number(space: &FockSpace) -> Operator {
    Operator::from_fn(SpaceTag::cavity(space), |i, j| {
        if i == j {
            C64::new(i as f64, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Photon parity exp(iπ a†a), diagonal with entries (-1)^n.
pub fn parity(space: &FockSpace) -> Operator {
    Operator::from_fn(SpaceTag::cavity(space), |i, j| {
        if i != j {
            C64::new(0.0, 0.0)
        } else if i % 2 == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(-1.0, 0.0)
        }
    })
}

pub fn cavity_identity(space: &FockSpace) -> Operator {
    Operator::identity(SpaceTag::cavity(space))
}

fn qubit_op(entries: [[C64; 2]; 2]) -> Operator {
    Operator::from_fn(SpaceTag::qubit(), |i, j| entries[i][j])
}

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

pub fn pauli_x() -> Operator {
    qubit_op([[ZERO, ONE], [ONE, ZERO]])
}

pub fn pauli_y() -> Operator {
    qubit_op([[ZERO, -I], [I, ZERO]])
}

/// Z with Z|↓> = |↓> (index 0) and Z|↑> = -|↑> (index 1).
pub fn pauli_z() -> Operator {
    qubit_op([[ONE, ZERO], [ZERO, -ONE]])
}

pub fn qubit_identity() -> Operator {
    Operator::identity(SpaceTag::qubit())
}

/// Kronecker product in the given factor order.
pub fn tensor(ops: &[&Operator]) -> Result<Operator> {
    let (first, rest) = ops
        .split_first()
        .ok_or_else(|| Error::InvalidParams("tensor of an empty operator list".into()))?;
    let mut mat = first.mat.clone();
    let mut factors = first.tag.factors().to_vec();
    for op in rest {
        mat = mat.kron(&op.mat);
        factors.extend_from_slice(op.tag.factors());
    }
    Operator::from_matrix(mat, SpaceTag::new(factors))
}

/// Truncated coherent state e^{-|α|²/2} Σ αⁿ/√(n!) |n>, not renormalized:
/// its norm deficit is the weight lost above the cutoff.
pub fn coherent_state(alpha: C64, space: &FockSpace) -> Result<StateVector> {
    let mut amps = Vec::with_capacity(space.dim());
    let mut c = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    amps.push(c);
    for n in 1..space.dim() {
        c = c * alpha / (n as f64).sqrt();
        amps.push(c);
    }
    let psi = StateVector::new(amps);
    let deficit = 1.0 - psi.norm_sqr();
    if deficit > space.leak_tol() {
        return Err(Error::Truncation { deficit, tol: space.leak_tol() });
    }
    Ok(psi)
}

/// Normalized even and odd cat states built from |±α>.
pub fn cat_states(alpha: C64, space: &FockSpace) -> Result<(StateVector, StateVector)> {
    let plus = coherent_state(alpha, space)?;
    let minus = coherent_state(-alpha, space)?;
    let even = plus.add_scaled(ONE, &minus);
    let odd = plus.add_scaled(-ONE, &minus);
    let even = even.normalized().ok_or(Error::DegenerateCat)?;
    if odd.norm() < 1e-10 {
        return Err(Error::DegenerateCat);
    }
    let odd = odd.normalized().ok_or(Error::DegenerateCat)?;
    Ok((even, odd))
}

/// Projector onto the cat codespace, |α_e><α_e| + |α_o><α_o|.
pub fn codespace_projector(alpha: C64, space: &FockSpace) -> Result<Operator> {
    let (even, odd) = cat_states(alpha, space)?;
    let tag = SpaceTag::cavity(space);
    let pe = Operator::outer(&even, &even, tag.clone())?;
    let po = Operator::outer(&odd, &odd, tag)?;
    Ok(&pe + &po)
}

/// Cat amplitude e^{-iπ/4} √N used throughout the cavity models.
pub fn cat_amplitude(photon_number: f64) -> C64 {
    C64::from_polar(photon_number.max(0.0).sqrt(), -PI / 4.0)
}

/// e^{-y/2} L_n(y) for n = 0..count via the three-term Laguerre recurrence
/// applied directly to the scaled values (never forming L_n itself).
pub fn scaled_laguerre(y: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let f0 = (-y / 2.0).exp();
    out.push(f0);
    if count == 1 {
        return out;
    }
    out.push((1.0 - y) * f0);
    for n in 1..count - 1 {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0 - y) * out[n] - nf * out[n - 1]) / (nf + 1.0);
        out.push(next);
    }
    out
}

/// Diagonal of cos[x(a+a†)] for n = 0..count, computed from the spectrum of
/// the truncated position matrix on `dim` Fock levels.
fn cosine_diagonal(x: f64, dim: usize, count: usize) -> Result<Vec<f64>> {
    let pos = Mat::<f64>::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            x * (j as f64).sqrt()
        } else if i == j + 1 {
            x * (i as f64).sqrt()
        } else {
            0.0
        }
    });
    let evd = pos
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let u = evd.U();
    let s = evd.S().column_vector();
    let cosines: Vec<f64> = (0..dim).map(|k| s[k].cos()).collect();
    Ok((0..count)
        .map(|n| (0..dim).map(|k| u[(n, k)] * u[(n, k)] * cosines[k]).sum())
        .collect())
}

/// Rotating-wave Josephson Hamiltonian, diagonal with entries
/// -E_J e^{-x²/2} L_n(x²), evaluated as the diagonal of -E_J cos[x(a+a†)].
///
/// The cosine is computed on an internally enlarged Fock space so the
/// returned entries up to `n_check` are converged; a second evaluation with
/// ten extra levels must agree to 1e-6 or a [`Error::Convergence`] is raised.
pub fn josephson_rwa_hamiltonian(
    e_j: f64,
    x: f64,
    space: &FockSpace,
    n_check: usize,
) -> Result<Operator> {
    if !(x >= 0.0) {
        return Err(Error::Domain("flux zero-point amplitude must be nonnegative".into()));
    }
    let count = space.dim();
    let n_check = n_check.min(space.n_max());
    // displacement by x spreads |n> over roughly (√n + x)² ± a few widths
    let reach = (count as f64).sqrt() + x + 8.0;
    let internal = (count + 20).max((reach * reach).ceil() as usize + 20);
    let diag = cosine_diagonal(x, internal, count)?;
    let check = cosine_diagonal(x, internal + 10, count)?;
    let max_change = diag[..=n_check]
        .iter()
        .zip(&check[..=n_check])
        .map(|(a, b)| (e_j * (a - b)).abs())
        .fold(0.0, f64::max);
    if max_change > 1e-6 {
        return Err(Error::Convergence { max_change });
    }
    Ok(Operator::from_fn(SpaceTag::cavity(space), |i, j| {
        if i == j {
            C64::new(-e_j * diag[i], 0.0)
        } else {
            ZERO
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn annihilation_matrix_elements() {
        let s1 = FockSpace::new(1).unwrap();
        let a = annihilation(&s1);
        let out = a.apply(&StateVector::fock(&s1, 1).unwrap());
        assert_eq!(out, StateVector::fock(&s1, 0).unwrap());

        let s5 = FockSpace::new(5).unwrap();
        let a = annihilation(&s5);
        assert!((a.get(3, 4) - c(2.0)).norm() < 1e-15);
        let vac = a.apply(&StateVector::fock(&s5, 0).unwrap());
        assert_eq!(vac.norm(), 0.0);
    }

    #[test]
    fn canonical_commutator_below_cutoff() {
        let s = FockSpace::new(12).unwrap();
        let a = annihilation(&s);
        let comm = a.commutator(&a.adjoint());
        for i in 0..s.n_max() {
            for j in 0..s.n_max() {
                let expected = if i == j { c(1.0) } else { c(0.0) };
                assert!((comm.get(i, j) - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn parity_properties() {
        let s = FockSpace::new(9).unwrap();
        let q = parity(&s);
        let vac = StateVector::fock(&s, 0).unwrap();
        assert_eq!(q.apply(&vac), vac);
        let three = StateVector::fock(&s, 3).unwrap();
        assert_eq!(q.apply(&three), three.scale(c(-1.0)));
        let q2 = &q * &q;
        assert_eq!(q2.max_abs(), 1.0);
        assert!((&q2 - &cavity_identity(&s)).max_abs() == 0.0);
        // Q a Q = -a exactly
        let a = annihilation(&s);
        let qaq = &(&q * &a) * &q;
        assert_eq!((&qaq + &a).max_abs(), 0.0);
    }

    #[test]
    fn coherent_state_basics() {
        let s = FockSpace::new(30).unwrap();
        let vac = coherent_state(c(0.0), &s).unwrap();
        assert_eq!(vac, StateVector::fock(&s, 0).unwrap());

        let alpha = C64::new(2.0_f64.sqrt(), 2.0_f64.sqrt());
        let psi = coherent_state(alpha, &s).unwrap();
        let a = annihilation(&s);
        assert!((a.expectation(&psi) - alpha).norm() < 1e-8);
    }

    #[test]
    fn coherent_overlap_matches_closed_form() {
        let alpha = cat_amplitude(4.0);
        let s = FockSpace::for_photon_number(4.0);
        let p = coherent_state(alpha, &s).unwrap();
        let m = coherent_state(-alpha, &s).unwrap();
        let direct = p.inner(&m).norm_sqr();
        // independent closed form |<α|-α>|² = e^{-4|α|²}
        let closed = (-4.0 * alpha.norm_sqr()).exp();
        assert!((direct - closed).abs() < 1e-8);
    }

    #[test]
    fn coherent_state_deficit_matches_tail() {
        let x: f64 = 9.0;
        let s = FockSpace::new(18).unwrap().with_leak_tol(1.0).unwrap();
        let psi = coherent_state(C64::new(x.sqrt(), 0.0), &s).unwrap();
        let deficit = 1.0 - psi.norm_sqr();
        // Poisson tail summed term by term
        let mut term = (-x).exp();
        let mut tail = 0.0;
        for n in 1..200 {
            term *= x / n as f64;
            if n > s.n_max() {
                tail += term;
            }
        }
        assert!(deficit > 0.5 * tail && deficit < 2.0 * tail, "{deficit} vs {tail}");
    }

    #[test]
    fn truncation_error_raised() {
        let s = FockSpace::new(10).unwrap();
        let err = coherent_state(C64::new(3.0, 0.0), &s).unwrap_err();
        assert!(matches!(err, Error::Truncation { .. }));
    }

    #[test]
    fn cat_states_parity_and_orthogonality() {
        let s = FockSpace::for_photon_number(4.0);
        let alpha = cat_amplitude(4.0);
        let (e, o) = cat_states(alpha, &s).unwrap();
        let q = parity(&s);
        assert_eq!(q.apply(&e), e);
        assert_eq!(q.apply(&o), o.scale(c(-1.0)));
        assert!(e.inner(&o).norm() < 1e-15);
        assert!((e.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cat_states_at_zero_amplitude() {
        let s = FockSpace::new(5).unwrap();
        let err = cat_states(c(0.0), &s).unwrap_err();
        assert!(matches!(err, Error::DegenerateCat));
        // the even combination alone is the vacuum
        let plus = coherent_state(c(0.0), &s).unwrap();
        let even = plus.add_scaled(c(1.0), &plus).normalized().unwrap();
        assert_eq!(even, StateVector::fock(&s, 0).unwrap());
    }

    #[test]
    fn cat_superposition_is_coherent_state() {
        let n: f64 = 8.0;
        let s = FockSpace::for_photon_number(n);
        let alpha = cat_amplitude(n);
        let (e, o) = cat_states(alpha, &s).unwrap();
        let sum = e.add_scaled(c(1.0), &o).scale(c(1.0 / 2.0_f64.sqrt()));
        let coh = coherent_state(alpha, &s).unwrap();
        assert!(sum.distance(&coh) < 2.0 * (-2.0 * n).exp());
    }

    #[test]
    fn codespace_projector_properties() {
        let n: f64 = 8.0;
        let s = FockSpace::for_photon_number(n);
        let alpha = cat_amplitude(n);
        let v = codespace_projector(alpha, &s).unwrap();
        assert!((&(&v * &v) - &v).max_abs() < 1e-12);
        assert!(v.is_hermitian(1e-14));
        assert!((v.trace() - c(2.0)).norm() < 1e-10);
        let (e, _) = cat_states(alpha, &s).unwrap();
        assert!(v.apply(&e).distance(&e) < 1e-12);
        // high Fock states sit far outside the codespace
        let far = StateVector::fock(&s, s.n_max()).unwrap();
        assert!(v.apply(&far).norm() < 1e-6);
    }

    #[test]
    fn tensor_structure() {
        let s = FockSpace::new(6).unwrap();
        let a = annihilation(&s);
        let id2 = qubit_identity();
        let ia = tensor(&[&id2, &a]).unwrap();
        assert_eq!(ia.dim(), 2 * s.dim());
        assert_eq!(ia.tag().to_string(), "qubit⊗cavity(n_max=6)");

        let xi = tensor(&[&pauli_x(), &cavity_identity(&s)]).unwrap();
        assert_eq!(xi.commutator(&ia).max_abs(), 0.0);

        let xa = tensor(&[&pauli_x(), &a]).unwrap();
        let a2 = tensor(&[&id2, &(&a * &a)]).unwrap();
        assert!((&(&xa * &xa) - &a2).max_abs() < 1e-14);
    }

    #[test]
    fn empty_tensor_is_rejected() {
        assert!(tensor(&[]).is_err());
    }

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (pauli_x(), pauli_y(), pauli_z());
        // XY = iZ
        let xy = &x * &y;
        assert!((&xy - &z.scale(I)).max_abs() < 1e-15);
        assert!((&(&x * &x) - &qubit_identity()).max_abs() == 0.0);
    }

    #[test]
    fn josephson_zero_flux_is_minus_identity() {
        let s = FockSpace::new(20).unwrap();
        let h = josephson_rwa_hamiltonian(2.0, 0.0, &s, 10).unwrap();
        assert!((&h - &cavity_identity(&s).scale_real(-2.0)).max_abs() < 1e-12);
    }

    #[test]
    fn josephson_routes_agree() {
        for &x2 in &[0.5, 4.0, 16.0, 36.0, 64.0] {
            let x = f64::sqrt(x2);
            let s = FockSpace::new(40).unwrap();
            let h = josephson_rwa_hamiltonian(1.0, x, &s, 32).unwrap();
            let lag = scaled_laguerre(x2, s.dim());
            for n in 0..=32 {
                let d = h.get(n, n).re;
                assert!(d.abs() <= 1.0 + 1e-12);
                assert!((d + lag[n]).abs() < 1e-8, "x²={x2} n={n}: {d} vs {}", -lag[n]);
            }
        }
    }

    #[test]
    fn scaled_laguerre_small_cases() {
        // L_2(y) = 1 - 2y + y²/2
        let y = 1.3;
        let v = scaled_laguerre(y, 3);
        let l2 = 1.0 - 2.0 * y + y * y / 2.0;
        assert!((v[2] - (-y / 2.0f64).exp() * l2).abs() < 1e-15);
    }
}
