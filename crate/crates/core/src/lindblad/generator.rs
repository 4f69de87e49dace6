use faer::Mat;
use num_complex::Complex64 as C64;

use super::{DensityMatrix, LindbladModel};
use crate::error::{Error, Result};

/// Dense Liouvillian acting on column-stacked density matrices:
/// I⊗A + Ā⊗I + Σ_j L̄_j⊗L_j with A = -iH - ½ Σ_j L_j†L_j.
pub fn build_liouvillian(model: &LindbladModel) -> Mat<C64> {
    let d = model.dim();
    let id = Mat::<C64>::identity(d, d);
    let a = drift(model);
    let a_bar = a.conjugate().to_owned();
    let mut out = id.kron(&a);
    out += a_bar.kron(&id);
    for l in model.jumps() {
        let m = l.matrix();
        out += m.conjugate().to_owned().kron(m);
    }
    out
}

/// -iH - ½ Σ L†L
fn drift(model: &LindbladModel) -> Mat<C64> {
    let d = model.dim();
    let h = model.hamiltonian().matrix();
    let mut a = Mat::from_fn(d, d, |i, j| C64::new(0.0, -1.0) * h[(i, j)]);
    for l in model.jumps() {
        let m = l.matrix();
        let ldl = m.adjoint() * m;
        a -= Mat::from_fn(d, d, |i, j| ldl[(i, j)] * 0.5);
    }
    a
}

/// Right-hand side of the master equation evaluated with dense matrix
/// products on ρ directly.
pub fn lindblad_rhs(model: &LindbladModel, rho: &DensityMatrix) -> Result<Mat<C64>> {
    if rho.dim() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), found: rho.dim() });
    }
    let r = rho.matrix();
    let h = model.hamiltonian().matrix();
    let comm = h * r - r * h;
    let mut out = Mat::from_fn(r.nrows(), r.ncols(), |i, j| C64::new(0.0, -1.0) * comm[(i, j)]);
    for l in model.jumps() {
        let m = l.matrix();
        let md = m.adjoint();
        let ldl = md * m;
        out += m * r * md;
        let anti = &ldl * r + r * &ldl;
        out -= Mat::from_fn(anti.nrows(), anti.ncols(), |i, j| anti[(i, j)] * 0.5);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
struct SparseOp {
    entries: Vec<(usize, usize, C64)>,
}

impl SparseOp {
    fn from_dense(m: &Mat<C64>) -> Self {
        let mut entries = Vec::new();
        for j in 0..m.ncols() {
            for (i, &v) in m.col_as_slice(j).iter().enumerate() {
                if v != C64::new(0.0, 0.0) {
                    entries.push((i, j, v));
                }
            }
        }
        Self { entries }
    }

    /// out += S X for column-major X (d×d)
    fn left_mul_add(&self, d: usize, x: &[C64], out: &mut [C64]) {
        for c in 0..d {
            let xc = &x[c * d..(c + 1) * d];
            let oc = &mut out[c * d..(c + 1) * d];
            for &(i, j, v) in &self.entries {
                oc[i] += v * xc[j];
            }
        }
    }

    /// out += X S†
    fn right_mul_adj_add(&self, d: usize, x: &[C64], out: &mut [C64]) {
        for &(i, j, v) in &self.entries {
            let w = v.conj();
            let (src, dst) = (j * d, i * d);
            for r in 0..d {
                out[dst + r] += x[src + r] * w;
            }
        }
    }

    /// out = S x for a vector
    fn apply(&self, x: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|o| *o = C64::new(0.0, 0.0));
        for &(i, j, v) in &self.entries {
            out[i] += v * x[j];
        }
    }

    fn frobenius(&self) -> f64 {
        self.entries.iter().map(|e| e.2.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Matrix-free form of the generator used by the integrators. Applies
/// ρ ↦ Aρ + ρA† + Σ L ρ L† on column-stacked ρ at O(nnz · dim) cost.
#[derive(Clone, Debug)]
pub struct Generator {
    dim: usize,
    drift: SparseOp,
    jumps: Vec<SparseOp>,
    norm_bound: f64,
}

impl Generator {
    pub fn new(model: &LindbladModel) -> Self {
        let drift = SparseOp::from_dense(&drift(model));
        let jumps: Vec<SparseOp> =
            model.jumps().iter().map(|l| SparseOp::from_dense(l.matrix())).collect();
        let norm_bound =
            2.0 * drift.frobenius() + jumps.iter().map(|j| j.frobenius().powi(2)).sum::<f64>();
        Self { dim: model.dim(), drift, jumps, norm_bound }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Upper bound on the 2-norm of the superoperator.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    /// out = L(x) on a column-stacked density matrix.
    pub fn apply(&self, x: &[C64], out: &mut [C64]) {
        let d = self.dim;
        out.iter_mut().for_each(|o| *o = C64::new(0.0, 0.0));
        self.drift.left_mul_add(d, x, out);
        self.drift.right_mul_adj_add(d, x, out);
        if self.jumps.is_empty() {
            return;
        }
        let mut tmp = vec![C64::new(0.0, 0.0); d * d];
        for j in &self.jumps {
            tmp.iter_mut().for_each(|t| *t = C64::new(0.0, 0.0));
            j.left_mul_add(d, x, &mut tmp);
            j.right_mul_adj_add(d, &tmp, out);
        }
    }

    /// out = (-iH - ½ΣL†L) ψ, the non-Hermitian drift of a pure state.
    pub fn apply_drift(&self, psi: &[C64], out: &mut [C64]) {
        self.drift.apply(psi, out);
    }

    pub fn jump_count(&self) -> usize {
        self.jumps.len()
    }

    /// out = L_k ψ
    pub fn apply_jump(&self, k: usize, psi: &[C64], out: &mut [C64]) {
        self.jumps[k].apply(psi, out);
    }
}

/// Convenience for tests: apply a dense operator to a column-stacked vector.
pub(crate) fn dense_matvec(m: &Mat<C64>, x: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); m.nrows()];
    for (j, &xj) in x.iter().enumerate() {
        for (o, &v) in out.iter_mut().zip(m.col_as_slice(j)) {
            *o += v * xj;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{annihilation, number, FockSpace, Operator, SpaceTag};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_op(rng: &mut ChaCha8Rng, d: usize, hermitian: bool) -> Operator {
        let m = Mat::from_fn(d, d, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let m = if hermitian { Mat::from_fn(d, d, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5) } else { m };
        Operator::from_matrix(m, SpaceTag::generic(d)).unwrap()
    }

    fn random_density(rng: &mut ChaCha8Rng, d: usize) -> DensityMatrix {
        let g = Mat::from_fn(d, d, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let m = &g * g.adjoint();
        DensityMatrix::from_matrix_unchecked(m).unwrap().trace_normalized().unwrap()
    }

    #[test]
    fn liouvillian_matches_direct_rhs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = 5;
        let model = LindbladModel::new(
            random_op(&mut rng, d, true),
            vec![random_op(&mut rng, d, false), random_op(&mut rng, d, false)],
        )
        .unwrap();
        let lv = build_liouvillian(&model);
        let gen = Generator::new(&model);
        for _ in 0..20 {
            let rho = random_density(&mut rng, d);
            let direct = DensityMatrix::from_matrix_unchecked(lindblad_rhs(&model, &rho).unwrap())
                .unwrap()
                .to_vec();
            let via_matrix = dense_matvec(&lv, &rho.to_vec());
            let mut via_gen = vec![C64::new(0.0, 0.0); d * d];
            gen.apply(&rho.to_vec(), &mut via_gen);
            let scale = direct.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let e1 = direct.iter().zip(&via_matrix).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            let e2 = direct.iter().zip(&via_gen).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            assert!(e1 < 1e-10 * scale, "{e1}");
            assert!(e2 < 1e-10 * scale, "{e2}");
        }
    }

    #[test]
    fn empty_model_gives_zero_superoperator() {
        let h = Operator::zeros(SpaceTag::generic(3));
        let model = LindbladModel::new(h, vec![]).unwrap();
        let lv = build_liouvillian(&model);
        assert_eq!(lv.norm_max(), 0.0);
    }

    #[test]
    fn trace_preservation_row() {
        let s = FockSpace::new(6).unwrap();
        let a = annihilation(&s);
        let model = LindbladModel::new(number(&s).scale_real(0.7), vec![a.scale_real(0.9), (&a * &a).scale_real(0.4)])
            .unwrap();
        let lv = build_liouvillian(&model);
        let d = s.dim();
        for col in 0..d * d {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..d {
                acc += lv[(i + d * i, col)];
            }
            assert!(acc.norm() < 1e-10);
        }
    }
}
