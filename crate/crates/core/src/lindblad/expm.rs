use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn one_norm(a: &Mat<C64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.col_as_slice(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn sc(a: &Mat<C64>, c: f64) -> Mat<C64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * c)
}

/// Matrix exponential by scaling and squaring with a degree-13 Padé
/// approximant.
pub fn expm(a: &Mat<C64>) -> Mat<C64> {
    let n = a.nrows();
    let norm = one_norm(a);
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = sc(a, 0.5f64.powi(s));
    let b = PADE13;
    let id = Mat::<C64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * (sc(&a6, b[13]) + sc(&a4, b[11]) + sc(&a2, b[9]));
    let u = &a * (inner_u + sc(&a6, b[7]) + sc(&a4, b[5]) + sc(&a2, b[3]) + sc(&id, b[1]));
    let inner_v = &a6 * (sc(&a6, b[12]) + sc(&a4, b[10]) + sc(&a2, b[8]));
    let v = inner_v + sc(&a6, b[6]) + sc(&a4, b[4]) + sc(&a2, b[2]) + sc(&id, b[0]);
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.partial_piv_lu().solve(&p);
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

#[derive(Clone, Copy, Debug)]
pub struct KrylovOptions {
    /// Krylov subspace dimension.
    pub m: usize,
    /// Local error tolerance per unit time.
    pub tol: f64,
    pub max_rejections: usize,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self { m: 30, tol: 1e-12, max_rejections: 50 }
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn round_two_digits(x: f64) -> f64 {
    if x <= 0.0 || !x.is_finite() {
        return x;
    }
    let e = x.log10().floor() - 1.0;
    let p = 10f64.powf(e);
    (x / p).ceil() * p
}

/// w = exp(tA) v with A given only through `matvec`, by restarted Arnoldi
/// with local error control. `anorm` is an upper estimate of ‖A‖.
pub fn expv<F>(t: f64, mut matvec: F, v: &[C64], anorm: f64, opts: KrylovOptions) -> Result<Vec<C64>>
where
    F: FnMut(&[C64], &mut [C64]),
{
    let n = v.len();
    let mut w = v.to_vec();
    let mut beta = norm(&w);
    if t == 0.0 || beta == 0.0 {
        return Ok(w);
    }
    let m = opts.m.min(n).max(1);
    let tol = opts.tol;
    let (gamma, delta) = (0.9, 1.2);
    let anorm = anorm.max(1e-300);
    let xm0 = 1.0 / m as f64;
    let fact = ((m as f64 + 1.0) / std::f64::consts::E).powf(m as f64 + 1.0)
        * (2.0 * std::f64::consts::PI * (m as f64 + 1.0)).sqrt();
    let mut t_step =
        round_two_digits((1.0 / anorm) * ((fact * tol) / (4.0 * beta * anorm)).powf(xm0));
    let mut t_now = 0.0;
    let mut basis: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); n]; m + 1];
    let mut p = vec![C64::new(0.0, 0.0); n];

    while t_now < t {
        t_step = t_step.min(t - t_now);
        for (b, x) in basis[0].iter_mut().zip(&w) {
            *b = x / beta;
        }
        let mut h = Mat::<C64>::zeros(m + 2, m + 2);
        let mut breakdown: Option<usize> = None;
        for j in 0..m {
            matvec(&basis[j], &mut p);
            let before = norm(&p);
            for _pass in 0..2 {
                for i in 0..=j {
                    let c = dot(&basis[i], &p);
                    for (x, b) in p.iter_mut().zip(&basis[i]) {
                        *x -= c * b;
                    }
                    h[(i, j)] += c;
                }
            }
            let s = norm(&p);
            if before == 0.0 || s <= 1e-12 * before {
                breakdown = Some(j + 1);
                t_step = t - t_now;
                break;
            }
            h[(j + 1, j)] = C64::new(s, 0.0);
            for (b, x) in basis[j + 1].iter_mut().zip(&p) {
                *b = x / s;
            }
        }
        let avnorm = if breakdown.is_none() {
            h[(m + 1, m)] = C64::new(1.0, 0.0);
            matvec(&basis[m], &mut p);
            norm(&p)
        } else {
            0.0
        };

        let mut rejections = 0;
        let (f, err_loc, xm) = loop {
            let mx = breakdown.unwrap_or(m + 2);
            let sub = Mat::from_fn(mx, mx, |i, j| h[(i, j)] * t_step);
            let f = expm(&sub);
            if breakdown.is_some() {
                break (f, 0.0, xm0);
            }
            let phi1 = (beta * f[(m, 0)]).norm();
            let phi2 = (beta * f[(m + 1, 0)] * avnorm).norm();
            let (err_loc, xm) = if phi1 > 10.0 * phi2 {
                (phi2, xm0)
            } else if phi1 > phi2 {
                (phi1 * phi2 / (phi1 - phi2), xm0)
            } else {
                (phi1, 1.0 / (m as f64 - 1.0).max(1.0))
            };
            if err_loc <= delta * t_step * tol {
                break (f, err_loc, xm);
            }
            rejections += 1;
            if rejections > opts.max_rejections {
                return Err(Error::Integration(format!(
                    "Krylov step rejected {rejections} times at t = {t_now}"
                )));
            }
            t_step = round_two_digits(gamma * t_step * (t_step * tol / err_loc).powf(xm));
        };

        let used = breakdown.unwrap_or(m + 1);
        w.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
        for i in 0..used {
            let c = f[(i, 0)] * beta;
            for (x, b) in w.iter_mut().zip(&basis[i]) {
                *x += c * b;
            }
        }
        beta = norm(&w);
        t_now += t_step;
        if breakdown.is_some() {
            break;
        }
        t_step = if err_loc > 0.0 {
            round_two_digits(gamma * t_step * (t_step * tol / err_loc).powf(xm))
        } else {
            t_step * 10.0
        };
        if beta == 0.0 {
            break;
        }
    }
    Ok(w)
}
