//! Adaptive Dormand–Prince 5(4) integration for real or complex state vectors.

use std::ops::{Add, Mul};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Scalar type an ODE state is made of.
pub trait Component:
    Copy + Default + Send + Sync + Add<Output = Self> + Mul<f64, Output = Self>
{
    fn modulus(self) -> f64;
}

impl Component for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Component for C64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-12, max_steps: 10_000_000 }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// fifth-order weights minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combine<T: Component>(out: &mut [T], y: &[T], h: f64, terms: &[(f64, &[T])]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = T::default();
        for (c, k) in terms {
            acc = acc + k[i] * *c;
        }
        *o = y[i] + acc * h;
    }
}

/// Explicit stepper that exposes every accepted step, so callers can locate
/// events inside the last step.
pub struct Dopri5<T: Component> {
    t: f64,
    y: Vec<T>,
    h: f64,
    k1: Vec<T>,
    tol: Tolerances,
    steps: usize,
    t_prev: f64,
    y_prev: Vec<T>,
    scratch: [Vec<T>; 6],
    y_tmp: Vec<T>,
}

impl<T: Component> Dopri5<T> {
    pub fn new<F>(f: &mut F, t0: f64, y0: Vec<T>, tol: Tolerances) -> Self
    where
        F: FnMut(f64, &[T], &mut [T]),
    {
        let n = y0.len();
        let mut k1 = vec![T::default(); n];
        f(t0, &y0, &mut k1);
        let h = initial_step(&y0, &k1, &tol);
        Self {
            t: t0,
            y_prev: y0.clone(),
            y: y0,
            h,
            k1,
            tol,
            steps: 0,
            t_prev: t0,
            scratch: std::array::from_fn(|_| vec![T::default(); n]),
            y_tmp: vec![T::default(); n],
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    pub fn into_state(self) -> Vec<T> {
        self.y
    }

    /// Start of the last accepted step.
    pub fn previous(&self) -> (f64, &[T]) {
        (self.t_prev, &self.y_prev)
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Take one accepted step, never passing `t_limit`.
    pub fn step<F>(&mut self, f: &mut F, t_limit: f64) -> Result<()>
    where
        F: FnMut(f64, &[T], &mut [T]),
    {
        let n = self.y.len();
        let mut y_new = vec![T::default(); n];
        let mut k7 = vec![T::default(); n];
        loop {
            if self.steps >= self.tol.max_steps {
                return Err(Error::Integration(format!(
                    "step limit {} reached at t = {}",
                    self.tol.max_steps, self.t
                )));
            }
            let remaining = t_limit - self.t;
            let last = self.h >= remaining;
            let h = if last { remaining } else { self.h };
            if h <= 1e-14 * self.t.abs().max(1.0) {
                if remaining <= 1e-14 * self.t.abs().max(1.0) {
                    self.t = t_limit;
                    return Ok(());
                }
                return Err(Error::Integration(format!("step size underflow at t = {}", self.t)));
            }
            self.stages(f, h, &mut y_new);
            f(self.t + h, &y_new, &mut k7);
            self.steps += 1;

            let [k1, _k2, k3, k4, k5, k6] = self.stage_refs();
            let mut acc = 0.0;
            for i in 0..n {
                let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7)
                    * h;
                let sc = self.tol.atol
                    + self.tol.rtol * self.y[i].modulus().max(y_new[i].modulus());
                acc += (e.modulus() / sc).powi(2);
            }
            let err = (acc / n.max(1) as f64).sqrt();
            if !err.is_finite() {
                self.h *= 0.1;
                continue;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                self.t_prev = self.t;
                std::mem::swap(&mut self.y_prev, &mut self.y);
                self.y.copy_from_slice(&y_new);
                self.t = if last { t_limit } else { self.t + h };
                std::mem::swap(&mut self.k1, &mut k7);
                if !last || factor < 1.0 {
                    self.h = h * factor;
                }
                return Ok(());
            }
            self.h = h * factor.min(1.0);
        }
    }

    fn stage_refs(&self) -> [&[T]; 6] {
        [
            &self.k1,
            &self.scratch[1],
            &self.scratch[2],
            &self.scratch[3],
            &self.scratch[4],
            &self.scratch[5],
        ]
    }

    fn stages<F>(&mut self, f: &mut F, h: f64, y_new: &mut [T])
    where
        F: FnMut(f64, &[T], &mut [T]),
    {
        let t = self.t;
        let y = &self.y;
        let k1 = &self.k1;
        let [_, k2, k3, k4, k5, k6] = &mut self.scratch;
        let tmp = &mut self.y_tmp;
        combine(tmp, y, h, &[(A21, k1)]);
        f(t + C2 * h, tmp, k2);
        combine(tmp, y, h, &[(A31, k1), (A32, k2)]);
        f(t + C3 * h, tmp, k3);
        combine(tmp, y, h, &[(A41, k1), (A42, k2), (A43, k3)]);
        f(t + C4 * h, tmp, k4);
        combine(tmp, y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]);
        f(t + C5 * h, tmp, k5);
        combine(tmp, y, h, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]);
        f(t + h, tmp, k6);
        combine(y_new, y, h, &[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)]);
    }
}

/// One fifth-order step of size `h` from (t, y) without error control.
pub fn single_step<T, F>(f: &mut F, t: f64, y: &[T], h: f64) -> Vec<T>
where
    T: Component,
    F: FnMut(f64, &[T], &mut [T]),
{
    let n = y.len();
    let mut k: [Vec<T>; 6] = std::array::from_fn(|_| vec![T::default(); n]);
    let mut tmp = vec![T::default(); n];
    let mut out = vec![T::default(); n];
    let [k1, k2, k3, k4, k5, k6] = &mut k;
    f(t, y, k1);
    combine(&mut tmp, y, h, &[(A21, k1)]);
    f(t + C2 * h, &tmp, k2);
    combine(&mut tmp, y, h, &[(A31, k1), (A32, k2)]);
    f(t + C3 * h, &tmp, k3);
    combine(&mut tmp, y, h, &[(A41, k1), (A42, k2), (A43, k3)]);
    f(t + C4 * h, &tmp, k4);
    combine(&mut tmp, y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]);
    f(t + C5 * h, &tmp, k5);
    combine(&mut tmp, y, h, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]);
    f(t + h, &tmp, k6);
    combine(&mut out, y, h, &[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)]);
    out
}

fn initial_step<T: Component>(y: &[T], dy: &[T], tol: &Tolerances) -> f64 {
    let n = y.len().max(1) as f64;
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for (a, b) in y.iter().zip(dy) {
        let sc = tol.atol + tol.rtol * a.modulus();
        d0 += (a.modulus() / sc).powi(2);
        d1 += (b.modulus() / sc).powi(2);
    }
    let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
    if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    }
}

/// Integrate from t0 to t1, returning the state at t1.
pub fn integrate<T, F>(mut f: F, t0: f64, y0: Vec<T>, t1: f64, tol: Tolerances) -> Result<Vec<T>>
where
    T: Component,
    F: FnMut(f64, &[T], &mut [T]),
{
    if t1 < t0 {
        return Err(Error::Integration("backward integration is not supported".into()));
    }
    if t1 == t0 {
        return Ok(y0);
    }
    let mut s = Dopri5::new(&mut f, t0, y0, tol);
    while s.t() < t1 {
        s.step(&mut f, t1)?;
    }
    Ok(s.into_state())
}

/// Integrate and record the state at each of the increasing `times`.
pub fn integrate_dense<T, F>(
    mut f: F,
    t0: f64,
    y0: Vec<T>,
    times: &[f64],
    tol: Tolerances,
) -> Result<Vec<Vec<T>>>
where
    T: Component,
    F: FnMut(f64, &[T], &mut [T]),
{
    let mut out = Vec::with_capacity(times.len());
    let mut t = t0;
    let mut y = y0;
    for &target in times {
        if target < t {
            return Err(Error::Integration("output times must be increasing".into()));
        }
        y = integrate(&mut f, t, y, target, tol)?;
        t = target;
        out.push(y.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let y = integrate(|_, y: &[f64], d: &mut [f64]| d[0] = -2.0 * y[0], 0.0, vec![1.0], 3.0, Tolerances::default())
            .unwrap();
        assert!((y[0] - (-6.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn complex_rotation() {
        let tol = Tolerances::default();
        let y = integrate(
            |_, y: &[C64], d: &mut [C64]| d[0] = C64::new(0.0, -1.0) * y[0],
            0.0,
            vec![C64::new(1.0, 0.0)],
            10.0,
            tol,
        )
        .unwrap();
        assert!((y[0] - C64::from_polar(1.0, -10.0)).norm() < 1e-8);
    }

    #[test]
    fn single_step_is_fifth_order() {
        let mut f = |_: f64, y: &[f64], d: &mut [f64]| d[0] = y[0];
        let e1 = (single_step(&mut f, 0.0, &[1.0], 0.1)[0] - 0.1f64.exp()).abs();
        let e2 = (single_step(&mut f, 0.0, &[1.0], 0.05)[0] - 0.05f64.exp()).abs();
        // local error O(h^6)
        assert!(e1 / e2 > 40.0, "{}", e1 / e2);
    }

    #[test]
    fn dense_output_points() {
        let ys = integrate_dense(
            |_, y: &[f64], d: &mut [f64]| d[0] = -y[0],
            0.0,
            vec![1.0],
            &[0.5, 1.0, 2.0],
            Tolerances::default(),
        )
        .unwrap();
        for (y, t) in ys.iter().zip([0.5f64, 1.0, 2.0]) {
            assert!((y[0] - (-t).exp()).abs() < 1e-10);
        }
    }
}
