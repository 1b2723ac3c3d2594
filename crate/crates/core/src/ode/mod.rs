//! Time integration for method-of-lines systems.
//!
//! Two steppers share the [`Stepper`] interface: an adaptive linearly
//! implicit Rosenbrock 2(3) pair with a finite-difference banded Jacobian
//! (the stiff default) and a fixed-fraction-of-stability explicit Heun
//! method used for cross-checks.

mod banded;

pub use banded::{BandLu, BandMatrix};

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::FlowError;

/// Autonomous system `y' = f(y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;

    /// Lower and upper bandwidth of `∂f/∂y`.
    fn bandwidth(&self) -> (usize, usize);

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<(), FlowError>;

    /// Largest explicit Heun step that is linearly stable at `y`.
    fn stable_explicit_dt(&self, y: &[f64]) -> f64;
}

/// Why a stepper gave up.
#[derive(Debug, Clone, PartialEq)]
pub enum StepFailure {
    StepTooSmall { h: f64 },
    Evaluation(FlowError),
}

/// Advances a system by one accepted step, never past `t_stop`.
pub trait Stepper {
    fn advance<S: OdeSystem>(
        &mut self,
        sys: &S,
        t: &mut f64,
        y: &mut [f64],
        t_stop: f64,
    ) -> Result<(), StepFailure>;

    fn rejected(&self) -> usize {
        0
    }
}

/// Scratch storage for [`fd_jacobian_with`], reusable across calls.
#[derive(Debug, Clone, Default)]
pub struct JacobianScratch {
    delta: Vec<f64>,
    yp: Vec<f64>,
    fp: Vec<Vec<f64>>,
}

/// Fills `jac` with a forward-difference approximation of `∂f/∂y`, using
/// column grouping so that one evaluation serves every column of a colour.
pub fn fd_jacobian<S: OdeSystem>(
    sys: &S,
    t: f64,
    y: &[f64],
    f0: &[f64],
    jac: &mut BandMatrix,
) -> Result<(), FlowError> {
    fd_jacobian_with(sys, t, y, f0, jac, &mut JacobianScratch::default())
}

/// [`fd_jacobian`] with caller-owned scratch buffers.
pub fn fd_jacobian_with<S: OdeSystem>(
    sys: &S,
    t: f64,
    y: &[f64],
    f0: &[f64],
    jac: &mut BandMatrix,
    scratch: &mut JacobianScratch,
) -> Result<(), FlowError> {
    let n = y.len();
    let (kl, ku) = (jac.lower(), jac.upper());
    let colours = (kl + ku + 1).min(n);
    let eps = f64::EPSILON.sqrt();
    let JacobianScratch { delta, yp, fp } = scratch;
    delta.clear();
    delta.extend(y.iter().map(|v| eps * v.abs().max(1e-3)));
    yp.clear();
    yp.extend_from_slice(y);
    fp.resize_with(colours, Vec::new);
    for (c, f) in fp.iter_mut().enumerate() {
        f.resize(n, 0.0);
        for j in (c..n).step_by(colours) {
            yp[j] = y[j] + delta[j];
        }
        sys.rhs(t, yp, f)?;
        for j in (c..n).step_by(colours) {
            yp[j] = y[j];
        }
    }
    // Row-wise assembly keeps the band writes sequential.
    jac.fill_zero();
    for i in 0..n {
        let lo = i.saturating_sub(kl);
        let mut c = lo % colours;
        for j in lo..=(i + ku).min(n - 1) {
            jac.set(i, j, (fp[c][i] - f0[i]) / delta[j]);
            c = if c + 1 == colours { 0 } else { c + 1 };
        }
    }
    Ok(())
}

/// Per-size buffers kept between Rosenbrock steps.
#[derive(Debug, Clone)]
struct RosenbrockWork {
    jac: BandMatrix,
    w: BandMatrix,
    scratch: JacobianScratch,
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    f1: Vec<f64>,
    f2: Vec<f64>,
    ytmp: Vec<f64>,
}

impl RosenbrockWork {
    fn new(n: usize, kl: usize, ku: usize) -> Self {
        Self {
            jac: BandMatrix::zeros(n, kl, ku),
            w: BandMatrix::zeros(n, kl, ku),
            scratch: JacobianScratch::default(),
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            k3: vec![0.0; n],
            f1: vec![0.0; n],
            f2: vec![0.0; n],
            ytmp: vec![0.0; n],
        }
    }
}

/// Shampine–Reichelt Rosenbrock 2(3) method (the scheme behind MATLAB's
/// `ode23s`): L-stable, second order, with a third-order error estimate.
#[derive(Debug, Clone)]
pub struct Rosenbrock23 {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
    pub h_max: f64,
    h: Option<f64>,
    f0: Option<Vec<f64>>,
    work: Option<RosenbrockWork>,
    rejected: usize,
}

impl Rosenbrock23 {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol, h_min: 1e-14, h_max: f64::INFINITY, h: None, f0: None, work: None, rejected: 0 }
    }

    /// Step size the next attempt will start from.
    pub fn next_h(&self) -> Option<f64> {
        self.h
    }

    fn initial_h(&self, y: &[f64], f0: &[f64], span: f64) -> f64 {
        let mut d0 = 0.0f64;
        let mut d1 = 0.0f64;
        for (yi, fi) in y.iter().zip(f0) {
            let sc = self.atol + self.rtol * yi.abs();
            d0 = d0.max(yi.abs() / sc);
            d1 = d1.max(fi.abs() / sc);
        }
        let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h.min(span).min(self.h_max).max(self.h_min)
    }

    /// One attempt of size `h`; returns the scaled error norm, with the
    /// candidate solution left in `wk.ytmp` and `f(ytmp)` in `wk.f2`.
    fn attempt<S: OdeSystem>(
        &self,
        sys: &S,
        t: f64,
        y: &[f64],
        f0: &[f64],
        h: f64,
        wk: &mut RosenbrockWork,
    ) -> Result<f64, FlowError> {
        let n = y.len();
        let d = 1.0 / (2.0 + core::f64::consts::SQRT_2);
        let e32 = 6.0 + core::f64::consts::SQRT_2;
        let mut w = core::mem::replace(&mut wk.w, BandMatrix::zeros(0, 0, 0));
        w.assign_scaled_shifted(&wk.jac, -h * d, 1.0);
        let lu = match w.factor() {
            Ok(lu) => lu,
            Err(e) => {
                wk.w = BandMatrix::zeros(n, wk.jac.lower(), wk.jac.upper());
                return Err(e);
            }
        };
        let RosenbrockWork { k1, k2, k3, f1, f2, ytmp, .. } = wk;
        let result = (|| {
            k1.copy_from_slice(f0);
            lu.solve(k1);
            for i in 0..n {
                ytmp[i] = y[i] + 0.5 * h * k1[i];
            }
            sys.rhs(t + 0.5 * h, ytmp, f1)?;
            for i in 0..n {
                k2[i] = f1[i] - k1[i];
            }
            lu.solve(k2);
            for i in 0..n {
                k2[i] += k1[i];
                ytmp[i] = y[i] + h * k2[i];
            }
            sys.rhs(t + h, ytmp, f2)?;
            for i in 0..n {
                k3[i] = f2[i] - e32 * (k2[i] - f1[i]) - 2.0 * (k1[i] - f0[i]);
            }
            lu.solve(k3);
            let mut err = 0.0f64;
            for i in 0..n {
                let e = h / 6.0 * (k1[i] - 2.0 * k2[i] + k3[i]);
                let sc = self.atol + self.rtol * y[i].abs().max(ytmp[i].abs());
                let q = (e / sc).abs();
                if !q.is_finite() {
                    return Ok(f64::INFINITY);
                }
                err = err.max(q);
            }
            Ok(err)
        })();
        wk.w = lu.into_matrix();
        result
    }
}

impl Stepper for Rosenbrock23 {
    fn advance<S: OdeSystem>(
        &mut self,
        sys: &S,
        t: &mut f64,
        y: &mut [f64],
        t_stop: f64,
    ) -> Result<(), StepFailure> {
        let n = y.len();
        let (kl, ku) = sys.bandwidth();
        let mut wk = match self.work.take() {
            Some(wk) if wk.jac.dim() == n => wk,
            _ => RosenbrockWork::new(n, kl, ku),
        };
        let f0 = match self.f0.take() {
            Some(f) => f,
            None => {
                let mut f = vec![0.0; n];
                sys.rhs(*t, y, &mut f).map_err(StepFailure::Evaluation)?;
                f
            }
        };
        let RosenbrockWork { jac, scratch, .. } = &mut wk;
        if let Err(e) = fd_jacobian_with(sys, *t, y, &f0, jac, scratch) {
            self.work = Some(wk);
            return Err(StepFailure::Evaluation(e));
        }

        let span = t_stop - *t;
        let mut h = match self.h {
            Some(h) => h,
            None => self.initial_h(y, &f0, span),
        };
        loop {
            let mut last = false;
            if h >= span {
                h = span;
                last = true;
            }
            if h < self.h_min {
                self.f0 = Some(f0);
                self.work = Some(wk);
                return Err(StepFailure::StepTooSmall { h });
            }
            match self.attempt(sys, *t, y, &f0, h, &mut wk) {
                Ok(err) if err <= 1.0 => {
                    *t = if last { t_stop } else { *t + h };
                    y.copy_from_slice(&wk.ytmp);
                    let fac = if err > 0.0 { (0.8 * err.powf(-1.0 / 3.0)).min(5.0) } else { 5.0 };
                    let proposal = (h * fac.max(0.2)).min(self.h_max);
                    // A step shortened to land on t_stop says nothing about the
                    // achievable size, so keep the previous proposal if larger.
                    self.h = Some(match self.h {
                        Some(prev) if last => proposal.max(prev.min(self.h_max)),
                        _ => proposal,
                    });
                    // f(y_new) was computed as the last stage; swap it in.
                    let mut f_new = f0;
                    core::mem::swap(&mut f_new, &mut wk.f2);
                    self.f0 = Some(f_new);
                    self.work = Some(wk);
                    return Ok(());
                }
                Ok(err) => {
                    self.rejected += 1;
                    let fac = if err.is_finite() { 0.8 * err.powf(-1.0 / 3.0) } else { 0.25 };
                    h *= fac.clamp(0.1, 0.5);
                }
                Err(_) => {
                    self.rejected += 1;
                    h *= 0.25;
                }
            }
            self.h = Some(h);
        }
    }

    fn rejected(&self) -> usize {
        self.rejected
    }
}

#[derive(Debug, Clone)]
pub struct ExplicitHeun {
    pub cfl: f64,
}

impl Stepper for ExplicitHeun {
    fn advance<S: OdeSystem>(
        &mut self,
        sys: &S,
        t: &mut f64,
        y: &mut [f64],
        t_stop: f64,
    ) -> Result<(), StepFailure> {
        let n = y.len();
        let dt_stable = self.cfl * sys.stable_explicit_dt(y);
        if !(dt_stable > 0.0) || !dt_stable.is_finite() {
            return Err(StepFailure::StepTooSmall { h: dt_stable });
        }
        let span = t_stop - *t;
        let (h, last) = if dt_stable >= span { (span, true) } else { (dt_stable, false) };
        let mut k1 = vec![0.0; n];
        let mut k2 = vec![0.0; n];
        sys.rhs(*t, y, &mut k1).map_err(StepFailure::Evaluation)?;
        let ytmp: Vec<f64> = y.iter().zip(&k1).map(|(a, b)| a + h * b).collect();
        sys.rhs(*t + h, &ytmp, &mut k2).map_err(StepFailure::Evaluation)?;
        for i in 0..n {
            y[i] += 0.5 * h * (k1[i] + k2[i]);
            if !y[i].is_finite() {
                return Err(StepFailure::Evaluation(FlowError::InvalidState("non-finite state")));
            }
        }
        *t = if last { t_stop } else { *t + h };
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Semi-discrete heat equation u_t = u_xx on (0, π) with u = 0 at both
    /// ends; the mode sin x decays as e^{-t} (to O(h²)).
    struct Heat {
        m: usize,
    }

    impl Heat {
        fn h(&self) -> f64 {
            core::f64::consts::PI / (self.m + 1) as f64
        }
    }

    impl OdeSystem for Heat {
        fn dim(&self) -> usize {
            self.m
        }
        fn bandwidth(&self) -> (usize, usize) {
            (1, 1)
        }
        fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<(), FlowError> {
            let h2 = self.h() * self.h();
            for i in 0..self.m {
                let l = if i == 0 { 0.0 } else { y[i - 1] };
                let r = if i + 1 == self.m { 0.0 } else { y[i + 1] };
                dy[i] = (l - 2.0 * y[i] + r) / h2;
            }
            Ok(())
        }
        fn stable_explicit_dt(&self, _y: &[f64]) -> f64 {
            0.5 * self.h() * self.h()
        }
    }

    fn run<St: Stepper>(st: &mut St, sys: &Heat, t_end: f64) -> (Vec<f64>, usize) {
        let h = sys.h();
        let mut y: Vec<f64> = (1..=sys.m).map(|i| (i as f64 * h).sin()).collect();
        let mut t = 0.0;
        let mut steps = 0;
        while t < t_end {
            st.advance(sys, &mut t, &mut y, t_end).unwrap();
            steps += 1;
        }
        assert_eq!(t, t_end);
        (y, steps)
    }

    #[test]
    fn rosenbrock_heat_decay() {
        let sys = Heat { m: 199 };
        let mut st = Rosenbrock23::new(1e-7, 1e-10);
        let (y, steps) = run(&mut st, &sys, 1.0);
        let h = sys.h();
        // Discrete eigenvalue of the mode: -(4/h²) sin²(h/2).
        let lam = 4.0 / (h * h) * (h / 2.0).sin().powi(2);
        for (i, v) in y.iter().enumerate() {
            let exact = (-lam).exp() * ((i + 1) as f64 * h).sin();
            assert!((v - exact).abs() < 5e-6, "i={i} {v} {exact}");
        }
        // Stiff system (|λ_max| ~ 1.6e4) must not need explicit-size steps.
        assert!(steps < 2000, "steps = {steps}");
    }

    #[test]
    fn heun_heat_decay() {
        let sys = Heat { m: 49 };
        let mut st = ExplicitHeun { cfl: 0.5 };
        let (y, _) = run(&mut st, &sys, 0.5);
        let h = sys.h();
        let lam = 4.0 / (h * h) * (h / 2.0).sin().powi(2);
        for (i, v) in y.iter().enumerate() {
            let exact = (-0.5 * lam).exp() * ((i + 1) as f64 * h).sin();
            assert!((v - exact).abs() < 1e-4);
        }
    }

    #[test]
    fn jacobian_of_linear_system_is_exact() {
        let sys = Heat { m: 12 };
        let y: Vec<f64> = (0..12).map(|i| i as f64 * 0.3 - 1.0).collect();
        let mut f0 = vec![0.0; 12];
        sys.rhs(0.0, &y, &mut f0).unwrap();
        let mut jac = BandMatrix::zeros(12, 1, 1);
        fd_jacobian(&sys, 0.0, &y, &f0, &mut jac).unwrap();
        let h2 = sys.h() * sys.h();
        for i in 0..12 {
            assert!((jac.get(i, i) + 2.0 / h2).abs() < 1e-4 / h2);
            if i + 1 < 12 {
                assert!((jac.get(i, i + 1) - 1.0 / h2).abs() < 1e-4 / h2);
            }
        }
    }
}
