//! Adaptive fourth-order Runge–Kutta stepper over flat complex arrays.
//!
//! The propagating formula is the classical RK4. The first-same-as-last
//! stage `k5 = f(t + h, y₁)` supplies an embedded third-order solution with
//! weights (1/6, 1/3, 1/3, 0, 1/6), so the local error estimate is
//! `h/6 · (k4 − k5)` at no extra cost once `k5` is reused as the next `k1`.
//!
//! Classical RK4 keeps `|R(iy)| ≤ 1` for `|y| ≤ 2√2` and damps the upper
//! part of that interval. The generators integrated here are dominated by
//! `−iH`, whose stiff, sparsely occupied top levels would otherwise be
//! amplified by higher-order pairs whose stability regions miss the
//! imaginary axis.
//!
//! Errors are measured in the Euclidean norm of the whole state, the natural
//! norm for wavefunctions and (Frobenius) density matrices; near-empty
//! components carry no separate absolute tolerance.
//!
//! The stepper only attempts single steps; step-size control lives in the
//! callers because the jump propagator needs to clip steps at sample times
//! and re-integrate partial steps while locating jumps.

use num_complex::Complex64 as C64;

/// Relative and absolute error tolerances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 4.0;

/// Proposes the next step size from the scaled error norm of the last
/// attempt (embedded order 3, so the error scales as `h⁴`).
pub fn next_step(h: f64, err: f64) -> f64 {
    let factor = if err == 0.0 {
        MAX_FACTOR
    } else {
        (SAFETY * err.powf(-0.25)).clamp(MIN_FACTOR, MAX_FACTOR)
    };
    h * factor
}

/// Proportional-integral step-size controller. Remembering the previous
/// error damps the accept/reject oscillation that a purely proportional
/// rule shows when the step is limited by stability rather than accuracy.
#[derive(Clone, Copy, Debug)]
pub struct StepController {
    err_prev: f64,
    rejected: bool,
}

const PI_BETA: f64 = 0.08;

impl Default for StepController {
    fn default() -> Self {
        Self {
            err_prev: 1e-4,
            rejected: false,
        }
    }
}

impl StepController {
    /// Next step after accepting a step of size `h` with scaled error `err`.
    pub fn accepted(&mut self, h: f64, err: f64) -> f64 {
        let err = err.max(1e-10);
        let factor = SAFETY * err.powf(-(0.25 - 0.75 * PI_BETA)) * self.err_prev.powf(PI_BETA);
        let mut factor = factor.clamp(MIN_FACTOR, MAX_FACTOR);
        if self.rejected {
            factor = factor.min(1.0);
        }
        self.err_prev = err;
        self.rejected = false;
        h * factor
    }

    /// Retry size after rejecting a step of size `h`.
    pub fn rejected(&mut self, h: f64, err: f64) -> f64 {
        self.rejected = true;
        next_step(h, if err.is_finite() { err } else { 1e10 }).min(h)
    }
}

pub struct Rk4Stepper {
    k: [Vec<C64>; 5],
    stage: Vec<C64>,
}

impl Rk4Stepper {
    pub fn new(len: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![C64::new(0.0, 0.0); len]),
            stage: vec![C64::new(0.0, 0.0); len],
        }
    }

    pub fn capacity(&self) -> usize {
        self.stage.len()
    }

    /// First-stage slope buffer. Callers that already know `f(t, y)` write it
    /// here and call [`Rk4Stepper::step_with_k1`].
    pub fn k1_mut(&mut self, len: usize) -> &mut [C64] {
        &mut self.k[0][..len]
    }

    /// `f(t + h, y₁)` from the last completed step.
    pub fn last_slope(&self, len: usize) -> &[C64] {
        &self.k[4][..len]
    }

    /// Moves the last slope into the first-stage buffer (FSAL reuse).
    pub fn reuse_last_slope(&mut self) {
        self.k.swap(0, 4);
    }

    /// One step from `(t, y)` of size `h`; the fourth-order solution goes to
    /// `out`. Returns `‖err‖₂ / (abs + rel·‖y‖₂)`; accept if ≤ 1.
    pub fn step<F>(&mut self, rhs: &mut F, t: f64, y: &[C64], h: f64, out: &mut [C64], tol: Tolerances) -> f64
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        let n = y.len();
        rhs(t, y, &mut self.k[0][..n]);
        self.step_with_k1(rhs, t, y, h, out, tol)
    }

    /// As [`Rk4Stepper::step`], with `k1 = f(t, y)` already in place.
    pub fn step_with_k1<F>(
        &mut self,
        rhs: &mut F,
        t: f64,
        y: &[C64],
        h: f64,
        out: &mut [C64],
        tol: Tolerances,
    ) -> f64
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        let n = y.len();
        let [k1, k2, k3, k4, k5] = &mut self.k;
        let (k1, k2, k3, k4, k5) = (&k1[..n], &mut k2[..n], &mut k3[..n], &mut k4[..n], &mut k5[..n]);
        let s = &mut self.stage[..n];
        let half = 0.5 * h;

        for i in 0..n {
            s[i] = y[i] + k1[i] * half;
        }
        rhs(t + half, s, k2);
        for i in 0..n {
            s[i] = y[i] + k2[i] * half;
        }
        rhs(t + half, s, k3);
        for i in 0..n {
            s[i] = y[i] + k3[i] * h;
        }
        rhs(t + h, s, k4);
        let sixth = h / 6.0;
        for i in 0..n {
            out[i] = y[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * sixth;
        }
        rhs(t + h, out, k5);

        let (mut err2, mut y2, mut out2) = (0.0, 0.0, 0.0);
        for i in 0..n {
            err2 += ((k4[i] - k5[i]) * sixth).norm_sqr();
            y2 += y[i].norm_sqr();
            out2 += out[i].norm_sqr();
        }
        err2.sqrt() / (tol.abs + tol.rel * y2.max(out2).sqrt())
    }
}

/// Initial step guess (Hairer–Nørsett–Wanner, simplified).
pub fn initial_step<F>(rhs: &mut F, t: f64, y: &[C64], tol: Tolerances, max_step: f64) -> f64
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let n = y.len();
    let mut f0 = vec![C64::new(0.0, 0.0); n];
    rhs(t, y, &mut f0);
    let d0 = y.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let d1 = f0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let sc = tol.abs + tol.rel * d0;
    let h = if d0 / sc < 1e-5 || d1 / sc < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(max_step)
}

/// Integrates `y' = f(t, y)` from `t0` to each time in `t_out` (ascending,
/// all ≥ `t0`) with adaptive steps, returning the states at those times.
/// On step-size underflow returns `(t, h)` at the failure.
pub fn integrate_to_grid<F>(
    rhs: &mut F,
    t0: f64,
    y0: &[C64],
    t_out: &[f64],
    tol: Tolerances,
    max_step: f64,
) -> Result<Vec<Vec<C64>>, (f64, f64)>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let mut out = Vec::with_capacity(t_out.len());
    integrate_with(rhs, t0, y0, t_out, tol, max_step, |_, y| {
        out.push(y.to_vec());
        Ok(())
    })
    .map_err(|e| match e {
        GridError::Underflow(t, h) => (t, h),
        GridError::Callback(()) => unreachable!(),
    })?;
    Ok(out)
}

pub enum GridError<E> {
    Underflow(f64, f64),
    Callback(E),
}

/// As [`integrate_to_grid`], handing each grid state to `visit` instead of
/// collecting them.
pub fn integrate_with<F, V, E>(
    rhs: &mut F,
    t0: f64,
    y0: &[C64],
    t_out: &[f64],
    tol: Tolerances,
    max_step: f64,
    mut visit: V,
) -> Result<(), GridError<E>>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    V: FnMut(f64, &[C64]) -> Result<(), E>,
{
    let n = y0.len();
    let mut stepper = Rk4Stepper::new(n);
    let mut y = y0.to_vec();
    let mut y_new = vec![C64::new(0.0, 0.0); n];
    let mut t = t0;
    let mut h = initial_step(rhs, t, &y, tol, max_step);
    let mut control = StepController::default();
    rhs(t, &y, stepper.k1_mut(n));
    for &target in t_out {
        while t < target {
            let mut h_try = h.min(max_step);
            let clipped = t + h_try >= target;
            if clipped {
                h_try = target - t;
            }
            let err = stepper.step_with_k1(rhs, t, &y, h_try, &mut y_new, tol);
            if err <= 1.0 {
                t = if clipped { target } else { t + h_try };
                std::mem::swap(&mut y, &mut y_new);
                stepper.reuse_last_slope();
                if !clipped {
                    h = control.accepted(h_try, err);
                }
            } else {
                h = control.rejected(h_try, err);
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(GridError::Underflow(t, h));
                }
            }
        }
        visit(t, &y).map_err(GridError::Callback)?;
    }
    Ok(())
}
