//! Adaptive Dormand-Prince 5(4) integrator for the small dense systems in
//! this crate (fixed state dimension 4).
//!
//! Steps land exactly on the requested output times; blow-up is detected by
//! magnitude threshold, non-finite values, or step-size underflow.

pub type State = [f64; 4];

#[derive(Debug, Clone, Copy)]
pub struct DopriOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_step: f64,
    /// Escape when `|state|_inf` exceeds this.
    pub blowup: f64,
    /// Escape when the accepted step falls below `min_step_rel * max(1, |t|)`.
    pub min_step_rel: f64,
}

impl Default for DopriOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_step: 0.1,
            blowup: 1e8,
            min_step_rel: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EscapeReason {
    NonFinite,
    Magnitude,
    StepUnderflow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunOutcome {
    Reached,
    Escaped { t: f64, reason: EscapeReason },
}

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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b_hat, for the embedded 4th-order error estimate
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy(y: &State, h: f64, coeffs: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in coeffs {
        for i in 0..4 {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Integrates from `(t0, y0)` and records the state at each of `out_times`
/// (strictly monotone in the direction of `t_end`, all between `t0` and
/// `t_end`). Returns the recorded samples and the outcome.
pub fn integrate<F>(
    f: F,
    t0: f64,
    y0: State,
    t_end: f64,
    out_times: &[f64],
    opts: &DopriOptions,
) -> (Vec<(f64, State)>, RunOutcome)
where
    F: Fn(f64, &State) -> State,
{
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = (opts.max_step * 1e-2).min((t_end - t0).abs()).max(1e-10) * dir;
    let mut samples = Vec::with_capacity(out_times.len());
    let mut next_out = 0usize;

    // record t0 if requested
    while next_out < out_times.len() && (out_times[next_out] - t) * dir <= 1e-300 {
        samples.push((out_times[next_out], y));
        next_out += 1;
    }

    let escape = |t: f64, reason: EscapeReason| RunOutcome::Escaped { t, reason };

    loop {
        if (t - t_end) * dir >= 0.0 {
            return (samples, RunOutcome::Reached);
        }
        // attempt the controller's step, clipped to the next output time
        let mut target = t_end;
        if next_out < out_times.len() && (out_times[next_out] - target) * dir < 0.0 {
            target = out_times[next_out];
        }
        if h.abs() > opts.max_step {
            h = opts.max_step * dir;
        }
        let mut step = h;
        let clipped = ((t + step) - target) * dir > 0.0;
        if clipped {
            step = target - t;
        }

        let k2 = f(t + A21 * step, &axpy(&y, step, &[(A21, &k1)]));
        let k3 = f(t + 0.3 * step, &axpy(&y, step, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(
            t + 0.8 * step,
            &axpy(&y, step, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        );
        let k5 = f(
            t + 8.0 / 9.0 * step,
            &axpy(&y, step, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + step,
            &axpy(
                &y,
                step,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y_new = axpy(
            &y,
            step,
            &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        );
        let k7 = f(t + step, &y_new);

        let mut err: f64 = 0.0;
        for i in 0..4 {
            let e = step
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
            err += (e / scale) * (e / scale);
        }
        err = (err / 4.0).sqrt();

        if !err.is_finite() || !y_new.iter().all(|v| v.is_finite()) {
            h = step * 0.5;
            if h.abs() < opts.min_step_rel * t.abs().max(1.0) {
                return (samples, escape(t, EscapeReason::NonFinite));
            }
            continue;
        }

        if err <= 1.0 {
            t = if clipped { target } else { t + step };
            y = y_new;
            k1 = k7; // FSAL
            while next_out < out_times.len() && (out_times[next_out] - t) * dir <= 1e-12 {
                samples.push((out_times[next_out], y));
                next_out += 1;
            }
            if y.iter().any(|v| v.abs() > opts.blowup) {
                return (samples, escape(t, EscapeReason::Magnitude));
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            // a step shortened only to hit an output time must not shrink
            // the controller's step
            let grown = step * factor;
            if !clipped || grown.abs() > h.abs() {
                h = grown;
            }
        } else {
            h = step * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            // persistent rejection with a collapsing step marks a singularity
            if h.abs() < opts.min_step_rel * t.abs().max(1.0) {
                return (samples, escape(t, EscapeReason::StepUnderflow));
            }
        }
    }
}
