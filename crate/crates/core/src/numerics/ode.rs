use super::{ABS_FLOOR, C64};
use crate::error::{Error, Result};

// Dormand–Prince 5(4) tableau; the generator is autonomous so the nodes are not needed.

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

// Fifth-order weights minus the embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

fn max_abs(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn combine(out: &mut [C64], y: &[C64], h: f64, terms: &[(f64, &[C64])]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for (w, k) in terms {
            acc += k[i] * *w;
        }
        *o = y[i] + acc * h;
    }
}

/// Integrates `ẏ = G(y)` for a linear generator `G`, returning the solution
/// at each time in `t_grid`.
///
/// Steps are controlled by an embedded Dormand–Prince 5(4) error estimate
/// measured per unit time relative to `max|y|`, so the accumulated error
/// stays near `rel_tol` per unit of integrated time. The grid must start at
/// zero and increase strictly; the first output is `y0` itself.
pub fn integrate_linear_ode<F>(
    mut generator: F,
    y0: &[C64],
    t_grid: &[f64],
    rel_tol: f64,
) -> Result<Vec<Vec<C64>>>
where
    F: FnMut(&[C64], &mut [C64]),
{
    if !(rel_tol > 0.0 && rel_tol <= 1e-3) {
        return Err(Error::Parameter(format!("rel_tol must lie in (0, 1e-3], got {rel_tol}")));
    }
    match t_grid.first() {
        Some(&t0) if t0 == 0.0 => {}
        _ => return Err(Error::Parameter("time grid must start at t = 0".into())),
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
        return Err(Error::Parameter("time grid must be strictly increasing and finite".into()));
    }

    let n = y0.len();
    let mut out = Vec::with_capacity(t_grid.len());
    out.push(y0.to_vec());

    let mut y = y0.to_vec();
    let mut y_new = vec![C64::new(0.0, 0.0); n];
    let mut stage = vec![C64::new(0.0, 0.0); n];
    let mut k: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); n]; 7];

    generator(&y, &mut k[0]);
    let mut t = 0.0;
    let mut h = {
        let f0 = max_abs(&k[0]);
        let y_scale = max_abs(&y).max(ABS_FLOOR);
        let span = t_grid.last().copied().unwrap_or(0.0);
        if f0 > 0.0 {
            (0.01 * y_scale / f0).min(span.max(ABS_FLOOR))
        } else {
            span.max(ABS_FLOOR)
        }
    };

    for &t_target in &t_grid[1..] {
        while t < t_target {
            let remaining = t_target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            if step < 1e-14 * t.abs().max(1.0) {
                return Err(Error::Stiffness { t, step });
            }

            let (k1, rest) = k.split_first_mut().expect("seven stages");
            let (k2, rest) = rest.split_first_mut().expect("seven stages");
            let (k3, rest) = rest.split_first_mut().expect("seven stages");
            let (k4, rest) = rest.split_first_mut().expect("seven stages");
            let (k5, rest) = rest.split_first_mut().expect("seven stages");
            let (k6, rest) = rest.split_first_mut().expect("seven stages");
            let k7 = &mut rest[0];

            combine(&mut stage, &y, step, &[(A21, k1)]);
            generator(&stage, k2);
            combine(&mut stage, &y, step, &[(A31, k1), (A32, k2)]);
            generator(&stage, k3);
            combine(&mut stage, &y, step, &[(A41, k1), (A42, k2), (A43, k3)]);
            generator(&stage, k4);
            combine(&mut stage, &y, step, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]);
            generator(&stage, k5);
            combine(&mut stage, &y, step, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]);
            generator(&stage, k6);
            combine(&mut y_new, &y, step, &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)]);
            generator(&y_new, k7);

            let scale = max_abs(&y).max(max_abs(&y_new)).max(ABS_FLOOR);
            let mut err = 0.0f64;
            for i in 0..n {
                let e = k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7;
                err = err.max(e.norm());
            }
            // err·step is the local error; dividing by step gives error per unit time.
            let ratio = err / (rel_tol * scale);
            if !ratio.is_finite() {
                return Err(Error::Stiffness { t, step });
            }

            if ratio <= 1.0 {
                t = if last { t_target } else { t + step };
                std::mem::swap(&mut y, &mut y_new);
                std::mem::swap(k1, k7);
                let grow = if ratio == 0.0 {
                    MAX_FACTOR
                } else {
                    (SAFETY * ratio.powf(-0.25)).clamp(MIN_FACTOR, MAX_FACTOR)
                };
                // Keep the unclipped step when the grid forced a short last step.
                h = if last { h.max(step * grow) } else { step * grow };
            } else {
                h = step * (SAFETY * ratio.powf(-0.25)).max(MIN_FACTOR);
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}
