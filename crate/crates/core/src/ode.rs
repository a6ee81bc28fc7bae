//! Adaptive Dormand–Prince 5(4) integration with cubic Hermite dense output.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-10,
            rel: 1e-10,
        }
    }
}

const MAX_STEPS: usize = 1_000_000;

// Butcher tableau (FSAL: the 7th stage is f at the new point).
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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

/// Accepted integration nodes `(t, y, y')`; interpolates between them.
#[derive(Debug, Clone)]
pub struct DenseSolution<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub dy: Vec<[f64; N]>,
}

impl<const N: usize> DenseSolution<N> {
    pub fn final_state(&self) -> [f64; N] {
        *self.y.last().expect("solution has at least the initial node")
    }

    pub fn steps(&self) -> usize {
        self.t.len() - 1
    }

    /// Cubic Hermite interpolation; exact at the nodes, clamped to the interval.
    pub fn sample(&self, t: f64) -> [f64; N] {
        let last = self.t.len() - 1;
        if t <= self.t[0] || last == 0 {
            return self.y[0];
        }
        if t >= self.t[last] {
            return self.y[last];
        }
        let i = self.t.partition_point(|&s| s <= t) - 1;
        let (t0, t1) = (self.t[i], self.t[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        let mut out = [0.0; N];
        for (k, o) in out.iter_mut().enumerate() {
            *o = h00 * self.y[i][k]
                + h10 * h * self.dy[i][k]
                + h01 * self.y[i + 1][k]
                + h11 * h * self.dy[i + 1][k];
        }
        out
    }
}

/// Integrates `y' = f(t, y)` from `t0` to `t1`.
///
/// `check` runs on every accepted state and may abort the integration.
pub fn integrate<const N: usize, F, C>(
    f: F,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    tol: Tolerance,
    mut check: C,
) -> Result<DenseSolution<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    C: FnMut(f64, &[f64; N]) -> Result<()>,
{
    let mut sol = DenseSolution {
        t: vec![t0],
        y: vec![y0],
        dy: vec![f(t0, &y0)],
    };
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(sol);
    }
    if !(span > 0.0) || !span.is_finite() {
        return Err(Error::Integration {
            t: t0,
            reason: format!("invalid interval [{t0}, {t1}]"),
        });
    }

    let mut t = t0;
    let mut y = y0;
    let mut k1 = sol.dy[0];
    let fnorm = k1.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut h = if fnorm > 0.0 { (0.01 / fnorm).min(span) } else { span };

    for _ in 0..MAX_STEPS {
        if t >= t1 {
            return Ok(sol);
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = axpy(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let t_new = if last { t1 } else { t + h };
        let k7 = f(t_new, &y_new);

        let mut err = 0.0;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = tol.abs + tol.rel * y[i].abs().max(y_new[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / N as f64).sqrt();
        if !err.is_finite() {
            return Err(Error::Integration {
                t,
                reason: "non-finite error estimate".into(),
            });
        }

        if err <= 1.0 {
            check(t_new, &y_new)?;
            t = t_new;
            y = y_new;
            k1 = k7;
            sol.t.push(t);
            sol.y.push(y);
            sol.dy.push(k1);
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= if err <= 1.0 { factor } else { factor.min(1.0) };
        if h < 1e-14 * span.max(t.abs()) {
            return Err(Error::Integration {
                t,
                reason: "step size underflow".into(),
            });
        }
    }
    Err(Error::Integration {
        t,
        reason: format!("exceeded {MAX_STEPS} steps"),
    })
}
