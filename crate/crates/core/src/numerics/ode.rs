//! Dormand–Prince 5(4) with PI step control and continuous output.

use crate::error::{Error, Result};

pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[f64], dydt: &mut [f64]);
}

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub h_min: f64,
    pub max_steps: usize,
    pub safety: f64,
    /// PI stabilisation exponent.
    pub beta: f64,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            h_max: f64::INFINITY,
            h_min: 1e-14,
            max_steps: 5_000_000,
            safety: 0.9,
            beta: 0.04,
        }
    }
}

#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
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
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

impl Dopri5 {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    /// Integrates from `t0` to the last entry of `output_times` (sorted,
    /// all `>= t0`) and returns the state at every output time.
    pub fn solve<S: OdeSystem>(
        &self,
        sys: &S,
        t0: f64,
        y0: &[f64],
        output_times: &[f64],
    ) -> Result<(Vec<Vec<f64>>, IntegrationStats)> {
        let n = sys.dim();
        assert_eq!(y0.len(), n, "initial state has wrong dimension");
        let mut stats = IntegrationStats::default();
        let mut out = Vec::with_capacity(output_times.len());
        let Some(&t_end) = output_times.last() else {
            return Ok((out, stats));
        };
        if output_times.windows(2).any(|w| w[1] < w[0]) || output_times[0] < t0 {
            return Err(Error::InvalidArgument(
                "output times must be sorted and not precede t0".into(),
            ));
        }

        let mut next_out = 0;
        while next_out < output_times.len() && output_times[next_out] <= t0 {
            out.push(y0.to_vec());
            next_out += 1;
        }
        if next_out == output_times.len() {
            return Ok((out, stats));
        }

        let mut t = t0;
        let mut y = y0.to_vec();
        let mut k1 = vec![0.0; n];
        let mut k2 = vec![0.0; n];
        let mut k3 = vec![0.0; n];
        let mut k4 = vec![0.0; n];
        let mut k5 = vec![0.0; n];
        let mut k6 = vec![0.0; n];
        let mut k7 = vec![0.0; n];
        let mut ytmp = vec![0.0; n];
        let mut ynew = vec![0.0; n];
        let mut cont = vec![0.0; 5 * n];

        sys.rhs(t, &y, &mut k1);
        stats.evaluations += 1;
        let mut h = self.initial_step(sys, t, &y, &k1, t_end - t0, &mut stats);
        let mut err_old: f64 = 1e-4;
        let mut last_rejected = false;

        while next_out < output_times.len() {
            if stats.accepted + stats.rejected >= self.max_steps {
                return Err(Error::TooManySteps(self.max_steps));
            }
            if h.abs() < self.h_min {
                return Err(Error::StepSizeUnderflow { t, h });
            }
            if t + h > t_end {
                h = t_end - t;
            }

            for i in 0..n {
                ytmp[i] = y[i] + h * A21 * k1[i];
            }
            sys.rhs(t + C2 * h, &ytmp, &mut k2);
            for i in 0..n {
                ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
            }
            sys.rhs(t + C3 * h, &ytmp, &mut k3);
            for i in 0..n {
                ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            sys.rhs(t + C4 * h, &ytmp, &mut k4);
            for i in 0..n {
                ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            sys.rhs(t + C5 * h, &ytmp, &mut k5);
            for i in 0..n {
                ytmp[i] = y[i]
                    + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            sys.rhs(t + h, &ytmp, &mut k6);
            for i in 0..n {
                ynew[i] = y[i]
                    + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
            }
            sys.rhs(t + h, &ynew, &mut k7);
            stats.evaluations += 6;

            let mut err = 0.0;
            for i in 0..n {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.atol + self.rtol * y[i].abs().max(ynew[i].abs());
                err += (e / sc).powi(2);
            }
            let err = (err / n as f64).sqrt();

            let expo = 0.2 - 0.75 * self.beta;
            let fac11 = err.powf(expo);
            if err <= 1.0 {
                // Dense-output coefficients for (t, t + h].
                for i in 0..n {
                    let ydiff = ynew[i] - y[i];
                    let bspl = h * k1[i] - ydiff;
                    cont[i] = y[i];
                    cont[n + i] = ydiff;
                    cont[2 * n + i] = bspl;
                    cont[3 * n + i] = ydiff - h * k7[i] - bspl;
                    cont[4 * n + i] = h
                        * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                            + D7 * k7[i]);
                }
                let t_new = t + h;
                while next_out < output_times.len() && output_times[next_out] <= t_new {
                    let theta = (output_times[next_out] - t) / h;
                    out.push(dense(&cont, n, theta));
                    next_out += 1;
                }
                stats.accepted += 1;
                t = t_new;
                std::mem::swap(&mut y, &mut ynew);
                std::mem::swap(&mut k1, &mut k7);

                let mut fac = fac11 / err_old.powf(self.beta);
                fac = (fac / self.safety).clamp(0.1, 5.0);
                let mut h_new = (h / fac).min(self.h_max);
                if last_rejected {
                    h_new = h_new.min(h);
                }
                err_old = err.max(1e-4);
                last_rejected = false;
                h = h_new;
            } else {
                stats.rejected += 1;
                last_rejected = true;
                h /= (fac11 / self.safety).min(5.0);
            }
        }
        Ok((out, stats))
    }

    fn initial_step<S: OdeSystem>(
        &self,
        sys: &S,
        t: f64,
        y: &[f64],
        f0: &[f64],
        span: f64,
        stats: &mut IntegrationStats,
    ) -> f64 {
        let n = y.len();
        let norm = |v: &[f64]| {
            (v.iter()
                .zip(y)
                .map(|(a, b)| (a / (self.atol + self.rtol * b.abs())).powi(2))
                .sum::<f64>()
                / n as f64)
                .sqrt()
        };
        let d0 = norm(y);
        let d1 = norm(f0);
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h0 = h0.min(span.abs()).min(self.h_max);
        let y1: Vec<f64> = y.iter().zip(f0).map(|(a, b)| a + h0 * b).collect();
        let mut f1 = vec![0.0; n];
        sys.rhs(t + h0, &y1, &mut f1);
        stats.evaluations += 1;
        let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
        let d2 = norm(&diff) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(span.abs()).min(self.h_max)
    }
}

fn dense(cont: &[f64], n: usize, theta: f64) -> Vec<f64> {
    let theta1 = 1.0 - theta;
    (0..n)
        .map(|i| {
            cont[i]
                + theta
                    * (cont[n + i]
                        + theta1
                            * (cont[2 * n + i]
                                + theta * (cont[3 * n + i] + theta1 * cont[4 * n + i])))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Oscillator(f64);

    impl OdeSystem for Oscillator {
        fn dim(&self) -> usize {
            2
        }
        fn rhs(&self, _t: f64, y: &[f64], dydt: &mut [f64]) {
            dydt[0] = y[1];
            dydt[1] = -self.0 * self.0 * y[0];
        }
    }

    #[test]
    fn harmonic_oscillator_dense_output() {
        let w = 1.7;
        let times: Vec<f64> = (0..=200).map(|i| 0.5 * i as f64).collect();
        let (ys, stats) = Dopri5::default()
            .solve(&Oscillator(w), 0.0, &[1.0, 0.0], &times)
            .unwrap();
        assert!(stats.accepted > 100);
        for (t, y) in times.iter().zip(&ys) {
            assert!((y[0] - (w * t).cos()).abs() < 1e-7, "t = {t}");
            assert!((y[1] + w * (w * t).sin()).abs() < 1e-7, "t = {t}");
        }
    }

    #[test]
    fn exponential_decay_is_fifth_order_accurate() {
        struct Decay;
        impl OdeSystem for Decay {
            fn dim(&self) -> usize {
                1
            }
            fn rhs(&self, _t: f64, y: &[f64], d: &mut [f64]) {
                d[0] = -y[0];
            }
        }
        let (ys, _) = Dopri5::with_tolerances(1e-12, 1e-14)
            .solve(&Decay, 0.0, &[1.0], &[1.0, 2.5, 10.0])
            .unwrap();
        assert!((ys[0][0] - (-1.0f64).exp()).abs() < 1e-11);
        assert!((ys[2][0] - (-10.0f64).exp()).abs() < 1e-13);
    }

    #[test]
    fn output_at_initial_time_is_initial_state() {
        let (ys, _) = Dopri5::default()
            .solve(&Oscillator(1.0), 0.0, &[0.3, 0.1], &[0.0, 1.0])
            .unwrap();
        assert_eq!(ys[0], vec![0.3, 0.1]);
    }
}
