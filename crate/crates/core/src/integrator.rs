//! Embedded Dormand-Prince 5(4) integrator for autonomous linear-size
//! complex systems `dy/dt = f(y)`.

use nalgebra::SVector;

use crate::error::{Error, Result};
use crate::state::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rtol: 1e-10,
            atol: 1e-12,
        }
    }
}

const MAX_STEPS: usize = 50_000_000;
const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

// Butcher tableau (autonomous, so the nodes are not needed)
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
// difference between the 5th and embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

pub struct DormandPrince<F, const N: usize> {
    rhs: F,
    tol: Tolerances,
    h: f64,
    steps: usize,
}

impl<F, const N: usize> DormandPrince<F, N>
where
    F: Fn(&SVector<C64, N>) -> SVector<C64, N>,
{
    pub fn new(rhs: F, tol: Tolerances) -> Self {
        DormandPrince {
            rhs,
            tol,
            h: 0.0,
            steps: 0,
        }
    }

    /// Accepted steps so far.
    pub fn steps(&self) -> usize {
        self.steps
    }

    fn error_norm(
        &self,
        y: &SVector<C64, N>,
        y_new: &SVector<C64, N>,
        err: &SVector<C64, N>,
    ) -> f64 {
        let mut acc = 0.0;
        for i in 0..N {
            let scale = self.tol.atol + self.tol.rtol * y[i].norm().max(y_new[i].norm());
            let e = err[i].norm() / scale;
            acc += e * e;
        }
        (acc / N as f64).sqrt()
    }

    fn initial_step(&self, y: &SVector<C64, N>, f0: &SVector<C64, N>, span: f64) -> f64 {
        let y_scale = y.norm().max(self.tol.atol);
        let f_scale = f0.norm();
        let h = if f_scale > 0.0 {
            0.01 * y_scale / f_scale
        } else {
            1e-3 * span
        };
        h.min(span).max(1e-12 * span)
    }

    /// Advances `y` from `t0` to `t1`, landing exactly on `t1`.
    pub fn advance(&mut self, y: &mut SVector<C64, N>, t0: f64, t1: f64) -> Result<()> {
        let span = t1 - t0;
        if span <= 0.0 {
            return Ok(());
        }
        let mut t = t0;
        let mut k1 = (self.rhs)(y);
        if self.h <= 0.0 {
            self.h = self.initial_step(y, &k1, span);
        }
        while t < t1 {
            if self.steps >= MAX_STEPS {
                return Err(Error::Integrator {
                    t,
                    reason: format!("exceeded {MAX_STEPS} steps"),
                });
            }
            let remaining = t1 - t;
            let last = self.h >= remaining;
            let h = if last { remaining } else { self.h };

            let k2 = (self.rhs)(&(*y + k1.scale(A21 * h)));
            let k3 = (self.rhs)(&(*y + (k1.scale(A31) + k2.scale(A32)).scale(h)));
            let k4 = (self.rhs)(&(*y + (k1.scale(A41) + k2.scale(A42) + k3.scale(A43)).scale(h)));
            let k5 = (self.rhs)(
                &(*y + (k1.scale(A51) + k2.scale(A52) + k3.scale(A53) + k4.scale(A54)).scale(h)),
            );
            let k6 = (self.rhs)(
                &(*y + (k1.scale(A61)
                    + k2.scale(A62)
                    + k3.scale(A63)
                    + k4.scale(A64)
                    + k5.scale(A65))
                .scale(h)),
            );
            let y_new = *y
                + (k1.scale(A71) + k3.scale(A73) + k4.scale(A74) + k5.scale(A75) + k6.scale(A76))
                    .scale(h);
            let k7 = (self.rhs)(&y_new);
            let err = (k1.scale(E1)
                + k3.scale(E3)
                + k4.scale(E4)
                + k5.scale(E5)
                + k6.scale(E6)
                + k7.scale(E7))
            .scale(h);

            let err_norm = self.error_norm(y, &y_new, &err);
            if !err_norm.is_finite() {
                return Err(Error::Integrator {
                    t,
                    reason: "non-finite error estimate".into(),
                });
            }
            let factor = if err_norm == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err_norm.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            if err_norm <= 1.0 {
                *y = y_new;
                k1 = k7;
                self.steps += 1;
                t = if last { t1 } else { t + h };
                // a truncated final step says nothing about the natural size
                if !last || factor < 1.0 {
                    self.h = h * factor;
                }
            } else {
                self.h = h * factor.min(1.0);
            }
            if self.h < 1e-14 * t1.abs().max(1.0) {
                return Err(Error::Integrator {
                    t,
                    reason: format!("step size underflow (h = {:e})", self.h),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector2;

    #[test]
    fn harmonic_oscillator_phase() {
        // dy/dt = -i w y
        let w = 3.0;
        let mut solver = DormandPrince::new(
            |y: &SVector<C64, 1>| y * C64::new(0.0, -w),
            Tolerances::default(),
        );
        let mut y = SVector::<C64, 1>::new(C64::from(1.0));
        let mut t = 0.0;
        for i in 1..=100 {
            let next = 0.1 * i as f64;
            solver.advance(&mut y, t, next).unwrap();
            t = next;
        }
        let exact = C64::new(0.0, -w * t).exp();
        assert!((y[0] - exact).norm() < 1e-9);
        assert!(solver.steps() > 0);
    }

    #[test]
    fn damped_rotation() {
        // y1' = -y1 + y2, y2' = -y1 - y2
        let f = |y: &Vector2<C64>| Vector2::new(-y[0] + y[1], -y[0] - y[1]);
        let mut solver = DormandPrince::new(f, Tolerances::default());
        let mut y = Vector2::new(C64::from(1.0), C64::from(0.0));
        solver.advance(&mut y, 0.0, 2.0).unwrap();
        let decay = (-2.0_f64).exp();
        assert!((y[0].re - decay * 2.0_f64.cos()).abs() < 1e-10);
        assert!((y[1].re + decay * 2.0_f64.sin()).abs() < 1e-10);
    }

    #[test]
    fn zero_span_is_noop() {
        let mut solver = DormandPrince::new(|y: &SVector<C64, 1>| *y, Tolerances::default());
        let mut y = SVector::<C64, 1>::new(C64::from(2.0));
        solver.advance(&mut y, 1.0, 1.0).unwrap();
        assert_eq!(y[0], C64::from(2.0));
    }
}
