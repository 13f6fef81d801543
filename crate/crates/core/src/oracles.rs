//! Independent references: radial shooting for the Robin problem on a disk
//! and a tolerance comparison helper.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radial integrator used by [`disk_shooting_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    /// Adaptive classical Runge-Kutta with step doubling.
    Rk4,
    /// Local Taylor series of the equation multiplied by `r²`.
    Taylor,
}

/// Lowest sector-`m` eigenvalue of the disk of radius `r` with
/// `∂_r u = α u` on the boundary, searched in `[e_lo, e_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingProblem {
    #[serde(rename = "R")]
    pub radius: f64,
    pub alpha: f64,
    pub m: u32,
    pub e_lo: f64,
    pub e_hi: f64,
}

impl ShootingProblem {
    /// Default search window `[−(α + m + 1/R + 1)², 0]`, which contains the
    /// sector ground state whenever it is negative.
    pub fn new(radius: f64, alpha: f64, m: u32) -> Self {
        let w = alpha.abs() + m as f64 / radius + 1.0 / radius + 1.0;
        Self { radius, alpha, m, e_lo: -w * w, e_hi: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::Invalid(format!("radius must be positive (got {})", self.radius)));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Invalid(format!("alpha must be positive (got {})", self.alpha)));
        }
        if !(self.e_lo < self.e_hi) || !self.e_lo.is_finite() || !self.e_hi.is_finite() {
            return Err(Error::Invalid(format!("empty search window [{}, {}]", self.e_lo, self.e_hi)));
        }
        Ok(())
    }
}

const R0: f64 = 1e-6;
const STEP_TOL: f64 = 1e-12;

/// Two-term Frobenius start `f = r^m (1 − E r²/(4(m+1)))`, scaled by `r₀^{-m}`.
fn frobenius_start(m: u32, e: f64) -> [f64; 2] {
    let mf = m as f64;
    let c2 = -e / (4.0 * (mf + 1.0));
    let f = 1.0 + c2 * R0 * R0;
    let df = mf / R0 + (mf + 2.0) * c2 * R0;
    [f, df]
}

fn rhs(r: f64, y: [f64; 2], m2: f64, e: f64) -> [f64; 2] {
    [y[1], -y[1] / r + (m2 / (r * r) - e) * y[0]]
}

fn rk4_step(r: f64, y: [f64; 2], h: f64, m2: f64, e: f64) -> [f64; 2] {
    let k1 = rhs(r, y, m2, e);
    let y2 = [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]];
    let k2 = rhs(r + 0.5 * h, y2, m2, e);
    let y3 = [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]];
    let k3 = rhs(r + 0.5 * h, y3, m2, e);
    let y4 = [y[0] + h * k3[0], y[1] + h * k3[1]];
    let k4 = rhs(r + h, y4, m2, e);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

fn integrate_rk4(radius: f64, m: u32, e: f64, tol: f64) -> [f64; 2] {
    let m2 = (m as f64).powi(2);
    let mut r = R0;
    let mut y = frobenius_start(m, e);
    let mut h = R0 * 0.1;
    while r < radius {
        if r + h > radius {
            h = radius - r;
        }
        let full = rk4_step(r, y, h, m2, e);
        let half = rk4_step(r, y, 0.5 * h, m2, e);
        let two = rk4_step(r + 0.5 * h, half, 0.5 * h, m2, e);
        let scale = two[0].abs().max(two[1].abs() * h).max(f64::MIN_POSITIVE);
        let err = ((two[0] - full[0]).abs().max((two[1] - full[1]).abs() * h)) / (15.0 * scale);
        if err <= tol || h < 1e-14 * r {
            r += h;
            y = [two[0] + (two[0] - full[0]) / 15.0, two[1] + (two[1] - full[1]) / 15.0];
            let grow = if err > 0.0 { 0.9 * (tol / err).powf(0.2) } else { 4.0 };
            h *= grow.clamp(0.2, 4.0);
        } else {
            h *= (0.9 * (tol / err).powf(0.25)).clamp(0.1, 0.5);
        }
    }
    y
}

/// Taylor stepping of `r²f'' + r f' + (E r² − m²) f = 0` about each step
/// start, with the step kept inside half the distance to the singular
/// point `r = 0`.
fn integrate_taylor(radius: f64, m: u32, e: f64) -> [f64; 2] {
    let m2 = (m as f64).powi(2);
    let mut r = R0;
    let y = frobenius_start(m, e);
    let (mut f, mut df) = (y[0], y[1]);
    let mut a = vec![0.0; 80];
    while r < radius {
        let h = (0.5 * r).min(0.5 / e.abs().sqrt().max(1e-3)).min(radius - r);
        a.iter_mut().for_each(|x| *x = 0.0);
        a[0] = f;
        a[1] = df;
        let (mut val, mut der) = (f + df * h, df);
        let mut hp = h;
        let scale = f.abs().max(df.abs() * h);
        let mut small = 0;
        for n in 0..a.len() - 2 {
            let nf = n as f64;
            let mut s = r * (nf + 1.0) * (2.0 * nf + 1.0) * a[n + 1] + (nf * nf + e * r * r - m2) * a[n];
            if n >= 1 {
                s += 2.0 * e * r * a[n - 1];
            }
            if n >= 2 {
                s += e * a[n - 2];
            }
            a[n + 2] = -s / (r * r * (nf + 2.0) * (nf + 1.0));
            der += (nf + 2.0) * a[n + 2] * hp;
            hp *= h;
            let term = a[n + 2] * hp;
            val += term;
            if term.abs() <= 1e-18 * scale {
                small += 1;
                if small >= 3 {
                    break;
                }
            } else {
                small = 0;
            }
        }
        f = val;
        df = der;
        r += h;
    }
    [f, df]
}

fn mismatch(p: &ShootingProblem, e: f64, how: Integrator, tol: f64) -> f64 {
    let y = match how {
        Integrator::Rk4 => integrate_rk4(p.radius, p.m, e, tol),
        Integrator::Taylor => integrate_taylor(p.radius, p.m, e),
    };
    y[1] - p.alpha * y[0]
}

/// Bisection on `f'(R) − α f(R)` with the adaptive RK4 integrator.
pub fn disk_shooting(problem: &ShootingProblem) -> Result<f64> {
    disk_shooting_with(problem, Integrator::Rk4)
}

pub fn disk_shooting_with(problem: &ShootingProblem, how: Integrator) -> Result<f64> {
    shoot(problem, how, STEP_TOL)
}

fn shoot(problem: &ShootingProblem, how: Integrator, tol: f64) -> Result<f64> {
    problem.validate()?;
    let (mut lo, mut hi) = (problem.e_lo, problem.e_hi);
    let g_lo = mismatch(problem, lo, how, tol);
    let g_hi = mismatch(problem, hi, how, tol);
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::Bracket(format!(
            "no sign change of the Robin mismatch on [{lo}, {hi}]; widen or shift the window"
        )));
    }
    let s_lo = g_lo.signum();
    while hi - lo > 1e-11f64.max(4.0 * f64::EPSILON * lo.abs().max(hi.abs())) {
        let mid = 0.5 * (lo + hi);
        if mismatch(problem, mid, how, tol).signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Outcome of a tolerance comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheck {
    pub pass: bool,
    pub diff: f64,
    pub tol: f64,
    pub line: String,
}

/// `|a − b| ≤ tol` with a one-line report.
pub fn cross_validate(value_a: f64, value_b: f64, tol: f64) -> CrossCheck {
    let diff = (value_a - value_b).abs();
    let pass = diff <= tol;
    let line = format!(
        "{}: |{value_a:.12e} - {value_b:.12e}| = {diff:.3e} (tol {tol:.1e})",
        if pass { "PASS" } else { "FAIL" }
    );
    CrossCheck { pass, diff, tol, line }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_alpha_tends_to_neumann_ground_state() {
        // E ≈ −2α/R for α → 0
        let e = disk_shooting(&ShootingProblem::new(1.0, 1e-4, 0)).unwrap();
        assert!(e < 0.0 && e > -3e-4, "{e}");
        assert!((e + 2e-4).abs() < 1e-7, "{e}");
    }

    #[test]
    fn integrators_agree() {
        for (alpha, m) in [(1.0, 0), (5.0, 1), (20.0, 0), (20.0, 3)] {
            let p = ShootingProblem::new(1.0, alpha, m);
            let a = disk_shooting_with(&p, Integrator::Rk4).unwrap();
            let b = disk_shooting_with(&p, Integrator::Taylor).unwrap();
            assert!((a - b).abs() < 1e-9 * a.abs().max(1.0), "α={alpha} m={m}: {a} vs {b}");
        }
        let e = disk_shooting(&ShootingProblem::new(1.0, 1.0, 0)).unwrap();
        assert!(e > -3.0 && e < -2.0, "{e}");
    }

    #[test]
    fn halving_the_step_tolerance_does_not_move_the_root() {
        let p = ShootingProblem::new(1.0, 20.0, 0);
        let a = shoot(&p, Integrator::Rk4, STEP_TOL).unwrap();
        let b = shoot(&p, Integrator::Rk4, STEP_TOL / 32.0).unwrap();
        assert!((a - b).abs() < 1e-9 * a.abs(), "{a} vs {b}");
    }

    #[test]
    fn sector_levels_increase_with_m() {
        let e: Vec<f64> = (0..=3).map(|m| disk_shooting(&ShootingProblem::new(1.0, 10.0, m)).unwrap()).collect();
        assert!(e.windows(2).all(|w| w[0] < w[1]), "{e:?}");
    }

    #[test]
    fn curvature_window_holds_from_10_to_20() {
        let w = |alpha: f64| {
            let e = disk_shooting(&ShootingProblem::new(1.0, alpha, 0)).unwrap();
            e + alpha * alpha + alpha
        };
        let (w10, w20) = (w(10.0), w(20.0));
        assert!(w20.abs() <= 2.0 * w10.abs().max(0.5), "{w10} {w20}");
    }

    #[test]
    fn missing_sign_change_is_reported() {
        // m = 3 has no negative level when α < 3
        let p = ShootingProblem::new(1.0, 1.0, 3);
        assert!(matches!(disk_shooting(&p), Err(Error::Bracket(_))));
        assert!(ShootingProblem { alpha: -1.0, ..ShootingProblem::new(1.0, 1.0, 0) }.validate().is_err());
    }

    #[test]
    fn cross_validate_reports() {
        assert!(cross_validate(1.0, 1.0 + 1e-12, 1e-9).pass);
        let c = cross_validate(1.0, 2.0, 1e-9);
        assert!(!c.pass && c.line.starts_with("FAIL"));
    }
}
