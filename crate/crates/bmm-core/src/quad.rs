//! Adaptive quadrature for integrands with power-law endpoint singularities.
//!
//! Panels are integrated with adaptive Simpson over geometrically shrinking
//! windows toward each singular endpoint. The window march stops at the
//! configured clip distance (or earlier, once the remaining mass is below
//! tolerance) and the leftover sliver is added back analytically from the
//! known local exponent, so integrable singularities like `u^{-3/4}` lose no
//! mass to the exclusion window.

use statrs::function::beta::ln_beta;

use crate::error::{Error, Result};

/// Shared subdivision budget for one top-level quadrature call.
pub(crate) struct Budget {
    remaining: isize,
}

impl Budget {
    pub(crate) fn new(max_subdivisions: usize) -> Self {
        Self {
            remaining: max_subdivisions as isize,
        }
    }

    fn spend(&mut self) -> Result<()> {
        self.remaining -= 1;
        if self.remaining < 0 {
            Err(Error::QuadratureError(
                "subdivision budget exhausted".into(),
            ))
        } else {
            Ok(())
        }
    }
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
    budget: &mut Budget,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    // the relative floor stops refinement at the noise level of integrands
    // that are themselves quadratures
    if depth == 0 || delta.abs() <= 15.0 * tol + 1e-7 * (left.abs() + right.abs()) {
        return Ok(left + right + delta / 15.0);
    }
    budget.spend()?;
    let l = adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, budget)?;
    let r = adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, budget)?;
    Ok(l + r)
}

/// Adaptive Simpson on an interval where the integrand is finite.
pub(crate) fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    budget: &mut Budget,
) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    if !(fa.is_finite() && fm.is_finite() && fb.is_finite()) {
        return Err(Error::QuadratureError(format!(
            "non-finite integrand on [{a}, {b}]"
        )));
    }
    let whole = simpson(fa, fm, fb, b - a);
    adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48, budget)
}

/// Integrates from a singular endpoint outward over (0, `span`] measured
/// from `origin` in direction `dir` (+1 or -1). The integrand behaves like
/// `h * d^exponent` at distance `d` from the origin, with `exponent > -1`.
fn march_from_singularity<F: Fn(f64) -> f64>(
    f: &F,
    origin: f64,
    dir: f64,
    span: f64,
    exponent: f64,
    tol: f64,
    clip: f64,
    budget: &mut Budget,
) -> Result<f64> {
    if span <= 0.0 {
        return Ok(0.0);
    }
    if exponent <= -1.0 {
        return Err(Error::QuadratureError(format!(
            "non-integrable endpoint exponent {exponent}"
        )));
    }
    // signed mass of (0, d] under the local power law anchored at distance d
    let tail_at = |d: f64| -> f64 {
        let g = f(origin + dir * d);
        if g.is_finite() {
            g * d / (exponent + 1.0)
        } else {
            f64::NAN
        }
    };
    let windows_cap = 80usize;
    let window_tol = tol / 40.0;
    let tail_tol = tol / 4.0;
    let mut total = 0.0;
    let mut outer = span;
    let mut t_outer = tail_at(outer);
    for level in 0..windows_cap {
        let inner = 0.5 * outer;
        if inner <= clip {
            // integrate the last resolvable window, then correct the sliver
            let lo = clip.min(outer);
            if outer > lo {
                let (a, b) = ordered(origin, dir, lo, outer);
                total += adaptive_simpson(f, a, b, window_tol, budget)?;
            }
            let g = f(origin + dir * lo);
            if g.is_finite() {
                total += g * lo / (exponent + 1.0);
            }
            return Ok(total);
        }
        let (a, b) = ordered(origin, dir, inner, outer);
        let window = adaptive_simpson(f, a, b, window_tol, budget)?;
        total += window;
        let t_inner = tail_at(inner);
        // the march may stop once the power-law model is self-consistent
        // across one halving: both sides then estimate the remaining mass
        // below `outer` to within the tolerance. The relative term keeps
        // integrands that are themselves quadratures (with their own noise
        // floor) from marching into unresolvable territory.
        let accept = tail_tol + 1e-6 * (t_outer.abs() + t_inner.abs());
        if level >= 2
            && t_outer.is_finite()
            && t_inner.is_finite()
            && (t_outer - (window + t_inner)).abs() < accept
        {
            return Ok(total + t_inner);
        }
        t_outer = t_inner;
        outer = inner;
    }
    Err(Error::QuadratureError(
        "singular endpoint march failed to converge".into(),
    ))
}

fn ordered(origin: f64, dir: f64, d_near: f64, d_far: f64) -> (f64, f64) {
    if dir > 0.0 {
        (origin + d_near, origin + d_far)
    } else {
        (origin - d_far, origin - d_near)
    }
}

/// Integrates `f` over `[a, b]` where `f ~ (s - a)^exp_a` near `a` and
/// `f ~ (b - s)^exp_b` near `b`; exponents above -1 (0 for regular ends).
pub(crate) fn integrate_panel<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    exp_a: f64,
    exp_b: f64,
    tol: f64,
    clip: f64,
    budget: &mut Budget,
) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let width = b - a;
    if width <= 8.0 * clip {
        // panel too narrow to subdivide: treat the integrand as the exact
        // two-sided power law C (s-a)^ea (b-s)^eb with C read off at the
        // midpoint, whose integral is C w^(ea+eb+1) B(ea+1, eb+1)
        if exp_a <= -1.0 || exp_b <= -1.0 {
            return Err(Error::QuadratureError(format!(
                "non-integrable endpoint exponent ({exp_a}, {exp_b})"
            )));
        }
        let mid = 0.5 * (a + b);
        let g = f(mid);
        if !g.is_finite() {
            return Ok(0.0);
        }
        let c = g / ((mid - a).powf(exp_a) * (b - mid).powf(exp_b));
        let mass = c
            * width.powf(exp_a + exp_b + 1.0)
            * ln_beta(exp_a + 1.0, exp_b + 1.0).exp();
        return Ok(if mass.is_finite() { mass } else { 0.0 });
    }
    let half = 0.5 * width;
    let left = march_from_singularity(f, a, 1.0, half, exp_a, 0.5 * tol, clip, budget)?;
    let right = march_from_singularity(f, b, -1.0, half, exp_b, 0.5 * tol, clip, budget)?;
    Ok(left + right)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, ea: f64, eb: f64) -> f64 {
        let mut budget = Budget::new(10_000);
        integrate_panel(&f, a, b, ea, eb, 1e-9, 1e-10, &mut budget).unwrap()
    }

    #[test]
    fn smooth_integrand() {
        let v = run(|x| x * x, 0.0, 1.0, 0.0, 0.0);
        assert!((v - 1.0 / 3.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn left_singularity_recovers_full_mass() {
        // integral of x^{-3/4} over (0, 1] is 4; the 1e-10 clip alone would
        // lose ~1.3e-2 of it
        let v = run(|x| x.powf(-0.75), 0.0, 1.0, -0.75, 0.0);
        assert!((v - 4.0).abs() < 1e-6, "{v}");
    }

    #[test]
    fn two_sided_singularity() {
        // arcsine density integrates to 1
        let v = run(
            |x| 1.0 / (std::f64::consts::PI * (x * (1.0 - x)).sqrt()),
            0.0,
            1.0,
            -0.5,
            -0.5,
        );
        assert!((v - 1.0).abs() < 1e-7, "{v}");
    }

    #[test]
    fn vanishing_endpoint_exponent() {
        // integral of x^{0.4} over (0, 1]
        let v = run(|x| x.powf(0.4), 0.0, 1.0, 0.4, 0.0);
        assert!((v - 1.0 / 1.4).abs() < 1e-7, "{v}");
    }

    #[test]
    fn non_integrable_exponent_errors() {
        let mut budget = Budget::new(10_000);
        let r = integrate_panel(
            &|x: f64| x.powf(-1.5),
            0.0,
            1.0,
            -1.5,
            0.0,
            1e-9,
            1e-10,
            &mut budget,
        );
        assert!(matches!(r, Err(Error::QuadratureError(_))));
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let mut budget = Budget::new(1);
        let wiggle = |x: f64| (500.0 * x).sin() * x.powf(-0.5);
        let r = integrate_panel(&wiggle, 0.0, 1.0, -0.5, 0.0, 1e-12, 1e-10, &mut budget);
        assert!(matches!(r, Err(Error::QuadratureError(_))));
    }
}
