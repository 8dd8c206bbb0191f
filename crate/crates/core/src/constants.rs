//! Explicit constants: the main-theorem optimizer over stopping levels,
//! the Laplace-transform Luxemburg bound, the closed-form Orlicz and
//! variable-exponent constants, and the variable-exponent Chebyshev pair.

use crate::error::{Error, Result};
use crate::grid::{CellFunction, CellMeasure, DyadicCube};
use crate::norms::{variable_norm, ExponentFunction};
use crate::numeric::{bisect_decreasing, golden_section_min, log_spaced};
use crate::young::{young_inverse, YoungFunction};

/// Exponential-decay parameters (c₁, c₂) of a John–Nirenberg tail
/// `c₁·exp(−t/(c₂‖f‖))`; both must exceed 1.
#[derive(Debug, Clone, Copy)]
pub struct JNParams {
    pub c1: f64,
    pub c2: f64,
}

impl JNParams {
    pub fn new(c1: f64, c2: f64) -> Result<JNParams> {
        if !(c1 > 1.0 && c2 > 1.0) {
            return Err(Error::Parameter(format!(
                "decay parameters must both exceed 1; got c1 = {c1}, c2 = {c2}"
            )));
        }
        Ok(JNParams { c1, c2 })
    }
}

impl Default for JNParams {
    fn default() -> JNParams {
        JNParams { c1: 2.0, c2: 2.0 }
    }
}

#[derive(Debug, Clone)]
enum BijKind {
    Identity,
    /// Ψ(t) = t^p, Ψ⁻¹(t) = t^{1/p}.
    Power { p: f64 },
    /// Ψ(s) = 1/φ(1/s), Ψ⁻¹(t) = 1/φ⁻¹(1/t).
    Orlicz(YoungFunction),
}

/// An increasing bijection Ψ of [0,1] with evaluable inverse.
#[derive(Debug, Clone)]
pub struct Bijection {
    kind: BijKind,
    name: String,
}

impl Bijection {
    pub fn identity() -> Bijection {
        Bijection { kind: BijKind::Identity, name: "identity".into() }
    }

    pub fn power(p: f64) -> Result<Bijection> {
        if !(p > 0.0) {
            return Err(Error::Parameter(format!("power bijection needs p > 0, got {p}")));
        }
        Ok(Bijection { kind: BijKind::Power { p }, name: format!("power:{p}") })
    }

    pub fn orlicz(phi: YoungFunction) -> Bijection {
        let name = format!("orlicz:{}", phi.name());
        Bijection { kind: BijKind::Orlicz(phi), name }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Ψ(t) on [0,1].
    pub fn forward(&self, t: f64) -> Result<f64> {
        let t = clamp_unit(t, "Ψ")?;
        Ok(match &self.kind {
            BijKind::Identity => t,
            BijKind::Power { p } => t.powf(*p),
            BijKind::Orlicz(phi) => {
                if t == 0.0 {
                    0.0
                } else {
                    1.0 / phi.eval(1.0 / t)
                }
            }
        })
    }

    /// Ψ⁻¹(t) on [0,1].
    pub fn inverse(&self, t: f64) -> Result<f64> {
        let t = clamp_unit(t, "Ψ⁻¹")?;
        Ok(match &self.kind {
            BijKind::Identity => t,
            BijKind::Power { p } => t.powf(1.0 / p),
            BijKind::Orlicz(phi) => {
                if t == 0.0 {
                    0.0
                } else {
                    // the bisection can land a hair past 1
                    (1.0 / young_inverse(phi, 1.0 / t)?).min(1.0)
                }
            }
        })
    }

    /// Grid check of the bijection contract: endpoints, monotonicity and
    /// the Ψ∘Ψ⁻¹ roundtrip.
    pub fn validate(&self) -> Result<()> {
        if self.forward(0.0)?.abs() > 1e-12 || (self.forward(1.0)? - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!("{}: endpoint values off", self.name)));
        }
        let mut prev = 0.0;
        for i in 1..=64 {
            let t = i as f64 / 64.0;
            let v = self.forward(t)?;
            if v <= prev {
                return Err(Error::Parameter(format!("{}: not increasing at t = {t}", self.name)));
            }
            prev = v;
            let round = self.forward(self.inverse(t)?)?;
            if (round - t).abs() > 1e-10 {
                return Err(Error::Parameter(format!(
                    "{}: roundtrip error {} at t = {t}",
                    self.name,
                    (round - t).abs()
                )));
            }
        }
        Ok(())
    }
}

/// Accepts round-off within 1e-9 of the unit interval and clamps it.
fn clamp_unit(t: f64, what: &str) -> Result<f64> {
    if !(-1e-9..=1.0 + 1e-9).contains(&t) {
        return Err(Error::Parameter(format!("{what} domain is [0,1], got {t}")));
    }
    Ok(t.clamp(0.0, 1.0))
}

/// Minimizes `c_μ·2^{n_μ}·L / (1 − C_Y·K·Ψ⁻¹(1/L))` over admissible
/// stopping levels L; returns the minimum and its argmin.
///
/// The scan runs geometrically from the feasibility boundary, then
/// golden-section refines on log L.
pub fn theorem_constant(
    psi: &Bijection,
    c_y: f64,
    k: f64,
    c_mu: f64,
    n_mu: f64,
) -> Result<(f64, f64)> {
    let ck = c_y * k;
    if !(ck >= 1.0) {
        return Err(Error::Parameter(format!(
            "need C_Y·K ≥ 1 for a feasible level range, got {ck}"
        )));
    }
    if !(c_mu >= 1.0) || !(n_mu >= 0.0) {
        return Err(Error::Parameter(format!(
            "doubling parameters out of range: c_mu = {c_mu}, n_mu = {n_mu}"
        )));
    }
    let prefactor = c_mu * (2.0f64).powf(n_mu);
    let l_min = (1.0 / psi.forward(1.0 / ck)?).max(1.0);
    let objective = |l: f64| -> f64 {
        let denom = 1.0 - ck * psi.inverse(1.0 / l).unwrap_or(f64::INFINITY);
        if denom <= 0.0 {
            f64::INFINITY
        } else {
            prefactor * l / denom
        }
    };
    // geometric scan over (L_min, L_min·1e6]
    let grid = log_spaced(l_min * (1.0 + 1e-9), l_min * 1e6, 600);
    let mut best_i = None;
    let mut best_v = f64::INFINITY;
    for (i, &l) in grid.iter().enumerate() {
        let v = objective(l);
        if v < best_v {
            best_v = v;
            best_i = Some(i);
        }
    }
    let Some(i) = best_i else {
        return Err(Error::Parameter(
            "objective infeasible over the entire level bracket".into(),
        ));
    };
    let lo = if i == 0 { l_min * (1.0 + 1e-9) } else { grid[i - 1] };
    let hi = if i + 1 == grid.len() { grid[i] } else { grid[i + 1] };
    let (x, value) = golden_section_min(|x: f64| objective(x.exp()), lo.ln(), hi.ln(), 1e-10);
    if !value.is_finite() {
        return Err(Error::Parameter("optimizer failed to find a finite value".into()));
    }
    Ok((value, x.exp()))
}

/// Adaptive Simpson on [a,b] with absolute tolerance `tol`.
fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adaptive_simpson(f, a, m, fa, flm, fm, tol / 2.0, depth - 1)
            + adaptive_simpson(f, m, b, fm, frm, fb, tol / 2.0, depth - 1)
    }
}

/// `ℒ{φ'}(s) = ∫₀^∞ φ'(t) e^{−st} dt`, truncated where the integrand
/// falls below 1e−16 of its peak.
fn laplace_of_deriv(phi: &YoungFunction, s: f64) -> Result<f64> {
    let integrand = |t: f64| phi.deriv(t) * (-s * t).exp();
    // scan for the peak and a negligible-tail cutoff
    let mut peak = 0.0f64;
    let mut cutoff = 1.0;
    loop {
        let v = integrand(cutoff);
        if !v.is_finite() {
            return Err(Error::MalformedYoung(format!(
                "Laplace transform of the derivative diverges at s = {s}"
            )));
        }
        peak = peak.max(v);
        if v < 1e-16 * peak.max(1e-300) && cutoff > 4.0 / s {
            break;
        }
        cutoff *= 2.0;
        if cutoff > 1e12 {
            return Err(Error::MalformedYoung(format!(
                "integrand of the transform does not decay by t = 1e12 at s = {s}"
            )));
        }
    }
    let f = integrand;
    let (a, b) = (0.0, cutoff);
    let m = 0.5 * (a + b);
    Ok(adaptive_simpson(&f, a, b, f(a), f(m), f(b), 1e-12 * peak.max(1e-300) * cutoff, 48))
}

/// Luxemburg-norm decay bound `c₂·(ℒ{φ'})⁻¹(1/c₁)`: the transform is
/// decreasing in s, so the inversion is a bisection.
pub fn laplace_bound(phi: &YoungFunction, jn: &JNParams) -> Result<f64> {
    let target = 1.0 / jn.c1;
    let mut hi = 1.0f64;
    while laplace_of_deriv(phi, hi)? > target {
        hi *= 2.0;
        if hi > 1e9 {
            return Err(Error::MalformedYoung("transform stays above the target level".into()));
        }
    }
    let mut lo = hi / 2.0;
    while laplace_of_deriv(phi, lo)? < target {
        lo /= 2.0;
        if lo < 1e-9 {
            return Err(Error::MalformedYoung("transform stays below the target level".into()));
        }
    }
    let s = bisect_decreasing(
        |s| laplace_of_deriv(phi, s).map(|v| v - target).unwrap_or(-1.0),
        lo,
        hi,
        1e-9,
    );
    Ok(jn.c2 * s)
}

/// Closed-form Orlicz constant `c_μ·2^{n_μ}·φ(c·(1+1/[φ]₁))·([φ]₂+1)`
/// from the growth bounds of φ.
pub fn orlicz_constant(phi: &YoungFunction, c: f64, c_mu: f64, n_mu: f64) -> Result<f64> {
    let (b1, b2) = phi.analytic_bounds().ok_or_else(|| {
        Error::Parameter(format!(
            "{}: growth bounds unavailable; supply a family with analytic bounds or sample them",
            phi.name()
        ))
    })?;
    if !(b1 > 0.0) {
        return Err(Error::Parameter(format!("lower growth bound must be positive, got {b1}")));
    }
    Ok(c_mu * (2.0f64).powf(n_mu) * phi.eval(c * (1.0 + 1.0 / b1)) * (b2 + 1.0))
}

/// Variable-exponent decay rate `log 2 / (2·C_n·p⁺)`.
pub fn variable_jn_constant(c_n: f64, p_plus: f64) -> Result<f64> {
    if !(c_n > 0.0) || !(p_plus >= 1.0) {
        return Err(Error::Parameter(format!(
            "need C_n > 0 and p⁺ ≥ 1; got C_n = {c_n}, p⁺ = {p_plus}"
        )));
    }
    Ok((2.0f64).ln() / (2.0 * c_n * p_plus))
}

/// The dimensional factor for the variable-exponent pipeline: the
/// main-theorem constant with Ψ⁻¹(t) = t^{1/p⁺} and C_Y = K = 1,
/// divided by p⁺ (linear-in-p⁺ normalization).
pub fn variable_cn(c_mu: f64, n_mu: f64, p_plus: f64) -> Result<f64> {
    let psi = Bijection::power(p_plus)?;
    let (c, _) = theorem_constant(&psi, 1.0, 1.0, c_mu, n_mu)?;
    Ok(c / p_plus)
}

/// The Chebyshev pair for the level set `E_t = {|f − f_Q| ≥ t}`:
/// `lhs = ‖χ_{E_t}‖_{L^{p(·)}(Q, dν/ν(Q))}` and
/// `rhs = t^{−r}·‖f − f_Q‖^r_{L^{r·p(·)}(Q, dν/ν(Q))}`.
pub fn chebyshev_chain(
    f: &CellFunction,
    pfun: &ExponentFunction,
    cube: &DyadicCube,
    measure: &CellMeasure,
    t: f64,
    r: f64,
) -> Result<(f64, f64)> {
    if !(t > 0.0) {
        return Err(Error::Parameter(format!("threshold must be positive, got {t}")));
    }
    if !(r >= 1.0) {
        return Err(Error::Parameter(format!("scaling exponent must be ≥ 1, got {r}")));
    }
    let avg = measure.cube_average(f, cube)?;
    let g = f.map(|v| v - avg)?;
    let indicator = g.map(|v| if v.abs() >= t { 1.0 } else { 0.0 })?;
    let lhs = variable_norm(&indicator, pfun, cube, measure)?;
    let rhs = variable_norm(&g, &pfun.scaled(r)?, cube, measure)?.powf(r) / t.powf(r);
    Ok((lhs, rhs))
}
