//! Young functions: the built-in families `t^p`, `t^p (1+log⁺t)^α` and the
//! `log(e+t)` variant, growth bounds, inverses and submultiplicativity checks.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numeric::log_spaced;

/// Cap for inverse bracketing; arguments beyond this are treated as overflow.
pub const INVERSE_BRACKET_CAP: f64 = 1e12;

/// `log⁺ t = max{log t, 0}`.
pub fn log_plus(t: f64) -> f64 {
    t.ln().max(0.0)
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    /// φ_p(t) = t^p
    Power { p: f64 },
    /// φ_{p,α}(t) = t^p (1 + log⁺ t)^α
    PLog { p: f64, alpha: f64 },
    /// φ̃_{p,α}(t) = log(e+1)^{-α} t^p log(e+t)^α
    PLogAlt { p: f64, alpha: f64 },
    Custom { eval: RealFn, deriv: Option<RealFn>, fd_step: f64 },
}

/// A convex φ with φ(0)=0, φ(1)=1, φ(t)→∞, a quasi-submultiplicativity
/// constant and (for built-in families) analytic growth bounds.
#[derive(Clone)]
pub struct YoungFunction {
    kind: Kind,
    name: String,
    submult_c: f64,
    analytic_bounds: Option<(f64, f64)>,
}

impl fmt::Debug for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "YoungFunction({})", self.name)
    }
}

impl YoungFunction {
    /// `φ_p(t) = t^p`, submultiplicative with constant 1, `[φ]₁ = [φ]₂ = p`.
    pub fn power(p: f64) -> Result<YoungFunction> {
        if !(p >= 1.0) {
            return Err(Error::Parameter(format!("power exponent p = {p} must be ≥ 1")));
        }
        let y = YoungFunction {
            kind: Kind::Power { p },
            name: format!("power:{p}"),
            submult_c: 1.0,
            analytic_bounds: Some((p, p)),
        };
        y.validate()?;
        Ok(y)
    }

    /// `φ_{p,α}(t) = t^p (1+log⁺t)^α`, submultiplicative (constant 1),
    /// `[φ]₁ = p`, `[φ]₂ = p + α`.
    pub fn p_log(p: f64, alpha: f64) -> Result<YoungFunction> {
        if !(p >= 1.0) || !(alpha >= 0.0) {
            return Err(Error::Parameter(format!("plog requires p ≥ 1, α ≥ 0; got ({p}, {alpha})")));
        }
        let y = YoungFunction {
            kind: Kind::PLog { p, alpha },
            name: format!("plog:{p}:{alpha}"),
            submult_c: 1.0,
            analytic_bounds: Some((p, p + alpha)),
        };
        y.validate()?;
        Ok(y)
    }

    /// `φ̃_{p,α}(t) = log(e+1)^{-α} t^p log(e+t)^α`: same Orlicz space as
    /// `φ_{p,α}` but only quasi-submultiplicative, constant `(2 log(e+1))^α`.
    pub fn p_log_alt(p: f64, alpha: f64) -> Result<YoungFunction> {
        if !(p >= 1.0) || !(alpha >= 0.0) {
            return Err(Error::Parameter(format!(
                "plog-alt requires p ≥ 1, α ≥ 0; got ({p}, {alpha})"
            )));
        }
        let c = (2.0 * (std::f64::consts::E + 1.0).ln()).powf(alpha);
        let y = YoungFunction {
            kind: Kind::PLogAlt { p, alpha },
            name: format!("plog-alt:{p}:{alpha}"),
            submult_c: c,
            analytic_bounds: None,
        };
        y.validate()?;
        Ok(y)
    }

    /// User-supplied φ. `deriv = None` falls back to a centered finite
    /// difference with the declared step.
    pub fn custom(
        name: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: Option<RealFn>,
        fd_step: f64,
        submult_c: f64,
    ) -> Result<YoungFunction> {
        let y = YoungFunction {
            kind: Kind::Custom { eval: Arc::new(eval), deriv, fd_step },
            name: name.into(),
            submult_c,
            analytic_bounds: None,
        };
        y.validate()?;
        Ok(y)
    }

    /// Parse `power:p`, `plog:p:alpha` or `plog-alt:p:alpha`.
    pub fn from_name(spec: &str) -> Result<YoungFunction> {
        let parts: Vec<&str> = spec.split(':').collect();
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::Parameter(format!("bad numeric field {s:?} in {spec:?}")))
        };
        match parts.as_slice() {
            ["power", p] => YoungFunction::power(num(p)?),
            ["plog", p, a] => YoungFunction::p_log(num(p)?, num(a)?),
            ["plog-alt", p, a] => YoungFunction::p_log_alt(num(p)?, num(a)?),
            _ => Err(Error::Parameter(format!(
                "unknown Young function {spec:?} (expected power:p, plog:p:alpha, plog-alt:p:alpha)"
            ))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn submult_c(&self) -> f64 {
        self.submult_c
    }

    /// Analytic `([φ]₁, [φ]₂)` when known for the family.
    pub fn analytic_bounds(&self) -> Option<(f64, f64)> {
        self.analytic_bounds
    }

    pub fn eval(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        match &self.kind {
            Kind::Power { p } => t.powf(*p),
            Kind::PLog { p, alpha } => t.powf(*p) * (1.0 + log_plus(t)).powf(*alpha),
            Kind::PLogAlt { p, alpha } => {
                let norm = (std::f64::consts::E + 1.0).ln().powf(*alpha);
                t.powf(*p) * (std::f64::consts::E + t).ln().powf(*alpha) / norm
            }
            Kind::Custom { eval, .. } => eval(t),
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Power { p } => p * t.powf(p - 1.0),
            Kind::PLog { p, alpha } => {
                if t <= 1.0 {
                    p * t.powf(p - 1.0)
                } else {
                    let l = 1.0 + t.ln();
                    t.powf(p - 1.0) * l.powf(alpha - 1.0) * (p * l + alpha)
                }
            }
            Kind::PLogAlt { p, alpha } => {
                let e = std::f64::consts::E;
                let norm = (e + 1.0).ln().powf(*alpha);
                let l = (e + t).ln();
                (p * t.powf(p - 1.0) * l.powf(*alpha)
                    + alpha * t.powf(*p) * l.powf(alpha - 1.0) / (e + t))
                    / norm
            }
            Kind::Custom { eval, deriv, fd_step } => match deriv {
                Some(d) => d(t),
                None => {
                    let h = *fd_step * t.abs().max(1.0);
                    let lo = (t - h).max(0.0);
                    (eval(t + h) - eval(lo)) / (t + h - lo)
                }
            },
        }
    }

    fn validate(&self) -> Result<()> {
        let v0 = self.eval(0.0);
        if v0.abs() > 1e-12 {
            return Err(Error::MalformedYoung(format!("φ(0) = {v0}, expected 0")));
        }
        let v1 = self.eval(1.0);
        if (v1 - 1.0).abs() > 1e-12 {
            return Err(Error::MalformedYoung(format!("φ(1) = {v1}, expected 1")));
        }
        // monotonicity and convexity on a uniform sample grid
        let ts: Vec<f64> = (0..=400).map(|i| i as f64 * 0.025).collect();
        let vs: Vec<f64> = ts.iter().map(|&t| self.eval(t)).collect();
        for w in vs.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::MalformedYoung("not strictly increasing on check grid".into()));
            }
        }
        for w in vs.windows(3) {
            if w[2] - 2.0 * w[1] + w[0] < -1e-9 {
                return Err(Error::MalformedYoung("not convex on check grid".into()));
            }
        }
        // quasi-submultiplicativity on a coarse log grid
        let grid = log_spaced(1e-2, 1e3, 12);
        for &s in &grid {
            for &t in &grid {
                let lhs = self.eval(s * t);
                let rhs = self.submult_c * self.eval(s) * self.eval(t);
                if lhs > rhs * (1.0 + 1e-9) + 1e-300 {
                    return Err(Error::MalformedYoung(format!(
                        "φ({s}·{t}) = {lhs} exceeds c·φ(s)·φ(t) = {rhs}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Monotone inverse `φ⁻¹(y)` by bracketing + bisection;
/// `|φ(t) − y| ≤ 1e−10·max(1, y)` at the returned `t`.
pub fn young_inverse(phi: &YoungFunction, y: f64) -> Result<f64> {
    if y < 0.0 {
        return Err(Error::Parameter(format!("young_inverse needs y ≥ 0, got {y}")));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0f64;
    while phi.eval(hi) < y {
        hi *= 2.0;
        if hi > INVERSE_BRACKET_CAP {
            return Err(Error::OverflowRange { cap: INVERSE_BRACKET_CAP });
        }
    }
    let mut lo = 0.0f64;
    // bisect to relative bracket width; value tolerance alone is too loose
    // when y is tiny
    for _ in 0..200 {
        if (hi - lo) <= 1e-12 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if phi.eval(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Sampled estimate of the growth bounds `([φ]₁, [φ]₂)`: the inf and sup of
/// `t·φ'(t)/φ(t)` over `(1, t_max]`.
///
/// Samples a log-spaced grid and extrapolates linearly in `1/(1+log t)` at
/// both ends (exact for the `t^p log^α` families, whose ratio is affine in
/// that variable). Estimates, not certified bounds, for general φ.
pub fn growth_bounds(phi: &YoungFunction, t_max: f64, samples: usize) -> Result<(f64, f64)> {
    if !(t_max > 1.0) {
        return Err(Error::Parameter(format!("t_max = {t_max} must exceed 1")));
    }
    if samples < 100 {
        return Err(Error::Parameter(format!("samples = {samples} must be ≥ 100")));
    }
    // clamp the sampled range where φ stays within f64 range; the
    // endpoint extrapolation below still reaches the t → ∞ limit
    let mut t_hi = t_max;
    while !(phi.eval(t_hi).is_finite() && phi.deriv(t_hi).is_finite()) {
        t_hi = t_hi.powf(0.8);
        if t_hi < 2.0 {
            return Err(Error::MalformedYoung("φ overflows immediately above 1".into()));
        }
    }
    let ts = log_spaced(1.0, t_hi, samples);
    let mut xs = Vec::with_capacity(samples); // x = 1/(1+log t), decreasing
    let mut rs = Vec::with_capacity(samples);
    for &t in &ts {
        let v = phi.eval(t);
        if v <= 0.0 {
            return Err(Error::MalformedYoung(format!("φ({t}) = {v} ≤ 0")));
        }
        xs.push(1.0 / (1.0 + t.ln()));
        // divide before multiplying: t·φ'(t) can overflow while the
        // logarithmic derivative itself is moderate
        rs.push(t * (phi.deriv(t) / v));
    }
    let mut inf = f64::INFINITY;
    let mut sup = f64::NEG_INFINITY;
    for &r in &rs {
        inf = inf.min(r);
        sup = sup.max(r);
    }
    // endpoint extrapolation, accepted only on a consistent monotone trend
    let lin = |x0: f64, r0: f64, x1: f64, r1: f64, x: f64| r1 + (r0 - r1) * (x - x1) / (x0 - x1);
    let n = rs.len();
    if n >= 3 {
        // t → 1⁺ end (x → 1)
        let d1 = rs[0] - rs[1];
        if (d1 * (rs[1] - rs[2])) >= 0.0 {
            let r = lin(xs[1], rs[1], xs[0], rs[0], 1.0);
            inf = inf.min(r);
            sup = sup.max(r);
        }
        // t → ∞ end (x → 0)
        let d2 = rs[n - 1] - rs[n - 2];
        if (d2 * (rs[n - 2] - rs[n - 3])) >= 0.0 {
            let r = lin(xs[n - 2], rs[n - 2], xs[n - 1], rs[n - 1], 0.0);
            inf = inf.min(r);
            sup = sup.max(r);
        }
    }
    Ok((inf, sup))
}

/// Outcome of the sampled submultiplicativity check.
#[derive(Debug, Clone, Copy)]
pub struct SubmultReport {
    pub holds: bool,
    /// Worst observed `φ(s·t) / (φ(s)·φ(t))`.
    pub worst_c: f64,
}

/// Samples `(s, t)` pairs log-uniform in `[1e−3, 1e6]²` and checks
/// `φ(s·t) ≤ c·φ(s)·φ(t)` against the declared constant.
pub fn check_submultiplicative(phi: &YoungFunction, trials: usize, seed: u64) -> Result<SubmultReport> {
    if trials < 1 {
        return Err(Error::Parameter("trials must be ≥ 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (1e-3f64.ln(), 1e6f64.ln());
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let s = (rng.gen_range(lo..hi)).exp();
        let t = (rng.gen_range(lo..hi)).exp();
        let denom = phi.eval(s) * phi.eval(t);
        if denom <= 0.0 || !denom.is_finite() {
            continue;
        }
        let ratio = phi.eval(s * t) / denom;
        if ratio.is_finite() {
            worst = worst.max(ratio);
        }
    }
    Ok(SubmultReport { holds: worst <= phi.submult_c() * (1.0 + 1e-9), worst_c: worst })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_square() {
        let phi = YoungFunction::power(2.0).unwrap();
        assert!((young_inverse(&phi, 4.0).unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn inverse_at_one_is_one() {
        for phi in [
            YoungFunction::power(3.0).unwrap(),
            YoungFunction::p_log(2.0, 1.0).unwrap(),
            YoungFunction::p_log_alt(2.0, 1.0).unwrap(),
        ] {
            assert!((young_inverse(&phi, 1.0).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn inverse_vs_grid_scan_oracle() {
        // t(1+log t) = 2e has a root between 1 and e^2; scan a fine grid
        let phi = YoungFunction::p_log(1.0, 1.0).unwrap();
        let y = 2.0 * std::f64::consts::E;
        let t = young_inverse(&phi, y).unwrap();
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..2_000_000 {
            let cand = 1.0 + i as f64 * 5e-6;
            let err = (phi.eval(cand) - y).abs();
            if err < best.0 {
                best = (err, cand);
            }
        }
        assert!((t - best.1).abs() < 1e-5, "bisection {t} vs scan {}", best.1);
    }

    #[test]
    fn inverse_overflow_cap() {
        let phi = YoungFunction::power(1.0).unwrap();
        assert!(matches!(young_inverse(&phi, 1e13), Err(Error::OverflowRange { .. })));
    }

    #[test]
    fn inverse_roundtrip_log_grid() {
        let phi = YoungFunction::p_log(2.0, 1.0).unwrap();
        for &t in &log_spaced(1e-6, 1e3, 60) {
            let y = phi.eval(t);
            let back = young_inverse(&phi, y).unwrap();
            assert!((back - t).abs() <= 1e-8 * t.max(1.0), "t = {t}, back = {back}");
        }
    }

    #[test]
    fn growth_bounds_power_is_constant() {
        let phi = YoungFunction::power(3.0).unwrap();
        let (lo, hi) = growth_bounds(&phi, 1e6, 200).unwrap();
        assert!((lo - 3.0).abs() < 1e-12 && (hi - 3.0).abs() < 1e-12);
    }

    #[test]
    fn growth_bounds_plog_match_analytic() {
        let phi = YoungFunction::p_log(2.0, 1.0).unwrap();
        let (lo, hi) = growth_bounds(&phi, 1e9, 1000).unwrap();
        assert!((lo - 2.0).abs() < 1e-3, "inf = {lo}");
        assert!((hi - 3.0).abs() < 1e-3, "sup = {hi}");
    }

    #[test]
    fn growth_bounds_alt_vs_dense_grid() {
        let phi = YoungFunction::p_log_alt(2.0, 1.0).unwrap();
        let (lo, hi) = growth_bounds(&phi, 1e9, 2000).unwrap();
        // independent dense-grid oracle with its own extrapolation in 1/(1+log t)
        let ts = log_spaced(1.0, 1e9, 20_000);
        let ratio: Vec<f64> = ts.iter().map(|&t| t * phi.deriv(t) / phi.eval(t)).collect();
        let xs: Vec<f64> = ts.iter().map(|&t| 1.0 / (1.0 + t.ln())).collect();
        let n = ratio.len();
        let ext_inf = ratio[n - 1]
            + (ratio[n - 2] - ratio[n - 1]) * (0.0 - xs[n - 1]) / (xs[n - 2] - xs[n - 1]);
        let ext_sup = ratio[1] + (ratio[0] - ratio[1]) * (1.0 - xs[1]) / (xs[0] - xs[1]);
        let oracle_lo = ratio.iter().cloned().fold(f64::INFINITY, f64::min).min(ext_inf);
        let oracle_hi = ratio.iter().cloned().fold(f64::NEG_INFINITY, f64::max).max(ext_sup);
        assert!((lo - oracle_lo).abs() < 1e-3, "{lo} vs {oracle_lo}");
        assert!((hi - oracle_hi).abs() < 1e-3, "{hi} vs {oracle_hi}");
    }

    #[test]
    fn submultiplicativity_of_families() {
        let phi = YoungFunction::power(2.5).unwrap();
        let rep = check_submultiplicative(&phi, 500, 7).unwrap();
        assert!(rep.holds && (rep.worst_c - 1.0).abs() < 1e-9);

        let phi = YoungFunction::p_log(2.0, 1.0).unwrap();
        let rep = check_submultiplicative(&phi, 500, 7).unwrap();
        assert!(rep.holds && rep.worst_c <= 1.0 + 1e-9);

        let phi = YoungFunction::p_log_alt(2.0, 1.0).unwrap();
        let rep = check_submultiplicative(&phi, 500, 7).unwrap();
        assert!(rep.holds, "worst {} vs c {}", rep.worst_c, phi.submult_c());
        assert!(rep.worst_c > 1.0, "alt family should be quasi-submultiplicative only");
    }

    #[test]
    fn constructor_rejects_bad_normalization() {
        let r = YoungFunction::custom("bad", |t| t * t + 0.5, None, 1e-6, 1.0);
        assert!(matches!(r, Err(Error::MalformedYoung(_))));
    }

    #[test]
    fn deriv_matches_finite_differences() {
        for phi in [
            YoungFunction::power(2.7).unwrap(),
            YoungFunction::p_log(2.0, 1.5).unwrap(),
            YoungFunction::p_log_alt(3.0, 0.5).unwrap(),
        ] {
            for &t in &log_spaced(0.5, 100.0, 30) {
                if (t - 1.0).abs() < 1e-3 {
                    continue; // plog has a derivative kink at t = 1
                }
                let h = 1e-6 * t;
                let fd = (phi.eval(t + h) - phi.eval(t - h)) / (2.0 * h);
                let an = phi.deriv(t);
                assert!((fd - an).abs() <= 1e-5 * an.abs().max(1.0), "{}: t={t} fd={fd} an={an}", phi.name());
            }
        }
    }
}
