//! Localized norm families against a measure ν and a cube functional Y:
//! L^p and weak-L^p averages, Orlicz Luxemburg norms, weak-Orlicz
//! quasi-norms and variable-exponent Lebesgue norms.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::functionals::CubeFunctional;
use crate::grid::{CellFunction, CellMeasure, DyadicCube, Grid};
use crate::numeric::{bisect_decreasing, pairwise_sum};
use crate::young::YoungFunction;

/// Widening cap for Luxemburg brackets, relative to `max|f|`.
const BRACKET_CAP: f64 = 1e12;

/// An exponent function p(·) sampled per finest cell, with its exact
/// essential bounds `p⁻` and `p⁺`.
#[derive(Debug, Clone)]
pub struct ExponentFunction {
    values: CellFunction,
    p_minus: f64,
    p_plus: f64,
}

impl ExponentFunction {
    pub fn new(values: CellFunction) -> Result<ExponentFunction> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in values.values() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !(lo >= 1.0) || !hi.is_finite() {
            return Err(Error::Parameter(format!(
                "exponent function needs 1 ≤ p(x) < ∞; observed range [{lo}, {hi}]"
            )));
        }
        Ok(ExponentFunction { values, p_minus: lo, p_plus: hi })
    }

    pub fn constant(grid: Arc<Grid>, p: f64) -> Result<ExponentFunction> {
        ExponentFunction::new(CellFunction::constant(grid, p))
    }

    pub fn values(&self) -> &CellFunction {
        &self.values
    }

    pub fn p_minus(&self) -> f64 {
        self.p_minus
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }

    /// The exponent `s·p(·)`; requires `s·p⁻ ≥ 1`.
    pub fn scaled(&self, s: f64) -> Result<ExponentFunction> {
        ExponentFunction::new(self.values.map(|p| s * p)?)
    }
}

/// Which localized family a `LocalNormSpec` evaluates.
#[derive(Debug, Clone)]
pub enum NormFamily {
    Lp(f64),
    WeakLp(f64),
    Orlicz(YoungFunction),
    WeakOrlicz(YoungFunction),
    Variable(ExponentFunction),
}

impl NormFamily {
    /// Quasi-triangle geometric constant K: 2 for the weak families, 1 else.
    pub fn geom_k(&self) -> f64 {
        match self {
            NormFamily::WeakLp(_) | NormFamily::WeakOrlicz(_) => 2.0,
            _ => 1.0,
        }
    }

    pub fn name(&self) -> String {
        match self {
            NormFamily::Lp(p) => format!("lp:{p}"),
            NormFamily::WeakLp(p) => format!("weak-lp:{p}"),
            NormFamily::Orlicz(phi) => format!("orlicz:{}", phi.name()),
            NormFamily::WeakOrlicz(phi) => format!("weak-orlicz:{}", phi.name()),
            NormFamily::Variable(p) => format!("variable:p-:{}:p+:{}", p.p_minus(), p.p_plus()),
        }
    }
}

/// A localized norm: family + measure ν (possibly a materialized w·dμ) +
/// cube functional Y + the family's geometric constant.
#[derive(Debug, Clone)]
pub struct LocalNormSpec {
    pub family: NormFamily,
    pub measure: Arc<CellMeasure>,
    pub functional: CubeFunctional,
    pub geom_k: f64,
}

impl LocalNormSpec {
    /// Builds the spec and asserts the average property precondition
    /// `ν(Q) ≤ Y(Q)` on every dyadic cube of the grid.
    pub fn new(
        family: NormFamily,
        measure: Arc<CellMeasure>,
        functional: CubeFunctional,
    ) -> Result<LocalNormSpec> {
        let grid = measure.grid().clone();
        for cube in grid.cubes_up_to(grid.depth()) {
            let nu = measure.cube_mass(&cube)?;
            let y = functional.value(&cube)?;
            if nu > y * (1.0 + 1e-12) {
                return Err(Error::Parameter(format!(
                    "average property violated: ν(Q) = {nu} > Y(Q) = {y} at level {}",
                    cube.level
                )));
            }
        }
        let geom_k = family.geom_k();
        Ok(LocalNormSpec { family, measure, functional, geom_k })
    }

    /// Spec with Y(Q) = ν(Q), the paper's default localization.
    pub fn with_measure_functional(family: NormFamily, measure: Arc<CellMeasure>) -> LocalNormSpec {
        let geom_k = family.geom_k();
        let functional = CubeFunctional::measure(measure.clone());
        LocalNormSpec { family, measure, functional, geom_k }
    }

    /// Dispatches to the family's norm.
    pub fn norm(&self, f: &CellFunction, cube: &DyadicCube) -> Result<f64> {
        match &self.family {
            NormFamily::Lp(p) => lp_norm(f, cube, self, *p),
            NormFamily::WeakLp(p) => weak_lp_norm(f, cube, self, *p),
            NormFamily::Orlicz(phi) => luxemburg_norm(f, phi, cube, self),
            NormFamily::WeakOrlicz(phi) => weak_orlicz_norm(f, phi, cube, &self.measure),
            NormFamily::Variable(pfun) => variable_norm(f, pfun, cube, &self.measure),
        }
    }
}

fn functional_value(spec: &LocalNormSpec, cube: &DyadicCube) -> Result<f64> {
    let y = spec.functional.value(cube)?;
    if y <= 0.0 {
        return Err(Error::Functional { value: y });
    }
    Ok(y)
}

/// `((1/Y(Q)) ∫_Q |f|^p dν)^{1/p}`.
pub fn lp_norm(f: &CellFunction, cube: &DyadicCube, spec: &LocalNormSpec, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Parameter(format!("lp_norm requires p ≥ 1, got {p}")));
    }
    let y = functional_value(spec, cube)?;
    let grid = spec.measure.grid();
    grid.check_cube(cube)?;
    let (a, b) = grid.cell_range(cube);
    let masses = spec.measure.masses();
    let terms: Vec<f64> = (a..b)
        .map(|i| f.values()[i].abs().powf(p) * masses[i])
        .collect();
    Ok((pairwise_sum(&terms) / y).powf(1.0 / p))
}

/// Sorted distinct |f| values on the cube with cumulative ν({|f| ≥ v}) masses,
/// descending in v. The exact distribution of a cell function is a step
/// function, so weak-norm suprema reduce to this finite list.
pub(crate) fn distribution(
    f: &CellFunction,
    cube: &DyadicCube,
    measure: &CellMeasure,
) -> Vec<(f64, f64)> {
    let grid = measure.grid();
    let (a, b) = grid.cell_range(cube);
    let mut cells: Vec<(f64, f64)> = (a..b)
        .map(|i| (f.values()[i].abs(), measure.masses()[i]))
        .filter(|&(v, m)| v > 0.0 && m > 0.0)
        .collect();
    cells.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut cum = 0.0;
    for (v, m) in cells {
        cum += m;
        match out.last_mut() {
            Some(last) if last.0 == v => last.1 = cum,
            _ => out.push((v, cum)),
        }
    }
    out
}

/// `sup_t t · (ν({|f| > t} ∩ Q)/Y(Q))^{1/p}`, exact by threshold enumeration.
pub fn weak_lp_norm(f: &CellFunction, cube: &DyadicCube, spec: &LocalNormSpec, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::Parameter(format!("weak_lp_norm requires p > 0, got {p}")));
    }
    let y = functional_value(spec, cube)?;
    let dist = distribution(f, cube, &spec.measure, );
    let mut best = 0.0f64;
    for &(v, mass_ge) in &dist {
        best = best.max(v * (mass_ge / y).powf(1.0 / p));
    }
    Ok(best)
}

/// The Orlicz modular `(1/Y(Q)) ∫_Q φ(|f|/λ) dν`.
pub fn orlicz_modular(
    f: &CellFunction,
    phi: &YoungFunction,
    cube: &DyadicCube,
    spec: &LocalNormSpec,
    lambda: f64,
) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Parameter(format!("modular requires λ > 0, got {lambda}")));
    }
    let y = functional_value(spec, cube)?;
    let grid = spec.measure.grid();
    grid.check_cube(cube)?;
    let (a, b) = grid.cell_range(cube);
    let masses = spec.measure.masses();
    let mut terms = Vec::with_capacity(b - a);
    for i in a..b {
        if masses[i] == 0.0 {
            terms.push(0.0);
            continue;
        }
        let v = phi.eval(f.values()[i].abs() / lambda);
        if !v.is_finite() {
            return Err(Error::OverflowRange { cap: BRACKET_CAP });
        }
        terms.push(v * masses[i]);
    }
    Ok(pairwise_sum(&terms) / y)
}

fn max_abs_on_support(f: &CellFunction, cube: &DyadicCube, measure: &CellMeasure) -> f64 {
    let (a, b) = measure.grid().cell_range(cube);
    (a..b)
        .filter(|&i| measure.masses()[i] > 0.0)
        .fold(0.0f64, |m, i| m.max(f.values()[i].abs()))
}

/// Shared bracket + bisection for `inf{λ > 0 : modular(λ) ≤ 1}` over a
/// continuous non-increasing modular. `hi0` must make the modular finite.
fn luxemburg_solve(modular: impl Fn(f64) -> Result<f64>, hi0: f64) -> Result<f64> {
    let mut hi = hi0;
    let cap = hi0 * BRACKET_CAP;
    while modular(hi)? > 1.0 {
        hi *= 2.0;
        if hi > cap {
            return Err(Error::OverflowRange { cap });
        }
    }
    let mut lo = hi;
    loop {
        let next = lo / 2.0;
        match modular(next) {
            Ok(m) if m <= 1.0 => {
                lo = next;
                hi = next;
                if lo < hi0 * 1e-18 {
                    // modular stays ≤ 1 down to numerically zero λ
                    return Ok(0.0);
                }
            }
            _ => {
                lo = next;
                break;
            }
        }
    }
    Ok(bisect_decreasing(
        |lam| modular(lam).map(|m| m - 1.0).unwrap_or(f64::INFINITY),
        lo,
        hi,
        1e-10,
    ))
}

/// The local Luxemburg norm `inf{λ > 0 : (1/Y(Q)) ∫_Q φ(|f|/λ) dν ≤ 1}`.
/// At the returned λ the modular lies in `[1 − 1e−6, 1]`.
pub fn luxemburg_norm(
    f: &CellFunction,
    phi: &YoungFunction,
    cube: &DyadicCube,
    spec: &LocalNormSpec,
) -> Result<f64> {
    let m = max_abs_on_support(f, cube, &spec.measure);
    if m == 0.0 {
        return Ok(0.0);
    }
    luxemburg_solve(|lam| orlicz_modular(f, phi, cube, spec, lam), m)
}

/// Weak-Orlicz quasi-norm
/// `inf{λ : sup_t φ(t)·ν({|f| > λt} ∩ Q)/ν(Q) ≤ 1}`; the inner sup is
/// exact by threshold enumeration.
pub fn weak_orlicz_norm(
    f: &CellFunction,
    phi: &YoungFunction,
    cube: &DyadicCube,
    measure: &CellMeasure,
) -> Result<f64> {
    let nu_q = measure.cube_mass(cube)?;
    if nu_q <= 0.0 {
        return Err(Error::DegenerateMeasure);
    }
    let m = max_abs_on_support(f, cube, measure);
    if m == 0.0 {
        return Ok(0.0);
    }
    let dist = distribution(f, cube, measure);
    let inner = |lam: f64| -> Result<f64> {
        let mut best = 0.0f64;
        for &(v, mass_ge) in &dist {
            let val = phi.eval(v / lam) * mass_ge / nu_q;
            if !val.is_finite() {
                return Err(Error::OverflowRange { cap: BRACKET_CAP });
            }
            best = best.max(val);
        }
        Ok(best)
    };
    luxemburg_solve(inner, m)
}

/// The variable-exponent modular `(1/ν(Q)) ∫_Q (|f|/λ)^{p(x)} dν`.
pub fn variable_modular(
    f: &CellFunction,
    pfun: &ExponentFunction,
    cube: &DyadicCube,
    measure: &CellMeasure,
    lambda: f64,
) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Parameter(format!("modular requires λ > 0, got {lambda}")));
    }
    let nu_q = measure.cube_mass(cube)?;
    if nu_q <= 0.0 {
        return Err(Error::DegenerateMeasure);
    }
    let grid = measure.grid();
    let (a, b) = grid.cell_range(cube);
    let masses = measure.masses();
    let ps = pfun.values().values();
    let mut terms = Vec::with_capacity(b - a);
    for i in a..b {
        if masses[i] == 0.0 {
            terms.push(0.0);
            continue;
        }
        let v = (f.values()[i].abs() / lambda).powf(ps[i]);
        if !v.is_finite() {
            return Err(Error::OverflowRange { cap: BRACKET_CAP });
        }
        terms.push(v * masses[i]);
    }
    Ok(pairwise_sum(&terms) / nu_q)
}

/// Variable-exponent Luxemburg norm over `(Q, dν/ν(Q))`.
pub fn variable_norm(
    f: &CellFunction,
    pfun: &ExponentFunction,
    cube: &DyadicCube,
    measure: &CellMeasure,
) -> Result<f64> {
    let m = max_abs_on_support(f, cube, measure);
    if m == 0.0 {
        return Ok(0.0);
    }
    luxemburg_solve(|lam| variable_modular(f, pfun, cube, measure, lam), m)
}
