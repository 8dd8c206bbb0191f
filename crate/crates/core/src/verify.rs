//! The verification suites behind the `verify` command: each suite runs
//! a family of inequality checks and reports per-check records suitable
//! for machine-readable JSON output.

use std::sync::Arc;

use serde::Serialize;

use crate::constants::{
    chebyshev_chain, laplace_bound, orlicz_constant, theorem_constant, variable_cn,
    variable_jn_constant, Bijection, JNParams,
};
use crate::error::{Error, Result};
use crate::functionals::{
    ainfty_char_profile, check_wr_properties, fujii_wilson, CubeFunctional, PsiCandidate,
};
use crate::grid::{CellFunction, CellMeasure, Grid};
use crate::norms::{lp_norm, luxemburg_norm, ExponentFunction, LocalNormSpec, NormFamily};
use crate::oscillation::{bmo_norm, cz_decompose, jn_tail, sparse_dominate, sup_localized_oscillation};
use crate::testfns::{log_reciprocal_unit, power_weight, random_step, recursive_split_measure};
use crate::young::{growth_bounds, young_inverse, YoungFunction};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Measured once on the committed implementation, asserted stable since:
/// the ratio of the transform-based decay bound to the optimizer value
/// for the power family, over p in 2..=32.
const LAPLACE_TO_THEOREM_BAND: (f64, f64) = (0.25, 0.65);

/// Fujii–Wilson constants of the 1D power weights x^δ at depth 10 with
/// the weight-mass normalizer, frozen as reference values (±1e−6).
const POWER_WEIGHT_GOLDENS: [(f64, f64); 4] = [
    (0.0, 1.0),
    (-0.3, 1.2982856619581833),
    (-0.6, 1.9983498250593761),
    (-0.9, 4.2331815432282420),
];

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub paper_ref: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub checks: Vec<CheckRecord>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub quick: bool,
    pub suites: Vec<SuiteReport>,
    pub pass: bool,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }
}

fn rec(name: &str, paper_ref: &str, value: f64, bound: f64, pass: bool) -> CheckRecord {
    CheckRecord { name: name.into(), paper_ref: paper_ref.into(), value, bound, pass }
}

fn finish(name: &str, mut checks: Vec<CheckRecord>) -> SuiteReport {
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    SuiteReport { name: name.into(), checks }
}

pub const SUITE_NAMES: [&str; 13] = [
    "czd",
    "fujii-wilson",
    "jn-tail",
    "laplace",
    "lp-sharp",
    "luxemburg",
    "profile",
    "sparse",
    "subcube",
    "theorem",
    "variable",
    "wr",
    "young",
];

/// Runs the named suites (or all of them) and assembles the report.
pub fn run_suites(names: &[String], seed: u64, quick: bool) -> Result<VerifyReport> {
    let mut selected: Vec<&str> = if names.is_empty() || names.iter().any(|n| n == "all") {
        SUITE_NAMES.to_vec()
    } else {
        let mut v = Vec::new();
        for n in names {
            if !SUITE_NAMES.contains(&n.as_str()) {
                return Err(Error::Parameter(format!(
                    "unknown suite {n:?}; known: {}",
                    SUITE_NAMES.join(", ")
                )));
            }
            v.push(n.as_str());
        }
        v
    };
    selected.sort_unstable();
    selected.dedup();
    let mut suites = Vec::new();
    for name in selected {
        let suite = match name {
            "czd" => suite_czd(seed, quick)?,
            "fujii-wilson" => suite_fujii_wilson(quick)?,
            "jn-tail" => suite_jn_tail(quick)?,
            "laplace" => suite_laplace(quick)?,
            "lp-sharp" => suite_lp_sharp(quick)?,
            "luxemburg" => suite_luxemburg(seed, quick)?,
            "profile" => suite_profile(seed, quick)?,
            "sparse" => suite_sparse(quick)?,
            "subcube" => suite_subcube(seed, quick)?,
            "theorem" => suite_theorem()?,
            "variable" => suite_variable(seed, quick)?,
            "wr" => suite_wr(seed, quick)?,
            _ => suite_young(quick)?,
        };
        suites.push(suite);
    }
    let pass = suites.iter().all(|s| s.pass());
    Ok(VerifyReport { seed, quick, suites, pass })
}

fn lebesgue_setup(depth: u32) -> (Arc<Grid>, Arc<CellMeasure>, CellFunction) {
    let grid = Grid::unit(1, depth);
    let measure = Arc::new(CellMeasure::lebesgue(grid.clone()));
    let f = log_reciprocal_unit(depth);
    (grid, measure, f)
}

/// Orlicz-norm sharp bound and the linear-in-p rate of the supremum.
fn suite_lp_sharp(quick: bool) -> Result<SuiteReport> {
    let depth = if quick { 9 } else { 14 };
    let max_level = if quick { 5 } else { 8 };
    let (_, measure, f) = lebesgue_setup(depth);
    let min_level = depth - max_level;
    let (bmo, _) = bmo_norm(&f, &measure, min_level)?;
    let mut checks = Vec::new();
    for &p in &[1.0, 2.0, 4.0, 8.0] {
        for &alpha in &[0.0, 1.0] {
            let phi = YoungFunction::p_log(p, alpha)?;
            let spec = LocalNormSpec::with_measure_functional(
                NormFamily::Orlicz(phi),
                measure.clone(),
            );
            let (x, _) = sup_localized_oscillation(&f, &spec, &measure, min_level)?;
            // c_μ·2^{n_μ} = 2 for 1D Lebesgue cells
            let bound = 2.0 * std::f64::consts::E * 2f64.powf(alpha) * (p + alpha + 1.0);
            checks.push(rec(
                &format!("orlicz-sup-p{p}-a{alpha}"),
                "Corollary 1.3",
                x * bmo,
                bound * bmo,
                x <= bound,
            ));
        }
    }
    // linear rate: max over p of X(p)/p within factor 3 of the min. The
    // L^64 value only escapes range saturation on a deep grid (the cell
    // count bounds max|f − f_Q|, hence X(p), independently of p), so this
    // runs at depth 20; skipped under --quick.
    if !quick {
        let rate_depth = 20;
        let (_, rm, rf) = lebesgue_setup(rate_depth);
        let rate_min_level = rate_depth - 8;
        let mut ratios = Vec::new();
        for k in 1..=6u32 {
            let p = 2f64.powi(k as i32);
            let spec = LocalNormSpec::with_measure_functional(NormFamily::Lp(p), rm.clone());
            let (x, _) = sup_localized_oscillation(&rf, &spec, &rm, rate_min_level)?;
            ratios.push(x / p);
        }
        let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        checks.push(rec("lp-rate-spread", "Theorem A", max / min, 3.0, max / min <= 3.0));
    }
    Ok(finish("lp-sharp", checks))
}

/// Luxemburg norm of the power family coincides with the L^p average.
fn suite_luxemburg(seed: u64, quick: bool) -> Result<SuiteReport> {
    let trials = if quick { 20 } else { 100 };
    let grid = Grid::unit(1, 6);
    let measure = Arc::new(CellMeasure::lebesgue(grid.clone()));
    let mut checks = Vec::new();
    for &p in &[1.0, 2.0, 3.7] {
        let phi = YoungFunction::power(p)?;
        let spec = LocalNormSpec::with_measure_functional(
            NormFamily::Orlicz(phi.clone()),
            measure.clone(),
        );
        let mut worst = 0.0f64;
        for t in 0..trials {
            let f = random_step(grid.clone(), seed.wrapping_add(t as u64));
            let root = grid.root();
            let lux = luxemburg_norm(&f, &phi, &root, &spec)?;
            let lp = lp_norm(&f, &root, &spec, p)?;
            let rel = (lux - lp).abs() / lp.max(1e-300);
            worst = worst.max(rel);
        }
        checks.push(rec(
            &format!("luxemburg-vs-lp-p{p}"),
            "Definition of the Luxemburg norm",
            worst,
            1e-8,
            worst <= 1e-8,
        ));
    }
    Ok(finish("luxemburg", checks))
}

/// Stopping-time selection invariants on random step functions.
fn suite_czd(seed: u64, quick: bool) -> Result<SuiteReport> {
    let trials = if quick { 40 } else { 200 };
    let grid = Grid::unit(1, 8);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc2d);
    let mut sandwich = f64::INFINITY;
    let mut smallness = f64::INFINITY;
    let mut off_union = f64::INFINITY;
    for t in 0..trials {
        let measure: Arc<CellMeasure> = if t % 2 == 0 {
            Arc::new(CellMeasure::lebesgue(grid.clone()))
        } else {
            Arc::new(recursive_split_measure(grid.clone(), rng.gen(), 3.0)?)
        };
        let (c_mu, n_mu) = measure.doubling()?;
        let cap = c_mu * 2f64.powf(n_mu);
        let raw = random_step(grid.clone(), seed.wrapping_add(1000 + t as u64));
        let root = grid.root();
        let root_avg = measure.cube_average(&raw.map(f64::abs)?, &root)?;
        let g = raw.map(|v| v / root_avg.max(1e-300))?;
        for &l in &[2.0, 4.0, 8.0] {
            let cz = cz_decompose(&g, &root, &measure, l)?;
            let mut union = 0.0;
            for (q, &avg) in cz.selected.members.iter().zip(&cz.averages) {
                sandwich = sandwich.min(avg - l).min(cap * l - avg);
                union += measure.cube_mass(q)?;
            }
            let g_avg = measure.cube_average(&g.map(f64::abs)?, &root)?;
            smallness = smallness.min(measure.cube_mass(&root)? * g_avg / l - union);
            // cells off the union must sit at or below the level
            let mut covered = vec![false; grid.cell_count()];
            for q in &cz.selected.members {
                let (a, b) = grid.cell_range(q);
                covered[a..b].iter_mut().for_each(|c| *c = true);
            }
            for c in 0..grid.cell_count() {
                if !covered[c] && measure.masses()[c] > 0.0 {
                    off_union = off_union.min(l - g.values()[c].abs());
                }
            }
        }
    }
    let checks = vec![
        rec("sandwich-slack", "Theorem 1.2 proof, selection sandwich", sandwich, -1e-12, sandwich >= -1e-12),
        rec("smallness-slack", "Theorem 1.2 proof, key property of the cubes", smallness, -1e-12, smallness >= -1e-12),
        rec("off-union-slack", "Theorem 1.2 proof, off-union bound", off_union, -1e-12, off_union >= -1e-12),
    ];
    Ok(finish("czd", checks))
}

/// Closed forms of the power-log family: value at 1 + 1/p and growth
/// bounds.
fn suite_young(quick: bool) -> Result<SuiteReport> {
    let p_grid: Vec<f64> = (1..=64).map(|k| k as f64).collect();
    let a_grid: Vec<f64> = (0..=8).map(|k| k as f64).collect();
    let step = if quick { 4 } else { 1 };
    let mut worst_value = f64::NEG_INFINITY;
    let mut worst_b1 = 0.0f64;
    let mut worst_b2 = 0.0f64;
    for p in p_grid.iter().step_by(step) {
        for alpha in a_grid.iter().step_by(step) {
            let phi = YoungFunction::p_log(*p, *alpha)?;
            let cap = std::f64::consts::E * 2f64.powf(*alpha);
            worst_value = worst_value.max(phi.eval(1.0 + 1.0 / p) / cap - 1.0);
            let (b1, b2) = growth_bounds(&phi, 1e9, 400)?;
            worst_b1 = worst_b1.max((b1 - p).abs());
            worst_b2 = worst_b2.max((b2 - (p + alpha)).abs());
        }
    }
    let checks = vec![
        rec("value-at-1p", "Example 4.8", worst_value, 0.0, worst_value <= 0.0),
        rec("growth-lower", "Example 4.8", worst_b1, 1e-3, worst_b1 <= 1e-3),
        rec("growth-upper", "Example 4.8", worst_b2, 1e-3, worst_b2 <= 1e-3),
    ];
    Ok(finish("young", checks))
}

/// The level optimizer: calculus oracle at the identity, linear rate for
/// powers, and the closed-form cap for the power-log family.
fn suite_theorem() -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let (c, l) = theorem_constant(&Bijection::identity(), 1.0, 1.0, 1.0, 0.0)?;
    checks.push(rec("identity-value", "Theorem 1.2", c, 4.0, (c - 4.0).abs() <= 1e-5));
    checks.push(rec("identity-argmin", "Theorem 1.2", l, 2.0, (l - 2.0).abs() <= 1e-3));
    for &p in &[32.0, 128.0] {
        let (c, _) = theorem_constant(&Bijection::power(p)?, 1.0, 1.0, 1.0, 0.0)?;
        let ratio = c / p;
        let e = std::f64::consts::E;
        checks.push(rec(
            &format!("power-rate-p{p}"),
            "Theorem A",
            ratio,
            1.1 * e,
            (0.9 * e..=1.1 * e).contains(&ratio),
        ));
    }
    for &(p, alpha) in &[(2.0, 0.0), (2.0, 1.0), (4.0, 1.0)] {
        let phi = YoungFunction::p_log(p, alpha)?;
        let (c, _) = theorem_constant(&Bijection::orlicz(phi.clone()), 1.0, 1.0, 1.0, 1.0)?;
        // the closed-form cap for the power-log family, and its dominating
        // simple form 2e·2^α(p+α+1)
        let cap = orlicz_constant(&phi, phi.submult_c(), 1.0, 1.0)?
            .max(2.0 * std::f64::consts::E * 2f64.powf(alpha) * (p + alpha + 1.0));
        checks.push(rec(
            &format!("orlicz-cap-p{p}-a{alpha}"),
            "Corollary 1.3",
            c,
            cap,
            c <= cap,
        ));
    }
    Ok(finish("theorem", checks))
}

/// The transform bound against its factorial closed form, plus the
/// cross-method ratio band.
fn suite_laplace(quick: bool) -> Result<SuiteReport> {
    let jn = JNParams::default();
    let mut checks = Vec::new();
    for &p in &[2.0, 5.0, 10.0] {
        let phi = YoungFunction::power(p)?;
        let got = laplace_bound(&phi, &jn)?;
        let factorial: f64 = (1..=(p as u64)).map(|k| k as f64).product();
        let want = jn.c2 * (jn.c1 * factorial).powf(1.0 / p);
        let rel = (got - want).abs() / want;
        checks.push(rec(&format!("closed-form-p{p}"), "Section 1, transform bound", rel, 1e-6, rel <= 1e-6));
    }
    let ps: Vec<f64> = if quick { vec![2.0, 8.0, 32.0] } else { vec![2.0, 4.0, 8.0, 16.0, 32.0] };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &p in &ps {
        let phi = YoungFunction::power(p)?;
        let lb = laplace_bound(&phi, &jn)?;
        let (tc, _) = theorem_constant(&Bijection::power(p)?, 1.0, 1.0, 1.0, 0.0)?;
        let ratio = lb / tc;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    let in_band = lo >= LAPLACE_TO_THEOREM_BAND.0 && hi <= LAPLACE_TO_THEOREM_BAND.1;
    checks.push(rec("ratio-band-lo", "Section 1 vs Theorem 1.2", lo, LAPLACE_TO_THEOREM_BAND.0, in_band));
    checks.push(rec("ratio-band-hi", "Section 1 vs Theorem 1.2", hi, LAPLACE_TO_THEOREM_BAND.1, in_band));
    Ok(finish("laplace", checks))
}

/// Variable-exponent Chebyshev pairs and the end-to-end exponential tail.
fn suite_variable(seed: u64, quick: bool) -> Result<SuiteReport> {
    let depth = if quick { 8 } else { 10 };
    let (grid, measure, f) = lebesgue_setup(depth);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7a5);
    let mut p_values: Vec<f64> = (0..grid.cell_count()).map(|_| rng.gen_range(1.0..4.0)).collect();
    p_values[0] = 4.0; // pin the essential sup
    let pfun = ExponentFunction::new(CellFunction::new(grid.clone(), p_values)?)?;
    let root = grid.root();
    let mut checks = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for &t in &[1.0, 2.0, 4.0] {
        for &r in &[1.0, 2.0, 4.0] {
            let (lhs, rhs) = chebyshev_chain(&f, &pfun, &root, &measure, t, r)?;
            worst = worst.max(lhs - rhs);
        }
    }
    checks.push(rec("chebyshev-slack", "Section 4.2 chain", worst, 0.0, worst <= 0.0));

    let (bmo, _) = bmo_norm(&f, &measure, 1)?;
    let c_n = variable_cn(1.0, 1.0, pfun.p_plus())?;
    let rate = variable_jn_constant(c_n, pfun.p_plus())?;
    let avg = measure.cube_average(&f, &root)?;
    let g = f.map(|v| (v - avg).abs())?;
    let t_max = g.max_abs();
    let mut tail_worst = f64::NEG_INFINITY;
    let spec_measure = measure.clone();
    for k in 1..=24 {
        let t = t_max * k as f64 / 24.0;
        let indicator = g.map(|v| if v >= t { 1.0 } else { 0.0 })?;
        let lhs = crate::norms::variable_norm(&indicator, &pfun, &root, &spec_measure)?;
        let bound = 2.0 * (-rate * t / bmo).exp();
        tail_worst = tail_worst.max(lhs - bound);
    }
    checks.push(rec("exp-tail-slack", "Corollary 1.5", tail_worst, 0.0, tail_worst <= 0.0));
    Ok(finish("variable", checks))
}

/// The four comparison properties of the enlarged weight mass.
fn suite_wr(seed: u64, quick: bool) -> Result<SuiteReport> {
    let trials = if quick { 40 } else { 200 };
    let grid = Grid::unit(1, 6);
    let measure = recursive_split_measure(grid.clone(), seed ^ 0x3317, 3.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x88);
    let w = CellFunction::new(
        grid.clone(),
        (0..grid.cell_count()).map(|_| rng.gen_range(0.1..5.0)).collect(),
    )?;
    let mut checks = Vec::new();
    for &r in &[1.5, 2.0, 4.0] {
        let report = check_wr_properties(&w, &measure, r, trials, seed.wrapping_add(r as u64))?;
        let worst = report.worst();
        checks.push(rec(
            &format!("wr-properties-r{r}"),
            "Section 2 properties of w_r",
            worst,
            -1e-10,
            worst >= -1e-10,
        ));
    }
    Ok(finish("wr", checks))
}

/// Fujii–Wilson normalization and the power-weight reference sequence.
fn suite_fujii_wilson(quick: bool) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let grid = Grid::unit(1, 8);
    let measure = CellMeasure::lebesgue(grid.clone());
    let ones = CellFunction::constant(grid.clone(), 1.0);
    let y = CubeFunctional::measure(Arc::new(CellMeasure::lebesgue(grid.clone())));
    let (fw, _) = fujii_wilson(&ones, &y, &measure, 0)?;
    checks.push(rec("unit-weight", "Fujii–Wilson definition", fw, 1.0, fw == 1.0));

    let depth = if quick { 8 } else { 10 };
    let pg = Grid::unit(1, depth);
    let pm = CellMeasure::lebesgue(pg.clone());
    let mut prev = f64::NEG_INFINITY;
    let mut monotone = true;
    let mut golden_ok = true;
    for &(delta, golden) in &POWER_WEIGHT_GOLDENS {
        let w = power_weight(pg.clone(), delta)?;
        let y = CubeFunctional::weight_mass(&pm, &w)?;
        let (value, _) = fujii_wilson(&w, &y, &pm, 0)?;
        if value <= prev {
            monotone = false;
        }
        if !quick && (value - golden).abs() > 1e-6 {
            golden_ok = false;
        }
        checks.push(rec(
            &format!("power-weight-d{delta}"),
            "Fujii–Wilson definition",
            value,
            golden,
            true,
        ));
        prev = value;
    }
    checks.push(rec("power-weight-monotone", "A∞ degradation toward δ = −1", if monotone { 1.0 } else { 0.0 }, 1.0, monotone));
    checks.push(rec("power-weight-goldens", "reference values", if golden_ok { 1.0 } else { 0.0 }, 1.0, golden_ok));
    Ok(finish("fujii-wilson", checks))
}

/// The exact characteristic-profile identity for Orlicz localizations.
fn suite_profile(seed: u64, quick: bool) -> Result<SuiteReport> {
    let trials = if quick { 15 } else { 50 };
    let grid = Grid::unit(1, 8);
    let measure = Arc::new(CellMeasure::lebesgue(grid.clone()));
    let mut checks = Vec::new();
    for (label, phi) in [
        ("phi2", YoungFunction::power(2.0)?),
        ("phi21", YoungFunction::p_log(2.0, 1.0)?),
    ] {
        let spec = LocalNormSpec::with_measure_functional(
            NormFamily::Orlicz(phi.clone()),
            measure.clone(),
        );
        let candidate = PsiCandidate::Orlicz(phi.clone());
        let profile = ainfty_char_profile(&spec, &measure, &candidate, trials, seed ^ 0xaf)?;
        let mut worst = 0.0f64;
        for &(frac, value) in &profile.samples {
            let ideal = 1.0 / young_inverse(&phi, 1.0 / frac)?;
            worst = worst.max((value - ideal).abs());
        }
        checks.push(rec(
            &format!("orlicz-identity-{label}"),
            "Lemma 4.5",
            worst,
            1e-8,
            worst <= 1e-8,
        ));
    }
    Ok(finish("profile", checks))
}

/// The sparse family of the appendix lemma with its measured domination
/// constant.
fn suite_sparse(quick: bool) -> Result<SuiteReport> {
    let (d1, d2) = if quick { (9, 11) } else { (14, 16) };
    let mut c_doms = Vec::new();
    let mut worst_mass = f64::INFINITY;
    let mut disjoint = true;
    for &depth in &[d1, d2] {
        let (grid, measure, f) = lebesgue_setup(depth);
        let family = sparse_dominate(&f, &grid.root(), &measure, 2.0, 64)?;
        let mut seen = vec![false; grid.cell_count()];
        for (q, e) in family.members.iter().zip(&family.major_sets) {
            let mq = measure.cube_mass(q)?;
            let me = measure.cell_set_mass(e);
            worst_mass = worst_mass.min(2.0 * me - mq);
            for &c in e {
                if seen[c] {
                    disjoint = false;
                }
                seen[c] = true;
            }
        }
        c_doms.push(family.c_dom);
    }
    let drift = (c_doms[0] - c_doms[1]).abs() / c_doms[0].max(1e-300);
    let checks = vec![
        rec("half-mass-slack", "Lemma A.1", worst_mass, 0.0, worst_mass >= -1e-12),
        rec("major-sets-disjoint", "Lemma A.1", if disjoint { 1.0 } else { 0.0 }, 1.0, disjoint),
        rec("cdom-stability", "Lemma A.1, measured constant", drift, 0.1, drift <= 0.1),
    ];
    Ok(finish("sparse", checks))
}

/// Balanced-subcube extraction on random bounded-ratio measures.
fn suite_subcube(seed: u64, quick: bool) -> Result<SuiteReport> {
    let trials = if quick { 20 } else { 100 };
    let grid = Grid::unit(1, 10);
    let mut worst = f64::INFINITY;
    let mut eps_max = 0.0f64;
    for t in 0..trials {
        let measure = recursive_split_measure(grid.clone(), seed.wrapping_add(t as u64), 3.0)?;
        let (c_mu, _) = measure.doubling()?;
        let result = crate::grid::subcube_alpha(&measure, &grid.root())?;
        let m = result.alpha.min(1.0 - result.alpha);
        worst = worst.min(m - (1.0 / (4.0 * c_mu) - result.eps_cell));
        eps_max = eps_max.max(result.eps_cell);
    }
    let uniform = CellMeasure::lebesgue(grid.clone());
    let balanced = crate::grid::subcube_alpha(&uniform, &grid.root())?;
    let checks = vec![
        rec("alpha-slack", "subcube lemma", worst, 0.0, worst >= -1e-12),
        rec("eps-cell-max", "subcube lemma, resolution term", eps_max, 0.5, eps_max < 0.5),
        rec("uniform-exact-half", "subcube lemma", balanced.alpha, 0.5, balanced.alpha == 0.5),
    ];
    Ok(finish("subcube", checks))
}

/// Tail decay of the logarithmic exemplar against the analytic level-set
/// oracle, plus a fitted exponential slope.
fn suite_jn_tail(quick: bool) -> Result<SuiteReport> {
    let depth = if quick { 10 } else { 14 };
    let (grid, measure, f) = lebesgue_setup(depth);
    let root = grid.root();
    let avg = measure.cube_average(&f, &root)?;
    let slack = 2.0 * grid.cell_width();
    let mut worst = 0.0f64;
    for k in 1..=20 {
        let t = 0.4 * k as f64;
        let got = jn_tail(&f, &root, &measure, t)?;
        let oracle = (-(avg + t)).exp() + (1.0 - (-(avg - t)).exp()).max(0.0);
        worst = worst.max((got - oracle).abs() - slack);
    }
    let (bmo, _) = bmo_norm(&f, &measure, 1)?;
    // fitted slope of log tail over the window [t0, t1]
    let mut points = Vec::new();
    let floor = 10.0 / grid.cell_count() as f64;
    let mut t = bmo;
    loop {
        let tail = jn_tail(&f, &root, &measure, t)?;
        if tail <= floor {
            break;
        }
        points.push((t, tail.ln()));
        t += bmo / 2.0;
    }
    let n = points.len() as f64;
    let (sx, sy): (f64, f64) = points.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (sxx, sxy): (f64, f64) =
        points.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0 * p.0, b + p.0 * p.1));
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let b = -slope;
    let checks = vec![
        rec("oracle-slack", "Section 1, level sets of the logarithm", worst, 0.0, worst <= 0.0),
        rec("fitted-slope", "John–Nirenberg exponential decay", b, 0.0, b > 0.0),
    ];
    Ok(finish("jn-tail", checks))
}
