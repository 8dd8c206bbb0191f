//! Cube functionals Y and the A∞-type conditions built on them: the w_r
//! functional with its comparison properties, the dyadic local maximal
//! operator, the Fujii–Wilson constant, the SD smallness condition,
//! characteristic-family A∞ profiles and the embedding constant.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{CellFunction, CellMeasure, DyadicCube};
use crate::norms::LocalNormSpec;
use crate::numeric::pairwise_sum;
use crate::oscillation::{admissible_cubes, bmo_norm};
use crate::young::{young_inverse, YoungFunction};

/// A positive functional Q ↦ Y(Q) on the dyadic cubes of a grid.
#[derive(Debug, Clone)]
pub enum CubeFunctional {
    /// Y(Q) = μ(Q).
    Measure(Arc<CellMeasure>),
    /// Y(Q) = w(Q) = ∫_Q w dμ, held as the materialized measure w·dμ.
    WeightMass(Arc<CellMeasure>),
    /// Y(Q) = w_r(Q) = μ(Q)^{1/r'}·(∫_Q w^r dμ)^{1/r}.
    Wr {
        base: Arc<CellMeasure>,
        /// Materialized w^r·dμ.
        wr_pow: Arc<CellMeasure>,
        r: f64,
        r_conj: f64,
    },
    /// Explicit per-cube table.
    Table(BTreeMap<DyadicCube, f64>),
}

impl CubeFunctional {
    pub fn measure(m: Arc<CellMeasure>) -> CubeFunctional {
        CubeFunctional::Measure(m)
    }

    pub fn weight_mass(base: &CellMeasure, w: &CellFunction) -> Result<CubeFunctional> {
        Ok(CubeFunctional::WeightMass(Arc::new(base.weighted(w)?)))
    }

    pub fn wr(base: Arc<CellMeasure>, w: &CellFunction, r: f64) -> Result<CubeFunctional> {
        if !(r > 1.0) {
            return Err(Error::Parameter(format!("w_r needs r > 1, got {r}")));
        }
        let wr_pow = Arc::new(base.weighted(&w.map(|v| v.abs().powf(r))?)?);
        Ok(CubeFunctional::Wr { base, wr_pow, r, r_conj: r / (r - 1.0) })
    }

    pub fn table(map: BTreeMap<DyadicCube, f64>) -> CubeFunctional {
        CubeFunctional::Table(map)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            CubeFunctional::Measure(_) => "measure",
            CubeFunctional::WeightMass(_) => "weight-mass",
            CubeFunctional::Wr { .. } => "wr",
            CubeFunctional::Table(_) => "table",
        }
    }

    pub fn value(&self, cube: &DyadicCube) -> Result<f64> {
        match self {
            CubeFunctional::Measure(m) => m.cube_mass(cube),
            CubeFunctional::WeightMass(wm) => wm.cube_mass(cube),
            CubeFunctional::Wr { base, wr_pow, r, r_conj } => {
                let mu = base.cube_mass(cube)?;
                let pw = wr_pow.cube_mass(cube)?;
                Ok(mu.powf(1.0 / r_conj) * pw.powf(1.0 / r))
            }
            CubeFunctional::Table(map) => map
                .get(cube)
                .copied()
                .ok_or_else(|| Error::Parameter("cube missing from functional table".into())),
        }
    }
}

/// `w_r(Q) = μ(Q)^{1/r'}·(∫_Q w^r dμ)^{1/r}` with `1/r' = 1 − 1/r`.
pub fn wr_value(w: &CellFunction, measure: &CellMeasure, cube: &DyadicCube, r: f64) -> Result<f64> {
    if !(r > 1.0) {
        return Err(Error::Parameter(format!("w_r needs r > 1, got {r}")));
    }
    let mu = measure.cube_mass(cube)?;
    if mu <= 0.0 {
        return Err(Error::DegenerateMeasure);
    }
    let integral = measure.cube_integral(&w.map(|v| v.abs().powf(r))?, cube)?;
    Ok(mu.powf(1.0 - 1.0 / r) * integral.powf(1.0 / r))
}

/// `w_r` over an arbitrary set of finest cells.
fn wr_set_value(w: &CellFunction, measure: &CellMeasure, cells: &[usize], r: f64) -> f64 {
    let mu = measure.cell_set_mass(cells);
    let terms: Vec<f64> = cells
        .iter()
        .map(|&c| w.values()[c].abs().powf(r) * measure.masses()[c])
        .collect();
    mu.powf(1.0 - 1.0 / r) * pairwise_sum(&terms).powf(1.0 / r)
}

fn set_integral(w: &CellFunction, measure: &CellMeasure, cells: &[usize]) -> f64 {
    let terms: Vec<f64> = cells.iter().map(|&c| w.values()[c] * measure.masses()[c]).collect();
    pairwise_sum(&terms)
}

/// Worst signed slacks of the four w_r comparison properties and the
/// A∞ consequence; a property holds on the sample when its slack ≥ 0
/// (up to round-off).
#[derive(Debug, Clone)]
pub struct WrReport {
    /// w_r(E) − w(E).
    pub jensen: f64,
    /// (μ(E)/μ(F))^{1/r'}·w_r(F) − w_r(E) for E ⊂ F.
    pub relative: f64,
    /// w_r(∪E_j) − ∑ w_r(E_j) for disjoint E_j.
    pub superadditive: f64,
    /// w_r(F) − w_r(E) for E ⊂ F.
    pub monotone: f64,
    /// (μ(∪Q_j)/μ(Q))^{1/r'} − ∑ w_r(Q_j)/w_r(Q) over dyadic antichains.
    pub ainfty: f64,
    pub trials: usize,
}

impl WrReport {
    pub fn worst(&self) -> f64 {
        self.jensen
            .min(self.relative)
            .min(self.superadditive)
            .min(self.monotone)
            .min(self.ainfty)
    }
}

/// Random non-empty subset of `cells`, each kept with probability `p`.
fn random_subset(cells: &[usize], p: f64, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut out: Vec<usize> = cells.iter().copied().filter(|_| rng.gen::<f64>() < p).collect();
    if out.is_empty() {
        out.push(cells[rng.gen_range(0..cells.len())]);
    }
    out
}

/// A random antichain of strict dyadic subcubes of `parent`: a level is
/// drawn uniformly below `parent`, then each positive-mass cube at that
/// level is kept with a uniformly drawn inclusion probability.
pub fn random_antichain(
    measure: &CellMeasure,
    parent: &DyadicCube,
    rng: &mut ChaCha8Rng,
) -> Vec<DyadicCube> {
    let grid = measure.grid();
    let dim = grid.dim();
    let level = rng.gen_range(parent.level + 1..=grid.depth());
    let span = dim * (level - parent.level);
    let base = parent.morton() << span;
    let theta: f64 = rng.gen();
    let mut out = Vec::new();
    for m in 0..(1u64 << span) {
        let q = DyadicCube::from_morton(level, base + m, dim);
        if measure.cube_mass(&q).map(|v| v > 0.0).unwrap_or(false) && rng.gen::<f64>() < theta {
            out.push(q);
        }
    }
    if out.is_empty() {
        let m = rng.gen_range(0..(1u64 << span));
        let q = DyadicCube::from_morton(level, base + m, dim);
        if measure.cube_mass(&q).map(|v| v > 0.0).unwrap_or(false) {
            out.push(q);
        }
    }
    out
}

fn random_positive_cube(measure: &CellMeasure, rng: &mut ChaCha8Rng, max_level: u32) -> DyadicCube {
    let grid = measure.grid();
    loop {
        let level = rng.gen_range(0..=max_level);
        let m = rng.gen_range(0..grid.cubes_at_level(level) as u64);
        let q = DyadicCube::from_morton(level, m, grid.dim());
        if measure.cube_mass(&q).map(|v| v > 0.0).unwrap_or(false) {
            return q;
        }
    }
}

/// Checks the four w_r properties plus the A∞ consequence on random
/// nested and disjoint draws; returns the worst slack per property.
pub fn check_wr_properties(
    w: &CellFunction,
    measure: &CellMeasure,
    r: f64,
    trials: usize,
    seed: u64,
) -> Result<WrReport> {
    if trials == 0 {
        return Err(Error::Parameter("property check needs trials ≥ 1".into()));
    }
    if !(r > 1.0) {
        return Err(Error::Parameter(format!("w_r needs r > 1, got {r}")));
    }
    let grid = measure.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = WrReport {
        jensen: f64::INFINITY,
        relative: f64::INFINITY,
        superadditive: f64::INFINITY,
        monotone: f64::INFINITY,
        ainfty: f64::INFINITY,
        trials,
    };
    let positive_cells: Vec<usize> =
        (0..grid.cell_count()).filter(|&c| measure.masses()[c] > 0.0).collect();
    if positive_cells.is_empty() {
        return Err(Error::DegenerateMeasure);
    }
    for _ in 0..trials {
        let f_set = random_subset(&positive_cells, 0.7, &mut rng);
        let e_set = random_subset(&f_set, 0.5, &mut rng);
        let wr_e = wr_set_value(w, measure, &e_set, r);
        let wr_f = wr_set_value(w, measure, &f_set, r);
        let mu_e = measure.cell_set_mass(&e_set);
        let mu_f = measure.cell_set_mass(&f_set);
        report.jensen = report.jensen.min(wr_e - set_integral(w, measure, &e_set));
        report.relative = report.relative.min((mu_e / mu_f).powf(1.0 - 1.0 / r) * wr_f - wr_e);
        report.monotone = report.monotone.min(wr_f - wr_e);

        // disjoint split of a fresh subset into up to 4 parts
        let union = random_subset(&positive_cells, 0.6, &mut rng);
        let parts = rng.gen_range(2..=4usize);
        let mut pieces: Vec<Vec<usize>> = vec![Vec::new(); parts];
        for &c in &union {
            pieces[rng.gen_range(0..parts)].push(c);
        }
        let sum: f64 = pieces
            .iter()
            .filter(|p| !p.is_empty())
            .map(|p| wr_set_value(w, measure, p, r))
            .sum();
        report.superadditive = report.superadditive.min(wr_set_value(w, measure, &union, r) - sum);

        // A∞ consequence over a dyadic antichain
        let parent = random_positive_cube(measure, &mut rng, grid.depth().saturating_sub(1));
        let chain = random_antichain(measure, &parent, &mut rng);
        if chain.is_empty() {
            continue;
        }
        let wr_q = wr_value(w, measure, &parent, r)?;
        let mut sum_ratio = 0.0;
        let mut union_mass = 0.0;
        for q in &chain {
            sum_ratio += wr_value(w, measure, q, r)? / wr_q;
            union_mass += measure.cube_mass(q)?;
        }
        let frac = union_mass / measure.cube_mass(&parent)?;
        report.ainfty = report.ainfty.min(frac.powf(1.0 - 1.0 / r) - sum_ratio);
    }
    Ok(report)
}

/// Dyadic local maximal function of `w` on `cube` against a materialized
/// measure: running max of w-averages down the subtree, O(cells·depth).
fn local_maximal_with(
    w_times_mu: &CellMeasure,
    measure: &CellMeasure,
    cube: &DyadicCube,
) -> Result<Vec<f64>> {
    let grid = measure.grid();
    grid.check_cube(cube)?;
    let (a, b) = grid.cell_range(cube);
    let mut out = vec![0.0f64; b - a];
    let mut stack: Vec<(DyadicCube, f64)> = vec![(cube.clone(), f64::NEG_INFINITY)];
    while let Some((q, inherited)) = stack.pop() {
        let mass = measure.cube_mass(&q)?;
        let running = if mass > 0.0 {
            inherited.max(w_times_mu.cube_mass(&q)? / mass)
        } else {
            inherited
        };
        if q.level == grid.depth() {
            out[q.morton() as usize - a] = running.max(0.0);
        } else {
            for child in q.children(grid.dim()) {
                stack.push((child, running));
            }
        }
    }
    Ok(out)
}

/// `M_μ(w·χ_Q)` restricted to dyadic subcubes of `cube`, as a full-grid
/// cell function that vanishes outside `cube`.
pub fn local_maximal(w: &CellFunction, cube: &DyadicCube, measure: &CellMeasure) -> Result<CellFunction> {
    let wmu = measure.weighted(&w.map(f64::abs)?)?;
    let local = local_maximal_with(&wmu, measure, cube)?;
    let grid = measure.grid().clone();
    let (a, _) = grid.cell_range(cube);
    let mut values = vec![0.0; grid.cell_count()];
    for (off, v) in local.iter().enumerate() {
        values[a + off] = *v;
    }
    CellFunction::new(grid, values)
}

/// Fujii–Wilson constant `sup_Q (1/Y(Q)) ∫_Q M_μ(w·χ_Q) dμ` over
/// admissible dyadic cubes, with the argmax cube.
pub fn fujii_wilson(
    w: &CellFunction,
    y: &CubeFunctional,
    measure: &CellMeasure,
    min_level: u32,
) -> Result<(f64, DyadicCube)> {
    let grid = measure.grid();
    let wmu = measure.weighted(&w.map(f64::abs)?)?;
    let mut best = f64::NEG_INFINITY;
    let mut arg = grid.root();
    for q in admissible_cubes(measure, min_level) {
        let yq = y.value(&q)?;
        if !(yq > 0.0) {
            return Err(Error::Functional { value: yq });
        }
        let maximal = local_maximal_with(&wmu, measure, &q)?;
        let (a, b) = grid.cell_range(&q);
        let terms: Vec<f64> =
            (a..b).map(|c| maximal[c - a] * measure.masses()[c]).collect();
        let value = pairwise_sum(&terms) / yq;
        if value > best {
            best = value;
            arg = q;
        }
    }
    if best < 0.0 {
        return Err(Error::DegenerateMeasure);
    }
    Ok((best, arg))
}

/// SD-condition sampling report: `a_est` is the largest observed
/// `LHS/fraction^{1/s}`; `holds` when the estimate is finite, stable
/// between the first half of the sample and the full sample, and shows
/// no divergence trend toward small union fractions.
#[derive(Debug, Clone)]
pub struct SdReport {
    pub a_est: f64,
    pub a_est_half: f64,
    pub holds: bool,
    pub trials: usize,
}

/// Samples the smallness condition
/// `(∑ (a(Q_j)/a(Q))^p·w(Q_j)/w(Q))^{1/p} ≤ ‖a‖·(μ(∪Q_j)/μ(Q))^{1/s}`
/// over random dyadic antichains.
pub fn sd_check(
    a: &CubeFunctional,
    w: &CellFunction,
    measure: &CellMeasure,
    p: f64,
    s: f64,
    trials: usize,
    seed: u64,
) -> Result<SdReport> {
    if !(p >= 1.0) || !(s > 1.0) || trials == 0 {
        return Err(Error::Parameter(format!(
            "SD check needs p ≥ 1, s > 1, trials ≥ 1; got p = {p}, s = {s}, trials = {trials}"
        )));
    }
    let grid = measure.grid();
    let wmu = measure.weighted(&w.map(f64::abs)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a_est = 0.0f64;
    let mut a_est_half = 0.0f64;
    let mut observed: Vec<(f64, f64)> = Vec::new(); // (fraction, ratio)

    let mut record = |parent: &DyadicCube,
                      chain: &[DyadicCube],
                      first_half: bool,
                      observed: &mut Vec<(f64, f64)>|
     -> Result<()> {
        if chain.is_empty() {
            return Ok(());
        }
        let a_q = a.value(parent)?;
        let w_q = wmu.cube_mass(parent)?;
        if !(a_q > 0.0) || !(w_q > 0.0) {
            return Ok(());
        }
        let mut lhs_p = 0.0;
        let mut union_mass = 0.0;
        for q in chain {
            lhs_p += (a.value(q)? / a_q).powf(p) * wmu.cube_mass(q)? / w_q;
            union_mass += measure.cube_mass(q)?;
        }
        let frac = union_mass / measure.cube_mass(parent)?;
        let ratio = lhs_p.powf(1.0 / p) / frac.powf(1.0 / s);
        observed.push((frac, ratio));
        a_est = a_est.max(ratio);
        if first_half {
            a_est_half = a_est_half.max(ratio);
        }
        Ok(())
    };

    for trial in 0..trials {
        let parent = random_positive_cube(measure, &mut rng, grid.depth().saturating_sub(1));
        let chain = random_antichain(measure, &parent, &mut rng);
        record(&parent, &chain, trial < trials / 2, &mut observed)?;
    }
    // deterministic probes: shrink a single cube onto the w-heaviest
    // cell, the canonical way a mass concentration breaks the condition
    let root = grid.root();
    let heavy = wmu
        .masses()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0);
    for level in 1..=grid.depth() {
        let probe = DyadicCube::from_morton(grid.depth(), heavy as u64, grid.dim())
            .ancestor(level, grid.dim());
        record(&root, std::slice::from_ref(&probe), true, &mut observed)?;
    }

    // divergence trend: the extremes among small fractions must not
    // outgrow the extremes among large ones
    let mut fracs: Vec<f64> = observed.iter().map(|o| o.0).collect();
    fracs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let median = fracs.get(fracs.len() / 2).copied().unwrap_or(1.0);
    let (mut below, mut above) = (0.0f64, 0.0f64);
    for &(frac, ratio) in &observed {
        if frac <= median {
            below = below.max(ratio);
        } else {
            above = above.max(ratio);
        }
    }
    let diverging = above > 0.0 && below > above * 1.25;
    let holds = a_est.is_finite() && a_est > 0.0 && a_est <= a_est_half * 1.1 && !diverging;
    Ok(SdReport { a_est, a_est_half, holds, trials })
}

/// Candidate inverse bijections Ψ⁻¹ for A∞ profiles.
#[derive(Debug, Clone)]
pub enum PsiCandidate {
    /// Ψ⁻¹(t) = t^{1/s}.
    Power { s: f64 },
    /// Ψ⁻¹(t) = 1/φ⁻¹(1/t).
    Orlicz(YoungFunction),
    /// Ψ⁻¹(t) = t^{1/p⁺}.
    VariableTop { p_plus: f64 },
}

impl PsiCandidate {
    pub fn name(&self) -> String {
        match self {
            PsiCandidate::Power { s } => format!("power:{s}"),
            PsiCandidate::Orlicz(phi) => format!("orlicz:{}", phi.name()),
            PsiCandidate::VariableTop { p_plus } => format!("variable-top:{p_plus}"),
        }
    }

    pub fn inv(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::Parameter(format!("Ψ⁻¹ domain is (0,1], got {t}")));
        }
        match self {
            PsiCandidate::Power { s } => Ok(t.powf(1.0 / s)),
            PsiCandidate::Orlicz(phi) => Ok(1.0 / young_inverse(phi, 1.0 / t)?),
            PsiCandidate::VariableTop { p_plus } => Ok(t.powf(1.0 / p_plus)),
        }
    }
}

/// Sampled characteristic-family A∞ profile: mass fractions of random
/// antichains against the localized norm of their indicator sum.
#[derive(Debug, Clone)]
pub struct AinftyProfile {
    /// (fraction, norm value) pairs, one per sampled antichain.
    pub samples: Vec<(f64, f64)>,
    /// Max over samples of value / Ψ⁻¹(fraction).
    pub fitted_c: f64,
    pub candidate: String,
    /// The profile only quantifies over characteristic families.
    pub restricted: bool,
    pub seed: u64,
}

impl AinftyProfile {
    /// Largest excess of a sample above `fitted_c·Ψ⁻¹(fraction)`.
    pub fn max_violation(&self, candidate: &PsiCandidate) -> Result<f64> {
        let mut worst = f64::NEG_INFINITY;
        for &(frac, value) in &self.samples {
            worst = worst.max(value - self.fitted_c * candidate.inv(frac)?);
        }
        Ok(worst)
    }
}

/// Samples the generalized A∞ profile of Definition 2.6 restricted to
/// characteristic functions: for random antichains {Q_j} inside random
/// cubes Q, records (μ(∪Q_j)/μ(Q), ‖∑χ_{Q_j}‖) and fits C_Y against the
/// candidate Ψ⁻¹.
pub fn ainfty_char_profile(
    spec: &LocalNormSpec,
    base: &CellMeasure,
    candidate: &PsiCandidate,
    trials: usize,
    seed: u64,
) -> Result<AinftyProfile> {
    if trials == 0 {
        return Err(Error::Parameter("profile sampling needs trials ≥ 1".into()));
    }
    let grid = base.grid().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(trials);
    let mut fitted_c = 0.0f64;
    while samples.len() < trials {
        let parent = random_positive_cube(base, &mut rng, grid.depth().saturating_sub(1));
        let chain = random_antichain(base, &parent, &mut rng);
        if chain.is_empty() {
            continue;
        }
        let mut values = vec![0.0f64; grid.cell_count()];
        let mut union_mass = 0.0;
        for q in &chain {
            let (a, b) = grid.cell_range(q);
            for v in &mut values[a..b] {
                *v += 1.0;
            }
            union_mass += base.cube_mass(q)?;
        }
        let frac = union_mass / base.cube_mass(&parent)?;
        let indicator = CellFunction::new(grid.clone(), values)?;
        let value = spec.norm(&indicator, &parent)?;
        samples.push((frac, value));
        fitted_c = fitted_c.max(value / candidate.inv(frac)?);
    }
    Ok(AinftyProfile {
        samples,
        fitted_c,
        candidate: candidate.name(),
        restricted: true,
        seed,
    })
}

/// Empirical lower bound for the Theorem 2.3 embedding constant B:
/// max over test functions and admissible cubes of
/// `(1/Y(Q)) ∫_Q |f − f_{Q,μ}| w dμ / ‖f‖_BMO`. Constant test functions
/// are skipped; the count of skips is returned alongside.
pub fn embedding_constant(
    w: &CellFunction,
    y: &CubeFunctional,
    measure: &CellMeasure,
    test_functions: &[CellFunction],
    min_level: u32,
) -> Result<(f64, usize)> {
    let wmu = measure.weighted(&w.map(f64::abs)?)?;
    let mut best = 0.0f64;
    let mut skipped = 0usize;
    let cubes = admissible_cubes(measure, min_level);
    for f in test_functions {
        let (bmo, _) = bmo_norm(f, measure, min_level)?;
        if bmo <= 0.0 {
            skipped += 1;
            continue;
        }
        for q in &cubes {
            let avg = measure.cube_average(f, q)?;
            let dev = f.map(|v| (v - avg).abs())?;
            let integral = wmu.cube_integral(&dev, q)?;
            let yq = y.value(q)?;
            if !(yq > 0.0) {
                return Err(Error::Functional { value: yq });
            }
            best = best.max(integral / yq / bmo);
        }
    }
    if best == 0.0 && skipped == test_functions.len() && !test_functions.is_empty() {
        return Err(Error::Parameter("all test functions were constant".into()));
    }
    Ok((best, skipped))
}
