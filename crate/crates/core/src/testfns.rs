//! Built-in test inputs: the logarithmic BMO exemplar, indicators,
//! random step functions, power weights with exact cell integrals and
//! bounded-ratio recursive-split measures.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{CellFunction, CellMeasure, DyadicCube, Grid};

/// `f(x) = log(1/|x − x₀|)` sampled at cell midpoints.
pub fn log_reciprocal(grid: Arc<Grid>, x0: &[f64]) -> Result<CellFunction> {
    if x0.len() != grid.dim() as usize {
        return Err(Error::Parameter(format!(
            "center has {} coordinates, grid dimension is {}",
            x0.len(),
            grid.dim()
        )));
    }
    CellFunction::from_fn(grid.clone(), |mid| {
        let dist2: f64 = mid.iter().zip(x0).map(|(m, c)| (m - c) * (m - c)).sum();
        (1.0 / dist2.sqrt()).ln()
    })
}

/// The canonical 1D exemplar `log(1/x)` on the unit grid.
pub fn log_reciprocal_unit(depth: u32) -> CellFunction {
    log_reciprocal(Grid::unit(1, depth), &[0.0]).expect("midpoints avoid the singularity")
}

/// Indicator of the slab `{x₀ < origin + θ·side}` along the first axis.
pub fn indicator(grid: Arc<Grid>, theta: f64) -> Result<CellFunction> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::Parameter(format!("indicator fraction must be in [0,1], got {theta}")));
    }
    let cut = grid.origin()[0] + theta * grid.side();
    CellFunction::from_fn(grid.clone(), |mid| if mid[0] < cut { 1.0 } else { 0.0 })
}

/// Random step function: constant on each cube of a random coarse level,
/// values drawn uniformly from [0, 4).
pub fn random_step(grid: Arc<Grid>, seed: u64) -> CellFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let level = rng.gen_range(1..=grid.depth().min(5));
    let steps: Vec<f64> = (0..grid.cubes_at_level(level)).map(|_| rng.gen_range(0.0..4.0)).collect();
    let dim = grid.dim();
    let depth = grid.depth();
    let shift = dim * (depth - level);
    let values: Vec<f64> = (0..grid.cell_count()).map(|c| steps[c >> shift]).collect();
    CellFunction::new(grid, values).expect("finite by construction")
}

/// 1D power weight `x^δ` with δ > −1, materialized by exact per-cell
/// averages `(b^{δ+1} − a^{δ+1})/((δ+1)(b − a))` so that cell integrals
/// of the weight against Lebesgue cells are exact.
pub fn power_weight(grid: Arc<Grid>, delta: f64) -> Result<CellFunction> {
    if grid.dim() != 1 {
        return Err(Error::Parameter("power weight is one-dimensional".into()));
    }
    if !(delta > -1.0) {
        return Err(Error::Parameter(format!("power weight needs δ > −1, got {delta}")));
    }
    let h = grid.cell_width();
    let n = grid.cell_count();
    let origin = grid.origin()[0];
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let a = origin + i as f64 * h;
        let b = a + h;
        let avg = if delta == 0.0 {
            1.0
        } else {
            (b.powf(delta + 1.0) - a.powf(delta + 1.0)) / ((delta + 1.0) * h)
        };
        values.push(avg);
    }
    CellFunction::new(grid, values)
}

/// Bounded-ratio recursive-split measure: mass 1 at the root, split at
/// each level among the children with weights drawn from [1, ratio_bound]
/// and normalized. Child masses at one level differ by at most the ratio
/// bound, so the measure is doubling with a controlled constant.
pub fn recursive_split_measure(grid: Arc<Grid>, seed: u64, ratio_bound: f64) -> Result<CellMeasure> {
    if !(ratio_bound >= 1.0) {
        return Err(Error::Parameter(format!("ratio bound must be ≥ 1, got {ratio_bound}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = grid.dim();
    let fan = 1usize << dim;
    let mut level_masses = vec![1.0f64];
    for _ in 0..grid.depth() {
        let mut next = Vec::with_capacity(level_masses.len() * fan);
        for &mass in &level_masses {
            let weights: Vec<f64> = (0..fan).map(|_| rng.gen_range(1.0..ratio_bound.max(1.0 + 1e-12))).collect();
            let total: f64 = weights.iter().sum();
            for w in weights {
                next.push(mass * w / total);
            }
        }
        level_masses = next;
    }
    CellMeasure::new(grid, level_masses)
}

/// Resamples a cell function onto a deeper grid of the same shape by
/// blocking: each fine cell takes the value of its coarse ancestor cell.
pub fn refine_to(f: &CellFunction, fine: Arc<Grid>) -> Result<CellFunction> {
    let coarse = f.grid();
    if fine.dim() != coarse.dim() || fine.depth() < coarse.depth() {
        return Err(Error::Parameter("refinement target must be deeper, same dimension".into()));
    }
    let shift = fine.dim() * (fine.depth() - coarse.depth());
    let values: Vec<f64> = (0..fine.cell_count()).map(|c| f.values()[c >> shift]).collect();
    CellFunction::new(fine, values)
}

/// Named built-in functions for the command line: `log-reciprocal`,
/// `indicator:θ`, `random-step:seed`.
pub fn from_name(grid: Arc<Grid>, name: &str) -> Result<CellFunction> {
    let mut parts = name.split(':');
    match parts.next() {
        Some("log-reciprocal") => log_reciprocal(grid.clone(), &vec![0.0; grid.dim() as usize]),
        Some("indicator") => {
            let theta: f64 = parts
                .next()
                .unwrap_or("0.5")
                .parse()
                .map_err(|_| Error::Parameter(format!("bad indicator fraction in {name:?}")))?;
            indicator(grid, theta)
        }
        Some("random-step") => {
            let seed: u64 = parts
                .next()
                .unwrap_or("0")
                .parse()
                .map_err(|_| Error::Parameter(format!("bad seed in {name:?}")))?;
            Ok(random_step(grid, seed))
        }
        _ => Err(Error::Parameter(format!(
            "unknown test function {name:?}; try log-reciprocal, indicator:θ, random-step:seed"
        ))),
    }
}

/// First child of the root: the low half along every axis.
pub fn left_half(grid: &Grid) -> DyadicCube {
    DyadicCube::from_morton(1, 0, grid.dim())
}
