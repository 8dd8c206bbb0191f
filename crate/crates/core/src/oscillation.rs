//! Mean oscillation, the dyadic BMO norm, truncations, the local
//! Calderón–Zygmund stopping-time decomposition, distribution tails and
//! the sparse domination of the oscillation.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{CellFunction, CellMeasure, DisjointFamily, DyadicCube, Grid};
use crate::norms::LocalNormSpec;
use crate::numeric::pairwise_sum;

/// Result of the local stopping-time decomposition at level `level_l`.
#[derive(Debug, Clone)]
pub struct CZResult {
    pub parent: DyadicCube,
    pub level_l: f64,
    pub selected: DisjointFamily,
    /// `|g|`-average on each selected cube, aligned with `selected.members`.
    pub averages: Vec<f64>,
}

/// A sparse family: each member owns a major set of finest cells, the
/// major sets pairwise disjoint, with mass(Q) ≤ Λ/(Λ−1)·mass(E_Q).
#[derive(Debug, Clone)]
pub struct SparseFamily {
    pub root: DyadicCube,
    pub members: Vec<DyadicCube>,
    /// Morton indices of the finest cells of E_Q, aligned with `members`.
    pub major_sets: Vec<Vec<usize>>,
    /// Oscillation of f on each member, aligned with `members`.
    pub oscillations: Vec<f64>,
    pub stopping_factor: f64,
    /// Measured pointwise domination constant
    /// `max_x |f(x)−f_{Q₀}| / ∑_{Q ∋ x} osc(f,Q)`, 0/0 taken as 0.
    pub c_dom: f64,
    /// Set when the recursion hit the depth budget and stopped early.
    pub truncated: bool,
}

/// Mean oscillation `(1/μ(Q)) ∫_Q |f − f_{Q,μ}| dμ`.
pub fn oscillation(f: &CellFunction, cube: &DyadicCube, measure: &CellMeasure) -> Result<f64> {
    let avg = measure.cube_average(f, cube)?;
    let mass = measure.cube_mass(cube)?;
    let (a, b) = measure.grid().cell_range(cube);
    let terms: Vec<f64> = (a..b)
        .map(|i| (f.values()[i] - avg).abs() * measure.masses()[i])
        .collect();
    Ok(pairwise_sum(&terms) / mass)
}

/// Levels `0 ..= depth − max(min_level, 1)`: every admissible cube keeps
/// at least 2^n cells, so oscillation is meaningful.
pub(crate) fn admissible_cubes(measure: &CellMeasure, min_level: u32) -> Vec<DyadicCube> {
    let grid = measure.grid();
    let cap = grid.depth().saturating_sub(min_level.max(1));
    grid.cubes_up_to(cap)
        .into_iter()
        .filter(|q| measure.cube_mass(q).map(|m| m > 0.0).unwrap_or(false))
        .collect()
}

/// Dyadic BMO norm: max oscillation over admissible cubes, with the
/// argmax cube. Ties break to the earlier cube (level, then index).
pub fn bmo_norm(
    f: &CellFunction,
    measure: &CellMeasure,
    min_level: u32,
) -> Result<(f64, DyadicCube)> {
    let mut best = f64::NEG_INFINITY;
    let mut arg = measure.grid().root();
    for q in admissible_cubes(measure, min_level) {
        let osc = oscillation(f, &q, measure)?;
        if osc > best {
            best = osc;
            arg = q;
        }
    }
    if best < 0.0 {
        return Err(Error::DegenerateMeasure);
    }
    Ok((best, arg))
}

/// Cellwise clamp of `f` to `[l, u]`.
pub fn truncate(f: &CellFunction, l: f64, u: f64) -> Result<CellFunction> {
    if !(l < u) {
        return Err(Error::Parameter(format!("truncation needs L < U, got L = {l}, U = {u}")));
    }
    f.map(|v| v.clamp(l, u))
}

/// Local Calderón–Zygmund decomposition of `g` on `cube` at level `l`:
/// the maximal strict dyadic subcubes where the `|g|`-average exceeds `l`.
/// Requires `avg(|g|, cube) ≤ l` (the stopping-time precondition).
pub fn cz_decompose(
    g: &CellFunction,
    cube: &DyadicCube,
    measure: &CellMeasure,
    l: f64,
) -> Result<CZResult> {
    let grid = measure.grid().clone();
    let abs_g = g.map(f64::abs)?;
    let root_avg = measure.cube_average(&abs_g, cube)?;
    if root_avg > l {
        return Err(Error::StoppingPrecondition { root_average: root_avg, level: l });
    }
    let mut selected = Vec::new();
    let mut averages = Vec::new();
    // top-down scan; first maximal cube above level wins, children skipped
    let mut stack = vec![cube.clone()];
    while let Some(q) = stack.pop() {
        if q.level == grid.depth() {
            continue;
        }
        // children in index order keeps the output deterministic
        for child in q.children(grid.dim()).into_iter().rev() {
            let mass = measure.cube_mass(&child)?;
            if mass <= 0.0 {
                continue;
            }
            let avg = measure.cube_average(&abs_g, &child)?;
            if avg > l {
                selected.push(child);
                averages.push(avg);
            } else {
                stack.push(child);
            }
        }
    }
    let mut order: Vec<usize> = (0..selected.len()).collect();
    order.sort_by(|&i, &j| selected[i].cmp(&selected[j]));
    let selected: Vec<DyadicCube> = order.iter().map(|&i| selected[i].clone()).collect();
    let averages: Vec<f64> = order.iter().map(|&i| averages[i]).collect();
    let selected = DisjointFamily::new(&grid, cube.clone(), selected)?;
    Ok(CZResult { parent: cube.clone(), level_l: l, selected, averages })
}

/// Distribution tail `μ({x ∈ Q : |f − f_{Q,μ}| > t}) / μ(Q)`.
pub fn jn_tail(f: &CellFunction, cube: &DyadicCube, measure: &CellMeasure, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Parameter(format!("tail threshold must be ≥ 0, got {t}")));
    }
    let mass = measure.cube_mass(cube)?;
    if mass <= 0.0 {
        return Err(Error::DegenerateMeasure);
    }
    let avg = measure.cube_average(f, cube)?;
    let grid = measure.grid();
    let (a, b) = grid.cell_range(cube);
    let terms: Vec<f64> = (a..b)
        .map(|i| if (f.values()[i] - avg).abs() > t { measure.masses()[i] } else { 0.0 })
        .collect();
    Ok(pairwise_sum(&terms) / mass)
}

/// Sparse domination of the oscillation: recursive stopping construction
/// with threshold `Λ·osc(f, Q)` per member. `depth_budget` caps the
/// recursion; hitting it truncates the family instead of failing.
pub fn sparse_dominate(
    f: &CellFunction,
    q0: &DyadicCube,
    measure: &CellMeasure,
    lambda: f64,
    depth_budget: u32,
) -> Result<SparseFamily> {
    if !(lambda > 1.0) {
        return Err(Error::Parameter(format!("sparse stopping factor must be > 1, got {lambda}")));
    }
    let grid = measure.grid().clone();
    if measure.cube_mass(q0)? <= 0.0 {
        return Err(Error::DegenerateMeasure);
    }
    let mut members: Vec<DyadicCube> = Vec::new();
    let mut major_sets: Vec<Vec<usize>> = Vec::new();
    let mut oscillations: Vec<f64> = Vec::new();
    let mut truncated = false;

    // queue of (cube, remaining budget)
    let mut queue = vec![(q0.clone(), depth_budget)];
    while let Some((q, budget)) = queue.pop() {
        let osc = oscillation(f, &q, measure)?;
        let (qa, qb) = grid.cell_range(&q);
        if osc == 0.0 || q.level == grid.depth() || budget == 0 {
            if osc > 0.0 && budget == 0 && q.level < grid.depth() {
                truncated = true;
            }
            members.push(q);
            major_sets.push((qa..qb).collect());
            oscillations.push(osc);
            continue;
        }
        let threshold = lambda * osc;
        let avg = measure.cube_average(f, &q)?;
        let dev = f.map(|v| (v - avg).abs())?;
        // maximal strict subcubes with avg(|f − f_Q|) > Λ·osc(f, Q);
        // avg(root) = osc ≤ Λ·osc holds since Λ > 1
        let mut selected: Vec<DyadicCube> = Vec::new();
        let mut stack = vec![q.clone()];
        while let Some(p) = stack.pop() {
            if p.level == grid.depth() {
                continue;
            }
            for child in p.children(grid.dim()) {
                let mass = measure.cube_mass(&child)?;
                if mass <= 0.0 {
                    continue;
                }
                if measure.cube_average(&dev, &child)? > threshold {
                    selected.push(child);
                } else {
                    stack.push(child);
                }
            }
        }
        selected.sort();
        let mut covered = vec![false; qb - qa];
        for r in &selected {
            let (ra, rb) = grid.cell_range(r);
            for c in ra..rb {
                covered[c - qa] = true;
            }
            queue.push((r.clone(), budget - 1));
        }
        members.push(q);
        major_sets.push((qa..qb).filter(|&c| !covered[c - qa]).collect());
        oscillations.push(osc);
    }

    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by(|&i, &j| members[i].cmp(&members[j]));
    let members: Vec<DyadicCube> = order.iter().map(|&i| members[i].clone()).collect();
    let major_sets: Vec<Vec<usize>> = order.iter().map(|&i| major_sets[i].clone()).collect();
    let oscillations: Vec<f64> = order.iter().map(|&i| oscillations[i]).collect();

    // measured pointwise domination constant over positive-mass cells
    let f_q0 = measure.cube_average(f, q0)?;
    let (a, b) = grid.cell_range(q0);
    let mut sums = vec![0.0f64; b - a];
    for (m, &osc) in members.iter().zip(&oscillations) {
        let (ma, mb) = grid.cell_range(m);
        for c in ma..mb {
            sums[c - a] += osc;
        }
    }
    let mut c_dom = 0.0f64;
    for c in a..b {
        if measure.masses()[c] == 0.0 {
            continue;
        }
        let numer = (f.values()[c] - f_q0).abs();
        if numer == 0.0 {
            continue;
        }
        c_dom = c_dom.max(numer / sums[c - a]);
    }

    Ok(SparseFamily {
        root: q0.clone(),
        members,
        major_sets,
        oscillations,
        stopping_factor: lambda,
        c_dom,
        truncated,
    })
}

/// The bootstrapped supremum of the Theorem 1.2 proof: max over
/// admissible cubes P of the localized norm of `(f − f_{P,μ})/‖f‖_BMO`.
pub fn sup_localized_oscillation(
    f: &CellFunction,
    spec: &LocalNormSpec,
    measure: &CellMeasure,
    min_level: u32,
) -> Result<(f64, DyadicCube)> {
    let (bmo, _) = bmo_norm(f, measure, min_level)?;
    if bmo <= 0.0 {
        return Err(Error::Parameter(
            "localized oscillation supremum needs a non-constant f (BMO norm > 0)".into(),
        ));
    }
    let grid = measure.grid().clone();
    // per-cube evaluation runs on the cube's contiguous cell slice as its
    // own grid; pairwise sums over the same slice are bit-identical to the
    // full-grid evaluation, and the cost drops from O(cells) per cube to
    // O(cube cells)
    let fast = matches!(&spec.functional, crate::functionals::CubeFunctional::Measure(m)
        if Arc::ptr_eq(m, &spec.measure))
        && !matches!(&spec.family, crate::norms::NormFamily::Variable(_));
    let mut best = f64::NEG_INFINITY;
    let mut arg = grid.root();
    for p in admissible_cubes(measure, min_level) {
        let avg = measure.cube_average(f, &p)?;
        let value = if fast {
            let (a, b) = grid.cell_range(&p);
            let sub_grid = Grid::unit(grid.dim(), grid.depth() - p.level);
            let sub_measure =
                Arc::new(CellMeasure::new(sub_grid.clone(), measure.masses()[a..b].to_vec())?);
            let g = CellFunction::new(
                sub_grid.clone(),
                f.values()[a..b].iter().map(|v| (v - avg) / bmo).collect(),
            )?;
            let sub_spec =
                LocalNormSpec::with_measure_functional(spec.family.clone(), sub_measure);
            sub_spec.norm(&g, &sub_grid.root())?
        } else {
            let g = f.map(|v| (v - avg) / bmo)?;
            spec.norm(&g, &p)?
        };
        if value > best {
            best = value;
            arg = p;
        }
    }
    Ok((best, arg))
}
