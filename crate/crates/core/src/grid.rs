//! Dyadic geometry over a root cube: cubes, sampled cell functions, discrete
//! cell measures with cached cube sums, doubling-constant estimation and the
//! concentric subcube search.
//!
//! Cells are stored in Morton (bit-interleaved) order so that every dyadic
//! cube of the tree corresponds to a contiguous slice of the finest-cell
//! arrays. Row-major order only appears at the I/O boundary.

use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;

/// Geometry of the dyadic tree: dimension, finest level and root cube.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: u32,
    depth: u32,
    origin: Vec<f64>,
    side: f64,
}

impl Grid {
    /// Unit cube `[0,1]^dim` refined to `depth` dyadic levels.
    pub fn unit(dim: u32, depth: u32) -> Arc<Grid> {
        Grid::new(dim, depth, vec![0.0; dim as usize], 1.0)
    }

    pub fn new(dim: u32, depth: u32, origin: Vec<f64>, side: f64) -> Arc<Grid> {
        assert!(dim >= 1, "grid dimension must be positive");
        assert!(depth >= 1, "grid depth must be positive");
        assert!(
            (dim * depth) < 48,
            "grid of {} cells is too large",
            2u128.pow(dim * depth)
        );
        assert_eq!(origin.len(), dim as usize);
        assert!(side > 0.0 && side.is_finite());
        Arc::new(Grid { dim, depth, origin, side })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    /// Number of finest cells, `2^(dim * depth)`.
    pub fn cell_count(&self) -> usize {
        1usize << (self.dim * self.depth)
    }

    /// Number of cubes at a given level, `2^(dim * level)`.
    pub fn cubes_at_level(&self, level: u32) -> usize {
        1usize << (self.dim * level)
    }

    /// Cells per axis at the finest level.
    pub fn cells_per_side(&self) -> u64 {
        1u64 << self.depth
    }

    /// Side length of the finest cells.
    pub fn cell_width(&self) -> f64 {
        self.side / self.cells_per_side() as f64
    }

    pub fn root(&self) -> DyadicCube {
        DyadicCube { level: 0, index: vec![0; self.dim as usize] }
    }

    /// Side length `ℓ(Q) = ℓ₀ · 2^(−level)` of a cube at `level`.
    pub fn cube_side(&self, level: u32) -> f64 {
        self.side / (1u64 << level) as f64
    }

    pub fn check_cube(&self, cube: &DyadicCube) -> Result<()> {
        if cube.level > self.depth {
            return Err(Error::CubeOutsideGrid { level: cube.level, depth: self.depth });
        }
        if cube.index.len() != self.dim as usize
            || cube.index.iter().any(|&i| i >= (1u64 << cube.level))
        {
            return Err(Error::CubeIndexOutOfRange {
                level: cube.level,
                index: cube.index.clone(),
            });
        }
        Ok(())
    }

    /// Morton range `[start, end)` of finest cells covered by `cube`.
    pub fn cell_range(&self, cube: &DyadicCube) -> (usize, usize) {
        let m = cube.morton();
        let shift = self.dim * (self.depth - cube.level);
        ((m << shift) as usize, ((m + 1) << shift) as usize)
    }

    /// Per-axis coordinates of a finest cell from its Morton index.
    pub fn cell_coords(&self, morton: usize) -> Vec<u64> {
        morton_decode(morton as u64, self.dim, self.depth)
    }

    /// Morton index of a finest cell from its per-axis coordinates.
    pub fn cell_morton(&self, coords: &[u64]) -> usize {
        morton_encode(coords, self.depth) as usize
    }

    /// Row-major flat index of a finest cell (axis 0 slowest).
    pub fn cell_row_major(&self, coords: &[u64]) -> usize {
        let mut flat = 0u64;
        for &c in coords {
            flat = (flat << self.depth) | c;
        }
        flat as usize
    }

    /// Midpoint of a finest cell in physical coordinates.
    pub fn cell_midpoint(&self, morton: usize) -> Vec<f64> {
        let h = self.cell_width();
        self.cell_coords(morton)
            .iter()
            .zip(&self.origin)
            .map(|(&c, &o)| o + (c as f64 + 0.5) * h)
            .collect()
    }

    /// Permutation taking row-major file order to internal Morton order.
    pub fn row_major_to_morton(&self, row_major: &[f64]) -> Vec<f64> {
        assert_eq!(row_major.len(), self.cell_count());
        let mut out = vec![0.0; row_major.len()];
        for m in 0..row_major.len() {
            let coords = self.cell_coords(m);
            out[m] = row_major[self.cell_row_major(&coords)];
        }
        out
    }

    /// Permutation taking internal Morton order to row-major file order.
    pub fn morton_to_row_major(&self, morton: &[f64]) -> Vec<f64> {
        assert_eq!(morton.len(), self.cell_count());
        let mut out = vec![0.0; morton.len()];
        for m in 0..morton.len() {
            let coords = self.cell_coords(m);
            out[self.cell_row_major(&coords)] = morton[m];
        }
        out
    }

    /// All cubes with `level ≤ max_level`, ordered by level then Morton index.
    pub fn cubes_up_to(&self, max_level: u32) -> Vec<DyadicCube> {
        let max_level = max_level.min(self.depth);
        let mut out = Vec::new();
        for level in 0..=max_level {
            for m in 0..self.cubes_at_level(level) {
                out.push(DyadicCube::from_morton(level, m as u64, self.dim));
            }
        }
        out
    }
}

fn morton_encode(coords: &[u64], bits: u32) -> u64 {
    let n = coords.len() as u32;
    let mut code = 0u64;
    for b in (0..bits).rev() {
        for &c in coords {
            code = (code << 1) | ((c >> b) & 1);
        }
    }
    let _ = n;
    code
}

fn morton_decode(code: u64, dim: u32, bits: u32) -> Vec<u64> {
    let mut coords = vec![0u64; dim as usize];
    for b in 0..(dim * bits) {
        let bit = (code >> (dim * bits - 1 - b)) & 1;
        coords[(b % dim) as usize] = (coords[(b % dim) as usize] << 1) | bit;
    }
    coords
}

/// A cube of the dyadic tree: level plus per-axis index, `0 ≤ index_i < 2^level`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicCube {
    pub level: u32,
    pub index: Vec<u64>,
}

impl DyadicCube {
    pub fn new(level: u32, index: Vec<u64>) -> DyadicCube {
        DyadicCube { level, index }
    }

    pub fn from_morton(level: u32, morton: u64, dim: u32) -> DyadicCube {
        DyadicCube { level, index: morton_decode(morton, dim, level) }
    }

    /// Morton index of the cube among cubes of its level.
    pub fn morton(&self) -> u64 {
        morton_encode(&self.index, self.level)
    }

    /// The `2^n` children partitioning this cube at `level + 1`.
    pub fn children(&self, dim: u32) -> Vec<DyadicCube> {
        let m = self.morton();
        (0..1u64 << dim)
            .map(|k| DyadicCube::from_morton(self.level + 1, (m << dim) | k, dim))
            .collect()
    }

    pub fn ancestor(&self, level: u32, dim: u32) -> DyadicCube {
        assert!(level <= self.level);
        let m = self.morton() >> (dim * (self.level - level));
        DyadicCube::from_morton(level, m, dim)
    }

    /// Whether `self` contains `other` (non-strictly) in the dyadic tree.
    pub fn contains(&self, other: &DyadicCube, dim: u32) -> bool {
        other.level >= self.level && other.ancestor(self.level, dim) == *self
    }
}

/// A real-valued function sampled on the finest cells.
#[derive(Debug, Clone)]
pub struct CellFunction {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl CellFunction {
    /// Build from values in internal Morton cell order.
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<CellFunction> {
        if values.len() != grid.cell_count() {
            return Err(Error::Parameter(format!(
                "expected {} cell values, got {}",
                grid.cell_count(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!("non-finite cell value {v}")));
        }
        Ok(CellFunction { grid, values })
    }

    /// Build from values in row-major file order.
    pub fn from_row_major(grid: Arc<Grid>, values: Vec<f64>) -> Result<CellFunction> {
        if values.len() != grid.cell_count() {
            return Err(Error::Parameter(format!(
                "expected {} cell values, got {}",
                grid.cell_count(),
                values.len()
            )));
        }
        let morton = grid.row_major_to_morton(&values);
        CellFunction::new(grid, morton)
    }

    /// Sample `f` at the midpoints of the finest cells.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(&[f64]) -> f64) -> Result<CellFunction> {
        let values: Vec<f64> =
            (0..grid.cell_count()).map(|m| f(&grid.cell_midpoint(m))).collect();
        CellFunction::new(grid, values)
    }

    pub fn constant(grid: Arc<Grid>, c: f64) -> CellFunction {
        let n = grid.cell_count();
        CellFunction::new(grid, vec![c; n]).expect("finite constant")
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Values in internal Morton cell order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<CellFunction> {
        CellFunction::new(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &CellFunction, f: impl Fn(f64, f64) -> f64) -> Result<CellFunction> {
        assert_eq!(self.grid, other.grid);
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        CellFunction::new(self.grid.clone(), values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// A nonnegative mass per finest cell with a cached tree of cube sums.
#[derive(Debug)]
pub struct CellMeasure {
    grid: Arc<Grid>,
    masses: Vec<f64>,
    /// `tree[level][morton]` is the exact mass of that cube; `tree[depth] = masses`.
    tree: Vec<Vec<f64>>,
    doubling: OnceLock<Option<(f64, f64)>>,
}

impl CellMeasure {
    /// Build from per-cell masses in internal Morton order.
    pub fn new(grid: Arc<Grid>, masses: Vec<f64>) -> Result<CellMeasure> {
        if masses.len() != grid.cell_count() {
            return Err(Error::Parameter(format!(
                "expected {} cell masses, got {}",
                grid.cell_count(),
                masses.len()
            )));
        }
        if masses.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::Parameter("cell masses must be finite and ≥ 0".into()));
        }
        let dim = grid.dim();
        let depth = grid.depth();
        let mut tree: Vec<Vec<f64>> = Vec::with_capacity(depth as usize + 1);
        tree.push(masses.clone());
        // bottom-up: parent mass is the exact sum of its 2^n children
        for level in (0..depth).rev() {
            let child = &tree[tree.len() - 1];
            let fan = 1usize << dim;
            let parents: Vec<f64> = (0..grid.cubes_at_level(level))
                .map(|m| child[m * fan..(m + 1) * fan].iter().sum())
                .collect();
            tree.push(parents);
        }
        tree.reverse();
        if tree[0][0] <= 0.0 {
            return Err(Error::DegenerateMeasure);
        }
        Ok(CellMeasure { grid, masses, tree, doubling: OnceLock::new() })
    }

    pub fn from_row_major(grid: Arc<Grid>, masses: Vec<f64>) -> Result<CellMeasure> {
        let morton = grid.row_major_to_morton(&masses);
        CellMeasure::new(grid, morton)
    }

    /// Uniform (Lebesgue) measure of total mass `side^dim`.
    pub fn lebesgue(grid: Arc<Grid>) -> CellMeasure {
        let n = grid.cell_count();
        let cell = grid.side().powi(grid.dim() as i32) / n as f64;
        CellMeasure::new(grid, vec![cell; n]).expect("uniform masses")
    }

    /// Materialize the weighted measure `w · dμ`.
    pub fn weighted(&self, w: &CellFunction) -> Result<CellMeasure> {
        assert_eq!(&self.grid, w.grid());
        let masses = self
            .masses
            .iter()
            .zip(w.values())
            .map(|(&m, &v)| m * v)
            .collect();
        CellMeasure::new(self.grid.clone(), masses)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Masses in internal Morton cell order.
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn total_mass(&self) -> f64 {
        self.tree[0][0]
    }

    /// Exact cube mass via the cached tree, O(1) for dyadic cubes.
    pub fn cube_mass(&self, cube: &DyadicCube) -> Result<f64> {
        self.grid.check_cube(cube)?;
        Ok(self.tree[cube.level as usize][cube.morton() as usize])
    }

    /// Mass of an arbitrary set of finest cells (Morton indices).
    pub fn cell_set_mass(&self, cells: &[usize]) -> f64 {
        let terms: Vec<f64> = cells.iter().map(|&c| self.masses[c]).collect();
        pairwise_sum(&terms)
    }

    /// μ-average of `f` over `cube`.
    pub fn cube_average(&self, f: &CellFunction, cube: &DyadicCube) -> Result<f64> {
        let mass = self.cube_mass(cube)?;
        if mass <= 0.0 {
            return Err(Error::DegenerateMeasure);
        }
        let (a, b) = self.grid.cell_range(cube);
        let terms: Vec<f64> = (a..b).map(|i| f.values()[i] * self.masses[i]).collect();
        Ok(pairwise_sum(&terms) / mass)
    }

    /// Integral `∑ f · dμ` over `cube` (no normalization).
    pub fn cube_integral(&self, f: &CellFunction, cube: &DyadicCube) -> Result<f64> {
        self.grid.check_cube(cube)?;
        let (a, b) = self.grid.cell_range(cube);
        let terms: Vec<f64> = (a..b).map(|i| f.values()[i] * self.masses[i]).collect();
        Ok(pairwise_sum(&terms))
    }

    /// Doubling constants `(c_μ, n_μ)` estimated over dyadic ancestor pairs.
    ///
    /// `n_μ` is fixed to the grid dimension; `c_μ` is the max over all
    /// ancestor/descendant pairs of `mass(Q̂) / ((ℓ(Q̂)/ℓ(Q))^n_μ · mass(Q))`,
    /// floored at 1. A certified lower bound on the true doubling constant.
    pub fn doubling(&self) -> Result<(f64, f64)> {
        let est = self.doubling.get_or_init(|| self.estimate_doubling_inner());
        est.ok_or(Error::NonDoubling)
    }

    fn estimate_doubling_inner(&self) -> Option<(f64, f64)> {
        let dim = self.grid.dim();
        let depth = self.grid.depth();
        let n_mu = dim as f64;
        let mut c_mu: f64 = 1.0;
        for level in 1..=depth {
            let cubes = &self.tree[level as usize];
            for (m, &mass) in cubes.iter().enumerate() {
                for up in 1..=level {
                    let anc = self.tree[(level - up) as usize][m >> (dim * up)];
                    if mass <= 0.0 {
                        if anc > 0.0 {
                            return None;
                        }
                        continue;
                    }
                    // (ℓ(Q̂)/ℓ(Q))^n_μ = 2^(up·n) for an ancestor `up` levels above
                    let ratio = anc / ((1u64 << (up * dim)) as f64 * mass);
                    c_mu = c_mu.max(ratio);
                }
            }
        }
        Some((c_mu, n_mu))
    }
}

/// A pairwise-disjoint family of strict subcubes of a common parent.
#[derive(Debug, Clone)]
pub struct DisjointFamily {
    pub parent: DyadicCube,
    pub members: Vec<DyadicCube>,
}

impl DisjointFamily {
    pub fn new(grid: &Grid, parent: DyadicCube, members: Vec<DyadicCube>) -> Result<DisjointFamily> {
        grid.check_cube(&parent)?;
        let dim = grid.dim();
        for m in &members {
            grid.check_cube(m)?;
            if m.level <= parent.level || !parent.contains(m, dim) {
                return Err(Error::Parameter(
                    "family member must be a strict subcube of the parent".into(),
                ));
            }
        }
        // disjointness: Morton cell ranges must not overlap
        let mut ranges: Vec<(usize, usize)> =
            members.iter().map(|m| grid.cell_range(m)).collect();
        ranges.sort_unstable();
        for w in ranges.windows(2) {
            if w[1].0 < w[0].1 {
                return Err(Error::Parameter("family members overlap".into()));
            }
        }
        Ok(DisjointFamily { parent, members })
    }

    /// Total measure of the union (members are disjoint).
    pub fn union_mass(&self, measure: &CellMeasure) -> Result<f64> {
        let mut total = Vec::with_capacity(self.members.len());
        for m in &self.members {
            total.push(measure.cube_mass(m)?);
        }
        Ok(pairwise_sum(&total))
    }
}

/// A cell-aligned box in finest-cell coordinates: per-axis start, common size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellBox {
    pub lo: Vec<u64>,
    pub size: u64,
}

impl CellBox {
    pub fn contains(&self, coords: &[u64]) -> bool {
        self.lo
            .iter()
            .zip(coords)
            .all(|(&l, &c)| c >= l && c < l + self.size)
    }
}

/// Result of the concentric subcube search.
#[derive(Debug, Clone)]
pub struct SubcubeAlpha {
    pub sub: CellBox,
    pub alpha: f64,
    /// Mass fraction of the cell shell at the h(t) = μ(Q)/2 crossing: the
    /// grid-resolution slack in the α bound.
    pub eps_cell: f64,
}

/// Searches the nested concentric cell-aligned boxes `Q̃ ⊂ cube` for the mass
/// fraction α = μ(Q̃)/μ(Q) closest to 1/2. The returned α always satisfies
/// `min{α, 1−α} ≥ 1/(4 c_μ) − ε_cell`.
pub fn subcube_alpha(measure: &CellMeasure, cube: &DyadicCube) -> Result<SubcubeAlpha> {
    let grid = measure.grid();
    grid.check_cube(cube)?;
    if cube.level >= grid.depth() {
        return Err(Error::CubeOutsideGrid { level: cube.level + 1, depth: grid.depth() });
    }
    let total = measure.cube_mass(cube)?;
    if total <= 0.0 {
        return Err(Error::DegenerateMeasure);
    }
    let (c_mu, _) = measure.doubling()?;

    let m_side = 1u64 << (grid.depth() - cube.level); // cells per side of the cube
    let cell_lo: Vec<u64> = cube
        .index
        .iter()
        .map(|&i| i << (grid.depth() - cube.level))
        .collect();

    // k_axis(c): smallest box size whose axis interval [lo(k), lo(k)+k) holds c,
    // with lo(k) = floor((m-k)/2). Boxes are nested, so each cell enters at a
    // unique size and stays.
    let k_axis = |c: u64| -> u64 {
        let mut k = if 2 * c + 1 >= m_side { 2 * c + 2 - m_side } else { m_side - 2 * c - 1 };
        k = k.clamp(1, m_side);
        while !(((m_side - k) / 2) <= c && c < (m_side - k) / 2 + k) {
            k += 1;
        }
        k
    };

    // bucket cell masses by the box size at which the cell first appears
    let mut shell = vec![0.0f64; m_side as usize + 1];
    let (a, b) = grid.cell_range(cube);
    for i in a..b {
        let coords = grid.cell_coords(i);
        let k = coords
            .iter()
            .zip(&cell_lo)
            .map(|(&c, &l)| k_axis(c - l))
            .max()
            .unwrap();
        shell[k as usize] += measure.masses()[i];
    }
    // h[k] = mass of the box of size k
    let mut h = vec![0.0f64; m_side as usize + 1];
    for k in 1..=m_side as usize {
        h[k] = h[k - 1] + shell[k];
    }

    // first box size reaching half the mass
    let half = total / 2.0;
    let k_half = (1..=m_side as usize).find(|&k| h[k] >= half).unwrap_or(m_side as usize);
    let eps_cell = (h[k_half] - h[k_half - 1]) / total;
    let alpha_lo = h[k_half - 1] / total;
    let alpha_hi = h[k_half] / total;

    // tie-break toward α closest to 1/2; an empty box is never returned
    let k = if k_half > 1 && (alpha_lo - 0.5).abs() < (alpha_hi - 0.5).abs() {
        k_half - 1
    } else {
        k_half
    };
    let alpha = h[k] / total;

    let boxx = CellBox {
        lo: cell_lo.iter().map(|&l| l + (m_side - k as u64) / 2).collect(),
        size: k as u64,
    };
    let bound = 1.0 / (4.0 * c_mu) - eps_cell;
    if alpha.min(1.0 - alpha) < bound - 1e-12 {
        return Err(Error::ResolutionTooCoarse { best_alpha: alpha });
    }
    Ok(SubcubeAlpha { sub: boxx, alpha, eps_cell })
}
