//! End-to-end acceptance gate. Each numbered criterion prints one
//! PASS/FAIL line; the test fails if any criterion fails. All bounds
//! are checked against independent oracles computed in this file.

use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use oscillab::constants::{laplace_bound, theorem_constant, variable_cn, variable_jn_constant, Bijection, JNParams};
use oscillab::constants::chebyshev_chain;
use oscillab::functionals::{
    ainfty_char_profile, check_wr_properties, fujii_wilson, CubeFunctional, PsiCandidate,
};
use oscillab::grid::{subcube_alpha, CellFunction, CellMeasure, DyadicCube, Grid};
use oscillab::norms::{
    lp_norm, luxemburg_norm, variable_norm, ExponentFunction, LocalNormSpec, NormFamily,
};
use oscillab::oscillation::{bmo_norm, cz_decompose, jn_tail, sparse_dominate, sup_localized_oscillation};
use oscillab::testfns;
use oscillab::young::{growth_bounds, young_inverse, YoungFunction};

const E: f64 = std::f64::consts::E;

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn record(&mut self, number: u32, name: &str, pass: bool, detail: String) {
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("criterion {number:02} [{verdict}] {name}: {detail}");
        if !pass {
            self.failures.push(format!("{number:02} {name}: {detail}"));
        }
    }
}

fn uniform(depth: u32) -> Arc<CellMeasure> {
    Arc::new(CellMeasure::lebesgue(Grid::unit(1, depth)))
}

/// 1: Orlicz-normalized oscillations of the log exemplar stay below
/// 2e·2^α·(p+α+1)·‖f‖ on every cube of level ≤ 8 at depth 14.
fn criterion_1(gate: &mut Gate) {
    let started = Instant::now();
    let mu = uniform(14);
    let grid = mu.grid().clone();
    let f = testfns::log_reciprocal_unit(14);
    let (bmo, _) = bmo_norm(&f, &mu, 1).unwrap();
    let mut violations = 0usize;
    let mut worst_margin = f64::INFINITY;
    for p in [1.0, 2.0, 4.0, 8.0] {
        for alpha in [0.0, 1.0] {
            let phi = YoungFunction::p_log(p, alpha).unwrap();
            let cap = 2.0 * E * 2f64.powf(alpha) * (p + alpha + 1.0) * bmo;
            let spec =
                LocalNormSpec::with_measure_functional(NormFamily::Orlicz(phi.clone()), mu.clone());
            for q in grid.cubes_up_to(8) {
                let avg = mu.cube_average(&f, &q).unwrap();
                let centered = f.map(|v| v - avg).unwrap();
                let value = luxemburg_norm(&centered, &phi, &q, &spec).unwrap();
                if value > cap {
                    violations += 1;
                }
                worst_margin = worst_margin.min(cap - value);
            }
        }
    }
    let secs = started.elapsed().as_secs_f64();
    gate.record(
        1,
        "orlicz-oscillation-cap",
        violations == 0 && secs < 60.0,
        format!("{violations} violations, smallest margin {worst_margin:.3e}, {secs:.1}s"),
    );
}

/// 2: the localized p-norm supremum grows linearly: max/min of X(p)/p
/// over p = 2..64 stays ≤ 3. Depth 20: at desk depths ≤ 14 the finest
/// admissible cubes cannot yet carry the p = 64 Gaussian tail, so the
/// spread only settles under the bound once the grid is deep enough.
fn criterion_2(gate: &mut Gate) {
    let depth = 20;
    let mu = uniform(depth);
    let f = testfns::log_reciprocal_unit(depth);
    let mut ratios = Vec::new();
    for k in 1..=6 {
        let p = 2f64.powi(k);
        let spec = LocalNormSpec::with_measure_functional(NormFamily::Lp(p), mu.clone());
        let (x, _) = sup_localized_oscillation(&f, &spec, &mu, 1).unwrap();
        ratios.push(x / p);
    }
    let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = max / min;
    gate.record(
        2,
        "linear-p-rate-spread",
        spread <= 3.0,
        format!("spread {spread:.3} over p in 2..64 at depth {depth} (bound 3)"),
    );
}

/// 3: Luxemburg norms of power growth functions coincide with the
/// plain p-averages on 100 random draws.
fn criterion_3(gate: &mut Gate) {
    let mu = uniform(7);
    let grid = mu.grid().clone();
    let root = grid.root();
    let mut worst = 0.0f64;
    for seed in 0..100 {
        let f = testfns::random_step(grid.clone(), seed);
        for p in [1.0, 2.0, 3.7] {
            let phi = YoungFunction::power(p).unwrap();
            let spec =
                LocalNormSpec::with_measure_functional(NormFamily::Orlicz(phi.clone()), mu.clone());
            let lux = luxemburg_norm(&f, &phi, &root, &spec).unwrap();
            let lp = lp_norm(&f, &root, &spec, p).unwrap();
            worst = worst.max((lux - lp).abs() / lp.max(1e-300));
        }
    }
    gate.record(3, "luxemburg-lp-coincidence", worst <= 1e-8, format!("worst relative gap {worst:.2e}"));
}

/// 4: stopping-time invariants on 200 random step functions.
fn criterion_4(gate: &mut Gate) {
    let mu = uniform(9);
    let grid = mu.grid().clone();
    let root = grid.root();
    let mut worst = f64::INFINITY;
    let mut checked = 0usize;
    for seed in 0..200 {
        let raw = testfns::random_step(grid.clone(), seed);
        let avg = mu.cube_average(&raw, &root).unwrap();
        if avg <= 0.0 {
            continue;
        }
        let g = raw.map(|v| v / avg).unwrap(); // root average exactly 1
        for l in [2.0, 4.0, 8.0] {
            let cz = cz_decompose(&g, &root, &mu, l).unwrap();
            checked += 1;
            for a in &cz.averages {
                worst = worst.min(a - l); // sandwich, lower side
                worst = worst.min(2.0 * l - a); // upper side, c·2^n = 2
            }
            let union = cz.selected.union_mass(&mu).unwrap();
            worst = worst.min(1.0 / l - union); // smallness at root average 1

            let mut covered = vec![false; grid.cell_count()];
            for q in &cz.selected.members {
                let (s, e) = grid.cell_range(q);
                covered[s..e].iter_mut().for_each(|c| *c = true);
            }
            for (i, v) in g.values().iter().enumerate() {
                if !covered[i] {
                    worst = worst.min(l - v.abs());
                }
            }
        }
    }
    gate.record(
        4,
        "stopping-time-invariants",
        worst >= -1e-12 && checked == 600,
        format!("{checked} decompositions, worst slack {worst:.2e}"),
    );
}

/// 5: closed-form caps of the log-augmented power family on the
/// 64×9 parameter rectangle, and sampled growth bounds at 1e9.
fn criterion_5(gate: &mut Gate) {
    let mut worst_cap = f64::INFINITY;
    let mut worst_growth = 0.0f64;
    for p_idx in 0..64 {
        let p = 1.0 + p_idx as f64;
        for alpha in 0..=8 {
            let alpha = alpha as f64;
            let phi = YoungFunction::p_log(p, alpha).unwrap();
            worst_cap = worst_cap.min(E * 2f64.powf(alpha) - phi.eval(1.0 + 1.0 / p));
            let (lo, hi) = growth_bounds(&phi, 1e9, 400).unwrap();
            worst_growth = worst_growth.max((lo - p).abs().max((hi - (p + alpha)).abs()));
        }
    }
    gate.record(
        5,
        "closed-form-growth-caps",
        worst_cap >= -1e-12 && worst_growth <= 1e-3,
        format!("cap slack {worst_cap:.2e}, growth deviation {worst_growth:.2e}"),
    );
}

/// 6: the stopping-level optimizer against its calculus oracle and the
/// linear rate for power bijections.
fn criterion_6(gate: &mut Gate) {
    let (c, argmin) = theorem_constant(&Bijection::identity(), 1.0, 1.0, 1.0, 0.0).unwrap();
    let identity_ok = (c - 4.0).abs() <= 1e-5 && (argmin - 2.0).abs() < 1e-3;
    let mut rate_ok = true;
    let mut rates = Vec::new();
    for p in [32.0, 128.0] {
        let (cp, _) = theorem_constant(&Bijection::power(p).unwrap(), 1.0, 1.0, 1.0, 0.0).unwrap();
        rates.push(cp / p);
        rate_ok &= cp / p >= 0.9 * E && cp / p <= 1.1 * E;
    }
    gate.record(
        6,
        "optimizer-constant",
        identity_ok && rate_ok,
        format!("identity {c:.6} at L = {argmin:.6}; C(p)/p = {rates:.3?}"),
    );
}

/// 7: transform bound vs. the Gamma closed form, and its frozen ratio
/// band against the optimizer across p = 2..32.
fn criterion_7(gate: &mut Gate) {
    let jn = JNParams::new(2.0, 2.0).unwrap();
    let mut worst = 0.0f64;
    for p in [2u64, 5, 10] {
        let phi = YoungFunction::power(p as f64).unwrap();
        let got = laplace_bound(&phi, &jn).unwrap();
        let factorial: f64 = (1..=p).map(|k| k as f64).product();
        let want = 2.0 * (2.0 * factorial).powf(1.0 / p as f64);
        worst = worst.max((got - want).abs() / want);
    }
    let mut band_ok = true;
    let mut ratios = Vec::new();
    for k in 1..=5 {
        let p = 2f64.powi(k);
        let lb = laplace_bound(&YoungFunction::power(p).unwrap(), &jn).unwrap();
        let (tc, _) = theorem_constant(&Bijection::power(p).unwrap(), 1.0, 1.0, 1.0, 0.0).unwrap();
        let ratio = lb / tc;
        ratios.push(ratio);
        band_ok &= (0.25..=0.65).contains(&ratio); // frozen band
    }
    gate.record(
        7,
        "transform-closed-form",
        worst <= 1e-6 && band_ok,
        format!("gamma gap {worst:.2e}, ratio band {ratios:.3?} in [0.25, 0.65]"),
    );
}

/// 8: variable-exponent Chebyshev chain and the end-to-end exponential
/// tail bound with the pipeline rate.
fn criterion_8(gate: &mut Gate) {
    let depth = 10;
    let mu = uniform(depth);
    let grid = mu.grid().clone();
    let root = grid.root();
    let f = testfns::log_reciprocal_unit(depth);

    // random exponent with the top pinned to exactly 4
    let mut p_values: Vec<f64> = testfns::random_step(grid.clone(), 77)
        .values()
        .iter()
        .map(|v| 1.0 + 3.0 * v / 4.0)
        .collect();
    p_values[0] = 4.0;
    let pfun = ExponentFunction::new(
        CellFunction::new(grid.clone(), p_values).unwrap(),
    )
    .unwrap();
    assert_eq!(pfun.p_plus(), 4.0);

    let mut chain_ok = true;
    for r in [1.0, 2.0, 4.0] {
        for t in [1.0, 2.0, 4.0] {
            let (lhs, rhs) = chebyshev_chain(&f, &pfun, &root, &mu, t, r).unwrap();
            chain_ok &= lhs <= rhs + 1e-9;
        }
    }

    let (bmo, _) = bmo_norm(&f, &mu, 1).unwrap();
    let avg = mu.cube_average(&f, &root).unwrap();
    let g = f.map(|v| v - avg).unwrap();
    let cn = variable_cn(1.0, 1.0, 4.0).unwrap();
    let rate = variable_jn_constant(cn, 4.0).unwrap();
    let mut tail_ok = true;
    let mut worst = f64::INFINITY;
    let t_max = g.max_abs();
    let mut t = 0.25;
    while t <= t_max + 0.25 {
        let chi = g.map(|v| if v.abs() >= t { 1.0 } else { 0.0 }).unwrap();
        let lhs = variable_norm(&chi, &pfun, &root, &mu).unwrap();
        let bound = 2.0 * (-rate * t / bmo).exp();
        tail_ok &= lhs <= bound + 1e-12;
        worst = worst.min(bound - lhs);
        t += 0.25;
    }
    gate.record(
        8,
        "variable-exponent-chain",
        chain_ok && tail_ok,
        format!("9 chain cases, tail margin {worst:.2e} at rate {rate:.4}"),
    );
}

/// 9: the enlarged weight-mass functional's four properties and its
/// disjoint-family consequence on 200 random draws.
fn criterion_9(gate: &mut Gate) {
    let mu = uniform(8);
    let grid = mu.grid().clone();
    let mut worst = f64::INFINITY;
    for (seed, r) in [(1u64, 1.5), (2, 2.0), (3, 4.0)] {
        let w = testfns::random_step(grid.clone(), seed).map(|v| v + 0.05).unwrap();
        let report = check_wr_properties(&w, &mu, r, 200, seed).unwrap();
        worst = worst.min(report.worst()).min(report.ainfty);
    }
    gate.record(9, "enlarged-weight-mass", worst >= -1e-10, format!("worst slack {worst:.2e}"));
}

/// 10: maximal-function characteristic: exact unit value, brute-force
/// agreement at depth 3, monotone growth toward the singular weights.
fn criterion_10(gate: &mut Gate) {
    let mu = uniform(10);
    let grid = mu.grid().clone();
    let one = CellFunction::constant(grid.clone(), 1.0);
    let y = CubeFunctional::measure(mu.clone());
    let (unit, _) = fujii_wilson(&one, &y, &mu, 0).unwrap();

    // brute force at depth 3
    let mu3 = uniform(3);
    let g3 = mu3.grid().clone();
    let w3 = CellFunction::from_fn(g3.clone(), |x| if x[0] < 0.25 { 4.0 } else { 0.5 }).unwrap();
    let y3 = CubeFunctional::measure(mu3.clone());
    let (got, _) = fujii_wilson(&w3, &y3, &mu3, 0).unwrap();
    let wmu = mu3.weighted(&w3).unwrap();
    let mut brute = f64::NEG_INFINITY;
    for q in g3.cubes_up_to(3) {
        let (a, b) = g3.cell_range(&q);
        let mut integral = 0.0;
        for cell in a..b {
            let mut best = f64::NEG_INFINITY;
            for level in q.level..=3 {
                let anc = DyadicCube::from_morton(3, cell as u64, 1).ancestor(level, 1);
                best = best.max(wmu.cube_mass(&anc).unwrap() / mu3.cube_mass(&anc).unwrap());
            }
            integral += best * mu3.masses()[cell];
        }
        brute = brute.max(integral / mu3.cube_mass(&q).unwrap());
    }

    let mut sequence = Vec::new();
    let mut monotone = true;
    let mut prev = 0.0;
    for delta in [0.0, -0.3, -0.6, -0.9] {
        let w = testfns::power_weight(grid.clone(), delta).unwrap();
        let (value, _) = fujii_wilson(&w, &y, &mu, 0).unwrap();
        monotone &= value > prev;
        prev = value;
        sequence.push(value);
    }
    gate.record(
        10,
        "maximal-characteristic",
        unit == 1.0 && (got - brute).abs() <= 1e-10 && monotone,
        format!("unit {unit}, brute gap {:.2e}, sequence {sequence:.3?}", (got - brute).abs()),
    );
}

/// 11: sampled antichain profiles equal 1/φ⁻¹(1/fraction) exactly.
fn criterion_11(gate: &mut Gate) {
    let mu = uniform(8);
    let mut worst = 0.0f64;
    for name in ["power:2", "plog:2:1"] {
        let phi = YoungFunction::from_name(name).unwrap();
        let spec =
            LocalNormSpec::with_measure_functional(NormFamily::Orlicz(phi.clone()), mu.clone());
        let candidate = PsiCandidate::Orlicz(phi.clone());
        let profile = ainfty_char_profile(&spec, &mu, &candidate, 50, 13).unwrap();
        for &(fraction, value) in &profile.samples {
            let want = 1.0 / young_inverse(&phi, 1.0 / fraction).unwrap();
            worst = worst.max((value - want).abs() / want.max(1e-300));
        }
    }
    gate.record(11, "profile-inverse-identity", worst <= 1e-8, format!("worst gap {worst:.2e}"));
}

/// 12: half-sparse family of the log exemplar with a stable measured
/// domination constant across depths 14 and 16.
fn criterion_12(gate: &mut Gate) {
    let mut c_doms = Vec::new();
    let mut sparse_ok = true;
    for depth in [14u32, 16] {
        let mu = uniform(depth);
        let grid = mu.grid().clone();
        let f = testfns::log_reciprocal_unit(depth);
        let fam = sparse_dominate(&f, &grid.root(), &mu, 2.0, 64).unwrap();
        let mut seen = vec![false; grid.cell_count()];
        for (q, e) in fam.members.iter().zip(&fam.major_sets) {
            sparse_ok &= mu.cube_mass(q).unwrap() <= 2.0 * mu.cell_set_mass(e) + 1e-12;
            for &c in e {
                sparse_ok &= !seen[c];
                seen[c] = true;
            }
        }
        c_doms.push(fam.c_dom);
    }
    let drift = (c_doms[1] - c_doms[0]).abs() / c_doms[0];
    gate.record(
        12,
        "half-sparse-domination",
        sparse_ok && drift <= 0.10,
        format!("C_dom {c_doms:.4?}, drift {:.1}%", drift * 100.0),
    );
}

/// 13: concentric subcube mass split on random bounded-ratio measures.
fn criterion_13(gate: &mut Gate) {
    let grid = Grid::unit(1, 6);
    let mut worst = f64::INFINITY;
    for seed in 0..100 {
        let mu = testfns::recursive_split_measure(grid.clone(), seed, 3.0).unwrap();
        let (c_mu, _) = mu.doubling().unwrap();
        let found = subcube_alpha(&mu, &grid.root()).unwrap();
        worst = worst.min(found.alpha.min(1.0 - found.alpha) - (0.25 / c_mu - found.eps_cell));
    }
    let uniform_alpha = subcube_alpha(&CellMeasure::lebesgue(grid.clone()), &grid.root())
        .unwrap()
        .alpha;
    gate.record(
        13,
        "concentric-mass-split",
        worst >= -1e-12 && uniform_alpha == 0.5,
        format!("worst slack {worst:.2e}, uniform alpha {uniform_alpha}"),
    );
}

/// 14: measured tails of the log exemplar against the analytic level
/// sets, with a positive fitted exponential slope.
fn criterion_14(gate: &mut Gate) {
    let depth = 14;
    let mu = uniform(depth);
    let root = mu.grid().root();
    let f = testfns::log_reciprocal_unit(depth);
    let avg = mu.cube_average(&f, &root).unwrap();
    let cell = 2f64.powi(-(depth as i32));
    let mut worst = 0.0f64;
    for k in 1..=20 {
        let t = 0.4 * k as f64;
        let got = jn_tail(&f, &root, &mu, t).unwrap();
        let want = (-(avg + t)).exp() + (1.0 - (-(avg - t).max(0.0)).exp()).max(0.0);
        worst = worst.max((got - want).abs());
    }

    // least-squares slope of log tail over the window [bmo, tail floor]
    let (bmo, _) = bmo_norm(&f, &mu, 1).unwrap();
    let floor = 10.0 / mu.grid().cell_count() as f64;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut t = bmo;
    loop {
        let tail = jn_tail(&f, &root, &mu, t).unwrap();
        if tail <= floor {
            break;
        }
        xs.push(t);
        ys.push(tail.ln());
        t += 0.2;
    }
    let n = xs.len() as f64;
    let (sx, sy): (f64, f64) = (xs.iter().sum(), ys.iter().sum());
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let slope = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    gate.record(
        14,
        "exponential-tail",
        worst <= 2.0 * cell + 1e-12 && slope > 0.0,
        format!("oracle gap {worst:.2e} (2 cells = {:.2e}), decay slope {slope:.3}", 2.0 * cell),
    );
}

/// 15: byte-identical verification reports across runs and thread caps.
fn criterion_15(gate: &mut Gate) {
    let bin = env!("CARGO_BIN_EXE_oscillab");
    let run = |threads: &str| {
        let out = Command::new(bin)
            .args(["verify", "--suite", "all", "--seed", "7"])
            .env("OSC_LAB_THREADS", threads)
            .output()
            .expect("verify run");
        (out.status.success(), out.stdout)
    };
    let (ok1, a) = run("1");
    let (ok2, b) = run("8");
    let (ok3, c) = run("1");
    gate.record(
        15,
        "deterministic-reports",
        ok1 && ok2 && ok3 && a == b && a == c,
        format!("3 runs, {} bytes each, identical: {}", a.len(), a == b && a == c),
    );
}

#[test]
fn acceptance_gate() {
    let mut gate = Gate { failures: Vec::new() };
    criterion_1(&mut gate);
    criterion_2(&mut gate);
    criterion_3(&mut gate);
    criterion_4(&mut gate);
    criterion_5(&mut gate);
    criterion_6(&mut gate);
    criterion_7(&mut gate);
    criterion_8(&mut gate);
    criterion_9(&mut gate);
    criterion_10(&mut gate);
    criterion_11(&mut gate);
    criterion_12(&mut gate);
    criterion_13(&mut gate);
    criterion_14(&mut gate);
    criterion_15(&mut gate);
    assert!(gate.failures.is_empty(), "failed criteria:\n{}", gate.failures.join("\n"));
}
