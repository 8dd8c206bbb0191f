//! Randomized structural properties over arbitrary cell data.

use std::sync::Arc;

use oscillab::grid::{CellFunction, CellMeasure, Grid};
use oscillab::norms::{LocalNormSpec, NormFamily};
use oscillab::oscillation::{cz_decompose, jn_tail, oscillation};
use oscillab::young::YoungFunction;
use proptest::prelude::*;

fn cells() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-8.0f64..8.0, 16)
}

fn setup(values: Vec<f64>) -> (Arc<CellMeasure>, CellFunction) {
    let grid = Grid::unit(1, 4);
    let mu = Arc::new(CellMeasure::lebesgue(grid.clone()));
    (mu, CellFunction::from_row_major(grid, values).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norms_are_homogeneous(values in cells(), a in -4.0f64..4.0) {
        let (mu, f) = setup(values);
        let root = mu.grid().root();
        let scaled = f.map(|v| a * v).unwrap();
        for family in [
            NormFamily::Lp(2.0),
            NormFamily::WeakLp(1.5),
            NormFamily::Orlicz(YoungFunction::p_log(2.0, 1.0).unwrap()),
        ] {
            let spec = LocalNormSpec::with_measure_functional(family, mu.clone());
            let base = spec.norm(&f, &root).unwrap();
            let got = spec.norm(&scaled, &root).unwrap();
            prop_assert!((got - a.abs() * base).abs() <= 1e-8 * got.max(1.0));
        }
    }

    #[test]
    fn quasi_triangle_inequality(xs in cells(), ys in cells()) {
        let (mu, f) = setup(xs);
        let g = CellFunction::from_row_major(mu.grid().clone(), ys).unwrap();
        let sum = f.zip_map(&g, |a, b| a + b).unwrap();
        let root = mu.grid().root();
        for family in [
            NormFamily::Lp(2.0),
            NormFamily::WeakLp(1.5),
            NormFamily::WeakOrlicz(YoungFunction::power(2.0).unwrap()),
        ] {
            let k = family.geom_k();
            let spec = LocalNormSpec::with_measure_functional(family, mu.clone());
            let ns = spec.norm(&sum, &root).unwrap();
            let bound = k * (spec.norm(&f, &root).unwrap() + spec.norm(&g, &root).unwrap());
            prop_assert!(ns <= bound + 1e-8, "{ns} > {bound}");
        }
    }

    #[test]
    fn oscillation_is_shift_invariant_and_subaveraged(values in cells(), c in -5.0f64..5.0) {
        let (mu, f) = setup(values);
        let root = mu.grid().root();
        let osc = oscillation(&f, &root, &mu).unwrap();
        let shifted = oscillation(&f.map(|v| v + c).unwrap(), &root, &mu).unwrap();
        prop_assert!((osc - shifted).abs() <= 1e-10 * osc.max(1.0));

        // oscillation never exceeds twice the centered L1 average
        let avg = mu.cube_average(&f, &root).unwrap();
        let l1 = mu.cube_average(&f.map(|v| (v - avg).abs()).unwrap(), &root).unwrap();
        prop_assert!((osc - l1).abs() <= 1e-12 * osc.max(1.0));
    }

    #[test]
    fn stopping_decomposition_invariants(values in prop::collection::vec(0.0f64..8.0, 16), l in 1.0f64..8.0) {
        let (mu, g) = setup(values);
        let root = mu.grid().root();
        let avg = mu.cube_average(&g, &root).unwrap();
        prop_assume!(avg <= l);
        let cz = cz_decompose(&g, &root, &mu, l).unwrap();
        for a in &cz.averages {
            prop_assert!(*a > l && *a <= 2.0 * l + 1e-12);
        }
        let union = cz.selected.union_mass(&mu).unwrap();
        prop_assert!(union <= avg / l + 1e-12);
    }

    #[test]
    fn tail_is_a_distribution_function(values in cells(), t in 0.0f64..10.0) {
        let (mu, f) = setup(values);
        let root = mu.grid().root();
        let a = jn_tail(&f, &root, &mu, t).unwrap();
        let b = jn_tail(&f, &root, &mu, t + 0.5).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b <= a);
    }
}
