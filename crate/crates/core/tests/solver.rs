use hj_core::hj2d::{build_masked_grid, solve_eps, NodeClass, SolveOptions};
use hj_core::polynomial::Polynomial;
use hj_core::{BoundaryDatum, GFamily, HamiltonianSpec, RegionMap};
use proptest::prelude::*;

/// `8H = 2x⁴ - 4x² + 4y²` plus a constant.
fn shifted(c: f64) -> BoundaryDatum {
    BoundaryDatum::Polynomial(Polynomial::from_triples(&[(4, 0, 2.0), (2, 0, -4.0), (0, 2, 4.0), (0, 0, c)]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn ordered_data_give_ordered_solutions(c in 0.0..1.0f64, eps in 0.15..0.4f64) {
        let spec = HamiltonianSpec::double_well();
        let map = RegionMap::reference(&spec, 161);
        let g = GFamily::games(&spec, &map, 2.0, Polynomial::default());
        let opts = SolveOptions::default();
        let lo_grid = build_masked_grid(&spec, 96, &shifted(0.0)).unwrap();
        let hi_grid = build_masked_grid(&spec, 96, &shifted(c)).unwrap();
        let lo = solve_eps(&lo_grid, &spec, &g, 1.0, eps, 0.0, &opts).unwrap();
        let hi = solve_eps(&hi_grid, &spec, &g, 1.0, eps, 0.0, &opts).unwrap();
        for k in 0..lo.u.len() {
            if !lo_grid.is_active(k) {
                continue;
            }
            prop_assert!(lo.u[k] <= hi.u[k] + lo.tol.max(hi.tol));
            for (sol, grid) in [(&lo, &lo_grid), (&hi, &hi_grid)] {
                prop_assert!(sol.u[k].abs() <= sol.bound);
                if let NodeClass::Boundary(_) = grid.class[k] {
                    prop_assert!(sol.u[k] <= grid.g[k] + sol.tol);
                }
            }
        }
    }
}

#[test]
fn one_bound_serves_every_eps() {
    let spec = HamiltonianSpec::double_well();
    let map = RegionMap::reference(&spec, 161);
    let g = GFamily::games(&spec, &map, 2.0, Polynomial::default());
    let grid = build_masked_grid(&spec, 128, &BoundaryDatum::ScaledHamiltonian(8.0)).unwrap();
    let sols: Vec<_> = [0.4, 0.2, 0.1]
        .iter()
        .map(|&e| solve_eps(&grid, &spec, &g, 1.0, e, 0.0, &SolveOptions::default()).unwrap())
        .collect();
    // The bound depends on G(·, 0), g and λ only.
    assert!(sols.windows(2).all(|w| w[0].bound == w[1].bound));
    for s in &sols {
        assert!(s.sup_norm() <= s.bound, "{} > {}", s.sup_norm(), s.bound);
        assert!(s.residual_inf <= s.tol);
    }
}
