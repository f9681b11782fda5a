use hj_core::level_set::{
    build_edge_profile, default_h_grid, default_q_grid, effective_g, effective_g_line, seed_point, trace_level,
    OrbitOptions, ProfileOptions,
};
use hj_core::polynomial::Polynomial;
use hj_core::{GFamily, HamiltonianSpec, RegionMap};
use proptest::prelude::*;

/// `|h|` log-spaced in `[1e-4, |h_i|]` on edge `e`.
fn level(spec: &HamiltonianSpec, e: usize, t: f64) -> f64 {
    let hi = spec.thresholds.level(e);
    hi.signum() * 1e-4 * (hi.abs() / 1e-4).powf(t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn traced_orbits_conserve_energy_and_close(e in 0usize..3, t in 0.0..1.0f64) {
        let spec = HamiltonianSpec::double_well();
        let h = level(&spec, e, t);
        let o = trace_level(&spec, e, h, &OrbitOptions::default()).unwrap();
        prop_assert!(o.energy_drift(&spec) <= 1e-8 * (1.0 + h.abs()));
        prop_assert!(o.closure_gap() <= 1e-6 * o.diameter);
        prop_assert!(o.period > 0.0 && o.length > 0.0);
    }

    #[test]
    fn time_and_line_averages_agree(e in 0usize..3, t in 0.0..1.0f64, q in -4.0..4.0f64) {
        let spec = HamiltonianSpec::double_well();
        let map = RegionMap::reference(&spec, 201);
        let g = GFamily::games(&spec, &map, 2.0, Polynomial::from_triples(&[(2, 0, 1.0)]));
        let opts = OrbitOptions::default();
        let h = level(&spec, e, t);
        let o = trace_level(&spec, e, h, &opts).unwrap();
        let a = effective_g(&spec, &g, &o, q);
        let (b, period) = effective_g_line(&spec, &g, seed_point(&spec, e, h).unwrap(), q, &opts).unwrap();
        prop_assert!((a.value - b.value).abs() <= 10.0 * a.error.max(b.error).max(1e-12),
            "{} vs {} (errors {}, {})", a.value, b.value, a.error, b.error);
        prop_assert!((period - o.period).abs() <= 1e-7 * o.period);
    }
}

#[test]
fn period_envelope_vanishes_toward_the_node() {
    let spec = HamiltonianSpec::double_well();
    let alpha = spec.exponents.alpha();
    for e in 0..3 {
        let sign = spec.thresholds.level(e).signum();
        let scaled: Vec<f64> = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
            .iter()
            .map(|m| trace_level(&spec, e, sign * m, &OrbitOptions::default()).unwrap().period * m.powf(alpha))
            .collect();
        assert!(scaled.windows(2).all(|w| w[1] < w[0]), "edge {e}: {scaled:?}");
    }
}

#[test]
fn mirror_wells_have_matching_tables() {
    let spec = HamiltonianSpec::double_well();
    let map = RegionMap::reference(&spec, 201);
    let g = GFamily::games(&spec, &map, 2.0, Polynomial::default());
    let opts = ProfileOptions {
        n_uniform: 10,
        n_q: 21,
        ..Default::default()
    };
    let qs = default_q_grid(opts.q_max, opts.n_q);
    let [p1, p2] = [1, 2].map(|e| build_edge_profile(&spec, &map, &g, e, &default_h_grid(&spec, e, &opts), &qs, &opts));
    assert_eq!(p1.h_grid, p2.h_grid);
    for k in 0..p1.g.len() {
        let tol = 10.0 * (p1.error[k] + p2.error[k]) + 1e-12;
        assert!((p1.g[k] - p2.g[k]).abs() <= tol, "entry {k}: {} vs {}", p1.g[k], p2.g[k]);
    }
}
