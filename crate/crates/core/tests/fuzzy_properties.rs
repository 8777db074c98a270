use proptest::prelude::*;

use wilc::fuzzy::{
    build_memberships, fuzzy_pd, FuzzyPdConfig, Inference, Label, SfDcGenes, Universes, DC_RANGE,
    SF_RANGE,
};

fn genes() -> impl Strategy<Value = SfDcGenes> {
    let sf = SF_RANGE.0..=SF_RANGE.1;
    let dc = DC_RANGE.0..=DC_RANGE.1;
    (sf.clone(), sf.clone(), sf, dc.clone(), dc.clone(), dc)
        .prop_map(|(a, b, c, d, e, f)| SfDcGenes::from_array([a, b, c, d, e, f]))
}

fn inference() -> impl Strategy<Value = Inference> {
    prop_oneof![Just(Inference::ProductSum), Just(Inference::MinMax)]
}

fn config(g: &SfDcGenes, inf: Inference) -> FuzzyPdConfig {
    build_memberships(g, &Universes::for_stroke(0.5))
        .unwrap()
        .with_inference(inf)
}

proptest! {
    #[test]
    fn odd_symmetry_is_exact(g in genes(), inf in inference(), x in -1.5..1.5f64, y in -1.5..1.5f64) {
        let cfg = config(&g, inf);
        let (e, de) = (x * cfg.input_e.bound(), y * cfg.input_de.bound());
        prop_assert_eq!(fuzzy_pd(-e, -de, &cfg), -fuzzy_pd(e, de, &cfg));
    }

    #[test]
    fn monotone_in_each_input(g in genes(), x in -1.0..1.0f64, y in -1.0..1.0f64, step in 0.0..0.5f64) {
        let cfg = config(&g, Inference::ProductSum);
        let (ue, ud) = (cfg.input_e.bound(), cfg.input_de.bound());
        let (e, de) = (x * ue, y * ud);
        let u = fuzzy_pd(e, de, &cfg);
        prop_assert!(fuzzy_pd((e + step * ue).min(ue), de, &cfg) >= u);
        prop_assert!(fuzzy_pd(e, (de + step * ud).min(ud), &cfg) >= u);
    }

    #[test]
    fn output_is_bounded(g in genes(), inf in inference(), e in -10.0..10.0f64, de in -10.0..10.0f64) {
        let cfg = config(&g, inf);
        let pl = cfg.output.center(Label::PL);
        prop_assert!(fuzzy_pd(e, de, &cfg).abs() <= pl);
    }

    #[test]
    fn memberships_partition_unity(g in genes(), x in -2.0..2.0f64) {
        let cfg = config(&g, Inference::ProductSum);
        for set in [&cfg.input_e, &cfg.input_de, &cfg.output] {
            let sum: f64 = set.degrees(x * set.bound()).iter().sum();
            prop_assert!((sum - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn centers_follow_the_placement_rule(g in genes()) {
        let u = Universes::for_stroke(0.5);
        let cfg = build_memberships(&g, &u).unwrap();
        let c = cfg.input_e.centers();
        prop_assert!((c[4] - g.s_e * u.e).abs() < 1e-15);
        prop_assert!((c[3] - g.d_e * g.s_e * u.e).abs() < 1e-15);
        prop_assert_eq!(c[2], 0.0);
        prop_assert_eq!(c[0], -c[4]);
        prop_assert_eq!(c[1], -c[3]);
        prop_assert!(c.windows(2).all(|w| w[0] < w[1]));
    }

    // near the origin the surface behaves like K_p·e + K_d·Δe
    #[test]
    fn small_signal_gains(g in genes(), x in -1.0..1.0f64, y in -1.0..1.0f64) {
        let cfg = config(&g, Inference::ProductSum);
        let e = 0.1 * x * cfg.input_e.center(Label::PS);
        let de = 0.1 * y * cfg.input_de.center(Label::PS);
        let (pe, pd) = (cfg.small_signal_kp() * e, cfg.small_signal_kd() * de);
        let scale = pe.abs() + pd.abs();
        prop_assume!(scale > 0.0);
        prop_assert!((fuzzy_pd(e, de, &cfg) - pe - pd).abs() <= 0.1 * scale);
    }

    #[test]
    fn out_of_range_genes_are_rejected(bad in prop_oneof![0.0..0.0999f64, 1.0001..2.0f64]) {
        let mut g = SfDcGenes::midpoint();
        g.s_e = bad;
        prop_assert!(build_memberships(&g, &Universes::for_stroke(0.5)).is_err());
    }
}

// max aggregation loses monotonicity; the dip is small but real
#[test]
fn min_max_is_not_monotone() {
    let g = SfDcGenes::from_array([0.67956, 0.46008, 0.1, 0.86322, 0.74523, 0.5]);
    let cfg = config(&g, Inference::MinMax);
    let (ue, ud) = (cfg.input_e.bound(), cfg.input_de.bound());
    let de = -0.2475 * ud;
    let us: Vec<f64> = (0..=2000)
        .map(|i| fuzzy_pd(-ue + 2.0 * ue * i as f64 / 2000.0, de, &cfg))
        .collect();
    let drop = us.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
    assert!(
        drop > 1e-4 && drop < 0.01 * cfg.output.center(Label::PL),
        "{drop}"
    );
}

#[test]
fn unit_scale_centers() {
    let g = SfDcGenes::from_array([1.0, 1.0, 1.0, 0.5, 0.5, 0.5]);
    let u = Universes {
        e: 1.0,
        de: 1.0,
        out: 1.0,
    };
    assert_eq!(
        build_memberships(&g, &u).unwrap().input_e.centers(),
        [-1.0, -0.5, 0.0, 0.5, 1.0]
    );
}

#[test]
fn default_genes_input_centers() {
    let g = SfDcGenes::from_array(wilc::config::DEFAULT_GENES);
    let u = Universes {
        e: 1.0,
        de: 1.0,
        out: 1.0,
    };
    let c = build_memberships(&g, &u).unwrap().input_e.centers();
    assert!((c[4] - 0.21943).abs() < 1e-12);
    assert!((c[3] - 0.18198).abs() < 5e-6);
}

#[test]
fn zero_input_gives_zero_output() {
    let cfg = config(&SfDcGenes::midpoint(), Inference::ProductSum);
    assert_eq!(fuzzy_pd(0.0, 0.0, &cfg), 0.0);
}
