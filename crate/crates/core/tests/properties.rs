use proptest::prelude::*;

use socpref::analysis::{
    check_bilinear, counterbalance, probe_bilinearity, verify_theorem, Method, ProbeConfig,
};
use socpref::fixture;
use socpref::game::{expected_material_payoff, pure_profile, Game, MixedStrategy, Profile};
use socpref::social::{eval_social, SocialFunctional};
use socpref::utility::{
    evaluate, multilinear_extension, restrict_to_pure, UtilitySpec, UtilityTable,
};

fn matrix(m: usize, n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-10.0..10.0f64, n), m)
}

fn simplex(len: usize) -> impl Strategy<Value = MixedStrategy> {
    prop::collection::vec(0.0..1.0f64, len)
        .prop_filter("some mass", |w| w.iter().sum::<f64>() > 1e-3)
        .prop_map(|w| MixedStrategy::new(w).unwrap())
}

type Case = (Game, Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<Profile>);

/// A game with two utility tables and a handful of profiles on it.
fn game_case() -> impl Strategy<Value = Case> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(m, n)| {
        (
            matrix(m, n),
            matrix(m, n),
            matrix(m, n),
            matrix(m, n),
            prop::collection::vec((simplex(m), simplex(n)), 1..6),
        )
            .prop_map(|(m1, m2, a, b, ps)| {
                let g = Game::unlabeled(m1, m2).unwrap();
                let ps = ps.into_iter().map(|(r, c)| Profile::new(r, c)).collect();
                (g, a, b, ps)
            })
    })
}

fn small_cfg(seed: u64) -> ProbeConfig {
    ProbeConfig {
        n_random: 100,
        ..ProbeConfig::with_seed(seed)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn payoffs_at_vertices_are_exact((g, _, _, _) in game_case()) {
        for i in 0..g.rows() {
            for j in 0..g.cols() {
                let p = pure_profile(&g, i, j).unwrap();
                prop_assert_eq!(expected_material_payoff(&g, &p).unwrap(), (g.m1()[i][j], g.m2()[i][j]));
            }
        }
    }

    #[test]
    fn payoffs_linear_in_each_side((g, _, _, ps) in game_case(), lambda in 0.0..=1.0f64) {
        let (p, q) = (&ps[0], &ps[ps.len() - 1]);
        let row_mix = Profile::new(p.row.mix(&q.row, lambda).unwrap(), p.col.clone());
        let (a1, a2) = expected_material_payoff(&g, &Profile::new(p.row.clone(), p.col.clone())).unwrap();
        let (b1, b2) = expected_material_payoff(&g, &Profile::new(q.row.clone(), p.col.clone())).unwrap();
        let (x1, x2) = expected_material_payoff(&g, &row_mix).unwrap();
        prop_assert!((x1 - (lambda * a1 + (1.0 - lambda) * b1)).abs() <= 1e-9);
        prop_assert!((x2 - (lambda * a2 + (1.0 - lambda) * b2)).abs() <= 1e-9);

        let col_mix = Profile::new(p.row.clone(), p.col.mix(&q.col, lambda).unwrap());
        let (b1, b2) = expected_material_payoff(&g, &Profile::new(p.row.clone(), q.col.clone())).unwrap();
        let (x1, x2) = expected_material_payoff(&g, &col_mix).unwrap();
        prop_assert!((x1 - (lambda * a1 + (1.0 - lambda) * b1)).abs() <= 1e-9);
        prop_assert!((x2 - (lambda * a2 + (1.0 - lambda) * b2)).abs() <= 1e-9);
    }

    #[test]
    fn relabeling_rows_leaves_payoffs_unchanged((g, _, _, ps) in game_case()) {
        let m = g.rows();
        let perm: Vec<usize> = (0..m).rev().collect();
        let permute = |x: &Vec<Vec<f64>>| perm.iter().map(|&i| x[i].clone()).collect::<Vec<_>>();
        let labels: Vec<String> = perm.iter().map(|&i| g.row_labels()[i].clone()).collect();
        let h = Game::new(labels, g.col_labels().to_vec(), permute(g.m1()), permute(g.m2()), None).unwrap();
        for p in &ps {
            let row: Vec<f64> = perm.iter().map(|&i| p.row.probs()[i]).collect();
            let q = Profile::new(MixedStrategy::new(row).unwrap(), p.col.clone());
            let (a, b) = expected_material_payoff(&g, p).unwrap();
            let (c, d) = expected_material_payoff(&h, &q).unwrap();
            prop_assert!((a - c).abs() <= 1e-9 && (b - d).abs() <= 1e-9);
        }
    }

    #[test]
    fn vertex_agreement_for_any_spec((g, a, _, _) in game_case(), penalty in 0.0..3.0f64) {
        let spec = UtilitySpec::sum(
            UtilitySpec::table(a).unwrap(),
            UtilitySpec::social(SocialFunctional::step(penalty).unwrap()),
        );
        let t = restrict_to_pure(&spec, &g).unwrap();
        for i in 0..g.rows() {
            for j in 0..g.cols() {
                let p = pure_profile(&g, i, j).unwrap();
                prop_assert_eq!(multilinear_extension(&t, &p).unwrap(), evaluate(&spec, &g, &p).unwrap());
            }
        }
    }

    #[test]
    fn tables_evaluate_to_their_extension((g, a, _, ps) in game_case()) {
        let t = UtilityTable::new(a.clone()).unwrap();
        let spec = UtilitySpec::EuTable(t.clone());
        for p in &ps {
            prop_assert!((evaluate(&spec, &g, p).unwrap() - multilinear_extension(&t, p).unwrap()).abs() <= 1e-9);
        }
    }

    #[test]
    fn nested_affine_is_one_affine_map(
        (g, a, _, ps) in game_case(),
        s1 in 0.01..5.0f64, c1 in -5.0..5.0f64, s2 in 0.01..5.0f64, c2 in -5.0..5.0f64,
    ) {
        let base = UtilitySpec::table(a).unwrap();
        let nested = UtilitySpec::affine(UtilitySpec::affine(base.clone(), s1, c1).unwrap(), s2, c2).unwrap();
        let single = UtilitySpec::affine(base, s1 * s2, s2 * c1 + c2).unwrap();
        for p in &ps {
            prop_assert!((evaluate(&nested, &g, p).unwrap() - evaluate(&single, &g, p).unwrap()).abs() <= 1e-9);
        }
    }

    #[test]
    fn sum_undoes_difference((g, a, b, ps) in game_case(), alpha in 0.0..1.0f64) {
        let f = UtilitySpec::sum(
            UtilitySpec::table(a).unwrap(),
            UtilitySpec::social(SocialFunctional::linear(alpha, 0.3).unwrap()),
        );
        let h = UtilitySpec::table(b).unwrap();
        let back = UtilitySpec::sum(UtilitySpec::difference(f.clone(), h.clone()), h);
        for p in &ps {
            prop_assert!((evaluate(&back, &g, p).unwrap() - evaluate(&f, &g, p).unwrap()).abs() <= 1e-9);
        }
    }

    #[test]
    fn step_is_symmetric_in_players((g, _, _, ps) in game_case(), penalty in 0.0..3.0f64) {
        let f = SocialFunctional::step(penalty).unwrap();
        let swapped = g.with_swapped_payoffs();
        for p in &ps {
            prop_assert_eq!(eval_social(&f, &g, p).unwrap(), eval_social(&f, &swapped, p).unwrap());
        }
    }

    #[test]
    fn symmetric_linear_is_scaled_gap((g, _, _, ps) in game_case(), alpha in 0.0..2.0f64) {
        let f = SocialFunctional::linear(alpha, alpha).unwrap();
        for p in &ps {
            let (x, y) = expected_material_payoff(&g, p).unwrap();
            prop_assert!((eval_social(&f, &g, p).unwrap() + alpha * (x - y).abs()).abs() <= 1e-12);
        }
    }

    #[test]
    fn structural_verdicts_are_sound((g, a, b, _) in game_case(), scale in 0.1..4.0f64, seed in any::<u64>()) {
        let spec = UtilitySpec::difference(
            UtilitySpec::affine(UtilitySpec::table(a).unwrap(), scale, 1.5).unwrap(),
            UtilitySpec::table(b).unwrap(),
        );
        let cfg = ProbeConfig::with_seed(seed);
        let v = check_bilinear(&spec, &g, &cfg).unwrap();
        prop_assert_eq!(v.method, Method::Structural);
        let sampled = probe_bilinearity(&spec, &g, &cfg).unwrap();
        prop_assert!(sampled.max_deviation <= 1e-12, "deviation {}", sampled.max_deviation);
    }

    #[test]
    fn zero_social_never_deviates((g, _, _, _) in game_case(), seed in any::<u64>()) {
        let v = check_bilinear(&UtilitySpec::social(SocialFunctional::ZeroSocial), &g, &small_cfg(seed)).unwrap();
        prop_assert!(v.passed);
        prop_assert_eq!(v.max_deviation, 0.0);
    }

    #[test]
    fn decomposition_rows_add_up((g, a, _, _) in game_case(), penalty in 0.0..3.0f64, seed in any::<u64>()) {
        let ug = UtilitySpec::table(a).unwrap();
        let s = UtilitySpec::social(SocialFunctional::step(penalty).unwrap());
        let (ud, report) = counterbalance(&ug, &s, &g, &small_cfg(seed)).unwrap();
        prop_assert!(report.theorem_consistent);
        for row in &report.probes {
            prop_assert!((row.u_g - row.u_d - row.s).abs() <= 1e-12);
        }
        let report = verify_theorem(&ug, &ud, &g, &small_cfg(seed)).unwrap();
        for row in &report.probes {
            prop_assert!((row.u_g - row.u_d - row.s).abs() <= 1e-12);
        }
    }

    #[test]
    fn verdicts_are_deterministic((g, a, _, _) in game_case(), seed in any::<u64>()) {
        let spec = UtilitySpec::sum(
            UtilitySpec::table(a).unwrap(),
            UtilitySpec::social(SocialFunctional::linear(0.2, 0.1).unwrap()),
        );
        let x = probe_bilinearity(&spec, &g, &small_cfg(seed)).unwrap();
        let y = probe_bilinearity(&spec, &g, &small_cfg(seed)).unwrap();
        prop_assert_eq!(x.max_deviation.to_bits(), y.max_deviation.to_bits());
        prop_assert_eq!(x, y);
    }
}

#[test]
fn linear_aversion_also_fails_on_example_game() {
    let g = fixture::example_game();
    let f = SocialFunctional::linear(0.05, 0.05).unwrap();
    // Brute force: vertex values -0.05 * |m1 - m2|, averaged at the centroid,
    // against the functional at the centroid where expected payoffs tie.
    let mut vertex_sum = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            vertex_sum += -0.05 * (g.m1()[i][j] - g.m2()[i][j]).abs();
        }
    }
    let centroid_extension = vertex_sum / 4.0;
    let centroid_value = 0.0;
    let gap = (centroid_extension - centroid_value).abs();
    assert!((gap - 1.0).abs() <= 1e-12);

    let v = check_bilinear(&UtilitySpec::social(f), &g, &ProbeConfig::default()).unwrap();
    assert!(!v.passed);
    assert!(v.max_deviation >= gap - 1e-12);
}
