mod common;

use common::{random_function, random_instance, random_joint};
use fncomp_core::regions::{fusion_generator, inner_region, membership, outer_region, AuxDistribution};
use fncomp_core::search::{generate, minimize_single_user, CapacityHull, SearchConfig, SearchMode, HULL_TOL};
use fncomp_core::{
    Channel, CollusionFamily, JointPmf, ProductChannelModel, RateLeakagePoint, UserSet, VarSet,
};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn vs(v: &[usize]) -> VarSet {
    VarSet::new(v.to_vec()).unwrap()
}

/// All collusion sets other than the empty and the full set.
fn proper_family(users: usize) -> CollusionFamily {
    let sets = UserSet::all(users)
        .filter(|s| !s.is_empty() && *s != UserSet::full(users))
        .collect();
    CollusionFamily::new(users, sets).unwrap()
}

fn model(inst: &common::Instance) -> ProductChannelModel {
    ProductChannelModel::from_channels(&inst.p_x, &inst.channels, &inst.f, TOL).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn chain_rule_and_nonnegativity(seed in any::<u64>(), sizes in prop::collection::vec(1usize..=3, 4)) {
        let p = random_joint(seed, &sizes);
        let (s, t, u, c) = (vs(&[0]), vs(&[1]), vs(&[2]), vs(&[3]));
        let whole = p.cond_mutual_info(&s, &t.union(&u), &c).unwrap();
        let first = p.cond_mutual_info(&s, &u, &c).unwrap();
        let second = p.cond_mutual_info(&s, &t, &c.union(&u)).unwrap();
        prop_assert!((whole - first - second).abs() <= TOL);
        for v in [whole, first, second] {
            prop_assert!(v >= 0.0);
        }
        prop_assert!(p.entropy(&vs(&[0, 1, 2, 3])).unwrap() >= 0.0);
        prop_assert!(p.conditional_entropy(&s, &t).unwrap() >= 0.0);
    }

    #[test]
    fn channel_extension_keeps_inputs_and_markov_structure(seed in any::<u64>(), users in 1usize..=3) {
        let inst = random_instance(seed, users, 3, 3);
        let ext = inst.p_x.extend_with_channels(&inst.channels).unwrap();
        let back = ext.marginal(&VarSet::range(users..2 * users)).unwrap();
        for (a, b) in back.probs().iter().zip(inst.p_x.probs()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        for l in 0..users {
            let rest: Vec<usize> = (0..2 * users).filter(|&k| k != l && k != users + l).collect();
            let mi = ext.cond_mutual_info(&vs(&[l]), &vs(&rest), &vs(&[users + l])).unwrap();
            prop_assert!(mi <= TOL, "user {l}: {mi}");
        }
    }

    #[test]
    fn g_is_a_contrapolymatroid_equal_to_gbar(seed in any::<u64>(), users in 1usize..=3) {
        let m = model(&random_instance(seed, users, 3, 3));
        let r = m.check_contrapolymatroid(TOL).unwrap();
        prop_assert!(r.holds(), "{r:?}");
        prop_assert!(m.max_g_gbar_residual() <= TOL);
    }

    #[test]
    fn corner_points_sum_to_g_and_lie_in_the_region(seed in any::<u64>(), users in 1usize..=3) {
        let m = model(&random_instance(seed, users, 3, 3));
        let family = proper_family(users);
        let region = inner_region(&m, &family, TOL).unwrap();
        let total = m.g(UserSet::full(users));
        let (delta, delta_a) = region.leakage_floor();
        for (perm, rates) in m.corner_points().unwrap().points {
            prop_assert!((rates.iter().sum::<f64>() - total).abs() <= TOL, "{perm:?}");
            let point = RateLeakagePoint::new(rates, delta, delta_a.clone()).unwrap();
            prop_assert!(membership(&point, &region, TOL).unwrap().member, "{perm:?}");
        }
    }

    #[test]
    fn outer_and_inner_bounds_coincide(seed in any::<u64>(), users in 1usize..=3) {
        let inst = random_instance(seed, users, 3, 3);
        let m = model(&inst);
        let family = proper_family(users);
        let inner = inner_region(&m, &family, TOL).unwrap();
        let dist = AuxDistribution::from_channels(&inst.p_x, &inst.channels, &inst.f).unwrap();
        let outer = outer_region(&dist, &family, TOL).unwrap();
        prop_assert_eq!(inner.rate_bounds.len(), outer.rate_bounds.len());
        for (a, b) in inner.rate_bounds.iter().zip(&outer.rate_bounds) {
            prop_assert_eq!(a.0, b.0);
            prop_assert!((a.1 - b.1).abs() <= 1e-12);
        }
        for (a, b) in inner.delta_a_bounds.iter().zip(&outer.delta_a_bounds) {
            prop_assert!((a.1 - b.1).abs() <= 1e-12);
        }
        prop_assert!((inner.delta_bound.unwrap() - outer.delta_bound.unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn generator_lies_in_its_inner_region(seed in any::<u64>(), users in 1usize..=3) {
        let inst = random_instance(seed, users, 3, 3);
        let family = proper_family(users);
        let point = fusion_generator(&inst.p_x, &inst.channels, &inst.f, &family, TOL).unwrap();
        let region = inner_region(&model(&inst), &family, TOL).unwrap();
        prop_assert!(membership(&point, &region, TOL).unwrap().member);
    }

    #[test]
    fn relabeling_auxiliaries_leaves_the_generator_unchanged(seed in any::<u64>(), users in 1usize..=3) {
        let inst = random_instance(seed, users, 3, 3);
        let family = proper_family(users);
        let relabeled: Vec<Channel> = inst
            .channels
            .iter()
            .map(|c| {
                let rows = c.rows().into_iter().map(|mut r| { r.reverse(); r }).collect();
                Channel::new(rows).unwrap()
            })
            .collect();
        let a = fusion_generator(&inst.p_x, &inst.channels, &inst.f, &family, TOL).unwrap();
        let b = fusion_generator(&inst.p_x, &relabeled, &inst.f, &family, TOL).unwrap();
        for (x, y) in a.coords().iter().zip(b.coords()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn single_user_minimum_is_the_function_entropy(seed in any::<u64>()) {
        let inst = random_instance(seed, 1, 4, 1);
        let f = random_function(seed, &inst.p_x.sizes(), 3);
        let (_, v) = minimize_single_user(&inst.p_x, &f, &SearchConfig::default()).unwrap();
        let hf = inst.p_x.append_function(&f).unwrap().entropy(&VarSet::single(1)).unwrap();
        prop_assert!(v >= hf - TOL);
        prop_assert!((v - hf).abs() <= TOL, "{v} vs H(F) = {hf}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hull_membership_is_monotone(seed in any::<u64>(), bump in prop::collection::vec(0.0f64..0.5, 5)) {
        let inst = random_instance(seed, 2, 2, 1);
        let f = random_function(seed, &inst.p_x.sizes(), 2);
        let family = CollusionFamily::from_lists(2, &[vec![0]]).unwrap();
        let set = generate(&inst.p_x, &f, &family, &SearchConfig::default(), None).unwrap();
        let hull = CapacityHull::new(&set.rate_leakage_points()).unwrap();
        let base = &set.points[set.points.len() / 2].point;
        prop_assert!(hull.contains(base, HULL_TOL).unwrap());
        let c = base.coords();
        let up = RateLeakagePoint::new(
            vec![c[0] + bump[0], c[1] + bump[1]],
            Some(c[2] + bump[2]),
            vec![c[3] + bump[3]],
        )
        .unwrap();
        prop_assert!(hull.contains(&up, HULL_TOL).unwrap());
    }

    #[test]
    fn finer_grid_keeps_coarser_generators(seed in any::<u64>()) {
        let inst = random_instance(seed, 1, 3, 1);
        let f = random_function(seed, &inst.p_x.sizes(), 3);
        let family = CollusionFamily::empty(1);
        let grid = |step| SearchConfig { mode: SearchMode::Grid, grid_step: step, ..SearchConfig::default() };
        let coarse = generate(&inst.p_x, &f, &family, &grid(0.5), None).unwrap();
        let fine = generate(&inst.p_x, &f, &family, &grid(0.25), None).unwrap();
        prop_assert!(!coarse.truncated && !fine.truncated);
        for p in &coarse.points {
            let c = p.point.coords();
            let found = fine.points.iter().any(|q| {
                q.point.coords().iter().zip(&c).all(|(a, b)| (a - b).abs() <= 1e-12)
            });
            prop_assert!(found, "{c:?} missing from the finer grid");
        }
    }
}

#[test]
fn product_pmf_matches_its_marginals() {
    let p = JointPmf::product(&[vec![0.25, 0.75], vec![0.5, 0.2, 0.3]]).unwrap();
    assert!(p.total_correlation(&[VarSet::single(0), VarSet::single(1)]).unwrap() <= 1e-12);
    assert!((p.prob_of(&[1, 2]) - 0.225).abs() < 1e-15);
}
