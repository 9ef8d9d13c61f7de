use super::*;
use crate::model::OrderRelation;
use crate::rounding::tests::random_total_order_instance;

fn unit_set(elems: &[(ItemId, u64)]) -> CoverSet {
    CoverSet::new(elems.iter().copied(), Rat::one())
}

fn gen_instance(sets: Vec<CoverSet>, mults: Vec<(ItemId, u64)>, n: ItemId) -> Instance {
    Instance::new(
        mults,
        OrderRelation::total(1..=n).unwrap(),
        SetSystemSpec::Generators { sets },
        None,
    )
    .unwrap()
}

#[test]
fn dyadic_grouping_shape() {
    let inst = gen_instance(vec![unit_set(&[(1, 3)])], vec![(1, 4), (2, 7)], 2);
    let g = dyadic_grouping(&inst, &inst.demand()).unwrap();
    assert_eq!(g.total, 11);
    let sizes: Vec<u64> = g.groups.iter().map(|x| x.size).collect();
    assert_eq!(sizes, vec![1, 2, 4, 4]);
    // groups are descending: every run in group i is >= every run in i+1
    assert_eq!(g.groups[0].representative, 1);
    assert_eq!(g.groups[2].representative, 1);
    // k <= ceil(log2 N)
    assert!(g.groups.len() as u32 - 1 <= 64 - (g.total.leading_zeros()));
}

#[test]
fn dp_two_approx_spec_examples() {
    // 1 item type, multiplicity 5, capacity-2 unit-cost sets: cost 3
    let inst = gen_instance(vec![unit_set(&[(1, 2)])], vec![(1, 5)], 1);
    let (solution, _) = dp_two_approx(&inst, &ApproxOptions::default()).unwrap();
    assert_eq!(solution.cost(), Rat::from(3u64));

    // empty instance: cost 0
    let inst = gen_instance(vec![unit_set(&[(1, 2)])], vec![(1, 0)], 1);
    let (solution, _) = dp_two_approx(&inst, &ApproxOptions::default()).unwrap();
    assert_eq!(solution.cost(), Rat::zero());
}

#[test]
fn dp_two_approx_within_twice_exact() {
    for seed in 100..140 {
        let inst = random_total_order_instance(seed, 10, 4);
        if inst.demand().is_zero() {
            continue;
        }
        let (solution, _) = dp_two_approx(&inst, &ApproxOptions::default()).unwrap();
        solution.verify(&inst, &inst.demand()).unwrap();
        let exact = exact_opt(&inst, &ExactOptions::default())
            .unwrap()
            .value
            .expect("within budget");
        assert!(
            solution.cost() <= Rat::from(2u64) * &exact,
            "seed {seed}: {} > 2 * {exact}",
            solution.cost()
        );
    }
}

/// Exhaustive cover search over the DP's own pattern set, as an independent
/// check of table optimality.
fn exhaustive_cover(patterns: &[lp::Pattern], demand: &Demand) -> Option<Rat> {
    let ids: Vec<ItemId> = demand.ids().collect();
    fn rec(
        patterns: &[lp::Pattern],
        ids: &[ItemId],
        p: usize,
        residual: &mut Vec<u64>,
        cost: Rat,
        best: &mut Option<Rat>,
    ) {
        if best.as_ref().is_some_and(|b| cost >= *b) {
            return;
        }
        if residual.iter().all(|&v| v == 0) {
            *best = Some(cost);
            return;
        }
        if p == patterns.len() {
            return;
        }
        let pat = &patterns[p];
        let mut ub = 0;
        for (i, &id) in ids.iter().enumerate() {
            let c = pat.get(id);
            if c > 0 && residual[i] > 0 {
                ub = ub.max(residual[i].div_ceil(c));
            }
        }
        for take in 0..=ub {
            let mut next = residual.clone();
            for (i, &id) in ids.iter().enumerate() {
                next[i] = next[i].saturating_sub(take * pat.get(id));
            }
            rec(
                patterns,
                ids,
                p + 1,
                &mut next,
                &cost + &(&pat.cost * &Rat::from(take)),
                best,
            );
        }
    }
    let mut best = None;
    let mut residual: Vec<u64> = ids.iter().map(|&id| demand.get(id)).collect();
    rec(patterns, &ids, 0, &mut residual, Rat::zero(), &mut best);
    best
}

#[test]
fn dp_table_matches_exhaustive_enumeration() {
    for seed in 200..230 {
        let inst = random_total_order_instance(seed, 8, 3);
        let demand = inst.demand();
        if demand.is_zero() || demand.total() > 12 {
            continue;
        }
        let (_, table) = dp_two_approx(&inst, &ApproxOptions::default()).unwrap();
        let rounded = dyadic_grouping(&inst, &demand).unwrap().rounded_demand();
        let root: Vec<u64> = table.reps.iter().map(|&id| rounded.get(id)).collect();
        let dp_value = table.entries[&root].0.clone();
        let oracle = exhaustive_cover(&table.patterns, &rounded).expect("coverable");
        assert_eq!(dp_value, oracle, "seed {seed}");
    }
}

#[test]
fn lambda_formula() {
    // single element: max(8 ln 4, 4) ≈ 11.09
    let l = lambda_for(1);
    assert!((l.to_f64() - 11.090354888959125).abs() < 1e-9);
    assert!(lambda_for(64) >= lambda_for(1));
    assert!(lambda_for(1) >= Rat::from(4u64));
}

#[test]
fn rand_round_deterministic_success_without_randomness() {
    // crafted solution with integral λ·x: no Bernoulli draws, ample slots
    let inst = gen_instance(vec![unit_set(&[(1, 4)])], vec![(1, 4)], 1);
    let lambda = lambda_for(4);
    let weight = Rat::from(8u64) / lambda.clone();
    let x = FractionalSolution {
        entries: vec![(
            lp::Pattern::new(BTreeMap::from([(1u32, 4u64)]), Rat::one()),
            weight.clone(),
        )],
        objective: weight,
        basic: false,
    };
    for seed in [0, 1, 99] {
        let out = rand_mult_round(&inst, &x, seed, &RandRoundOptions::default()).unwrap();
        assert_eq!(out.succeeded_trial, Some(0), "seed {seed}");
        let sol = out.solution.unwrap();
        sol.verify(&inst, &inst.demand()).unwrap();
        assert_eq!(out.stats.len(), 1);
        assert!(out.stats[0].failed_levels.is_empty());
    }
}

#[test]
fn rand_round_trials_replay_bit_exactly() {
    let inst = random_total_order_instance(7, 12, 4);
    let demand = inst.demand();
    if demand.is_zero() {
        return;
    }
    let mut lp_opts = LpOptions::default();
    lp_opts.cap_at_demand = true;
    let x = lp::optimal_fractional(&inst, &demand, &lp_opts).unwrap();
    let a = rand_mult_round(&inst, &x, 1234, &RandRoundOptions::default()).unwrap();
    let b = rand_mult_round(&inst, &x, 1234, &RandRoundOptions::default()).unwrap();
    assert_eq!(a.succeeded_trial, b.succeeded_trial);
    assert_eq!(a.stats.len(), b.stats.len());
    for (sa, sb) in a.stats.iter().zip(&b.stats) {
        assert_eq!(sa.cost, sb.cost);
        assert_eq!(sa.failed_levels, sb.failed_levels);
        assert_eq!(sa.success, sb.success);
    }
}

#[test]
fn rand_round_success_cost_within_budget() {
    for seed in 300..320 {
        let inst = random_total_order_instance(seed, 10, 4);
        let demand = inst.demand();
        if demand.is_zero() {
            continue;
        }
        let mut lp_opts = LpOptions::default();
        lp_opts.cap_at_demand = true;
        let x = lp::optimal_fractional(&inst, &demand, &lp_opts).unwrap();
        let out = rand_mult_round(&inst, &x, seed, &RandRoundOptions::default()).unwrap();
        if let Some(t) = out.succeeded_trial {
            let stat = &out.stats[t];
            let budget = Rat::from(4u64) * &out.lambda * &x.objective;
            assert!(stat.cost <= budget);
            out.solution.unwrap().verify(&inst, &demand).unwrap();
        }
    }
}

#[test]
fn first_fit_spec_examples() {
    let sizes = vec![
        Rat::new(3, 5),
        Rat::new(1, 2),
        Rat::new(2, 5),
        Rat::new(3, 10),
    ];
    let bins = first_fit(&sizes, &Rat::one()).unwrap();
    assert_eq!(bins, vec![vec![0, 2], vec![1, 3]]);

    assert!(first_fit(&[], &Rat::one()).unwrap().is_empty());
    assert_eq!(first_fit(&[Rat::new(1, 2)], &Rat::one()).unwrap().len(), 1);
    assert!(first_fit(&[Rat::new(3, 2)], &Rat::one()).is_err());
}

#[test]
fn first_fit_half_full_bound() {
    use rand::RngCore;
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let n = 1 + rng.next_u32() % 20;
        let sizes: Vec<Rat> = (0..n)
            .map(|_| Rat::new(1 + (rng.next_u32() % 10) as i64, 10))
            .collect();
        let bins = first_fit(&sizes, &Rat::one()).unwrap();
        let total: Rat = sizes.iter().sum();
        assert!(Rat::from(bins.len()) <= Rat::from(2u64) * total + Rat::one());
    }
}

#[test]
fn exact_opt_spec_examples() {
    // 300 copies, capacity 200: optimum 2 by ceiling division
    let inst = gen_instance(vec![unit_set(&[(1, 200)])], vec![(1, 300)], 1);
    let exact = exact_opt(&inst, &ExactOptions::default()).unwrap();
    assert_eq!(exact.value, Some(Rat::from(2u64)));

    // integral-LP instance: optimum equals the LP value
    let inst = gen_instance(
        vec![unit_set(&[(1, 1)]), unit_set(&[(2, 2)])],
        vec![(1, 1), (2, 4)],
        2,
    );
    let lp_val = lp::optimal_fractional(&inst, &inst.demand(), &LpOptions::default())
        .unwrap()
        .objective;
    let exact = exact_opt(&inst, &ExactOptions::default()).unwrap();
    assert_eq!(exact.value, Some(lp_val));
}

#[test]
fn exact_opt_between_lp_and_rounding() {
    for seed in 400..440 {
        let inst = random_total_order_instance(seed, 12, 4);
        let demand = inst.demand();
        if demand.is_zero() {
            continue;
        }
        let lp_val = lp::optimal_fractional(&inst, &demand, &LpOptions::default())
            .unwrap()
            .objective;
        let (rounded, _) =
            rounding::additive_round(&inst, &rounding::RoundingOptions::default()).unwrap();
        let exact = exact_opt(&inst, &ExactOptions::default())
            .unwrap()
            .value
            .expect("within budget");
        assert!(exact >= lp_val, "seed {seed}");
        assert!(exact <= rounded.cost(), "seed {seed}");
    }
}

#[test]
fn exact_opt_budget_exhaustion_is_reported() {
    let inst = random_total_order_instance(5, 16, 6);
    let out = exact_opt(
        &inst,
        &ExactOptions {
            node_budget: 1,
            ..ExactOptions::default()
        },
    )
    .unwrap();
    // either it solved at the root bound or the budget ran out
    if out.value.is_none() {
        assert!(out.nodes >= 1);
    }
}

/// Small independent oracle: exact optimum over the realized family by
/// exhaustive search on the generator counts.
fn brute_force_opt(inst: &Instance, max_per: u64) -> Option<Rat> {
    let SetSystemSpec::Generators { sets } = inst.system() else {
        return None;
    };
    let demand = inst.demand();
    let mut best: Option<Rat> = None;
    let k = sets.len();
    let mut counts = vec![0u64; k];
    loop {
        let with_counts: Vec<(&BTreeMap<ItemId, u64>, u64)> = sets
            .iter()
            .zip(&counts)
            .filter(|(_, &c)| c > 0)
            .map(|(s, &c)| (&s.elements, c))
            .collect();
        if model::can_cover(&with_counts, &demand, inst.order()) {
            let cost: Rat = sets
                .iter()
                .zip(&counts)
                .map(|(s, &c)| &s.cost * &Rat::from(c))
                .sum();
            if best.as_ref().is_none_or(|b| cost < *b) {
                best = Some(cost);
            }
        }
        let mut i = 0;
        loop {
            if i == k {
                return best;
            }
            counts[i] += 1;
            if counts[i] <= max_per {
                break;
            }
            counts[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn exact_opt_matches_brute_force() {
    for seed in 500..525 {
        let inst = random_total_order_instance(seed, 6, 3);
        let demand = inst.demand();
        if demand.is_zero() || demand.total() > 10 {
            continue;
        }
        let exact = exact_opt(&inst, &ExactOptions::default())
            .unwrap()
            .value
            .expect("within budget");
        let oracle = brute_force_opt(&inst, demand.total().max(2)).expect("coverable");
        assert_eq!(exact, oracle, "seed {seed}");
    }
}
