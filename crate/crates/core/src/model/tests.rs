use super::adapter::first_fit_counts;
use super::*;
use crate::rat::Rat;

fn total(n: ItemId) -> OrderRelation {
    OrderRelation::total(1..=n).unwrap()
}

fn set(elems: &[(ItemId, u64)], cost: Rat) -> CoverSet {
    CoverSet::new(elems.iter().copied(), cost)
}

fn unit(elems: &[(ItemId, u64)]) -> CoverSet {
    set(elems, Rat::one())
}

#[test]
fn leq_total_order() {
    let order = total(3);
    assert!(order.leq(3, 1).unwrap());
    for i in 1..=3 {
        assert!(order.leq(i, i).unwrap());
    }
    assert!(!order.leq(1, 3).unwrap());
    assert!(order.leq(99, 1).is_err());
}

#[test]
fn leq_two_chains() {
    // {a=1 ⪰ b=2, c=3 ⪰ d=4}, chains incomparable
    let order = OrderRelation::from_pairs(1..=4, &[(2, 1), (4, 3)]).unwrap();
    assert!(order.leq(2, 1).unwrap());
    assert!(order.leq(4, 3).unwrap());
    assert!(!order.leq(4, 1).unwrap());
    assert!(!order.leq(1, 4).unwrap());
    assert!(!order.is_total());
}

#[test]
fn pairs_closure_and_antisymmetry() {
    let order = OrderRelation::from_pairs(1..=3, &[(3, 2), (2, 1)]).unwrap();
    assert!(order.leq(3, 1).unwrap(), "closure must add (3, 1)");
    assert!(order.is_total());
    assert!(OrderRelation::from_pairs(1..=2, &[(1, 2), (2, 1)]).is_err());
}

#[test]
fn chain_decompose_total_und_antichain() {
    assert_eq!(total(3).chain_decompose(), vec![vec![1, 2, 3]]);
    let antichain = OrderRelation::from_pairs(1..=3, &[]).unwrap();
    assert_eq!(antichain.chain_decompose().len(), 3);
}

#[test]
fn chain_decompose_two_chains() {
    // {1 ⪰ 3, 2 ⪰ 4}, 1 and 2 incomparable: exhaustive search over chain
    // partitions of 4 elements gives minimum 2
    let order = OrderRelation::from_pairs(1..=4, &[(3, 1), (4, 2)]).unwrap();
    let chains = order.chain_decompose();
    assert_eq!(chains.len(), 2);
    // each chain must be descending
    for chain in &chains {
        for w in chain.windows(2) {
            assert!(order.le(w[1], w[0]));
        }
    }
}

/// Exhaustive minimum chain cover by trying all partitions (n <= 8).
fn exhaustive_min_chains(order: &OrderRelation) -> usize {
    let ids = order.ids();
    let n = ids.len();
    fn is_chain(order: &OrderRelation, items: &[ItemId]) -> bool {
        items.iter().all(|&a| {
            items
                .iter()
                .all(|&b| order.le(a, b) || order.le(b, a))
        })
    }
    // iterate over set partitions via restricted growth strings
    let mut best = n;
    let mut rgs = vec![0usize; n];
    loop {
        let parts = rgs.iter().max().map_or(0, |m| m + 1);
        if parts < best {
            let mut groups: Vec<Vec<ItemId>> = vec![Vec::new(); parts];
            for (i, &g) in rgs.iter().enumerate() {
                groups[g].push(ids[i]);
            }
            if groups.iter().all(|g| is_chain(order, g)) {
                best = parts;
            }
        }
        // next restricted growth string
        let mut i = n as i64 - 1;
        loop {
            if i <= 0 {
                return best;
            }
            let prefix_max = rgs[..i as usize].iter().max().copied().unwrap();
            if rgs[i as usize] <= prefix_max {
                rgs[i as usize] += 1;
                for v in rgs.iter_mut().skip(i as usize + 1) {
                    *v = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// Largest antichain by subset enumeration (n <= 12).
fn exhaustive_max_antichain(order: &OrderRelation) -> usize {
    let ids = order.ids();
    let n = ids.len();
    let mut best = 0;
    for mask in 0u32..(1 << n) {
        let chosen: Vec<ItemId> = (0..n)
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| ids[i])
            .collect();
        let anti = chosen.iter().all(|&a| {
            chosen
                .iter()
                .all(|&b| a == b || (!order.le(a, b) && !order.le(b, a)))
        });
        if anti {
            best = best.max(chosen.len());
        }
    }
    best
}

#[test]
fn dilworth_number_matches_exhaustive_oracles() {
    let cases: Vec<OrderRelation> = vec![
        total(5),
        OrderRelation::from_pairs(1..=4, &[(3, 1), (4, 2)]).unwrap(),
        OrderRelation::from_pairs(1..=5, &[]).unwrap(),
        OrderRelation::from_pairs(1..=5, &[(2, 1), (3, 1), (4, 2), (4, 3), (5, 4)]).unwrap(),
        OrderRelation::from_pairs(1..=6, &[(4, 1), (5, 1), (4, 2), (5, 2), (6, 3)]).unwrap(),
        // diamond plus isolated point
        OrderRelation::from_pairs(1..=5, &[(2, 1), (3, 1), (4, 2), (4, 3)]).unwrap(),
    ];
    for order in cases {
        let got = order.chain_decompose();
        // chains partition the ground set
        let mut all: Vec<ItemId> = got.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, order.ids());
        assert_eq!(got.len(), exhaustive_min_chains(&order));
        assert_eq!(got.len(), exhaustive_max_antichain(&order));
    }
}

#[test]
fn dominates_spec_examples() {
    // {i, j, h} with i ⪯ j ⪯ h dominates {i, i, i}: ids h=1, j=2, i=3
    let order = total(3);
    let big = unit(&[(1, 1), (2, 1), (3, 1)]);
    let small = unit(&[(3, 3)]);
    assert!(dominates(&big, &small, &order));
    // any set dominates its submultisets
    let sub = unit(&[(2, 1), (3, 1)]);
    assert!(dominates(&big, &sub, &order));
    assert!(dominates(&big, &big, &order));
    // {3} does not dominate {1}
    assert!(!dominates(&unit(&[(3, 1)]), &unit(&[(1, 1)]), &order));
}

#[test]
fn dominates_partial_order_uses_matching() {
    // 1 ⪰ 3, 2 ⪰ 4, chains incomparable
    let order = OrderRelation::from_pairs(1..=4, &[(3, 1), (4, 2)]).unwrap();
    let big = unit(&[(1, 1), (2, 1)]);
    assert!(dominates(&big, &unit(&[(3, 1), (4, 1)]), &order));
    // both copies of 3 would need the single slot ⪰ 3
    assert!(!dominates(&big, &unit(&[(3, 2)]), &order));
}

#[test]
fn dominates_reflexive_transitive_property() {
    let order = total(4);
    let sets = [
        unit(&[(1, 2)]),
        unit(&[(1, 1), (2, 1)]),
        unit(&[(2, 2)]),
        unit(&[(3, 1), (4, 1)]),
        unit(&[(4, 2)]),
    ];
    for s in &sets {
        assert!(dominates(s, s, &order));
    }
    for a in &sets {
        for b in &sets {
            for c in &sets {
                if dominates(a, b, &order) && dominates(b, c, &order) {
                    assert!(dominates(a, c, &order));
                }
            }
        }
    }
}

#[test]
fn member_spec_examples() {
    let order = total(2);
    let system = SetSystemSpec::Generators {
        sets: vec![unit(&[(1, 1), (2, 1)])],
    };
    // replacing 1 by 2 keeps membership
    assert_eq!(
        member(&system, &BTreeMap::from([(2, 2)]), &order),
        Some(Rat::one())
    );
    // the generator itself
    assert_eq!(
        member(&system, &BTreeMap::from([(1, 1), (2, 1)]), &order),
        Some(Rat::one())
    );
    // nothing ⪰ 1 available
    let order3 = total(3);
    let system3 = SetSystemSpec::Generators {
        sets: vec![unit(&[(2, 1), (3, 1)])],
    };
    assert_eq!(member(&system3, &BTreeMap::from([(1, 1)]), &order3), None);
}

#[test]
fn member_monotone_under_domination() {
    let order = total(3);
    let system = SetSystemSpec::Generators {
        sets: vec![unit(&[(1, 1), (2, 1)]), set(&[(2, 2), (3, 1)], Rat::new(1, 2))],
    };
    let candidates: Vec<BTreeMap<ItemId, u64>> = vec![
        BTreeMap::from([(1, 1)]),
        BTreeMap::from([(2, 1)]),
        BTreeMap::from([(3, 2)]),
        BTreeMap::from([(2, 1), (3, 1)]),
        BTreeMap::from([(2, 2), (3, 1)]),
        BTreeMap::from([(1, 1), (2, 1)]),
        BTreeMap::from([(3, 3)]),
    ];
    for a in &candidates {
        for b in &candidates {
            let ca = CoverSet {
                elements: a.clone(),
                cost: Rat::zero(),
            };
            let cb = CoverSet {
                elements: b.clone(),
                cost: Rat::zero(),
            };
            if dominates(&ca, &cb, &order) {
                if let Some(cost_a) = member(&system, a, &order) {
                    let cost_b = member(&system, b, &order).expect("dominated set is a member");
                    assert!(cost_b <= cost_a);
                }
            }
        }
    }
}

#[test]
fn check_prefix_spec_examples() {
    let order = total(3);
    let demand = Demand::from_pairs([(1, 1), (2, 1), (3, 1)]);
    let g13 = unit(&[(1, 1), (3, 1)]);
    let g23 = unit(&[(2, 1), (3, 1)]);
    assert!(check_prefix(&[(&g13, 1), (&g23, 1)], &demand, &order).unwrap());
    assert!(!check_prefix(&[(&g23, 1)], &demand, &order).unwrap());
    assert!(check_prefix(&[], &Demand::new(), &order).unwrap());
    let partial = OrderRelation::from_pairs(1..=3, &[]).unwrap();
    assert!(matches!(
        check_prefix(&[(&g13, 1)], &demand, &partial),
        Err(Error::TotalOrderRequired)
    ));
}

#[test]
fn realize_cover_spec_examples() {
    let order = total(2);
    let g = unit(&[(1, 1), (2, 1)]);
    let demand = Demand::from_pairs([(1, 1), (2, 1)]);
    let cover = realize_cover(&[(&g, 1)], &demand, &order).unwrap();
    assert_eq!(cover.sets.len(), 1);
    assert_eq!(
        cover.sets[0].assignment,
        vec![(1, 1, 1), (2, 2, 1)],
        "identity assignment"
    );

    let order3 = total(3);
    let g13 = unit(&[(1, 1), (3, 1)]);
    let g23 = unit(&[(2, 1), (3, 1)]);
    let demand3 = Demand::from_pairs([(1, 1), (2, 1), (3, 1)]);
    let cover = realize_cover(&[(&g13, 1), (&g23, 1)], &demand3, &order3).unwrap();
    assert_eq!(cover.covered_total(), demand3.counts().clone());

    let fail = realize_cover(
        &[(&g23, 1)],
        &Demand::from_pairs([(1, 1)]),
        &order3,
    );
    match fail {
        Err(Error::PrefixInfeasible { item, .. }) => assert_eq!(item, 1),
        other => panic!("expected prefix failure, got {other:?}"),
    }
}

/// Exhaustive check that realization succeeds exactly when the prefix
/// condition holds, on random generator multisets.
#[test]
fn realize_iff_prefix_on_random_multisets() {
    use rand::RngCore;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..300 {
        let n = 2 + (rng.next_u32() % 19) as ItemId; // n <= 20
        let order = total(n);
        let gens: Vec<CoverSet> = (0..1 + rng.next_u32() % 4)
            .map(|_| {
                let size = 1 + rng.next_u32() % 5;
                unit(
                    &(0..size)
                        .map(|_| (1 + (rng.next_u32() % n as u32), 1 + (rng.next_u64() % 2)))
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        let demand = Demand::from_pairs(
            (1..=n).filter_map(|id| {
                if rng.next_u32() % 2 == 0 {
                    Some((id, rng.next_u64() % 3))
                } else {
                    None
                }
            }),
        );
        let with_counts: Vec<(&CoverSet, u64)> = gens.iter().map(|g| (g, 1)).collect();
        let ok = check_prefix(&with_counts, &demand, &order).unwrap();
        let realized = realize_cover(&with_counts, &demand, &order);
        assert_eq!(ok, realized.is_ok());
        if let Ok(cover) = realized {
            // realized cover hits the demand exactly and respects the order
            assert_eq!(&cover.covered_total(), demand.counts());
            for rs in &cover.sets {
                for &(slot, covered, _) in &rs.assignment {
                    assert!(order.le(covered, slot));
                }
                // slot usage stays within the generator's multiset
                let gen = &gens[rs.generator];
                let mut used: BTreeMap<ItemId, u64> = BTreeMap::new();
                for &(slot, _, c) in &rs.assignment {
                    *used.entry(slot).or_insert(0) += c;
                }
                for (slot, c) in used {
                    assert!(c <= gen.elements[&slot]);
                }
            }
        }
    }
}

#[test]
fn validate_spec_examples() {
    // all subsets of size <= 2 of a total order, unit cost: valid
    let order = total(3);
    let mut sets = Vec::new();
    for i in 1..=3u32 {
        sets.push(unit(&[(i, 1)]));
        for j in i..=3u32 {
            let mut m = BTreeMap::new();
            *m.entry(i).or_insert(0) += 1;
            *m.entry(j).or_insert(0) += 1;
            sets.push(CoverSet {
                elements: m,
                cost: Rat::one(),
            });
        }
    }
    let inst = Instance::new(
        vec![(1, 1), (2, 1), (3, 1)],
        order,
        SetSystemSpec::Explicit { sets },
        Some(2),
    )
    .unwrap();
    assert!(validate(&inst).is_valid());

    // family {{1}} on order 1 ⪰ 2: replacing 1 by 2 is not dominated
    let inst = Instance::new(
        vec![(1, 1), (2, 1)],
        total(2),
        SetSystemSpec::Explicit {
            sets: vec![unit(&[(1, 1)])],
        },
        None,
    )
    .unwrap();
    let report = validate(&inst);
    assert!(report
        .violations
        .iter()
        .any(|v| matches!(v, Violation::ClosureViolation { replaced: 1, inserted: 2, .. })));

    // cost({2}) > cost({1}) with 2 ⪯ 1
    let inst = Instance::new(
        vec![(1, 1), (2, 1)],
        total(2),
        SetSystemSpec::Explicit {
            sets: vec![set(&[(1, 1)], Rat::new(1, 2)), set(&[(2, 1)], Rat::one())],
        },
        None,
    )
    .unwrap();
    let report = validate(&inst);
    assert!(report
        .violations
        .iter()
        .any(|v| matches!(v, Violation::CostNotMonotone { larger: 0, smaller: 1 })));
}

#[test]
fn instance_json_round_trip() {
    let order = OrderRelation::from_pairs(1..=3, &[(2, 1)]).unwrap();
    let inst = Instance::new(
        vec![(1, 2), (2, 1), (3, 5)],
        order,
        SetSystemSpec::Generators {
            sets: vec![set(&[(1, 1), (3, 2)], Rat::new(2, 3))],
        },
        Some(4),
    )
    .unwrap();
    let json = inst.to_json_string();
    let back = Instance::from_json_str(&json).unwrap();
    assert_eq!(back.n(), 3);
    assert_eq!(back.d(), inst.d());
    assert_eq!(back.demand(), inst.demand());
    assert_eq!(back.declared_k(), Some(4));
    assert!(back.order().le(2, 1));
    assert!(!back.order().le(3, 1));
}

#[test]
fn adapter_cardinality_feasibility() {
    let adapter = AdapterSpec::CardinalityBp {
        sizes: vec![Rat::new(3, 10), Rat::new(3, 10), Rat::new(3, 10)],
        cap: 2,
    };
    adapter.validate_params().unwrap();
    assert!(adapter.feasible(&BTreeMap::from([(1, 1), (2, 1)])));
    assert!(!adapter.feasible(&BTreeMap::from([(1, 1), (2, 1), (3, 1)])));
}

#[test]
fn adapter_open_end_feasibility() {
    let adapter = AdapterSpec::OpenEndBp {
        sizes: vec![Rat::new(7, 10), Rat::new(6, 10)],
    };
    adapter.validate_params().unwrap();
    // 1.3 - 0.6 = 0.7 <= 1
    assert!(adapter.feasible(&BTreeMap::from([(1, 1), (2, 1)])));
    assert!(!adapter.feasible(&BTreeMap::from([(1, 2), (2, 2)])));
}

#[test]
fn adapter_witnesses_are_feasible_and_maximal() {
    let adapters = vec![
        AdapterSpec::CardinalityBp {
            sizes: vec![Rat::new(3, 10), Rat::new(1, 4)],
            cap: 3,
        },
        AdapterSpec::OpenEndBp {
            sizes: vec![Rat::new(1, 2), Rat::new(1, 3)],
        },
        AdapterSpec::GeneralCostBp {
            sizes: vec![Rat::new(1, 2), Rat::new(1, 3)],
            bin_cost: vec![Rat::zero(), Rat::new(1, 2), Rat::new(3, 4)],
        },
        AdapterSpec::VarSizedBp {
            sizes: vec![Rat::new(1, 2), Rat::new(1, 5)],
            bin_caps: vec![Rat::one(), Rat::new(2, 5)],
            bin_costs: vec![Rat::one(), Rat::new(1, 4)],
        },
        AdapterSpec::BpRejection {
            sizes: vec![Rat::new(1, 2), Rat::new(1, 3)],
            reject_costs: vec![Rat::new(1, 10), Rat::new(9, 10)],
        },
        AdapterSpec::TrainDelivery {
            sizes: vec![Rat::new(1, 2), Rat::new(1, 3)],
            positions: vec![Rat::new(3, 4), Rat::new(3, 4)],
        },
        AdapterSpec::VectorPacking {
            vectors: vec![
                vec![Rat::new(1, 2), Rat::new(1, 4)],
                vec![Rat::new(1, 4), Rat::new(1, 4)],
            ],
        },
    ];
    for adapter in adapters {
        adapter.validate_params().unwrap();
        for id in 1..=adapter.item_count() as ItemId {
            let (m, cost) = adapter.witness(id).unwrap();
            assert!(m >= 1);
            let q = BTreeMap::from([(id, m)]);
            assert_eq!(adapter.member(&q), Some(cost));
            // one more copy must break feasibility or not improve density
            let denser = BTreeMap::from([(id, m + 1)]);
            if let Some(c2) = adapter.member(&denser) {
                let (mw, cw) = adapter.witness(id).unwrap();
                assert!(c2 / Rat::from(m + 1) >= cw / Rat::from(mw));
            }
        }
    }
}

#[test]
fn partition_oracle_membership() {
    let adapter = AdapterSpec::PartitionOracle {
        weights: vec![1, 1],
        groups: 1,
    };
    adapter.validate_params().unwrap();
    // S({1}, 1): 4 copies of item (1,1)
    assert!(adapter.feasible(&BTreeMap::from([(1, 4)])));
    // both base items at full multiplicity exceed every generator
    assert!(!adapter.feasible(&BTreeMap::from([(1, 4), (2, 4)])));
    // downgrade: copies of item 2 fit a generator on item 1
    assert!(adapter.feasible(&BTreeMap::from([(2, 4)])));
}

#[test]
fn first_fit_half_full_invariant() {
    use rand::RngCore;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let n = 1 + rng.next_u32() % 12;
        let items: Vec<(ItemId, u64)> = (1..=n)
            .map(|id| (id, 1 + rng.next_u64() % 3))
            .collect();
        let sizes: Vec<Rat> = (0..n)
            .map(|_| Rat::new(1 + (rng.next_u32() % 10) as i64, 10))
            .collect();
        let bins = first_fit_counts(&items, |id| sizes[(id - 1) as usize].clone(), &Rat::one());
        let total: Rat = items
            .iter()
            .map(|&(id, c)| &sizes[(id - 1) as usize] * Rat::from(c))
            .sum();
        let bound = Rat::from(2u64) * total + Rat::one();
        assert!(Rat::from(bins.len()) <= bound);
    }
}
