//! Instance families: nested-level and log-log lower-bound constructions,
//! disjoint unions, the partition-based hardness instance, the packing
//! variant adapters, and seeded random instances for benchmarking.

use std::collections::BTreeMap;

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{
    AdapterSpec, CoverSet, Instance, ItemId, OrderRelation, SetSystemSpec,
};
use crate::rat::Rat;

/// Nested-level family: one item type per level `ℓ = 1..=m` with `3·baseᵉ`
/// copies, and a level-`ℓ` generator holding `2·baseᵉ` slots of that type at
/// unit cost. Level 1 is the largest.
pub fn gen_nested_levels(m: u32, base: u64) -> Result<Instance> {
    if m < 1 {
        return Err(Error::param("m", "need at least one level"));
    }
    if base < 3 {
        return Err(Error::param("base", "base must be at least 3"));
    }
    let mut items = Vec::new();
    let mut sets = Vec::new();
    let mut power = 1u64;
    for level in 1..=m {
        power = power
            .checked_mul(base)
            .filter(|p| p.checked_mul(3).is_some())
            .ok_or(Error::Overflow("computing level populations"))?;
        items.push((level, 3 * power));
        sets.push(CoverSet::new([(level, 2 * power)], Rat::one()));
    }
    Instance::new(
        items,
        OrderRelation::total(1..=m)?,
        SetSystemSpec::Generators { sets },
        None,
    )
}

/// Disjoint union of listed-system instances on re-indexed ground sets:
/// Dilworth numbers and additive gaps add across the parts.
pub fn gen_disjoint_union(parts: &[Instance]) -> Result<Instance> {
    if parts.is_empty() {
        return Err(Error::param("parts", "need at least one part"));
    }
    let mut items = Vec::new();
    let mut sets = Vec::new();
    let mut pairs: Vec<(ItemId, ItemId)> = Vec::new();
    let mut offset: ItemId = 0;
    let mut k_bound: Option<u64> = None;
    for part in parts {
        let Some(part_sets) = part.system().listed_sets() else {
            return Err(Error::param("parts", "adapter parts cannot be unioned"));
        };
        let remap: BTreeMap<ItemId, ItemId> = part
            .order()
            .ids()
            .iter()
            .enumerate()
            .map(|(i, &id)| (id, offset + 1 + i as ItemId))
            .collect();
        for t in part.items() {
            items.push((remap[&t.id], t.multiplicity));
        }
        for &a in part.order().ids() {
            for &b in part.order().ids() {
                if a != b && part.order().le(a, b) {
                    pairs.push((remap[&a], remap[&b]));
                }
            }
        }
        for s in part_sets {
            sets.push(CoverSet::new(
                s.elements.iter().map(|(&id, &c)| (remap[&id], c)),
                s.cost.clone(),
            ));
        }
        k_bound = match (k_bound, part.declared_k()) {
            (a, None) => a,
            (None, b) => b,
            (Some(a), Some(b)) => Some(a.max(b)),
        };
        offset += part.n() as ItemId;
    }
    let ids: Vec<ItemId> = items.iter().map(|&(id, _)| id).collect();
    Instance::new(
        items,
        OrderRelation::from_pairs(ids, &pairs)?,
        SetSystemSpec::Generators { sets },
        k_bound,
    )
}

/// The binary-cube covering core: universe `1..=2^k-1`, set `C_j = {i :
/// ⟨i, j⟩ = 1 mod 2}` for every nonzero `j`. Needs at least `k` sets
/// integrally while two fractional layers suffice.
pub fn loglog_core_sets(k: u32) -> Vec<Vec<ItemId>> {
    let universe = (1u32 << k) - 1;
    (1..=universe)
        .map(|j| {
            (1..=universe)
                .filter(|i| (i & j).count_ones() % 2 == 1)
                .collect()
        })
        .collect()
}

/// Lift of the binary-cube core with geometric multiplicities: element `i`
/// becomes a type with `(2k)^i` copies, sets become generators filled to the
/// multiplicity of each member type, unit cost, total order by index.
pub fn gen_loglog(k: u32) -> Result<Instance> {
    if k < 2 {
        return Err(Error::param("k", "need k >= 2"));
    }
    let universe = (1u32 << k) - 1;
    let mut mult = BTreeMap::new();
    let mut power: u64 = 1;
    for i in 1..=universe {
        power = power
            .checked_mul(2 * k as u64)
            .ok_or(Error::Overflow("computing copy counts"))?;
        mult.insert(i, power);
    }
    let items: Vec<(ItemId, u64)> = mult.iter().map(|(&i, &c)| (i, c)).collect();
    let sets = loglog_core_sets(k)
        .into_iter()
        .map(|members| CoverSet::new(members.into_iter().map(|i| (i, mult[&i])), Rat::one()))
        .collect();
    Instance::new(
        items,
        OrderRelation::total(1..=universe)?,
        SetSystemSpec::Generators { sets },
        None,
    )
}

/// Hardness construction from a number-partition input `a_1 >= ... >= a_n`
/// with even total: `groups` groups of the base items with multiplicities
/// `n^(2p)`, feasibility by the weight-sum oracle.
pub fn gen_partition_hardness(weights: Vec<u64>, groups: u32) -> Result<Instance> {
    let mut sorted = weights.clone();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    if sorted != weights {
        return Err(Error::param("weights", "weights must be nonincreasing"));
    }
    let adapter = AdapterSpec::PartitionOracle { weights, groups };
    adapter.validate_params()?;
    let n = adapter.item_count() as ItemId;
    let items: Vec<(ItemId, u64)> = (1..=n)
        .map(|id| {
            let p = (id - 1) / (n / groups) + 1;
            (id, adapter.partition_multiplicity(p))
        })
        .collect();
    Instance::new(
        items,
        OrderRelation::total(1..=n)?,
        SetSystemSpec::Adapter { adapter },
        None,
    )
}

/// The `2·groups` cover sets induced by a partition certificate `I`
/// (indices of one half): `S(I, p)` and `S([n]\I, p)` for every group.
pub fn partition_certificate_cover(
    instance: &Instance,
    half: &[u32],
) -> Result<Vec<CoverSet>> {
    let SetSystemSpec::Adapter { adapter } = instance.system() else {
        return Err(Error::param("instance", "not a partition instance"));
    };
    let AdapterSpec::PartitionOracle { weights, groups } = adapter else {
        return Err(Error::param("instance", "not a partition instance"));
    };
    let n = weights.len() as u32;
    let total: u64 = weights.iter().sum();
    let half_sum: u64 = half.iter().map(|&i| weights[(i - 1) as usize]).sum();
    if half_sum * 2 != total {
        return Err(Error::param("half", "not a valid partition certificate"));
    }
    let complement: Vec<u32> = (1..=n).filter(|i| !half.contains(i)).collect();
    let mut out = Vec::new();
    for p in 1..=*groups {
        let m = adapter.partition_multiplicity(p);
        for side in [half, complement.as_slice()] {
            out.push(CoverSet::new(
                side.iter().map(|&i| (adapter.partition_id(p, i), m)),
                Rat::one(),
            ));
        }
    }
    Ok(out)
}

/// Packing-variant parameters as accepted by [`adapt_variant`].
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VariantParams {
    CardinalityBp {
        sizes: Vec<Rat>,
        cap: u64,
    },
    OpenEndBp {
        sizes: Vec<Rat>,
    },
    GeneralCostBp {
        sizes: Vec<Rat>,
        bin_cost: Vec<Rat>,
    },
    VarSizedBp {
        sizes: Vec<Rat>,
        bin_caps: Vec<Rat>,
        bin_costs: Vec<Rat>,
    },
    BpRejection {
        sizes: Vec<Rat>,
        reject_costs: Vec<Rat>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eps: Option<Rat>,
    },
    TrainDelivery {
        sizes: Vec<Rat>,
        positions: Vec<Rat>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eps: Option<Rat>,
    },
    VectorPacking {
        vectors: Vec<Vec<Rat>>,
    },
}

/// Default rounding granularity `(log₂ n)^{3/2} / √n`, converted exactly
/// from its float image.
pub fn default_eps(n: usize) -> Rat {
    let n = n.max(2) as f64;
    let v = n.log2().powf(1.5) / n.sqrt();
    Rat::from_f64(v.max(f64::MIN_POSITIVE)).expect("finite epsilon")
}

/// Round `v` up to the next integer power of `1+eps`, clamped to `[floor, 1]`.
fn round_up_power(v: &Rat, eps: &Rat, floor: &Rat) -> Rat {
    let base = Rat::one() + eps.clone();
    let target = if v < floor { floor.clone() } else { v.clone() };
    let mut p = Rat::one();
    // powers (1+eps)^0, (1+eps)^-1, ... down to the first below the target
    let mut below = p.clone();
    while below >= target {
        p = below.clone();
        below = &below / &base;
    }
    p.min(Rat::one())
}

/// Build a packing-variant instance: items are sorted into the variant's
/// replacement order and assigned ids in that order; rejection costs and
/// train positions are optionally rounded to powers of `1+eps` (clamped
/// below at `1/n`), which bounds the number of chains.
pub fn adapt_variant(params: VariantParams) -> Result<Instance> {
    match params {
        VariantParams::CardinalityBp { sizes, cap } => {
            let (sizes, _) = sort_desc(sizes);
            build_total(AdapterSpec::CardinalityBp { sizes, cap })
        }
        VariantParams::OpenEndBp { sizes } => {
            let (sizes, _) = sort_desc(sizes);
            build_total(AdapterSpec::OpenEndBp { sizes })
        }
        VariantParams::GeneralCostBp { sizes, bin_cost } => {
            let (sizes, _) = sort_desc(sizes);
            build_total(AdapterSpec::GeneralCostBp { sizes, bin_cost })
        }
        VariantParams::VarSizedBp {
            sizes,
            bin_caps,
            bin_costs,
        } => {
            let (sizes, _) = sort_desc(sizes);
            build_total(AdapterSpec::VarSizedBp {
                sizes,
                bin_caps,
                bin_costs,
            })
        }
        VariantParams::BpRejection {
            sizes,
            reject_costs,
            eps,
        } => {
            if sizes.len() != reject_costs.len() {
                return Err(Error::param("reject_costs", "need one cost per item"));
            }
            let n = sizes.len().max(1);
            let reject_costs: Vec<Rat> = match &eps {
                None => reject_costs,
                Some(eps) => {
                    let floor = Rat::one() / Rat::from(n as u64);
                    reject_costs
                        .iter()
                        .map(|c| round_up_power(c, eps, &floor))
                        .collect()
                }
            };
            // chains: one per distinct cost, ordered by size inside
            let mut idx: Vec<usize> = (0..sizes.len()).collect();
            idx.sort_by(|&a, &b| {
                reject_costs[a]
                    .cmp(&reject_costs[b])
                    .reverse()
                    .then(sizes[a].cmp(&sizes[b]).reverse())
                    .then(a.cmp(&b))
            });
            let sizes: Vec<Rat> = idx.iter().map(|&i| sizes[i].clone()).collect();
            let reject_costs: Vec<Rat> = idx.iter().map(|&i| reject_costs[i].clone()).collect();
            let adapter = AdapterSpec::BpRejection {
                sizes,
                reject_costs: reject_costs.clone(),
            };
            adapter.validate_params()?;
            let chains = chains_by_key(&reject_costs);
            build_chained(adapter, chains)
        }
        VariantParams::TrainDelivery {
            sizes,
            positions,
            eps,
        } => {
            if sizes.len() != positions.len() {
                return Err(Error::param("positions", "need one position per item"));
            }
            let n = sizes.len().max(1);
            let positions: Vec<Rat> = match &eps {
                None => positions,
                Some(eps) => {
                    let floor = Rat::one() / Rat::from(n as u64);
                    positions
                        .iter()
                        .map(|p| round_up_power(p, eps, &floor))
                        .collect()
                }
            };
            let mut idx: Vec<usize> = (0..sizes.len()).collect();
            idx.sort_by(|&a, &b| {
                positions[a]
                    .cmp(&positions[b])
                    .reverse()
                    .then(sizes[a].cmp(&sizes[b]).reverse())
                    .then(a.cmp(&b))
            });
            let sizes: Vec<Rat> = idx.iter().map(|&i| sizes[i].clone()).collect();
            let positions: Vec<Rat> = idx.iter().map(|&i| positions[i].clone()).collect();
            let adapter = AdapterSpec::TrainDelivery {
                sizes,
                positions: positions.clone(),
            };
            adapter.validate_params()?;
            let chains = chains_by_key(&positions);
            build_chained(adapter, chains)
        }
        VariantParams::VectorPacking { vectors } => {
            let adapter = AdapterSpec::VectorPacking {
                vectors: vectors.clone(),
            };
            adapter.validate_params()?;
            let n = vectors.len() as ItemId;
            // componentwise dominance, ties broken toward the lower id
            let mut pairs = Vec::new();
            for a in 0..vectors.len() {
                for b in 0..vectors.len() {
                    if a == b {
                        continue;
                    }
                    let le = vectors[a]
                        .iter()
                        .zip(&vectors[b])
                        .all(|(x, y)| x <= y);
                    let eq = vectors[a] == vectors[b];
                    if le && (!eq || b < a) {
                        // a ⪯ b
                        pairs.push((a as ItemId + 1, b as ItemId + 1));
                    }
                }
            }
            let items: Vec<(ItemId, u64)> = (1..=n).map(|id| (id, 1)).collect();
            Instance::new(
                items,
                OrderRelation::from_pairs(1..=n, &pairs)?,
                SetSystemSpec::Adapter { adapter },
                None,
            )
        }
    }
}

/// Sort descending, keeping the permutation (larger size = larger element;
/// ties keep the input order).
fn sort_desc(values: Vec<Rat>) -> (Vec<Rat>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].cmp(&values[a]).then(a.cmp(&b)));
    let sorted = idx.iter().map(|&i| values[i].clone()).collect();
    (sorted, idx)
}

fn build_total(adapter: AdapterSpec) -> Result<Instance> {
    adapter.validate_params()?;
    let n = adapter.item_count() as ItemId;
    let items: Vec<(ItemId, u64)> = (1..=n).map(|id| (id, 1)).collect();
    Instance::new(
        items,
        OrderRelation::total(1..=n)?,
        SetSystemSpec::Adapter { adapter },
        None,
    )
}

/// Comparability pairs for items grouped into chains by equal key; the
/// items are already sorted by (key desc, size desc).
fn chains_by_key(keys: &[Rat]) -> Vec<(ItemId, ItemId)> {
    let mut pairs = Vec::new();
    for a in 0..keys.len() {
        for b in (a + 1)..keys.len() {
            if keys[a] == keys[b] {
                // b ⪯ a within the chain
                pairs.push((b as ItemId + 1, a as ItemId + 1));
            }
        }
    }
    pairs
}

fn build_chained(adapter: AdapterSpec, pairs: Vec<(ItemId, ItemId)>) -> Result<Instance> {
    let n = adapter.item_count() as ItemId;
    let items: Vec<(ItemId, u64)> = (1..=n).map(|id| (id, 1)).collect();
    Instance::new(
        items,
        OrderRelation::from_pairs(1..=n, &pairs)?,
        SetSystemSpec::Adapter { adapter },
        None,
    )
}

/// Deterministic random generator-system instance on a total order: item
/// `1` is always coverable through a full-width generator, costs are affine
/// in the cardinality so domination implies cheaper.
pub fn random_explicit(seed: u64, max_n: u32, max_k: u64, unit_cost: bool) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 2 + rng.next_u32() % (max_n.max(3) - 1);
    let k = 1 + rng.next_u64() % max_k.max(1);
    let mut sets = vec![CoverSet::new([(1, k)], Rat::one())];
    for _ in 0..rng.next_u32() % 7 {
        let size = 1 + rng.next_u64() % k;
        let elems: Vec<(ItemId, u64)> = (0..size).map(|_| (1 + rng.next_u32() % n, 1)).collect();
        let cost = if unit_cost {
            Rat::one()
        } else {
            let card = elems.len() as u64;
            Rat::new((2 + card) as i64, (2 + k) as i64)
        };
        sets.push(CoverSet::new(elems, cost));
    }
    let mults: Vec<(ItemId, u64)> = (1..=n).map(|id| (id, rng.next_u64() % 6)).collect();
    Instance::new(
        mults,
        OrderRelation::total(1..=n).expect("fresh ids"),
        SetSystemSpec::Generators { sets },
        Some(k),
    )
    .expect("construction is valid")
}

/// Random unit-multiplicity instance for the randomized-rounding trials.
pub fn random_unit_demand(seed: u64, max_n: u32, max_k: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let n = 2 + rng.next_u32() % (max_n.max(3) - 1);
    let k = 2 + rng.next_u64() % max_k.max(2);
    let mut sets = vec![CoverSet::new([(1, k)], Rat::one())];
    for _ in 0..2 + rng.next_u32() % 6 {
        let size = 1 + rng.next_u64() % k;
        let elems: Vec<(ItemId, u64)> = (0..size).map(|_| (1 + rng.next_u32() % n, 1)).collect();
        sets.push(CoverSet::new(elems, Rat::one()));
    }
    let mults: Vec<(ItemId, u64)> = (1..=n).map(|id| (id, 1)).collect();
    Instance::new(
        mults,
        OrderRelation::total(1..=n).expect("fresh ids"),
        SetSystemSpec::Generators { sets },
        Some(k),
    )
    .expect("construction is valid")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VariantKind {
    CardinalityBp,
    OpenEndBp,
    GeneralCostBp,
    VarSizedBp,
    BpRejection,
    TrainDelivery,
    VectorPacking,
}

impl VariantKind {
    pub const ALL: [VariantKind; 7] = [
        VariantKind::CardinalityBp,
        VariantKind::OpenEndBp,
        VariantKind::GeneralCostBp,
        VariantKind::VarSizedBp,
        VariantKind::BpRejection,
        VariantKind::TrainDelivery,
        VariantKind::VectorPacking,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            VariantKind::CardinalityBp => "cardinality_bp",
            VariantKind::OpenEndBp => "open_end_bp",
            VariantKind::GeneralCostBp => "general_cost_bp",
            VariantKind::VarSizedBp => "var_sized_bp",
            VariantKind::BpRejection => "bp_rejection",
            VariantKind::TrainDelivery => "train_delivery",
            VariantKind::VectorPacking => "vector_packing",
        }
    }
}

impl std::str::FromStr for VariantKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        VariantKind::ALL
            .iter()
            .find(|k| k.name() == s)
            .copied()
            .ok_or_else(|| Error::param("variant", format!("unknown variant {s:?}")))
    }
}

/// Random parameterization of a packing variant.
pub fn random_variant(kind: VariantKind, seed: u64) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xada9);
    let n = 2 + (rng.next_u32() % 9) as usize;
    fn rand_size(rng: &mut ChaCha8Rng) -> Rat {
        Rat::new(1 + (rng.next_u32() % 10) as i64, 12)
    }
    let sizes: Vec<Rat> = (0..n).map(|_| rand_size(&mut rng)).collect();
    let params = match kind {
        VariantKind::CardinalityBp => VariantParams::CardinalityBp {
            sizes,
            cap: 1 + rng.next_u64() % 5,
        },
        VariantKind::OpenEndBp => VariantParams::OpenEndBp { sizes },
        VariantKind::GeneralCostBp => {
            // concave nondecreasing table: f(c) = min(c, ...) scaled
            let mut bin_cost = vec![Rat::zero()];
            let mut inc = Rat::new(1, 2);
            let mut acc = Rat::zero();
            for _ in 0..n {
                acc = (&acc + &inc).min(Rat::one());
                bin_cost.push(acc.clone());
                inc = &inc * &Rat::new(3, 4);
            }
            VariantParams::GeneralCostBp { sizes, bin_cost }
        }
        VariantKind::VarSizedBp => {
            let types = 1 + (rng.next_u32() % 3) as usize;
            let mut bin_caps = vec![Rat::one()];
            let mut bin_costs = vec![Rat::one()];
            for _ in 1..types {
                bin_caps.push(Rat::new(1 + (rng.next_u32() % 11) as i64, 12));
                bin_costs.push(Rat::new(1 + (rng.next_u32() % 11) as i64, 12));
            }
            VariantParams::VarSizedBp {
                sizes,
                bin_caps,
                bin_costs,
            }
        }
        VariantKind::BpRejection => {
            let reject_costs: Vec<Rat> = (0..n)
                .map(|_| Rat::new(1 + (rng.next_u32() % 11) as i64, 12))
                .collect();
            VariantParams::BpRejection {
                sizes,
                reject_costs,
                eps: if rng.next_u32() % 2 == 0 {
                    None
                } else {
                    Some(default_eps(n))
                },
            }
        }
        VariantKind::TrainDelivery => {
            let positions: Vec<Rat> = (0..n)
                .map(|_| Rat::new(1 + (rng.next_u32() % 11) as i64, 12))
                .collect();
            VariantParams::TrainDelivery {
                sizes,
                positions,
                eps: if rng.next_u32() % 2 == 0 {
                    None
                } else {
                    Some(default_eps(n))
                },
            }
        }
        VariantKind::VectorPacking => {
            let dim = 2 + (rng.next_u32() % 2) as usize;
            let vectors: Vec<Vec<Rat>> = (0..n)
                .map(|_| (0..dim).map(|_| rand_size(&mut rng)).collect())
                .collect();
            VariantParams::VectorPacking { vectors }
        }
    };
    adapt_variant(params)
}

/// First-fit cover of the whole instance through the adapter's native
/// routine, largest items first, with the per-bin-capacity certificate.
pub struct NativeCoverRun {
    pub bins: Vec<CoverSet>,
    pub cost: Rat,
    /// `(bins, 2·Σ normalized size + groups)` of the first-fit guarantee.
    pub bin_count: u64,
    pub bin_bound: Rat,
}

/// Run the adapter's first-fit cover over all items (largest first) and
/// compute the half-full certificate `#bins ≤ 2 Σ s_i/cap + (bin types)`.
pub fn native_cover_run(instance: &Instance) -> Result<NativeCoverRun> {
    let SetSystemSpec::Adapter { adapter } = instance.system() else {
        return Err(Error::param("instance", "native covers need an adapter"));
    };
    let items: Vec<(ItemId, u64)> = instance
        .order()
        .ids()
        .iter()
        .filter_map(|&id| {
            let c = instance.multiplicity(id);
            (c > 0).then_some((id, c))
        })
        .collect();
    let bins = adapter
        .native_cover(&items)
        .ok_or(Error::PricingUnsupported)?;
    let cost: Rat = bins.iter().map(|b| b.cost.clone()).sum();
    // normalized first-fit certificate: within each bin capacity class all
    // bins but one are over half full
    let bound = native_bin_bound(adapter, &items, &bins)?;
    Ok(NativeCoverRun {
        bin_count: bins.len() as u64,
        bin_bound: bound,
        bins,
        cost,
    })
}

fn native_bin_bound(
    adapter: &AdapterSpec,
    items: &[(ItemId, u64)],
    _bins: &[CoverSet],
) -> Result<Rat> {
    // normalized load of one copy: its first-fit size over the capacity of
    // the bin type it is packed into (capacity 1 except for var-sized)
    let mut groups: std::collections::BTreeSet<usize> = std::collections::BTreeSet::new();
    let weight_of = |id: ItemId, groups: &mut std::collections::BTreeSet<usize>| -> Result<Rat> {
        Ok(match adapter {
            AdapterSpec::CardinalityBp { .. } => {
                groups.insert(0);
                adapter.pseudo_sizes()?[(id - 1) as usize].clone()
            }
            AdapterSpec::OpenEndBp { sizes }
            | AdapterSpec::GeneralCostBp { sizes, .. }
            | AdapterSpec::BpRejection { sizes, .. }
            | AdapterSpec::TrainDelivery { sizes, .. } => {
                groups.insert(0);
                sizes[(id - 1) as usize].clone()
            }
            AdapterSpec::VarSizedBp {
                sizes,
                bin_caps,
                bin_costs,
            } => {
                // same densest-bin-type choice as the native cover
                let s = &sizes[(id - 1) as usize];
                let mut best: Option<(Rat, usize)> = None;
                for (t, (a, c)) in bin_caps.iter().zip(bin_costs).enumerate() {
                    if a < s {
                        continue;
                    }
                    let ratio = c / &Rat::from((a / s).floor_u64());
                    if best.as_ref().map_or(true, |(r, _)| ratio < *r) {
                        best = Some((ratio, t));
                    }
                }
                let (_, t) = best.ok_or_else(|| Error::param("sizes", "item fits no bin"))?;
                groups.insert(t);
                s / &bin_caps[t]
            }
            AdapterSpec::VectorPacking { vectors } => {
                groups.insert(0);
                vectors[(id - 1) as usize]
                    .iter()
                    .max()
                    .expect("nonempty vector")
                    .clone()
            }
            AdapterSpec::PartitionOracle { .. } => return Err(Error::PricingUnsupported),
        })
    };
    let mut total = Rat::zero();
    for &(id, c) in items {
        total += &(weight_of(id, &mut groups)? * Rat::from(c));
    }
    Ok(Rat::from(2u64) * total + Rat::from(groups.len().max(1) as u64))
}
