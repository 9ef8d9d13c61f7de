//! Feasibility-predicate set systems for the supported packing variants.
//!
//! An adapter answers membership queries, names a densest pure-type set per
//! item (the witness behind its pseudo sizes), bounds the total pseudo size
//! of any feasible set, and provides a first-fit cover routine. Item ids are
//! `1..=n`, aligned with the parameter vectors in id order; the instance
//! builder in `instances` is responsible for choosing that id order so the
//! replacement order is respected.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{CoverSet, ItemId, OrderRelation, ValidationReport, Violation};
use crate::error::{Error, Result};
use crate::rat::Rat;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdapterSpec {
    /// Capacity-1 packing with at most `cap` items per bin, unit bin cost.
    CardinalityBp { sizes: Vec<Rat>, cap: u64 },
    /// A bin is feasible when dropping its smallest item brings the load
    /// to at most 1. Unit bin cost.
    OpenEndBp { sizes: Vec<Rat> },
    /// Capacity-1 packing; a bin with `c` items costs `bin_cost[min(c, n)]`
    /// where `bin_cost` is nondecreasing, concave and starts at 0.
    GeneralCostBp { sizes: Vec<Rat>, bin_cost: Vec<Rat> },
    /// Bin types with individual capacities and costs; a set costs the
    /// cheapest bin type it fits into.
    VarSizedBp {
        sizes: Vec<Rat>,
        bin_caps: Vec<Rat>,
        bin_costs: Vec<Rat>,
    },
    /// Capacity-1 packing at unit cost, plus singleton rejection sets at the
    /// item's rejection cost.
    BpRejection { sizes: Vec<Rat>, reject_costs: Vec<Rat> },
    /// Capacity-1 routes costing the farthest visited position.
    TrainDelivery { sizes: Vec<Rat>, positions: Vec<Rat> },
    /// Componentwise capacity-1 vector packing, unit cost.
    VectorPacking { vectors: Vec<Vec<Rat>> },
    /// Hardness construction: groups `p = 1..=groups` of the base items,
    /// with `n^(2p)` copies each; a set is feasible when it is dominated by
    /// some `S(I, p)` with total base weight of `I` at most half the sum.
    PartitionOracle { weights: Vec<u64>, groups: u32 },
}

fn in_unit_interval(v: &Rat) -> bool {
    v.is_positive() && *v <= Rat::one()
}

impl AdapterSpec {
    /// Number of item types this adapter describes.
    pub fn item_count(&self) -> usize {
        match self {
            AdapterSpec::CardinalityBp { sizes, .. }
            | AdapterSpec::OpenEndBp { sizes }
            | AdapterSpec::GeneralCostBp { sizes, .. }
            | AdapterSpec::VarSizedBp { sizes, .. }
            | AdapterSpec::BpRejection { sizes, .. }
            | AdapterSpec::TrainDelivery { sizes, .. } => sizes.len(),
            AdapterSpec::VectorPacking { vectors } => vectors.len(),
            AdapterSpec::PartitionOracle { weights, groups } => {
                weights.len() * *groups as usize
            }
        }
    }

    /// Parameter validation; run once at construction.
    pub fn validate_params(&self) -> Result<()> {
        let check_sizes = |sizes: &[Rat]| -> Result<()> {
            if sizes.is_empty() {
                return Err(Error::param("sizes", "at least one item required"));
            }
            for s in sizes {
                if !in_unit_interval(s) {
                    return Err(Error::param("sizes", format!("size {s} outside (0, 1]")));
                }
            }
            Ok(())
        };
        match self {
            AdapterSpec::CardinalityBp { sizes, cap } => {
                check_sizes(sizes)?;
                if *cap < 1 {
                    return Err(Error::param("cap", "cardinality bound must be at least 1"));
                }
            }
            AdapterSpec::OpenEndBp { sizes } => check_sizes(sizes)?,
            AdapterSpec::GeneralCostBp { sizes, bin_cost } => {
                check_sizes(sizes)?;
                if bin_cost.len() != sizes.len() + 1 {
                    return Err(Error::param("bin_cost", "need one entry per count 0..=n"));
                }
                if !bin_cost[0].is_zero() {
                    return Err(Error::param("bin_cost", "cost of the empty bin must be 0"));
                }
                for w in 1..bin_cost.len() {
                    if bin_cost[w] < bin_cost[w - 1] || bin_cost[w] > Rat::one() {
                        return Err(Error::param("bin_cost", "must be nondecreasing within [0, 1]"));
                    }
                    if w >= 2 {
                        let d1 = &bin_cost[w] - &bin_cost[w - 1];
                        let d0 = &bin_cost[w - 1] - &bin_cost[w - 2];
                        if d1 > d0 {
                            return Err(Error::param("bin_cost", "must be concave"));
                        }
                    }
                }
                if bin_cost.len() > 1 && !bin_cost[1].is_positive() {
                    return Err(Error::param("bin_cost", "nonempty bins need positive cost"));
                }
            }
            AdapterSpec::VarSizedBp {
                sizes,
                bin_caps,
                bin_costs,
            } => {
                check_sizes(sizes)?;
                if bin_caps.is_empty() || bin_caps.len() != bin_costs.len() {
                    return Err(Error::param("bin_caps", "need matching capacities and costs"));
                }
                for a in bin_caps {
                    if !in_unit_interval(a) {
                        return Err(Error::param("bin_caps", format!("capacity {a} outside (0, 1]")));
                    }
                }
                for c in bin_costs {
                    if !in_unit_interval(c) {
                        return Err(Error::param("bin_costs", format!("cost {c} outside (0, 1]")));
                    }
                }
                let max_cap = bin_caps.iter().max().unwrap();
                for s in sizes {
                    if s > max_cap {
                        return Err(Error::param("sizes", format!("item of size {s} fits no bin")));
                    }
                }
            }
            AdapterSpec::BpRejection { sizes, reject_costs } => {
                check_sizes(sizes)?;
                if reject_costs.len() != sizes.len() {
                    return Err(Error::param("reject_costs", "need one cost per item"));
                }
                for c in reject_costs {
                    if !in_unit_interval(c) {
                        return Err(Error::param(
                            "reject_costs",
                            format!("cost {c} outside (0, 1]"),
                        ));
                    }
                }
            }
            AdapterSpec::TrainDelivery { sizes, positions } => {
                check_sizes(sizes)?;
                if positions.len() != sizes.len() {
                    return Err(Error::param("positions", "need one position per item"));
                }
                for p in positions {
                    if !in_unit_interval(p) {
                        return Err(Error::param("positions", format!("position {p} outside (0, 1]")));
                    }
                }
            }
            AdapterSpec::VectorPacking { vectors } => {
                if vectors.is_empty() {
                    return Err(Error::param("vectors", "at least one item required"));
                }
                let dim = vectors[0].len();
                if dim == 0 {
                    return Err(Error::param("vectors", "dimension must be positive"));
                }
                for v in vectors {
                    if v.len() != dim {
                        return Err(Error::param("vectors", "inconsistent dimensions"));
                    }
                    if !v.iter().all(|x| !x.is_negative() && *x <= Rat::one()) {
                        return Err(Error::param("vectors", "entries must lie in [0, 1]"));
                    }
                    if v.iter().all(|x| x.is_zero()) {
                        return Err(Error::param("vectors", "the zero vector has no positive size"));
                    }
                }
            }
            AdapterSpec::PartitionOracle { weights, groups } => {
                let n = weights.len();
                if n < 2 {
                    return Err(Error::param("weights", "need at least two items"));
                }
                if n > 12 {
                    return Err(Error::param("weights", "oracle is exhaustive; max 12 items"));
                }
                if *groups < 1 {
                    return Err(Error::param("groups", "need at least one group"));
                }
                let total: u64 = weights.iter().sum();
                if total % 2 != 0 {
                    return Err(Error::param("weights", "total weight must be even"));
                }
                if weights.windows(2).any(|w| w[0] < w[1]) {
                    return Err(Error::param("weights", "weights must be nonincreasing"));
                }
                if weights.iter().any(|&w| w == 0) {
                    return Err(Error::param("weights", "weights must be positive"));
                }
                // n^(2*groups) copies must stay within u64
                let mut mult: u64 = 1;
                for _ in 0..(2 * *groups) {
                    mult = mult
                        .checked_mul(n as u64)
                        .ok_or(Error::Overflow("computing group multiplicities"))?;
                }
            }
        }
        Ok(())
    }

    fn index(&self, id: ItemId) -> usize {
        (id - 1) as usize
    }

    /// Feasibility of a query multiset.
    pub fn feasible(&self, query: &BTreeMap<ItemId, u64>) -> bool {
        if query.is_empty() {
            return false;
        }
        let load = |sizes: &[Rat]| -> Rat {
            query
                .iter()
                .map(|(&id, &c)| &sizes[self.index(id)] * Rat::from(c))
                .sum()
        };
        match self {
            AdapterSpec::CardinalityBp { sizes, cap } => {
                let count: u64 = query.values().sum();
                count <= *cap && load(sizes) <= Rat::one()
            }
            AdapterSpec::OpenEndBp { sizes } => {
                let min_size = query
                    .keys()
                    .map(|&id| sizes[self.index(id)].clone())
                    .min()
                    .unwrap();
                load(sizes) - min_size <= Rat::one()
            }
            AdapterSpec::GeneralCostBp { sizes, .. } => load(sizes) <= Rat::one(),
            AdapterSpec::VarSizedBp { sizes, bin_caps, .. } => {
                let l = load(sizes);
                bin_caps.iter().any(|a| l <= *a)
            }
            AdapterSpec::BpRejection { sizes, .. } => {
                let count: u64 = query.values().sum();
                count == 1 || load(sizes) <= Rat::one()
            }
            AdapterSpec::TrainDelivery { sizes, .. } => load(sizes) <= Rat::one(),
            AdapterSpec::VectorPacking { vectors } => {
                let dim = vectors[0].len();
                (0..dim).all(|d| {
                    let sum: Rat = query
                        .iter()
                        .map(|(&id, &c)| &vectors[self.index(id)][d] * Rat::from(c))
                        .sum();
                    sum <= Rat::one()
                })
            }
            AdapterSpec::PartitionOracle { .. } => self.partition_member(query),
        }
    }

    /// Membership with cost.
    pub fn member(&self, query: &BTreeMap<ItemId, u64>) -> Option<Rat> {
        if !self.feasible(query) {
            return None;
        }
        Some(match self {
            AdapterSpec::CardinalityBp { .. }
            | AdapterSpec::OpenEndBp { .. }
            | AdapterSpec::VectorPacking { .. }
            | AdapterSpec::PartitionOracle { .. } => Rat::one(),
            AdapterSpec::GeneralCostBp { bin_cost, .. } => {
                let count: u64 = query.values().sum();
                let idx = (count as usize).min(bin_cost.len() - 1);
                bin_cost[idx].clone()
            }
            AdapterSpec::VarSizedBp {
                sizes,
                bin_caps,
                bin_costs,
            } => {
                let l: Rat = query
                    .iter()
                    .map(|(&id, &c)| &sizes[self.index(id)] * Rat::from(c))
                    .sum();
                bin_caps
                    .iter()
                    .zip(bin_costs)
                    .filter(|(a, _)| l <= **a)
                    .map(|(_, c)| c.clone())
                    .min()
                    .expect("feasible set fits some bin")
            }
            AdapterSpec::BpRejection { sizes, reject_costs } => {
                let count: u64 = query.values().sum();
                let packs: Rat = query
                    .iter()
                    .map(|(&id, &c)| &sizes[self.index(id)] * Rat::from(c))
                    .sum::<Rat>();
                let mut cost = if packs <= Rat::one() {
                    Some(Rat::one())
                } else {
                    None
                };
                if count == 1 {
                    let (&id, _) = query.iter().next().unwrap();
                    let c = reject_costs[self.index(id)].clone();
                    cost = Some(match cost {
                        Some(v) => v.min(c),
                        None => c,
                    });
                }
                cost.expect("feasible rejection set")
            }
            AdapterSpec::TrainDelivery { positions, .. } => query
                .keys()
                .map(|&id| positions[self.index(id)].clone())
                .max()
                .unwrap(),
        })
    }

    /// Densest pure-type set for `id`: `(copies per set, set cost)`.
    pub fn witness(&self, id: ItemId) -> Result<(u64, Rat)> {
        let idx = self.index(id);
        let per_unit = |s: &Rat| -> u64 { (Rat::one() / s.clone()).floor_u64().max(1) };
        Ok(match self {
            AdapterSpec::CardinalityBp { sizes, cap } => {
                (per_unit(&sizes[idx]).min(*cap).max(1), Rat::one())
            }
            AdapterSpec::OpenEndBp { sizes } => {
                // m copies feasible iff (m - 1) * s <= 1
                let m = (Rat::one() / sizes[idx].clone()).floor_u64() + 1;
                (m, Rat::one())
            }
            AdapterSpec::GeneralCostBp { sizes, bin_cost } => {
                let m = per_unit(&sizes[idx]);
                let cost = bin_cost[(m as usize).min(bin_cost.len() - 1)].clone();
                (m, cost)
            }
            AdapterSpec::VarSizedBp {
                sizes,
                bin_caps,
                bin_costs,
            } => {
                let s = &sizes[idx];
                let mut best: Option<(Rat, u64, Rat)> = None;
                for (a, c) in bin_caps.iter().zip(bin_costs) {
                    if a < s {
                        continue;
                    }
                    let m = (a / s).floor_u64();
                    let ratio = c / &Rat::from(m);
                    if best.as_ref().map_or(true, |(r, _, _)| ratio < *r) {
                        best = Some((ratio, m, c.clone()));
                    }
                }
                let (_, m, c) = best.ok_or(Error::Uncoverable(id))?;
                (m, c)
            }
            AdapterSpec::BpRejection { sizes, reject_costs } => {
                let m = per_unit(&sizes[idx]);
                let pack_ratio = Rat::one() / Rat::from(m);
                if reject_costs[idx] <= pack_ratio {
                    (1, reject_costs[idx].clone())
                } else {
                    (m, Rat::one())
                }
            }
            AdapterSpec::TrainDelivery { sizes, positions } => {
                (per_unit(&sizes[idx]), positions[idx].clone())
            }
            AdapterSpec::VectorPacking { vectors } => {
                let peak = vectors[idx].iter().max().unwrap();
                ((Rat::one() / peak.clone()).floor_u64().max(1), Rat::one())
            }
            AdapterSpec::PartitionOracle { .. } => {
                let m = self.partition_witness_copies(id)?;
                (m, Rat::one())
            }
        })
    }

    /// The pseudo-size recipe of the variant, in id order.
    pub fn pseudo_sizes(&self) -> Result<Vec<Rat>> {
        match self {
            AdapterSpec::CardinalityBp { sizes, cap } => {
                let floor = Rat::one() / Rat::from(*cap);
                Ok(sizes.iter().map(|s| s.clone().max(floor.clone())).collect())
            }
            AdapterSpec::OpenEndBp { sizes }
            | AdapterSpec::GeneralCostBp { sizes, .. }
            | AdapterSpec::BpRejection { sizes, .. }
            | AdapterSpec::TrainDelivery { sizes, .. } => Ok(sizes.clone()),
            AdapterSpec::VarSizedBp { .. }
            | AdapterSpec::VectorPacking { .. }
            | AdapterSpec::PartitionOracle { .. } => (1..=self.item_count() as ItemId)
                .map(|id| {
                    let (m, c) = self.witness(id)?;
                    Ok(c / Rat::from(m))
                })
                .collect(),
        }
    }

    /// Upper bound on the total pseudo size of any feasible set.
    pub fn alpha(&self) -> Rat {
        match self {
            AdapterSpec::CardinalityBp { .. }
            | AdapterSpec::OpenEndBp { .. }
            | AdapterSpec::VarSizedBp { .. } => Rat::from(2u64),
            AdapterSpec::GeneralCostBp { .. }
            | AdapterSpec::BpRejection { .. }
            | AdapterSpec::TrainDelivery { .. } => Rat::one(),
            AdapterSpec::VectorPacking { vectors } => Rat::from(2 * vectors[0].len()),
            AdapterSpec::PartitionOracle { .. } => {
                // exhaustive over the oracle's generator family
                let sizes = self.pseudo_sizes().expect("oracle sizes");
                self.partition_generators()
                    .iter()
                    .map(|g| {
                        g.elements
                            .iter()
                            .map(|(&id, &c)| &sizes[self.index(id)] * Rat::from(c))
                            .sum::<Rat>()
                    })
                    .max()
                    .unwrap_or_else(Rat::zero)
            }
        }
    }

    /// Largest cardinality of a feasible set.
    pub fn max_cardinality(&self) -> Option<u64> {
        let by_min_size = |sizes: &[Rat]| -> u64 {
            let min = sizes.iter().min().unwrap();
            (Rat::one() / min.clone()).floor_u64().max(1)
        };
        Some(match self {
            AdapterSpec::CardinalityBp { sizes, cap } => by_min_size(sizes).min(*cap),
            AdapterSpec::OpenEndBp { sizes } => by_min_size(sizes) + 1,
            AdapterSpec::GeneralCostBp { sizes, .. }
            | AdapterSpec::BpRejection { sizes, .. }
            | AdapterSpec::TrainDelivery { sizes, .. } => by_min_size(sizes),
            AdapterSpec::VarSizedBp { sizes, bin_caps, .. } => {
                let min = sizes.iter().min().unwrap();
                let max_cap = bin_caps.iter().max().unwrap();
                (max_cap / min).floor_u64().max(1)
            }
            AdapterSpec::VectorPacking { vectors } => {
                let dim = vectors[0].len();
                let min_peak = vectors
                    .iter()
                    .map(|v| v.iter().max().unwrap())
                    .min()
                    .unwrap();
                (Rat::from(dim) / min_peak.clone()).floor_u64().max(1)
            }
            AdapterSpec::PartitionOracle { .. } => self
                .partition_generators()
                .iter()
                .map(|g| g.cardinality())
                .max()
                .unwrap_or(0),
        })
    }

    /// First-fit cover of the given items (counts expand into copies, scanned
    /// in the given order). Returns the bins as cover sets priced by the
    /// variant's cost rule. `None` when the variant has no packing shape.
    pub fn native_cover(&self, items: &[(ItemId, u64)]) -> Option<Vec<CoverSet>> {
        match self {
            AdapterSpec::PartitionOracle { .. } => None,
            AdapterSpec::VectorPacking { vectors } => {
                let dim = vectors[0].len();
                let mut loads: Vec<Vec<Rat>> = Vec::new();
                let mut bins: Vec<BTreeMap<ItemId, u64>> = Vec::new();
                for &(id, count) in items {
                    let v = &vectors[self.index(id)];
                    for _ in 0..count {
                        let slot = (0..bins.len()).find(|&b| {
                            (0..dim).all(|d| &loads[b][d] + &v[d] <= Rat::one())
                        });
                        match slot {
                            Some(b) => {
                                for d in 0..dim {
                                    loads[b][d] += &v[d];
                                }
                                *bins[b].entry(id).or_insert(0) += 1;
                            }
                            None => {
                                loads.push(v.clone());
                                bins.push(BTreeMap::from([(id, 1)]));
                            }
                        }
                    }
                }
                Some(
                    bins.into_iter()
                        .map(|elements| CoverSet {
                            cost: Rat::one(),
                            elements,
                        })
                        .collect(),
                )
            }
            AdapterSpec::VarSizedBp {
                sizes,
                bin_caps,
                bin_costs,
            } => {
                // group items by their densest bin type, first-fit per group
                let mut groups: BTreeMap<usize, Vec<(ItemId, u64)>> = BTreeMap::new();
                for &(id, count) in items {
                    let s = &sizes[self.index(id)];
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
                    let (_, t) = best.expect("validated: every item fits some bin");
                    groups.entry(t).or_default().push((id, count));
                }
                let mut out = Vec::new();
                for (t, part) in groups {
                    let bins = first_fit_counts(&part, |id| sizes[self.index(id)].clone(), &bin_caps[t]);
                    out.extend(bins.into_iter().map(|elements| CoverSet {
                        cost: bin_costs[t].clone(),
                        elements,
                    }));
                }
                Some(out)
            }
            _ => {
                // capacity-1 first-fit w.r.t. the variant's packing size
                let weight = |id: ItemId| -> Rat {
                    match self {
                        AdapterSpec::CardinalityBp { .. } => {
                            // pseudo size keeps bins under the cardinality cap
                            self.pseudo_sizes().expect("sizes")[self.index(id)].clone()
                        }
                        AdapterSpec::OpenEndBp { sizes }
                        | AdapterSpec::GeneralCostBp { sizes, .. }
                        | AdapterSpec::BpRejection { sizes, .. }
                        | AdapterSpec::TrainDelivery { sizes, .. } => sizes[self.index(id)].clone(),
                        _ => unreachable!(),
                    }
                };
                let bins = first_fit_counts(items, weight, &Rat::one());
                Some(
                    bins.into_iter()
                        .map(|elements| {
                            let cost = self.member(&elements).expect("first-fit bin is feasible");
                            CoverSet { elements, cost }
                        })
                        .collect(),
                )
            }
        }
    }

    /// Enumerates the oracle's generator family (exhaustive; small n only).
    pub fn list_generators(&self) -> Option<Vec<CoverSet>> {
        match self {
            AdapterSpec::PartitionOracle { .. } => Some(self.partition_generators()),
            _ => None,
        }
    }

    /// Replacement-property checks for the sampled sets of this adapter.
    pub fn validate_against(&self, order: &OrderRelation, report: &mut ValidationReport) {
        let ids: Vec<ItemId> = order.ids().to_vec();
        for &i in &ids {
            for &j in &ids {
                if i == j || !order.le(j, i) {
                    continue;
                }
                // swap inside the singleton and inside the witness set of i
                let mut samples: Vec<BTreeMap<ItemId, u64>> = vec![BTreeMap::from([(i, 1)])];
                if let Ok((m, _)) = self.witness(i) {
                    if m > 1 {
                        samples.push(BTreeMap::from([(i, m)]));
                    }
                }
                for sample in samples {
                    let Some(cost) = self.member(&sample) else {
                        report.violations.push(Violation::AdapterViolation {
                            detail: format!("witness set of item {i} is not feasible"),
                        });
                        continue;
                    };
                    let mut swapped = sample.clone();
                    let ci = swapped[&i];
                    if ci == 1 {
                        swapped.remove(&i);
                    } else {
                        swapped.insert(i, ci - 1);
                    }
                    *swapped.entry(j).or_insert(0) += 1;
                    match self.member(&swapped) {
                        None => report.violations.push(Violation::AdapterViolation {
                            detail: format!(
                                "replacing {i} by {j} in a feasible set became infeasible"
                            ),
                        }),
                        Some(c) if c > cost => {
                            report.violations.push(Violation::AdapterViolation {
                                detail: format!("replacing {i} by {j} increased the cost"),
                            })
                        }
                        _ => {}
                    }
                }
            }
        }
        if let Ok(sizes) = self.pseudo_sizes() {
            for s in &sizes {
                if !in_unit_interval(s) {
                    report.violations.push(Violation::AdapterViolation {
                        detail: format!("pseudo size {s} outside (0, 1]"),
                    });
                }
            }
        }
    }

    // -- partition oracle internals --------------------------------------

    fn partition_params(&self) -> (&[u64], u32) {
        match self {
            AdapterSpec::PartitionOracle { weights, groups } => (weights, *groups),
            _ => unreachable!("partition internals on a packing adapter"),
        }
    }

    /// id of base item `i` (1-based) in group `p` (1-based)
    pub fn partition_id(&self, p: u32, i: u32) -> ItemId {
        let (weights, _) = self.partition_params();
        (p - 1) * weights.len() as u32 + i
    }

    /// copies of each selected base item inside a group-p generator
    pub fn partition_multiplicity(&self, p: u32) -> u64 {
        let (weights, _) = self.partition_params();
        (weights.len() as u64).pow(2 * p)
    }

    fn partition_half(&self) -> u64 {
        let (weights, _) = self.partition_params();
        weights.iter().sum::<u64>() / 2
    }

    /// All generators S(I, p) with feasible I.
    pub fn partition_generators(&self) -> Vec<CoverSet> {
        let (weights, groups) = self.partition_params();
        let n = weights.len();
        let half = self.partition_half();
        let mut out = Vec::new();
        for p in 1..=groups {
            let mult = self.partition_multiplicity(p);
            for mask in 1u32..(1 << n) {
                let total: u64 = (0..n)
                    .filter(|&i| mask & (1 << i) != 0)
                    .map(|i| weights[i])
                    .sum();
                if total > half {
                    continue;
                }
                let elements = (0..n)
                    .filter(|&i| mask & (1 << i) != 0)
                    .map(|i| (self.partition_id(p, i as u32 + 1), mult))
                    .collect();
                out.push(CoverSet {
                    elements,
                    cost: Rat::one(),
                });
            }
        }
        out
    }

    fn partition_member(&self, query: &BTreeMap<ItemId, u64>) -> bool {
        // canonical total order: ascending id; prefix-compare against each
        // generator profile
        let gens = self.partition_generators();
        let item_count = self.item_count() as ItemId;
        'gen: for g in &gens {
            let (mut cq, mut cg) = (0u64, 0u64);
            for id in 1..=item_count {
                cq += query.get(&id).copied().unwrap_or(0);
                cg += g.elements.get(&id).copied().unwrap_or(0);
                if cq > cg {
                    continue 'gen;
                }
            }
            return true;
        }
        false
    }

    fn partition_witness_copies(&self, id: ItemId) -> Result<u64> {
        let (weights, groups) = self.partition_params();
        let n = weights.len() as u32;
        let half = self.partition_half();
        let p = (id - 1) / n + 1;
        let i = (id - 1) % n + 1;
        debug_assert!(p <= groups);
        let _ = groups;
        // best same-group witness: maximize |I ∩ {1..i}| over feasible I
        let mut prefix: Vec<u64> = (0..i).map(|t| weights[t as usize]).collect();
        prefix.sort_unstable();
        let mut total = 0u64;
        let mut take = 0u64;
        for w in prefix {
            if total + w > half {
                break;
            }
            total += w;
            take += 1;
        }
        // earlier groups hold exponentially fewer copies, so the same-group
        // witness is densest whenever it exists at all
        if take == 0 {
            return Err(Error::Uncoverable(id));
        }
        Ok(take * self.partition_multiplicity(p))
    }
}

/// Plain first-fit over (id, count) items with a weight function and a bin
/// capacity; counts expand copy by copy in the given order.
pub fn first_fit_counts(
    items: &[(ItemId, u64)],
    weight: impl Fn(ItemId) -> Rat,
    capacity: &Rat,
) -> Vec<BTreeMap<ItemId, u64>> {
    let mut loads: Vec<Rat> = Vec::new();
    let mut bins: Vec<BTreeMap<ItemId, u64>> = Vec::new();
    for &(id, count) in items {
        let w = weight(id);
        for _ in 0..count {
            match (0..bins.len()).find(|&b| &loads[b] + &w <= *capacity) {
                Some(b) => {
                    loads[b] += &w;
                    *bins[b].entry(id).or_insert(0) += 1;
                }
                None => {
                    loads.push(w.clone());
                    bins.push(BTreeMap::from([(id, 1)]));
                }
            }
        }
    }
    bins
}

/// Least common multiple of the denominators of the given rationals, with a
/// cap to guard dynamic programs; `None` when the cap is exceeded.
pub fn common_denominator(values: impl Iterator<Item = Rat>, cap: u64) -> Option<u64> {
    use num_traits::ToPrimitive;
    let mut lcm = num_bigint::BigInt::from(1u64);
    for v in values {
        lcm = lcm.lcm(v.denom());
        if lcm.to_u64().is_none_or(|l| l > cap) {
            return None;
        }
    }
    lcm.to_u64()
}
