//! Knapsack-style pricing for the packing adapters.
//!
//! Given dual values on the demanded item types, find a feasible pattern with
//! strictly negative reduced cost `cost(p) - yᵀp`, or report that none
//! exists. Sizes are scaled to a common integer denominator; adapters whose
//! feasibility is not capacity-shaped report `PricingUnsupported` and the
//! caller falls back to enumeration.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::adapter::common_denominator;
use crate::model::{AdapterSpec, ItemId};
use crate::rat::Rat;

use super::Pattern;

/// Pattern with strictly negative reduced cost for the duals, if one exists.
///
/// With `caps`, pattern counts are clamped per item (set semantics over the
/// listed copies); the search is then exhaustive over the capped patterns.
/// Without caps the variant's knapsack dynamic program runs unbounded.
pub fn price_pattern(
    adapter: &AdapterSpec,
    duals: &[(ItemId, Rat)],
    caps: Option<&crate::model::Demand>,
    dp_capacity: u64,
) -> Result<Option<Pattern>> {
    match caps {
        None => price_adapter(adapter, duals, dp_capacity),
        Some(caps) => price_capped(adapter, duals, caps, dp_capacity),
    }
}

/// Exhaustive capped pricing: depth-first over patterns `p ≤ caps` with
/// downward-closed pruning, exact costs from the membership rule.
fn price_capped(
    adapter: &AdapterSpec,
    duals: &[(ItemId, Rat)],
    caps: &crate::model::Demand,
    budget: u64,
) -> Result<Option<Pattern>> {
    struct Search<'a> {
        adapter: &'a AdapterSpec,
        duals: &'a [(ItemId, Rat)],
        caps: &'a crate::model::Demand,
        nodes: u64,
        budget: u64,
        best: Option<(Rat, Pattern)>,
    }
    impl Search<'_> {
        fn rec(&mut self, idx: usize, acc: &mut BTreeMap<ItemId, u64>, value: Rat) -> Result<()> {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::PricingUnsupported);
            }
            if idx == self.duals.len() {
                if !acc.is_empty() {
                    if let Some(cost) = self.adapter.member(acc) {
                        let entry = (value, acc.clone());
                        consider(&mut self.best, cost, &entry);
                    }
                }
                return Ok(());
            }
            let (id, y) = &self.duals[idx];
            let (witness_max, _) = self.adapter.witness(*id)?;
            let limit = witness_max.min(self.caps.get(*id));
            for take in 0..=limit {
                if take > 0 {
                    acc.insert(*id, take);
                    if !self.adapter.feasible(acc) {
                        acc.remove(id);
                        break;
                    }
                }
                let v = &value + &(y * &Rat::from(take));
                self.rec(idx + 1, acc, v)?;
            }
            acc.remove(id);
            Ok(())
        }
    }
    let mut search = Search {
        adapter,
        duals,
        caps,
        nodes: 0,
        budget: budget.max(1),
        best: None,
    };
    let mut acc = BTreeMap::new();
    search.rec(0, &mut acc, Rat::zero())?;
    Ok(search.best.map(|(_, p)| p))
}

pub(crate) fn price_adapter(
    adapter: &AdapterSpec,
    duals: &[(ItemId, Rat)],
    dp_capacity: u64,
) -> Result<Option<Pattern>> {
    let candidate = match adapter {
        AdapterSpec::CardinalityBp { sizes, cap } => {
            let (items, scale) = scaled_items(sizes, duals, &[], dp_capacity)?;
            let per_count = count_dp(&items, scale, *cap, dp_capacity)?;
            let mut best: Option<(Rat, Pattern)> = None;
            for entry in per_count.iter().skip(1).flatten() {
                consider(&mut best, Rat::one(), entry);
            }
            best
        }
        AdapterSpec::GeneralCostBp { sizes, bin_cost } => {
            let (items, scale) = scaled_items(sizes, duals, &[], dp_capacity)?;
            let max_count = items
                .iter()
                .map(|it| scale / it.weight)
                .max()
                .unwrap_or(0);
            let per_count = count_dp(&items, scale, max_count, dp_capacity)?;
            let mut best: Option<(Rat, Pattern)> = None;
            for (c, entry) in per_count.iter().enumerate().skip(1) {
                if let Some(entry) = entry {
                    let cost = bin_cost[c.min(bin_cost.len() - 1)].clone();
                    consider(&mut best, cost, entry);
                }
            }
            best
        }
        AdapterSpec::VarSizedBp {
            sizes,
            bin_caps,
            bin_costs,
        } => {
            let (items, scale) = scaled_items(sizes, duals, bin_caps, dp_capacity)?;
            let mut best: Option<(Rat, Pattern)> = None;
            for (a, c) in bin_caps.iter().zip(bin_costs) {
                let cap_scaled = (a * &Rat::from(scale)).floor_u64();
                if let Some(entry) = unbounded_dp(&items, cap_scaled) {
                    consider(&mut best, c.clone(), &entry);
                }
            }
            best
        }
        AdapterSpec::BpRejection { sizes, reject_costs } => {
            let (items, scale) = scaled_items(sizes, duals, &[], dp_capacity)?;
            let mut best: Option<(Rat, Pattern)> = None;
            if let Some(entry) = unbounded_dp(&items, scale) {
                consider(&mut best, Rat::one(), &entry);
            }
            for (id, y) in duals {
                let cost = reject_costs[(*id - 1) as usize].clone();
                let entry = (y.clone(), BTreeMap::from([(*id, 1u64)]));
                consider(&mut best, cost, &entry);
            }
            best
        }
        AdapterSpec::TrainDelivery { sizes, positions } => {
            let (items, scale) = scaled_items(sizes, duals, &[], dp_capacity)?;
            let mut cutoffs: Vec<Rat> = duals
                .iter()
                .map(|(id, _)| positions[(*id - 1) as usize].clone())
                .collect();
            cutoffs.sort();
            cutoffs.dedup();
            let mut best: Option<(Rat, Pattern)> = None;
            for cutoff in cutoffs {
                let allowed: Vec<ScaledItem> = items
                    .iter()
                    .filter(|it| positions[(it.id - 1) as usize] <= cutoff)
                    .cloned()
                    .collect();
                if let Some(entry) = unbounded_dp(&allowed, scale) {
                    consider(&mut best, cutoff.clone(), &entry);
                }
            }
            best
        }
        AdapterSpec::OpenEndBp { sizes } => {
            let (items, scale) = scaled_items(sizes, duals, &[], dp_capacity)?;
            let mut best: Option<(Rat, Pattern)> = None;
            for anchor in &items {
                // anchor is the designated smallest member; everything at
                // least as large (ties by id) may join, one anchor forced
                let key = (&sizes[(anchor.id - 1) as usize], anchor.id);
                let allowed: Vec<ScaledItem> = items
                    .iter()
                    .filter(|it| (&sizes[(it.id - 1) as usize], it.id) >= key)
                    .cloned()
                    .collect();
                let room = scale; // (1 + s_anchor) - s_anchor, scaled
                if let Some((value, mut counts)) = unbounded_dp(&allowed, room) {
                    *counts.entry(anchor.id).or_insert(0) += 1;
                    let entry = (value + &anchor.value, counts);
                    consider(&mut best, Rat::one(), &entry);
                }
            }
            best
        }
        AdapterSpec::VectorPacking { .. } | AdapterSpec::PartitionOracle { .. } => {
            return Err(Error::PricingUnsupported);
        }
    };
    Ok(candidate.map(|(_, p)| p))
}

#[derive(Clone, Debug)]
struct ScaledItem {
    id: ItemId,
    value: Rat,
    weight: u64,
}

/// Scale the demanded items' sizes (and any extra rationals) to a common
/// integer denominator. Overflowing the cap reports `PricingUnsupported`.
fn scaled_items(
    sizes: &[Rat],
    duals: &[(ItemId, Rat)],
    extra: &[Rat],
    dp_capacity: u64,
) -> Result<(Vec<ScaledItem>, u64)> {
    let involved = duals
        .iter()
        .map(|(id, _)| sizes[(*id - 1) as usize].clone())
        .chain(extra.iter().cloned());
    let scale = common_denominator(involved, dp_capacity).ok_or(Error::PricingUnsupported)?;
    let items = duals
        .iter()
        .map(|(id, y)| {
            let w = (&sizes[(*id - 1) as usize] * &Rat::from(scale)).floor_u64();
            ScaledItem {
                id: *id,
                value: y.clone(),
                weight: w.max(1),
            }
        })
        .collect();
    Ok((items, scale))
}

fn consider(best: &mut Option<(Rat, Pattern)>, cost: Rat, entry: &(Rat, BTreeMap<ItemId, u64>)) {
    let (value, counts) = entry;
    if counts.is_empty() {
        return;
    }
    let rc = &cost - value;
    if !rc.is_negative() {
        return;
    }
    if best.as_ref().map_or(true, |(r, _)| rc < *r) {
        *best = Some((
            rc,
            Pattern {
                counts: counts.clone(),
                cost,
            },
        ));
    }
}

/// Unbounded knapsack: best value with total weight at most `capacity`.
/// The empty multiset (value 0) is a valid outcome; callers reject it.
fn unbounded_dp(items: &[ScaledItem], capacity: u64) -> Option<(Rat, BTreeMap<ItemId, u64>)> {
    let cap = capacity as usize;
    #[derive(Clone)]
    enum Step {
        Start,
        Carry,
        Take(usize),
    }
    let mut value = vec![Rat::zero(); cap + 1];
    let mut step = vec![Step::Start; cap + 1];
    for w in 1..=cap {
        value[w] = value[w - 1].clone();
        step[w] = Step::Carry;
        for (i, it) in items.iter().enumerate() {
            let wt = it.weight as usize;
            if wt <= w && !it.value.is_zero() {
                let cand = &value[w - wt] + &it.value;
                if cand > value[w] {
                    value[w] = cand;
                    step[w] = Step::Take(i);
                }
            }
        }
    }
    let mut counts: BTreeMap<ItemId, u64> = BTreeMap::new();
    let mut w = cap;
    loop {
        match &step[w] {
            Step::Start => break,
            Step::Carry => w -= 1,
            Step::Take(i) => {
                *counts.entry(items[*i].id).or_insert(0) += 1;
                w -= items[*i].weight as usize;
            }
        }
    }
    Some((value[cap].clone(), counts))
}

/// Knapsack with an exact-count dimension: entry `c` holds the best multiset
/// of cardinality `c` within the capacity, if any.
#[allow(clippy::type_complexity)]
fn count_dp(
    items: &[ScaledItem],
    capacity: u64,
    max_count: u64,
    dp_capacity: u64,
) -> Result<Vec<Option<(Rat, BTreeMap<ItemId, u64>)>>> {
    let cap = capacity as usize;
    let kmax = max_count as usize;
    let cells = (cap + 1).checked_mul(kmax + 1).ok_or(Error::PricingUnsupported)?;
    if cells as u64 > dp_capacity.saturating_mul(8) {
        return Err(Error::PricingUnsupported);
    }
    #[derive(Clone)]
    enum Step {
        None,
        Carry,
        Take(usize),
    }
    let idx = |w: usize, c: usize| w * (kmax + 1) + c;
    let mut value: Vec<Option<Rat>> = vec![None; cells];
    let mut step = vec![Step::None; cells];
    for w in 0..=cap {
        value[idx(w, 0)] = Some(Rat::zero());
    }
    for w in 1..=cap {
        for c in 1..=kmax {
            // inherit from smaller capacity
            if let Some(v) = value[idx(w - 1, c)].clone() {
                value[idx(w, c)] = Some(v);
                step[idx(w, c)] = Step::Carry;
            }
            for (i, it) in items.iter().enumerate() {
                let wt = it.weight as usize;
                if wt <= w {
                    if let Some(base) = value[idx(w - wt, c - 1)].clone() {
                        let cand = base + &it.value;
                        if value[idx(w, c)].as_ref().is_none_or(|v| cand > *v) {
                            value[idx(w, c)] = Some(cand);
                            step[idx(w, c)] = Step::Take(i);
                        }
                    }
                }
            }
        }
    }
    let mut out = Vec::with_capacity(kmax + 1);
    for c in 0..=kmax {
        if value[idx(cap, c)].is_none() {
            out.push(None);
            continue;
        }
        let mut counts: BTreeMap<ItemId, u64> = BTreeMap::new();
        let (mut w, mut cc) = (cap, c);
        loop {
            match &step[idx(w, cc)] {
                Step::None => break,
                Step::Carry => w -= 1,
                Step::Take(i) => {
                    *counts.entry(items[*i].id).or_insert(0) += 1;
                    w -= items[*i].weight as usize;
                    cc -= 1;
                }
            }
        }
        out.push(Some((value[idx(cap, c)].clone().unwrap(), counts)));
    }
    Ok(out)
}
