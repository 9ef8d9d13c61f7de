//! Exact-rational covering LP with multiplicities: pattern enumeration,
//! basic optimal solutions, floor extraction and residual demand.
//!
//! Small instances can enumerate their domination-maximal patterns outright;
//! everything else is solved by column generation against a pricing routine
//! (slot-wise for listed generator families, knapsack dynamic programs for
//! the packing adapters). Either way the returned solution is a vertex of
//! the LP over its column set and priced optimal for the full family.

mod pricing;
mod simplex;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    self, AdapterSpec, CoverSet, Demand, Instance, ItemId, OrderRelation, SetSystemSpec,
};
use crate::rat::Rat;

pub use pricing::price_pattern;

/// A feasible multiset of item types with its family cost; a column of the
/// covering LP.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pattern {
    pub counts: BTreeMap<ItemId, u64>,
    pub cost: Rat,
}

impl Pattern {
    pub fn new(counts: BTreeMap<ItemId, u64>, cost: Rat) -> Self {
        Pattern { counts, cost }
    }

    pub fn get(&self, id: ItemId) -> u64 {
        self.counts.get(&id).copied().unwrap_or(0)
    }

    pub fn cardinality(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn as_cover_set(&self) -> CoverSet {
        CoverSet {
            elements: self.counts.clone(),
            cost: self.cost.clone(),
        }
    }
}

/// Optimal fractional solution: positive pattern weights, exact objective,
/// and whether the solution is a vertex of its LP.
#[derive(Clone, Debug)]
pub struct FractionalSolution {
    pub entries: Vec<(Pattern, Rat)>,
    pub objective: Rat,
    pub basic: bool,
}

impl FractionalSolution {
    pub fn empty() -> Self {
        FractionalSolution {
            entries: Vec::new(),
            objective: Rat::zero(),
            basic: true,
        }
    }

    /// Componentwise coverage `Σ x_p · p`.
    pub fn coverage(&self) -> BTreeMap<ItemId, Rat> {
        let mut cov: BTreeMap<ItemId, Rat> = BTreeMap::new();
        for (p, w) in &self.entries {
            for (&id, &c) in &p.counts {
                let add = w * &Rat::from(c);
                cov.entry(id)
                    .and_modify(|v| *v += &add)
                    .or_insert(add.clone());
            }
        }
        cov
    }

    /// Exact feasibility `Σ x_p · p ≥ b`, no tolerance.
    pub fn is_feasible_for(&self, demand: &Demand) -> bool {
        let cov = self.coverage();
        demand
            .iter()
            .all(|(id, c)| cov.get(&id).is_some_and(|v| *v >= Rat::from(c)))
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Entry<'a> {
            p: BTreeMap<String, u64>,
            weight: String,
        #[serde(skip_serializing_if = "Option::is_none")]
            cost: Option<&'a Rat>,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            patterns: Vec<Entry<'a>>,
            objective: String,
            basic: bool,
        }
        let doc = Doc {
            patterns: self
                .entries
                .iter()
                .map(|(p, w)| Entry {
                    p: p.counts.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
                    weight: w.to_string(),
                    cost: Some(&p.cost),
                })
                .collect(),
            objective: self.objective.to_string(),
            basic: self.basic,
        };
        serde_json::to_value(doc).expect("solution serialization cannot fail")
    }
}

/// Knobs for enumeration and pricing.
#[derive(Clone, Debug)]
pub struct LpOptions {
    /// Hard cap on enumerated patterns before a capacity error.
    pub pattern_limit: usize,
    /// Scaling cap for adapter pricing dynamic programs.
    pub dp_capacity: u64,
    /// Clamp pattern counts at the demand vector (set-level semantics on the
    /// copy-expanded ground set). Listed systems with a total order only.
    pub cap_at_demand: bool,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            pattern_limit: 10_000,
            dp_capacity: 1_000_000,
            cap_at_demand: false,
        }
    }
}

/// All domination-maximal feasible patterns over the item types with
/// positive demand. Every feasible pattern over those types is componentwise
/// below a returned one of no larger cost.
pub fn enumerate_patterns(
    instance: &Instance,
    restrict_to: &Demand,
    limit: usize,
) -> Result<Vec<Pattern>> {
    if restrict_to.is_zero() {
        return Ok(Vec::new());
    }
    let demanded: Vec<ItemId> = restrict_to.ids().collect();
    let order = instance.order();
    let mut raw: BTreeSet<Vec<(ItemId, u64)>> = BTreeSet::new();
    match instance.system() {
        SetSystemSpec::Explicit { sets } | SetSystemSpec::Generators { sets } => {
            for g in sets {
                per_generator_maximal(g, &demanded, order, limit, &mut raw)?;
            }
        }
        SetSystemSpec::Adapter { adapter } => {
            if let Some(gens) = adapter.list_generators() {
                for g in &gens {
                    per_generator_maximal(g, &demanded, order, limit, &mut raw)?;
                }
            } else {
                adapter_feasible_patterns(adapter, &demanded, limit, &mut raw)?;
                raw = keep_componentwise_maximal(raw);
            }
        }
    }
    let mut out = Vec::with_capacity(raw.len());
    for counts_vec in raw {
        let counts: BTreeMap<ItemId, u64> = counts_vec.into_iter().collect();
        let cost = instance
            .member(&counts)
            .ok_or_else(|| Error::Internal("enumerated pattern is not a member".into()))?;
        out.push(Pattern { counts, cost });
    }
    Ok(out)
}

/// Maximal patterns of one generator: assign every usable slot to some
/// demanded type below it; distinct count vectors are the patterns.
fn per_generator_maximal(
    generator: &CoverSet,
    demanded: &[ItemId],
    order: &OrderRelation,
    limit: usize,
    out: &mut BTreeSet<Vec<(ItemId, u64)>>,
) -> Result<()> {
    // slot classes with their demanded choices
    let mut classes: Vec<(u64, Vec<ItemId>)> = Vec::new();
    for (&elem, &count) in &generator.elements {
        let choices: Vec<ItemId> = demanded
            .iter()
            .copied()
            .filter(|&t| order.le(t, elem))
            .collect();
        if !choices.is_empty() {
            classes.push((count, choices));
        }
    }
    if classes.is_empty() {
        return Ok(());
    }
    fn bump(acc: &mut BTreeMap<ItemId, u64>, id: ItemId, k: u64) {
        if k > 0 {
            *acc.entry(id).or_insert(0) += k;
        }
    }
    fn unbump(acc: &mut BTreeMap<ItemId, u64>, id: ItemId, k: u64) {
        if k > 0 {
            let v = acc.get_mut(&id).expect("balanced backtracking");
            *v -= k;
            if *v == 0 {
                acc.remove(&id);
            }
        }
    }
    fn rec(
        classes: &[(u64, Vec<ItemId>)],
        acc: &mut BTreeMap<ItemId, u64>,
        out: &mut BTreeSet<Vec<(ItemId, u64)>>,
        limit: usize,
    ) -> Result<()> {
        let Some(((count, choices), rest)) = classes.split_first() else {
            out.insert(acc.iter().map(|(&k, &v)| (k, v)).collect());
            if out.len() > limit {
                return Err(Error::PatternCapacity(limit));
            }
            return Ok(());
        };
        // distribute `count` slots over the choices (compositions)
        fn distribute(
            choices: &[ItemId],
            remaining: u64,
            acc: &mut BTreeMap<ItemId, u64>,
            rest: &[(u64, Vec<ItemId>)],
            out: &mut BTreeSet<Vec<(ItemId, u64)>>,
            limit: usize,
        ) -> Result<()> {
            if choices.len() == 1 {
                let id = choices[0];
                bump(acc, id, remaining);
                let res = rec(rest, acc, out, limit);
                unbump(acc, id, remaining);
                return res;
            }
            let (first, tail) = choices.split_first().unwrap();
            for take in 0..=remaining {
                bump(acc, *first, take);
                let res = distribute(tail, remaining - take, acc, rest, out, limit);
                unbump(acc, *first, take);
                res?;
            }
            Ok(())
        }
        distribute(choices, *count, acc, rest, out, limit)
    }
    let mut acc = BTreeMap::new();
    rec(&classes, &mut acc, out, limit)
}

/// All feasible patterns of an adapter over the demanded types (depth-first
/// with downward-closed pruning).
fn adapter_feasible_patterns(
    adapter: &AdapterSpec,
    demanded: &[ItemId],
    limit: usize,
    out: &mut BTreeSet<Vec<(ItemId, u64)>>,
) -> Result<()> {
    fn rec(
        adapter: &AdapterSpec,
        demanded: &[ItemId],
        idx: usize,
        acc: &mut BTreeMap<ItemId, u64>,
        out: &mut BTreeSet<Vec<(ItemId, u64)>>,
        limit: usize,
    ) -> Result<()> {
        if idx == demanded.len() {
            if !acc.is_empty() {
                out.insert(acc.iter().map(|(&k, &v)| (k, v)).collect());
                if out.len() > limit {
                    return Err(Error::PatternCapacity(limit));
                }
            }
            return Ok(());
        }
        let id = demanded[idx];
        let (max_copies, _) = adapter.witness(id)?;
        for take in 0..=max_copies {
            if take > 0 {
                acc.insert(id, take);
                // supersets of an infeasible multiset stay infeasible
                if !adapter.feasible(acc) {
                    acc.remove(&id);
                    break;
                }
            }
            rec(adapter, demanded, idx + 1, acc, out, limit)?;
        }
        acc.remove(&id);
        Ok(())
    }
    let mut acc = BTreeMap::new();
    rec(adapter, demanded, 0, &mut acc, out, limit)
}

fn keep_componentwise_maximal(raw: BTreeSet<Vec<(ItemId, u64)>>) -> BTreeSet<Vec<(ItemId, u64)>> {
    let all: Vec<BTreeMap<ItemId, u64>> = raw
        .iter()
        .map(|v| v.iter().copied().collect::<BTreeMap<_, _>>())
        .collect();
    let leq = |a: &BTreeMap<ItemId, u64>, b: &BTreeMap<ItemId, u64>| {
        a.iter().all(|(id, c)| b.get(id).copied().unwrap_or(0) >= *c)
    };
    raw.iter()
        .zip(&all)
        .filter(|(_, a)| !all.iter().any(|b| *b != **a && leq(a, b)))
        .map(|(v, _)| v.clone())
        .collect()
}

/// Exact basic optimal solution of the covering LP over the given columns.
pub fn solve_lp(patterns: &[Pattern], demand: &Demand) -> Result<FractionalSolution> {
    if demand.is_zero() {
        return Ok(FractionalSolution::empty());
    }
    let rows: Vec<ItemId> = demand.ids().collect();
    for &id in &rows {
        if !patterns.iter().any(|p| p.get(id) > 0) {
            return Err(Error::Uncoverable(id));
        }
    }
    let columns: Vec<Vec<Rat>> = patterns
        .iter()
        .map(|p| rows.iter().map(|&id| Rat::from(p.get(id))).collect())
        .collect();
    let costs: Vec<Rat> = patterns.iter().map(|p| p.cost.clone()).collect();
    let b: Vec<Rat> = rows.iter().map(|&id| Rat::from(demand.get(id))).collect();
    let mut simplex = simplex::Simplex::new(&columns, &costs, &b);
    match simplex.solve() {
        Ok(()) => {}
        Err(simplex::SimplexOutcome::Infeasible { row }) => {
            return Err(Error::Uncoverable(rows[row]));
        }
        Err(simplex::SimplexOutcome::Internal(e)) => return Err(e),
    }
    Ok(extract_solution(&simplex, patterns))
}

fn extract_solution(simplex: &simplex::Simplex, patterns: &[Pattern]) -> FractionalSolution {
    let x = simplex.structural_values();
    let entries: Vec<(Pattern, Rat)> = patterns
        .iter()
        .zip(&x)
        .filter(|(_, w)| w.is_positive())
        .map(|(p, w)| (p.clone(), w.clone()))
        .collect();
    FractionalSolution {
        entries,
        objective: simplex.objective(),
        basic: true,
    }
}

/// Optimal basic fractional solution for an instance demand, choosing the
/// solve strategy by system kind. Pricing certifies global optimality, so
/// the objective is the LP optimum of the full family.
pub fn optimal_fractional(
    instance: &Instance,
    demand: &Demand,
    opts: &LpOptions,
) -> Result<FractionalSolution> {
    if demand.is_zero() {
        return Ok(FractionalSolution::empty());
    }
    match instance.system() {
        SetSystemSpec::Explicit { sets } | SetSystemSpec::Generators { sets } => {
            cg_listed(instance, sets, demand, opts)
        }
        SetSystemSpec::Adapter { adapter } => {
            if opts.cap_at_demand {
                return Err(Error::PricingUnsupported);
            }
            if let Some(gens) = adapter.list_generators() {
                cg_listed(instance, &gens, demand, opts)
            } else {
                match cg_adapter(adapter, demand, opts) {
                    Err(Error::PricingUnsupported) => {
                        let patterns = enumerate_patterns(instance, demand, opts.pattern_limit)?;
                        solve_lp(&patterns, demand)
                    }
                    other => other,
                }
            }
        }
    }
}

/// Column generation over a listed generator family.
fn cg_listed(
    instance: &Instance,
    sets: &[CoverSet],
    demand: &Demand,
    opts: &LpOptions,
) -> Result<FractionalSolution> {
    let order = instance.order();
    if opts.cap_at_demand && !order.is_total() {
        return Err(Error::TotalOrderRequired);
    }
    let rows: Vec<ItemId> = demand.ids().collect();
    // initial columns: per-type witness patterns
    let mut patterns: Vec<Pattern> = Vec::new();
    let mut seen: BTreeSet<Vec<(ItemId, u64)>> = BTreeSet::new();
    for &id in &rows {
        let w = witness_for(sets, order, id)?;
        let mut copies = w.0;
        if opts.cap_at_demand {
            copies = copies.min(demand.get(id));
        }
        let counts = BTreeMap::from([(id, copies.max(1))]);
        let key: Vec<(ItemId, u64)> = counts.iter().map(|(&k, &v)| (k, v)).collect();
        if seen.insert(key) {
            let cost = member_cost(sets, order, &counts)
                .ok_or_else(|| Error::Internal("witness pattern not a member".into()))?;
            patterns.push(Pattern { counts, cost });
        }
    }
    let columns: Vec<Vec<Rat>> = patterns
        .iter()
        .map(|p| rows.iter().map(|&id| Rat::from(p.get(id))).collect())
        .collect();
    let costs: Vec<Rat> = patterns.iter().map(|p| p.cost.clone()).collect();
    let b: Vec<Rat> = rows.iter().map(|&id| Rat::from(demand.get(id))).collect();
    let mut simplex = simplex::Simplex::new(&columns, &costs, &b);
    match simplex.solve() {
        Ok(()) => {}
        Err(simplex::SimplexOutcome::Infeasible { row }) => {
            return Err(Error::Uncoverable(rows[row]));
        }
        Err(simplex::SimplexOutcome::Internal(e)) => return Err(e),
    }
    loop {
        let duals = simplex.duals();
        let y: BTreeMap<ItemId, Rat> = rows.iter().cloned().zip(duals).collect();
        let mut best: Option<(Rat, BTreeMap<ItemId, u64>, Rat)> = None;
        for g in sets {
            let candidate = if opts.cap_at_demand {
                price_generator_capped(g, &y, demand, order)
            } else {
                price_generator(g, &y, order)
            };
            let Some(counts) = candidate else { continue };
            if seen.contains(&counts.iter().map(|(&k, &v)| (k, v)).collect::<Vec<_>>()) {
                continue;
            }
            let Some(cost) = member_cost(sets, order, &counts) else {
                continue;
            };
            let value: Rat = counts
                .iter()
                .map(|(id, &c)| &y[id] * &Rat::from(c))
                .sum();
            let rc = &cost - &value;
            if rc.is_negative() && best.as_ref().map_or(true, |(r, _, _)| rc < *r) {
                best = Some((rc, counts, cost));
            }
        }
        let Some((_, counts, cost)) = best else { break };
        let coeffs: Vec<Rat> = rows
            .iter()
            .map(|&id| Rat::from(counts.get(&id).copied().unwrap_or(0)))
            .collect();
        simplex.add_column(&coeffs, cost.clone())?;
        seen.insert(counts.iter().map(|(&k, &v)| (k, v)).collect());
        patterns.push(Pattern { counts, cost });
    }
    Ok(extract_solution(&simplex, &patterns))
}

/// Best pattern of one generator for the duals: each slot takes the
/// highest-value demanded type below it (ties to the lowest id).
fn price_generator(
    generator: &CoverSet,
    y: &BTreeMap<ItemId, Rat>,
    order: &OrderRelation,
) -> Option<BTreeMap<ItemId, u64>> {
    let mut counts: BTreeMap<ItemId, u64> = BTreeMap::new();
    for (&elem, &slots) in &generator.elements {
        let mut best: Option<(&Rat, ItemId)> = None;
        for (&t, value) in y {
            if order.le(t, elem) && best.map_or(true, |(bv, _)| value > bv) {
                best = Some((value, t));
            }
        }
        if let Some((_, t)) = best {
            *counts.entry(t).or_insert(0) += slots;
        }
    }
    (!counts.is_empty()).then_some(counts)
}

/// Demand-capped variant: greedy on the prefix polymatroid of the generator
/// intersected with the demand box (total orders).
fn price_generator_capped(
    generator: &CoverSet,
    y: &BTreeMap<ItemId, Rat>,
    demand: &Demand,
    order: &OrderRelation,
) -> Option<BTreeMap<ItemId, u64>> {
    let ids = order.ids();
    let pos: BTreeMap<ItemId, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    // generator slot prefix counts
    let mut gen_prefix = vec![0u64; ids.len()];
    for (&elem, &c) in &generator.elements {
        gen_prefix[pos[&elem]] += c;
    }
    for i in 1..ids.len() {
        gen_prefix[i] += gen_prefix[i - 1];
    }
    let mut order_y: Vec<(&Rat, ItemId)> = y.iter().map(|(&id, v)| (v, id)).collect();
    order_y.sort_by(|a, b| b.0.cmp(a.0).then(a.1.cmp(&b.1)));
    let mut taken_prefix = vec![0u64; ids.len()];
    let mut counts: BTreeMap<ItemId, u64> = BTreeMap::new();
    for (_, t) in order_y {
        let pt = pos[&t];
        let slack = (pt..ids.len())
            .map(|i| gen_prefix[i] - taken_prefix[i])
            .min()
            .unwrap_or(0);
        let take = slack.min(demand.get(t));
        if take > 0 {
            counts.insert(t, take);
            for i in pt..ids.len() {
                taken_prefix[i] += take;
            }
        }
    }
    (!counts.is_empty()).then_some(counts)
}

fn witness_for(sets: &[CoverSet], order: &OrderRelation, id: ItemId) -> Result<(u64, Rat)> {
    let mut best: Option<(Rat, u64, Rat)> = None;
    for g in sets {
        let m: u64 = g
            .elements
            .iter()
            .filter(|(&e, _)| order.le(id, e))
            .map(|(_, &c)| c)
            .sum();
        if m == 0 {
            continue;
        }
        let ratio = &g.cost / &Rat::from(m);
        if best.as_ref().map_or(true, |(r, _, _)| ratio < *r) {
            best = Some((ratio, m, g.cost.clone()));
        }
    }
    best.map(|(_, m, c)| (m, c)).ok_or(Error::Uncoverable(id))
}

fn member_cost(
    sets: &[CoverSet],
    order: &OrderRelation,
    counts: &BTreeMap<ItemId, u64>,
) -> Option<Rat> {
    sets.iter()
        .filter(|g| model::dominates_counts(&g.elements, counts, order))
        .map(|g| g.cost.clone())
        .min()
}

/// Column generation against an adapter's pricing dynamic program.
fn cg_adapter(
    adapter: &AdapterSpec,
    demand: &Demand,
    opts: &LpOptions,
) -> Result<FractionalSolution> {
    let rows: Vec<ItemId> = demand.ids().collect();
    let mut patterns: Vec<Pattern> = Vec::new();
    let mut seen: BTreeSet<Vec<(ItemId, u64)>> = BTreeSet::new();
    for &id in &rows {
        let (copies, cost) = adapter.witness(id)?;
        let counts = BTreeMap::from([(id, copies)]);
        let key: Vec<(ItemId, u64)> = counts.iter().map(|(&k, &v)| (k, v)).collect();
        if seen.insert(key) {
            patterns.push(Pattern { counts, cost });
        }
    }
    // probe pricing support before building the tableau
    let zero_duals: Vec<(ItemId, Rat)> = rows.iter().map(|&id| (id, Rat::zero())).collect();
    let _ = pricing::price_adapter(adapter, &zero_duals, opts.dp_capacity)?;
    let columns: Vec<Vec<Rat>> = patterns
        .iter()
        .map(|p| rows.iter().map(|&id| Rat::from(p.get(id))).collect())
        .collect();
    let costs: Vec<Rat> = patterns.iter().map(|p| p.cost.clone()).collect();
    let b: Vec<Rat> = rows.iter().map(|&id| Rat::from(demand.get(id))).collect();
    let mut simplex = simplex::Simplex::new(&columns, &costs, &b);
    match simplex.solve() {
        Ok(()) => {}
        Err(simplex::SimplexOutcome::Infeasible { row }) => {
            return Err(Error::Uncoverable(rows[row]));
        }
        Err(simplex::SimplexOutcome::Internal(e)) => return Err(e),
    }
    loop {
        let duals = simplex.duals();
        let y: Vec<(ItemId, Rat)> = rows.iter().cloned().zip(duals).collect();
        let Some(candidate) = pricing::price_adapter(adapter, &y, opts.dp_capacity)? else {
            break;
        };
        let key: Vec<(ItemId, u64)> = candidate.counts.iter().map(|(&k, &v)| (k, v)).collect();
        if !seen.insert(key) {
            // priced column already present: numerically impossible at an
            // optimum, so stop rather than loop
            break;
        }
        let coeffs: Vec<Rat> = rows
            .iter()
            .map(|&id| Rat::from(candidate.get(id)))
            .collect();
        simplex.add_column(&coeffs, candidate.cost.clone())?;
        patterns.push(candidate);
    }
    Ok(extract_solution(&simplex, &patterns))
}

/// Integral part and fractional remainder of a solution.
pub fn take_floors(x: &FractionalSolution) -> (Vec<(Pattern, u64)>, Vec<(Pattern, Rat)>) {
    let mut integral = Vec::new();
    let mut remainder = Vec::new();
    for (p, w) in &x.entries {
        let f = w.floor_u64();
        if f > 0 {
            integral.push((p.clone(), f));
        }
        let frac = w.fract();
        if frac.is_positive() {
            remainder.push((p.clone(), frac));
        }
    }
    (integral, remainder)
}

/// Integral residual demand `max(0, b - Σ ⌊x_p⌋ p)`.
pub fn residual(b: &Demand, x: &FractionalSolution) -> Demand {
    let (integral, _) = take_floors(x);
    let mut covered: BTreeMap<ItemId, u64> = BTreeMap::new();
    for (p, copies) in &integral {
        for (&id, &c) in &p.counts {
            *covered.entry(id).or_insert(0) += c.saturating_mul(*copies);
        }
    }
    b.saturating_sub(&covered)
}
