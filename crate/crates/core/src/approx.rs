//! Dyadic-grouping approximation algorithms and the exact search oracle:
//! a quasi-polynomial dynamic-programming 2-approximation, randomized
//! multiplicative rounding, first-fit, and branch-and-bound for exact
//! optima at desk scale.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lp::{self, FractionalSolution, LpOptions};
use crate::model::{self, CoverSet, Demand, Instance, ItemId, SetSystemSpec};
use crate::rat::Rat;
use crate::rounding::{self, RoundingOptions, Solution};

/// Consecutive groups of ground-set copies, largest elements first, with
/// `|L_i| = 2^i` (the last group may be smaller).
#[derive(Clone, Debug)]
pub struct DyadicGrouping {
    pub groups: Vec<DyadicGroup>,
    pub total: u64,
}

#[derive(Clone, Debug)]
pub struct DyadicGroup {
    /// Number of copies in the group.
    pub size: u64,
    /// Copies by type, largest first.
    pub runs: Vec<(ItemId, u64)>,
    /// Largest element of the group.
    pub representative: ItemId,
}

impl DyadicGrouping {
    /// Demand with every copy rounded up to its group representative.
    pub fn rounded_demand(&self) -> Demand {
        let mut d = Demand::new();
        for g in &self.groups {
            d.add(g.representative, g.size);
        }
        d
    }
}

/// Group the demand copies dyadically along a total order.
pub fn dyadic_grouping(instance: &Instance, demand: &Demand) -> Result<DyadicGrouping> {
    if !instance.order().is_total() {
        return Err(Error::TotalOrderRequired);
    }
    let total = demand.total();
    let mut groups = Vec::new();
    let mut runs_iter = instance
        .order()
        .ids()
        .iter()
        .filter_map(|&id| {
            let c = demand.get(id);
            (c > 0).then_some((id, c))
        })
        .collect::<Vec<_>>()
        .into_iter();
    let mut current = runs_iter.next();
    let mut level = 0u32;
    let mut produced = 0u64;
    while produced < total {
        let want = (1u64 << level).min(total - produced);
        let mut size = 0u64;
        let mut runs: Vec<(ItemId, u64)> = Vec::new();
        while size < want {
            let Some((id, avail)) = current.as_mut() else {
                break;
            };
            let take = (*avail).min(want - size);
            runs.push((*id, take));
            *avail -= take;
            size += take;
            if *avail == 0 {
                current = runs_iter.next();
            }
        }
        let representative = runs.first().expect("nonempty group").0;
        groups.push(DyadicGroup {
            size,
            runs,
            representative,
        });
        produced += size;
        level += 1;
    }
    // k = #groups - 1 stays within ⌈log₂ N⌉
    debug_assert!(groups.len() as u64 <= 64);
    Ok(DyadicGrouping { groups, total })
}

/// Table of the covering dynamic program over representative demands.
#[derive(Clone, Debug)]
pub struct DPTable {
    /// Representative ids indexing the state vectors.
    pub reps: Vec<ItemId>,
    /// State -> (optimal cost, index of the chosen pattern).
    pub entries: BTreeMap<Vec<u64>, (Rat, Option<usize>)>,
    pub patterns: Vec<lp::Pattern>,
}

#[derive(Clone, Debug)]
pub struct ApproxOptions {
    /// Cap on dynamic-program states.
    pub state_cap: usize,
    pub lp: LpOptions,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        ApproxOptions {
            state_cap: 1_000_000,
            lp: LpOptions::default(),
        }
    }
}

/// Quasi-polynomial 2-approximation: round copies up to dyadic-group
/// representatives, solve the rounded instance exactly by dynamic
/// programming over feasible patterns, then realize the bought sets on the
/// original demand.
pub fn dp_two_approx(instance: &Instance, opts: &ApproxOptions) -> Result<(Solution, DPTable)> {
    let demand = instance.demand();
    if demand.is_zero() {
        return Ok((
            Solution::default(),
            DPTable {
                reps: Vec::new(),
                entries: BTreeMap::new(),
                patterns: Vec::new(),
            },
        ));
    }
    let grouping = dyadic_grouping(instance, &demand)?;
    let rounded = grouping.rounded_demand();
    let reps: Vec<ItemId> = rounded.ids().collect();
    let patterns = capped_member_patterns(instance, &rounded, opts.state_cap)?;
    if patterns.is_empty() {
        return Err(Error::Uncoverable(reps[0]));
    }
    let table = solve_dp(instance, &rounded, patterns, opts.state_cap)?;
    let root: Vec<u64> = reps.iter().map(|&id| rounded.get(id)).collect();
    let mut purchases: BTreeMap<usize, u64> = BTreeMap::new();
    let mut state = root;
    while state.iter().any(|&v| v > 0) {
        let (_, choice) = &table.entries[&state];
        let idx = choice.expect("positive state has a chosen pattern");
        *purchases.entry(idx).or_insert(0) += 1;
        let p = &table.patterns[idx];
        for (i, &id) in table.reps.iter().enumerate() {
            state[i] = state[i].saturating_sub(p.get(id));
        }
    }
    let bought: Vec<(CoverSet, u64)> = purchases
        .iter()
        .map(|(&idx, &count)| (table.patterns[idx].as_cover_set(), count))
        .collect();
    // downgrade the bought sets onto the original copies
    let solution = realize_bought(instance, &bought, &demand)?;
    Ok((solution, table))
}

/// Downgrade bought sets into an exact cover of the demand; each realized
/// set is priced at the cost of the set it came from.
fn realize_bought(
    instance: &Instance,
    bought: &[(CoverSet, u64)],
    demand: &Demand,
) -> Result<Solution> {
    let with_counts: Vec<(&CoverSet, u64)> = bought.iter().map(|(s, c)| (s, *c)).collect();
    let realized = model::realize_cover(&with_counts, demand, instance.order())?;
    let mut solution = Solution::default();
    for rs in realized.sets {
        let covered = rs.covered();
        if covered.is_empty() {
            continue;
        }
        solution.purchases.push((
            CoverSet {
                cost: bought[rs.generator].0.cost.clone(),
                elements: covered,
            },
            1,
        ));
    }
    solution.verify(instance, demand)?;
    Ok(solution)
}

/// All member patterns `p ≤ cap` over the demanded types.
fn capped_member_patterns(
    instance: &Instance,
    cap: &Demand,
    limit: usize,
) -> Result<Vec<lp::Pattern>> {
    let ids: Vec<ItemId> = cap.ids().collect();
    let mut out = Vec::new();
    fn rec(
        instance: &Instance,
        ids: &[ItemId],
        cap: &Demand,
        idx: usize,
        acc: &mut BTreeMap<ItemId, u64>,
        out: &mut Vec<lp::Pattern>,
        limit: usize,
    ) -> Result<()> {
        if idx == ids.len() {
            if !acc.is_empty() {
                if let Some(cost) = instance.member(acc) {
                    out.push(lp::Pattern::new(acc.clone(), cost));
                    if out.len() > limit {
                        return Err(Error::StateCap(limit));
                    }
                }
            }
            return Ok(());
        }
        let id = ids[idx];
        for take in 0..=cap.get(id) {
            if take > 0 {
                acc.insert(id, take);
                // members are closed downward, so a non-member prefix
                // cannot grow into a member
                if instance.member(acc).is_none() {
                    acc.remove(&id);
                    break;
                }
            }
            rec(instance, ids, cap, idx + 1, acc, out, limit)?;
        }
        acc.remove(&id);
        Ok(())
    }
    let mut acc = BTreeMap::new();
    rec(instance, &ids, cap, 0, &mut acc, &mut out, limit)?;
    Ok(out)
}

fn solve_dp(
    _instance: &Instance,
    rounded: &Demand,
    patterns: Vec<lp::Pattern>,
    state_cap: usize,
) -> Result<DPTable> {
    let reps: Vec<ItemId> = rounded.ids().collect();
    let mut entries: BTreeMap<Vec<u64>, (Rat, Option<usize>)> = BTreeMap::new();
    entries.insert(vec![0; reps.len()], (Rat::zero(), None));
    let root: Vec<u64> = reps.iter().map(|&id| rounded.get(id)).collect();
    let mut stack = vec![root.clone()];
    // iterative post-order evaluation of A(state)
    while let Some(state) = stack.pop() {
        if entries.contains_key(&state) {
            continue;
        }
        let mut pending = Vec::new();
        let mut best: Option<(Rat, usize)> = None;
        let mut complete = true;
        for (idx, p) in patterns.iter().enumerate() {
            // the pattern must make progress on the state
            let hits = reps
                .iter()
                .enumerate()
                .any(|(i, &id)| state[i] > 0 && p.get(id) > 0);
            if !hits {
                continue;
            }
            let next: Vec<u64> = reps
                .iter()
                .enumerate()
                .map(|(i, &id)| state[i].saturating_sub(p.get(id)))
                .collect();
            match entries.get(&next) {
                Some((cost, _)) => {
                    let total = cost + &p.cost;
                    if best.as_ref().map_or(true, |(b, _)| total < *b) {
                        best = Some((total, idx));
                    }
                }
                None => {
                    complete = false;
                    pending.push(next);
                }
            }
        }
        if complete {
            let (cost, idx) = best.ok_or_else(|| {
                Error::Internal("no pattern makes progress on a positive state".into())
            })?;
            entries.insert(state, (cost, Some(idx)));
            if entries.len() > state_cap {
                return Err(Error::StateCap(state_cap));
            }
        } else {
            stack.push(state);
            stack.extend(pending);
        }
    }
    Ok(DPTable {
        reps,
        entries,
        patterns,
    })
}

/// Per-trial outcome of randomized multiplicative rounding.
#[derive(Clone, Debug, serde::Serialize)]
pub struct TrialStats {
    pub trial: usize,
    pub cost: Rat,
    pub cost_ok: bool,
    /// Dyadic levels whose slot count fell below twice the group size.
    pub failed_levels: Vec<usize>,
    /// The bought sets admitted a downgrade onto the demand.
    pub realizable: bool,
    pub success: bool,
}

#[derive(Clone, Debug)]
pub struct RandRoundOptions {
    pub trial_cap: usize,
    /// Guard on the copy-expanded ground set.
    pub max_elements: u64,
}

impl Default for RandRoundOptions {
    fn default() -> Self {
        RandRoundOptions {
            trial_cap: 64,
            max_elements: 1 << 16,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RandRoundOutcome {
    /// Realized cover of the first successful trial, if any.
    pub solution: Option<Solution>,
    pub stats: Vec<TrialStats>,
    pub lambda: Rat,
    pub succeeded_trial: Option<usize>,
}

/// Oversampling factor `max(8·ln(4 + 4·log₂ N), 4)` for N ground-set
/// elements, converted exactly from its binary float image.
pub fn lambda_for(total_elements: u64) -> Rat {
    let n = total_elements.max(1) as f64;
    let v = (8.0 * (4.0 + 4.0 * n.log2()).ln()).max(4.0);
    Rat::from_f64(v).expect("lambda is finite")
}

/// Randomized multiplicative rounding: buy `⌊λ x_p⌋` copies of every pattern
/// deterministically plus one more with probability `{λ x_p}`; a trial
/// succeeds when every dyadic level keeps at least twice its size in slots,
/// the cost stays within `4λ · cᵀx`, and the bought sets realize into a
/// cover. Trials repeat with fresh randomness up to the cap.
pub fn rand_mult_round(
    instance: &Instance,
    x: &FractionalSolution,
    seed: u64,
    opts: &RandRoundOptions,
) -> Result<RandRoundOutcome> {
    if !instance.order().is_total() {
        return Err(Error::TotalOrderRequired);
    }
    let demand = instance.demand();
    let total = demand.total();
    if total > opts.max_elements {
        return Err(Error::param(
            "max_elements",
            format!("instance has {total} copies, cap is {}", opts.max_elements),
        ));
    }
    let lambda = lambda_for(total);
    let grouping = dyadic_grouping(instance, &demand)?;
    // position ranges of each type's copies in the descending expansion
    let mut start_of: BTreeMap<ItemId, u64> = BTreeMap::new();
    let mut cursor = 0u64;
    for &id in instance.order().ids() {
        let c = demand.get(id);
        if c > 0 {
            start_of.insert(id, cursor);
            cursor += c;
        }
    }
    // group boundaries by position
    let mut boundaries = Vec::with_capacity(grouping.groups.len() + 1);
    let mut acc = 0u64;
    boundaries.push(0);
    for g in &grouping.groups {
        acc += g.size;
        boundaries.push(acc);
    }
    let budget = Rat::from(4u64) * &lambda * &x.objective;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = Vec::new();
    for trial in 0..opts.trial_cap {
        let mut bought: Vec<(CoverSet, u64)> = Vec::new();
        let mut cost = Rat::zero();
        for (p, weight) in &x.entries {
            let scaled = &lambda * weight;
            let mut copies = scaled.floor_u64();
            let frac = scaled.fract();
            if frac.is_positive() && bernoulli(&mut rng, &frac) {
                copies += 1;
            }
            if copies > 0 {
                bought.push((p.as_cover_set(), copies));
                cost += &(&p.cost * &Rat::from(copies));
            }
        }
        let cost_ok = cost <= budget;
        // slot count per dyadic level, with per-type placement capped at the
        // type's copy range
        let mut slots = vec![0u64; grouping.groups.len()];
        for (set, copies) in &bought {
            for (&t, &c) in &set.elements {
                let Some(&start) = start_of.get(&t) else {
                    continue;
                };
                let placed = c.min(demand.get(t));
                let (lo, hi) = (start, start + placed);
                for (level, window) in boundaries.windows(2).enumerate() {
                    let overlap = hi.min(window[1]).saturating_sub(lo.max(window[0]));
                    slots[level] += overlap * copies;
                }
            }
        }
        let failed_levels: Vec<usize> = grouping
            .groups
            .iter()
            .enumerate()
            .filter(|(i, g)| slots[*i] < 2 * g.size)
            .map(|(i, _)| i)
            .collect();
        let with_counts: Vec<(&CoverSet, u64)> = bought.iter().map(|(s, c)| (s, *c)).collect();
        let realized = model::realize_cover(&with_counts, &demand, instance.order());
        let realizable = realized.is_ok();
        let success = cost_ok && failed_levels.is_empty() && realizable;
        stats.push(TrialStats {
            trial,
            cost,
            cost_ok,
            failed_levels,
            realizable,
            success,
        });
        if success {
            let realized = realized.expect("checked");
            let mut solution = Solution::default();
            for rs in realized.sets {
                let covered = rs.covered();
                if covered.is_empty() {
                    continue;
                }
                solution.purchases.push((
                    CoverSet {
                        cost: bought[rs.generator].0.cost.clone(),
                        elements: covered,
                    },
                    1,
                ));
            }
            solution.verify(instance, &demand)?;
            return Ok(RandRoundOutcome {
                solution: Some(solution),
                stats,
                lambda,
                succeeded_trial: Some(trial),
            });
        }
    }
    Ok(RandRoundOutcome {
        solution: None,
        stats,
        lambda,
        succeeded_trial: None,
    })
}

/// Exact Bernoulli draw for a rational probability in [0, 1).
fn bernoulli(rng: &mut ChaCha8Rng, p: &Rat) -> bool {
    let u = rng.next_u64();
    // u / 2^64 < p  <=>  u * denom < numer << 64
    let lhs = BigInt::from(u) * p.denom();
    let rhs = p.numer().clone() << 64;
    lhs < rhs
}

/// First-fit over items in the given order; item `i` lands in the first bin
/// with room. All bins except possibly one end up more than half full.
pub fn first_fit(sizes: &[Rat], capacity: &Rat) -> Result<Vec<Vec<usize>>> {
    let mut bins: Vec<Vec<usize>> = Vec::new();
    let mut loads: Vec<Rat> = Vec::new();
    for (i, s) in sizes.iter().enumerate() {
        if s > capacity {
            return Err(Error::param(
                "sizes",
                format!("item {i} of size {s} exceeds the capacity {capacity}"),
            ));
        }
        match (0..bins.len()).find(|&b| &loads[b] + s <= *capacity) {
            Some(b) => {
                loads[b] += s;
                bins[b].push(i);
            }
            None => {
                loads.push(s.clone());
                bins.push(vec![i]);
            }
        }
    }
    Ok(bins)
}

#[derive(Clone, Debug)]
pub struct ExactOptions {
    pub node_budget: u64,
    pub lp: LpOptions,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            node_budget: 1_000_000,
            lp: LpOptions::default(),
        }
    }
}

/// Result of the exact search: the optimum when the budget sufficed.
#[derive(Clone, Debug)]
pub struct ExactSearch {
    pub value: Option<Rat>,
    pub nodes: u64,
}

/// Exact optimum by deterministic branch-and-bound. Listed systems search
/// over generator purchase counts with the downgrade-feasibility test;
/// adapters without a generator listing search over capped feasible
/// patterns with componentwise coverage.
pub fn exact_opt(instance: &Instance, opts: &ExactOptions) -> Result<ExactSearch> {
    let demand = instance.demand();
    if demand.is_zero() {
        return Ok(ExactSearch {
            value: Some(Rat::zero()),
            nodes: 0,
        });
    }
    let lower = lp::optimal_fractional(instance, &demand, &opts.lp)?.objective;
    let (incumbent, _) = rounding::additive_round(
        instance,
        &RoundingOptions {
            lp: opts.lp.clone(),
            ..RoundingOptions::default()
        },
    )?;
    let incumbent_cost = incumbent.cost();
    let listed: Option<Vec<CoverSet>> = match instance.system() {
        SetSystemSpec::Explicit { sets } | SetSystemSpec::Generators { sets } => {
            Some(sets.clone())
        }
        SetSystemSpec::Adapter { adapter } => adapter.list_generators(),
    };
    match listed {
        Some(sets) => bb_generators(instance, &sets, &demand, lower, incumbent_cost, opts),
        None => bb_patterns(instance, &demand, lower, incumbent_cost, opts),
    }
}

fn bb_generators(
    instance: &Instance,
    sets: &[CoverSet],
    demand: &Demand,
    lower: Rat,
    incumbent: Rat,
    opts: &ExactOptions,
) -> Result<ExactSearch> {
    let order = instance.order();
    let ids: Vec<ItemId> = order.ids().to_vec();
    // prefix demand and per-generator prefix slot profiles (total orders
    // get the sharp prefix bound, partial orders a coarser one)
    let total_order = order.is_total();
    let prefix_demand: Vec<u64> = {
        let mut acc = 0;
        ids.iter()
            .map(|&id| {
                acc += demand.get(id);
                acc
            })
            .collect()
    };
    let gen_prefix: Vec<Vec<u64>> = sets
        .iter()
        .map(|g| {
            let mut acc = 0;
            ids.iter()
                .map(|&id| {
                    acc += g.elements.get(&id).copied().unwrap_or(0);
                    acc
                })
                .collect()
        })
        .collect();

    struct Search<'a> {
        instance: &'a Instance,
        sets: &'a [CoverSet],
        demand: &'a Demand,
        gen_prefix: &'a [Vec<u64>],
        prefix_demand: &'a [u64],
        total_order: bool,
        best: Rat,
        nodes: u64,
        budget: u64,
        exhausted: bool,
    }

    impl Search<'_> {
        /// Cheapest way any remaining generator relieves one slot of the
        /// worst prefix deficit; sound lower bound on the additional cost.
        fn extra_bound(&self, g: usize, slots_prefix: &[u64]) -> Rat {
            let mut worst = Rat::zero();
            for i in 0..self.prefix_demand.len() {
                let deficit = self.prefix_demand[i].saturating_sub(slots_prefix[i]);
                if deficit == 0 {
                    continue;
                }
                let mut cheapest: Option<Rat> = None;
                for gi in g..self.sets.len() {
                    let contrib = self.gen_prefix[gi][i];
                    if contrib == 0 {
                        continue;
                    }
                    let per = &self.sets[gi].cost / &Rat::from(contrib);
                    if cheapest.as_ref().is_none_or(|c| per < *c) {
                        cheapest = Some(per);
                    }
                }
                match cheapest {
                    None => {
                        worst = self.best.clone();
                        break;
                    }
                    Some(per) => {
                        let need = per * Rat::from(deficit);
                        if need > worst {
                            worst = need;
                        }
                    }
                }
            }
            worst
        }

        fn covered(&self, counts: &[u64], slots_prefix: &[u64]) -> bool {
            if self.total_order {
                slots_prefix
                    .iter()
                    .zip(self.prefix_demand)
                    .all(|(s, d)| s >= d)
            } else {
                let with_counts: Vec<(&BTreeMap<ItemId, u64>, u64)> = self
                    .sets
                    .iter()
                    .zip(counts)
                    .filter(|(_, &c)| c > 0)
                    .map(|(s, &c)| (&s.elements, c))
                    .collect();
                model::can_cover(&with_counts, self.demand, self.instance.order())
            }
        }

        fn rec(&mut self, g: usize, counts: &mut [u64], cost: Rat, slots_prefix: &mut [u64]) {
            if self.exhausted || cost >= self.best {
                return;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                self.exhausted = true;
                return;
            }
            if self.covered(counts, slots_prefix) {
                self.best = cost;
                return;
            }
            if g == self.sets.len() {
                return;
            }
            let bound = self.extra_bound(g, slots_prefix);
            if &cost + &bound >= self.best {
                return;
            }
            // most copies of generator g that could ever help
            let mut ub = 0u64;
            for i in 0..self.prefix_demand.len() {
                let deficit = self.prefix_demand[i].saturating_sub(slots_prefix[i]);
                let contrib = self.gen_prefix[g][i];
                if deficit > 0 && contrib > 0 {
                    ub = ub.max(deficit.div_ceil(contrib));
                }
            }
            for take in (0..=ub).rev() {
                counts[g] = take;
                for (i, sp) in slots_prefix.iter_mut().enumerate() {
                    *sp += take * self.gen_prefix[g][i];
                }
                let c = &cost + &(&self.sets[g].cost * &Rat::from(take));
                self.rec(g + 1, counts, c, slots_prefix);
                for (i, sp) in slots_prefix.iter_mut().enumerate() {
                    *sp -= take * self.gen_prefix[g][i];
                }
                counts[g] = 0;
                if self.exhausted {
                    return;
                }
            }
        }
    }

    let mut search = Search {
        instance,
        sets,
        demand,
        gen_prefix: &gen_prefix,
        prefix_demand: &prefix_demand,
        total_order,
        best: incumbent,
        nodes: 0,
        budget: opts.node_budget,
        exhausted: false,
    };
    let mut counts = vec![0u64; sets.len()];
    let mut slots_prefix = vec![0u64; ids.len()];
    if search.best > lower {
        search.rec(0, &mut counts, Rat::zero(), &mut slots_prefix);
    }
    if search.exhausted {
        return Ok(ExactSearch {
            value: None,
            nodes: search.nodes,
        });
    }
    Ok(ExactSearch {
        value: Some(search.best),
        nodes: search.nodes,
    })
}

fn bb_patterns(
    instance: &Instance,
    demand: &Demand,
    lower: Rat,
    incumbent: Rat,
    opts: &ExactOptions,
) -> Result<ExactSearch> {
    let patterns = capped_member_patterns(instance, demand, opts.lp.pattern_limit)?;
    let ids: Vec<ItemId> = demand.ids().collect();
    // cheapest per-copy rate per type, for the node bound
    let mut rate: BTreeMap<ItemId, Rat> = BTreeMap::new();
    for p in &patterns {
        for (&id, &c) in &p.counts {
            let per = &p.cost / &Rat::from(c);
            rate.entry(id)
                .and_modify(|r| {
                    if per < *r {
                        *r = per.clone();
                    }
                })
                .or_insert(per);
        }
    }
    for &id in &ids {
        if !rate.contains_key(&id) {
            return Err(Error::Uncoverable(id));
        }
    }

    struct Search<'a> {
        patterns: &'a [lp::Pattern],
        ids: &'a [ItemId],
        rate: &'a BTreeMap<ItemId, Rat>,
        best: Rat,
        nodes: u64,
        budget: u64,
        exhausted: bool,
    }
    impl Search<'_> {
        fn rec(&mut self, p: usize, residual: &mut Vec<u64>, cost: Rat) {
            if self.exhausted || cost >= self.best {
                return;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                self.exhausted = true;
                return;
            }
            if residual.iter().all(|&v| v == 0) {
                self.best = cost;
                return;
            }
            if p == self.patterns.len() {
                return;
            }
            // bound: most expensive single-type deficit
            let mut bound = Rat::zero();
            for (i, &id) in self.ids.iter().enumerate() {
                if residual[i] > 0 {
                    let need = &self.rate[&id] * &Rat::from(residual[i]);
                    if need > bound {
                        bound = need;
                    }
                }
            }
            if &cost + &bound >= self.best {
                return;
            }
            let pat = &self.patterns[p];
            let mut ub = 0u64;
            for (i, &id) in self.ids.iter().enumerate() {
                let c = pat.get(id);
                if c > 0 && residual[i] > 0 {
                    ub = ub.max(residual[i].div_ceil(c));
                }
            }
            for take in (0..=ub).rev() {
                let mut next = residual.clone();
                for (i, &id) in self.ids.iter().enumerate() {
                    next[i] = next[i].saturating_sub(take * pat.get(id));
                }
                let c = &cost + &(&pat.cost * &Rat::from(take));
                self.rec(p + 1, &mut next, c);
                if self.exhausted {
                    return;
                }
            }
        }
    }
    let mut search = Search {
        patterns: &patterns,
        ids: &ids,
        rate: &rate,
        best: incumbent,
        nodes: 0,
        budget: opts.node_budget,
        exhausted: false,
    };
    let mut residual: Vec<u64> = ids.iter().map(|&id| demand.get(id)).collect();
    if search.best > lower {
        search.rec(0, &mut residual, Rat::zero());
    }
    if search.exhausted {
        return Ok(ExactSearch {
            value: None,
            nodes: search.nodes,
        });
    }
    Ok(ExactSearch {
        value: Some(search.best),
        nodes: search.nodes,
    })
}

#[cfg(test)]
mod tests;
