//! The additive-gap rounding loop: solve a basic LP, keep the floors, group
//! the residual demand per chain and size class, round each kept group up to
//! its largest element, cover the discarded groups along their chains, and
//! recurse. The support of the demand at least halves per iteration, so the
//! loop ends after logarithmically many rounds with a single item type that
//! a witness pattern finishes off.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{self, LpOptions};
use crate::model::{self, CoverSet, Demand, Instance, ItemId, SetSystemSpec};
use crate::rat::Rat;
use crate::sizes::{self, AlphaMode, PseudoSizeVector};

/// An integral cover: sets with purchase counts.
#[derive(Clone, Debug, Default)]
pub struct Solution {
    pub purchases: Vec<(CoverSet, u64)>,
}

impl Solution {
    pub fn cost(&self) -> Rat {
        self.purchases
            .iter()
            .map(|(s, c)| &s.cost * &Rat::from(*c))
            .sum()
    }

    pub fn set_count(&self) -> u64 {
        self.purchases.iter().map(|(_, c)| c).sum()
    }

    /// Every purchased set passes membership, and the bought slots can be
    /// downgraded into a cover of the demand.
    pub fn verify(&self, instance: &Instance, demand: &Demand) -> Result<()> {
        for (set, _) in &self.purchases {
            if instance.member(&set.elements).is_none() {
                return Err(Error::Internal(format!(
                    "purchased set {set} is not a member of the system"
                )));
            }
        }
        let slots: Vec<(&BTreeMap<ItemId, u64>, u64)> = self
            .purchases
            .iter()
            .map(|(s, c)| (&s.elements, *c))
            .collect();
        if !model::can_cover(&slots, demand, instance.order()) {
            return Err(Error::Internal(
                "purchased sets cannot be downgraded into a cover".into(),
            ));
        }
        Ok(())
    }
}

/// Result of one grouping pass over the residual demand.
#[derive(Clone, Debug)]
pub struct GroupingOutcome {
    /// Rounded demand b'': every kept group's weight on its largest type.
    pub rounded: Demand,
    /// Discarded copies per chain index, largest first.
    pub discarded: Vec<(usize, Vec<(ItemId, u64)>)>,
    /// Group size per size class that occurred.
    pub group_sizes: BTreeMap<u32, u64>,
    /// Total pseudo size of the discarded copies per chain index.
    pub discarded_size: Vec<(usize, Rat)>,
}

/// Cut each chain's demand into per-size-class groups of `⌈4·2^ℓ·α⌉`
/// consecutive copies (largest first), discard the first and last group of
/// every class, and move each kept group's demand onto its largest type.
pub fn group_round(
    residual: &Demand,
    chains: &[Vec<ItemId>],
    sizes: &PseudoSizeVector,
    alpha: &Rat,
) -> GroupingOutcome {
    let mut rounded = Demand::new();
    let mut discarded = Vec::new();
    let mut discarded_size = Vec::new();
    let mut group_sizes = BTreeMap::new();
    for (chain_idx, chain) in chains.iter().enumerate() {
        // demand of this chain in chain order (largest first), by class
        let mut per_class: BTreeMap<u32, Vec<(ItemId, u64)>> = BTreeMap::new();
        for &id in chain {
            let count = residual.get(id);
            if count > 0 {
                per_class
                    .entry(sizes::size_class(sizes.get(id)))
                    .or_default()
                    .push((id, count));
            }
        }
        let mut chain_discarded: Vec<(ItemId, u64)> = Vec::new();
        let mut chain_discarded_size = Rat::zero();
        for (class, runs) in per_class {
            let group_size = (Rat::from(4u64) * Rat::pow2(class as i64) * alpha).ceil_u64().max(1);
            group_sizes.entry(class).or_insert(group_size);
            let total: u64 = runs.iter().map(|(_, c)| c).sum();
            let groups = total.div_ceil(group_size);
            // walk the runs, splitting copies at group boundaries
            let mut run_iter = runs.into_iter();
            let mut current = run_iter.next();
            for g in 0..groups {
                let mut need = group_size.min(total - g * group_size);
                let keep = g > 0 && g + 1 < groups;
                let mut group_max: Option<ItemId> = None;
                let group_quota = need;
                while need > 0 {
                    let Some((id, avail)) = current.as_mut() else {
                        break;
                    };
                    let take = need.min(*avail);
                    if group_max.is_none() {
                        group_max = Some(*id);
                    }
                    if !keep {
                        chain_discarded.push((*id, take));
                        chain_discarded_size += &(sizes.get(*id) * &Rat::from(take));
                    }
                    *avail -= take;
                    need -= take;
                    if *avail == 0 {
                        current = run_iter.next();
                    }
                }
                if keep {
                    rounded.add(group_max.expect("kept group is nonempty"), group_quota);
                }
            }
        }
        if !chain_discarded.is_empty() {
            discarded.push((chain_idx, chain_discarded));
            discarded_size.push((chain_idx, chain_discarded_size));
        }
    }
    GroupingOutcome {
        rounded,
        discarded,
        group_sizes,
        discarded_size,
    }
}

/// Per-iteration certificate entries of the rounding loop.
#[derive(Clone, Debug, Serialize)]
pub struct IterationCert {
    pub lp_value: Rat,
    pub floors_cost: Rat,
    pub discard_cover_cost: Rat,
    pub discard_cover_certificate: Rat,
    pub support_before: usize,
    pub support_after: usize,
    pub residual_size: Rat,
}

/// Cost decomposition of the produced solution.
#[derive(Clone, Debug, Default, Serialize)]
pub struct CertificateBreakdown {
    pub tiny_cover_cost: Rat,
    pub iterations: Vec<IterationCert>,
    pub final_cover_cost: Rat,
}

/// Gap measurement for one solver run.
#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    pub opt_f: Rat,
    pub cost: Rat,
    pub exact_opt: Option<Rat>,
    /// `cost - opt_f`, or `exact_opt - opt_f` when the exact optimum is known.
    pub additive_gap: Rat,
    /// `cost / opt_f` (or `exact_opt / opt_f`); absent when `opt_f = 0`.
    pub multiplicative_ratio: Option<Rat>,
    pub certificate: CertificateBreakdown,
    pub bound: Rat,
    pub iterations: usize,
}

impl GapReport {
    pub fn attach_exact(&mut self, exact: Rat) {
        self.additive_gap = &exact - &self.opt_f;
        if self.opt_f.is_positive() {
            self.multiplicative_ratio = Some(&exact / &self.opt_f);
        }
        self.exact_opt = Some(exact);
    }
}

#[derive(Clone, Debug)]
pub struct RoundingOptions {
    pub lp: LpOptions,
    pub alpha_mode: AlphaMode,
}

impl Default for RoundingOptions {
    fn default() -> Self {
        RoundingOptions {
            lp: LpOptions::default(),
            alpha_mode: AlphaMode::ExactOverGenerators,
        }
    }
}

/// The additive-gap algorithm. Returns a feasible integral solution together
/// with a report whose certificate decomposes `cost - opt_f` into audited
/// terms.
pub fn additive_round(
    instance: &Instance,
    opts: &RoundingOptions,
) -> Result<(Solution, GapReport)> {
    let original = instance.demand();
    let lp_opts = &opts.lp;
    let opt_f = lp::optimal_fractional(instance, &original, lp_opts)?.objective;
    let mut solution = Solution::default();
    let mut certificate = CertificateBreakdown::default();

    if original.is_zero() {
        let report = finish_report(instance, opt_f, &solution, certificate, 0);
        return Ok((solution, report));
    }

    let sizes = sizes::compute_sizes(instance)?;
    let tiny = sizes::discard_tiny(instance, &sizes, &original);
    solution.purchases.extend(tiny.purchases.clone());
    certificate.tiny_cover_cost = tiny.cost.clone();
    let chains = instance.chains();
    let alpha = sizes::alpha_bound(instance, &sizes, opts.alpha_mode).value;

    let mut demand = tiny.kept;
    let support0 = demand.support();
    let mut iterations = 0usize;
    while demand.support() > 1 {
        iterations += 1;
        let support_before = demand.support();
        let sol = lp::optimal_fractional(instance, &demand, lp_opts)?;
        let (floors, _) = lp::take_floors(&sol);
        let mut floors_cost = Rat::zero();
        for (p, copies) in &floors {
            floors_cost += &(&p.cost * &Rat::from(*copies));
            solution.purchases.push((p.as_cover_set(), *copies));
        }
        let residual = lp::residual(&demand, &sol);
        let residual_size = sizes.size_of(&residual);
        // a basic solution has at most support(b) fractional weights, each
        // leaving at most one set's worth of size behind
        let size_bound = &Rat::from(support_before) * &alpha;
        if residual_size > size_bound {
            return Err(Error::Internal(format!(
                "residual size {residual_size} exceeds support·α = {size_bound}"
            )));
        }
        let outcome = group_round(&residual, chains, &sizes, &alpha);
        let mut discard_cost = Rat::zero();
        let mut discard_cert = Rat::zero();
        for (_, chain_discarded) in &outcome.discarded {
            let cover = sizes::cover_chain(chain_discarded, &sizes, instance)?;
            discard_cost += &cover.cost;
            discard_cert += &cover.certificate;
            solution.purchases.extend(cover.purchases);
        }
        let support_after = outcome.rounded.support();
        if 2 * support_after > support_before {
            return Err(Error::Internal(format!(
                "grouping kept support {support_after} out of {support_before}; halving failed"
            )));
        }
        certificate.iterations.push(IterationCert {
            lp_value: sol.objective.clone(),
            floors_cost,
            discard_cover_cost: discard_cost,
            discard_cover_certificate: discard_cert,
            support_before,
            support_after,
            residual_size,
        });
        demand = outcome.rounded;
    }
    if !demand.is_zero() {
        // single remaining type: ceiling of the LP weight on its witness
        let (id, count) = demand.iter().next().expect("support is one");
        let witness = sizes.witness(id);
        let copies = count.div_ceil(witness.copies.max(1));
        let set = CoverSet::new([(id, witness.copies.max(1))], witness.cost.clone());
        certificate.final_cover_cost = &Rat::from(copies) * &witness.cost;
        solution.purchases.push((set, copies));
    }
    if iterations > support0.max(1).ilog2() as usize + 1 {
        return Err(Error::Internal(format!(
            "{iterations} iterations exceed the halving bound for support {support0}"
        )));
    }
    solution.verify(instance, &original)?;
    let report = finish_report(instance, opt_f, &solution, certificate, iterations);
    Ok((solution, report))
}

fn finish_report(
    instance: &Instance,
    opt_f: Rat,
    solution: &Solution,
    certificate: CertificateBreakdown,
    iterations: usize,
) -> GapReport {
    let cost = solution.cost();
    let additive_gap = &cost - &opt_f;
    let multiplicative_ratio = if opt_f.is_positive() {
        Some(&cost / &opt_f)
    } else {
        None
    };
    let k = instance.k_bound().unwrap_or(instance.n() as u64).max(1);
    let bound = gap_bound(
        instance.element_count().max(1),
        instance.d().max(1) as u64,
        k,
        is_unit_cost(instance),
    );
    GapReport {
        opt_f,
        cost,
        exact_opt: None,
        additive_gap,
        multiplicative_ratio,
        certificate,
        bound,
        iterations,
    }
}

pub fn is_unit_cost(instance: &Instance) -> bool {
    match instance.system() {
        SetSystemSpec::Explicit { sets } | SetSystemSpec::Generators { sets } => {
            sets.iter().all(|s| s.cost == Rat::one())
        }
        SetSystemSpec::Adapter { adapter } => matches!(
            adapter,
            model::AdapterSpec::CardinalityBp { .. }
                | model::AdapterSpec::OpenEndBp { .. }
                | model::AdapterSpec::VectorPacking { .. }
                | model::AdapterSpec::PartitionOracle { .. }
        ),
    }
}

/// Certificate-level value of the additive-gap guarantee, with every
/// constant tracked:
///
/// * `α ≤ d · (1 + (7/10)(⌊log₂ k⌋ + 1))`, the harmonic bound on the
///   per-chain size of a set times the chain count,
/// * `L = ⌊log₂ n²⌋ + 1` size classes (`⌊log₂ k⌋ + 1` for unit costs, where
///   sizes are at least `1/k`),
/// * per chain and iteration the discarded copies have size at most
///   `8αL + 4` (the `+4` covers the group-size ceilings), covered at twice
///   that plus one underfull set per class,
/// * `⌈log₂ n⌉ + 1` iterations by support halving,
/// * plus one unit for the tiny items and one for the final witness cover.
pub fn gap_bound(n: u64, d: u64, k: u64, unit_cost: bool) -> Rat {
    let n = n.max(2);
    let d_rat = Rat::from(d.max(1));
    let k = k.max(1);
    let alpha = &d_rat * &sizes::harmonic_upper(k);
    let classes = if unit_cost {
        Rat::from(Rat::from(k).floor_log2().max(0) + 1)
    } else {
        Rat::from(Rat::from(n * n).floor_log2().max(0) + 1)
    };
    let iterations = Rat::from(ceil_log2(n) + 1);
    let discard_size = Rat::from(8u64) * &alpha * &classes + Rat::from(4u64);
    let per_chain = Rat::from(2u64) * discard_size + classes;
    iterations * d_rat * per_chain + Rat::from(2u64)
}

fn ceil_log2(n: u64) -> u64 {
    debug_assert!(n >= 1);
    let f = Rat::from(n).floor_log2() as u64;
    if n == (1u64 << f) {
        f
    } else {
        f + 1
    }
}
