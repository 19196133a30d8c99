//! Bounded enumeration of L-subgroups inside a pointwise box, with the
//! maximality, Frattini, non-generator and finite-generation machinery built
//! on top of it.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::lattice::{FiniteLattice, LatticeElement};
use crate::lgroup::{generate, generate_with, is_lsubgroup_of, is_proper, ClosureCache};
use crate::lset::{LPoint, LSubset};

pub const DEFAULT_MAX_CANDIDATES: u64 = 1_000_000;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub max_candidates: u64,
    pub max_results: usize,
    /// `0` uses the ambient thread pool, `1` runs sequentially.
    pub threads: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_candidates: DEFAULT_MAX_CANDIDATES,
            max_results: usize::MAX,
            threads: 0,
        }
    }
}

impl Budget {
    pub fn with_candidates(max_candidates: u64) -> Self {
        Budget {
            max_candidates,
            ..Self::default()
        }
    }

    pub fn sequential(self) -> Self {
        Budget { threads: 1, ..self }
    }

    fn run<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        match self.threads {
            0 | 1 => f(),
            n => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(pool) => pool.install(f),
                Err(_) => f(),
            },
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum BoxFilter {
    LSubgroup,
    LSubgroupOfHi,
    None,
}

#[derive(Clone, Debug)]
pub struct BoxEnumeration {
    /// Sorted canonically.
    pub members: Vec<LSubset>,
    /// `∏ |[lo(x), hi(x)]|`
    pub box_size: u128,
    pub visited: u64,
    pub complete: bool,
}

impl BoxEnumeration {
    /// Turns a partial enumeration into [`Error::BudgetExceeded`].
    pub fn certified(self) -> Result<Self> {
        if self.complete {
            Ok(self)
        } else {
            Err(Error::BudgetExceeded {
                visited: self.visited,
            })
        }
    }
}

struct BoxSearch<'a> {
    lattice: &'a FiniteLattice,
    order: usize,
    classes: Vec<Vec<usize>>,
    options: Vec<Vec<LatticeElement>>,
    checks: Vec<Vec<(usize, usize, usize)>>,
    budget: Budget,
    visited: AtomicU64,
    found: AtomicUsize,
    aborted: AtomicBool,
}

impl BoxSearch<'_> {
    fn assign(&self, k: usize, v: LatticeElement, values: &mut [LatticeElement]) -> bool {
        for &x in &self.classes[k] {
            values[x] = v;
        }
        let l = self.lattice;
        self.checks[k]
            .iter()
            .all(|&(p, q, pq)| l.leq(l.meet(values[p], values[q]), values[pq]))
    }

    fn tick(&self) -> bool {
        if self.aborted.load(Ordering::Relaxed) {
            return false;
        }
        if self.visited.fetch_add(1, Ordering::Relaxed) >= self.budget.max_candidates {
            self.aborted.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    fn dfs(&self, k: usize, values: &mut Vec<LatticeElement>, out: &mut Vec<Vec<LatticeElement>>) {
        if k == self.classes.len() {
            if self.found.fetch_add(1, Ordering::Relaxed) >= self.budget.max_results {
                self.aborted.store(true, Ordering::Relaxed);
            } else {
                out.push(values.clone());
            }
            return;
        }
        for &v in &self.options[k] {
            if !self.tick() {
                return;
            }
            if self.assign(k, v, values) {
                self.dfs(k + 1, values, out);
            }
        }
    }

    /// Partial assignments that survive the first `depth` classes.
    fn prefixes(&self, depth: usize) -> Vec<Vec<LatticeElement>> {
        let mut frontier = vec![vec![self.lattice.bottom(); self.order]];
        for k in 0..depth {
            let mut next = Vec::new();
            for values in frontier {
                for &v in &self.options[k] {
                    if !self.tick() {
                        return next;
                    }
                    let mut values = values.clone();
                    if self.assign(k, v, &mut values) {
                        next.push(values);
                    }
                }
            }
            frontier = next;
        }
        frontier
    }
}

/// Every `θ` with `lo ⊆ θ ⊆ hi`, optionally restricted to L-subgroups.
pub fn enumerate_box(
    lo: &LSubset,
    hi: &LSubset,
    filter: BoxFilter,
    budget: Budget,
) -> Result<BoxEnumeration> {
    if !lo.is_subset_of(hi)? {
        return Err(Error::NotContained);
    }
    let g = lo.group();
    let l = lo.lattice();
    let n = g.order();
    let interval = |x: usize| {
        let x = GroupElement::new(x);
        l.interval(lo.value(x), hi.value(x)).expect("lo ⊆ hi")
    };
    let box_size = (0..n)
        .map(|x| interval(x).len() as u128)
        .fold(1u128, |a, b| a.saturating_mul(b));
    let paired = filter != BoxFilter::None;

    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut seen = vec![false; n];
    for x in 0..n {
        if seen[x] {
            continue;
        }
        let xi = g.inv(GroupElement::new(x)).index();
        seen[x] = true;
        if paired && xi != x {
            seen[xi] = true;
            classes.push(vec![x, xi]);
        } else {
            classes.push(vec![x]);
        }
    }
    let class_options = |class: &Vec<usize>| -> Vec<LatticeElement> {
        let mut opts = interval(class[0]);
        for &x in &class[1..] {
            let other = interval(x);
            opts.retain(|v| other.contains(v));
        }
        opts
    };
    let mut order: Vec<(usize, Vec<usize>, Vec<LatticeElement>)> = classes
        .into_iter()
        .map(|c| (c[0], c.clone(), class_options(&c)))
        .collect();
    order.sort_by_key(|(first, _, opts)| (*first != 0, opts.len(), *first));

    let mut pos = vec![0usize; n];
    for (k, (_, class, _)) in order.iter().enumerate() {
        for &x in class {
            pos[x] = k;
        }
    }
    let mut checks = vec![Vec::new(); order.len()];
    if paired {
        for p in 0..n {
            for q in 0..n {
                let pq = g.mul(GroupElement::new(p), GroupElement::new(q)).index();
                checks[pos[p].max(pos[q]).max(pos[pq])].push((p, q, pq));
            }
        }
    }
    let (classes, options): (Vec<_>, Vec<_>) = order.into_iter().map(|(_, c, o)| (c, o)).unzip();
    let search = BoxSearch {
        lattice: l,
        order: n,
        classes,
        options,
        checks,
        budget,
        visited: AtomicU64::new(0),
        found: AtomicUsize::new(0),
        aborted: AtomicBool::new(false),
    };

    let mut raw: Vec<Vec<LatticeElement>> = if search.options.iter().any(|o| o.is_empty()) {
        Vec::new()
    } else if budget.threads == 1 || search.classes.len() < 3 {
        let mut out = Vec::new();
        search.dfs(0, &mut vec![l.bottom(); n], &mut out);
        out
    } else {
        let mut depth = 0;
        let mut width = 1usize;
        while depth < search.classes.len() - 1 && width < 64 {
            width = width.saturating_mul(search.options[depth].len());
            depth += 1;
        }
        let prefixes = search.prefixes(depth);
        budget.run(|| {
            prefixes
                .into_par_iter()
                .flat_map_iter(|mut values| {
                    let mut out = Vec::new();
                    search.dfs(depth, &mut values, &mut out);
                    out
                })
                .collect()
        })
    };
    raw.sort();
    Ok(BoxEnumeration {
        members: raw.into_iter().map(|v| lo.with_values(v)).collect(),
        box_size,
        visited: search.visited.load(Ordering::Relaxed),
        complete: !search.aborted.load(Ordering::Relaxed),
    })
}

#[derive(Clone, Debug)]
pub struct MaximalityCertificate {
    pub subject: LSubset,
    pub ambient: LSubset,
    pub verdict: bool,
    pub strict_intermediate: Option<LSubset>,
    /// Set when the subject is not a proper L-subgroup of the ambient.
    pub not_proper: bool,
    pub box_size: u128,
    pub survivors: usize,
}

/// Proper, and every L-subgroup between `η` and `μ` is one of the two.
pub fn is_maximal(eta: &LSubset, mu: &LSubset, budget: Budget) -> Result<MaximalityCertificate> {
    if !is_lsubgroup_of(eta, mu)? {
        return Err(Error::NotAnLSubgroup("maximality needs η ∈ L(μ)".into()));
    }
    let proper = is_proper(eta, mu)?;
    let found = enumerate_box(eta, mu, BoxFilter::LSubgroup, budget)?.certified()?;
    let strict_intermediate = found
        .members
        .iter()
        .find(|t| *t != eta && *t != mu)
        .cloned();
    Ok(MaximalityCertificate {
        subject: eta.clone(),
        ambient: mu.clone(),
        verdict: proper && strict_intermediate.is_none(),
        strict_intermediate,
        not_proper: !proper,
        box_size: found.box_size,
        survivors: found.members.len(),
    })
}

/// `L(μ)` in canonical order.
pub fn all_lsubgroups(mu: &LSubset, budget: Budget) -> Result<Vec<LSubset>> {
    let bottom = LSubset::bottom(mu.group(), mu.lattice());
    Ok(enumerate_box(&bottom, mu, BoxFilter::LSubgroup, budget)?
        .certified()?
        .members)
}

/// Indices of the members not strictly below another member.
fn poset_maximal(members: &[&LSubset]) -> Vec<usize> {
    (0..members.len())
        .filter(|&i| {
            !members
                .iter()
                .enumerate()
                .any(|(j, m)| j != i && members[i].le_unchecked(m) && members[i] != *m)
        })
        .collect()
}

/// Maximal elements of `L(μ) \ {μ}`, constants included.
pub fn coatoms(subgroups: &[LSubset], mu: &LSubset) -> Vec<LSubset> {
    let rest: Vec<&LSubset> = subgroups.iter().filter(|t| *t != mu).collect();
    poset_maximal(&rest)
        .into_iter()
        .map(|i| rest[i].clone())
        .collect()
}

/// Maximal L-subgroups of `μ` from a full listing of `L(μ)`.
pub fn maximal_among(subgroups: &[LSubset], mu: &LSubset) -> Vec<LSubset> {
    coatoms(subgroups, mu)
        .into_iter()
        .filter(|t| t.tip() != t.tail())
        .collect()
}

pub fn all_maximal(mu: &LSubset, budget: Budget) -> Result<Vec<LSubset>> {
    Ok(maximal_among(&all_lsubgroups(mu, budget)?, mu))
}

/// Pointwise meet of the maximal L-subgroups, `μ` when there are none.
pub fn frattini_of(maximal: &[LSubset], mu: &LSubset) -> LSubset {
    maximal.iter().fold(mu.clone(), |acc, m| {
        acc.intersection(m).expect("same carrier")
    })
}

/// Answers non-generator queries against a fixed `μ`.
pub struct NonGenerators {
    mu: LSubset,
    coatoms: Vec<LSubset>,
}

impl NonGenerators {
    pub fn new(mu: &LSubset, budget: Budget) -> Result<Self> {
        let subgroups = all_lsubgroups(mu, budget)?;
        Ok(Self::from_subgroups(&subgroups, mu))
    }

    pub fn from_subgroups(subgroups: &[LSubset], mu: &LSubset) -> Self {
        NonGenerators {
            mu: mu.clone(),
            coatoms: coatoms(subgroups, mu),
        }
    }

    /// No `θ ∈ L(μ) \ {μ}` has `⟨θ ∪ a_x⟩ = μ`; checking the coatoms suffices.
    pub fn is_nongenerator(&self, p: LPoint) -> bool {
        let mut cache = ClosureCache::new();
        self.is_nongenerator_with(p, &mut cache)
    }

    fn is_nongenerator_with(&self, p: LPoint, cache: &mut ClosureCache) -> bool {
        let point = LSubset::point(self.mu.group(), self.mu.lattice(), p);
        !self
            .coatoms
            .iter()
            .any(|t| generate_with(&t.union(&point).expect("same carrier"), cache) == self.mu)
    }

    /// `λ = ⋃ {a_x : a_x a non-generator}`.
    pub fn lambda(&self) -> LSubset {
        let (g, l) = (self.mu.group(), self.mu.lattice());
        let mut cache = ClosureCache::new();
        let values = g
            .elements()
            .map(|x| {
                let good = l
                    .down_set(self.mu.value(x))
                    .into_iter()
                    .filter(|&a| self.is_nongenerator_with(LPoint::new(a, x), &mut cache));
                l.sup(good)
            })
            .collect();
        self.mu.with_values(values)
    }
}

pub fn is_nongenerator(p: LPoint, mu: &LSubset, budget: Budget) -> Result<bool> {
    if !p.belongs_to(mu) {
        return Err(Error::Input("the point does not belong to μ".into()));
    }
    Ok(NonGenerators::new(mu, budget)?.is_nongenerator(p))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Via {
    Enumeration,
    NonGenerators,
    Both,
}

#[derive(Clone, Debug)]
pub struct FrattiniReport {
    pub phi: Option<LSubset>,
    pub lambda: Option<LSubset>,
    pub maximal_count: Option<usize>,
    /// Set for [`Via::Both`]: `λ ⊆ Φ`.
    pub lambda_within_phi: Option<bool>,
    /// Set for [`Via::Both`] on chain lattices: `λ = Φ`.
    pub chain_equality: Option<bool>,
}

impl FrattiniReport {
    /// The enumeration value when present, `λ` otherwise.
    pub fn value(&self) -> &LSubset {
        self.phi
            .as_ref()
            .or(self.lambda.as_ref())
            .expect("at least one path runs")
    }

    pub fn consistent(&self) -> bool {
        self.lambda_within_phi != Some(false) && self.chain_equality != Some(false)
    }
}

pub fn frattini(mu: &LSubset, budget: Budget, via: Via) -> Result<FrattiniReport> {
    let subgroups = all_lsubgroups(mu, budget)?;
    let maximal = maximal_among(&subgroups, mu);
    let phi = matches!(via, Via::Enumeration | Via::Both).then(|| frattini_of(&maximal, mu));
    let lambda = matches!(via, Via::NonGenerators | Via::Both)
        .then(|| NonGenerators::from_subgroups(&subgroups, mu).lambda());
    let (within, equal) = match (&phi, &lambda) {
        (Some(p), Some(l)) => {
            let chain = mu.lattice().is_chain();
            (Some(l.le_unchecked(p)), chain.then(|| l == p))
        }
        _ => (None, None),
    };
    Ok(FrattiniReport {
        phi,
        lambda,
        maximal_count: Some(maximal.len()),
        lambda_within_phi: within,
        chain_equality: equal,
    })
}

#[derive(Clone, Debug)]
pub struct GeneratingSet {
    pub points: Vec<LPoint>,
    pub target: LSubset,
    pub complete: bool,
    /// Least-cardinality witness of size at most `k_max`, when one exists.
    pub minimum: Option<Vec<LPoint>>,
    /// Set when the exhaustive search ran out of budget.
    pub minimum_search_complete: bool,
}

/// Greedy ascent over `(μ(x))_x`, non-identity elements first.
pub fn greedy_points(mu: &LSubset) -> Vec<LPoint> {
    let (g, l) = (mu.group(), mu.lattice());
    let mut order: Vec<GroupElement> = g.elements().skip(1).collect();
    order.push(g.identity());
    let mut points = Vec::new();
    let mut cache = ClosureCache::new();
    let mut current = generate_with(&LSubset::bottom(g, l), &mut cache);
    while current != *mu {
        let Some(&x) = order
            .iter()
            .find(|&&x| !l.leq(mu.value(x), current.value(x)))
        else {
            break;
        };
        points.push(LPoint::new(mu.value(x), x));
        current = generate_with(&LSubset::points(g, l, &points), &mut cache);
    }
    points
}

pub fn generating_points(mu: &LSubset, k_max: usize, budget: Budget) -> Result<GeneratingSet> {
    let (g, l) = (mu.group(), mu.lattice());
    let points = greedy_points(mu);
    let complete = generate(&LSubset::points(g, l, &points)) == *mu;
    let candidates: Vec<LPoint> = g
        .elements()
        .filter(|&x| mu.value(x) != l.bottom())
        .map(|x| LPoint::new(mu.value(x), x))
        .collect();
    let mut cache = ClosureCache::new();
    let mut visited = 0u64;
    let mut minimum = None;
    let mut search_complete = true;
    'sizes: for k in 0..=k_max.min(candidates.len()) {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            visited += 1;
            if visited > budget.max_candidates {
                search_complete = false;
                break 'sizes;
            }
            let chosen: Vec<LPoint> = idx.iter().map(|&i| candidates[i]).collect();
            if generate_with(&LSubset::points(g, l, &chosen), &mut cache) == *mu {
                minimum = Some(chosen);
                break 'sizes;
            }
            // next k-combination in lexicographic order
            let mut i = k;
            while i > 0 && idx[i - 1] == candidates.len() - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    Ok(GeneratingSet {
        points,
        target: mu.clone(),
        complete,
        minimum,
        minimum_search_complete: search_complete,
    })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaximalConditionReport {
    pub count: usize,
    pub longest_chain: usize,
}

/// Height of each lattice element above the bottom.
fn heights(l: &FiniteLattice) -> Vec<usize> {
    let mut h = vec![0usize; l.size()];
    let mut order: Vec<LatticeElement> = l.iter().collect();
    order.sort_by_key(|&x| l.down_mask(x).count_ones());
    for x in order {
        h[x.index()] = l
            .lower_covers(x)
            .iter()
            .map(|c| h[c.index()] + 1)
            .max()
            .unwrap_or(0);
    }
    h
}

/// Number of members and longest strictly ascending chain of a family.
pub fn chain_report(members: &[LSubset]) -> MaximalConditionReport {
    let Some(first) = members.first() else {
        return MaximalConditionReport {
            count: 0,
            longest_chain: 0,
        };
    };
    let h = heights(first.lattice());
    let weight = |t: &LSubset| t.values().iter().map(|v| h[v.index()]).sum::<usize>();
    let mut sorted: Vec<&LSubset> = members.iter().collect();
    sorted.sort_by_key(|t| weight(t));
    let mut best = vec![1usize; sorted.len()];
    for i in 0..sorted.len() {
        for j in 0..i {
            if sorted[j] != sorted[i] && sorted[j].le_unchecked(sorted[i]) {
                best[i] = best[i].max(best[j] + 1);
            }
        }
    }
    MaximalConditionReport {
        count: members.len(),
        longest_chain: best.into_iter().max().unwrap_or(0),
    }
}

pub fn maximal_condition_report(mu: &LSubset, budget: Budget) -> Result<MaximalConditionReport> {
    Ok(chain_report(&all_lsubgroups(mu, budget)?))
}

/// A maximal member of `{ν ∈ L(μ) : θ ⊆ ν, a_x ∉ ν}`, canonically least.
pub fn zorn_witness(theta: &LSubset, p: LPoint, mu: &LSubset, budget: Budget) -> Result<LSubset> {
    if !is_lsubgroup_of(theta, mu)? {
        return Err(Error::NoWitness("θ is not an L-subgroup of μ".into()));
    }
    if !p.belongs_to(mu) {
        return Err(Error::NoWitness("the point does not belong to μ".into()));
    }
    if p.belongs_to(theta) {
        return Err(Error::NoWitness("the point already belongs to θ".into()));
    }
    let found = enumerate_box(theta, mu, BoxFilter::LSubgroup, budget)?.certified()?;
    let avoiding: Vec<&LSubset> = found.members.iter().filter(|t| !p.belongs_to(t)).collect();
    let top = poset_maximal(&avoiding);
    Ok(avoiding[top[0]].clone())
}

#[derive(Clone, Debug)]
pub struct MaximalContaining {
    pub result: LSubset,
    /// The generator-point iteration produced a certified maximal member.
    pub via_iteration: bool,
    pub steps: usize,
}

/// Follows the generator-point iteration, falling back to the canonically
/// least maximal member containing `η` if the iterate is not maximal.
pub fn maximal_containing(
    eta: &LSubset,
    mu: &LSubset,
    budget: Budget,
) -> Result<MaximalContaining> {
    if !is_proper(eta, mu)? {
        return Err(Error::NotAnLSubgroup(
            "η must be a proper L-subgroup of μ".into(),
        ));
    }
    if is_maximal(eta, mu, budget)?.verdict {
        return Ok(MaximalContaining {
            result: eta.clone(),
            via_iteration: true,
            steps: 0,
        });
    }
    let (g, l) = (mu.group(), mu.lattice());
    let generators = greedy_points(mu);
    let mut current = eta.clone();
    let mut steps = 0;
    let mut candidate = None;
    while let Some(&b) = generators.iter().find(|p| !p.belongs_to(&current)) {
        steps += 1;
        let theta = zorn_witness(&current, b, mu, budget)?;
        let next = generate(&theta.union(&LSubset::point(g, l, b))?);
        if next == *mu {
            candidate = Some(theta);
            break;
        }
        current = next;
    }
    if let Some(theta) = candidate {
        if is_maximal(&theta, mu, budget)?.verdict {
            return Ok(MaximalContaining {
                result: theta,
                via_iteration: true,
                steps,
            });
        }
    }
    let result = all_maximal(mu, budget)?
        .into_iter()
        .find(|m| eta.le_unchecked(m))
        .ok_or_else(|| Error::NoWitness("no maximal L-subgroup contains η".into()))?;
    Ok(MaximalContaining {
        result,
        via_iteration: false,
        steps,
    })
}

/// `η ∘ Φ(μ) = μ`.
pub fn frattini_product_check(eta: &LSubset, mu: &LSubset, budget: Budget) -> Result<bool> {
    let report = frattini(mu, budget, Via::Enumeration)?;
    Ok(eta.set_product(report.value())? == *mu)
}
