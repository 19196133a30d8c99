//! L-subgroups: membership and normality predicates, generation, cosets,
//! normalizers, commutators, central chains and normal closures.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupElement, Subgroup};
use crate::lattice::LatticeElement;
use crate::lset::{LPoint, LSubset, PAR_THRESHOLD};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Pointwise,
    Levels,
    StrongLevels,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Counterexample {
    /// `μ(xy) ≱ μ(x) ∧ μ(y)`
    Product(GroupElement, GroupElement),
    /// `μ(x⁻¹) ≠ μ(x)`
    Inverse(GroupElement),
    /// the (strong) level at this value is non-empty and not a subgroup
    Level(LatticeElement),
}

#[derive(Clone, Debug)]
pub struct LSubgroupWitness {
    pub subject: LSubset,
    pub verdict: bool,
    pub mode: Mode,
    pub counterexample: Option<Counterexample>,
}

impl LSubgroupWitness {
    /// Re-evaluates the stored counterexample against the subject.
    pub fn recheck(&self) -> bool {
        let mu = &self.subject;
        let (g, l) = (mu.group(), mu.lattice());
        match self.counterexample {
            None => self.verdict,
            Some(Counterexample::Product(x, y)) => {
                !l.leq(l.meet(mu.value(x), mu.value(y)), mu.value(g.mul(x, y)))
            }
            Some(Counterexample::Inverse(x)) => mu.value(x) != mu.value(g.inv(x)),
            Some(Counterexample::Level(a)) => {
                let level = mu.level(a, self.mode == Mode::StrongLevels);
                !level.is_clear() && !g.is_subgroup(&level)
            }
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Want {
    LSubset,
    LSubgroup,
}

#[derive(Clone, Debug)]
pub struct CentralChain {
    pub stages: Vec<LSubset>,
    pub stabilized: bool,
    pub class_index: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct ClosureSeries {
    pub stages: Vec<LSubset>,
    /// The last stage repeats the previous one without reaching `η`.
    pub stabilized: bool,
    pub reached_eta: bool,
}

/// Safety valve for chain iterations: `|G| · |L|`.
pub fn default_max_steps(mu: &LSubset) -> usize {
    mu.group().order() * mu.lattice().size()
}

fn first_product_violation(mu: &LSubset) -> Option<Counterexample> {
    let (g, l) = (mu.group(), mu.lattice());
    for x in g.elements() {
        let vx = mu.value(x);
        for y in g.elements() {
            if !l.leq(l.meet(vx, mu.value(y)), mu.value(g.mul(x, y))) {
                return Some(Counterexample::Product(x, y));
            }
        }
    }
    g.elements()
        .find(|&x| mu.value(x) != mu.value(g.inv(x)))
        .map(Counterexample::Inverse)
}

/// Pointwise L-subgroup test without building a witness.
pub fn is_lsubgroup_fast(mu: &LSubset) -> bool {
    first_product_violation(mu).is_none()
}

pub fn is_lsubgroup(mu: &LSubset, mode: Mode) -> Result<LSubgroupWitness> {
    let counterexample = match mode {
        Mode::Pointwise => first_product_violation(mu),
        Mode::Levels | Mode::StrongLevels => {
            let strong = mode == Mode::StrongLevels;
            if strong && !mu.lattice().is_chain() {
                return Err(Error::NotAChain);
            }
            mu.lattice()
                .iter()
                .find(|&a| {
                    let level = mu.level(a, strong);
                    !level.is_clear() && !mu.group().is_subgroup(&level)
                })
                .map(Counterexample::Level)
        }
    };
    Ok(LSubgroupWitness {
        subject: mu.clone(),
        verdict: counterexample.is_none(),
        mode,
        counterexample,
    })
}

/// `η ⊆ μ` and `η ∈ L(G)`.
pub fn is_lsubgroup_of(eta: &LSubset, mu: &LSubset) -> Result<bool> {
    Ok(eta.is_subset_of(mu)? && is_lsubgroup_fast(eta))
}

/// Level form of the relative test: every non-empty `η_a` is a subgroup of `μ_a`.
pub fn is_lsubgroup_of_levels(eta: &LSubset, mu: &LSubset, strong: bool) -> Result<bool> {
    eta.check_carrier(mu)?;
    if strong && !mu.lattice().is_chain() {
        return Err(Error::NotAChain);
    }
    let g = eta.group();
    Ok(eta.lattice().iter().all(|a| {
        let h = eta.level(a, strong);
        let k = mu.level(a, strong);
        h.is_clear() || (h.is_subset(&k) && g.is_subgroup(&h))
    }))
}

/// Member of `L(μ)` with distinct tip and tail, different from `μ`.
pub fn is_proper(eta: &LSubset, mu: &LSubset) -> Result<bool> {
    Ok(is_lsubgroup_of(eta, mu)? && eta.tip() != eta.tail() && eta != mu)
}

/// Normal in the whole group: `μ(xy) = μ(yx)`.
pub fn is_normal_in_group(mu: &LSubset) -> bool {
    let g = mu.group();
    g.elements().all(|x| {
        g.elements()
            .all(|y| mu.value(g.mul(x, y)) == mu.value(g.mul(y, x)))
    })
}

/// Level form: every non-empty level is a normal subgroup of `G`.
pub fn is_normal_in_group_levels(mu: &LSubset) -> bool {
    let g = mu.group();
    let whole = g.whole();
    mu.lattice().iter().all(|a| {
        let h = mu.level(a, false);
        h.is_clear() || (g.is_subgroup(&h) && g.is_normal_in(&h, whole.members()))
    })
}

/// Normal in an L-subgroup: `η(yxy⁻¹) ≥ η(x) ∧ μ(y)`.
pub fn is_normal(eta: &LSubset, mu: &LSubset) -> Result<bool> {
    if !is_lsubgroup_of(eta, mu)? {
        return Err(Error::NotAnLSubgroup("η is not an L-subgroup of μ".into()));
    }
    Ok(is_normal_unchecked(eta, mu))
}

pub(crate) fn is_normal_unchecked(eta: &LSubset, mu: &LSubset) -> bool {
    let (g, l) = (eta.group(), eta.lattice());
    g.elements().all(|x| {
        let vx = eta.value(x);
        g.elements()
            .all(|y| l.leq(l.meet(vx, mu.value(y)), eta.value(g.conj(y, x))))
    })
}

/// Level form: every non-empty `η_a` is a normal subgroup of `μ_a`.
pub fn is_normal_levels(eta: &LSubset, mu: &LSubset) -> Result<bool> {
    if !is_lsubgroup_of(eta, mu)? {
        return Err(Error::NotAnLSubgroup("η is not an L-subgroup of μ".into()));
    }
    let g = eta.group();
    Ok(eta.lattice().iter().all(|a| {
        let h = eta.level(a, false);
        h.is_clear() || g.is_normal_in(&h, &mu.level(a, false))
    }))
}

/// Tip at the identity, tail elsewhere.
pub fn trivial_lsubgroup(eta: &LSubset) -> LSubset {
    let (tip, tail) = eta.tip_tail();
    let mut values = vec![tail; eta.group().order()];
    values[0] = tip;
    eta.with_values(values)
}

/// Crisp closures of level sets, keyed by the level set.
#[derive(Default)]
pub struct ClosureCache {
    map: HashMap<FixedBitSet, FixedBitSet>,
}

impl ClosureCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn closure(&mut self, g: &FiniteGroup, set: FixedBitSet) -> &FixedBitSet {
        self.map
            .entry(set)
            .or_insert_with_key(|s| g.generated_subgroup(s).members().clone())
    }
}

/// The crisp generations `⟨η_a⟩` for every `a ≤ tip(η)`, in lattice order.
pub fn generated_levels(eta: &LSubset) -> Vec<(LatticeElement, Subgroup)> {
    let (g, l) = (eta.group(), eta.lattice());
    let tip = eta.tip();
    let mut cache = ClosureCache::new();
    l.iter()
        .filter(|&a| l.leq(a, tip))
        .map(|a| {
            (
                a,
                Subgroup::from_members(cache.closure(g, eta.level(a, false)).clone()),
            )
        })
        .collect()
}

/// `⟨η⟩(x) = ⋁ {a ≤ tip(η) : x ∈ ⟨η_a⟩}`; exact on distributive lattices.
pub fn generate(eta: &LSubset) -> LSubset {
    generate_with(eta, &mut ClosureCache::new())
}

pub fn generate_with(eta: &LSubset, cache: &mut ClosureCache) -> LSubset {
    let (g, l) = (eta.group(), eta.lattice());
    let tip_mask = l.down_mask(eta.tip());
    let mut values = vec![l.bottom(); g.order()];
    for a in l.iter().filter(|a| tip_mask >> a.index() & 1 == 1) {
        for x in cache.closure(g, eta.level(a, false)).ones() {
            values[x] = l.join(values[x], a);
        }
    }
    eta.with_values(values)
}

/// Generation inside an ambient `μ`; requires `η ⊆ μ`.
pub fn generated(eta: &LSubset, mu: &LSubset) -> Result<LSubset> {
    if !eta.is_subset_of(mu)? {
        return Err(Error::NotContained);
    }
    Ok(generate(eta))
}

/// `(a_x ∘ η)(z) = a ∧ η(x⁻¹z)` and `(η ∘ a_x)(z) = a ∧ η(zx⁻¹)`.
pub fn coset(side: Side, p: LPoint, eta: &LSubset) -> LSubset {
    let (g, l) = (eta.group(), eta.lattice());
    let xi = g.inv(p.at);
    let values = g
        .elements()
        .map(|z| {
            let w = match side {
                Side::Left => g.mul(xi, z),
                Side::Right => g.mul(z, xi),
            };
            l.meet(p.value, eta.value(w))
        })
        .collect();
    eta.with_values(values)
}

/// `a_x ∘ η = η ∘ a_x`, evaluated without building either coset.
pub fn point_commutes(eta: &LSubset, a: LatticeElement, x: GroupElement) -> bool {
    let (g, l) = (eta.group(), eta.lattice());
    let xi = g.inv(x);
    g.elements()
        .all(|z| l.meet(a, eta.value(g.mul(xi, z))) == l.meet(a, eta.value(g.mul(z, xi))))
}

/// `N(η)(x) = ⋁ {a ≤ μ(x) : a_x ∘ η = η ∘ a_x}`.
pub fn normalizer(eta: &LSubset, mu: &LSubset) -> Result<LSubset> {
    if !is_lsubgroup_of(eta, mu)? {
        return Err(Error::NotAnLSubgroup("normalizer needs η ∈ L(μ)".into()));
    }
    let (g, l) = (eta.group(), eta.lattice());
    let at = |x: usize| -> Result<LatticeElement> {
        let x = GroupElement::new(x);
        let joined = l.sup(
            l.down_set(mu.value(x))
                .into_iter()
                .filter(|&a| point_commutes(eta, a, x)),
        );
        if point_commutes(eta, joined, x) {
            Ok(joined)
        } else {
            Err(Error::JoinNotCommuting(x.index()))
        }
    };
    let values: Result<Vec<_>> = if g.order() >= PAR_THRESHOLD {
        (0..g.order()).into_par_iter().map(at).collect()
    } else {
        (0..g.order()).map(at).collect()
    };
    Ok(eta.with_values(values?))
}

/// `(η, θ)(x) = ⋁_{[y,z]=x} η(y) ∧ θ(z)` on commutators, `tail η ∧ tail θ` elsewhere.
pub fn commutator_lsubset(eta: &LSubset, theta: &LSubset) -> Result<LSubset> {
    eta.check_carrier(theta)?;
    let (g, l) = (eta.group(), eta.lattice());
    let mut values: Vec<Option<LatticeElement>> = vec![None; g.order()];
    for y in g.elements() {
        let vy = eta.value(y);
        for z in g.elements() {
            let c = g.comm(y, z).index();
            let v = l.meet(vy, theta.value(z));
            values[c] = Some(values[c].map_or(v, |w| l.join(w, v)));
        }
    }
    let fallback = l.meet(eta.tail(), theta.tail());
    Ok(eta.with_values(values.into_iter().map(|v| v.unwrap_or(fallback)).collect()))
}

pub fn commutator(eta: &LSubset, theta: &LSubset, mu: &LSubset, want: Want) -> Result<LSubset> {
    eta.check_carrier(mu)?;
    let raw = commutator_lsubset(eta, theta)?;
    match want {
        Want::LSubset => Ok(raw),
        Want::LSubgroup => generated(&raw, mu),
    }
}

/// `Z_0 = μ`, `Z_{i+1} = [Z_i, μ]` until the trivial L-subgroup or a repeat.
pub fn central_chain(mu: &LSubset) -> Result<CentralChain> {
    let trivial = trivial_lsubgroup(mu);
    let mut stages = vec![mu.clone()];
    let max_steps = default_max_steps(mu);
    loop {
        let current = stages.last().expect("non-empty");
        if *current == trivial {
            let class_index = Some(stages.len() - 1);
            return Ok(CentralChain {
                stages,
                stabilized: false,
                class_index,
            });
        }
        let next = commutator(current, mu, mu, Want::LSubgroup)?;
        if next == *current {
            return Ok(CentralChain {
                stages,
                stabilized: true,
                class_index: None,
            });
        }
        if stages.len() > max_steps {
            return Err(Error::BudgetExceeded {
                visited: stages.len() as u64,
            });
        }
        stages.push(next);
    }
}

/// Least `c` with `Z_c(μ)` trivial, `None` when the chain stabilizes above it.
pub fn nilpotency_class(mu: &LSubset) -> Result<Option<usize>> {
    if mu.tip() == mu.tail() {
        return Err(Error::TipEqualsTail);
    }
    Ok(central_chain(mu)?.class_index)
}

/// `η, N(η), N(N(η)), …` up to a fixpoint.
pub fn normalizer_chain(eta: &LSubset, mu: &LSubset, max_steps: usize) -> Result<Vec<LSubset>> {
    let mut stages = vec![eta.clone()];
    loop {
        let next = normalizer(stages.last().expect("non-empty"), mu)?;
        if next == *stages.last().expect("non-empty") {
            return Ok(stages);
        }
        if stages.len() > max_steps {
            return Err(Error::BudgetExceeded {
                visited: stages.len() as u64,
            });
        }
        stages.push(next);
    }
}

/// `μημ⁻¹(x) = ⋁_{x = zyz⁻¹} η(y) ∧ μ(z)`.
pub fn conjugate(eta: &LSubset, mu: &LSubset) -> Result<LSubset> {
    if !is_lsubgroup_of(eta, mu)? {
        return Err(Error::NotAnLSubgroup("conjugation needs η ∈ L(μ)".into()));
    }
    let (g, l) = (eta.group(), eta.lattice());
    let mut values = vec![l.bottom(); g.order()];
    for y in g.elements() {
        let vy = eta.value(y);
        for z in g.elements() {
            let x = g.conj(z, y).index();
            values[x] = l.join(values[x], l.meet(vy, mu.value(z)));
        }
    }
    Ok(eta.with_values(values))
}

/// `η^μ = ⟨μημ⁻¹⟩`.
pub fn normal_closure(eta: &LSubset, mu: &LSubset) -> Result<LSubset> {
    generated(&conjugate(eta, mu)?, mu)
}

pub fn conjugate_closure(eta: &LSubset, mu: &LSubset, want: Want) -> Result<LSubset> {
    match want {
        Want::LSubset => conjugate(eta, mu),
        Want::LSubgroup => normal_closure(eta, mu),
    }
}

/// `η^(0) = μ`, `η^(i) = η^{η^(i-1)}`.
pub fn closure_series(eta: &LSubset, mu: &LSubset, max_steps: usize) -> Result<ClosureSeries> {
    let mut stages = vec![mu.clone()];
    loop {
        let current = stages.last().expect("non-empty");
        if current == eta {
            return Ok(ClosureSeries {
                stages,
                stabilized: false,
                reached_eta: true,
            });
        }
        let next = normal_closure(eta, current)?;
        if next == *current {
            return Ok(ClosureSeries {
                stages,
                stabilized: true,
                reached_eta: false,
            });
        }
        if stages.len() > max_steps {
            return Err(Error::BudgetExceeded {
                visited: stages.len() as u64,
            });
        }
        stages.push(next);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use crate::lattice::FiniteLattice;
    use std::sync::Arc;

    fn d8() -> Arc<FiniteGroup> {
        let g =
            FiniteGroup::from_permutations("D8", 4, &[vec![1, 2, 3, 0], vec![1, 0, 3, 2]]).unwrap();
        Arc::new(
            g.with_aliases(&[("r", "[2,3,4,1]"), ("s", "[2,1,4,3]"), ("r2", "[3,4,1,2]")])
                .unwrap(),
        )
    }

    fn chain(n: usize) -> Arc<FiniteLattice> {
        Arc::new(FiniteLattice::chain(&format!("chain{n}"), n).unwrap())
    }

    fn char_of(g: &Arc<FiniteGroup>, l: &Arc<FiniteLattice>, gens: &[&str]) -> LSubset {
        let gens: Vec<_> = gens.iter().map(|s| g.resolve(s).unwrap()).collect();
        LSubset::characteristic(g, l, g.generated_by(&gens).members())
    }

    #[test]
    fn modes_agree_on_simple_cases() {
        let (g, l) = (d8(), chain(3));
        let k = char_of(&g, &l, &["r2", "s"]);
        for mode in [Mode::Pointwise, Mode::Levels, Mode::StrongLevels] {
            assert!(is_lsubgroup(&k, mode).unwrap().verdict);
        }
        let bad = k.with_value(g.resolve("r2").unwrap(), l.bottom());
        for mode in [Mode::Pointwise, Mode::Levels, Mode::StrongLevels] {
            let w = is_lsubgroup(&bad, mode).unwrap();
            assert!(!w.verdict);
            assert!(w.recheck());
        }
    }

    #[test]
    fn lowered_fixture_value_is_caught() {
        let mu = crate::fixtures::d8_mu();
        let g = mu.group().clone();
        let r = g.resolve("r").unwrap();
        let bad = mu.with_value(g.resolve("r2").unwrap(), mu.lattice().bottom());
        for mode in [Mode::Pointwise, Mode::Levels] {
            let w = is_lsubgroup(&bad, mode).unwrap();
            assert!(!w.verdict);
            assert!(w.recheck());
            assert_ne!(w.counterexample, Some(Counterexample::Product(r, r)));
        }
    }

    #[test]
    fn strong_levels_need_a_chain() {
        let g = d8();
        let l = Arc::new(
            FiniteLattice::from_spec(&crate::lattice::LatticeSpec {
                name: "B2".into(),
                elements: ["0", "x", "y", "1"].map(String::from).to_vec(),
                le: [("0", "x"), ("0", "y"), ("x", "1"), ("y", "1")]
                    .map(|(a, b)| (a.into(), b.into()))
                    .to_vec(),
            })
            .unwrap(),
        );
        let mu = LSubset::bottom(&g, &l);
        assert_eq!(
            is_lsubgroup(&mu, Mode::StrongLevels).unwrap_err(),
            Error::NotAChain
        );
    }

    #[test]
    fn dihedral_normalizer_and_closures() {
        let (g, l) = (d8(), chain(2));
        let whole = LSubset::characteristic(&g, &l, g.whole().members());
        let s = char_of(&g, &l, &["s"]);
        let k = char_of(&g, &l, &["r2", "s"]);
        assert!(!is_normal(&s, &whole).unwrap());
        assert_eq!(normalizer(&s, &whole).unwrap(), k);
        assert_eq!(
            normalizer_chain(&s, &whole, 10).unwrap(),
            vec![s.clone(), k.clone(), whole.clone()]
        );
        assert_eq!(normal_closure(&s, &whole).unwrap(), k);
        let series = closure_series(&s, &whole, 10).unwrap();
        assert_eq!(series.stages, vec![whole.clone(), k, s]);
        assert!(series.reached_eta);
    }

    #[test]
    fn crisp_coset() {
        let (g, l) = (d8(), chain(2));
        let s = char_of(&g, &l, &["s"]);
        let r = g.resolve("r").unwrap();
        let left = coset(Side::Left, LPoint::new(l.top(), r), &s);
        let rs = g.mul(r, g.resolve("s").unwrap());
        let mut expected = g.empty_set();
        expected.insert(r.index());
        expected.insert(rs.index());
        assert_eq!(left, LSubset::characteristic(&g, &l, &expected));
        let p = LSubset::point(&g, &l, LPoint::new(l.top(), r));
        assert_eq!(left, p.set_product(&s).unwrap());
    }

    #[test]
    fn dihedral_commutator() {
        let (g, l) = (d8(), chain(2));
        let whole = LSubset::characteristic(&g, &l, g.whole().members());
        // constant on its own carrier, so every clause yields the top
        assert_eq!(
            commutator(&whole, &whole, &whole, Want::LSubgroup).unwrap(),
            whole
        );

        let s4 =
            FiniteGroup::from_permutations("S4", 4, &[vec![1, 2, 3, 0], vec![1, 0, 2, 3]]).unwrap();
        let s4 = Arc::new(s4);
        let d = char_of(&s4, &l, &["(24)", "(1234)"]);
        let center = char_of(&s4, &l, &["(13)(24)"]);
        assert_eq!(commutator(&d, &d, &d, Want::LSubgroup).unwrap(), center);
        assert_eq!(nilpotency_class(&d).unwrap(), Some(2));
        assert_eq!(nilpotency_class(&whole).unwrap_err(), Error::TipEqualsTail);
    }

    #[test]
    fn generation_of_points() {
        let (g, l) = (d8(), chain(2));
        let pts = LSubset::points(
            &g,
            &l,
            &[
                LPoint::new(l.top(), g.resolve("r").unwrap()),
                LPoint::new(l.top(), g.resolve("s").unwrap()),
            ],
        );
        let whole = LSubset::characteristic(&g, &l, g.whole().members());
        assert_eq!(generated(&pts, &whole).unwrap(), whole);
        assert_eq!(generated(&whole, &pts).unwrap_err(), Error::NotContained);
        assert_eq!(generate(&LSubset::bottom(&g, &l)), LSubset::bottom(&g, &l));
    }
}
