//! Seeded random instances: groups of order at most 12, lattices of at most
//! six elements, L-subgroups built from subgroup chains, homomorphisms.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::fixtures;
use crate::group::{FiniteGroup, GroupElement, GroupHomomorphism, Subgroup};
use crate::lattice::{FiniteLattice, LatticeElement, LatticeSpec};
use crate::lset::LSubset;

/// Largest pointwise box (`∏ |↓μ(x)|`) drawn for enumeration suites.
pub const MAX_BOX: u128 = 4096;

const FAVOURED: [&str; 7] = ["Z4", "Z6", "S3", "D8", "Q8", "A4", "D12"];
const EXTRA: [&str; 3] = ["Z2", "Z3", "V4"];

pub struct PoolGroup {
    pub group: Arc<FiniteGroup>,
    pub subgroups: Vec<Subgroup>,
    pub normal: Vec<Subgroup>,
    pub nilpotent: bool,
}

impl PoolGroup {
    fn new(group: Arc<FiniteGroup>) -> Self {
        let subgroups = group.all_subgroups().expect("small group");
        let normal = subgroups
            .iter()
            .filter(|h| group.is_normal_subgroup(h))
            .cloned()
            .collect();
        let nilpotent = is_nilpotent(&group);
        PoolGroup {
            group,
            subgroups,
            normal,
            nilpotent,
        }
    }
}

/// Lower central series reaches the trivial subgroup.
fn is_nilpotent(g: &FiniteGroup) -> bool {
    let mut current = g.whole();
    loop {
        let comms: Vec<GroupElement> = current
            .elements()
            .into_iter()
            .flat_map(|x| g.elements().map(move |y| (x, y)))
            .map(|(x, y)| g.comm(x, y))
            .collect();
        let next = g.generated_by(&comms);
        if next.order() == 1 {
            return true;
        }
        if next == current {
            return false;
        }
        current = next;
    }
}

/// `H` as a group in its own right, elements in the order of `G`.
fn subgroup_as_group(g: &FiniteGroup, h: &Subgroup, name: String) -> Arc<FiniteGroup> {
    let elems = h.elements();
    let pos = |x: GroupElement| elems.iter().position(|&e| e == x).expect("closed");
    let table: Vec<Vec<usize>> = elems
        .iter()
        .map(|&x| elems.iter().map(|&y| pos(g.mul(x, y))).collect())
        .collect();
    Arc::new(FiniteGroup::from_table(&name, &table).expect("subgroup table"))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Lattices {
    /// Includes the non-distributive control.
    Any,
    Distributive,
    Chain,
    /// Distributive with at most three elements.
    Small,
}

pub struct Pool {
    pub favoured: Vec<PoolGroup>,
    pub derived: Vec<PoolGroup>,
    pub lattices: Vec<Arc<FiniteLattice>>,
}

fn product_2x3() -> Arc<FiniteLattice> {
    let elements: Vec<String> = ["00", "01", "02", "10", "11", "12"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut le = Vec::new();
    for a in &elements {
        for b in &elements {
            let (a0, a1) = (a.as_bytes()[0], a.as_bytes()[1]);
            let (b0, b1) = (b.as_bytes()[0], b.as_bytes()[1]);
            if a0 <= b0 && a1 <= b1 {
                le.push((a.clone(), b.clone()));
            }
        }
    }
    Arc::new(
        FiniteLattice::from_spec(&LatticeSpec {
            name: "C2xC3".into(),
            elements,
            le,
        })
        .expect("product"),
    )
}

impl Pool {
    pub fn new() -> Self {
        let mut favoured = Vec::new();
        let mut derived = Vec::new();
        for name in FAVOURED.iter().chain(EXTRA.iter()) {
            let pg = PoolGroup::new(fixtures::group(name).expect("pool group"));
            for (i, h) in pg.subgroups.iter().enumerate() {
                if h.order() > 1 && h.order() < pg.group.order() {
                    let sub = subgroup_as_group(&pg.group, h, format!("{name}.H{i}"));
                    derived.push(PoolGroup::new(sub));
                }
            }
            favoured.push(pg);
        }
        let mut lattices: Vec<Arc<FiniteLattice>> = (2..=6)
            .map(|n| Arc::new(FiniteLattice::chain(&format!("chain{n}"), n).expect("chain")))
            .collect();
        lattices.extend([
            fixtures::l3(),
            fixtures::b2(),
            product_2x3(),
            fixtures::m3(),
        ]);
        Pool {
            favoured,
            derived,
            lattices,
        }
    }
}

impl Default for Pool {
    fn default() -> Self {
        Self::new()
    }
}

/// Sublattice `[lo, hi]` of `l`.
fn interval_lattice(
    l: &FiniteLattice,
    lo: LatticeElement,
    hi: LatticeElement,
) -> Arc<FiniteLattice> {
    let members = l.interval(lo, hi).expect("lo ≤ hi");
    let elements: Vec<String> = members.iter().map(|&x| l.label(x).to_string()).collect();
    let mut le = Vec::new();
    for &a in &members {
        for &b in &members {
            if l.leq(a, b) {
                le.push((l.label(a).to_string(), l.label(b).to_string()));
            }
        }
    }
    let name = format!("{}[{},{}]", l.name(), l.label(lo), l.label(hi));
    Arc::new(FiniteLattice::from_spec(&LatticeSpec { name, elements, le }).expect("interval"))
}

pub fn lsubset_json(mu: &LSubset) -> Value {
    json!({
        "group": mu.group().name(),
        "lattice": mu.lattice().name(),
        "values": mu.value_labels(),
    })
}

pub fn hom_json(f: &GroupHomomorphism) -> Value {
    json!({
        "source": f.source().name(),
        "target": f.target().name(),
        "map": f.source().elements().map(|x| f.apply(x).index()).collect::<Vec<_>>(),
    })
}

/// One case's random source plus the record of what it drew.
pub struct Draw<'a> {
    pub rng: ChaCha8Rng,
    pub pool: &'a Pool,
    pub inputs: serde_json::Map<String, Value>,
}

impl<'a> Draw<'a> {
    pub fn new(rng: ChaCha8Rng, pool: &'a Pool) -> Self {
        Draw {
            rng,
            pool,
            inputs: serde_json::Map::new(),
        }
    }

    pub fn record(&mut self, key: &str, value: Value) {
        self.inputs.insert(key.to_string(), value);
    }

    pub fn record_lsubset(&mut self, key: &str, mu: &LSubset) {
        self.record(key, lsubset_json(mu));
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn pick<'b, T>(&mut self, items: &'b [T]) -> &'b T {
        items.choose(&mut self.rng).expect("non-empty choice")
    }

    /// Favoured fixture groups two times in three, derived subgroups otherwise.
    pub fn group(&mut self, max_order: usize, nilpotent_only: bool) -> &'a PoolGroup {
        let pool = self.pool;
        let ok =
            |pg: &&PoolGroup| pg.group.order() <= max_order && (!nilpotent_only || pg.nilpotent);
        let favoured: Vec<&PoolGroup> = pool.favoured.iter().filter(ok).collect();
        let derived: Vec<&PoolGroup> = pool.derived.iter().filter(ok).collect();
        let from = if derived.is_empty() || (!favoured.is_empty() && self.chance(2.0 / 3.0)) {
            favoured
        } else {
            derived
        };
        from.choose(&mut self.rng).expect("pool covers every bound")
    }

    pub fn lattice(&mut self, class: Lattices) -> Arc<FiniteLattice> {
        let candidates: Vec<Arc<FiniteLattice>> = self
            .pool
            .lattices
            .iter()
            .filter(|l| match class {
                Lattices::Any => true,
                Lattices::Distributive => l.is_distributive(),
                Lattices::Chain => l.is_chain(),
                Lattices::Small => l.is_distributive() && l.size() <= 3,
            })
            .cloned()
            .collect();
        let l = self.pick(&candidates).clone();
        if l.size() > 2 && self.chance(0.25) {
            let lo = *self.pick(&l.iter().collect::<Vec<_>>());
            let above: Vec<LatticeElement> = l.iter().filter(|&x| l.lt(lo, x)).collect();
            if let Some(&hi) = above.choose(&mut self.rng) {
                return interval_lattice(&l, lo, hi);
            }
        }
        l
    }

    pub fn element(&mut self, l: &FiniteLattice) -> LatticeElement {
        LatticeElement::new(self.rng.gen_range(0..l.size()))
    }

    /// Uniform over `↓a`.
    pub fn below(&mut self, l: &FiniteLattice, a: LatticeElement) -> LatticeElement {
        *self.pick(&l.down_set(a))
    }

    pub fn above(&mut self, l: &FiniteLattice, a: LatticeElement) -> LatticeElement {
        let up: Vec<LatticeElement> = l.iter().filter(|&x| l.leq(a, x)).collect();
        *self.pick(&up)
    }

    /// `x ↦ a_i` for the last `H_i` of a descending subgroup chain holding
    /// `x`, with ascending values `a_0 ≤ a_1 ≤ …`.
    pub fn chain_lsubgroup(
        &mut self,
        pg: &PoolGroup,
        l: &Arc<FiniteLattice>,
        normal: bool,
    ) -> LSubset {
        let g = &pg.group;
        let family = if normal { &pg.normal } else { &pg.subgroups };
        let mut h = g.whole();
        let mut a = if self.chance(0.5) {
            l.bottom()
        } else {
            self.element(l)
        };
        let mut values = vec![a; g.order()];
        for _ in 0..self.rng.gen_range(1..=3) {
            let inside: Vec<&Subgroup> = family
                .iter()
                .filter(|k| k.members().is_subset(h.members()))
                .collect();
            h = (*self.pick(&inside)).clone();
            a = self.above(l, a);
            for x in h.elements() {
                values[x.index()] = a;
            }
        }
        LSubset::new(g.clone(), l.clone(), values).expect("valued in l")
    }

    /// Meet of one or two chain constructions.
    pub fn lsubgroup(&mut self, pg: &PoolGroup, l: &Arc<FiniteLattice>) -> LSubset {
        let first = self.chain_lsubgroup(pg, l, false);
        if self.chance(0.5) {
            let second = self.chain_lsubgroup(pg, l, false);
            first.intersection(&second).expect("same carrier")
        } else {
            first
        }
    }

    pub fn lsubgroup_of(&mut self, pg: &PoolGroup, mu: &LSubset) -> LSubset {
        let nu = self.lsubgroup(pg, mu.lattice());
        mu.intersection(&nu).expect("same carrier")
    }

    /// `μ ∧ ν` with `ν` built on normal subgroups; normal in `μ`.
    pub fn normal_of(&mut self, pg: &PoolGroup, mu: &LSubset) -> LSubset {
        let nu = self.chain_lsubgroup(pg, mu.lattice(), true);
        mu.intersection(&nu).expect("same carrier")
    }

    /// Values below `μ`, bottom half the time.
    pub fn lsubset_of(&mut self, mu: &LSubset) -> LSubset {
        let l = mu.lattice().clone();
        let values = mu
            .values()
            .iter()
            .map(|&m| {
                if self.chance(0.5) {
                    l.bottom()
                } else {
                    self.below(&l, m)
                }
            })
            .collect();
        LSubset::new(mu.group().clone(), l, values).expect("valued in l")
    }

    /// Arbitrary values, or an L-subgroup with one value changed.
    pub fn lsubset(&mut self, pg: &PoolGroup, l: &Arc<FiniteLattice>) -> LSubset {
        if self.chance(0.5) {
            let values = (0..pg.group.order()).map(|_| self.element(l)).collect();
            LSubset::new(pg.group.clone(), l.clone(), values).expect("valued in l")
        } else {
            let mu = self.lsubgroup(pg, l);
            let x = GroupElement::new(self.rng.gen_range(0..pg.group.order()));
            let a = self.element(l);
            mu.with_value(x, a)
        }
    }

    pub fn homomorphism(&mut self, source: &PoolGroup, target: &PoolGroup) -> GroupHomomorphism {
        let all = GroupHomomorphism::all(&source.group, &target.group);
        self.pick(&all).clone()
    }

    /// An L-subgroup whose full box `∏ |↓μ(x)|` is at most [`MAX_BOX`].
    pub fn bounded_lsubgroup(
        &mut self,
        class: Lattices,
        nilpotent_only: bool,
    ) -> (&'a PoolGroup, LSubset) {
        loop {
            let pg = self.group(12, nilpotent_only);
            let l = self.lattice(class);
            let mu = self.lsubgroup(pg, &l);
            if box_size(&mu) <= MAX_BOX {
                return (pg, mu);
            }
        }
    }
}

pub fn box_size(mu: &LSubset) -> u128 {
    let l = mu.lattice();
    mu.values()
        .iter()
        .map(|&v| l.down_set(v).len() as u128)
        .product()
}
