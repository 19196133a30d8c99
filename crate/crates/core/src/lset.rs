//! L-subsets of a finite group: total maps `G → L` with pointwise order,
//! level sets, L-points, set products and transport along homomorphisms.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{Direction, FiniteGroup, GroupElement, GroupHomomorphism};
use crate::lattice::{FiniteLattice, LatticeElement};

/// Groups at least this large use parallel per-element loops.
pub(crate) const PAR_THRESHOLD: usize = 64;

/// The L-point `a_x`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LPoint {
    pub value: LatticeElement,
    pub at: GroupElement,
}

impl LPoint {
    pub fn new(value: LatticeElement, at: GroupElement) -> Self {
        LPoint { value, at }
    }

    /// `a_x ∈ μ` iff `μ(x) ≥ a`.
    pub fn belongs_to(&self, mu: &LSubset) -> bool {
        mu.lattice.leq(self.value, mu.value(self.at))
    }

    /// Parses `value@element`.
    pub fn parse(text: &str, group: &FiniteGroup, lattice: &FiniteLattice) -> Result<Self> {
        let (value, at) = text.trim().rsplit_once('@').ok_or_else(|| {
            Error::Input(format!("point `{text}` is not of the form value@element"))
        })?;
        Ok(LPoint {
            value: lattice.element(value.trim())?,
            at: group.resolve(at)?,
        })
    }

    /// Parses a comma-separated list of `value@element` points; commas inside
    /// brackets or parentheses belong to the element.
    pub fn parse_list(
        text: &str,
        group: &FiniteGroup,
        lattice: &FiniteLattice,
    ) -> Result<Vec<Self>> {
        let mut out = Vec::new();
        let mut depth = 0i32;
        let mut start = 0;
        for (i, c) in text.char_indices() {
            match c {
                '[' | '(' => depth += 1,
                ']' | ')' => depth -= 1,
                ',' if depth == 0 => {
                    out.push(Self::parse(&text[start..i], group, lattice)?);
                    start = i + 1;
                }
                _ => {}
            }
        }
        if !text[start..].trim().is_empty() {
            out.push(Self::parse(&text[start..], group, lattice)?);
        }
        Ok(out)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Pointwise {
    Union,
    Intersection,
    Contains,
    Equal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointwiseResult {
    Set(LSubset),
    Bool(bool),
}

/// A total map from group elements to lattice elements.
#[derive(Clone)]
pub struct LSubset {
    group: Arc<FiniteGroup>,
    lattice: Arc<FiniteLattice>,
    values: Vec<LatticeElement>,
}

impl LSubset {
    pub fn new(
        group: Arc<FiniteGroup>,
        lattice: Arc<FiniteLattice>,
        values: Vec<LatticeElement>,
    ) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::Input(format!(
                "{} values for a group of order {}",
                values.len(),
                group.order()
            )));
        }
        if let Some(v) = values.iter().find(|v| v.index() >= lattice.size()) {
            return Err(Error::LatticeMismatch(v.index().to_string()));
        }
        Ok(LSubset {
            group,
            lattice,
            values,
        })
    }

    pub fn constant(
        group: &Arc<FiniteGroup>,
        lattice: &Arc<FiniteLattice>,
        c: LatticeElement,
    ) -> Self {
        LSubset {
            group: group.clone(),
            lattice: lattice.clone(),
            values: vec![c; group.order()],
        }
    }

    pub fn bottom(group: &Arc<FiniteGroup>, lattice: &Arc<FiniteLattice>) -> Self {
        Self::constant(group, lattice, lattice.bottom())
    }

    pub fn point(group: &Arc<FiniteGroup>, lattice: &Arc<FiniteLattice>, p: LPoint) -> Self {
        let mut out = Self::bottom(group, lattice);
        out.values[p.at.index()] = p.value;
        out
    }

    /// Union of the given L-points (bottom everywhere else).
    pub fn points(
        group: &Arc<FiniteGroup>,
        lattice: &Arc<FiniteLattice>,
        points: &[LPoint],
    ) -> Self {
        let mut out = Self::bottom(group, lattice);
        for p in points {
            let v = &mut out.values[p.at.index()];
            *v = lattice.join(*v, p.value);
        }
        out
    }

    /// `1_A`: top on `A`, bottom elsewhere.
    pub fn characteristic(
        group: &Arc<FiniteGroup>,
        lattice: &Arc<FiniteLattice>,
        set: &FixedBitSet,
    ) -> Self {
        Self::two_valued(group, lattice, set, lattice.top(), lattice.bottom())
    }

    /// `inside` on `set`, `outside` elsewhere.
    pub fn two_valued(
        group: &Arc<FiniteGroup>,
        lattice: &Arc<FiniteLattice>,
        set: &FixedBitSet,
        inside: LatticeElement,
        outside: LatticeElement,
    ) -> Self {
        let values = (0..group.order())
            .map(|x| if set.contains(x) { inside } else { outside })
            .collect();
        LSubset {
            group: group.clone(),
            lattice: lattice.clone(),
            values,
        }
    }

    /// Builds a map from `(element, value)` label pairs over a default value.
    pub fn from_assignments<S: AsRef<str>>(
        group: &Arc<FiniteGroup>,
        lattice: &Arc<FiniteLattice>,
        assignments: &[(S, S)],
        default: &str,
    ) -> Result<Self> {
        let mut out = Self::constant(group, lattice, lattice.element(default)?);
        for (x, a) in assignments {
            let x = group.resolve(x.as_ref())?;
            out.values[x.index()] = lattice.element(a.as_ref())?;
        }
        Ok(out)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn lattice(&self) -> &Arc<FiniteLattice> {
        &self.lattice
    }

    #[inline]
    pub fn value(&self, x: GroupElement) -> LatticeElement {
        self.values[x.index()]
    }

    pub fn values(&self) -> &[LatticeElement] {
        &self.values
    }

    pub fn with_value(&self, x: GroupElement, a: LatticeElement) -> Self {
        let mut out = self.clone();
        out.values[x.index()] = a;
        out
    }

    pub(crate) fn with_values(&self, values: Vec<LatticeElement>) -> Self {
        LSubset {
            group: self.group.clone(),
            lattice: self.lattice.clone(),
            values,
        }
    }

    pub fn same_carrier(&self, other: &LSubset) -> bool {
        (Arc::ptr_eq(&self.group, &other.group) || self.group == other.group)
            && (Arc::ptr_eq(&self.lattice, &other.lattice) || self.lattice == other.lattice)
    }

    pub fn check_carrier(&self, other: &LSubset) -> Result<()> {
        if self.same_carrier(other) {
            Ok(())
        } else {
            Err(Error::CarrierMismatch)
        }
    }

    pub fn tip(&self) -> LatticeElement {
        self.lattice.sup(self.values.iter().copied())
    }

    pub fn tail(&self) -> LatticeElement {
        self.lattice.inf(self.values.iter().copied())
    }

    pub fn tip_tail(&self) -> (LatticeElement, LatticeElement) {
        (self.tip(), self.tail())
    }

    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|&v| v == self.values[0])
    }

    /// Distinct values in canonical lattice order.
    pub fn image(&self) -> Vec<LatticeElement> {
        let mut mask = 0u64;
        for v in &self.values {
            mask |= 1 << v.index();
        }
        (0..self.lattice.size())
            .filter(|i| mask >> i & 1 == 1)
            .map(LatticeElement::new)
            .collect()
    }

    pub fn union(&self, other: &LSubset) -> Result<Self> {
        self.check_carrier(other)?;
        Ok(self.zip_with(other, |l, a, b| l.join(a, b)))
    }

    pub fn intersection(&self, other: &LSubset) -> Result<Self> {
        self.check_carrier(other)?;
        Ok(self.zip_with(other, |l, a, b| l.meet(a, b)))
    }

    fn zip_with(
        &self,
        other: &LSubset,
        f: impl Fn(&FiniteLattice, LatticeElement, LatticeElement) -> LatticeElement,
    ) -> Self {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(&self.lattice, a, b))
            .collect();
        self.with_values(values)
    }

    /// `self ⊆ other`, i.e. `self(x) ≤ other(x)` everywhere.
    pub fn is_subset_of(&self, other: &LSubset) -> Result<bool> {
        self.check_carrier(other)?;
        Ok(self.le_unchecked(other))
    }

    pub(crate) fn le_unchecked(&self, other: &LSubset) -> bool {
        self.values
            .iter()
            .zip(&other.values)
            .all(|(&a, &b)| self.lattice.leq(a, b))
    }

    /// `contains` asks whether `other ⊆ self`.
    pub fn pointwise(&self, kind: Pointwise, other: &LSubset) -> Result<PointwiseResult> {
        Ok(match kind {
            Pointwise::Union => PointwiseResult::Set(self.union(other)?),
            Pointwise::Intersection => PointwiseResult::Set(self.intersection(other)?),
            Pointwise::Contains => PointwiseResult::Bool(other.is_subset_of(self)?),
            Pointwise::Equal => {
                self.check_carrier(other)?;
                PointwiseResult::Bool(self.values == other.values)
            }
        })
    }

    /// `{x : μ(x) ≥ a}`, or `{x : μ(x) > a}` when `strong`.
    pub fn level(&self, a: LatticeElement, strong: bool) -> FixedBitSet {
        let mut out = self.group.empty_set();
        for (x, &v) in self.values.iter().enumerate() {
            if (strong && self.lattice.lt(a, v)) || (!strong && self.lattice.leq(a, v)) {
                out.insert(x);
            }
        }
        out
    }

    /// `(μ ∘ η)(x) = ⋁_{x = yz} μ(y) ∧ η(z)`.
    pub fn set_product(&self, other: &LSubset) -> Result<Self> {
        self.check_carrier(other)?;
        let g = &self.group;
        let l = &self.lattice;
        let at = |x: usize| {
            let x = GroupElement::new(x);
            l.sup(
                g.elements()
                    .map(|y| l.meet(self.value(y), other.value(g.mul(g.inv(y), x)))),
            )
        };
        let values = if g.order() >= PAR_THRESHOLD {
            (0..g.order()).into_par_iter().map(at).collect()
        } else {
            (0..g.order()).map(at).collect()
        };
        Ok(self.with_values(values))
    }

    /// Image `f(μ)(y) = ⋁_{f(x)=y} μ(x)` or preimage `f⁻¹(ν)(x) = ν(f(x))`.
    pub fn transport(&self, f: &GroupHomomorphism, direction: Direction) -> Result<Self> {
        let (from, to) = match direction {
            Direction::Image => (f.source(), f.target()),
            Direction::Preimage => (f.target(), f.source()),
        };
        if !(Arc::ptr_eq(from, &self.group) || **from == *self.group) {
            return Err(Error::CarrierMismatch);
        }
        let values = match direction {
            Direction::Image => {
                let mut values = vec![self.lattice.bottom(); to.order()];
                for x in from.elements() {
                    let y = f.apply(x).index();
                    values[y] = self.lattice.join(values[y], self.value(x));
                }
                values
            }
            Direction::Preimage => to.elements().map(|x| self.value(f.apply(x))).collect(),
        };
        Ok(LSubset {
            group: to.clone(),
            lattice: self.lattice.clone(),
            values,
        })
    }

    /// Every non-empty subset of the image attains its supremum, i.e. the
    /// image is a chain.
    pub fn has_sup_property(&self) -> bool {
        let image = self.image();
        image.iter().all(|&a| {
            image
                .iter()
                .all(|&b| self.lattice.leq(a, b) || self.lattice.leq(b, a))
        })
    }

    /// `label:value` pairs in canonical element order.
    pub fn describe(&self) -> Vec<(String, String)> {
        self.group
            .elements()
            .map(|x| {
                (
                    self.group.display(x),
                    self.lattice.label(self.value(x)).to_string(),
                )
            })
            .collect()
    }

    pub fn value_labels(&self) -> Vec<&str> {
        self.values.iter().map(|&v| self.lattice.label(v)).collect()
    }
}

impl PartialEq for LSubset {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values && self.same_carrier(other)
    }
}

impl Eq for LSubset {}

impl Hash for LSubset {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.values.hash(state);
    }
}

/// Canonical order: lexicographic over value indices.
impl Ord for LSubset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.values.cmp(&other.values)
    }
}

impl PartialOrd for LSubset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for LSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LSubset[")?;
        for (i, (x, v)) in self.describe().into_iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}:{v}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for LSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeSpec;

    fn l3() -> Arc<FiniteLattice> {
        let spec = LatticeSpec {
            name: "L3".into(),
            elements: ["0", "a", "b", "c", "1"].map(String::from).to_vec(),
            le: [("0", "a"), ("a", "b"), ("a", "c"), ("b", "1"), ("c", "1")]
                .map(|(x, y)| (x.to_string(), y.to_string()))
                .to_vec(),
        };
        Arc::new(FiniteLattice::from_spec(&spec).unwrap())
    }

    fn d8() -> Arc<FiniteGroup> {
        let g =
            FiniteGroup::from_permutations("D8", 4, &[vec![1, 2, 3, 0], vec![1, 0, 3, 2]]).unwrap();
        let g = g
            .with_aliases(&[("r", "[2,3,4,1]"), ("s", "[2,1,4,3]")])
            .unwrap();
        let r2 = g.mul(g.resolve("r").unwrap(), g.resolve("r").unwrap());
        let sr2 = g.mul(g.resolve("s").unwrap(), r2);
        let mut g = g;
        g.add_alias("r2", r2).unwrap();
        g.add_alias("sr2", sr2).unwrap();
        Arc::new(g)
    }

    fn mu(g: &Arc<FiniteGroup>, l: &Arc<FiniteLattice>) -> LSubset {
        LSubset::from_assignments(
            g,
            l,
            &[("e", "1"), ("r2", "b"), ("s", "c"), ("sr2", "a")],
            "0",
        )
        .unwrap()
    }

    fn eta(g: &Arc<FiniteGroup>, l: &Arc<FiniteLattice>) -> LSubset {
        let pts = LPoint::parse_list("b@r2,c@s", g, l).unwrap();
        LSubset::points(g, l, &pts)
    }

    #[test]
    fn tips_and_tails() {
        let (g, l) = (d8(), l3());
        assert_eq!(mu(&g, &l).tip_tail(), (l.top(), l.bottom()));
        assert_eq!(eta(&g, &l).tip(), l.top());
        let b = l.element("b").unwrap();
        let c = LSubset::constant(&g, &l, b);
        assert_eq!(c.tip_tail(), (b, b));
    }

    #[test]
    fn levels_of_the_point_union() {
        let (g, l) = (d8(), l3());
        let eta = eta(&g, &l);
        let ids = |names: &[&str]| {
            let mut s = g.empty_set();
            for n in names {
                s.insert(g.resolve(n).unwrap().index());
            }
            s
        };
        assert_eq!(eta.level(l.element("a").unwrap(), false), ids(&["r2", "s"]));
        assert_eq!(eta.level(l.top(), false), g.empty_set());
        assert_eq!(eta.level(l.bottom(), false).count_ones(..), 8);
        assert_eq!(eta.level(l.bottom(), true), ids(&["r2", "s"]));
    }

    #[test]
    fn point_product_is_a_coset() {
        let (g, l) = (d8(), l3());
        let mu = mu(&g, &l);
        let b = l.element("b").unwrap();
        let r = g.resolve("r").unwrap();
        let p = LSubset::point(&g, &l, LPoint::new(b, r));
        let prod = p.set_product(&mu).unwrap();
        for z in g.elements() {
            assert_eq!(prod.value(z), l.meet(b, mu.value(g.mul(g.inv(r), z))));
        }
        let e = LSubset::point(&g, &l, LPoint::new(l.top(), g.identity()));
        assert_eq!(e.set_product(&mu).unwrap(), mu);
    }

    #[test]
    fn pointwise_operations() {
        let (g, l) = (d8(), l3());
        let mu = mu(&g, &l);
        let eta = eta(&g, &l);
        assert_eq!(mu.intersection(&mu).unwrap(), mu);
        assert_eq!(
            mu.pointwise(Pointwise::Contains, &eta).unwrap(),
            PointwiseResult::Bool(true)
        );
        assert_eq!(
            eta.pointwise(Pointwise::Contains, &mu).unwrap(),
            PointwiseResult::Bool(false)
        );
        assert_eq!(eta.union(&mu).unwrap(), mu);
        let z2 = Arc::new(FiniteGroup::from_table("Z2", &[vec![0, 1], vec![1, 0]]).unwrap());
        let other = LSubset::bottom(&z2, &l);
        assert_eq!(mu.union(&other).unwrap_err(), Error::CarrierMismatch);
    }

    #[test]
    fn sup_property_means_chain_image() {
        let (g, l) = (d8(), l3());
        assert!(!mu(&g, &l).has_sup_property());
        let b = l.element("b").unwrap();
        let c = l.element("c").unwrap();
        let bc = LSubset::constant(&g, &l, b).with_value(g.resolve("s").unwrap(), c);
        assert!(!bc.has_sup_property());
        let chain = LSubset::from_assignments(&g, &l, &[("e", "1"), ("r2", "b")], "a").unwrap();
        assert!(chain.has_sup_property());
    }

    #[test]
    fn parse_points_with_bracketed_elements() {
        let (g, l) = (d8(), l3());
        let pts = LPoint::parse_list("b@[3,4,1,2], c@s", &g, &l).unwrap();
        assert_eq!(pts[0].at, g.resolve("r2").unwrap());
        assert_eq!(pts.len(), 2);
        assert!(LPoint::parse("b", &g, &l).is_err());
    }
}
