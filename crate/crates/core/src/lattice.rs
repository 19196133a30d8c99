//! Finite bounded lattices used as truth-value domains.
//!
//! A [`FiniteLattice`] is loaded from a list of element identifiers plus a
//! set of `≤` pairs (covering pairs are enough). The reflexive-transitive
//! closure is computed, antisymmetry is verified, and meet/join tables are
//! cached so every later query is a table lookup. At most 64 elements are
//! supported; down-sets and up-sets are stored as `u64` masks.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported lattice.
pub const MAX_LATTICE_SIZE: usize = 64;

/// Index of an element inside a specific [`FiniteLattice`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeElement(u8);

impl LatticeElement {
    pub fn new(index: usize) -> Self {
        debug_assert!(index < MAX_LATTICE_SIZE);
        LatticeElement(index as u8)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Lattice file contents: `{"name", "elements", "le"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub name: String,
    pub elements: Vec<String>,
    #[serde(default)]
    pub le: Vec<(String, String)>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum LatticeOp {
    Meet,
    Join,
    Leq,
}

/// Result of [`FiniteLattice::op`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum OpValue {
    Element(LatticeElement),
    Bool(bool),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainProperties {
    pub is_chain: bool,
    pub is_upper_well_ordered: bool,
}

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteLattice {
    name: String,
    elements: Vec<String>,
    index: HashMap<String, usize>,
    down: Vec<u64>,
    up: Vec<u64>,
    meet: Vec<u8>,
    join: Vec<u8>,
    bottom: LatticeElement,
    top: LatticeElement,
    distributivity_witness: Option<[LatticeElement; 3]>,
    chain: bool,
}

impl fmt::Debug for FiniteLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteLattice")
            .field("name", &self.name)
            .field("elements", &self.elements)
            .finish()
    }
}

#[inline]
fn bits(mask: u64) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

impl FiniteLattice {
    /// Builds and validates a lattice from a [`LatticeSpec`].
    pub fn from_spec(spec: &LatticeSpec) -> Result<Self> {
        let n = spec.elements.len();
        if n == 0 {
            return Err(Error::EmptyLattice);
        }
        if n > MAX_LATTICE_SIZE {
            return Err(Error::LatticeTooLarge(n));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, e) in spec.elements.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(Error::DuplicateElement(e.clone()));
            }
        }
        let lookup = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| Error::UnknownElement(s.to_string()))
        };
        // down[i] = { j : j ≤ i }
        let mut down: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
        for (lo, hi) in &spec.le {
            let (lo, hi) = (lookup(lo)?, lookup(hi)?);
            down[hi] |= 1 << lo;
        }
        // transitive closure: if j ≤ i then down[j] ⊆ down[i]
        loop {
            let mut changed = false;
            for i in 0..n {
                let mut acc = down[i];
                for j in bits(down[i]) {
                    acc |= down[j];
                }
                if acc != down[i] {
                    down[i] = acc;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for i in 0..n {
            for j in bits(down[i]) {
                if j != i && down[j] & (1 << i) != 0 {
                    let (a, b) = (i.min(j), i.max(j));
                    return Err(Error::OrderCycle(
                        spec.elements[a].clone(),
                        spec.elements[b].clone(),
                    ));
                }
            }
        }
        let mut up = vec![0u64; n];
        for (i, &d) in down.iter().enumerate() {
            for j in bits(d) {
                up[j] |= 1 << i;
            }
        }
        let mut meet = vec![0u8; n * n];
        let mut join = vec![0u8; n * n];
        for x in 0..n {
            for y in 0..n {
                let uppers = up[x] & up[y];
                let least = bits(uppers).find(|&m| up[m] & uppers == uppers);
                match least {
                    Some(m) => join[x * n + y] = m as u8,
                    None => {
                        return Err(Error::NoJoin(
                            spec.elements[x].clone(),
                            spec.elements[y].clone(),
                        ))
                    }
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                let lowers = down[x] & down[y];
                let greatest = bits(lowers).find(|&m| down[m] & lowers == lowers);
                match greatest {
                    Some(m) => meet[x * n + y] = m as u8,
                    None => {
                        return Err(Error::NoMeet(
                            spec.elements[x].clone(),
                            spec.elements[y].clone(),
                        ))
                    }
                }
            }
        }
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let bottom = (0..n)
            .find(|&i| up[i] == all)
            .expect("finite lattice has a bottom");
        let top = (0..n)
            .find(|&i| down[i] == all)
            .expect("finite lattice has a top");
        let chain = (0..n).all(|i| (down[i] | up[i]) == all);
        let mut lattice = FiniteLattice {
            name: spec.name.clone(),
            elements: spec.elements.clone(),
            index,
            down,
            up,
            meet,
            join,
            bottom: LatticeElement::new(bottom),
            top: LatticeElement::new(top),
            distributivity_witness: None,
            chain,
        };
        lattice.distributivity_witness = lattice.find_distributivity_violation();
        Ok(lattice)
    }

    /// Parses a lattice file (JSON).
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: LatticeSpec =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("lattice file: {e}")))?;
        Self::from_spec(&spec)
    }

    /// The chain `0 < 1 < … < n-1` with elements named by their rank.
    pub fn chain(name: &str, n: usize) -> Result<Self> {
        let elements: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let le = elements
            .windows(2)
            .map(|w| (w[0].clone(), w[1].clone()))
            .collect();
        Self::from_spec(&LatticeSpec {
            name: name.to_string(),
            elements,
            le,
        })
    }

    /// Covering pairs, i.e. the Hasse diagram, in canonical order.
    pub fn covers(&self) -> Vec<(LatticeElement, LatticeElement)> {
        let mut out = Vec::new();
        for hi in self.iter() {
            for lo in self.iter() {
                if lo != hi && self.leq(lo, hi) && self.interval_mask(lo, hi).count_ones() == 2 {
                    out.push((lo, hi));
                }
            }
        }
        out.sort();
        out
    }

    /// Serializable description using covering pairs.
    pub fn to_spec(&self) -> LatticeSpec {
        LatticeSpec {
            name: self.name.clone(),
            elements: self.elements.clone(),
            le: self
                .covers()
                .into_iter()
                .map(|(lo, hi)| (self.label(lo).to_string(), self.label(hi).to_string()))
                .collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = LatticeElement> + Clone {
        (0..self.size()).map(LatticeElement::new)
    }

    pub fn label(&self, x: LatticeElement) -> &str {
        &self.elements[x.index()]
    }

    pub fn labels(&self) -> &[String] {
        &self.elements
    }

    pub fn element(&self, label: &str) -> Result<LatticeElement> {
        self.index
            .get(label)
            .map(|&i| LatticeElement::new(i))
            .ok_or_else(|| Error::UnknownElement(label.to_string()))
    }

    pub fn bottom(&self) -> LatticeElement {
        self.bottom
    }

    pub fn top(&self) -> LatticeElement {
        self.top
    }

    #[inline]
    pub fn meet(&self, x: LatticeElement, y: LatticeElement) -> LatticeElement {
        LatticeElement(self.meet[x.index() * self.size() + y.index()])
    }

    #[inline]
    pub fn join(&self, x: LatticeElement, y: LatticeElement) -> LatticeElement {
        LatticeElement(self.join[x.index() * self.size() + y.index()])
    }

    #[inline]
    pub fn leq(&self, x: LatticeElement, y: LatticeElement) -> bool {
        self.down[y.index()] & (1 << x.index()) != 0
    }

    #[inline]
    pub fn lt(&self, x: LatticeElement, y: LatticeElement) -> bool {
        x != y && self.leq(x, y)
    }

    pub fn op(&self, kind: LatticeOp, x: LatticeElement, y: LatticeElement) -> OpValue {
        match kind {
            LatticeOp::Meet => OpValue::Element(self.meet(x, y)),
            LatticeOp::Join => OpValue::Element(self.join(x, y)),
            LatticeOp::Leq => OpValue::Bool(self.leq(x, y)),
        }
    }

    /// Mask of all elements `≤ x`.
    #[inline]
    pub fn down_mask(&self, x: LatticeElement) -> u64 {
        self.down[x.index()]
    }

    /// Mask of all elements `≥ x`.
    #[inline]
    pub fn up_mask(&self, x: LatticeElement) -> u64 {
        self.up[x.index()]
    }

    /// Elements `≤ x` in canonical order.
    pub fn down_set(&self, x: LatticeElement) -> Vec<LatticeElement> {
        bits(self.down_mask(x)).map(LatticeElement::new).collect()
    }

    fn interval_mask(&self, lo: LatticeElement, hi: LatticeElement) -> u64 {
        self.up[lo.index()] & self.down[hi.index()]
    }

    /// `{c : lo ≤ c ≤ hi}` in canonical order.
    pub fn interval(&self, lo: LatticeElement, hi: LatticeElement) -> Result<Vec<LatticeElement>> {
        if !self.leq(lo, hi) {
            return Err(Error::NotComparable(
                self.label(lo).to_string(),
                self.label(hi).to_string(),
            ));
        }
        Ok(bits(self.interval_mask(lo, hi))
            .map(LatticeElement::new)
            .collect())
    }

    /// Join of a set of elements; the empty join is the bottom.
    pub fn sup<I: IntoIterator<Item = LatticeElement>>(&self, items: I) -> LatticeElement {
        items
            .into_iter()
            .fold(self.bottom, |acc, x| self.join(acc, x))
    }

    /// Meet of a set of elements; the empty meet is the top.
    pub fn inf<I: IntoIterator<Item = LatticeElement>>(&self, items: I) -> LatticeElement {
        items.into_iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    pub fn is_distributive(&self) -> bool {
        self.distributivity_witness.is_none()
    }

    /// A triple `(x, y, z)` with `x∧(y∨z) ≠ (x∧y)∨(x∧z)`, if any.
    pub fn distributivity_witness(&self) -> Option<[LatticeElement; 3]> {
        self.distributivity_witness
    }

    fn find_distributivity_violation(&self) -> Option<[LatticeElement; 3]> {
        for x in self.iter() {
            for y in self.iter() {
                for z in self.iter() {
                    let lhs = self.meet(x, self.join(y, z));
                    let rhs = self.join(self.meet(x, y), self.meet(x, z));
                    if lhs != rhs {
                        return Some([x, y, z]);
                    }
                }
            }
        }
        None
    }

    pub fn is_chain(&self) -> bool {
        self.chain
    }

    /// A finite lattice contains the supremum of every non-empty subset
    /// exactly when it is a chain.
    pub fn chain_properties(&self) -> ChainProperties {
        ChainProperties {
            is_chain: self.chain,
            is_upper_well_ordered: self.chain,
        }
    }

    /// Elements covered by `x` (its lower covers).
    pub fn lower_covers(&self, x: LatticeElement) -> Vec<LatticeElement> {
        self.iter()
            .filter(|&y| self.lt(y, x) && self.interval_mask(y, x).count_ones() == 2)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(elements: &[&str], le: &[(&str, &str)]) -> LatticeSpec {
        LatticeSpec {
            name: "t".into(),
            elements: elements.iter().map(|s| s.to_string()).collect(),
            le: le
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
        }
    }

    fn l3() -> FiniteLattice {
        FiniteLattice::from_spec(&spec(
            &["0", "a", "b", "c", "1"],
            &[("0", "a"), ("a", "b"), ("a", "c"), ("b", "1"), ("c", "1")],
        ))
        .unwrap()
    }

    fn m3() -> FiniteLattice {
        FiniteLattice::from_spec(&spec(
            &["0", "p", "q", "r", "1"],
            &[
                ("0", "p"),
                ("0", "q"),
                ("0", "r"),
                ("p", "1"),
                ("q", "1"),
                ("r", "1"),
            ],
        ))
        .unwrap()
    }

    #[test]
    fn l3_meets_and_joins() {
        let l = l3();
        let [a, b, c] = ["a", "b", "c"].map(|s| l.element(s).unwrap());
        assert_eq!(l.join(b, c), l.top());
        assert_eq!(l.meet(b, c), a);
        assert_eq!(l.sup([b, c]), l.top());
        assert_eq!(l.sup([]), l.bottom());
        assert_eq!(l.inf([]), l.top());
        for x in l.iter() {
            assert_eq!(l.meet(x, l.top()), x);
        }
        assert!(l.is_distributive());
        assert_eq!(
            l.chain_properties(),
            ChainProperties {
                is_chain: false,
                is_upper_well_ordered: false
            }
        );
    }

    #[test]
    fn two_chain_is_distributive_chain() {
        let l = FiniteLattice::from_spec(&spec(&["0", "1"], &[("0", "1")])).unwrap();
        assert!(l.is_distributive());
        assert_eq!(
            l.chain_properties(),
            ChainProperties {
                is_chain: true,
                is_upper_well_ordered: true
            }
        );
        let c3 = FiniteLattice::chain("c3", 3).unwrap();
        assert!(c3.chain_properties().is_upper_well_ordered);
    }

    #[test]
    fn antichain_has_no_join() {
        let err = FiniteLattice::from_spec(&spec(&["x", "y"], &[])).unwrap_err();
        assert_eq!(err, Error::NoJoin("x".into(), "y".into()));
    }

    #[test]
    fn cycle_and_unknown_element_rejected() {
        let err =
            FiniteLattice::from_spec(&spec(&["x", "y"], &[("x", "y"), ("y", "x")])).unwrap_err();
        assert!(matches!(err, Error::OrderCycle(..)));
        let err = FiniteLattice::from_spec(&spec(&["x"], &[("x", "z")])).unwrap_err();
        assert_eq!(err, Error::UnknownElement("z".into()));
    }

    #[test]
    fn missing_meet_detected() {
        // two incomparable lower bounds below a and b, no bottom
        let err = FiniteLattice::from_spec(&spec(
            &["p", "q", "a", "b", "1"],
            &[
                ("p", "a"),
                ("p", "b"),
                ("q", "a"),
                ("q", "b"),
                ("a", "1"),
                ("b", "1"),
            ],
        ))
        .unwrap_err();
        assert!(matches!(err, Error::NoJoin(..) | Error::NoMeet(..)));
    }

    #[test]
    fn diamond_is_not_distributive() {
        let l = m3();
        let [x, y, z] = l.distributivity_witness().expect("M3 is not distributive");
        assert_ne!(l.meet(x, l.join(y, z)), l.join(l.meet(x, y), l.meet(x, z)));
    }

    #[test]
    fn intervals() {
        let l = l3();
        let [a, b] = ["a", "b"].map(|s| l.element(s).unwrap());
        assert_eq!(l.interval(l.bottom(), l.top()).unwrap().len(), 5);
        assert_eq!(l.interval(a, b).unwrap(), vec![a, b]);
        assert_eq!(l.interval(b, b).unwrap(), vec![b]);
        assert!(matches!(l.interval(b, a), Err(Error::NotComparable(..))));
    }

    #[test]
    fn spec_round_trip_through_covers() {
        let l = l3();
        let again = FiniteLattice::from_spec(&l.to_spec()).unwrap();
        assert_eq!(l, again);
    }
}
