//! Finite groups given by a Cayley table or by permutation generators.
//!
//! Elements are indices into a dense multiplication table; the identity is
//! always index 0. For permutation groups the canonical order is BFS
//! discovery order from the identity, right-multiplying by the generators in
//! file order.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{self, Perm};

/// Groups above this order are rejected at load time.
pub const ORDER_CAP: usize = 10080;
/// Largest group accepted by [`FiniteGroup::all_subgroups`].
pub const SUBGROUP_ENUMERATION_CAP: usize = 200;

/// Index of an element inside a specific [`FiniteGroup`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement(u32);

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement(0);

    pub fn new(index: usize) -> Self {
        GroupElement(index as u32)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Group file contents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub name: String,
    pub kind: GroupKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub aliases: BTreeMap<String, AliasTarget>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    Cayley,
    Permutation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AliasTarget {
    Index(usize),
    Text(String),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Arithmetic {
    Mul,
    Inv,
    Conj,
    Comm,
}

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    labels: Vec<String>,
    aliases: BTreeMap<String, usize>,
    perms: Option<Vec<Perm>>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("name", &self.name)
            .field("order", &self.order)
            .finish()
    }
}

impl FiniteGroup {
    pub fn from_spec(spec: &GroupSpec) -> Result<Self> {
        let mut group = match spec.kind {
            GroupKind::Cayley => {
                let table = spec
                    .table
                    .as_ref()
                    .ok_or_else(|| Error::Input("cayley group needs a `table`".into()))?;
                Self::from_table(&spec.name, table)?
            }
            GroupKind::Permutation => {
                let degree = spec
                    .degree
                    .ok_or_else(|| Error::Input("permutation group needs a `degree`".into()))?;
                let gens = spec
                    .generators
                    .as_ref()
                    .ok_or_else(|| Error::Input("permutation group needs `generators`".into()))?;
                let gens = gens
                    .iter()
                    .map(|g| perm::from_images(g, degree))
                    .collect::<Result<Vec<_>>>()?;
                Self::from_permutations(&spec.name, degree, &gens)?
            }
        };
        for (alias, target) in &spec.aliases {
            let x = match target {
                AliasTarget::Index(i) if *i < group.order => GroupElement::new(*i),
                AliasTarget::Index(i) => return Err(Error::UnknownElement(i.to_string())),
                AliasTarget::Text(t) => group.resolve(t)?,
            };
            group.add_alias(alias, x)?;
        }
        Ok(group)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: GroupSpec =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("group file: {e}")))?;
        Self::from_spec(&spec)
    }

    /// Validates a full Cayley table whose element 0 is the identity.
    pub fn from_table(name: &str, table: &[Vec<usize>]) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::NotClosedTable("empty table".into()));
        }
        if n > ORDER_CAP {
            return Err(Error::OrderCap { cap: ORDER_CAP });
        }
        let mut mul = Vec::with_capacity(n * n);
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotClosedTable(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for &v in row {
                if v >= n {
                    return Err(Error::NotClosedTable(format!(
                        "entry {v} in row {i} is out of range"
                    )));
                }
                mul.push(v as u32);
            }
        }
        for x in 0..n {
            if mul[x] as usize != x || mul[x * n] as usize != x {
                return Err(Error::NoIdentity(format!(
                    "0·{x} or {x}·0 differs from {x}"
                )));
            }
        }
        let mut inv = vec![0u32; n];
        for x in 0..n {
            let y = (0..n)
                .find(|&y| mul[x * n + y] == 0 && mul[y * n + x] == 0)
                .ok_or(Error::NoInverse(x))?;
            inv[x] = y as u32;
        }
        for x in 0..n {
            for y in 0..n {
                let xy = mul[x * n + y] as usize;
                for z in 0..n {
                    let yz = mul[y * n + z] as usize;
                    if mul[xy * n + z] != mul[x * n + yz] {
                        return Err(Error::NotAssociative(x, y, z));
                    }
                }
            }
        }
        let mut group = FiniteGroup {
            name: name.to_string(),
            order: n,
            mul,
            inv,
            labels: (0..n).map(|i| i.to_string()).collect(),
            aliases: BTreeMap::new(),
            perms: None,
        };
        group.aliases.insert("e".into(), 0);
        Ok(group)
    }

    /// Closes the generators under composition.
    pub fn from_permutations(name: &str, degree: usize, generators: &[Perm]) -> Result<Self> {
        for g in generators {
            if g.len() != degree {
                return Err(Error::BadPermutation(format!(
                    "generator of degree {} in a degree {degree} group",
                    g.len()
                )));
            }
        }
        let mut elements: Vec<Perm> = vec![perm::identity(degree)];
        let mut index: HashMap<Perm, u32> = HashMap::new();
        index.insert(elements[0].clone(), 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for g in generators {
                let y = perm::compose(&elements[x], g);
                if !index.contains_key(&y) {
                    if elements.len() == ORDER_CAP {
                        return Err(Error::OrderCap { cap: ORDER_CAP });
                    }
                    index.insert(y.clone(), elements.len() as u32);
                    queue.push_back(elements.len());
                    elements.push(y);
                }
            }
        }
        let n = elements.len();
        let mut mul = vec![0u32; n * n];
        for x in 0..n {
            for y in 0..n {
                mul[x * n + y] = index[&perm::compose(&elements[x], &elements[y])];
            }
        }
        let inv = elements.iter().map(|p| index[&perm::inverse(p)]).collect();
        let mut group = FiniteGroup {
            name: name.to_string(),
            order: n,
            mul,
            inv,
            labels: elements.iter().map(|p| perm::to_one_line(p)).collect(),
            aliases: BTreeMap::new(),
            perms: Some(elements),
        };
        group.aliases.insert("e".into(), 0);
        Ok(group)
    }

    pub fn add_alias(&mut self, alias: &str, x: GroupElement) -> Result<()> {
        match self.aliases.get(alias) {
            Some(&old) if old != x.index() && alias != "e" => Err(Error::Input(format!(
                "alias `{alias}` already names element {old}"
            ))),
            _ => {
                self.aliases.insert(alias.to_string(), x.index());
                Ok(())
            }
        }
    }

    pub fn with_aliases(mut self, aliases: &[(&str, &str)]) -> Result<Self> {
        for (alias, target) in aliases {
            let x = self.resolve(target)?;
            self.add_alias(alias, x)?;
        }
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::IDENTITY
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + Clone {
        (0..self.order).map(GroupElement::new)
    }

    #[inline]
    pub fn mul(&self, x: GroupElement, y: GroupElement) -> GroupElement {
        GroupElement(self.mul[x.index() * self.order + y.index()])
    }

    #[inline]
    pub fn inv(&self, x: GroupElement) -> GroupElement {
        GroupElement(self.inv[x.index()])
    }

    /// `x · y · x⁻¹`
    pub fn conj(&self, x: GroupElement, y: GroupElement) -> GroupElement {
        self.mul(self.mul(x, y), self.inv(x))
    }

    /// `[x, y] = x · y · x⁻¹ · y⁻¹`
    pub fn comm(&self, x: GroupElement, y: GroupElement) -> GroupElement {
        self.mul(self.conj(x, y), self.inv(y))
    }

    pub fn arithmetic(
        &self,
        kind: Arithmetic,
        x: GroupElement,
        y: Option<GroupElement>,
    ) -> Result<GroupElement> {
        let need_y = || y.ok_or_else(|| Error::Input("operation needs a second element".into()));
        Ok(match kind {
            Arithmetic::Mul => self.mul(x, need_y()?),
            Arithmetic::Inv => self.inv(x),
            Arithmetic::Conj => self.conj(x, need_y()?),
            Arithmetic::Comm => self.comm(x, need_y()?),
        })
    }

    /// Display label: the one-line image array for permutations, the index otherwise.
    pub fn label(&self, x: GroupElement) -> &str {
        &self.labels[x.index()]
    }

    /// Preferred alias of an element if it has one, otherwise its label.
    pub fn display(&self, x: GroupElement) -> String {
        self.aliases
            .iter()
            .find(|(name, &i)| i == x.index() && (name.as_str() != "e" || x.index() == 0))
            .map(|(name, _)| name.clone())
            .unwrap_or_else(|| self.label(x).to_string())
    }

    pub fn aliases(&self) -> &BTreeMap<String, usize> {
        &self.aliases
    }

    pub fn perm(&self, x: GroupElement) -> Option<&[u8]> {
        self.perms.as_ref().map(|p| p[x.index()].as_slice())
    }

    pub fn degree(&self) -> Option<usize> {
        self.perms.as_ref().map(|p| p[0].len())
    }

    /// Resolves an alias, a decimal index, a one-line image array or a cycle string.
    pub fn resolve(&self, text: &str) -> Result<GroupElement> {
        let text = text.trim();
        if let Some(&i) = self.aliases.get(text) {
            return Ok(GroupElement::new(i));
        }
        if let Ok(i) = text.parse::<usize>() {
            if i < self.order {
                return Ok(GroupElement::new(i));
            }
        }
        if let (Some(perms), Some(degree)) = (&self.perms, self.degree()) {
            let p = if text.starts_with('[') {
                perm::parse_one_line(text, degree).ok()
            } else {
                perm::parse_cycles(text, degree).ok()
            };
            if let Some(p) = p {
                if let Some(i) = perms.iter().position(|q| *q == p) {
                    return Ok(GroupElement::new(i));
                }
            }
        }
        Err(Error::UnknownElement(text.to_string()))
    }

    pub fn empty_set(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.order)
    }

    /// Subgroup generated by a list of elements (BFS closure from the identity).
    pub fn closure_of(&self, generators: &[GroupElement]) -> FixedBitSet {
        let mut members = self.empty_set();
        members.insert(0);
        let mut queue = VecDeque::from([GroupElement::IDENTITY]);
        while let Some(x) = queue.pop_front() {
            for &g in generators {
                let y = self.mul(x, g);
                if !members.put(y.index()) {
                    queue.push_back(y);
                }
            }
        }
        members
    }

    /// Subgroup generated by a set; only elements not yet reached are used as generators.
    pub fn generated_subgroup(&self, set: &FixedBitSet) -> Subgroup {
        let mut gens = Vec::new();
        let mut members = self.empty_set();
        members.insert(0);
        for s in set.ones() {
            if !members.contains(s) {
                gens.push(GroupElement::new(s));
                members = self.closure_of(&gens);
            }
        }
        Subgroup { members }
    }

    pub fn generated_by(&self, elements: &[GroupElement]) -> Subgroup {
        let mut set = self.empty_set();
        for x in elements {
            set.insert(x.index());
        }
        self.generated_subgroup(&set)
    }

    pub fn whole(&self) -> Subgroup {
        let mut members = self.empty_set();
        members.insert_range(..);
        Subgroup { members }
    }

    pub fn trivial(&self) -> Subgroup {
        self.generated_by(&[])
    }

    /// Non-empty and closed under products and inverses.
    pub fn is_subgroup(&self, set: &FixedBitSet) -> bool {
        if !set.contains(0) {
            return false;
        }
        set.ones().all(|x| {
            let x = GroupElement::new(x);
            set.contains(self.inv(x).index())
                && set
                    .ones()
                    .all(|y| set.contains(self.mul(x, GroupElement::new(y)).index()))
        })
    }

    /// Every subgroup, sorted by order then by member list.
    pub fn all_subgroups(&self) -> Result<Vec<Subgroup>> {
        if self.order > SUBGROUP_ENUMERATION_CAP {
            return Err(Error::OrderCap {
                cap: SUBGROUP_ENUMERATION_CAP,
            });
        }
        let trivial = self.trivial();
        let mut seen: HashSet<FixedBitSet> = HashSet::from([trivial.members.clone()]);
        let mut frontier = vec![(trivial.members, Vec::<GroupElement>::new())];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for (members, gens) in &frontier {
                for g in self.elements() {
                    if members.contains(g.index()) {
                        continue;
                    }
                    let mut more = gens.clone();
                    more.push(g);
                    let closed = self.closure_of(&more);
                    if seen.insert(closed.clone()) {
                        next.push((closed, more));
                    }
                }
            }
            frontier = next;
        }
        let mut out: Vec<Subgroup> = seen
            .into_iter()
            .map(|members| Subgroup { members })
            .collect();
        out.sort();
        Ok(out)
    }

    /// `h` normal in `g` when `g` normalizes `h`; `h ⊆ g` is assumed.
    pub fn is_normal_in(&self, h: &FixedBitSet, g: &FixedBitSet) -> bool {
        g.ones().all(|x| {
            h.ones().all(|y| {
                h.contains(
                    self.conj(GroupElement::new(x), GroupElement::new(y))
                        .index(),
                )
            })
        })
    }

    pub fn is_normal_subgroup(&self, h: &Subgroup) -> bool {
        self.is_normal_in(&h.members, &self.whole().members)
    }

    /// A small generating set picked greedily in canonical order.
    pub fn generators(&self) -> Vec<GroupElement> {
        let mut gens = Vec::new();
        let mut members = self.closure_of(&gens);
        for x in self.elements() {
            if !members.contains(x.index()) {
                gens.push(x);
                members = self.closure_of(&gens);
            }
        }
        gens
    }
}

/// A subgroup as a member set over the canonical element order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgroup {
    members: FixedBitSet,
}

impl Subgroup {
    /// Caller guarantees closure; use [`FiniteGroup::is_subgroup`] to check.
    pub fn from_members(members: FixedBitSet) -> Self {
        Subgroup { members }
    }

    pub fn members(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn contains(&self, x: GroupElement) -> bool {
        self.members.contains(x.index())
    }

    pub fn elements(&self) -> Vec<GroupElement> {
        self.members.ones().map(GroupElement::new).collect()
    }
}

impl Ord for Subgroup {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| self.members.ones().cmp(other.members.ones()))
    }
}

impl PartialOrd for Subgroup {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Direction {
    Image,
    Preimage,
}

/// A validated homomorphism between two finite groups.
#[derive(Clone, Debug)]
pub struct GroupHomomorphism {
    source: Arc<FiniteGroup>,
    target: Arc<FiniteGroup>,
    map: Vec<GroupElement>,
}

impl GroupHomomorphism {
    pub fn new(
        source: Arc<FiniteGroup>,
        target: Arc<FiniteGroup>,
        map: Vec<GroupElement>,
    ) -> Result<Self> {
        if map.len() != source.order() || map.iter().any(|y| y.index() >= target.order()) {
            return Err(Error::Input(
                "homomorphism map must be total into the target".into(),
            ));
        }
        for x in source.elements() {
            for y in source.elements() {
                if map[source.mul(x, y).index()] != target.mul(map[x.index()], map[y.index()]) {
                    return Err(Error::NotAHomomorphism(x.index(), y.index()));
                }
            }
        }
        Ok(GroupHomomorphism {
            source,
            target,
            map,
        })
    }

    pub fn identity(group: Arc<FiniteGroup>) -> Self {
        let map = group.elements().collect();
        GroupHomomorphism {
            source: group.clone(),
            target: group,
            map,
        }
    }

    /// Every homomorphism `source → target`, found by assigning images to a
    /// generating set and propagating along the Cayley graph.
    pub fn all(source: &Arc<FiniteGroup>, target: &Arc<FiniteGroup>) -> Vec<GroupHomomorphism> {
        let gens = source.generators();
        let mut out = Vec::new();
        let k = gens.len();
        let total = target.order().pow(k as u32);
        'outer: for code in 0..total {
            let mut images = Vec::with_capacity(k);
            let mut c = code;
            for _ in 0..k {
                images.push(GroupElement::new(c % target.order()));
                c /= target.order();
            }
            let mut map: Vec<Option<GroupElement>> = vec![None; source.order()];
            map[0] = Some(GroupElement::IDENTITY);
            let mut queue = VecDeque::from([GroupElement::IDENTITY]);
            while let Some(x) = queue.pop_front() {
                let fx = map[x.index()].expect("visited");
                for (g, h) in gens.iter().zip(&images) {
                    let y = source.mul(x, *g);
                    let fy = target.mul(fx, *h);
                    match map[y.index()] {
                        None => {
                            map[y.index()] = Some(fy);
                            queue.push_back(y);
                        }
                        Some(old) if old != fy => continue 'outer,
                        Some(_) => {}
                    }
                }
            }
            let map = map
                .into_iter()
                .map(|m| m.expect("generators reach every element"))
                .collect();
            if let Ok(f) = GroupHomomorphism::new(source.clone(), target.clone(), map) {
                out.push(f);
            }
        }
        out
    }

    pub fn source(&self) -> &Arc<FiniteGroup> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteGroup> {
        &self.target
    }

    #[inline]
    pub fn apply(&self, x: GroupElement) -> GroupElement {
        self.map[x.index()]
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = self.target.empty_set();
        self.map.iter().all(|y| !seen.put(y.index()))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = self.target.empty_set();
        for y in &self.map {
            seen.insert(y.index());
        }
        seen.count_ones(..) == self.target.order()
    }

    pub fn image(&self, h: &Subgroup) -> Subgroup {
        let mut members = self.target.empty_set();
        for x in h.members.ones() {
            members.insert(self.map[x].index());
        }
        Subgroup { members }
    }

    pub fn preimage(&self, h: &Subgroup) -> Subgroup {
        let mut members = self.source.empty_set();
        for x in self.source.elements() {
            if h.contains(self.apply(x)) {
                members.insert(x.index());
            }
        }
        Subgroup { members }
    }

    pub fn apply_to_subgroup(&self, direction: Direction, h: &Subgroup) -> Subgroup {
        match direction {
            Direction::Image => self.image(h),
            Direction::Preimage => self.preimage(h),
        }
    }
}
