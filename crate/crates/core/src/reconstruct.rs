//! Constraint search for a 14-element value lattice carrying the S4 example.
//!
//! Seven core values are fixed by the example (`u1`, `d1`, `a1`, `b1`, `c1`,
//! `f0`, `b0`). The search enumerates every partial order on them that is
//! compatible with the forced relations, completes each one to a lattice in
//! three ways (Dedekind–MacNeille cuts, all down-sets, non-empty down-sets),
//! keeps completions with exactly 14 elements and runs the full list of
//! order identities and fixture checks on each.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::error::Result;
use crate::fixtures;
use crate::lattice::{FiniteLattice, LatticeSpec};
use crate::lgroup::{self, Mode, Want};
use crate::lset::LSubset;
use crate::maxfrat::{self, BoxFilter, Budget};

pub const CORE: [&str; 7] = ["f0", "b0", "a1", "b1", "c1", "d1", "u1"];
pub const TARGET_SIZE: usize = 14;

/// A partial order on up to 64 labels; `down[i]` has bit `j` set iff `j ≤ i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poset {
    pub labels: Vec<String>,
    pub down: Vec<u64>,
}

impl Poset {
    /// Reflexive-transitive closure of `pairs` (`(lo, hi)` indices); `None` on a cycle.
    pub fn from_pairs(labels: &[&str], pairs: &[(usize, usize)]) -> Option<Self> {
        let n = labels.len();
        let mut down: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
        for &(lo, hi) in pairs {
            down[hi] |= 1 << lo;
        }
        loop {
            let mut changed = false;
            for i in 0..n {
                let mut acc = down[i];
                for j in 0..n {
                    if down[i] >> j & 1 == 1 {
                        acc |= down[j];
                    }
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
            for j in 0..n {
                if i != j && down[i] >> j & 1 == 1 && down[j] >> i & 1 == 1 {
                    return None;
                }
            }
        }
        Some(Poset {
            labels: labels.iter().map(|s| s.to_string()).collect(),
            down,
        })
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.down[j] >> i & 1 == 1
    }

    fn full(&self) -> u64 {
        if self.size() == 64 {
            u64::MAX
        } else {
            (1u64 << self.size()) - 1
        }
    }

    fn is_down_set(&self, set: u64) -> bool {
        (0..self.size())
            .filter(|i| set >> i & 1 == 1)
            .all(|i| self.down[i] & !set == 0)
    }

    fn upper_bounds(&self, set: u64) -> u64 {
        (0..self.size())
            .filter(|&j| {
                (0..self.size())
                    .filter(|i| set >> i & 1 == 1)
                    .all(|i| self.leq(i, j))
            })
            .fold(0, |acc, j| acc | 1 << j)
    }

    fn lower_bounds(&self, set: u64) -> u64 {
        (0..self.size())
            .filter(|&j| {
                (0..self.size())
                    .filter(|i| set >> i & 1 == 1)
                    .all(|i| self.leq(j, i))
            })
            .fold(0, |acc, j| acc | 1 << j)
    }

    /// All down-sets, optionally without the empty one.
    pub fn down_sets(&self, nonempty: bool) -> Vec<u64> {
        (0..=self.full())
            .filter(|&s| self.is_down_set(s) && (!nonempty || s != 0))
            .collect()
    }

    /// Closed sets `A ↦ lower(upper(A))`.
    pub fn cuts(&self) -> Vec<u64> {
        let set: BTreeSet<u64> = (0..=self.full())
            .map(|s| self.lower_bounds(self.upper_bounds(s)))
            .collect();
        set.into_iter().collect()
    }

    /// Name of a down-closed set: its maximal elements joined by `|`.
    fn set_label(&self, set: u64) -> String {
        let maximal: Vec<&str> = (0..self.size())
            .filter(|&i| set >> i & 1 == 1)
            .filter(|&i| !(0..self.size()).any(|j| j != i && set >> j & 1 == 1 && self.leq(i, j)))
            .map(|i| self.labels[i].as_str())
            .collect();
        if maximal.is_empty() {
            "0".to_string()
        } else {
            maximal.join("|")
        }
    }

    /// Orders a family of down-closed sets by inclusion; principal sets keep
    /// the label of their generator.
    pub fn lattice_of(&self, name: &str, sets: &[u64]) -> Result<FiniteLattice> {
        let mut sets = sets.to_vec();
        sets.sort_by_key(|s| (s.count_ones(), *s));
        let elements: Vec<String> = sets.iter().map(|&s| self.set_label(s)).collect();
        let mut le = Vec::new();
        for (i, &a) in sets.iter().enumerate() {
            for (j, &b) in sets.iter().enumerate() {
                if i != j && a & !b == 0 {
                    le.push((elements[i].clone(), elements[j].clone()));
                }
            }
        }
        FiniteLattice::from_spec(&LatticeSpec {
            name: name.to_string(),
            elements,
            le,
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Completion {
    MacNeille,
    DownSets,
    NonEmptyDownSets,
}

/// Outcome of every check on one candidate lattice.
#[derive(Clone, Debug, Serialize)]
pub struct CandidateChecks {
    pub meets_with_d1: bool,
    pub pairwise_meets_below_f0: bool,
    pub pairwise_meets_join_to_f0: bool,
    pub distributive: bool,
    pub mu_is_lsubgroup: bool,
    pub commutator_table: bool,
    pub class_two: bool,
    pub box_16_with_2_survivors: bool,
    pub eta_maximal: bool,
    pub eta_normal: bool,
}

impl CandidateChecks {
    pub fn all(&self) -> bool {
        self.meets_with_d1
            && self.pairwise_meets_below_f0
            && self.pairwise_meets_join_to_f0
            && self.distributive
            && self.mu_is_lsubgroup
            && self.commutator_table
            && self.class_two
            && self.box_16_with_2_survivors
            && self.eta_maximal
            && self.eta_normal
    }

    /// The order identities alone, before any fixture is built.
    pub fn order_identities(&self) -> bool {
        self.meets_with_d1 && self.pairwise_meets_below_f0 && self.pairwise_meets_join_to_f0
    }
}

#[derive(Clone, Debug)]
pub struct Candidate {
    pub poset: Poset,
    pub completion: Completion,
    pub lattice: Arc<FiniteLattice>,
    pub checks: CandidateChecks,
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub posets: usize,
    pub completions_tried: usize,
    pub of_target_size: usize,
    pub candidates: Vec<Candidate>,
}

impl SearchReport {
    pub fn solutions(&self) -> impl Iterator<Item = &Candidate> {
        self.candidates.iter().filter(|c| c.checks.all())
    }
}

/// Relations forced by the example: `u1` is the top value, `f0` lies below
/// every value of `μ`, `a1, b1, c1 < d1` and `b0 < b1`.
fn forced_pairs() -> Vec<(usize, usize)> {
    let ix = |s: &str| CORE.iter().position(|c| *c == s).expect("core label");
    let mut pairs = vec![
        (ix("a1"), ix("d1")),
        (ix("b1"), ix("d1")),
        (ix("c1"), ix("d1")),
        (ix("b0"), ix("b1")),
    ];
    for s in ["f0", "b0", "a1", "b1", "c1", "d1"] {
        pairs.push((ix(s), ix("u1")));
    }
    for s in ["a1", "b1", "c1", "d1"] {
        pairs.push((ix("f0"), ix(s)));
    }
    pairs
}

/// Every poset on the core labels compatible with the forced relations.
pub fn core_posets() -> Vec<Poset> {
    let ix = |s: &str| CORE.iter().position(|c| *c == s).expect("core label");
    let free = [
        ("a1", "b1"),
        ("a1", "c1"),
        ("b1", "c1"),
        ("b0", "f0"),
        ("b0", "a1"),
        ("b0", "c1"),
    ];
    let forced = forced_pairs();
    let mut out = BTreeSet::new();
    for code in 0..3usize.pow(free.len() as u32) {
        let mut pairs = forced.clone();
        let mut c = code;
        for (x, y) in free {
            match c % 3 {
                1 => pairs.push((ix(x), ix(y))),
                2 => pairs.push((ix(y), ix(x))),
                _ => {}
            }
            c /= 3;
        }
        if let Some(p) = Poset::from_pairs(&CORE, &pairs) {
            out.insert(p);
        }
    }
    out.into_iter().collect()
}

/// Runs the full check list on a lattice containing the core labels.
pub fn check_lattice(lattice: &Arc<FiniteLattice>) -> Result<CandidateChecks> {
    let l = lattice;
    let e = |s: &str| l.element(s);
    let (a1, b1, c1, d1, f0, u1) = (e("a1")?, e("b1")?, e("c1")?, e("d1")?, e("f0")?, e("u1")?);
    let meets_with_d1 = l.meet(a1, d1) == a1 && l.meet(b1, d1) == b1 && l.meet(c1, d1) == c1;
    let pairwise = [l.meet(a1, b1), l.meet(a1, c1), l.meet(b1, c1)];
    let pairwise_meets_below_f0 = pairwise.iter().all(|&m| l.leq(m, f0));
    let pairwise_meets_join_to_f0 = l.sup(pairwise) == f0;

    let g = fixtures::s4();
    let mu = fixtures::s4_mu(&g, l)?;
    let eta = fixtures::s4_eta(&g, l)?;
    let mu_is_lsubgroup = lgroup::is_lsubgroup(&mu, Mode::Pointwise)?.verdict
        && lgroup::is_lsubgroup(&mu, Mode::Levels)?.verdict;
    let table = LSubset::from_assignments(
        &g,
        l,
        &[
            ("e", "u1"),
            ("(13)(24)", "a1"),
            ("(12)(34)", "b1"),
            ("(14)(23)", "c1"),
        ],
        "f0",
    )?;
    let commutator_table = lgroup::commutator_lsubset(&mu, &mu)? == table;
    let class_two = mu_is_lsubgroup
        && mu.tip() == u1
        && mu.tail() == f0
        && lgroup::commutator(&mu, &mu, &mu, Want::LSubgroup).is_ok_and(|z| z == table)
        && lgroup::nilpotency_class(&mu).is_ok_and(|c| c == Some(2));
    let eta_in_mu = mu_is_lsubgroup && lgroup::is_lsubgroup_of(&eta, &mu)?;
    let (box_ok, eta_maximal, eta_normal) = if eta_in_mu {
        let run = maxfrat::enumerate_box(&eta, &mu, BoxFilter::LSubgroup, Budget::default())?
            .certified()?;
        let mut expected = vec![eta.clone(), mu.clone()];
        expected.sort();
        let cert = maxfrat::is_maximal(&eta, &mu, Budget::default())?;
        (
            run.box_size == 16 && run.members == expected,
            cert.verdict,
            lgroup::is_normal(&eta, &mu)?,
        )
    } else {
        (false, false, false)
    };
    Ok(CandidateChecks {
        meets_with_d1,
        pairwise_meets_below_f0,
        pairwise_meets_join_to_f0,
        distributive: l.is_distributive(),
        mu_is_lsubgroup,
        commutator_table,
        class_two,
        box_16_with_2_survivors: box_ok,
        eta_maximal,
        eta_normal,
    })
}

fn completion_sets(poset: &Poset, completion: Completion) -> Vec<u64> {
    match completion {
        Completion::MacNeille => poset.cuts(),
        Completion::DownSets => poset.down_sets(false),
        Completion::NonEmptyDownSets => poset.down_sets(true),
    }
}

pub fn complete(poset: &Poset, completion: Completion) -> Result<FiniteLattice> {
    poset.lattice_of("S4-values", &completion_sets(poset, completion))
}

/// The bounded search described in the module documentation.
pub fn search() -> Result<SearchReport> {
    let posets = core_posets();
    let mut completions_tried = 0;
    let mut of_target_size = 0;
    let mut candidates = Vec::new();
    for poset in &posets {
        for completion in [
            Completion::MacNeille,
            Completion::DownSets,
            Completion::NonEmptyDownSets,
        ] {
            completions_tried += 1;
            let sets = completion_sets(poset, completion);
            if sets.len() != TARGET_SIZE {
                continue;
            }
            let Ok(lattice) = poset.lattice_of("S4-values", &sets) else {
                continue;
            };
            of_target_size += 1;
            let lattice = Arc::new(lattice);
            let checks = check_lattice(&lattice)?;
            candidates.push(Candidate {
                poset: poset.clone(),
                completion,
                lattice,
                checks,
            });
        }
    }
    Ok(SearchReport {
        posets: posets.len(),
        completions_tried,
        of_target_size,
        candidates,
    })
}
