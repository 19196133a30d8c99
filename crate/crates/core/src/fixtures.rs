//! Built-in groups, lattices and L-subsets.
//!
//! The JSON files under `fixtures/` describe the same objects; a test keeps
//! both in agreement.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::lattice::{FiniteLattice, LatticeSpec};
use crate::lset::{LPoint, LSubset};
use crate::perm;
use crate::reconstruct::{Completion, Poset, CORE};

pub const GROUP_NAMES: [&str; 12] = [
    "Z1", "Z2", "Z3", "Z4", "Z6", "V4", "S3", "D8", "Q8", "A4", "D12", "S4",
];
pub const LATTICE_NAMES: [&str; 7] = ["chain2", "chain3", "chain4", "L3", "B2", "M3", "S4-values"];

fn spec(name: &str, elements: &[&str], le: &[(&str, &str)]) -> LatticeSpec {
    LatticeSpec {
        name: name.to_string(),
        elements: elements.iter().map(|s| s.to_string()).collect(),
        le: le
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
    }
}

fn build(spec: LatticeSpec) -> Arc<FiniteLattice> {
    Arc::new(FiniteLattice::from_spec(&spec).expect("built-in lattice"))
}

pub fn chain(n: usize) -> Arc<FiniteLattice> {
    Arc::new(FiniteLattice::chain(&format!("chain{n}"), n).expect("built-in lattice"))
}

/// `0 < a < b, c < 1` with `b`, `c` incomparable.
pub fn l3() -> Arc<FiniteLattice> {
    build(spec(
        "L3",
        &["0", "a", "b", "c", "1"],
        &[("0", "a"), ("a", "b"), ("a", "c"), ("b", "1"), ("c", "1")],
    ))
}

/// The four-element Boolean lattice.
pub fn b2() -> Arc<FiniteLattice> {
    build(spec(
        "B2",
        &["0", "x", "y", "1"],
        &[("0", "x"), ("0", "y"), ("x", "1"), ("y", "1")],
    ))
}

/// The diamond: not distributive.
pub fn m3() -> Arc<FiniteLattice> {
    build(spec(
        "M3",
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
}

/// The order on the seven core values used by [`s4_lattice`].
pub fn s4_core_poset() -> Poset {
    let ix = |s: &str| CORE.iter().position(|c| *c == s).expect("core label");
    let pairs = [
        ("f0", "b0"),
        ("b0", "b1"),
        ("f0", "a1"),
        ("f0", "c1"),
        ("a1", "d1"),
        ("b1", "d1"),
        ("c1", "d1"),
        ("d1", "u1"),
    ]
    .map(|(a, b)| (ix(a), ix(b)));
    Poset::from_pairs(&CORE, &pairs).expect("acyclic")
}

/// Non-empty down-sets of [`s4_core_poset`]: fourteen elements, distributive.
pub fn s4_lattice() -> Arc<FiniteLattice> {
    Arc::new(
        crate::reconstruct::complete(&s4_core_poset(), Completion::NonEmptyDownSets)
            .expect("built-in lattice"),
    )
}

pub fn lattice(name: &str) -> Result<Arc<FiniteLattice>> {
    Ok(match name {
        "chain2" => chain(2),
        "chain3" => chain(3),
        "chain4" => chain(4),
        "L3" => l3(),
        "B2" => b2(),
        "M3" => m3(),
        "S4-values" => s4_lattice(),
        _ => return Err(Error::Input(format!("unknown lattice `{name}`"))),
    })
}

fn cyclic_table(n: usize) -> Vec<Vec<usize>> {
    (0..n)
        .map(|i| (0..n).map(|j| (i + j) % n).collect())
        .collect()
}

fn perm_group(name: &str, degree: usize, gens: &[&str]) -> FiniteGroup {
    let gens: Vec<_> = gens
        .iter()
        .map(|g| perm::parse_cycles(g, degree).expect("cycle"))
        .collect();
    FiniteGroup::from_permutations(name, degree, &gens).expect("built-in group")
}

pub fn cyclic(n: usize) -> Arc<FiniteGroup> {
    Arc::new(FiniteGroup::from_table(&format!("Z{n}"), &cyclic_table(n)).expect("built-in group"))
}

pub fn klein() -> Arc<FiniteGroup> {
    let t = (0..4)
        .map(|i| (0..4).map(|j| i ^ j).collect())
        .collect::<Vec<Vec<usize>>>();
    Arc::new(FiniteGroup::from_table("V4", &t).expect("built-in group"))
}

pub fn s3() -> Arc<FiniteGroup> {
    Arc::new(perm_group("S3", 3, &["(12)", "(123)"]))
}

/// Symmetries of the square with `r = (1234)`, `s = (12)(34)` and the
/// products `sr^k = s·r^k` as aliases.
pub fn d8() -> Arc<FiniteGroup> {
    let mut g = perm_group("D8", 4, &["(1234)", "(12)(34)"]);
    let r = g.resolve("(1234)").expect("r");
    let s = g.resolve("(12)(34)").expect("s");
    let mut rk = g.identity();
    for k in 0..4 {
        if k > 0 {
            g.add_alias(
                &if k == 1 {
                    "r".to_string()
                } else {
                    format!("r{k}")
                },
                rk,
            )
            .expect("alias");
        }
        let srk = g.mul(s, rk);
        g.add_alias(
            &match k {
                0 => "s".to_string(),
                1 => "sr".to_string(),
                _ => format!("sr{k}"),
            },
            srk,
        )
        .expect("alias");
        rk = g.mul(rk, r);
    }
    Arc::new(g)
}

/// Quaternions `±1, ±i, ±j, ±k`; index `2u + s` for unit `u` and sign bit `s`.
pub fn q8() -> Arc<FiniteGroup> {
    // unit products as (sign, unit) with units 1, i, j, k
    let unit = [
        [(0, 0), (0, 1), (0, 2), (0, 3)],
        [(0, 1), (1, 0), (0, 3), (1, 2)],
        [(0, 2), (1, 3), (1, 0), (0, 1)],
        [(0, 3), (0, 2), (1, 1), (1, 0)],
    ];
    let table: Vec<Vec<usize>> = (0..8)
        .map(|x| {
            (0..8)
                .map(|y| {
                    let (s, u) = unit[x / 2][y / 2];
                    2 * u + ((s + x % 2 + y % 2) % 2)
                })
                .collect()
        })
        .collect();
    let mut g = FiniteGroup::from_table("Q8", &table).expect("built-in group");
    for (name, ix) in [
        ("-1", 1),
        ("i", 2),
        ("-i", 3),
        ("j", 4),
        ("-j", 5),
        ("k", 6),
        ("-k", 7),
    ] {
        g.add_alias(name, crate::group::GroupElement::new(ix))
            .expect("alias");
    }
    Arc::new(g)
}

pub fn a4() -> Arc<FiniteGroup> {
    Arc::new(perm_group("A4", 4, &["(123)", "(12)(34)"]))
}

pub fn d12() -> Arc<FiniteGroup> {
    Arc::new(perm_group("D12", 6, &["(123456)", "(26)(35)"]))
}

pub fn s4() -> Arc<FiniteGroup> {
    Arc::new(perm_group("S4", 4, &["(1234)", "(12)"]))
}

pub fn group(name: &str) -> Result<Arc<FiniteGroup>> {
    Ok(match name {
        "Z1" => cyclic(1),
        "Z2" => cyclic(2),
        "Z3" => cyclic(3),
        "Z4" => cyclic(4),
        "Z6" => cyclic(6),
        "V4" => klein(),
        "S3" => s3(),
        "D8" => d8(),
        "Q8" => q8(),
        "A4" => a4(),
        "D12" => d12(),
        "S4" => s4(),
        _ => return Err(Error::Input(format!("unknown group `{name}`"))),
    })
}

/// `μ` on `D8` valued in `L3`: `1` at `e`, `b` at `r2`, `c` at `s`, `a` at `sr2`.
pub fn d8_mu() -> LSubset {
    let (g, l) = (d8(), l3());
    LSubset::from_assignments(
        &g,
        &l,
        &[("e", "1"), ("r2", "b"), ("s", "c"), ("sr2", "a")],
        "0",
    )
    .expect("fixture")
}

/// `b_{r2} ∪ c_s`.
pub fn d8_eta() -> LSubset {
    let mu = d8_mu();
    let pts = LPoint::parse_list("b@r2,c@s", mu.group(), mu.lattice()).expect("fixture");
    LSubset::points(mu.group(), mu.lattice(), &pts)
}

/// The three dihedral subgroups of `S4`, generated as in the example.
pub fn s4_dihedral(g: &FiniteGroup) -> [crate::group::Subgroup; 3] {
    let gen =
        |a: &str, b: &str| g.generated_by(&[g.resolve(a).expect("S4"), g.resolve(b).expect("S4")]);
    [
        gen("(24)", "(1234)"),
        gen("(12)", "(1324)"),
        gen("(23)", "(1342)"),
    ]
}

fn s4_valued(
    g: &Arc<FiniteGroup>,
    l: &Arc<FiniteLattice>,
    dihedral_values: [&str; 3],
) -> Result<LSubset> {
    let v4 = g.generated_by(&[g.resolve("(12)(34)")?, g.resolve("(13)(24)")?]);
    let dihedral = s4_dihedral(g);
    let mut values = vec![l.element("f0")?; g.order()];
    for (d, label) in dihedral.iter().zip(dihedral_values) {
        for x in d.elements() {
            values[x.index()] = l.element(label)?;
        }
    }
    for x in v4.elements() {
        values[x.index()] = l.element("d1")?;
    }
    values[0] = l.element("u1")?;
    LSubset::new(g.clone(), l.clone(), values)
}

/// `μ` on `S4`: `u1` at `e`, `d1` on the rest of `V4`, `a1`/`b1`/`c1` on the
/// three dihedral subgroups outside `V4`, `f0` elsewhere.
pub fn s4_mu(g: &Arc<FiniteGroup>, l: &Arc<FiniteLattice>) -> Result<LSubset> {
    s4_valued(g, l, ["a1", "b1", "c1"])
}

/// As [`s4_mu`] but `b0` on the second dihedral subgroup outside `V4`.
pub fn s4_eta(g: &Arc<FiniteGroup>, l: &Arc<FiniteLattice>) -> Result<LSubset> {
    s4_valued(g, l, ["a1", "b0", "c1"])
}

/// Characteristic function of `⟨gens⟩` inside `g`.
pub fn characteristic_of(
    g: &Arc<FiniteGroup>,
    l: &Arc<FiniteLattice>,
    gens: &[&str],
) -> Result<LSubset> {
    let gens = gens
        .iter()
        .map(|s| g.resolve(s))
        .collect::<Result<Vec<_>>>()?;
    Ok(LSubset::characteristic(
        g,
        l,
        g.generated_by(&gens).members(),
    ))
}
