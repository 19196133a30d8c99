//! Property tests against independent oracles: Moore-family lattices with
//! set-theoretic meets and joins, brute-force subgroup closure, direct
//! product formulas and exhaustive L-subgroup filters.

use std::sync::Arc;

use fixedbitset::FixedBitSet;
use proptest::prelude::*;

use lgl_core::fixtures;
use lgl_core::group::Direction;
use lgl_core::lgroup::{self, Mode};
use lgl_core::maxfrat::{self, BoxFilter, Budget, Via};
use lgl_core::verify;
use lgl_core::{
    FiniteGroup, FiniteLattice, GroupElement, GroupHomomorphism, LPoint, LSubset, LatticeElement,
    LatticeSpec,
};

const CASES: u32 = 64;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: CASES,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

// ---------- oracles ----------

/// Moore family on four points: intersection-closed, with the full set.
fn moore_family(seeds: &[u8]) -> Vec<u8> {
    let mut family: Vec<u8> = vec![0x0f];
    family.extend(seeds.iter().map(|s| s & 0x0f));
    loop {
        let mut grown = family.clone();
        for &a in &family {
            for &b in &family {
                grown.push(a & b);
            }
        }
        grown.sort_unstable();
        grown.dedup();
        if grown.len() == family.len() {
            return grown;
        }
        family = grown;
    }
}

fn moore_lattice(family: &[u8]) -> FiniteLattice {
    let elements: Vec<String> = family.iter().map(|m| format!("s{m:x}")).collect();
    let mut le = Vec::new();
    for (i, &a) in family.iter().enumerate() {
        for (j, &b) in family.iter().enumerate() {
            if a & b == a {
                le.push((elements[i].clone(), elements[j].clone()));
            }
        }
    }
    FiniteLattice::from_spec(&LatticeSpec {
        name: "moore".into(),
        elements,
        le,
    })
    .expect("Moore families are lattices")
}

fn oracle_join(family: &[u8], a: u8, b: u8) -> u8 {
    family
        .iter()
        .copied()
        .filter(|&c| c & (a | b) == a | b)
        .fold(0x0f, |acc, c| acc & c)
}

fn element_of(l: &FiniteLattice, family: &[u8], m: u8) -> LatticeElement {
    l.element(&format!("s{m:x}"))
        .unwrap_or_else(|_| panic!("{m:x} in {family:?}"))
}

/// Smallest subset of `g` closed under products containing `seed`.
fn closure_oracle(g: &FiniteGroup, seed: &[usize]) -> Vec<usize> {
    let mut set: Vec<usize> = vec![0];
    set.extend_from_slice(seed);
    set.sort_unstable();
    set.dedup();
    loop {
        let mut next = set.clone();
        for &x in &set {
            for &y in &set {
                next.push(g.mul(GroupElement::new(x), GroupElement::new(y)).index());
            }
        }
        next.sort_unstable();
        next.dedup();
        if next == set {
            return set;
        }
        set = next;
    }
}

fn bits(g: &FiniteGroup, members: &[usize]) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(g.order());
    for &m in members {
        b.insert(m);
    }
    b
}

fn lsubgroup_oracle(mu: &LSubset) -> bool {
    let (g, l) = (mu.group(), mu.lattice());
    g.elements().all(|x| {
        mu.value(g.inv(x)) == mu.value(x)
            && g.elements()
                .all(|y| l.leq(l.meet(mu.value(x), mu.value(y)), mu.value(g.mul(x, y))))
    })
}

fn levels_oracle(mu: &LSubset) -> bool {
    let g = mu.group();
    mu.lattice().iter().all(|a| {
        let members: Vec<usize> = g
            .elements()
            .filter(|&x| mu.lattice().leq(a, mu.value(x)))
            .map(|x| x.index())
            .collect();
        members.is_empty() || closure_oracle(g, &members) == members
    })
}

fn set_product_oracle(a: &LSubset, b: &LSubset) -> Vec<LatticeElement> {
    let (g, l) = (a.group(), a.lattice());
    g.elements()
        .map(|x| {
            let terms = g.elements().map(|y| {
                let z = g.mul(g.inv(y), x);
                l.meet(a.value(y), b.value(z))
            });
            l.sup(terms)
        })
        .collect()
}

// ---------- strategies ----------

fn group_pool() -> Vec<Arc<FiniteGroup>> {
    ["Z2", "Z3", "Z4", "V4", "S3", "Z6", "D8", "Q8", "A4", "D12"]
        .iter()
        .map(|n| fixtures::group(n).unwrap())
        .collect()
}

fn lattice_pool() -> Vec<Arc<FiniteLattice>> {
    let mut out: Vec<Arc<FiniteLattice>> = (2..=5).map(fixtures::chain).collect();
    out.extend([fixtures::l3(), fixtures::b2(), fixtures::m3()]);
    out
}

fn lsubset_strategy(max_order: usize) -> impl Strategy<Value = LSubset> {
    let groups: Vec<_> = group_pool()
        .into_iter()
        .filter(|g| g.order() <= max_order)
        .collect();
    let lattices = lattice_pool();
    (
        0..groups.len(),
        0..lattices.len(),
        prop::collection::vec(any::<u8>(), 12),
    )
        .prop_map(move |(gi, li, raw)| {
            let (g, l) = (groups[gi].clone(), lattices[li].clone());
            let values = (0..g.order())
                .map(|i| LatticeElement::new(raw[i] as usize % l.size()))
                .collect();
            LSubset::new(g, l, values).unwrap()
        })
}

fn distributive_lsubset(max_order: usize) -> impl Strategy<Value = LSubset> {
    lsubset_strategy(max_order)
        .prop_filter("distributive lattice", |mu| mu.lattice().is_distributive())
}

/// `⟨η⟩` of a random L-subset over a distributive lattice.
fn lsubgroup_strategy(max_order: usize) -> impl Strategy<Value = LSubset> {
    distributive_lsubset(max_order).prop_map(|eta| lgroup::generate(&eta))
}

fn below(mu: &LSubset, raw: &[u8]) -> LSubset {
    let l = mu.lattice();
    let values = mu
        .values()
        .iter()
        .zip(raw)
        .map(|(&m, &r)| {
            let down = l.down_set(m);
            down[r as usize % down.len()]
        })
        .collect();
    LSubset::new(mu.group().clone(), l.clone(), values).unwrap()
}

fn bounded(mu: &LSubset) -> bool {
    let l = mu.lattice();
    mu.values()
        .iter()
        .map(|&v| l.down_set(v).len() as u128)
        .product::<u128>()
        <= 4096
}

// ---------- lattice ----------

proptest! {
    #![proptest_config(config())]

    #[test]
    fn meets_and_joins_match_the_moore_family(seeds in prop::collection::vec(any::<u8>(), 0..6)) {
        let family = moore_family(&seeds);
        let l = moore_lattice(&family);
        for &a in &family {
            for &b in &family {
                let (x, y) = (element_of(&l, &family, a), element_of(&l, &family, b));
                prop_assert_eq!(l.meet(x, y), element_of(&l, &family, a & b));
                prop_assert_eq!(l.join(x, y), element_of(&l, &family, oracle_join(&family, a, b)));
                prop_assert_eq!(l.meet(x, l.join(x, y)), x);
                prop_assert_eq!(l.join(x, l.meet(x, y)), x);
            }
        }
    }

    #[test]
    fn distributivity_matches_the_dual_law(seeds in prop::collection::vec(any::<u8>(), 0..6)) {
        let family = moore_family(&seeds);
        let l = moore_lattice(&family);
        let brute = family.iter().all(|&x| family.iter().all(|&y| family.iter().all(|&z| {
            oracle_join(&family, x, y & z) == oracle_join(&family, x, y) & oracle_join(&family, x, z)
        })));
        prop_assert_eq!(l.is_distributive(), brute);
    }

    #[test]
    fn intervals_match_inclusion(seeds in prop::collection::vec(any::<u8>(), 0..6), i in 0usize..64, j in 0usize..64) {
        let family = moore_family(&seeds);
        let l = moore_lattice(&family);
        let (lo, hi) = (family[i % family.len()], family[j % family.len()]);
        let (x, y) = (element_of(&l, &family, lo), element_of(&l, &family, hi));
        match l.interval(x, y) {
            Ok(found) => {
                let expected: Vec<LatticeElement> = family.iter().filter(|&&c| lo & c == lo && c & hi == c)
                    .map(|&c| element_of(&l, &family, c)).collect();
                let mut found = found;
                found.sort();
                let mut expected = expected;
                expected.sort();
                prop_assert_eq!(found, expected);
            }
            Err(_) => prop_assert!(lo & hi != lo),
        }
    }
}

// ---------- groups ----------

proptest! {
    #![proptest_config(config())]

    #[test]
    fn generated_subgroups_match_closure(gi in 0usize..10, seed in prop::collection::vec(any::<u16>(), 0..3)) {
        let g = &group_pool()[gi];
        let seed: Vec<usize> = seed.iter().map(|s| *s as usize % g.order()).collect();
        let elems: Vec<GroupElement> = seed.iter().map(|&i| GroupElement::new(i)).collect();
        let found = g.generated_by(&elems);
        let expected = closure_oracle(g, &seed);
        prop_assert_eq!(found.members(), &bits(g, &expected));
        let meet_of_containing = g.all_subgroups().unwrap().iter()
            .filter(|h| seed.iter().all(|&s| h.members().contains(s)))
            .fold(bits(g, &(0..g.order()).collect::<Vec<_>>()), |mut acc, h| { acc.intersect_with(h.members()); acc });
        prop_assert_eq!(found.members(), &meet_of_containing);
    }

    #[test]
    fn permutation_groups_are_groups(gens in prop::collection::vec(Just([0u8, 1, 2, 3]).prop_shuffle(), 1..3)) {
        let gens: Vec<Vec<u8>> = gens.iter().map(|p| p.to_vec()).collect();
        let g = FiniteGroup::from_permutations("random", 4, &gens).unwrap();
        prop_assert_eq!(24 % g.order(), 0);
        let e = g.identity();
        for x in g.elements() {
            prop_assert_eq!(g.mul(x, g.inv(x)), e);
            prop_assert_eq!(g.mul(e, x), x);
        }
        let all: Vec<usize> = g.elements().map(|x| x.index()).collect();
        prop_assert_eq!(closure_oracle(&g, &all).len(), g.order());
    }

    #[test]
    fn homomorphisms_respect_products(si in 0usize..10, ti in 0usize..10, pick in any::<u16>()) {
        let pool = group_pool();
        let (s, t) = (&pool[si], &pool[ti]);
        let all = GroupHomomorphism::all(s, t);
        prop_assert!(!all.is_empty());
        let f = &all[pick as usize % all.len()];
        for x in s.elements() {
            for y in s.elements() {
                prop_assert_eq!(f.apply(s.mul(x, y)), t.mul(f.apply(x), f.apply(y)));
            }
        }
    }
}

#[test]
fn subgroup_lists_are_closed_and_complete() {
    for g in group_pool() {
        let subs = g.all_subgroups().unwrap();
        for h in &subs {
            let members: Vec<usize> = h.members().ones().collect();
            assert_eq!(closure_oracle(&g, &members), members, "{}", g.name());
        }
        for x in 0..g.order() {
            for y in 0..g.order() {
                let c = bits(&g, &closure_oracle(&g, &[x, y]));
                assert!(
                    subs.iter().any(|h| *h.members() == c),
                    "{} misses ⟨{x}, {y}⟩",
                    g.name()
                );
            }
        }
    }
}

// ---------- L-subsets ----------

proptest! {
    #![proptest_config(config())]

    #[test]
    fn levels_are_antitone_and_recover_values(mu in lsubset_strategy(12)) {
        let l = mu.lattice();
        for a in l.iter() {
            for b in l.iter().filter(|&b| l.leq(a, b)) {
                prop_assert!(mu.level(b, false).is_subset(&mu.level(a, false)));
            }
        }
        if l.is_distributive() {
            for x in mu.group().elements() {
                prop_assert_eq!(l.sup(l.iter().filter(|&a| mu.level(a, false).contains(x.index()))), mu.value(x));
            }
        }
    }

    #[test]
    fn set_product_matches_the_direct_formula(a in lsubset_strategy(12), raw in prop::collection::vec(any::<u8>(), 24)) {
        let l = a.lattice().clone();
        let make = |off: usize| LSubset::new(a.group().clone(), l.clone(),
            (0..a.group().order()).map(|i| LatticeElement::new(raw[off + i] as usize % l.size())).collect()).unwrap();
        let (b, c) = (make(0), make(12));
        let ab = a.set_product(&b).unwrap();
        prop_assert_eq!(ab.values(), &set_product_oracle(&a, &b)[..]);
        if l.is_distributive() {
            prop_assert_eq!(ab.set_product(&c).unwrap(), a.set_product(&b.set_product(&c).unwrap()).unwrap());
        }
    }

    #[test]
    fn transport_matches_direct_formulas(mu in lsubset_strategy(12), ti in 0usize..10, pick in any::<u16>(), raw in prop::collection::vec(any::<u8>(), 12)) {
        let t = group_pool()[ti].clone();
        let all = GroupHomomorphism::all(mu.group(), &t);
        let f = &all[pick as usize % all.len()];
        let l = mu.lattice();
        let image = mu.transport(f, Direction::Image).unwrap();
        for y in t.elements() {
            let expected = l.sup(mu.group().elements().filter(|&x| f.apply(x) == y).map(|x| mu.value(x)));
            prop_assert_eq!(image.value(y), expected);
        }
        let nu = LSubset::new(t.clone(), l.clone(), (0..t.order()).map(|i| LatticeElement::new(raw[i] as usize % l.size())).collect()).unwrap();
        let pre = nu.transport(f, Direction::Preimage).unwrap();
        for x in mu.group().elements() {
            prop_assert_eq!(pre.value(x), nu.value(f.apply(x)));
        }
        prop_assert_eq!(image.is_subset_of(&nu).unwrap(), mu.is_subset_of(&pre).unwrap());
    }
}

// ---------- L-subgroups ----------

proptest! {
    #![proptest_config(config())]

    #[test]
    fn lsubgroup_predicates_match_oracles(mu in lsubset_strategy(12)) {
        let expected = lsubgroup_oracle(&mu);
        prop_assert_eq!(expected, levels_oracle(&mu));
        prop_assert_eq!(lgroup::is_lsubgroup(&mu, Mode::Pointwise).unwrap().verdict, expected);
        prop_assert_eq!(lgroup::is_lsubgroup(&mu, Mode::Levels).unwrap().verdict, expected);
        if mu.lattice().is_chain() {
            prop_assert_eq!(lgroup::is_lsubgroup(&mu, Mode::StrongLevels).unwrap().verdict, expected);
        }
    }

    #[test]
    fn generation_is_a_closure_operator(eta in distributive_lsubset(12), raw in prop::collection::vec(any::<u8>(), 12)) {
        let l = eta.lattice().clone();
        let other = LSubset::new(eta.group().clone(), l.clone(),
            (0..eta.group().order()).map(|i| LatticeElement::new(raw[i] as usize % l.size())).collect()).unwrap();
        let theta = eta.union(&other).unwrap();
        let g = lgroup::generate(&eta);
        prop_assert!(lsubgroup_oracle(&g));
        prop_assert!(eta.is_subset_of(&g).unwrap());
        prop_assert!(g.is_subset_of(&lgroup::generate(&theta)).unwrap());
        prop_assert_eq!(lgroup::generate(&g), g);
    }

    #[test]
    fn normalizer_is_characterized_by_commuting_points(mu in lsubgroup_strategy(12), raw in prop::collection::vec(any::<u8>(), 12)) {
        let eta = lgroup::generate(&below(&mu, &raw)).intersection(&mu).unwrap();
        prop_assume!(lsubgroup_oracle(&eta));
        let n = lgroup::normalizer(&eta, &mu).unwrap();
        let (g, l) = (mu.group(), mu.lattice());
        for x in g.elements() {
            for a in l.down_set(mu.value(x)) {
                let p = LSubset::point(g, l, LPoint::new(a, x));
                let ap: Vec<LatticeElement> = set_product_oracle(&p, &eta);
                let pa: Vec<LatticeElement> = set_product_oracle(&eta, &p);
                prop_assert_eq!(ap == pa, l.leq(a, n.value(x)));
            }
        }
        prop_assert!(lgroup::is_normal(&eta, &n).unwrap());
        prop_assert_eq!(n == mu, lgroup::is_normal(&eta, &mu).unwrap());
    }

    #[test]
    fn chains_descend(mu in lsubgroup_strategy(12), raw in prop::collection::vec(any::<u8>(), 12)) {
        let eta = lgroup::generate(&below(&mu, &raw));
        let chain = lgroup::central_chain(&mu).unwrap();
        for w in chain.stages.windows(2) {
            prop_assert!(w[1].is_subset_of(&w[0]).unwrap());
        }
        let series = lgroup::closure_series(&eta, &mu, lgroup::default_max_steps(&mu)).unwrap();
        for w in series.stages.windows(2) {
            prop_assert!(w[1].is_subset_of(&w[0]).unwrap());
        }
        for s in &series.stages {
            prop_assert!(eta.is_subset_of(s).unwrap());
        }
    }
}

// ---------- enumeration, maximal and Frattini L-subgroups ----------

proptest! {
    #![proptest_config(config())]

    #[test]
    fn box_enumeration_is_complete_and_exact(hi in lsubset_strategy(8).prop_filter("bounded", bounded), raw in prop::collection::vec(any::<u8>(), 12)) {
        let lo = below(&hi, &raw);
        let l = hi.lattice();
        let expected: u128 = lo.values().iter().zip(hi.values())
            .map(|(&a, &b)| l.iter().filter(|&c| l.leq(a, c) && l.leq(c, b)).count() as u128).product();
        let all = maxfrat::enumerate_box(&lo, &hi, BoxFilter::None, Budget::default()).unwrap();
        prop_assert!(all.complete);
        prop_assert_eq!(all.members.len() as u128, expected);
        let filtered = maxfrat::enumerate_box(&lo, &hi, BoxFilter::LSubgroup, Budget::default()).unwrap();
        let oracle: Vec<LSubset> = all.members.iter().filter(|t| lsubgroup_oracle(t)).cloned().collect();
        prop_assert_eq!(filtered.members, oracle);
    }

    #[test]
    fn maximal_and_frattini_match_the_poset(mu in lsubgroup_strategy(8).prop_filter("bounded", bounded)) {
        let members = maxfrat::all_lsubgroups(&mu, Budget::default()).unwrap();
        let strictly_below = |a: &LSubset, b: &LSubset| a != b && a.is_subset_of(b).unwrap();
        let coatoms: Vec<&LSubset> = members.iter()
            .filter(|m| strictly_below(m, &mu) && !members.iter().any(|t| strictly_below(m, t) && strictly_below(t, &mu)))
            .collect();
        let expected: Vec<&LSubset> = coatoms.iter().copied().filter(|m| !m.is_constant()).collect();
        let found = maxfrat::all_maximal(&mu, Budget::default()).unwrap();
        prop_assert_eq!(found.iter().collect::<Vec<_>>(), expected.clone());
        let phi = expected.iter().fold(mu.clone(), |acc, m| acc.intersection(m).unwrap());
        let report = maxfrat::frattini(&mu, Budget::default(), Via::Enumeration).unwrap();
        prop_assert_eq!(report.value(), &phi);
    }
}

// ---------- verification runner ----------

#[test]
fn violations_replay_bit_for_bit() {
    let report = verify::run_suite("gen_hom", 3, 60, Budget::default()).unwrap();
    assert!(!report.violations.is_empty());
    for v in &report.violations {
        let again = verify::replay("gen_hom", 3, v.case, Budget::default())
            .unwrap()
            .expect("reproduces");
        assert_eq!(&again, v);
    }
}

#[test]
fn reports_do_not_depend_on_threads() {
    for id in ["frat_lambda", "normalizer", "zrn"] {
        let a = verify::run_suite(
            id,
            9,
            40,
            Budget {
                threads: 1,
                ..Budget::default()
            },
        )
        .unwrap();
        let b = verify::run_suite(
            id,
            9,
            40,
            Budget {
                threads: 3,
                ..Budget::default()
            },
        )
        .unwrap();
        assert_eq!(
            verify::VerificationReport { elapsed_ms: 0, ..a },
            verify::VerificationReport { elapsed_ms: 0, ..b },
            "{id}"
        );
    }
}
