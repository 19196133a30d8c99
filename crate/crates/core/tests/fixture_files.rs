use std::path::PathBuf;

use lgl_core::fixtures;
use lgl_core::io::Loader;
use lgl_core::lgroup;
use lgl_core::LSubset;

fn loader() -> Loader {
    Loader::new(Some(
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures"),
    ))
}

fn same(file: &LSubset, builtin: &LSubset) {
    assert_eq!(file.group().order(), builtin.group().order());
    assert_eq!(file.lattice().size(), builtin.lattice().size());
    let mut a = file.describe();
    let mut b = builtin.describe();
    a.sort();
    b.sort();
    assert_eq!(a, b);
}

#[test]
fn group_files_match_builtins() {
    let loader = loader();
    for (file, name) in [
        ("z1.json", "Z1"),
        ("z2.json", "Z2"),
        ("z3.json", "Z3"),
        ("z4.json", "Z4"),
        ("z6.json", "Z6"),
        ("v4.json", "V4"),
        ("s3.json", "S3"),
        ("d8.json", "D8"),
        ("q8.json", "Q8"),
        ("a4.json", "A4"),
        ("d12.json", "D12"),
        ("s4.json", "S4"),
    ] {
        let g = loader.group(file, None).unwrap();
        let builtin = fixtures::group(name).unwrap();
        assert_eq!(g.order(), builtin.order(), "{file}");
        assert_eq!(
            g.all_subgroups().unwrap().len(),
            builtin.all_subgroups().unwrap().len(),
            "{file}"
        );
        let abelian = |h: &lgl_core::FiniteGroup| {
            h.elements()
                .all(|x| h.elements().all(|y| h.mul(x, y) == h.mul(y, x)))
        };
        assert_eq!(abelian(&g), abelian(&builtin), "{file}");
    }
}

#[test]
fn lattice_files_match_builtins() {
    let loader = loader();
    for (file, builtin) in [
        ("chain2.json", fixtures::chain(2)),
        ("chain3.json", fixtures::chain(3)),
        ("chain4.json", fixtures::chain(4)),
        ("l3.json", fixtures::l3()),
        ("b2.json", fixtures::b2()),
        ("m3.json", fixtures::m3()),
        ("s4_values.json", fixtures::s4_lattice()),
    ] {
        let l = loader.lattice(file, None).unwrap();
        assert_eq!(*l, *builtin, "{file}");
    }
}

#[test]
fn d8_files_match_builtins() {
    let loader = loader();
    same(&loader.lsubset("d8_mu.json").unwrap(), &fixtures::d8_mu());
    same(&loader.lsubset("d8_eta.json").unwrap(), &fixtures::d8_eta());
}

#[test]
fn s4_files_match_builtins() {
    let loader = loader();
    let (g, l) = (fixtures::s4(), fixtures::s4_lattice());
    let mu = loader.lsubset("s4_mu.json").unwrap();
    let eta = loader.lsubset("s4_eta.json").unwrap();
    same(&mu, &fixtures::s4_mu(&g, &l).unwrap());
    same(&eta, &fixtures::s4_eta(&g, &l).unwrap());
    assert_eq!(lgroup::nilpotency_class(&mu).unwrap(), Some(2));
    assert!(lgroup::is_normal(&eta, &mu).unwrap());
}

#[test]
fn constant_files_are_constant() {
    let loader = loader();
    for file in ["s3_one.json", "z4_one.json"] {
        let mu = loader.lsubset(file).unwrap();
        assert_eq!(mu.tip(), mu.tail(), "{file}");
    }
}
