use rand::Rng;

use super::instances::{box_size, hom_json, Draw, Lattices, PoolGroup, MAX_BOX};
use super::{Suite, Verdict};
use crate::error::Result;
use crate::group::{Direction, GroupElement, Subgroup};
use crate::lgroup::{
    central_chain, closure_series, default_max_steps, generate, generated, is_lsubgroup,
    is_lsubgroup_fast, is_lsubgroup_of, is_lsubgroup_of_levels, is_normal, is_normal_in_group,
    is_normal_in_group_levels, is_normal_levels, is_proper, nilpotency_class, normal_closure,
    normalizer, normalizer_chain, trivial_lsubgroup, Mode,
};
use crate::lset::{LPoint, LSubset};
use crate::maxfrat::{
    all_lsubgroups, all_maximal, chain_report, enumerate_box, frattini, greedy_points, is_maximal,
    maximal_condition_report, maximal_containing, zorn_witness, BoxFilter, Budget, Via,
};

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Ok(Verdict::Violated(format!($($msg)+)));
        }
    };
}

macro_rules! suite {
    ($id:literal, $result:literal, $description:literal, $check:path) => {
        Suite {
            id: $id,
            result: $result,
            description: $description,
            check: $check,
        }
    };
}

pub(super) static REGISTRY: &[Suite] = &[
    suite!(
        "lev_gp",
        "Theorem lev_gp",
        "pointwise and level-set L-subgroup tests agree",
        lev_gp
    ),
    suite!(
        "lev_sgp",
        "Theorem lev_sgp",
        "relative level and strong-level L-subgroup tests agree",
        lev_sgp
    ),
    suite!(
        "lev_norgp",
        "Theorem lev_norgp",
        "normality in G agrees with normal level sets",
        lev_norgp
    ),
    suite!(
        "lev_norsgp",
        "Theorem lev_norsgp",
        "normality in an L-subgroup agrees with level normality",
        lev_norsgp
    ),
    suite!(
        "hom",
        "Proposition hom",
        "image and preimage laws for maps",
        hom
    ),
    suite!(
        "hom_gp",
        "Theorem hom_gp",
        "images and preimages of L-subgroups are L-subgroups",
        hom_gp
    ),
    suite!(
        "set_product_assoc",
        "Set product associativity",
        "set product is associative",
        set_product_assoc
    ),
    suite!(
        "levels",
        "Level sets",
        "levels are antitone and recover the values",
        levels
    ),
    suite!(
        "sup_prop",
        "Sup-property",
        "fast sup-property test agrees with subset enumeration",
        sup_prop
    ),
    suite!(
        "gen",
        "Theorem gen",
        "generation is a closure operator equal to the meet of containing L-subgroups",
        gen
    ),
    suite!(
        "gen_sup",
        "Theorem gen_sup",
        "generation commutes with levels under the sup-property",
        gen_sup
    ),
    suite!(
        "gen_hom",
        "Theorem gen_hom",
        "generation commutes with images and preimages",
        gen_hom
    ),
    suite!(
        "lpt_norm",
        "Lemma lpt_norm",
        "conjugation-closed L-points lie in the normalizer",
        lpt_norm
    ),
    suite!(
        "normalizer",
        "Normalizer",
        "normalizer is the largest L-subgroup normalizing η",
        normalizer_suite
    ),
    suite!(
        "chain_descent",
        "Central chain",
        "central chains and closure series descend",
        chain_descent
    ),
    suite!(
        "subnormal",
        "Lemma subnormal",
        "normalizer chains reach μ within the nilpotency class",
        subnormal
    ),
    suite!(
        "nor_nc",
        "Theorem nor_nc",
        "η is normal exactly when it equals its normal closure",
        nor_nc
    ),
    suite!(
        "normal_closure",
        "Normal closure",
        "normal closure is the least normal L-subgroup containing η",
        normal_closure_suite
    ),
    suite!(
        "int_nor",
        "Proposition int_nor",
        "η ∩ θ is normal in θ for normal η",
        int_nor
    ),
    suite!(
        "chain_nc",
        "Lemma chain_nc",
        "subnormal chains exist exactly when the closure series reaches η",
        chain_nc
    ),
    suite!(
        "nil_max",
        "Theorem nil_max",
        "maximal L-subgroups of a nilpotent μ with its tip and tail are normal",
        nil_max
    ),
    suite!(
        "box_enum",
        "Box enumeration",
        "box enumeration is complete and its filters are exact",
        box_enum
    ),
    suite!(
        "mcon_subgp",
        "Theorem mcon_subgp",
        "L-subgroup posets of members sit inside that of μ",
        mcon_subgp
    ),
    suite!(
        "max_fin",
        "Theorem max_fin",
        "every L-subgroup of μ is finitely generated",
        max_fin
    ),
    suite!(
        "union_subgp",
        "Lemma union_subgp",
        "unions of chains of L-subgroups over a chain are L-subgroups",
        union_subgp
    ),
    suite!(
        "fgen_chain",
        "Lemma fgen_chain",
        "ascending chains with union μ end at μ",
        fgen_chain
    ),
    suite!(
        "char_fg",
        "Theorem: characteristic functions",
        "1_H is generated by 1_x for generators x of H and conversely",
        char_fg
    ),
    suite!(
        "frat_lambda",
        "Theorem frat",
        "λ is an L-subgroup inside Φ(μ), equal to it over a chain",
        frat_lambda
    ),
    suite!(
        "fra_nor",
        "Theorem fra_nor",
        "Φ(μ) is normal in μ for normal μ over a chain",
        fra_nor
    ),
    suite!(
        "fg_max",
        "Theorem: existence of maximal L-subgroups",
        "non-trivial μ over a chain has a maximal L-subgroup",
        fg_max
    ),
    suite!(
        "fgn_frat",
        "Theorem fgn_frat",
        "η ∘ Φ(μ) = μ forces η = μ",
        fgn_frat
    ),
    suite!(
        "zrn",
        "Lemma zrn",
        "Zorn witnesses avoid the point and are maximal doing so",
        zrn
    ),
    suite!(
        "max_prp",
        "Theorem max_prp",
        "every proper L-subgroup lies in a certified maximal one",
        max_prp
    ),
    suite!(
        "prp_pro",
        "Lemma prp_pro",
        "η ⊆ Φ(μ) exactly when no proper θ has η ∘ θ = μ",
        prp_pro
    ),
    suite!(
        "int_pro",
        "Lemma int_pro",
        "η ∩ (θ ∘ σ) = (η ∩ θ) ∘ σ for σ ⊆ η",
        int_pro
    ),
    suite!(
        "phi_sub",
        "Theorem: Frattini descent",
        "normal σ inside Φ(η) lies inside Φ(μ)",
        phi_sub
    ),
];

fn subset(a: &LSubset, b: &LSubset) -> Result<bool> {
    a.is_subset_of(b)
}

fn draw_lsubgroup<'a>(d: &mut Draw<'a>, class: Lattices) -> (&'a PoolGroup, LSubset) {
    let pg = d.group(12, false);
    let l = d.lattice(class);
    let mu = d.lsubgroup(pg, &l);
    d.record_lsubset("mu", &mu);
    (pg, mu)
}

fn draw_bounded<'a>(
    d: &mut Draw<'a>,
    class: Lattices,
    nilpotent_only: bool,
) -> (&'a PoolGroup, LSubset) {
    let (pg, mu) = d.bounded_lsubgroup(class, nilpotent_only);
    d.record_lsubset("mu", &mu);
    (pg, mu)
}

/// Redraws up to eight times until `accept` holds; the last draw is kept.
fn draw_bounded_until<'a>(
    d: &mut Draw<'a>,
    class: Lattices,
    nilpotent_only: bool,
    accept: impl Fn(&LSubset) -> bool,
) -> (&'a PoolGroup, LSubset) {
    let mut drawn = d.bounded_lsubgroup(class, nilpotent_only);
    for _ in 0..8 {
        if accept(&drawn.1) {
            break;
        }
        drawn = d.bounded_lsubgroup(class, nilpotent_only);
    }
    d.record_lsubset("mu", &drawn.1);
    drawn
}

fn lev_gp(d: &mut Draw, _: Budget) -> Result<Verdict> {
    let pg = d.group(12, false);
    let l = d.lattice(Lattices::Any);
    let mu = d.lsubset(pg, &l);
    d.record_lsubset("mu", &mu);
    let p = is_lsubgroup(&mu, Mode::Pointwise)?;
    let v = is_lsubgroup(&mu, Mode::Levels)?;
    ensure!(
        p.verdict == v.verdict,
        "pointwise {} but levels {}",
        p.verdict,
        v.verdict
    );
    ensure!(p.recheck() && v.recheck(), "a witness does not recheck");
    Ok(Verdict::Holds)
}

fn lev_sgp(d: &mut Draw, _: Budget) -> Result<Verdict> {
    let (pg, mu) = draw_lsubgroup(d, Lattices::Any);
    let eta = if d.chance(0.5) {
        d.lsubset_of(&mu)
    } else {
        let eta = d.lsubgroup_of(pg, &mu);
        let x = GroupElement::new(d.rng.gen_range(0..pg.group.order()));
        let a = d.below(mu.lattice(), mu.value(x));
        eta.with_value(x, a)
    };
    d.record_lsubset("eta", &eta);
    let pointwise = is_lsubgroup_of(&eta, &mu)?;
    let levels = is_lsubgroup_of_levels(&eta, &mu, false)?;
    ensure!(
        pointwise == levels,
        "pointwise {pointwise} but levels {levels}"
    );
    if mu.lattice().is_chain() {
        let strong = is_lsubgroup_of_levels(&eta, &mu, true)?;
        ensure!(
            pointwise == strong,
            "pointwise {pointwise} but strong levels {strong}"
        );
        let absolute = is_lsubgroup(&eta, Mode::StrongLevels)?.verdict;
        ensure!(
            absolute == is_lsubgroup_fast(&eta),
            "absolute strong-level test disagrees"
        );
    }
    Ok(Verdict::Holds)
}

fn lev_norgp(d: &mut Draw, _: Budget) -> Result<Verdict> {
    let pg = d.group(12, false);
    let l = d.lattice(Lattices::Any);
    let mu = if d.chance(0.5) {
        d.chain_lsubgroup(pg, &l, true)
    } else {
        d.lsubgroup(pg, &l)
    };
    d.record_lsubset("mu", &mu);
    let direct = is_normal_in_group(&mu);
    let levels = is_normal_in_group_levels(&mu);
    ensure!(direct == levels, "direct {direct} but levels {levels}");
    Ok(Verdict::Holds)
}

fn lev_norsgp(d: &mut Draw, _: Budget) -> Result<Verdict> {
    let (pg, mu) = draw_lsubgroup(d, Lattices::Any);
    let eta = if d.chance(0.5) {
        d.normal_of(pg, &mu)
    } else {
        d.lsubgroup_of(pg, &mu)
    };
    d.record_lsubset("eta", &eta);
    let direct = is_normal(&eta, &mu)?;
    let levels = is_normal_levels(&eta, &mu)?;
    ensure!(direct == levels, "direct {direct} but levels {levels}");
    Ok(Verdict::Holds)
}

fn hom(d: &mut Draw, _: Budget) -> Result<Verdict> {
    let (src, tgt) = (d.group(12, false), d.group(12, false));
    let f = d.homomorphism(src, tgt);
    d.record("f", hom_json(&f));
    let l = d.lattice(Lattices::Any);
    let (m1, m2, nu) = (d.lsubset(src, &l), d.lsubset(src, &l), d.lsubset(tgt, &l));
    d.record_lsubset("mu1", &m1);
    d.record_lsubset("mu2", &m2);
    d.record_lsubset("nu", &nu);
    let img = |m: &LSubset| m.transport(&f, Direction::Image);
    let pre = |m: &LSubset| m.transport(&f, Direction::Preimage);
    ensure!(
        img(&m1.union(&m2)?)? == img(&m1)?.union(&img(&m2)?)?,
        "image of a union"
    );
    ensure!(
        subset(
            &img(&m1.intersection(&m2)?)?,
            &img(&m1)?.intersection(&img(&m2)?)?
        )?,
        "image of an intersection"
    );
    let back = pre(&img(&m1)?)?;
    ensure!(subset(&m1, &back)?, "μ ⊄ f⁻¹(f(μ))");
    if f.is_injective() {
        ensure!(back == m1, "f⁻¹(f(μ)) ≠ μ for injective f");
    }
    let forth = img(&pre(&nu)?)?;
    ensure!(subset(&forth, &nu)?, "f(f⁻¹(ν)) ⊄ ν");
    if f.is_surjective() {
        ensure!(forth == nu, "f(f⁻¹(ν)) ≠ ν for surjective f");
    }
    ensure!(
        subset(&img(&m1)?, &nu)? == subset(&m1, &pre(&nu)?)?,
        "adjunction fails"
    );
    Ok(Verdict::Holds)
}

fn hom_gp(d: &mut Draw, _: Budget) -> Result<Verdict> {
    let (src, tgt) = (d.group(12, false), d.group(12, false));
    let f = d.homomorphism(src, tgt);
    d.record("f", hom_json(&f));
    let l = d.lattice(Lattices::Distributive);
    let (mu, nu) = (d.lsubgroup(src, &l), d.lsubgroup(tgt, &l));
    d.record_lsubset("mu", &mu);
    d.record_lsubset("nu", &nu);
    ensure!(
        is_lsubgroup_fast(&mu.transport(&f, Direction::Image)?),
        "f(μ) is not an L-subgroup"
    );
    ensure!(
        is_lsubgroup_fast(&nu.transport(&f, Direction::Preimage)?),
        "f⁻¹(ν) is not an L-subgroup"
    );
    Ok(Verdict::Holds)
}

fn set_product_assoc(d: &mut Draw, _: Budget) -> Result<Verdict> {
    let pg = d.group(12, false);
    let l = d.lattice(Lattices::Distributive);
    let (a, b, c) = (d.lsubset(pg, &l), d.lsubset(pg, &l), d.lsubset(pg, &l));
    d.record_lsubset("mu", &a);
    d.record_lsubset("eta", &b);
    d.record_lsubset("theta", &c);
    ensure!(
        a.set_product(&b)?.set_product(&c)? == a.set_product(&b.set_product(&c)?)?,
        "(μ∘η)∘θ ≠ μ∘(η∘θ)"
    );
    Ok(Verdict::Holds)
}

fn levels(d: &mut Draw, _: Budget) -> Result<Verdict> {
    let pg = d.group(12, false);
    let l = d.lattice(Lattices::Any);
    let mu = d.lsubset(pg, &l);
    d.record_lsubset("mu", &mu);
    for a in l.iter() {
        let la = mu.level(a, false);
        ensure!(
            mu.level(a, true).is_subset(&la),
            "strong level above weak level at {}",
            l.label(a)
        );
        for b in l.iter().filter(|&b| l.leq(a, b)) {
            ensure!(
                mu.level(b, false).is_subset(&la),
                "levels not antitone at {} ≤ {}",
                l.label(a),
                l.label(b)
            );
        }
    }
    for x in pg.group.elements() {
        let rebuilt = l.sup(l.iter().filter(|&a| mu.level(a, false).contains(x.index())));
        ensure!(
            rebuilt == mu.value(x),
            "value at {} not recovered",
            x.index()
        );
    }
    Ok(Verdict::Holds)
}

fn sup_prop(d: &mut Draw, _: Budget) -> Result<Verdict> {
    let pg = d.group(12, false);
    let l = d.lattice(Lattices::Any);
    let mu = d.lsubset(pg, &l);
    d.record_lsubset("mu", &mu);
    let image = mu.image();
    let brute = (1u32..1 << image.len()).all(|mask| {
        let chosen: Vec<_> = (0..image.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| image[i])
            .collect();
        chosen.contains(&l.sup(chosen.iter().copied()))
    });
    ensure!(
        brute == mu.has_sup_property(),
        "subset enumeration says {brute}"
    );
    Ok(Verdict::Holds)
}

fn gen(d: &mut Draw, budget: Budget) -> Result<Verdict> {
    let small = d.chance(0.5);
    let pg = d.group(if small { 8 } else { 12 }, false);
    let l = d.lattice(if small {
        Lattices::Small
    } else {
        Lattices::Distributive
    });
    let mu = d.lsubgroup(pg, &l);
    let eta = d.lsubset_of(&mu);
    let theta = eta.union(&d.lsubset_of(&mu))?;
    d.record_lsubset("mu", &mu);
    d.record_lsubset("eta", &eta);
    d.record_lsubset("theta", &theta);
    let g = generated(&eta, &mu)?;
    ensure!(is_lsubgroup_of(&g, &mu)?, "⟨η⟩ ∉ L(μ)");
    ensure!(subset(&eta, &g)?, "η ⊄ ⟨η⟩");
    ensure!(
        subset(&g, &generated(&theta, &mu)?)?,
        "generation is not monotone"
    );
    ensure!(generate(&g) == g, "generation is not idempotent");
    if small {
        let oracle = all_lsubgroups(&mu, budget)?
            .iter()
            .filter(|t| eta.le_unchecked(t))
            .fold(mu.clone(), |acc, t| {
                acc.intersection(t).expect("same carrier")
            });
        ensure!(
            oracle == g,
            "⟨η⟩ differs from the meet of containing L-subgroups"
        );
    }
    Ok(Verdict::Holds)
}

fn gen_sup(d: &mut Draw, _: Budget) -> Result<Verdict> {
    let (_, mu) = draw_lsubgroup(d, Lattices::Distributive);
    let eta = d.lsubset_of(&mu);
    d.record_lsubset("eta", &eta);
    if !eta.has_sup_property() {
        return Ok(Verdict::Vacuous);
    }
    let (g, l) = (mu.group(), mu.lattice());
    let closed = generated(&eta, &mu)?;
    for b in l.down_set(eta.tip()) {
        let crisp = g.generated_subgroup(&eta.level(b, false));
        ensure!(
            *crisp.members() == closed.level(b, false),
            "⟨η_b⟩ ≠ ⟨η⟩_b at b = {}",
            l.label(b)
        );
    }
    Ok(Verdict::Holds)
}

fn gen_hom(d: &mut Draw, _: Budget) -> Result<Verdict> {
    let (src, tgt) = (d.group(12, false), d.group(12, false));
    let f = d.homomorphism(src, tgt);
    d.record("f", hom_json(&f));
    let l = d.lattice(Lattices::Distributive);
    let mu = d.lsubgroup(src, &l);
    let eta = d.lsubset_of(&mu);
    let nu = d.lsubgroup(tgt, &l);
    let theta = d.lsubset_of(&nu);
    d.record_lsubset("eta", &eta);
    d.record_lsubset("theta", &theta);
    let forward = generate(&eta.transport(&f, Direction::Image)?);
    ensure!(
        forward == generate(&eta).transport(&f, Direction::Image)?,
        "⟨f(η)⟩ ≠ f(⟨η⟩)"
    );
    let backward = generate(&theta.transport(&f, Direction::Preimage)?);
    ensure!(
        backward == generate(&theta).transport(&f, Direction::Preimage)?,
        "⟨f⁻¹(θ)⟩ ≠ f⁻¹(⟨θ⟩) (f surjective: {})",
        f.is_surjective()
    );
    Ok(Verdict::Holds)
}

fn lpt_norm(d: &mut Draw, _: Budget) -> Result<Verdict> {
    let (pg, mu) = draw_lsubgroup(d, Lattices::Distributive);
    let eta = d.lsubgroup_of(pg, &mu);
    let n = normalizer(&eta, &mu)?;
    let theta = if d.chance(0.5) {
        d.lsubgroup_of(pg, &mu)
    } else {
        d.lsubgroup_of(pg, &n)
    };
    d.record_lsubset("eta", &eta);
    d.record_lsubset("theta", &theta);
    let (g, l) = (mu.group(), mu.lattice());
    // Smaller points give smaller products, so the largest ones decide.
    for x in g.elements() {
        let ax = LSubset::point(g, l, LPoint::new(theta.value(x), x));
        let ax_inv = LSubset::point(g, l, LPoint::new(theta.value(x), g.inv(x)));
        for y in g.elements() {
            let by = LSubset::point(g, l, LPoint::new(eta.value(y), y));
            if !subset(&ax.set_product(&by)?.set_product(&ax_inv)?, &eta)? {
                return Ok(Verdict::Vacuous);
            }
        }
    }
    ensure!(subset(&theta, &n)?, "θ ⊄ N(η)");
    Ok(Verdict::Holds)
}

fn normalizer_suite(d: &mut Draw, budget: Budget) -> Result<Verdict> {
    let (pg, mu) = draw_lsubgroup(d, Lattices::Distributive);
    let eta = if d.chance(0.5) {
        d.normal_of(pg, &mu)
    } else {
        d.lsubgroup_of(pg, &mu)
    };
    d.record_lsubset("eta", &eta);
    let n = normalizer(&eta, &mu)?;
    ensure!(is_lsubgroup_of(&n, &mu)?, "N(η) ∉ L(μ)");
    ensure!(subset(&eta, &n)?, "η ⊄ N(η)");
    ensure!(is_normal(&eta, &n)?, "η is not normal in N(η)");
    ensure!(
        (n == mu) == is_normal(&eta, &mu)?,
        "N(η) = μ disagrees with η ∈ NL(μ)"
    );
    let (g, l) = (mu.group(), mu.lattice());
    for x in g.elements() {
        for a in l.down_set(mu.value(x)) {
            let p = LSubset::point(g, l, LPoint::new(a, x));
            let commutes = p.set_product(&eta)? == eta.set_product(&p)?;
            ensure!(
                commutes == l.leq(a, n.value(x)),
                "point {}@{} misplaced",
                l.label(a),
                x.index()
            );
        }
    }
    if box_size(&mu) <= MAX_BOX {
        for theta in enumerate_box(&eta, &mu, BoxFilter::LSubgroup, budget)?
            .certified()?
            .members
        {
            if is_normal(&eta, &theta)? {
                ensure!(
                    subset(&theta, &n)?,
                    "an L-subgroup normalizing η escapes N(η)"
                );
            }
        }
    }
    Ok(Verdict::Holds)
}

fn chain_descent(d: &mut Draw, _: Budget) -> Result<Verdict> {
    let (pg, mu) = draw_lsubgroup(d, Lattices::Distributive);
    let eta = d.lsubgroup_of(pg, &mu);
    d.record_lsubset("eta", &eta);
    let chain = central_chain(&mu)?;
    for w in chain.stages.windows(2) {
        ensure!(subset(&w[1], &w[0])?, "central chain ascends");
        ensure!(is_lsubgroup_of(&w[1], &mu)?, "central stage ∉ L(μ)");
    }
    let series = closure_series(&eta, &mu, default_max_steps(&mu))?;
    for w in series.stages.windows(2) {
        ensure!(subset(&w[1], &w[0])?, "closure series ascends");
    }
    for s in &series.stages {
        ensure!(subset(&eta, s)?, "a closure stage misses η");
    }
    Ok(Verdict::Holds)
}

/// Same tip and tail as `μ`: `η ∨ tail(μ)` with the tip restored at `e`.
fn same_tip_tail(d: &mut Draw, pg: &PoolGroup, mu: &LSubset) -> Result<LSubset> {
    let eta = d.lsubgroup_of(pg, mu);
    let tail = LSubset::constant(mu.group(), mu.lattice(), mu.tail());
    Ok(eta
        .union(&tail)?
        .with_value(mu.group().identity(), mu.tip()))
}

fn draw_nilpotent_until<'a>(
    d: &mut Draw<'a>,
    accept: impl Fn(&LSubset) -> bool,
) -> (&'a PoolGroup, LSubset) {
    let mut drawn = None;
    for _ in 0..8 {
        let pg = d.group(12, true);
        let l = d.lattice(Lattices::Distributive);
        let mu = d.lsubgroup(pg, &l);
        let done = accept(&mu);
        drawn = Some((pg, mu));
        if done {
            break;
        }
    }
    let drawn = drawn.expect("at least one draw");
    d.record_lsubset("mu", &drawn.1);
    drawn
}

fn subnormal(d: &mut Draw, _: Budget) -> Result<Verdict> {
    let (pg, mu) = draw_nilpotent_until(d, |m| {
        m.tip() != m.tail() && matches!(nilpotency_class(m), Ok(Some(_)))
    });
    if mu.tip() == mu.tail() {
        return Ok(Verdict::Vacuous);
    }
    let Some(class) = nilpotency_class(&mu)? else {
        return Ok(Verdict::Vacuous);
    };
    let eta = same_tip_tail(d, pg, &mu)?;
    d.record_lsubset("eta", &eta);
    let stages = normalizer_chain(&eta, &mu, default_max_steps(&mu))?;
    ensure!(
        *stages.last().expect("non-empty") == mu,
        "normalizer chain stops below μ"
    );
    ensure!(
        stages.len() - 1 <= class,
        "{} steps for class {class}",
        stages.len() - 1
    );
    Ok(Verdict::Holds)
}

fn nor_nc(d: &mut Draw, _: Budget) -> Result<Verdict> {
    let (pg, mu) = draw_lsubgroup(d, Lattices::Distributive);
    let eta = if d.chance(0.5) {
        d.normal_of(pg, &mu)
    } else {
        d.lsubgroup_of(pg, &mu)
    };
    d.record_lsubset("eta", &eta);
    let normal = is_normal(&eta, &mu)?;
    ensure!(
        normal == (normal_closure(&eta, &mu)? == eta),
        "normality {normal} disagrees with the closure"
    );
    Ok(Verdict::Holds)
}

fn normal_closure_suite(d: &mut Draw, budget: Budget) -> Result<Verdict> {
    let (pg, mu) = draw_bounded(d, Lattices::Distributive, false);
    let eta = d.lsubgroup_of(pg, &mu);
    d.record_lsubset("eta", &eta);
    let c = normal_closure(&eta, &mu)?;
    ensure!(is_lsubgroup_of(&c, &mu)?, "η^μ ∉ L(μ)");
    ensure!(subset(&eta, &c)?, "η ⊄ η^μ");
    ensure!(is_normal(&c, &mu)?, "η^μ is not normal in μ");
    let oracle = enumerate_box(&eta, &mu, BoxFilter::LSubgroup, budget)?
        .certified()?
        .members
        .iter()
        .filter(|t| is_normal(t, &mu).unwrap_or(false))
        .fold(mu.clone(), |acc, t| {
            acc.intersection(t).expect("same carrier")
        });
    ensure!(
        oracle == c,
        "η^μ is not the least normal L-subgroup containing η"
    );
    let series = closure_series(&eta, &mu, default_max_steps(&mu))?;
    for w in series.stages.windows(2) {
        ensure!(
            is_normal(&w[1], &w[0])?,
            "a closure stage is not normal in its predecessor"
        );
    }
    Ok(Verdict::Holds)
}

fn int_nor(d: &mut Draw, _: Budget) -> Result<Verdict> {
    let (pg, mu) = draw_lsubgroup(d, Lattices::Distributive);
    let eta = d.normal_of(pg, &mu);
    let theta = d.lsubgroup_of(pg, &mu);
    d.record_lsubset("eta", &eta);
    d.record_lsubset("theta", &theta);
    ensure!(
        is_normal(&eta.intersection(&theta)?, &theta)?,
        "η ∩ θ is not normal in θ"
    );
    Ok(Verdict::Holds)
}

fn chain_nc(d: &mut Draw, budget: Budget) -> Result<Verdict> {
    let (_, mu) = draw_bounded(d, Lattices::Distributive, false);
    let members = all_lsubgroups(&mu, budget)?;
    let eta = d.pick(&members).clone();
    d.record_lsubset("eta", &eta);
    let above: Vec<&LSubset> = members.iter().filter(|t| eta.le_unchecked(t)).collect();
    let mut reached = vec![false; above.len()];
    let mut frontier: Vec<usize> = above.iter().position(|t| **t == eta).into_iter().collect();
    for &i in &frontier {
        reached[i] = true;
    }
    while let Some(i) = frontier.pop() {
        for j in 0..above.len() {
            if !reached[j] && above[i].le_unchecked(above[j]) && is_normal(above[i], above[j])? {
                reached[j] = true;
                frontier.push(j);
            }
        }
    }
    let chain_exists = above.iter().zip(&reached).any(|(t, &r)| r && **t == mu);
    let series = closure_series(&eta, &mu, default_max_steps(&mu))?;
    ensure!(
        chain_exists == series.reached_eta,
        "subnormal chain {chain_exists}, closure series {}",
        series.reached_eta
    );
    Ok(Verdict::Holds)
}

fn nil_max(d: &mut Draw, budget: Budget) -> Result<Verdict> {
    let (_, mu) = draw_bounded_until(d, Lattices::Distributive, true, |m| {
        m.tip() != m.tail() && matches!(nilpotency_class(m), Ok(Some(_)))
    });
    if mu.tip() == mu.tail() || nilpotency_class(&mu)?.is_none() {
        return Ok(Verdict::Vacuous);
    }
    let mut tested = false;
    for m in all_maximal(&mu, budget)? {
        if m.tip() == mu.tip() && m.tail() == mu.tail() {
            tested = true;
            ensure!(is_normal(&m, &mu)?, "maximal {} is not normal", m);
        }
    }
    Ok(if tested {
        Verdict::Holds
    } else {
        Verdict::Vacuous
    })
}

fn box_enum(d: &mut Draw, budget: Budget) -> Result<Verdict> {
    let (_, hi) = draw_bounded(d, Lattices::Any, false);
    let lo = d.lsubset_of(&hi);
    d.record_lsubset("lo", &lo);
    let l = hi.lattice();
    let expected: u128 = lo
        .values()
        .iter()
        .zip(hi.values())
        .map(|(&a, &b)| l.interval(a, b).map(|v| v.len() as u128))
        .product::<Result<u128>>()?;
    let all = enumerate_box(&lo, &hi, BoxFilter::None, budget)?.certified()?;
    ensure!(
        all.members.len() as u128 == expected && all.box_size == expected,
        "box has {} of {expected}",
        all.members.len()
    );
    let filtered = enumerate_box(&lo, &hi, BoxFilter::LSubgroup, budget)?.certified()?;
    let oracle: Vec<LSubset> = all
        .members
        .iter()
        .filter(|t| is_lsubgroup_fast(t))
        .cloned()
        .collect();
    ensure!(
        filtered.members == oracle,
        "L-subgroup filter differs from the oracle"
    );
    let of_hi = enumerate_box(&lo, &hi, BoxFilter::LSubgroupOfHi, budget)?.certified()?;
    ensure!(
        of_hi.members == oracle,
        "L(hi) filter differs from the oracle"
    );
    let parallel = enumerate_box(
        &lo,
        &hi,
        BoxFilter::LSubgroup,
        Budget {
            threads: 0,
            ..budget
        },
    )?
    .certified()?;
    ensure!(
        parallel.members == filtered.members,
        "parallel enumeration differs"
    );
    Ok(Verdict::Holds)
}

fn mcon_subgp(d: &mut Draw, budget: Budget) -> Result<Verdict> {
    let (_, mu) = draw_bounded(d, Lattices::Distributive, false);
    let members = all_lsubgroups(&mu, budget)?;
    let whole = chain_report(&members);
    let eta = d.pick(&members).clone();
    d.record_lsubset("eta", &eta);
    let part = maximal_condition_report(&eta, budget)?;
    ensure!(
        part.count <= whole.count && part.longest_chain <= whole.longest_chain,
        "{part:?} exceeds {whole:?}"
    );
    let below: Vec<LSubset> = members
        .iter()
        .filter(|t| t.le_unchecked(&eta))
        .cloned()
        .collect();
    ensure!(
        chain_report(&below) == part,
        "L(η) differs from the members below η"
    );
    Ok(Verdict::Holds)
}

fn max_fin(d: &mut Draw, budget: Budget) -> Result<Verdict> {
    let (_, mu) = draw_bounded(d, Lattices::Distributive, false);
    for theta in all_lsubgroups(&mu, budget)? {
        let points = greedy_points(&theta);
        ensure!(
            points.iter().all(|p| p.belongs_to(&theta)),
            "a greedy point leaves {theta}"
        );
        ensure!(
            generate(&LSubset::points(mu.group(), mu.lattice(), &points)) == theta,
            "{theta} is not generated by its greedy points"
        );
    }
    Ok(Verdict::Holds)
}

/// A strictly ascending random walk through `L(μ)`.
fn ascending_walk(d: &mut Draw, members: &[LSubset]) -> Vec<LSubset> {
    let mut walk = vec![d.pick(members).clone()];
    for _ in 0..d.rng.gen_range(1..=4) {
        let last = walk.last().expect("non-empty");
        let up: Vec<&LSubset> = members
            .iter()
            .filter(|t| last.le_unchecked(t) && *t != last)
            .collect();
        if up.is_empty() {
            break;
        }
        walk.push((*d.pick(&up)).clone());
    }
    walk
}

fn union_subgp(d: &mut Draw, budget: Budget) -> Result<Verdict> {
    let (_, mu) = draw_bounded(d, Lattices::Chain, false);
    let members = all_lsubgroups(&mu, budget)?;
    let walk = ascending_walk(d, &members);
    let union = walk
        .iter()
        .skip(1)
        .try_fold(walk[0].clone(), |acc, t| acc.union(t))?;
    d.record_lsubset("union", &union);
    ensure!(is_lsubgroup_of(&union, &mu)?, "union of a chain ∉ L(μ)");
    Ok(Verdict::Holds)
}

fn fgen_chain(d: &mut Draw, budget: Budget) -> Result<Verdict> {
    let (_, mu) = draw_bounded(d, Lattices::Chain, false);
    let members = all_lsubgroups(&mu, budget)?;
    let mut walk = ascending_walk(d, &members);
    if d.chance(0.5) && *walk.last().expect("non-empty") != mu {
        walk.push(mu.clone());
    }
    let union = walk
        .iter()
        .skip(1)
        .try_fold(walk[0].clone(), |acc, t| acc.union(t))?;
    if union != mu {
        return Ok(Verdict::Vacuous);
    }
    let points = greedy_points(&mu);
    let reached = walk
        .iter()
        .position(|t| points.iter().all(|p| p.belongs_to(t)));
    ensure!(
        reached.is_some_and(|i| walk[i] == mu),
        "the chain never holds every generator"
    );
    Ok(Verdict::Holds)
}

fn generators_of(pg: &PoolGroup, h: &Subgroup) -> Vec<GroupElement> {
    let g = &pg.group;
    let mut gens = Vec::new();
    let mut current = g.trivial();
    for x in h.elements() {
        if !current.contains(x) {
            gens.push(x);
            current = g.generated_by(&gens);
        }
    }
    if gens.is_empty() {
        gens.push(g.identity());
    }
    gens
}

fn char_fg(d: &mut Draw, _: Budget) -> Result<Verdict> {
    let pg = d.group(12, false);
    let l = d.lattice(Lattices::Distributive);
    d.record("group", pg.group.name().into());
    let g = &pg.group;
    for h in &pg.subgroups {
        let target = LSubset::characteristic(g, &l, h.members());
        let gens = generators_of(pg, h);
        let tops: Vec<LPoint> = gens.iter().map(|&x| LPoint::new(l.top(), x)).collect();
        ensure!(
            generate(&LSubset::points(g, &l, &tops)) == target,
            "1_x for generators of H miss 1_H"
        );
        let points = greedy_points(&target);
        ensure!(
            points.iter().all(|p| p.value != l.bottom()),
            "a generating point is bottom-valued"
        );
        ensure!(
            generate(&LSubset::points(g, &l, &points)) == target,
            "greedy points miss 1_H"
        );
        let carriers: Vec<GroupElement> = points.iter().map(|p| p.at).collect();
        ensure!(
            g.generated_by(&carriers) == *h,
            "carriers of generating points miss H"
        );
    }
    Ok(Verdict::Holds)
}

fn frat_lambda(d: &mut Draw, budget: Budget) -> Result<Verdict> {
    let (_, mu) = draw_bounded(d, Lattices::Distributive, false);
    let report = frattini(&mu, budget, Via::Both)?;
    let (phi, lambda) = (
        report.phi.expect("both paths"),
        report.lambda.expect("both paths"),
    );
    ensure!(is_lsubgroup_of(&lambda, &mu)?, "λ ∉ L(μ)");
    ensure!(subset(&lambda, &phi)?, "λ ⊄ Φ(μ)");
    if mu.lattice().is_chain() {
        ensure!(lambda == phi, "λ = {lambda} but Φ(μ) = {phi}");
    }
    Ok(Verdict::Holds)
}

fn fra_nor(d: &mut Draw, budget: Budget) -> Result<Verdict> {
    let mu = loop {
        let pg = d.group(12, false);
        let l = d.lattice(Lattices::Chain);
        let mu = d.chain_lsubgroup(pg, &l, true);
        if box_size(&mu) <= MAX_BOX {
            break mu;
        }
    };
    d.record_lsubset("mu", &mu);
    let phi = frattini(&mu, budget, Via::Enumeration)?.value().clone();
    ensure!(is_normal(&phi, &mu)?, "Φ(μ) = {phi} is not normal in μ");
    Ok(Verdict::Holds)
}

fn fg_max(d: &mut Draw, budget: Budget) -> Result<Verdict> {
    let (_, mu) = draw_bounded_until(d, Lattices::Chain, false, |m| *m != trivial_lsubgroup(m));
    if mu == trivial_lsubgroup(&mu) {
        return Ok(Verdict::Vacuous);
    }
    ensure!(
        !all_maximal(&mu, budget)?.is_empty(),
        "no maximal L-subgroup"
    );
    Ok(Verdict::Holds)
}

fn fgn_frat(d: &mut Draw, budget: Budget) -> Result<Verdict> {
    let (_, mu) = draw_bounded(d, Lattices::Chain, false);
    let phi = frattini(&mu, budget, Via::Enumeration)?.value().clone();
    for eta in all_lsubgroups(&mu, budget)? {
        if eta.set_product(&phi)? == mu {
            ensure!(eta == mu, "{eta} ∘ Φ(μ) = μ");
        }
    }
    Ok(Verdict::Holds)
}

fn zrn(d: &mut Draw, budget: Budget) -> Result<Verdict> {
    let (_, mu) = draw_bounded(d, Lattices::Chain, false);
    let members = all_lsubgroups(&mu, budget)?;
    let theta = d.pick(&members).clone();
    let (g, l) = (mu.group(), mu.lattice());
    let outside: Vec<LPoint> = g
        .elements()
        .flat_map(|x| {
            l.down_set(mu.value(x))
                .into_iter()
                .map(move |a| LPoint::new(a, x))
        })
        .filter(|p| !p.belongs_to(&theta))
        .collect();
    d.record_lsubset("theta", &theta);
    if outside.is_empty() {
        return Ok(Verdict::Vacuous);
    }
    let p = *d.pick(&outside);
    d.record(
        "point",
        format!("{}@{}", l.label(p.value), g.display(p.at)).into(),
    );
    let w = zorn_witness(&theta, p, &mu, budget)?;
    ensure!(
        subset(&theta, &w)? && members.contains(&w),
        "witness {w} is not an L-subgroup above θ"
    );
    ensure!(!p.belongs_to(&w), "witness {w} holds the point");
    for nu in &members {
        if w.le_unchecked(nu) && *nu != w {
            ensure!(
                p.belongs_to(nu),
                "{nu} is above the witness and avoids the point"
            );
        }
    }
    Ok(Verdict::Holds)
}

fn max_prp(d: &mut Draw, budget: Budget) -> Result<Verdict> {
    let (_, mu) = draw_bounded(d, Lattices::Chain, false);
    let proper: Vec<LSubset> = all_lsubgroups(&mu, budget)?
        .into_iter()
        .filter(|t| is_proper(t, &mu).unwrap_or(false))
        .collect();
    if proper.is_empty() {
        return Ok(Verdict::Vacuous);
    }
    let eta = d.pick(&proper).clone();
    d.record_lsubset("eta", &eta);
    let found = maximal_containing(&eta, &mu, budget)?;
    ensure!(subset(&eta, &found.result)?, "result does not contain η");
    ensure!(
        is_maximal(&found.result, &mu, budget)?.verdict,
        "result {} is not maximal",
        found.result
    );
    Ok(Verdict::Holds)
}

fn prp_pro(d: &mut Draw, budget: Budget) -> Result<Verdict> {
    let (_, mu) = draw_bounded(d, Lattices::Chain, false);
    let members = all_lsubgroups(&mu, budget)?;
    let phi = frattini(&mu, budget, Via::Enumeration)?.value().clone();
    if phi.tip() != mu.tip() {
        return Ok(Verdict::Vacuous);
    }
    let proper: Vec<&LSubset> = members
        .iter()
        .filter(|t| is_proper(t, &mu).unwrap_or(false))
        .collect();
    let mut tested = false;
    for eta in &members {
        if eta.tip() != mu.tip() || !is_normal(eta, &mu)? {
            continue;
        }
        tested = true;
        let inside = subset(eta, &phi)?;
        let mut supplemented = false;
        for theta in &proper {
            if eta.set_product(theta)? == mu {
                supplemented = true;
                break;
            }
        }
        ensure!(
            inside != supplemented,
            "η = {eta}: η ⊆ Φ is {inside}, a proper supplement exists is {supplemented}"
        );
    }
    Ok(if tested {
        Verdict::Holds
    } else {
        Verdict::Vacuous
    })
}

fn int_pro(d: &mut Draw, _: Budget) -> Result<Verdict> {
    let (pg, mu) = draw_lsubgroup(d, Lattices::Distributive);
    let eta = d.lsubgroup_of(pg, &mu);
    let theta = d.lsubgroup_of(pg, &mu);
    let sigma = d.lsubgroup_of(pg, &eta);
    d.record_lsubset("eta", &eta);
    d.record_lsubset("theta", &theta);
    d.record_lsubset("sigma", &sigma);
    let lhs = eta.intersection(&theta.set_product(&sigma)?)?;
    let rhs = eta.intersection(&theta)?.set_product(&sigma)?;
    ensure!(lhs == rhs, "η ∩ (θ∘σ) = {lhs} but (η ∩ θ)∘σ = {rhs}");
    Ok(Verdict::Holds)
}

fn phi_sub(d: &mut Draw, budget: Budget) -> Result<Verdict> {
    let (_, mu) = draw_bounded(d, Lattices::Chain, false);
    let members = all_lsubgroups(&mu, budget)?;
    let phi_mu = frattini(&mu, budget, Via::Enumeration)?.value().clone();
    let tipped: Vec<&LSubset> = members.iter().filter(|t| t.tip() == mu.tip()).collect();
    let eta = (*d.pick(&tipped)).clone();
    d.record_lsubset("eta", &eta);
    let phi_eta = frattini(&eta, budget, Via::Enumeration)?.value().clone();
    if phi_eta.tip() != mu.tip() || phi_mu.tip() != mu.tip() {
        return Ok(Verdict::Vacuous);
    }
    let mut tested = false;
    for sigma in &tipped {
        if sigma.le_unchecked(&phi_eta) && is_normal(sigma, &mu)? {
            tested = true;
            ensure!(subset(sigma, &phi_mu)?, "σ = {sigma} ⊆ Φ(η) but not ⊆ Φ(μ)");
        }
    }
    Ok(if tested {
        Verdict::Holds
    } else {
        Verdict::Vacuous
    })
}
