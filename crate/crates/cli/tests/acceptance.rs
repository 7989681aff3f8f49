//! Acceptance suite: one test per criterion, each printing an explicit
//! PASS line. Every tolerance is pinned in code; all checks are
//! exhaustive at desk scale.
//!
//! Run with `cargo test -p emcat-cli --test acceptance` (add
//! `-- --nocapture` to see the PASS lines).

use std::collections::HashMap;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use emcat_core::abd::AbdBuilder;
use emcat_core::battery::{
    default_battery, emergence_battery, relation_battery, singleton_emergence, RandomConstructs,
    random_thin_functor,
};
use emcat_core::{
    canonical_form, check_iso, check_morphism, check_set_functor, compose_graded,
    coordinate_support, coproduct_emergence, enumerate_functors, enumerate_homomorphisms,
    equalizer_emergence, essential_uniqueness, extremal_status, functor_properties, graded_arrow,
    identity_set_functor, internal_structure_report, is_factorable, limit_of_diagram,
    opposite_emergence, product_emergence, pullback_emergence, refine_single_output,
    regular_mono_fixture, verify_universal, CategoryBuilder, Construct, DiagramEmergence,
    Emergence, EmergenceRef, FinFunction, FinSet, Functor, GradedKind, IsoMode, MorphismMode,
    OperationTable, SignatureSlot, SlotKind, StructureSignature, UniversalCandidate,
    DEFAULT_BUDGET,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn pass(n: usize, what: &str) {
    println!("ACCEPTANCE {n}: PASS — {what}");
}

/// Criterion 1: over ≥50 generated pairs of parallel functors between
/// random constructs (≤4 objects, ≤12 morphisms, carriers ≤4), the
/// constructed equalizer satisfies F∘E = G∘E exactly, and every
/// competitor cone from the default battery has exactly one mediator.
/// Runtime ≤ 120 s.
#[test]
fn criterion_01_equalizer_suite() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0xE0_01);
    let gen = RandomConstructs::default();
    let battery = default_battery();
    let mut pairs = 0;
    while pairs < 50 {
        let a = gen.generate(&mut rng, &format!("a{pairs}"));
        let b = gen.generate(&mut rng, &format!("b{pairs}"));
        assert!(a.category().morphism_count() <= 12);
        let Some(f) = random_thin_functor(&mut rng, a.category(), b.category()).unwrap() else {
            continue;
        };
        let Some(g) = random_thin_functor(&mut rng, a.category(), b.category()).unwrap() else {
            continue;
        };
        let res = equalizer_emergence(&a, &[f.clone(), g.clone()]).unwrap();
        // F ∘ E = G ∘ E exactly.
        let fe = f.compose_after(&res.inclusion).unwrap();
        let ge = g.compose_after(&res.inclusion).unwrap();
        assert_eq!(fe.object_map, ge.object_map);
        assert_eq!(fe.morphism_map, ge.morphism_map);
        assert!(res.emergence.validate().is_ok());
        let parallel = vec![f, g];
        let verdict = verify_universal(
            &UniversalCandidate::Equalizer {
                inclusion: &res.inclusion,
                parallel: &parallel,
            },
            &battery,
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert!(verdict.overall, "pair {pairs}: {}", verdict.render());
        pairs += 1;
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() <= 120, "took {elapsed:?}");
    pass(1, &format!("{pairs} equalizer pairs, all mediators unique, {elapsed:?}"));
}

/// Criterion 2: every constructed equalizer inclusion is an embedding
/// and a monomorphism under full enumeration of parallel pairs from the
/// battery; every full-sub-construct inclusion in the battery verifies
/// as an equalizer of the fixture functor pair. Zero counterexamples.
#[test]
fn criterion_02_regular_mono_equivalence() {
    let battery = default_battery();
    let es = relation_battery();
    let mut inclusions = 0;
    for e in &es {
        let cat = e.category().clone();
        let endos = enumerate_functors(&cat, &cat, DEFAULT_BUDGET).unwrap();
        for f in &endos {
            for g in &endos {
                let res = equalizer_emergence(e, &[f.clone(), g.clone()]).unwrap();
                inclusions += 1;
                // (a) embedding.
                assert!(functor_properties(&res.inclusion).embedding);
                // (b) monomorphism by left cancellation over the battery.
                for x in &battery {
                    let fs = enumerate_functors(x, &res.inclusion.source, DEFAULT_BUDGET).unwrap();
                    for (i, h) in fs.iter().enumerate() {
                        for k in &fs[i + 1..] {
                            let eh = res.inclusion.compose_after(h).unwrap();
                            let ek = res.inclusion.compose_after(k).unwrap();
                            assert!(
                                eh.object_map != ek.object_map
                                    || eh.morphism_map != ek.morphism_map,
                                "inclusion is not mono"
                            );
                        }
                    }
                }
            }
        }
        // (c) every full sub-construct inclusion is an equalizer of the
        // fixture pair built per the two-object category with mutually
        // inverse arrows.
        let n = cat.object_count();
        for mask in 0..(1u32 << n) {
            let subset: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            let (_, collapse, membership) = regular_mono_fixture(e, &subset).unwrap();
            let parallel = vec![collapse, membership];
            let res = equalizer_emergence(e, &parallel).unwrap();
            let names: Vec<&str> = subset.iter().map(|&o| cat.object_name(o)).collect();
            assert_eq!(
                res.emergence.category().objects().iter().map(|s| s.as_str()).collect::<Vec<_>>(),
                names
            );
            let verdict = verify_universal(
                &UniversalCandidate::Equalizer {
                    inclusion: &res.inclusion,
                    parallel: &parallel,
                },
                &battery,
                DEFAULT_BUDGET,
            )
            .unwrap();
            assert!(verdict.overall, "{}", verdict.render());
        }
    }
    pass(2, &format!("{inclusions} equalizer inclusions, all regular monos"));
}

/// Criterion 3: over all pairs from the 10-construct battery — product
/// object count multiplies exactly, product order is the sum of orders,
/// coproduct injections are jointly surjective with empty cross-tag
/// homs, and mediators are unique by enumeration. Runtime ≤ 120 s.
#[test]
fn criterion_03_product_coproduct_suite() {
    let start = Instant::now();
    let es = emergence_battery();
    assert_eq!(es.len(), 10);
    let battery = default_battery();
    for i in 0..es.len() {
        for j in i..es.len() {
            let a = &es[i];
            let b = &es[j];
            let p = product_emergence(&[a.clone(), b.clone()], DEFAULT_BUDGET).unwrap();
            assert_eq!(
                p.emergence.category().object_count(),
                a.category().object_count() * b.category().object_count(),
                "object count for ({i},{j})"
            );
            assert_eq!(p.emergence.order(), a.order() + b.order());
            assert!(p.emergence.validate().is_ok());
            let verdict = verify_universal(
                &UniversalCandidate::Product {
                    projections: &p.projections,
                },
                &battery,
                DEFAULT_BUDGET,
            )
            .unwrap();
            assert!(verdict.overall, "product ({i},{j}): {}", verdict.render());

            let c = coproduct_emergence(&[a.clone(), b.clone()]).unwrap();
            assert!(c.emergence.validate().is_ok());
            let cat = c.emergence.category();
            let mut covered = vec![false; cat.object_count()];
            for inj in &c.injections {
                for &o in &inj.object_map {
                    covered[o] = true;
                }
            }
            assert!(covered.into_iter().all(|x| x), "joint surjectivity ({i},{j})");
            let split = c.injections[0].object_map.len();
            for x in 0..cat.object_count() {
                for y in 0..cat.object_count() {
                    if (x < split) != (y < split) {
                        assert!(cat.hom(x, y).is_empty(), "cross-tag hom ({i},{j})");
                    }
                }
            }
            let verdict = verify_universal(
                &UniversalCandidate::Coproduct {
                    injections: &c.injections,
                },
                &battery,
                DEFAULT_BUDGET,
            )
            .unwrap();
            assert!(verdict.overall, "coproduct ({i},{j}): {}", verdict.render());
        }
    }
    // Orders genuinely add for factors of different orders.
    let varied = [
        singleton_emergence("v1", 1),
        singleton_emergence("v2", 2),
        singleton_emergence("v3", 3),
    ];
    let p = product_emergence(&varied, DEFAULT_BUDGET).unwrap();
    assert_eq!(p.emergence.order(), 6);
    assert!(p.emergence.validate().is_ok());

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() <= 120, "took {elapsed:?}");
    pass(3, &format!("all 55 battery pairs plus varied-order product, {elapsed:?}"));
}

/// Criterion 4: the constructed pullback's objects equal the
/// independent brute-force pair filter on every battery pair; the
/// square commutes; mediators are unique against battery competitors.
/// Exact equality.
#[test]
fn criterion_04_pullback_construction() {
    let es = emergence_battery();
    let battery = default_battery();
    for a in &es {
        for b in &es {
            let pb = pullback_emergence(a, b).unwrap();
            // Independent double-loop oracle.
            let mut expect = Vec::new();
            for x in 0..a.category().object_count() {
                for y in 0..b.category().object_count() {
                    if a.gu.object_set(x) == b.gu.object_set(y) {
                        expect.push(format!(
                            "({},{})",
                            a.category().object_name(x),
                            b.category().object_name(y)
                        ));
                    }
                }
            }
            let got: Vec<String> = pb.emergence.category().objects().to_vec();
            assert_eq!(got, expect, "{} × {}", a.name, b.name);
            // Square commutes exactly.
            for o in 0..pb.emergence.category().object_count() {
                assert_eq!(
                    a.gu.object_set(pb.to_a.on_object(o)),
                    b.gu.object_set(pb.to_b.on_object(o))
                );
            }
            for m in pb.emergence.category().morphism_ids() {
                assert_eq!(
                    a.gu.on_morphism(pb.to_a.on_morphism(m)),
                    b.gu.on_morphism(pb.to_b.on_morphism(m))
                );
            }
            let verdict = verify_universal(
                &UniversalCandidate::Pullback {
                    to_a: &pb.to_a,
                    to_b: &pb.to_b,
                    a,
                    b,
                },
                &battery,
                DEFAULT_BUDGET,
            )
            .unwrap();
            assert!(verdict.overall, "{} × {}: {}", a.name, b.name, verdict.render());
        }
    }
    pass(4, "pullback objects equal the pair-filter oracle on all 100 pairs");
}

/// Criterion 5: relation algebra on the battery — hom reflexive and
/// transitive; iso an equivalence with witnesses; iso ⇒ equivalence;
/// mutual homs under embeddings ⇒ iso; embedding target ⇒ at most one
/// homomorphism. Zero violations.
#[test]
fn criterion_05_relation_algebra() {
    let es = relation_battery();
    let homs = |a: &Emergence, b: &Emergence| {
        enumerate_homomorphisms(
            EmergenceRef::Plain(a),
            EmergenceRef::Plain(b),
            MorphismMode::Hom,
            DEFAULT_BUDGET,
        )
        .unwrap()
    };
    let iso = |a: &Emergence, b: &Emergence| {
        check_iso(
            EmergenceRef::Plain(a),
            EmergenceRef::Plain(b),
            IsoMode::Iso,
            DEFAULT_BUDGET,
        )
        .unwrap()
    };
    for e in &es {
        let id = Functor::identity(e.category().clone());
        assert!(check_morphism(
            &id,
            EmergenceRef::Plain(e),
            EmergenceRef::Plain(e),
            MorphismMode::Hom
        )
        .unwrap()
        .holds);
        let v = iso(e, e);
        assert!(v.holds && v.witness.is_some());
    }
    let mut embedding_pairs = 0;
    for a in &es {
        for b in &es {
            for f in homs(a, b) {
                for c in &es {
                    for g in homs(b, c) {
                        let comp = g.compose_after(&f).unwrap();
                        assert!(check_morphism(
                            &comp,
                            EmergenceRef::Plain(a),
                            EmergenceRef::Plain(c),
                            MorphismMode::Hom
                        )
                        .unwrap()
                        .holds);
                    }
                }
            }
            let ab = iso(a, b);
            assert_eq!(ab.holds, iso(b, a).holds, "symmetry {} {}", a.name, b.name);
            if ab.holds {
                // Symmetric via the inverse witness: the inverse of the
                // found functor is itself a U-compatible isomorphism.
                let w = ab.witness.clone().unwrap();
                let inv = emcat_core::inverse_functor(&w).expect("iso witness has an inverse");
                assert!(check_morphism(
                    &inv,
                    EmergenceRef::Plain(b),
                    EmergenceRef::Plain(a),
                    MorphismMode::Hom
                )
                .unwrap()
                .holds);
                for c in &es {
                    let bc = iso(b, c);
                    if bc.holds {
                        let ac = iso(a, c);
                        assert!(ac.holds, "transitivity");
                        // Transitive via the composite witness.
                        let comp = bc.witness.clone().unwrap().compose_after(&w).unwrap();
                        assert!(functor_properties(&comp).is_isomorphism);
                        assert!(check_morphism(
                            &comp,
                            EmergenceRef::Plain(a),
                            EmergenceRef::Plain(c),
                            MorphismMode::Hom
                        )
                        .unwrap()
                        .holds);
                    }
                }
                assert!(
                    check_iso(
                        EmergenceRef::Plain(a),
                        EmergenceRef::Plain(b),
                        IsoMode::Equivalence,
                        DEFAULT_BUDGET
                    )
                    .unwrap()
                    .holds,
                    "iso implies equivalence"
                );
            }
            if a.gu.is_embedding() && b.gu.is_embedding() && !homs(a, b).is_empty() && !homs(b, a).is_empty()
            {
                embedding_pairs += 1;
                assert!(iso(a, b).holds, "mutual homs under embeddings must be iso");
            }
            if b.gu.is_embedding() {
                assert!(homs(a, b).len() <= 1, "embedding target admits at most one hom");
            }
        }
    }
    assert!(embedding_pairs >= 2);
    pass(5, "reflexive/transitive homs, iso equivalence, embedding uniqueness");
}

/// Criterion 6: order(opposite) = order on all battery emergences, and
/// graded-arrow degree additivity is exact over every composable chain
/// of length ≤ 4.
#[test]
fn criterion_06_orders_and_degrees() {
    for e in emergence_battery().iter().chain(relation_battery().iter()) {
        let op = opposite_emergence(e, None).unwrap();
        assert_eq!(op.emergence.order(), e.order(), "{}", e.name);
    }
    let mut rng = StdRng::seed_from_u64(0xE0_06);
    let gen = RandomConstructs { slots: 2, ..Default::default() };
    for i in 0..10 {
        let e = gen.generate(&mut rng, &format!("op{i}"));
        assert_eq!(opposite_emergence(&e, None).unwrap().emergence.order(), e.order());
    }
    // Chains 4 → 3 → 2 → 1 on singleton carriers, every window length.
    let chain: Vec<Emergence> = (1..=4)
        .rev()
        .map(|k| singleton_emergence(&format!("s{k}"), k))
        .collect();
    for kind in [GradedKind::Partial, GradedKind::Relative] {
        let arrows: Vec<_> = chain
            .windows(2)
            .map(|w| {
                let f = Functor::constant(w[0].category().clone(), w[1].category().clone(), 0);
                graded_arrow(kind, &w[0], &w[1], &f).unwrap()
            })
            .collect();
        for start in 0..arrows.len() {
            for end in start..arrows.len() {
                let mut acc = arrows[start].clone();
                for a in &arrows[start + 1..=end] {
                    acc = compose_graded(&acc, a).unwrap();
                }
                let expected: usize = arrows[start..=end].iter().map(|a| a.degree).sum();
                assert_eq!(acc.degree, expected);
            }
        }
    }
    pass(6, "opposite preserves orders; degrees add exactly on chains ≤ 4");
}

/// Criterion 7: the one-object, one-identity, order-1 emergence is
/// terminal against a battery of order ≥ 2 emergences with compatible
/// singleton carriers; initial fails for every battery emergence; zero
/// never holds.
#[test]
fn criterion_07_extremal_emergences() {
    let terminal_candidate = singleton_emergence("terminal", 1);
    let battery: Vec<Emergence> = (2..=4)
        .map(|k| singleton_emergence(&format!("b{k}"), k))
        .collect();
    let report = extremal_status(&terminal_candidate, &battery, DEFAULT_BUDGET).unwrap();
    assert!(report.terminal.holds, "{:?}", report.terminal.witness);
    assert!(!report.initial.holds);

    // Initial fails for every battery member: the battery contains a
    // member of maximal order.
    for e in &battery {
        let r = extremal_status(e, &battery, DEFAULT_BUDGET).unwrap();
        assert!(!r.initial.holds, "{} cannot be initial", e.name);
        // Zero = initial ∧ terminal never holds.
        assert!(!(r.initial.holds && r.terminal.holds));
    }
    let r = extremal_status(&terminal_candidate, &battery, DEFAULT_BUDGET).unwrap();
    assert!(!(r.initial.holds && r.terminal.holds));
    pass(7, "terminal example verified; no initial, no zero");
}

fn untagged_slot(name: &str) -> SignatureSlot {
    SignatureSlot {
        name: name.into(),
        kind: SlotKind::Internal,
        tags: Default::default(),
    }
}

/// Criterion 8: the limit over a discrete 3-node scheme is isomorphic
/// to the ternary product; the limit over a parallel-pair scheme is
/// isomorphic to the equalizer; limit legs form a mono-source. Exact
/// witnesses required.
#[test]
fn criterion_08_limits() {
    let es = emergence_battery();
    // Discrete 3-node scheme.
    let mut b = CategoryBuilder::new("disc3");
    b.object("n0").object("n1").object("n2");
    b.auto_identities().fill_identity_compositions();
    let scheme = Arc::new(b.build().unwrap());
    let nodes = vec![es[1].clone(), es[2].clone(), es[3].clone()];
    let edges: Vec<Functor> = nodes.iter().map(|n| Functor::identity(n.category().clone())).collect();
    let diagram = DiagramEmergence::new(scheme, nodes.clone(), edges).unwrap();
    let lim = limit_of_diagram(&diagram, DEFAULT_BUDGET).unwrap();
    let prod = product_emergence(&nodes, DEFAULT_BUDGET).unwrap();
    let lim_legs: Vec<Functor> = lim.source.legs.iter().map(|(f, _)| f.clone()).collect();
    let iso = essential_uniqueness(&prod.projections, &lim_legs, DEFAULT_BUDGET)
        .unwrap()
        .expect("connecting isomorphism");
    assert!(functor_properties(&iso).is_isomorphism);
    for (p, l) in prod.projections.iter().zip(&lim_legs) {
        let through = p.compose_after(&iso).unwrap();
        assert_eq!(through.object_map, l.object_map);
        assert_eq!(through.morphism_map, l.morphism_map);
    }

    // Parallel-pair scheme: limit ≅ equalizer.
    let scheme = Arc::new(emcat_core::battery::parallel_pair());
    let a = es[3].clone(); // arrow-category construct
    let cat = a.category().clone();
    let id = Functor::identity(cat.clone());
    let collapse = Functor::constant(cat.clone(), cat.clone(), 0);
    let u = scheme.morphism_id("u").unwrap();
    let v = scheme.morphism_id("v").unwrap();
    let mut edges = vec![Functor::identity(cat.clone()); scheme.morphism_count()];
    edges[u] = id.clone();
    edges[v] = collapse.clone();
    let diagram = DiagramEmergence::new(scheme, vec![a.clone(), a.clone()], edges).unwrap();
    let lim2 = limit_of_diagram(&diagram, DEFAULT_BUDGET).unwrap();
    let eq = equalizer_emergence(&a, &[id, collapse]).unwrap();
    let lim2_leg = lim2.source.legs[0].0.clone();
    let iso2 = essential_uniqueness(&[eq.inclusion.clone()], &[lim2_leg], DEFAULT_BUDGET)
        .unwrap()
        .expect("connecting isomorphism with the equalizer");
    assert!(functor_properties(&iso2).is_isomorphism);

    // Mono-source law for limit legs.
    let battery = default_battery();
    let verdict = verify_universal(
        &UniversalCandidate::MonoSource { legs: &lim_legs },
        &battery,
        DEFAULT_BUDGET,
    )
    .unwrap();
    assert!(verdict.overall, "{}", verdict.render());

    // The parallel-pair limit also verifies universally: every natural
    // competitor cone from the battery has exactly one mediator.
    let legs2: Vec<Functor> = lim2.source.legs.iter().map(|(f, _)| f.clone()).collect();
    let verdict = verify_universal(
        &UniversalCandidate::Limit {
            diagram: &diagram,
            legs: &legs2,
        },
        &battery,
        DEFAULT_BUDGET,
    )
    .unwrap();
    assert!(verdict.overall, "{}", verdict.render());
    pass(8, "limit ≅ product (discrete), limit ≅ equalizer (parallel pair), legs mono-source, mediators unique");
}

/// Criterion 9: the 3-chain thin construct reports terminal + binary
/// products + complete-lattice all true; the 2-antichain reports all
/// false. Exact.
#[test]
fn criterion_09_internal_structures() {
    let s = FinSet::singleton("x");
    let t = OperationTable::internal_from_rows(s.clone(), [("x", "x", "x")], Default::default())
        .unwrap();
    let chain = Arc::new(emcat_core::battery::chain3());
    let chain_construct = Construct::new(
        "chainc",
        chain.clone(),
        StructureSignature::new(vec![untagged_slot("op")]).unwrap(),
        vec![s.clone(); 3],
        vec![vec![t.clone()], vec![t.clone()], vec![t.clone()]],
        vec![FinFunction::identity(&s); chain.morphism_count()],
    )
    .unwrap();
    let r = internal_structure_report(&chain_construct, DEFAULT_BUDGET).unwrap();
    assert!(r.thin && r.has_terminal && r.has_binary_products);
    assert!(r.complete_lattice.as_ref().unwrap().holds);
    // has-finite-products agrees with the complete-lattice verdict.
    assert_eq!(
        r.has_terminal && r.has_binary_products,
        r.complete_lattice.as_ref().unwrap().holds
    );

    let disc = Arc::new(emcat_core::battery::discrete2());
    let disc_construct = Construct::new(
        "discc",
        disc.clone(),
        StructureSignature::new(vec![untagged_slot("op")]).unwrap(),
        vec![s.clone(); 2],
        vec![vec![t.clone()], vec![t.clone()]],
        vec![FinFunction::identity(&s); disc.morphism_count()],
    )
    .unwrap();
    let r = internal_structure_report(&disc_construct, DEFAULT_BUDGET).unwrap();
    assert!(r.thin);
    assert!(!r.has_terminal && !r.has_binary_products);
    assert!(!r.complete_lattice.as_ref().unwrap().holds);
    assert_eq!(
        r.has_terminal && r.has_binary_products,
        r.complete_lattice.as_ref().unwrap().holds
    );
    pass(9, "3-chain all true, 2-antichain all false");
}

/// Criterion 10: factorability matches the coordinate-dependence oracle
/// on all 16 binary boolean functions (exactly 6 factorable);
/// canonical_form is idempotent and behavior-preserving on 20 random
/// diagrams; refinement recomposition is exact; the identity
/// set-functor passes and the empty collapse fails regularity.
/// Runtime ≤ 60 s.
#[test]
fn criterion_10_abd_suite() {
    let start = Instant::now();
    let bits = FinSet::new(["0", "1"]);

    // Oracle: subset enumeration by size then lexicographic order.
    let oracle = |c: &emcat_core::Component, ports: &[emcat_core::Port]| -> Vec<usize> {
        let rows = c.rows(ports);
        let arity = c.inputs.len();
        let mut subsets: Vec<Vec<usize>> = (0..(1u32 << arity))
            .map(|m| (0..arity).filter(|&i| m & (1 << i) != 0).collect())
            .collect();
        subsets.sort_by_key(|s: &Vec<usize>| (s.len(), s.clone()));
        'subsets: for s in subsets {
            let mut seen: HashMap<Vec<&str>, &Vec<String>> = HashMap::new();
            for (ins, outs) in &rows {
                let key: Vec<&str> = s.iter().map(|&i| ins[i].as_str()).collect();
                match seen.get(&key) {
                    Some(prev) if *prev != outs => continue 'subsets,
                    Some(_) => {}
                    None => {
                        seen.insert(key, outs);
                    }
                }
            }
            return s;
        }
        (0..arity).collect()
    };

    let mut factorable = 0;
    for code in 0..16u8 {
        let rows: Vec<(Vec<String>, Vec<String>)> = (0..4)
            .map(|i| {
                (
                    vec![(((i >> 1) & 1) as u8).to_string(), ((i & 1) as u8).to_string()],
                    vec![(((code >> i) & 1) as u8).to_string()],
                )
            })
            .collect();
        let abd = AbdBuilder {
            name: "bin".into(),
            ports: vec![
                ("x".into(), bits.clone()),
                ("y".into(), bits.clone()),
                ("z".into(), bits.clone()),
            ],
            components: vec![("f".into(), vec!["x".into(), "y".into()], vec!["z".into()], rows)],
        }
        .build()
        .unwrap();
        let c = &abd.components[0];
        assert_eq!(coordinate_support(c, &abd.ports), oracle(c, &abd.ports), "code {code}");
        if is_factorable(c, &abd.ports).is_some() {
            factorable += 1;
        }
    }
    assert_eq!(factorable, 6, "exactly 6 of 16 binary boolean functions are factorable");

    // 20 random diagrams (tables ≤ 256 rows): canonical idempotent and
    // behavior preserving; refinement recomposes exactly.
    let mut rng = StdRng::seed_from_u64(0xE0_10);
    for i in 0..20 {
        let abd = random_abd(&mut rng, &format!("r{i}"));
        for c in &abd.components {
            let rows: usize = c.inputs.iter().map(|&p| abd.ports[p].set.len()).product();
            assert!(rows <= 256);
        }
        let canon = canonical_form(&abd);
        assert_eq!(canonical_form(&canon), canon, "idempotence r{i}");
        for c in &canon.components {
            assert!(is_factorable(c, &canon.ports).is_none());
        }
        let produced: Vec<usize> = (0..abd.ports.len())
            .filter(|&p| abd.producer_of(p).is_some())
            .collect();
        for (assignment, original) in abd.behavior_table().unwrap() {
            let new = canon.evaluate(&assignment).unwrap();
            for &p in &produced {
                assert_eq!(original.get(&p), new.get(&p), "r{i} port {p}");
            }
        }
        let refined = refine_single_output(&abd);
        for (assignment, original) in abd.behavior_table().unwrap() {
            assert_eq!(original, refined.evaluate(&assignment).unwrap(), "r{i}");
        }
    }

    // Identity set-functor passes both checks; the empty collapse fails
    // regularity.
    let abd = random_abd(&mut rng, "t");
    let ident = identity_set_functor(&abd).unwrap();
    assert!(ident.validate().is_ok());
    let verdict = check_set_functor(&ident);
    assert!(verdict.regular.holds && verdict.multiplicative.holds);
    let mut collapse = ident.clone();
    for s in collapse.assignment.iter_mut() {
        *s = FinSet::empty();
    }
    collapse.actions.clear();
    assert!(!check_set_functor(&collapse).regular.holds);

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() <= 60, "took {elapsed:?}");
    pass(10, &format!("oracle agreement, 6/16 factorable, 20 random diagrams, {elapsed:?}"));
}

fn random_abd(rng: &mut StdRng, name: &str) -> emcat_core::AbstractBlockDiagram {
    let n_ports = rng.random_range(3..=6);
    let ports: Vec<(String, FinSet)> = (0..n_ports)
        .map(|i| {
            let size = rng.random_range(2..=4);
            (format!("p{i}"), FinSet::new((0..size).map(|v| format!("v{v}"))))
        })
        .collect();
    let mut components = Vec::new();
    let mut produced: Vec<usize> = Vec::new();
    for ci in 0..rng.random_range(1..=3) {
        let candidates: Vec<usize> =
            (0..n_ports).filter(|i| !produced.contains(i) && *i > 0).collect();
        if candidates.is_empty() {
            break;
        }
        let out = candidates[rng.random_range(0..candidates.len())];
        produced.push(out);
        let max_arity = out.min(3);
        let arity = rng.random_range(1..=max_arity.max(1));
        let mut inputs: Vec<usize> = (0..out).collect();
        while inputs.len() > arity {
            let drop = rng.random_range(0..inputs.len());
            inputs.remove(drop);
        }
        let in_sizes: Vec<usize> = inputs.iter().map(|&p| ports[p].1.len()).collect();
        let row_count: usize = in_sizes.iter().product();
        if row_count > 256 {
            continue;
        }
        let mut rows = Vec::with_capacity(row_count);
        let mut tuple = vec![0usize; inputs.len()];
        loop {
            let ins: Vec<String> = tuple
                .iter()
                .zip(inputs.iter())
                .map(|(&v, &p)| ports[p].1.elem(v).to_string())
                .collect();
            let out_set = &ports[out].1;
            rows.push((ins, vec![out_set.elem(rng.random_range(0..out_set.len())).to_string()]));
            let mut d = tuple.len();
            let done = loop {
                if d == 0 {
                    break true;
                }
                d -= 1;
                tuple[d] += 1;
                if tuple[d] < in_sizes[d] {
                    break false;
                }
                tuple[d] = 0;
            };
            if done {
                break;
            }
        }
        components.push((
            format!("c{ci}"),
            inputs.iter().map(|&p| format!("p{p}")).collect(),
            vec![format!("p{out}")],
            rows,
        ));
    }
    AbdBuilder {
        name: name.into(),
        ports,
        components,
    }
    .build()
    .unwrap()
}

/// Criterion 11: every suite rerun produces byte-identical reports.
#[test]
fn criterion_11_determinism() {
    let bin = env!("CARGO_BIN_EXE_emcat");
    let dir = std::env::temp_dir().join(format!("emcat-acc-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let ws = dir.join("acc.emc");
    std::fs::write(
        &ws,
        r#"
category C {
  objects A B
  mor f A B
}
functor IdC : C -> C { obj A = A ; obj B = B ; mor f = f }
functor G1 : C -> C { obj A = A ; obj B = A ; mor f = id_A }
construct Bits on C {
  slot add internal [associative commutative has_identity has_inverses]
  carrier A { 0 1 }
  carrier B { 0 1 }
  table A add { 0 0 = 0 ; 0 1 = 1 ; 1 0 = 1 ; 1 1 = 0 }
  table B add { 0 0 = 0 ; 0 1 = 1 ; 1 0 = 1 ; 1 1 = 0 }
  underlying f { 0 -> 0 ; 1 -> 1 }
}
emergence E = ( Bits , standard )
abd D0 {
  port p { 0 1 }
  port q { 0 1 }
  component c in ( p q ) out ( q ) { 0 0 = 0 ; 0 1 = 0 ; 1 0 = 1 ; 1 1 = 1 }
}
"#,
    )
    .unwrap();
    let w = ws.to_str().unwrap();
    let suites: Vec<Vec<&str>> = vec![
        vec!["-w", w, "check", "workspace"],
        vec!["-w", w, "construct", "equalizer", "E", "IdC", "G1", "--verify"],
        vec!["-w", w, "construct", "product", "E", "E", "--verify"],
        vec!["-w", w, "construct", "coproduct", "E", "E", "--verify"],
        vec!["-w", w, "construct", "pullback", "E", "E", "--verify"],
        vec!["-w", w, "relate", "iso", "E", "E"],
        vec!["-w", w, "internal", "Bits"],
        vec!["-w", w, "--json", "classify", "emergence", "E"],
        vec!["-w", w, "export", "category", "C"],
    ];
    for args in &suites {
        let a = Command::new(bin).args(args).output().unwrap();
        let b = Command::new(bin).args(args).output().unwrap();
        assert!(a.status.success(), "{:?}: {}", args, String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "rerun differs for {args:?}");
    }
    pass(11, "byte-identical reports across reruns");
}
