//! Relation-algebra laws over the emergence battery: reflexivity and
//! transitivity of the homomorphism relation, the isomorphism relation
//! as an equivalence, isomorphism implying categorical equivalence,
//! uniqueness under embedding underlying functors, and order/degree
//! bookkeeping.

use emcat_core::battery::{relation_battery, RandomConstructs};
use emcat_core::{
    check_iso, check_morphism, compose_graded, enumerate_homomorphisms, graded_arrow,
    opposite_emergence, Emergence, EmergenceRef, Functor, GradedKind, IsoMode, MorphismMode,
    DEFAULT_BUDGET,
};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn homs(a: &Emergence, b: &Emergence) -> Vec<Functor> {
    enumerate_homomorphisms(
        EmergenceRef::Plain(a),
        EmergenceRef::Plain(b),
        MorphismMode::Hom,
        DEFAULT_BUDGET,
    )
    .unwrap()
}

#[test]
fn hom_relation_is_reflexive_via_the_identity() {
    for e in relation_battery() {
        let id = Functor::identity(e.category().clone());
        let v = check_morphism(
            &id,
            EmergenceRef::Plain(&e),
            EmergenceRef::Plain(&e),
            MorphismMode::Hom,
        )
        .unwrap();
        assert!(v.holds, "identity fails on {}", e.name);
    }
}

#[test]
fn hom_relation_is_transitive_on_every_composable_pair() {
    let battery = relation_battery();
    for a in &battery {
        for b in &battery {
            for c in &battery {
                for f in homs(a, b) {
                    for g in homs(b, c) {
                        let comp = g.compose_after(&f).unwrap();
                        let v = check_morphism(
                            &comp,
                            EmergenceRef::Plain(a),
                            EmergenceRef::Plain(c),
                            MorphismMode::Hom,
                        )
                        .unwrap();
                        assert!(v.holds, "{} → {} → {}", a.name, b.name, c.name);
                    }
                }
            }
        }
    }
}

#[test]
fn iso_relation_is_an_equivalence_with_witnesses() {
    let battery = relation_battery();
    let iso = |a: &Emergence, b: &Emergence| {
        check_iso(
            EmergenceRef::Plain(a),
            EmergenceRef::Plain(b),
            IsoMode::Iso,
            DEFAULT_BUDGET,
        )
        .unwrap()
    };
    // Reflexive.
    for e in &battery {
        let v = iso(e, e);
        assert!(v.holds && v.witness.is_some());
    }
    // Symmetric and transitive.
    for a in &battery {
        for b in &battery {
            let ab = iso(a, b);
            let ba = iso(b, a);
            assert_eq!(ab.holds, ba.holds, "{} vs {}", a.name, b.name);
            if ab.holds {
                for c in &battery {
                    let bc = iso(b, c);
                    if bc.holds {
                        assert!(iso(a, c).holds, "{} ≅ {} ≅ {}", a.name, b.name, c.name);
                    }
                }
            }
        }
    }
    // The designed relabeled pair really is isomorphic.
    let a = &battery[0];
    let b = &battery[1];
    assert!(iso(a, b).holds);
}

#[test]
fn isomorphic_emergences_are_equivalent() {
    let battery = relation_battery();
    for a in &battery {
        for b in &battery {
            let iso = check_iso(
                EmergenceRef::Plain(a),
                EmergenceRef::Plain(b),
                IsoMode::Iso,
                DEFAULT_BUDGET,
            )
            .unwrap();
            if iso.holds {
                let equiv = check_iso(
                    EmergenceRef::Plain(a),
                    EmergenceRef::Plain(b),
                    IsoMode::Equivalence,
                    DEFAULT_BUDGET,
                )
                .unwrap();
                assert!(equiv.holds, "{} ≅ {} but not equivalent", a.name, b.name);
            }
        }
    }
}

#[test]
fn mutual_homomorphisms_with_embedding_underlyings_give_isomorphism() {
    let battery = relation_battery();
    let mut exercised = 0;
    for a in &battery {
        for b in &battery {
            if !(a.gu.is_embedding() && b.gu.is_embedding()) {
                continue;
            }
            if homs(a, b).is_empty() || homs(b, a).is_empty() {
                continue;
            }
            exercised += 1;
            let iso = check_iso(
                EmergenceRef::Plain(a),
                EmergenceRef::Plain(b),
                IsoMode::Iso,
                DEFAULT_BUDGET,
            )
            .unwrap();
            assert!(iso.holds, "{} and {} mutually homomorphic under embeddings", a.name, b.name);
        }
    }
    assert!(exercised >= 2, "battery must exercise the embedding case");
}

#[test]
fn embedding_target_admits_at_most_one_homomorphism() {
    let battery = relation_battery();
    let mut exercised = 0;
    for b in &battery {
        if !b.gu.is_embedding() {
            continue;
        }
        exercised += 1;
        for a in &battery {
            let count = homs(a, b).len();
            assert!(count <= 1, "{} → {} has {count} homomorphisms", a.name, b.name);
        }
    }
    assert!(exercised >= 2);
}

#[test]
fn opposite_preserves_order_across_random_emergences() {
    let mut rng = StdRng::seed_from_u64(11);
    let gen = RandomConstructs {
        slots: 2,
        ..Default::default()
    };
    for i in 0..20 {
        let e = gen.generate(&mut rng, &format!("op{i}"));
        let op = opposite_emergence(&e, None).unwrap();
        assert_eq!(op.emergence.order(), e.order());
    }
}

#[test]
fn graded_degrees_are_additive_along_chains() {
    // Orders 4 → 3 → 2 → 1 on singleton carriers: unique functors, the
    // triangles commute, and degrees telescope.
    use emcat_core::battery::singleton_emergence;
    let chain: Vec<Emergence> = (1..=4)
        .rev()
        .map(|k| singleton_emergence(&format!("g{k}"), k))
        .collect();
    let mut arrows = Vec::new();
    for w in chain.windows(2) {
        let f = Functor::constant(w[0].category().clone(), w[1].category().clone(), 0);
        arrows.push(graded_arrow(GradedKind::Partial, &w[0], &w[1], &f).unwrap());
    }
    let mut acc = arrows[0].clone();
    for next in &arrows[1..] {
        acc = compose_graded(&acc, next).unwrap();
    }
    assert_eq!(acc.degree, 3);
    assert_eq!(acc.degree, arrows.iter().map(|a| a.degree).sum::<usize>());
}

#[test]
fn semi_homomorphisms_with_faithful_target_are_determined_on_objects() {
    // semihomouni, tested by enumeration: two verified semi-homomorphisms
    // that agree on objects agree everywhere when the target gsu is
    // faithful.
    use emcat_core::{GsuFunctor, SemiEmergence};
    let battery = relation_battery();
    for a in &battery {
        for b in &battery {
            let sa = SemiEmergence::new(
                format!("{}~s", a.name),
                a.construct.clone(),
                GsuFunctor::from(a.gu.clone()),
            )
            .unwrap();
            let sb = SemiEmergence::new(
                format!("{}~s", b.name),
                b.construct.clone(),
                GsuFunctor::from(b.gu.clone()),
            )
            .unwrap();
            if !sb.gsu.is_faithful() {
                continue;
            }
            let semis = enumerate_homomorphisms(
                EmergenceRef::Semi(&sa),
                EmergenceRef::Semi(&sb),
                MorphismMode::Semi,
                DEFAULT_BUDGET,
            )
            .unwrap();
            for (i, f) in semis.iter().enumerate() {
                for g in &semis[i + 1..] {
                    if f.object_map == g.object_map {
                        assert_eq!(
                            f.morphism_map, g.morphism_map,
                            "two semi-homomorphisms agree on objects but differ on morphisms"
                        );
                    }
                }
            }
        }
    }
}
