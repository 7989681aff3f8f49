//! Block-diagram laws: factorability against an independent
//! subset-enumeration oracle, canonical-form idempotence and behavior
//! preservation on random diagrams, single-output refinement
//! recomposition, and set-functor verdicts.

use std::collections::HashMap;

use emcat_core::abd::{AbdBuilder, AbstractBlockDiagram, Component, Port};
use emcat_core::{
    canonical_form, check_set_functor, coordinate_support, identity_set_functor, is_factorable,
    refine_single_output, FinSet,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Independent factorability oracle: enumerate coordinate subsets by
/// size and lexicographic order; the mapping factors through S iff any
/// two inputs agreeing on S produce equal outputs. Returns the first
/// (hence minimal) subset that works.
fn oracle_minimal_support(c: &Component, ports: &[Port]) -> Vec<usize> {
    let rows = c.rows(ports);
    let arity = c.inputs.len();
    let mut subsets: Vec<Vec<usize>> = (0..(1u32 << arity))
        .map(|mask| (0..arity).filter(|&i| mask & (1 << i) != 0).collect())
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
}

fn bits() -> FinSet {
    FinSet::new(["0", "1"])
}

#[test]
fn support_agrees_with_the_subset_oracle_on_all_binary_boolean_functions() {
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
                ("x".into(), bits()),
                ("y".into(), bits()),
                ("z".into(), bits()),
            ],
            components: vec![("f".into(), vec!["x".into(), "y".into()], vec!["z".into()], rows)],
        }
        .build()
        .unwrap();
        let c = &abd.components[0];
        let support = coordinate_support(c, &abd.ports);
        let oracle = oracle_minimal_support(c, &abd.ports);
        assert_eq!(support, oracle, "function code {code}");
        if is_factorable(c, &abd.ports).is_some() {
            factorable += 1;
        }
    }
    assert_eq!(factorable, 6);
}

/// Random acyclic diagram: layered ports, components reading earlier
/// layers only. Tables stay under 256 rows.
fn random_abd(rng: &mut StdRng, name: &str) -> AbstractBlockDiagram {
    let n_ports = rng.random_range(3..=6);
    let ports: Vec<(String, FinSet)> = (0..n_ports)
        .map(|i| {
            let size = rng.random_range(2..=4);
            (
                format!("p{i}"),
                FinSet::new((0..size).map(|v| format!("v{v}"))),
            )
        })
        .collect();
    let mut components = Vec::new();
    let mut produced: Vec<usize> = Vec::new();
    let n_comps = rng.random_range(1..=3);
    for ci in 0..n_comps {
        // Choose an output port not yet produced, from the tail.
        let candidates: Vec<usize> =
            (0..n_ports).filter(|i| !produced.contains(i) && *i > 0).collect();
        if candidates.is_empty() {
            break;
        }
        let out = candidates[rng.random_range(0..candidates.len())];
        produced.push(out);
        // Inputs strictly before the output to keep the wiring acyclic.
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
            let outs = vec![out_set.elem(rng.random_range(0..out_set.len())).to_string()];
            rows.push((ins, outs));
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

#[test]
fn canonical_form_is_idempotent_and_behavior_preserving_on_random_diagrams() {
    let mut rng = StdRng::seed_from_u64(23);
    for i in 0..20 {
        let abd = random_abd(&mut rng, &format!("r{i}"));
        let canon = canonical_form(&abd);
        assert_eq!(canonical_form(&canon), canon, "idempotence on r{i}");
        // No factorable mapping remains.
        for c in &canon.components {
            assert!(is_factorable(c, &canon.ports).is_none());
        }
        // Behavior preserved: evaluate both on every original external
        // input tuple and compare all produced ports.
        let produced: Vec<usize> = (0..abd.ports.len())
            .filter(|&p| abd.producer_of(p).is_some())
            .collect();
        for (assignment, original) in abd.behavior_table().unwrap() {
            let new = canon.evaluate(&assignment).unwrap();
            for &p in &produced {
                assert_eq!(original.get(&p), new.get(&p), "diagram r{i} port {p}");
            }
        }
    }
}

#[test]
fn refinement_recomposition_is_exact_on_random_diagrams() {
    let mut rng = StdRng::seed_from_u64(29);
    for i in 0..10 {
        let abd = random_abd(&mut rng, &format!("s{i}"));
        let refined = refine_single_output(&abd);
        for c in &refined.components {
            assert_eq!(c.outputs.len(), 1);
        }
        for (assignment, original) in abd.behavior_table().unwrap() {
            let new = refined.evaluate(&assignment).unwrap();
            assert_eq!(original, new, "diagram s{i}");
        }
    }
}

#[test]
fn identity_functor_passes_and_empty_collapse_fails() {
    let mut rng = StdRng::seed_from_u64(31);
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
    let verdict = check_set_functor(&collapse);
    assert!(!verdict.regular.holds);
}
