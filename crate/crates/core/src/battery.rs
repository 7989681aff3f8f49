//! The default desk-scale battery: small categories, constructs, and
//! emergences over which universally quantified claims are exhaustively
//! checked, plus a seeded generator of random valid constructs.
//!
//! The default competitor battery is {empty, point, arrow, parallel
//! pair, 3-chain}: small enough for full enumeration, rich enough to
//! expose non-uniqueness of mediators.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::Rng;

use crate::construct::{
    Construct, OperationTable, SignatureSlot, SlotKind, StructureSignature,
};
use crate::emergence::Emergence;
use crate::fincat::{CategoryBuilder, FinCategory, Functor, ObjId};
use crate::finset::{FinFunction, FinSet};
use crate::report::Result;

/// The category with no objects and no morphisms.
pub fn empty() -> FinCategory {
    CategoryBuilder::new("empty").build().expect("empty category")
}

/// One object, one (identity) morphism.
pub fn one_object() -> FinCategory {
    let mut b = CategoryBuilder::new("point");
    b.object("*");
    b.auto_identities().fill_identity_compositions();
    b.build().expect("point category")
}

/// Two objects A, B and a single arrow f: A → B besides identities.
pub fn arrow() -> FinCategory {
    let mut b = CategoryBuilder::new("arrow");
    b.object("A").object("B");
    b.morphism("f", "A", "B");
    b.auto_identities().fill_identity_compositions();
    b.build().expect("arrow category")
}

/// Two objects with two parallel arrows u, v: A → B.
pub fn parallel_pair() -> FinCategory {
    let mut b = CategoryBuilder::new("parallel-pair");
    b.object("A").object("B");
    b.morphism("u", "A", "B").morphism("v", "A", "B");
    b.auto_identities().fill_identity_compositions();
    b.build().expect("parallel pair category")
}

/// The poset 0 < 1 < 2 as a category: arrows f: A→B, g: B→C, h = g∘f.
pub fn chain3() -> FinCategory {
    let mut b = CategoryBuilder::new("chain3");
    b.object("A").object("B").object("C");
    b.morphism("f", "A", "B").morphism("g", "B", "C").morphism("h", "A", "C");
    b.auto_identities().fill_identity_compositions();
    b.compose("g", "f", "h");
    b.build().expect("chain3 category")
}

/// Two objects, identities only.
pub fn discrete2() -> FinCategory {
    let mut b = CategoryBuilder::new("discrete2");
    b.object("A").object("B");
    b.auto_identities().fill_identity_compositions();
    b.build().expect("discrete2 category")
}

/// The default competitor battery for universal-property checking.
pub fn default_battery() -> Vec<Arc<FinCategory>> {
    vec![
        Arc::new(empty()),
        Arc::new(one_object()),
        Arc::new(arrow()),
        Arc::new(parallel_pair()),
        Arc::new(chain3()),
    ]
}

fn untagged_slots(n: usize) -> StructureSignature {
    StructureSignature::new(
        (0..n)
            .map(|i| SignatureSlot {
                name: format!("s{i}"),
                kind: SlotKind::Internal,
                tags: BTreeSet::new(),
            })
            .collect(),
    )
    .expect("unique slot names")
}

fn left_table(carrier: &FinSet) -> OperationTable {
    let n = carrier.len();
    let rows: Vec<(String, String, String)> = (0..n)
        .flat_map(|i| {
            (0..n).map(move |j| (i, j))
        })
        .map(|(i, j)| {
            (
                carrier.elem(i).to_string(),
                carrier.elem(j).to_string(),
                carrier.elem(i).to_string(),
            )
        })
        .collect();
    OperationTable::internal_from_rows(
        carrier.clone(),
        rows.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())),
        BTreeSet::new(),
    )
    .expect("total table")
}

/// One-object emergence with a singleton carrier and the given number
/// of operation slots.
pub fn singleton_emergence(name: &str, order: usize) -> Emergence {
    let cat = Arc::new(one_object());
    let s = FinSet::singleton("u");
    let table =
        OperationTable::internal_from_rows(s.clone(), [("u", "u", "u")], BTreeSet::new()).unwrap();
    let construct = Arc::new(
        Construct::new(
            format!("{name}-construct"),
            cat,
            untagged_slots(order),
            vec![s.clone()],
            vec![vec![table; order]],
            vec![FinFunction::identity(&s)],
        )
        .unwrap(),
    );
    Emergence::standard(name, construct)
}

/// A thin emergence over a named poset category where every object
/// carries the same set and every arrow the identity function.
fn flat_emergence(name: &str, cat: FinCategory, carrier: FinSet) -> Emergence {
    let cat = Arc::new(cat);
    let n = cat.object_count();
    let table = left_table(&carrier);
    let construct = Arc::new(
        Construct::new(
            format!("{name}-construct"),
            cat.clone(),
            untagged_slots(1),
            vec![carrier.clone(); n],
            vec![vec![table]; n],
            vec![FinFunction::identity(&carrier); cat.morphism_count()],
        )
        .unwrap(),
    );
    Emergence::standard(name, construct)
}

/// Ten emergences sharing one untagged internal slot, over varied
/// categories and carriers. Product orders sum (here 1 + 1), coproducts
/// exist for every pair because the signature shape is shared.
pub fn emergence_battery() -> Vec<Emergence> {
    let b2 = FinSet::new(["0", "1"]);
    let b3 = FinSet::new(["p", "q", "r"]);
    let s1 = FinSet::singleton("u");
    let mut out = vec![
        flat_emergence("probe-empty", empty(), b2.clone()),
        flat_emergence("probe-point", one_object(), b2.clone()),
        flat_emergence("probe-point3", one_object(), b3.clone()),
        flat_emergence("probe-arrow", arrow(), b2.clone()),
        flat_emergence("probe-arrow3", arrow(), b3.clone()),
        flat_emergence("probe-pair", parallel_pair(), b2.clone()),
        flat_emergence("probe-chain", chain3(), s1.clone()),
        flat_emergence("probe-chain2", chain3(), b2.clone()),
        flat_emergence("probe-discrete", discrete2(), s1.clone()),
    ];
    // One member with a non-identity underlying function.
    let cat = Arc::new(arrow());
    let f = cat.morphism_id("f").unwrap();
    let mut underlying = vec![FinFunction::identity(&b2); cat.morphism_count()];
    underlying[f] =
        FinFunction::from_pairs(b2.clone(), b2.clone(), [("0", "1"), ("1", "0")]).unwrap();
    let construct = Arc::new(
        Construct::new(
            "probe-flip-construct",
            cat,
            untagged_slots(1),
            vec![b2.clone(), b2.clone()],
            vec![vec![left_table(&b2)], vec![left_table(&b2)]],
            underlying,
        )
        .unwrap(),
    );
    out.push(Emergence::standard("probe-flip", construct));
    out
}

/// Emergences exercising the relation algebra: isomorphic relabelings,
/// embedding underlying functors, and non-faithful members.
pub fn relation_battery() -> Vec<Emergence> {
    let sa = FinSet::new(["a0", "a1"]);
    let sb = FinSet::new(["b0", "b1", "b2"]);

    // Arrow construct with distinct carriers per object: the standard
    // underlying functor is an embedding.
    let arrow_embed = |name: &str, objs: (&str, &str), mor: &str| -> Emergence {
        let mut b = CategoryBuilder::new(format!("{name}-cat"));
        b.object(objs.0).object(objs.1);
        b.morphism(mor, objs.0, objs.1);
        b.auto_identities().fill_identity_compositions();
        let cat = Arc::new(b.build().unwrap());
        let m = cat.morphism_id(mor).unwrap();
        let mut underlying = vec![FinFunction::identity(&sa); cat.morphism_count()];
        underlying[cat.identity_of(1)] = FinFunction::identity(&sb);
        underlying[m] = FinFunction::constant(sa.clone(), sb.clone(), "b0").unwrap();
        let construct = Arc::new(
            Construct::new(
                format!("{name}-construct"),
                cat,
                untagged_slots(1),
                vec![sa.clone(), sb.clone()],
                vec![vec![left_table(&sa)], vec![left_table(&sb)]],
                underlying,
            )
            .unwrap(),
        );
        Emergence::standard(name, construct)
    };

    let bit = FinSet::new(["0", "1"]);
    vec![
        arrow_embed("rel-a", ("A", "B"), "f"),
        arrow_embed("rel-a-relabeled", ("X", "Y"), "g"),
        flat_emergence("rel-point", one_object(), bit.clone()),
        flat_emergence("rel-point-copy", one_object(), bit.clone()),
        flat_emergence("rel-pair", parallel_pair(), bit),
        singleton_emergence("rel-singleton", 1),
    ]
}

/// Seeded generator of random valid thin emergences. The category is a
/// random poset; the underlying functions are powers of one random
/// endofunction restricted along rank images, which makes functoriality
/// automatic; each object carries one untagged random operation table.
pub struct RandomConstructs {
    pub max_objects: usize,
    pub max_carrier: usize,
    pub slots: usize,
}

impl Default for RandomConstructs {
    fn default() -> Self {
        RandomConstructs {
            max_objects: 4,
            max_carrier: 4,
            slots: 1,
        }
    }
}

impl RandomConstructs {
    pub fn generate(&self, rng: &mut StdRng, name: &str) -> Emergence {
        let n = rng.random_range(1..=self.max_objects);
        // Random DAG on 0..n by index order, then reachability closure.
        let mut le = vec![vec![false; n]; n];
        for (i, row) in le.iter_mut().enumerate() {
            row[i] = true;
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random_bool(0.5) {
                    le[i][j] = true;
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if le[i][k] && le[k][j] {
                        le[i][j] = true;
                    }
                }
            }
        }
        // Rank: longest chain below, additive along the order.
        let mut rank = vec![0usize; n];
        for i in 0..n {
            for j in 0..n {
                if i != j && le[j][i] {
                    rank[i] = rank[i].max(rank[j] + 1);
                }
            }
        }

        let base_size = rng.random_range(1..=self.max_carrier);
        let base = FinSet::new((0..base_size).map(|i| format!("e{i}")));
        let h_map: Vec<u32> = (0..base_size)
            .map(|_| rng.random_range(0..base_size) as u32)
            .collect();
        let h = FinFunction::from_index_map(base.clone(), base.clone(), h_map).unwrap();
        let power = |k: usize| -> FinFunction {
            let mut acc = FinFunction::identity(&base);
            for _ in 0..k {
                acc = h.compose_after(&acc).unwrap();
            }
            acc
        };
        let restrict = |f: &FinFunction, dom: &FinSet, cod: &FinSet| -> FinFunction {
            let pairs: Vec<(String, String)> = dom
                .iter()
                .map(|e| (e.to_string(), f.apply(e).unwrap().to_string()))
                .collect();
            FinFunction::from_pairs(
                dom.clone(),
                cod.clone(),
                pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())),
            )
            .unwrap()
        };
        let shrink = rng.random_bool(0.5);
        let carriers: Vec<FinSet> = (0..n)
            .map(|o| {
                if shrink {
                    power(rank[o]).image()
                } else {
                    base.clone()
                }
            })
            .collect();

        let mut b = CategoryBuilder::new(format!("{name}-cat"));
        for i in 0..n {
            b.object(format!("O{i}"));
        }
        let mut arrow_names: Vec<(usize, usize, String)> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if le[i][j] {
                    let nm = if i == j {
                        format!("id{i}")
                    } else {
                        format!("m{i}_{j}")
                    };
                    b.morphism(&nm, format!("O{i}"), format!("O{j}"));
                    arrow_names.push((i, j, nm));
                }
            }
        }
        for i in 0..n {
            b.identity(format!("O{i}"), format!("id{i}"));
        }
        for (i, j, nm1) in &arrow_names {
            for (j2, k, nm2) in &arrow_names {
                if j == j2 {
                    let target = arrow_names
                        .iter()
                        .find(|(x, y, _)| x == i && y == k)
                        .expect("transitive closure");
                    b.compose(nm2, nm1, &target.2);
                }
            }
        }
        let cat = Arc::new(b.build().unwrap());
        let underlying: Vec<FinFunction> = (0..cat.morphism_count())
            .map(|m| {
                let (i, j, _) = &arrow_names[m];
                let delta = rank[*j] - rank[*i];
                restrict(&power(delta), &carriers[*i], &carriers[*j])
            })
            .collect();
        let structure: Vec<Vec<OperationTable>> = carriers
            .iter()
            .map(|c| {
                (0..self.slots)
                    .map(|_| {
                        let sz = c.len();
                        let rows: Vec<(String, String, String)> = (0..sz)
                            .flat_map(|i| (0..sz).map(move |j| (i, j)))
                            .map(|(i, j)| {
                                (
                                    c.elem(i).to_string(),
                                    c.elem(j).to_string(),
                                    c.elem(rng.random_range(0..sz)).to_string(),
                                )
                            })
                            .collect();
                        OperationTable::internal_from_rows(
                            c.clone(),
                            rows.iter().map(|(a, b, d)| (a.as_str(), b.as_str(), d.as_str())),
                            BTreeSet::new(),
                        )
                        .unwrap()
                    })
                    .collect()
            })
            .collect();
        let construct = Arc::new(
            Construct::new(
                format!("{name}-construct"),
                cat,
                untagged_slots(self.slots),
                carriers,
                structure,
                underlying,
            )
            .unwrap(),
        );
        Emergence::standard(name, construct)
    }
}

/// A random functor between thin categories: a random monotone object
/// map (rejection-sampled) with the forced morphism map.
pub fn random_thin_functor(
    rng: &mut StdRng,
    source: &Arc<FinCategory>,
    target: &Arc<FinCategory>,
) -> Result<Option<Functor>> {
    let n = source.object_count();
    let k = target.object_count();
    if k == 0 {
        return Ok(if n == 0 {
            Some(Functor::identity(source.clone()))
        } else {
            None
        });
    }
    'tries: for _ in 0..256 {
        let object_map: Vec<ObjId> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let mut morphism_map = Vec::with_capacity(source.morphism_count());
        for m in source.morphism_ids() {
            let mor = source.morphism(m);
            let hom = target.hom(object_map[mor.dom], object_map[mor.cod]);
            match hom.first() {
                Some(&img) => morphism_map.push(img),
                None => continue 'tries,
            }
        }
        let f = Functor::new("rand", source.clone(), target.clone(), object_map, morphism_map)?;
        if f.validate().is_ok() {
            return Ok(Some(f));
        }
    }
    Ok(None)
}
