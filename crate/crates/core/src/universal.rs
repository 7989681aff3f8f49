//! Constructive universal objects over emergences — equalizers,
//! stabilizers, products, coproducts, pullbacks, limits of finite
//! diagrams — plus exhaustive verification of universal properties by
//! competitor enumeration, essential-uniqueness witnesses, and
//! within-construct (internal) structure reports.
//!
//! Co-equalizers, co-limits, and pushouts are verified against
//! user-supplied candidates only; no construction is attempted for
//! them.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::construct::{Construct, GuFunctor, OperationTable, PropertyTag, SignatureSlot, SlotKind, StructureSignature};
use crate::construct::check_operation_properties;
use crate::emergence::{materialize_underlying, Emergence, EmergenceRef};
use crate::fincat::{
    enumerate_functors, functor_properties, product_category, CategoryBuilder, FinCategory,
    Functor, MorId, ObjId,
};
use crate::fincat::{search_functors, SearchSpec};
use crate::finset::{tuple_label, FinFunction, FinSet};
use crate::report::{Error, Result, ValidationReport, Verdict};

/// A family of functors out of one apex emergence.
#[derive(Debug, Clone)]
pub struct SourceEmergence {
    pub apex: Emergence,
    pub legs: Vec<(Functor, Emergence)>,
}

impl SourceEmergence {
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new("source");
        for (f, target) in &self.legs {
            if f.source.name != self.apex.category().name {
                report.push("leg-domain", format!("leg `{}` does not start at the apex", f.name));
            }
            if f.target.name != target.category().name {
                report.push("leg-codomain", format!("leg `{}` does not land in its target", f.name));
            }
            report.absorb(f.validate());
        }
        report
    }
}

/// A family of functors into one apex emergence.
#[derive(Debug, Clone)]
pub struct SinkEmergence {
    pub legs: Vec<(Emergence, Functor)>,
    pub apex: Emergence,
}

impl SinkEmergence {
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new("sink");
        for (source, f) in &self.legs {
            if f.target.name != self.apex.category().name {
                report.push("leg-codomain", format!("leg `{}` does not land in the apex", f.name));
            }
            if f.source.name != source.category().name {
                report.push("leg-domain", format!("leg `{}` does not start at its source", f.name));
            }
            report.absorb(f.validate());
        }
        report
    }
}

/// A finite diagram of emergences: a scheme category, one emergence per
/// scheme object, one functor per scheme morphism, subject to the
/// quasi-functor laws.
#[derive(Debug, Clone)]
pub struct DiagramEmergence {
    pub scheme: Arc<FinCategory>,
    pub nodes: Vec<Emergence>,
    pub edges: Vec<Functor>,
}

impl DiagramEmergence {
    pub fn new(scheme: Arc<FinCategory>, nodes: Vec<Emergence>, edges: Vec<Functor>) -> Result<Self> {
        if nodes.len() != scheme.object_count() {
            return Err(Error::structural("one emergence required per scheme object"));
        }
        if edges.len() != scheme.morphism_count() {
            return Err(Error::structural("one functor required per scheme morphism"));
        }
        Ok(DiagramEmergence { scheme, nodes, edges })
    }

    /// Quasi-functor laws: identities to identities, edges typed by the
    /// scheme, and composition preserved.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new("diagram");
        for m in self.scheme.morphism_ids() {
            let mor = self.scheme.morphism(m);
            let e = &self.edges[m];
            if e.source.name != self.nodes[mor.dom].category().name
                || e.target.name != self.nodes[mor.cod].category().name
            {
                report.push(
                    "edge-endpoints",
                    format!("edge `{}` is not typed {} → {}", mor.name, mor.dom, mor.cod),
                );
            }
            report.absorb(e.validate());
        }
        if !report.is_ok() {
            return report;
        }
        for o in 0..self.scheme.object_count() {
            let id = self.scheme.identity_of(o);
            let e = &self.edges[id];
            let ident = Functor::identity(self.nodes[o].category().clone());
            if e.object_map != ident.object_map || e.morphism_map != ident.morphism_map {
                report.push(
                    "identity-edge",
                    format!("scheme identity of `{}` is not the identity functor", self.scheme.object_name(o)),
                );
            }
        }
        for g in self.scheme.morphism_ids() {
            for f in self.scheme.morphism_ids() {
                if let Some(h) = self.scheme.compose(g, f) {
                    match self.edges[g].compose_after(&self.edges[f]) {
                        Ok(c) => {
                            if c.object_map != self.edges[h].object_map
                                || c.morphism_map != self.edges[h].morphism_map
                            {
                                report.push(
                                    "composition-edge",
                                    format!(
                                        "edges of ({}, {}) do not compose to the edge of their composite",
                                        self.scheme.morphism(g).name,
                                        self.scheme.morphism(f).name
                                    ),
                                );
                            }
                        }
                        Err(_) => report.push(
                            "composition-edge",
                            format!(
                                "edges of ({}, {}) are not composable",
                                self.scheme.morphism(g).name,
                                self.scheme.morphism(f).name
                            ),
                        ),
                    }
                }
            }
        }
        report
    }
}

/// Restrict a construct to subsets of its objects and morphisms,
/// producing the sub-construct and its inclusion functor. Callers are
/// responsible for handing in closed data (identities of kept objects,
/// composites of kept morphisms).
fn restrict_construct(
    name: &str,
    base: &Emergence,
    keep_objs: &[ObjId],
    keep_mors: &[MorId],
) -> Result<(Emergence, Functor)> {
    let cat = base.category();
    let mut b = CategoryBuilder::new(name);
    for &o in keep_objs {
        b.object(cat.object_name(o));
    }
    for &m in keep_mors {
        let mor = cat.morphism(m);
        if !keep_objs.contains(&mor.dom) || !keep_objs.contains(&mor.cod) {
            return Err(Error::Internal("restriction keeps a morphism but drops an endpoint".into()));
        }
        b.morphism(&mor.name, cat.object_name(mor.dom), cat.object_name(mor.cod));
    }
    for &o in keep_objs {
        let id = cat.identity_of(o);
        if !keep_mors.contains(&id) {
            return Err(Error::Internal("restriction drops an identity of a kept object".into()));
        }
        b.identity(cat.object_name(o), &cat.morphism(id).name);
    }
    for &g in keep_mors {
        for &f in keep_mors {
            if let Some(h) = cat.compose(g, f) {
                if !keep_mors.contains(&h) {
                    return Err(Error::Internal("restriction is not closed under composition".into()));
                }
                b.compose(&cat.morphism(g).name, &cat.morphism(f).name, &cat.morphism(h).name);
            }
        }
    }
    let sub_cat = Arc::new(b.build()?);
    let carriers = keep_objs.iter().map(|&o| base.construct.carrier(o).clone()).collect();
    let structure = keep_objs.iter().map(|&o| base.construct.tables(o).to_vec()).collect();
    let underlying = keep_mors.iter().map(|&m| base.construct.underlying(m).clone()).collect();
    let construct = Arc::new(Construct::new(
        name,
        sub_cat.clone(),
        base.construct.signature.clone(),
        carriers,
        structure,
        underlying,
    )?);
    let gu_assignment: Vec<FinFunction> =
        keep_mors.iter().map(|&m| base.gu.on_morphism(m).clone()).collect();
    let gu = GuFunctor::new(construct.clone(), gu_assignment)?;
    let sub = Emergence::new(name, construct, gu)?;
    let inclusion = Functor::new(
        format!("incl_{name}"),
        sub.category().clone(),
        cat.clone(),
        keep_objs.to_vec(),
        keep_mors.to_vec(),
    )?;
    Ok((sub, inclusion))
}

#[derive(Debug, Clone)]
pub struct EqualizerResult {
    pub emergence: Emergence,
    pub inclusion: Functor,
    /// Empty universal objects are legal output but worth flagging: an
    /// empty construct has no structured objects.
    pub empty: bool,
}

/// The n-ary equalizer emergence of parallel functors out of `base`:
/// the sub-construct on the objects and morphisms where all functors
/// agree, with restricted structure and restricted underlying functor.
/// The case n = 2 is the plain equalizer.
pub fn equalizer_emergence(base: &Emergence, parallel: &[Functor]) -> Result<EqualizerResult> {
    if parallel.len() < 2 {
        return Err(Error::structural("an equalizer needs at least two parallel functors"));
    }
    let cat = base.category();
    for f in parallel {
        if f.source.name != cat.name {
            return Err(Error::structural(format!(
                "functor `{}` does not start at `{}`",
                f.name, cat.name
            )));
        }
        if f.target.name != parallel[0].target.name {
            return Err(Error::structural("equalizer functors must share a codomain"));
        }
    }
    let first = &parallel[0];
    let keep_objs: Vec<ObjId> = (0..cat.object_count())
        .filter(|&o| parallel.iter().all(|f| f.on_object(o) == first.on_object(o)))
        .collect();
    let keep_mors: Vec<MorId> = cat
        .morphism_ids()
        .filter(|&m| parallel.iter().all(|f| f.on_morphism(m) == first.on_morphism(m)))
        .collect();
    let name = format!("eq({})", base.name);
    let (emergence, inclusion) = restrict_construct(&name, base, &keep_objs, &keep_mors)?;
    let empty = keep_objs.is_empty();
    Ok(EqualizerResult {
        emergence,
        inclusion,
        empty,
    })
}

/// Where two underlying readings of the same construct agree: the
/// equalizer of the two functors realized in a shared finite fragment
/// of the set category.
pub fn stabilizer(
    e: &Emergence,
    first: &GuFunctor,
    second: &GuFunctor,
    budget: u64,
) -> Result<EqualizerResult> {
    if first.construct.name != e.construct.name || second.construct.name != e.construct.name {
        return Err(Error::structural("stabilizer functors must read the same construct"));
    }
    let left = Emergence::new(format!("{}!1", e.name), e.construct.clone(), first.clone())?;
    let right = Emergence::new(format!("{}!2", e.name), e.construct.clone(), second.clone())?;
    let (_fragment, functors) = materialize_underlying(
        &[EmergenceRef::Plain(&left), EmergenceRef::Plain(&right)],
        budget,
    )?;
    equalizer_emergence(e, &functors)
}

/// One competitor's mediator tally.
#[derive(Debug, Clone, Serialize)]
pub struct MediatorRecord {
    pub competitor: String,
    pub count: usize,
    pub ok: bool,
}

/// Verdict of a universal-property verification: the commutation layer,
/// one mediator record per enumerated competitor, and the conjunction.
#[derive(Debug, Clone, Serialize)]
pub struct UniversalVerdict {
    pub kind: String,
    pub commutes: bool,
    pub mediators: Vec<MediatorRecord>,
    pub overall: bool,
    pub notes: Vec<String>,
}

impl UniversalVerdict {
    fn new(kind: &str) -> Self {
        UniversalVerdict {
            kind: kind.into(),
            commutes: true,
            mediators: Vec::new(),
            overall: true,
            notes: Vec::new(),
        }
    }

    fn finish(mut self) -> Self {
        self.overall = self.commutes && self.mediators.iter().all(|m| m.ok);
        self
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "{}: commutes={} mediators={} overall={}\n",
            self.kind,
            self.commutes,
            self.mediators.len(),
            self.overall
        );
        for m in &self.mediators {
            if !m.ok {
                out.push_str(&format!("  {} -> {} mediator(s)\n", m.competitor, m.count));
            }
        }
        for n in &self.notes {
            out.push_str(&format!("  note: {n}\n"));
        }
        out
    }
}

/// Key identifying a cone/cocone boundary: the leg-composite maps.
type Boundary = Vec<(Vec<ObjId>, Vec<MorId>)>;

fn boundary_through(legs: &[&Functor], mediator: &Functor, outward: bool) -> Result<Boundary> {
    legs.iter()
        .map(|leg| {
            let c = if outward {
                // Source shape: leg ∘ mediator.
                leg.compose_after(mediator)?
            } else {
                // Sink shape: mediator ∘ leg.
                mediator.compose_after(leg)?
            };
            Ok((c.object_map, c.morphism_map))
        })
        .collect()
}

fn functor_key(f: &Functor) -> (Vec<ObjId>, Vec<MorId>) {
    (f.object_map.clone(), f.morphism_map.clone())
}

/// Candidate shapes for `verify_universal`. Construction operations in
/// this module emit these shapes; co-shapes exist for verification of
/// user-supplied candidates only.
pub enum UniversalCandidate<'a> {
    /// inclusion E: 𝔈 → 𝒜 against parallel functors 𝒜 → ℬ (n ≥ 2).
    Equalizer {
        inclusion: &'a Functor,
        parallel: &'a [Functor],
    },
    /// projections π_i: P → A_i.
    Product { projections: &'a [Functor] },
    /// injections ι_i: A_i → C.
    Coproduct { injections: &'a [Functor] },
    /// legs P → A, P → B over the cospan of underlying functors into
    /// the set category.
    Pullback {
        to_a: &'a Functor,
        to_b: &'a Functor,
        a: &'a Emergence,
        b: &'a Emergence,
    },
    /// legs L → D_i natural for the diagram.
    Limit {
        diagram: &'a DiagramEmergence,
        legs: &'a [Functor],
    },
    /// candidate co-equalizer C: ℬ → 𝒞 of parallel functors 𝒜 → ℬ.
    CoequalizerCandidate {
        co: &'a Functor,
        parallel: &'a [Functor],
    },
    /// candidate co-limit: legs D_i → apex natural for the diagram.
    ColimitCandidate {
        diagram: &'a DiagramEmergence,
        legs: &'a [Functor],
    },
    /// candidate pushout square: span functors F: 𝒞 → ℬ, G: 𝒞 → 𝒜 with
    /// the sink of underlying functors into the set category.
    PushoutCandidate {
        span_to_b: &'a Functor,
        span_to_a: &'a Functor,
        a: &'a Emergence,
        b: &'a Emergence,
    },
    /// jointly left-cancellable family out of one apex.
    MonoSource { legs: &'a [Functor] },
}

/// Exhaustively verify a universal property against every competitor
/// cone (or cocone) built from the battery categories: commutation,
/// then existence and uniqueness of mediators, counted exactly.
pub fn verify_universal(
    candidate: &UniversalCandidate<'_>,
    battery: &[Arc<FinCategory>],
    budget: u64,
) -> Result<UniversalVerdict> {
    match candidate {
        UniversalCandidate::Equalizer { inclusion, parallel } => {
            let mut verdict = UniversalVerdict::new("equalizer");
            let first = &parallel[0];
            for f in parallel.iter().skip(1) {
                let lhs = first.compose_after(inclusion)?;
                let rhs = f.compose_after(inclusion)?;
                if functor_key(&lhs) != functor_key(&rhs) {
                    verdict.commutes = false;
                    verdict.notes.push(format!(
                        "{} ∘ E differs from {} ∘ E",
                        first.name, f.name
                    ));
                }
            }
            let base = &first.source;
            for x in battery {
                // Mediator bucket: functors X → 𝔈 keyed by E ∘ M.
                let mut buckets: HashMap<Boundary, usize> = HashMap::new();
                for m in enumerate_functors(x, &inclusion.source, budget)? {
                    *buckets
                        .entry(boundary_through(&[inclusion], &m, true)?)
                        .or_default() += 1;
                }
                for (i, t) in enumerate_functors(x, base, budget)?.into_iter().enumerate() {
                    let equalizes = parallel
                        .windows(2)
                        .map(|w| {
                            Ok(functor_key(&w[0].compose_after(&t)?)
                                == functor_key(&w[1].compose_after(&t)?))
                        })
                        .collect::<Result<Vec<bool>>>()?
                        .into_iter()
                        .all(|b| b);
                    if !equalizes {
                        continue;
                    }
                    let count = buckets
                        .get(&vec![functor_key(&t)])
                        .copied()
                        .unwrap_or(0);
                    verdict.mediators.push(MediatorRecord {
                        competitor: format!("{}#{i}", x.name),
                        count,
                        ok: count == 1,
                    });
                }
            }
            Ok(verdict.finish())
        }
        UniversalCandidate::Product { projections } => {
            let mut verdict = UniversalVerdict::new("product");
            let apex = &projections[0].source;
            for x in battery {
                let mut buckets: HashMap<Boundary, usize> = HashMap::new();
                let legs: Vec<&Functor> = projections.iter().collect();
                for m in enumerate_functors(x, apex, budget)? {
                    *buckets.entry(boundary_through(&legs, &m, true)?).or_default() += 1;
                }
                // Competitor cones: arbitrary tuples of functors into the
                // factors.
                let factor_functors: Vec<Vec<Functor>> = projections
                    .iter()
                    .map(|p| enumerate_functors(x, &p.target, budget))
                    .collect::<Result<_>>()?;
                for (cone_no, key) in mixed_radix(&factor_functors) {
                    let count = buckets.get(&key).copied().unwrap_or(0);
                    verdict.mediators.push(MediatorRecord {
                        competitor: format!("{}#{cone_no}", x.name),
                        count,
                        ok: count == 1,
                    });
                }
            }
            Ok(verdict.finish())
        }
        UniversalCandidate::Coproduct { injections } => {
            let mut verdict = UniversalVerdict::new("coproduct");
            let apex = &injections[0].target;
            for x in battery {
                let mut buckets: HashMap<Boundary, usize> = HashMap::new();
                let legs: Vec<&Functor> = injections.iter().collect();
                for m in enumerate_functors(apex, x, budget)? {
                    *buckets.entry(boundary_through(&legs, &m, false)?).or_default() += 1;
                }
                let factor_functors: Vec<Vec<Functor>> = injections
                    .iter()
                    .map(|i| enumerate_functors(&i.source, x, budget))
                    .collect::<Result<_>>()?;
                for (cone_no, key) in mixed_radix(&factor_functors) {
                    let count = buckets.get(&key).copied().unwrap_or(0);
                    verdict.mediators.push(MediatorRecord {
                        competitor: format!("{}#{cone_no}", x.name),
                        count,
                        ok: count == 1,
                    });
                }
            }
            Ok(verdict.finish())
        }
        UniversalCandidate::Pullback { to_a, to_b, a, b } => {
            let mut verdict = UniversalVerdict::new("pullback");
            // Square over the set category commutes: U_A ∘ Ḡ = U_B ∘ F̄.
            let apex = &to_a.source;
            for o in 0..apex.object_count() {
                if a.gu.object_set(to_a.on_object(o)) != b.gu.object_set(to_b.on_object(o)) {
                    verdict.commutes = false;
                }
            }
            for m in apex.morphism_ids() {
                if a.gu.on_morphism(to_a.on_morphism(m)) != b.gu.on_morphism(to_b.on_morphism(m)) {
                    verdict.commutes = false;
                }
            }
            for x in battery {
                let mut buckets: HashMap<Boundary, usize> = HashMap::new();
                for m in enumerate_functors(x, apex, budget)? {
                    *buckets.entry(boundary_through(&[to_a, to_b], &m, true)?).or_default() += 1;
                }
                let gs = enumerate_functors(x, a.category(), budget)?;
                let fs = enumerate_functors(x, b.category(), budget)?;
                let mut cone_no = 0usize;
                for g in &gs {
                    'fs: for f in &fs {
                        for o in 0..x.object_count() {
                            if a.gu.object_set(g.on_object(o)) != b.gu.object_set(f.on_object(o)) {
                                continue 'fs;
                            }
                        }
                        for m in x.morphism_ids() {
                            if a.gu.on_morphism(g.on_morphism(m))
                                != b.gu.on_morphism(f.on_morphism(m))
                            {
                                continue 'fs;
                            }
                        }
                        let key = vec![functor_key(g), functor_key(f)];
                        let count = buckets.get(&key).copied().unwrap_or(0);
                        verdict.mediators.push(MediatorRecord {
                            competitor: format!("{}#{cone_no}", x.name),
                            count,
                            ok: count == 1,
                        });
                        cone_no += 1;
                    }
                }
            }
            Ok(verdict.finish())
        }
        UniversalCandidate::Limit { diagram, legs } => {
            let mut verdict = UniversalVerdict::new("limit");
            // Naturality of the candidate source.
            for sm in diagram.scheme.morphism_ids() {
                let mor = diagram.scheme.morphism(sm);
                let via = diagram.edges[sm].compose_after(&legs[mor.dom])?;
                if functor_key(&via) != functor_key(&legs[mor.cod]) {
                    verdict.commutes = false;
                    verdict.notes.push(format!(
                        "legs are not natural at scheme morphism `{}`",
                        mor.name
                    ));
                }
            }
            let apex = &legs[0].source;
            for x in battery {
                let mut buckets: HashMap<Boundary, usize> = HashMap::new();
                let leg_refs: Vec<&Functor> = legs.iter().collect();
                for m in enumerate_functors(x, apex, budget)? {
                    *buckets.entry(boundary_through(&leg_refs, &m, true)?).or_default() += 1;
                }
                let node_functors: Vec<Vec<Functor>> = diagram
                    .nodes
                    .iter()
                    .map(|n| enumerate_functors(x, n.category(), budget))
                    .collect::<Result<_>>()?;
                let mut cone_no = 0usize;
                for (_idx, key) in natural_cones(diagram, &node_functors)? {
                    let count = buckets.get(&key).copied().unwrap_or(0);
                    verdict.mediators.push(MediatorRecord {
                        competitor: format!("{}#{cone_no}", x.name),
                        count,
                        ok: count == 1,
                    });
                    cone_no += 1;
                }
            }
            Ok(verdict.finish())
        }
        UniversalCandidate::CoequalizerCandidate { co, parallel } => {
            let mut verdict = UniversalVerdict::new("coequalizer-candidate");
            let first = &parallel[0];
            for f in parallel.iter().skip(1) {
                let lhs = co.compose_after(first)?;
                let rhs = co.compose_after(f)?;
                if functor_key(&lhs) != functor_key(&rhs) {
                    verdict.commutes = false;
                }
            }
            let mid = &co.source;
            for x in battery {
                let mut buckets: HashMap<Boundary, usize> = HashMap::new();
                for m in enumerate_functors(&co.target, x, budget)? {
                    *buckets.entry(vec![functor_key(&m.compose_after(co)?)]).or_default() += 1;
                }
                for (i, t) in enumerate_functors(mid, x, budget)?.into_iter().enumerate() {
                    let coequalizes = parallel
                        .windows(2)
                        .map(|w| {
                            Ok(functor_key(&t.compose_after(&w[0])?)
                                == functor_key(&t.compose_after(&w[1])?))
                        })
                        .collect::<Result<Vec<bool>>>()?
                        .into_iter()
                        .all(|b| b);
                    if !coequalizes {
                        continue;
                    }
                    let count = buckets.get(&vec![functor_key(&t)]).copied().unwrap_or(0);
                    verdict.mediators.push(MediatorRecord {
                        competitor: format!("{}#{i}", x.name),
                        count,
                        ok: count == 1,
                    });
                }
            }
            Ok(verdict.finish())
        }
        UniversalCandidate::ColimitCandidate { diagram, legs } => {
            let mut verdict = UniversalVerdict::new("colimit-candidate");
            for sm in diagram.scheme.morphism_ids() {
                let mor = diagram.scheme.morphism(sm);
                let via = legs[mor.cod].compose_after(&diagram.edges[sm])?;
                if functor_key(&via) != functor_key(&legs[mor.dom]) {
                    verdict.commutes = false;
                    verdict.notes.push(format!(
                        "legs are not natural at scheme morphism `{}`",
                        mor.name
                    ));
                }
            }
            let apex = &legs[0].target;
            for x in battery {
                let mut buckets: HashMap<Boundary, usize> = HashMap::new();
                let leg_refs: Vec<&Functor> = legs.iter().collect();
                for m in enumerate_functors(apex, x, budget)? {
                    *buckets.entry(boundary_through(&leg_refs, &m, false)?).or_default() += 1;
                }
                let node_functors: Vec<Vec<Functor>> = diagram
                    .nodes
                    .iter()
                    .map(|n| enumerate_functors(n.category(), x, budget))
                    .collect::<Result<_>>()?;
                let mut cone_no = 0usize;
                for (_idx, key) in natural_cocones(diagram, &node_functors)? {
                    let count = buckets.get(&key).copied().unwrap_or(0);
                    verdict.mediators.push(MediatorRecord {
                        competitor: format!("{}#{cone_no}", x.name),
                        count,
                        ok: count == 1,
                    });
                    cone_no += 1;
                }
            }
            Ok(verdict.finish())
        }
        UniversalCandidate::PushoutCandidate { span_to_b, span_to_a, a, b } => {
            let mut verdict = UniversalVerdict::new("pushout-candidate");
            // Square: U_A ∘ G = U_B ∘ F over the shared span source.
            let span_src = &span_to_a.source;
            for o in 0..span_src.object_count() {
                if a.gu.object_set(span_to_a.on_object(o))
                    != b.gu.object_set(span_to_b.on_object(o))
                {
                    verdict.commutes = false;
                }
            }
            for m in span_src.morphism_ids() {
                if a.gu.on_morphism(span_to_a.on_morphism(m))
                    != b.gu.on_morphism(span_to_b.on_morphism(m))
                {
                    verdict.commutes = false;
                }
            }
            let (fragment, functors) =
                materialize_underlying(&[EmergenceRef::Plain(a), EmergenceRef::Plain(b)], budget)?;
            let frag_cat = functors[0].target.clone();
            let (u_a, u_b) = (&functors[0], &functors[1]);
            for x in battery {
                let mut buckets: HashMap<Boundary, usize> = HashMap::new();
                for m in enumerate_functors(&frag_cat, x, budget)? {
                    buckets
                        .entry(vec![
                            functor_key(&m.compose_after(u_a)?),
                            functor_key(&m.compose_after(u_b)?),
                        ])
                        .and_modify(|c| *c += 1)
                        .or_insert(1);
                }
                let into_a = enumerate_functors(a.category(), x, budget)?;
                let into_b = enumerate_functors(b.category(), x, budget)?;
                let mut cone_no = 0usize;
                for fa in &into_a {
                    for fb in &into_b {
                        let lhs = fa.compose_after(span_to_a)?;
                        let rhs = fb.compose_after(span_to_b)?;
                        if functor_key(&lhs) != functor_key(&rhs) {
                            continue;
                        }
                        let key = vec![functor_key(fa), functor_key(fb)];
                        let count = buckets.get(&key).copied().unwrap_or(0);
                        verdict.mediators.push(MediatorRecord {
                            competitor: format!("{}#{cone_no}", x.name),
                            count,
                            ok: count == 1,
                        });
                        cone_no += 1;
                    }
                }
            }
            let _ = fragment;
            Ok(verdict.finish())
        }
        UniversalCandidate::MonoSource { legs } => {
            let mut verdict = UniversalVerdict::new("mono-source");
            let apex = &legs[0].source;
            for x in battery {
                let fs = enumerate_functors(x, apex, budget)?;
                for (i, r) in fs.iter().enumerate() {
                    for s in &fs[i + 1..] {
                        let mut all_equal = true;
                        for leg in legs.iter() {
                            if functor_key(&leg.compose_after(r)?)
                                != functor_key(&leg.compose_after(s)?)
                            {
                                all_equal = false;
                                break;
                            }
                        }
                        if all_equal {
                            verdict.commutes = false;
                            verdict.notes.push(format!(
                                "distinct functors from `{}` agree through every leg",
                                x.name
                            ));
                        }
                    }
                }
            }
            if verdict.commutes {
                verdict.notes.push("no violating parallel pair exists".into());
            }
            Ok(verdict.finish())
        }
    }
}


/// Iterate the cartesian product of per-slot functor lists.
fn mixed_radix(lists: &[Vec<Functor>]) -> Vec<(usize, Boundary)> {
    let mut out = Vec::new();
    if lists.iter().any(|l| l.is_empty()) {
        return out;
    }
    let mut idx = vec![0usize; lists.len()];
    let mut n = 0usize;
    loop {
        out.push((
            n,
            idx.iter().enumerate().map(|(i, &j)| functor_key(&lists[i][j])).collect(),
        ));
        n += 1;
        let mut d = lists.len();
        loop {
            if d == 0 {
                return out;
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < lists[d].len() {
                break;
            }
            idx[d] = 0;
            if d == 0 {
                return out;
            }
        }
    }
}

/// Natural cones from one competitor apex: tuples of node functors
/// commuting with every diagram edge.
fn natural_cones(
    diagram: &DiagramEmergence,
    node_functors: &[Vec<Functor>],
) -> Result<Vec<(Vec<usize>, Boundary)>> {
    let mut out = Vec::new();
    for (idx, key) in mixed_radix_indices(node_functors) {
        let mut natural = true;
        for sm in diagram.scheme.morphism_ids() {
            let mor = diagram.scheme.morphism(sm);
            let via = diagram.edges[sm].compose_after(&node_functors[mor.dom][idx[mor.dom]])?;
            if functor_key(&via) != functor_key(&node_functors[mor.cod][idx[mor.cod]]) {
                natural = false;
                break;
            }
        }
        if natural {
            out.push((idx, key));
        }
    }
    Ok(out)
}

fn natural_cocones(
    diagram: &DiagramEmergence,
    node_functors: &[Vec<Functor>],
) -> Result<Vec<(Vec<usize>, Boundary)>> {
    let mut out = Vec::new();
    for (idx, key) in mixed_radix_indices(node_functors) {
        let mut natural = true;
        for sm in diagram.scheme.morphism_ids() {
            let mor = diagram.scheme.morphism(sm);
            let via = node_functors[mor.cod][idx[mor.cod]].compose_after(&diagram.edges[sm])?;
            if functor_key(&via) != functor_key(&node_functors[mor.dom][idx[mor.dom]]) {
                natural = false;
                break;
            }
        }
        if natural {
            out.push((idx, key));
        }
    }
    Ok(out)
}

fn mixed_radix_indices(lists: &[Vec<Functor>]) -> Vec<(Vec<usize>, Boundary)> {
    let mut out = Vec::new();
    if lists.iter().any(|l| l.is_empty()) {
        return out;
    }
    let mut idx = vec![0usize; lists.len()];
    loop {
        out.push((
            idx.clone(),
            idx.iter().enumerate().map(|(i, &j)| functor_key(&lists[i][j])).collect(),
        ));
        let mut d = lists.len();
        loop {
            if d == 0 {
                return out;
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < lists[d].len() {
                break;
            }
            idx[d] = 0;
            if d == 0 {
                return out;
            }
        }
    }
}

/// Find the connecting isomorphism between two verified universal
/// candidates of the same shape: an isomorphism T with legs1 ∘ T =
/// legs2. Two candidates that both verified universal always admit
/// one, so exhaustion without a witness on verified inputs is an
/// internal error.
pub fn essential_uniqueness(
    legs1: &[Functor],
    legs2: &[Functor],
    budget: u64,
) -> Result<Option<Functor>> {
    if legs1.len() != legs2.len() || legs1.is_empty() {
        return Err(Error::structural("leg families must be non-empty and equal length"));
    }
    let apex1 = &legs1[0].source;
    let apex2 = &legs2[0].source;
    if apex1.object_count() != apex2.object_count()
        || apex1.morphism_count() != apex2.morphism_count()
    {
        return Ok(None);
    }
    let mut object_candidates = Vec::with_capacity(apex2.object_count());
    for o in 0..apex2.object_count() {
        let cands: Vec<ObjId> = (0..apex1.object_count())
            .filter(|&t| legs1.iter().zip(legs2.iter()).all(|(l1, l2)| l1.on_object(t) == l2.on_object(o)))
            .collect();
        object_candidates.push(cands);
    }
    let spec = SearchSpec {
        source: apex2,
        target: apex1,
        object_candidates,
        morphism_ok: Box::new(move |m, img| {
            legs1
                .iter()
                .zip(legs2.iter())
                .all(|(l1, l2)| l1.on_morphism(img) == l2.on_morphism(m))
        }),
        bijective: true,
        budget,
        limit: Some(1),
    };
    let found = search_functors(&spec)?;
    Ok(found.into_iter().next().map(|mut f| {
        f.name = "connecting-iso".into();
        f
    }))
}

#[derive(Debug, Clone)]
pub struct ProductEmergenceResult {
    pub emergence: Emergence,
    pub projections: Vec<Functor>,
}

/// Cartesian product of emergences: the product category, componentwise
/// carriers, the concatenation of factor signatures (orders add), and
/// the standard underlying functor. Each lifted slot acts on its own
/// coordinate and leaves the others at the left argument; the slot's
/// tags are re-verified on the lifted tables and the slot keeps exactly
/// the tags that survive on every product object.
pub fn product_emergence(factors: &[Emergence], budget: u64) -> Result<ProductEmergenceResult> {
    if factors.is_empty() {
        return Err(Error::structural("product of zero emergences is not supported"));
    }
    if factors.len() == 1 {
        let e = factors[0].clone();
        let ident = Functor::identity(e.category().clone());
        return Ok(ProductEmergenceResult {
            emergence: e,
            projections: vec![ident],
        });
    }
    let cats: Vec<Arc<FinCategory>> = factors.iter().map(|f| f.category().clone()).collect();
    let product = product_category(&cats, budget)?;
    let cat = product.category.clone();
    let n_obj = cat.object_count();

    // Slot plan: for each factor, its slots renamed with a factor prefix
    // (distributivity targets renamed alongside).
    let mut slot_plan: Vec<(usize, usize, String, SlotKind)> = Vec::new();
    for (fi, f) in factors.iter().enumerate() {
        for (si, slot) in f.construct.signature.slots.iter().enumerate() {
            slot_plan.push((
                fi,
                si,
                format!("f{}.{}", fi + 1, slot.name),
                slot.kind.clone(),
            ));
        }
    }
    let rename = |fi: usize, tag: &PropertyTag| -> PropertyTag {
        match tag {
            PropertyTag::DistributesOver(s) => {
                PropertyTag::DistributesOver(format!("f{}.{}", fi + 1, s))
            }
            other => other.clone(),
        }
    };

    // Carriers: componentwise products under the tuple encoding.
    let mut carriers: Vec<FinSet> = Vec::with_capacity(n_obj);
    let mut label_tables: Vec<Vec<Vec<String>>> = Vec::with_capacity(n_obj);
    for o in 0..n_obj {
        let comps = product.object_components(o);
        // Element tuples in mixed-radix order over the factor carriers.
        let factor_sets: Vec<&FinSet> =
            comps.iter().enumerate().map(|(i, &c)| factors[i].construct.carrier(c)).collect();
        let mut tuples: Vec<Vec<String>> = vec![Vec::new()];
        for fs in &factor_sets {
            let mut next = Vec::new();
            for t in &tuples {
                for e in fs.iter() {
                    let mut t2 = t.clone();
                    t2.push(e.to_string());
                    next.push(t2);
                }
            }
            tuples = next;
        }
        let labels: Vec<String> = tuples
            .iter()
            .map(|t| tuple_label(&t.iter().map(|s| s.as_str()).collect::<Vec<_>>()))
            .collect();
        carriers.push(FinSet::new(labels));
        label_tables.push(tuples);
    }
    let encode = |tuple: &[String]| -> String {
        tuple_label(&tuple.iter().map(|s| s.as_str()).collect::<Vec<_>>())
    };

    // Structure: lift each planned slot onto each product object.
    let mut structure: Vec<Vec<OperationTable>> = Vec::with_capacity(n_obj);
    for o in 0..n_obj {
        let comps = product.object_components(o);
        let tuples = &label_tables[o];
        let carrier = &carriers[o];
        let mut tables = Vec::with_capacity(slot_plan.len());
        for (fi, si, _, kind) in &slot_plan {
            let factor_table = &factors[*fi].construct.tables(comps[*fi])[*si];
            let table = match kind {
                SlotKind::Internal => {
                    let mut rows: Vec<(String, String, String)> = Vec::new();
                    for x in tuples {
                        for y in tuples {
                            let fs = factors[*fi].construct.carrier(comps[*fi]);
                            let xi = fs.index_of(&x[*fi]).expect("element");
                            let yi = fs.index_of(&y[*fi]).expect("element");
                            let zi = factor_table.apply_internal(xi, yi);
                            let mut z = x.clone();
                            z[*fi] = fs.elem(zi).to_string();
                            rows.push((encode(x), encode(y), encode(&z)));
                        }
                    }
                    OperationTable::internal_from_rows(
                        carrier.clone(),
                        rows.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())),
                        BTreeSet::new(),
                    )?
                }
                SlotKind::External(scalars) => {
                    let mut rows: Vec<(String, String, String)> = Vec::new();
                    for k in scalars.iter() {
                        let ki = scalars.index_of(k).expect("scalar");
                        for x in tuples {
                            let fs = factors[*fi].construct.carrier(comps[*fi]);
                            let xi = fs.index_of(&x[*fi]).expect("element");
                            let zi = factor_table.apply_external(ki, xi);
                            let mut z = x.clone();
                            z[*fi] = fs.elem(zi).to_string();
                            rows.push((k.to_string(), encode(x), encode(&z)));
                        }
                    }
                    OperationTable::external_from_rows(
                        scalars.clone(),
                        carrier.clone(),
                        rows.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())),
                        BTreeSet::new(),
                    )?
                }
            };
            tables.push(table);
        }
        structure.push(tables);
    }

    // Tags per slot: the factor's tags that survive verification on
    // every product object.
    let mut slot_tags: Vec<BTreeSet<PropertyTag>> = Vec::with_capacity(slot_plan.len());
    for (slot_idx, (fi, si, _, _)) in slot_plan.iter().enumerate() {
        let wanted: BTreeSet<PropertyTag> = factors[*fi].construct.signature.slots[*si]
            .tags
            .iter()
            .map(|t| rename(*fi, t))
            .collect();
        let mut kept = wanted.clone();
        for tables in structure.iter().take(n_obj) {
            let siblings: Vec<(String, &OperationTable)> = slot_plan
                .iter()
                .enumerate()
                .map(|(j, (_, _, name, _))| (name.clone(), &tables[j]))
                .collect();
            let honest = check_operation_properties(&tables[slot_idx], &siblings);
            kept = kept.intersection(&honest).cloned().collect();
        }
        slot_tags.push(if n_obj == 0 { wanted } else { kept });
    }
    for tables in structure.iter_mut() {
        for (j, t) in tables.iter_mut().enumerate() {
            t.declared_tags = slot_tags[j].clone();
        }
    }
    let signature = StructureSignature::new(
        slot_plan
            .iter()
            .zip(slot_tags)
            .map(|((_, _, name, kind), tags)| SignatureSlot {
                name: name.clone(),
                kind: kind.clone(),
                tags,
            })
            .collect(),
    )?;

    // Underlying: componentwise function tables under the encoding.
    let mut underlying = Vec::with_capacity(cat.morphism_count());
    for m in cat.morphism_ids() {
        let comps = product.morphism_components(m);
        let mor = cat.morphism(m);
        let dom_tuples = &label_tables[mor.dom];
        let mut rows = Vec::with_capacity(dom_tuples.len());
        for x in dom_tuples {
            let img: Vec<String> = comps
                .iter()
                .enumerate()
                .map(|(i, &c)| {
                    factors[i]
                        .construct
                        .underlying(c)
                        .apply(&x[i])
                        .expect("element of factor carrier")
                        .to_string()
                })
                .collect();
            rows.push((encode(x), encode(&img)));
        }
        underlying.push(FinFunction::from_pairs(
            carriers[mor.dom].clone(),
            carriers[mor.cod].clone(),
            rows.iter().map(|(a, b)| (a.as_str(), b.as_str())),
        )?);
    }

    let name = factors.iter().map(|f| f.name.clone()).collect::<Vec<_>>().join("×");
    let construct = Arc::new(Construct::new(
        name.clone(),
        cat,
        signature,
        carriers,
        structure,
        underlying,
    )?);
    let emergence = Emergence::standard(name, construct);
    Ok(ProductEmergenceResult {
        emergence,
        projections: product.projections,
    })
}

#[derive(Debug, Clone)]
pub struct CoproductEmergenceResult {
    pub injections: Vec<Functor>,
    pub emergence: Emergence,
}

impl CoproductEmergenceResult {
    /// The coproduct as a sink: one injection per factor into the apex.
    pub fn as_sink(&self, factors: &[Emergence]) -> SinkEmergence {
        SinkEmergence {
            legs: factors
                .iter()
                .cloned()
                .zip(self.injections.iter().cloned())
                .collect(),
            apex: self.emergence.clone(),
        }
    }
}

/// Tagged disjoint union of emergences sharing one signature shape:
/// objects and morphisms are copied with a factor tag, homs across tags
/// are empty, injections embed each factor. The shared signature (slot
/// kinds and tags; names from the first factor) is required so the
/// union is again a construct.
pub fn coproduct_emergence(factors: &[Emergence]) -> Result<CoproductEmergenceResult> {
    if factors.is_empty() {
        return Err(Error::structural("coproduct of zero emergences is not supported"));
    }
    if factors.len() == 1 {
        let e = factors[0].clone();
        let ident = Functor::identity(e.category().clone());
        return Ok(CoproductEmergenceResult {
            injections: vec![ident],
            emergence: e,
        });
    }
    let sig = &factors[0].construct.signature;
    for f in factors.iter().skip(1) {
        let other = &f.construct.signature;
        if other.slots.len() != sig.slots.len()
            || !sig
                .slots
                .iter()
                .zip(other.slots.iter())
                .all(|(a, b)| a.kind == b.kind && a.tags == b.tags)
        {
            return Err(Error::Unsupported(format!(
                "coproduct factors must share a signature shape; `{}` and `{}` differ",
                factors[0].name, f.name
            )));
        }
    }

    let mut b = CategoryBuilder::new(
        factors.iter().map(|f| f.name.clone()).collect::<Vec<_>>().join("⊎"),
    );
    let tag_obj = |i: usize, name: &str| format!("{name}@{}", i + 1);
    let tag_mor = |i: usize, name: &str| format!("{name}@{}", i + 1);
    for (i, f) in factors.iter().enumerate() {
        let cat = f.category();
        for o in 0..cat.object_count() {
            b.object(tag_obj(i, cat.object_name(o)));
        }
    }
    for (i, f) in factors.iter().enumerate() {
        let cat = f.category();
        for m in cat.morphism_ids() {
            let mor = cat.morphism(m);
            b.morphism(
                tag_mor(i, &mor.name),
                tag_obj(i, cat.object_name(mor.dom)),
                tag_obj(i, cat.object_name(mor.cod)),
            );
        }
        for o in 0..cat.object_count() {
            b.identity(
                tag_obj(i, cat.object_name(o)),
                tag_mor(i, &cat.morphism(cat.identity_of(o)).name),
            );
        }
        for g in cat.morphism_ids() {
            for fm in cat.morphism_ids() {
                if let Some(h) = cat.compose(g, fm) {
                    b.compose(
                        tag_mor(i, &cat.morphism(g).name),
                        tag_mor(i, &cat.morphism(fm).name),
                        tag_mor(i, &cat.morphism(h).name),
                    );
                }
            }
        }
    }
    let union_cat = Arc::new(b.build()?);

    let mut carriers = Vec::new();
    let mut structure = Vec::new();
    let mut underlying = Vec::new();
    for f in factors {
        let cat = f.category();
        for o in 0..cat.object_count() {
            carriers.push(f.construct.carrier(o).clone());
            structure.push(f.construct.tables(o).to_vec());
        }
    }
    for f in factors {
        for m in f.category().morphism_ids() {
            underlying.push(f.construct.underlying(m).clone());
        }
    }
    let construct = Arc::new(Construct::new(
        union_cat.name.clone(),
        union_cat.clone(),
        sig.clone(),
        carriers,
        structure,
        underlying,
    )?);
    let emergence = Emergence::standard(union_cat.name.clone(), construct);

    let mut injections = Vec::with_capacity(factors.len());
    let mut obj_offset = 0usize;
    let mut mor_offset = 0usize;
    for (i, f) in factors.iter().enumerate() {
        let cat = f.category();
        let object_map = (0..cat.object_count()).map(|o| obj_offset + o).collect();
        let morphism_map = cat.morphism_ids().map(|m| mor_offset + m).collect();
        injections.push(Functor::new(
            format!("ι{}", i + 1),
            cat.clone(),
            union_cat.clone(),
            object_map,
            morphism_map,
        )?);
        obj_offset += cat.object_count();
        mor_offset += cat.morphism_count();
    }
    Ok(CoproductEmergenceResult {
        injections,
        emergence,
    })
}

#[derive(Debug, Clone)]
pub struct PullbackEmergenceResult {
    pub emergence: Emergence,
    pub to_a: Functor,
    pub to_b: Functor,
    pub empty: bool,
}

/// Pullback of two emergences over their underlying functors into the
/// set category: objects are pairs with equal object assignments,
/// morphisms pairs with equal function assignments, legs the restricted
/// projections. The pair's carrier is the shared set and its structure
/// is the concatenation of both factors' slots, which live on that same
/// set by construction.
pub fn pullback_emergence(a: &Emergence, b: &Emergence) -> Result<PullbackEmergenceResult> {
    let ca = a.category();
    let cb = b.category();
    let pair_obj_name = |x: ObjId, y: ObjId| format!("({},{})", ca.object_name(x), cb.object_name(y));
    let pair_mor_name =
        |x: MorId, y: MorId| format!("({},{})", ca.morphism(x).name, cb.morphism(y).name);

    let mut kept_objs: Vec<(ObjId, ObjId)> = Vec::new();
    for x in 0..ca.object_count() {
        for y in 0..cb.object_count() {
            if a.gu.object_set(x) == b.gu.object_set(y) {
                kept_objs.push((x, y));
            }
        }
    }
    let mut kept_mors: Vec<(MorId, MorId)> = Vec::new();
    for f in ca.morphism_ids() {
        for g in cb.morphism_ids() {
            if a.gu.on_morphism(f) == b.gu.on_morphism(g) {
                kept_mors.push((f, g));
            }
        }
    }

    let mut bld = CategoryBuilder::new(format!("pb({},{})", a.name, b.name));
    for &(x, y) in &kept_objs {
        bld.object(pair_obj_name(x, y));
    }
    for &(f, g) in &kept_mors {
        let (fm, gm) = (ca.morphism(f), cb.morphism(g));
        bld.morphism(
            pair_mor_name(f, g),
            pair_obj_name(fm.dom, gm.dom),
            pair_obj_name(fm.cod, gm.cod),
        );
    }
    for &(x, y) in &kept_objs {
        bld.identity(
            pair_obj_name(x, y),
            pair_mor_name(ca.identity_of(x), cb.identity_of(y)),
        );
    }
    for &(f2, g2) in &kept_mors {
        for &(f1, g1) in &kept_mors {
            if let (Some(fc), Some(gc)) = (ca.compose(f2, f1), cb.compose(g2, g1)) {
                // The composite pair also agrees, so it was kept.
                bld.compose(
                    pair_mor_name(f2, g2),
                    pair_mor_name(f1, g1),
                    pair_mor_name(fc, gc),
                );
            }
        }
    }
    let cat = Arc::new(bld.build()?);

    // Signature: both factors' slots, prefixed, with distributivity
    // targets renamed alongside.
    let rename = |prefix: &str, tag: &PropertyTag| match tag {
        PropertyTag::DistributesOver(s) => PropertyTag::DistributesOver(format!("{prefix}.{s}")),
        other => other.clone(),
    };
    let mut slots = Vec::new();
    for (prefix, e) in [("a", a), ("b", b)] {
        for s in &e.construct.signature.slots {
            slots.push(SignatureSlot {
                name: format!("{prefix}.{}", s.name),
                kind: s.kind.clone(),
                tags: s.tags.iter().map(|t| rename(prefix, t)).collect(),
            });
        }
    }
    let signature = StructureSignature::new(slots)?;

    let mut carriers = Vec::new();
    let mut structure = Vec::new();
    for &(x, y) in &kept_objs {
        carriers.push(a.gu.object_set(x).clone());
        let mut tables = Vec::new();
        for (slot_i, t) in a.construct.tables(x).iter().enumerate() {
            let mut t2 = t.clone();
            t2.declared_tags = signature.slots[slot_i].tags.clone();
            tables.push(t2);
        }
        let offset = a.construct.signature.order();
        for (slot_i, t) in b.construct.tables(y).iter().enumerate() {
            let mut t2 = t.clone();
            t2.declared_tags = signature.slots[offset + slot_i].tags.clone();
            tables.push(t2);
        }
        structure.push(tables);
    }
    let underlying: Vec<FinFunction> = kept_mors
        .iter()
        .map(|&(f, _)| a.gu.on_morphism(f).clone())
        .collect();

    let construct = Arc::new(Construct::new(
        cat.name.clone(),
        cat.clone(),
        signature,
        carriers,
        structure,
        underlying,
    )?);
    let emergence = Emergence::standard(cat.name.clone(), construct);

    let to_a = Functor::new(
        "pb→a",
        cat.clone(),
        ca.clone(),
        kept_objs.iter().map(|&(x, _)| x).collect(),
        kept_mors.iter().map(|&(f, _)| f).collect(),
    )?;
    let to_b = Functor::new(
        "pb→b",
        cat.clone(),
        cb.clone(),
        kept_objs.iter().map(|&(_, y)| y).collect(),
        kept_mors.iter().map(|&(_, g)| g).collect(),
    )?;
    let empty = kept_objs.is_empty();
    Ok(PullbackEmergenceResult {
        emergence,
        to_a,
        to_b,
        empty,
    })
}

/// Pullback over generalized semi-underlying functors: objects are
/// pairs with equal object assignments (which may differ from the
/// carriers), morphisms pairs with equal function assignments. The
/// construct structure transports from the factors, which requires the
/// paired objects to share a carrier; cross-construct pairs with
/// mismatched carriers are refused with a precise message.
pub fn pullback_semi(
    a: &crate::emergence::SemiEmergence,
    b: &crate::emergence::SemiEmergence,
) -> Result<(crate::emergence::SemiEmergence, Functor, Functor, bool)> {
    use crate::construct::GsuFunctor;
    let ca = a.category();
    let cb = b.category();
    let mut kept_objs: Vec<(ObjId, ObjId)> = Vec::new();
    for x in 0..ca.object_count() {
        for y in 0..cb.object_count() {
            if a.gsu.object_set(x) == b.gsu.object_set(y) {
                if a.construct.carrier(x) != b.construct.carrier(y) {
                    return Err(Error::Unsupported(format!(
                        "pair ({}, {}) matches on assigned sets but carries different sets {} and {}; \
                         the pulled-back structure has no shared carrier",
                        ca.object_name(x),
                        cb.object_name(y),
                        a.construct.carrier(x),
                        b.construct.carrier(y)
                    )));
                }
                kept_objs.push((x, y));
            }
        }
    }
    let mut kept_mors: Vec<(MorId, MorId)> = Vec::new();
    for f in ca.morphism_ids() {
        for g in cb.morphism_ids() {
            if a.gsu.on_morphism(f) == b.gsu.on_morphism(g) {
                kept_mors.push((f, g));
            }
        }
    }
    let pair_obj = |x: ObjId, y: ObjId| format!("({},{})", ca.object_name(x), cb.object_name(y));
    let pair_mor = |f: MorId, g: MorId| format!("({},{})", ca.morphism(f).name, cb.morphism(g).name);
    let mut bld = CategoryBuilder::new(format!("pb~({},{})", a.name, b.name));
    for &(x, y) in &kept_objs {
        bld.object(pair_obj(x, y));
    }
    for &(f, g) in &kept_mors {
        let (fm, gm) = (ca.morphism(f), cb.morphism(g));
        bld.morphism(pair_mor(f, g), pair_obj(fm.dom, gm.dom), pair_obj(fm.cod, gm.cod));
    }
    for &(x, y) in &kept_objs {
        bld.identity(pair_obj(x, y), pair_mor(ca.identity_of(x), cb.identity_of(y)));
    }
    for &(f2, g2) in &kept_mors {
        for &(f1, g1) in &kept_mors {
            if let (Some(fc), Some(gc)) = (ca.compose(f2, f1), cb.compose(g2, g1)) {
                bld.compose(pair_mor(f2, g2), pair_mor(f1, g1), pair_mor(fc, gc));
            }
        }
    }
    let cat = Arc::new(bld.build()?);
    let rename = |prefix: &str, tag: &PropertyTag| match tag {
        PropertyTag::DistributesOver(s) => PropertyTag::DistributesOver(format!("{prefix}.{s}")),
        other => other.clone(),
    };
    let mut slots = Vec::new();
    for (prefix, e) in [("a", a.construct.as_ref()), ("b", b.construct.as_ref())] {
        for s in &e.signature.slots {
            slots.push(SignatureSlot {
                name: format!("{prefix}.{}", s.name),
                kind: s.kind.clone(),
                tags: s.tags.iter().map(|t| rename(prefix, t)).collect(),
            });
        }
    }
    let signature = StructureSignature::new(slots)?;
    let mut carriers = Vec::new();
    let mut structure = Vec::new();
    for &(x, y) in &kept_objs {
        carriers.push(a.construct.carrier(x).clone());
        let mut tables = Vec::new();
        for (i, t) in a.construct.tables(x).iter().enumerate() {
            let mut t2 = t.clone();
            t2.declared_tags = signature.slots[i].tags.clone();
            tables.push(t2);
        }
        let off = a.construct.signature.order();
        for (i, t) in b.construct.tables(y).iter().enumerate() {
            let mut t2 = t.clone();
            t2.declared_tags = signature.slots[off + i].tags.clone();
            tables.push(t2);
        }
        structure.push(tables);
    }
    let underlying: Vec<FinFunction> = kept_mors
        .iter()
        .map(|&(f, _)| a.construct.underlying(f).clone())
        .collect();
    let construct = Arc::new(Construct::new(
        cat.name.clone(),
        cat.clone(),
        signature,
        carriers,
        structure,
        underlying,
    )?);
    let gsu = GsuFunctor::new(
        construct.clone(),
        kept_objs.iter().map(|&(x, _)| a.gsu.object_set(x).clone()).collect(),
        kept_mors.iter().map(|&(f, _)| a.gsu.on_morphism(f).clone()).collect(),
    )?;
    let semi = crate::emergence::SemiEmergence::new(cat.name.clone(), construct, gsu)?;
    let to_a = Functor::new(
        "pb~to-a",
        cat.clone(),
        ca.clone(),
        kept_objs.iter().map(|&(x, _)| x).collect(),
        kept_mors.iter().map(|&(f, _)| f).collect(),
    )?;
    let to_b = Functor::new(
        "pb~to-b",
        cat.clone(),
        cb.clone(),
        kept_objs.iter().map(|&(_, y)| y).collect(),
        kept_mors.iter().map(|&(_, g)| g).collect(),
    )?;
    let empty = kept_objs.is_empty();
    Ok((semi, to_a, to_b, empty))
}

/// Category-level pullback of an arbitrary cospan F: 𝒜 → 𝒞 ← ℬ : G —
/// the same pair-filter code path as the underlying-functor pullback,
/// exposed as an extension for general cospans.
pub fn pullback_category(f: &Functor, g: &Functor) -> Result<(Arc<FinCategory>, Functor, Functor)> {
    if f.target.name != g.target.name {
        return Err(Error::structural("cospan functors must share a codomain"));
    }
    let ca = &f.source;
    let cb = &g.source;
    let mut kept_objs = Vec::new();
    for x in 0..ca.object_count() {
        for y in 0..cb.object_count() {
            if f.on_object(x) == g.on_object(y) {
                kept_objs.push((x, y));
            }
        }
    }
    let mut kept_mors = Vec::new();
    for m in ca.morphism_ids() {
        for n in cb.morphism_ids() {
            if f.on_morphism(m) == g.on_morphism(n) {
                kept_mors.push((m, n));
            }
        }
    }
    let mut bld = CategoryBuilder::new(format!("pb-cat({},{})", ca.name, cb.name));
    let pair_obj = |x: ObjId, y: ObjId| format!("({},{})", ca.object_name(x), cb.object_name(y));
    let pair_mor = |m: MorId, n: MorId| format!("({},{})", ca.morphism(m).name, cb.morphism(n).name);
    for &(x, y) in &kept_objs {
        bld.object(pair_obj(x, y));
    }
    for &(m, n) in &kept_mors {
        bld.morphism(
            pair_mor(m, n),
            pair_obj(ca.morphism(m).dom, cb.morphism(n).dom),
            pair_obj(ca.morphism(m).cod, cb.morphism(n).cod),
        );
    }
    for &(x, y) in &kept_objs {
        bld.identity(pair_obj(x, y), pair_mor(ca.identity_of(x), cb.identity_of(y)));
    }
    for &(m2, n2) in &kept_mors {
        for &(m1, n1) in &kept_mors {
            if let (Some(mc), Some(nc)) = (ca.compose(m2, m1), cb.compose(n2, n1)) {
                bld.compose(pair_mor(m2, n2), pair_mor(m1, n1), pair_mor(mc, nc));
            }
        }
    }
    let cat = Arc::new(bld.build()?);
    let to_a = Functor::new(
        "pb→a",
        cat.clone(),
        ca.clone(),
        kept_objs.iter().map(|&(x, _)| x).collect(),
        kept_mors.iter().map(|&(m, _)| m).collect(),
    )?;
    let to_b = Functor::new(
        "pb→b",
        cat.clone(),
        cb.clone(),
        kept_objs.iter().map(|&(_, y)| y).collect(),
        kept_mors.iter().map(|&(_, n)| n).collect(),
    )?;
    Ok((cat, to_a, to_b))
}

#[derive(Debug, Clone)]
pub struct LimitResult {
    pub source: SourceEmergence,
    /// The unrestricted product the apex was carved from.
    pub product: ProductEmergenceResult,
}

/// Limit of a finite diagram: the sub-construct of the product of all
/// node constructs on compatible tuples, with restricted projections as
/// legs. The legs form a source natural for the diagram.
pub fn limit_of_diagram(diagram: &DiagramEmergence, budget: u64) -> Result<LimitResult> {
    let report = diagram.validate();
    if !report.is_ok() {
        return Err(Error::structural(format!(
            "diagram does not satisfy the quasi-functor laws: {}",
            report.render()
        )));
    }
    if diagram.nodes.is_empty() {
        return Err(Error::structural("limits over the empty scheme are not supported"));
    }
    let product = product_emergence(&diagram.nodes, budget)?;
    let scheme = &diagram.scheme;

    // Compatible tuples: every scheme edge maps the tuple's component at
    // its domain onto the component at its codomain.
    let apex_cat = product.emergence.category();
    let n_factors = diagram.nodes.len();
    let obj_components: Vec<Vec<ObjId>> = (0..apex_cat.object_count())
        .map(|o| {
            if n_factors == 1 {
                vec![o]
            } else {
                (0..n_factors).map(|i| product.projections[i].on_object(o)).collect()
            }
        })
        .collect();
    let mor_components: Vec<Vec<MorId>> = apex_cat
        .morphism_ids()
        .map(|m| {
            if n_factors == 1 {
                vec![m]
            } else {
                (0..n_factors).map(|i| product.projections[i].on_morphism(m)).collect()
            }
        })
        .collect();

    let keep_objs: Vec<ObjId> = (0..apex_cat.object_count())
        .filter(|&o| {
            scheme.morphism_ids().all(|sm| {
                let mor = scheme.morphism(sm);
                diagram.edges[sm].on_object(obj_components[o][mor.dom])
                    == obj_components[o][mor.cod]
            })
        })
        .collect();
    let keep_mors: Vec<MorId> = apex_cat
        .morphism_ids()
        .filter(|&m| {
            scheme.morphism_ids().all(|sm| {
                let mor = scheme.morphism(sm);
                diagram.edges[sm].on_morphism(mor_components[m][mor.dom])
                    == mor_components[m][mor.cod]
            })
        })
        .collect();

    let name = format!("lim({})", scheme.name);
    let (apex, inclusion) = restrict_construct(&name, &product.emergence, &keep_objs, &keep_mors)?;
    let legs: Vec<(Functor, Emergence)> = (0..n_factors)
        .map(|i| {
            let leg = product.projections[i].compose_after(&inclusion)?;
            Ok((
                Functor {
                    name: format!("L{}", i + 1),
                    ..leg
                },
                diagram.nodes[i].clone(),
            ))
        })
        .collect::<Result<_>>()?;
    Ok(LimitResult {
        source: SourceEmergence { apex, legs },
        product,
    })
}

/// Right-cancellability of a functor over every enumerated pair from
/// the battery: a battery-relative epimorphism check.
pub fn is_epi_battery(
    f: &Functor,
    battery: &[Arc<FinCategory>],
    budget: u64,
) -> Result<bool> {
    for x in battery {
        let fs = enumerate_functors(&f.target, x, budget)?;
        for (i, h) in fs.iter().enumerate() {
            for k in &fs[i + 1..] {
                if functor_key(&h.compose_after(f)?) == functor_key(&k.compose_after(f)?) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Build the two-object construct with mutually inverse arrows and the
/// collapse/membership pair of functors whose equalizer is a given full
/// sub-construct. Used to verify that full sub-construct inclusions are
/// regular monomorphisms.
pub fn regular_mono_fixture(
    parent: &Emergence,
    sub_objects: &[ObjId],
) -> Result<(Emergence, Functor, Functor)> {
    let mut b = CategoryBuilder::new("two-iso");
    b.object("X").object("Y");
    b.morphism("idX", "X", "X").morphism("idY", "Y", "Y");
    b.morphism("h", "X", "Y").morphism("k", "Y", "X");
    b.identity("X", "idX").identity("Y", "idY");
    b.compose("idX", "idX", "idX").compose("idY", "idY", "idY");
    b.compose("h", "idX", "h").compose("idY", "h", "h");
    b.compose("k", "idY", "k").compose("idX", "k", "k");
    b.compose("k", "h", "idX").compose("h", "k", "idY");
    let cat = Arc::new(b.build()?);
    debug_assert!(cat.validate().is_ok());
    let sx = FinSet::singleton("x");
    let sy = FinSet::singleton("y");
    let tx = OperationTable::internal_from_rows(sx.clone(), [("x", "x", "x")], BTreeSet::new())?;
    let ty = OperationTable::internal_from_rows(sy.clone(), [("y", "y", "y")], BTreeSet::new())?;
    let sig = StructureSignature::new(vec![SignatureSlot {
        name: "op".into(),
        kind: SlotKind::Internal,
        tags: BTreeSet::new(),
    }])?;
    let idx = cat.morphism_id("idX").unwrap();
    let idy = cat.morphism_id("idY").unwrap();
    let h = cat.morphism_id("h").unwrap();
    let k = cat.morphism_id("k").unwrap();
    let mut underlying = vec![FinFunction::identity(&sx); 4];
    underlying[idx] = FinFunction::identity(&sx);
    underlying[idy] = FinFunction::identity(&sy);
    underlying[h] = FinFunction::constant(sx.clone(), sy.clone(), "y")?;
    underlying[k] = FinFunction::constant(sy.clone(), sx.clone(), "x")?;
    let construct = Arc::new(Construct::new(
        "two-iso",
        cat.clone(),
        sig,
        vec![sx, sy],
        vec![vec![tx], vec![ty]],
        underlying,
    )?);
    let target = Emergence::standard("two-iso", construct);

    let pc = parent.category();
    let x_obj = cat.object_id("X").unwrap();
    let y_obj = cat.object_id("Y").unwrap();
    let collapse = Functor::new(
        "F",
        pc.clone(),
        cat.clone(),
        vec![x_obj; pc.object_count()],
        vec![idx; pc.morphism_count()],
    )?;
    let member = |o: ObjId| sub_objects.contains(&o);
    let object_map: Vec<ObjId> = (0..pc.object_count())
        .map(|o| if member(o) { x_obj } else { y_obj })
        .collect();
    let morphism_map: Vec<MorId> = pc
        .morphism_ids()
        .map(|m| {
            let mor = pc.morphism(m);
            match (member(mor.dom), member(mor.cod)) {
                (true, true) => idx,
                (true, false) => h,
                (false, true) => k,
                (false, false) => idy,
            }
        })
        .collect();
    let membership = Functor::new("G", pc.clone(), cat, object_map, morphism_map)?;
    Ok((target, collapse, membership))
}

#[derive(Debug, Clone, Serialize)]
pub struct InternalPairRecord {
    pub subject: String,
    pub found: Option<String>,
}

/// Exhaustive within-construct structure report: terminal objects,
/// binary products and equalizers with internal mediator checks, the
/// finite-completeness verdict they imply, and — for thin constructs —
/// the complete-lattice test over the hom-induced order.
#[derive(Debug, Clone, Serialize)]
pub struct InternalReport {
    pub subject: String,
    pub thin: bool,
    pub terminal_objects: Vec<String>,
    pub has_terminal: bool,
    pub binary_products: Vec<InternalPairRecord>,
    pub has_binary_products: bool,
    pub equalizers: Vec<InternalPairRecord>,
    pub has_equalizers: bool,
    pub finitely_complete: bool,
    pub complete_lattice: Option<Verdict>,
}

pub fn internal_structure_report(construct: &Construct, budget: u64) -> Result<InternalReport> {
    let cat = &construct.category;
    let n = cat.object_count();

    let terminal_objects: Vec<String> = (0..n)
        .filter(|&t| (0..n).all(|x| cat.hom(x, t).len() == 1))
        .map(|t| cat.object_name(t).to_string())
        .collect();
    let has_terminal = !terminal_objects.is_empty();

    let mut binary_products = Vec::new();
    let mut has_binary_products = true;
    for a in 0..n {
        for b in a..n {
            let found = internal_binary_product(cat, a, b);
            if found.is_none() {
                has_binary_products = false;
            }
            binary_products.push(InternalPairRecord {
                subject: format!("({},{})", cat.object_name(a), cat.object_name(b)),
                found,
            });
        }
    }

    let mut equalizers = Vec::new();
    let mut has_equalizers = true;
    for a in 0..n {
        for b in 0..n {
            let hom = cat.hom(a, b);
            for (i, &f) in hom.iter().enumerate() {
                for &g in &hom[i + 1..] {
                    let found = internal_equalizer(cat, f, g);
                    if found.is_none() {
                        has_equalizers = false;
                    }
                    equalizers.push(InternalPairRecord {
                        subject: format!("({},{})", cat.morphism(f).name, cat.morphism(g).name),
                        found,
                    });
                }
            }
        }
    }

    let finitely_complete = has_terminal && has_binary_products && has_equalizers;

    let thin = cat.is_thin();
    let complete_lattice = if thin {
        Some(complete_lattice_check(cat, budget)?)
    } else {
        None
    };

    Ok(InternalReport {
        subject: construct.name.clone(),
        thin,
        terminal_objects,
        has_terminal,
        binary_products,
        has_binary_products,
        equalizers,
        has_equalizers,
        finitely_complete,
        complete_lattice,
    })
}

fn internal_binary_product(cat: &FinCategory, a: ObjId, b: ObjId) -> Option<String> {
    for p in 0..cat.object_count() {
        for &pa in cat.hom(p, a) {
            for &pb in cat.hom(p, b) {
                if internal_product_universal(cat, p, pa, pb, a, b) {
                    return Some(format!(
                        "{} with legs ({}, {})",
                        cat.object_name(p),
                        cat.morphism(pa).name,
                        cat.morphism(pb).name
                    ));
                }
            }
        }
    }
    None
}

fn internal_product_universal(
    cat: &FinCategory,
    p: ObjId,
    pa: MorId,
    pb: MorId,
    a: ObjId,
    b: ObjId,
) -> bool {
    for x in 0..cat.object_count() {
        for &f in cat.hom(x, a) {
            for &g in cat.hom(x, b) {
                let mediators = cat
                    .hom(x, p)
                    .iter()
                    .filter(|&&m| cat.compose(pa, m) == Some(f) && cat.compose(pb, m) == Some(g))
                    .count();
                if mediators != 1 {
                    return false;
                }
            }
        }
    }
    true
}

fn internal_equalizer(cat: &FinCategory, f: MorId, g: MorId) -> Option<String> {
    let a = cat.morphism(f).dom;
    for e_obj in 0..cat.object_count() {
        for &e in cat.hom(e_obj, a) {
            if cat.compose(f, e) != cat.compose(g, e) {
                continue;
            }
            let mut universal = true;
            'outer: for x in 0..cat.object_count() {
                for &t in cat.hom(x, a) {
                    if cat.compose(f, t) != cat.compose(g, t) {
                        continue;
                    }
                    let mediators = cat
                        .hom(x, e_obj)
                        .iter()
                        .filter(|&&m| cat.compose(e, m) == Some(t))
                        .count();
                    if mediators != 1 {
                        universal = false;
                        break 'outer;
                    }
                }
            }
            if universal {
                return Some(format!(
                    "{} with inclusion {}",
                    cat.object_name(e_obj),
                    cat.morphism(e).name
                ));
            }
        }
    }
    None
}

/// For a thin category: quotient by mutual reachability, then test that
/// every subset of the resulting poset has a meet and a join (the empty
/// subset demanding top and bottom).
fn complete_lattice_check(cat: &FinCategory, budget: u64) -> Result<Verdict> {
    let n = cat.object_count();
    let reach = |x: ObjId, y: ObjId| !cat.hom(x, y).is_empty();
    // Mutual-reachability classes.
    let mut class = vec![usize::MAX; n];
    let mut reps: Vec<ObjId> = Vec::new();
    for x in 0..n {
        if class[x] != usize::MAX {
            continue;
        }
        let c = reps.len();
        class[x] = c;
        for y in (x + 1)..n {
            if class[y] == usize::MAX && reach(x, y) && reach(y, x) {
                class[y] = c;
            }
        }
        reps.push(x);
    }
    let k = reps.len();
    if (1u64 << k.min(63)) > budget {
        return Err(Error::budget("complete-lattice subset scan", 1u64 << k.min(63), budget));
    }
    let le = |i: usize, j: usize| reach(reps[i], reps[j]);
    for mask in 0..(1u64 << k) {
        let members: Vec<usize> = (0..k).filter(|&i| mask & (1 << i) != 0).collect();
        // Meet: greatest common lower bound.
        let lower: Vec<usize> = (0..k)
            .filter(|&c| members.iter().all(|&m| le(c, m)))
            .collect();
        let meet = lower.iter().copied().find(|&c| lower.iter().all(|&d| le(d, c)));
        if meet.is_none() {
            return Ok(Verdict::no(format!(
                "subset {{{}}} has no meet",
                members
                    .iter()
                    .map(|&m| cat.object_name(reps[m]).to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            )));
        }
        let upper: Vec<usize> = (0..k)
            .filter(|&c| members.iter().all(|&m| le(m, c)))
            .collect();
        let join = upper.iter().copied().find(|&c| upper.iter().all(|&d| le(c, d)));
        if join.is_none() {
            return Ok(Verdict::no(format!(
                "subset {{{}}} has no join",
                members
                    .iter()
                    .map(|&m| cat.object_name(reps[m]).to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            )));
        }
    }
    Ok(Verdict::yes())
}

/// Verify a constructed equalizer against the strong-equalizer
/// condition: it must equalize U_ℬ ∘ F and U_ℬ ∘ G, with mediators
/// counted over the battery. When U_ℬ is an embedding, the inclusion
/// must additionally be an isomorphism of categories, which is asserted
/// into the notes.
pub fn check_strong_equalizer(
    inclusion: &Functor,
    f: &Functor,
    g: &Functor,
    b: &Emergence,
    battery: &[Arc<FinCategory>],
    budget: u64,
) -> Result<UniversalVerdict> {
    let (_fragment, functors) = materialize_underlying(&[EmergenceRef::Plain(b)], budget)?;
    let u_b = &functors[0];
    let composite_f = u_b.compose_after(f)?;
    let composite_g = u_b.compose_after(g)?;
    let parallel = vec![composite_f, composite_g];
    let mut verdict = verify_universal(
        &UniversalCandidate::Equalizer {
            inclusion,
            parallel: &parallel,
        },
        battery,
        budget,
    )?;
    verdict.kind = "strong-equalizer".into();
    if b.gu.is_embedding() {
        let flags = functor_properties(inclusion);
        if flags.is_isomorphism {
            verdict
                .notes
                .push("target underlying functor is an embedding; inclusion is an isomorphism".into());
        } else {
            verdict.overall = false;
            verdict.notes.push(
                "target underlying functor is an embedding but the inclusion is not an isomorphism"
                    .into(),
            );
        }
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::battery::{arrow, chain3, default_battery, one_object};
    use crate::construct::StructureSignature;
    use crate::report::DEFAULT_BUDGET;

    fn bits() -> FinSet {
        FinSet::new(["0", "1"])
    }

    fn untagged_slot(name: &str) -> SignatureSlot {
        SignatureSlot {
            name: name.into(),
            kind: SlotKind::Internal,
            tags: BTreeSet::new(),
        }
    }

    fn xor() -> OperationTable {
        OperationTable::internal_from_rows(
            bits(),
            [
                ("0", "0", "0"),
                ("0", "1", "1"),
                ("1", "0", "1"),
                ("1", "1", "0"),
            ],
            BTreeSet::new(),
        )
        .unwrap()
    }

    /// Arrow-category construct, both carriers {0,1}, f acting by a
    /// chosen function.
    fn arrow_emergence(name: &str, f_fn: FinFunction, slots: usize) -> Emergence {
        let cat = Arc::new(arrow());
        let sig = StructureSignature::new(
            (0..slots).map(|i| untagged_slot(&format!("s{i}"))).collect(),
        )
        .unwrap();
        let f = cat.morphism_id("f").unwrap();
        let mut underlying = vec![FinFunction::identity(&bits()); 3];
        underlying[f] = f_fn;
        let construct = Arc::new(
            Construct::new(
                format!("{name}c"),
                cat,
                sig,
                vec![bits(), bits()],
                vec![vec![xor(); slots], vec![xor(); slots]],
                underlying,
            )
            .unwrap(),
        );
        Emergence::standard(name, construct)
    }

    fn point_emergence(name: &str, carrier: FinSet, slots: usize) -> Emergence {
        let cat = Arc::new(one_object());
        let sig = StructureSignature::new(
            (0..slots).map(|i| untagged_slot(&format!("s{i}"))).collect(),
        )
        .unwrap();
        let n = carrier.len();
        let rows: Vec<(String, String, String)> = (0..n)
            .flat_map(|i| {
                let carrier = carrier.clone();
                (0..n).map(move |j| {
                    (
                        carrier.elem(i).to_string(),
                        carrier.elem(j).to_string(),
                        carrier.elem(i).to_string(),
                    )
                })
            })
            .collect();
        let table = OperationTable::internal_from_rows(
            carrier.clone(),
            rows.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())),
            BTreeSet::new(),
        )
        .unwrap();
        let construct = Arc::new(
            Construct::new(
                format!("{name}c"),
                cat,
                sig,
                vec![carrier.clone()],
                vec![vec![table; slots]],
                vec![FinFunction::identity(&carrier)],
            )
            .unwrap(),
        );
        Emergence::standard(name, construct)
    }

    #[test]
    fn equalizer_of_equal_functors_is_the_whole_construct() {
        let e = arrow_emergence("e", FinFunction::identity(&bits()), 1);
        let id = Functor::identity(e.category().clone());
        let res = equalizer_emergence(&e, &[id.clone(), id]).unwrap();
        assert!(!res.empty);
        assert_eq!(res.emergence.category().object_count(), 2);
        assert_eq!(res.emergence.category().morphism_count(), 3);
        assert!(res.emergence.validate().is_ok());
        // Inclusion is an isomorphism here.
        assert!(functor_properties(&res.inclusion).is_isomorphism);
    }

    #[test]
    fn equalizer_filters_to_the_agreement_subcategory() {
        // Two functors from the arrow category to itself: the identity
        // and the collapse onto A. They agree exactly on A and id_A.
        let e = arrow_emergence("e", FinFunction::identity(&bits()), 1);
        let cat = e.category().clone();
        let id = Functor::identity(cat.clone());
        let collapse = Functor::constant(cat.clone(), cat.clone(), 0);
        let res = equalizer_emergence(&e, &[id, collapse]).unwrap();
        assert_eq!(res.emergence.category().object_count(), 1);
        assert_eq!(res.emergence.category().morphism_count(), 1);
        assert!(res.emergence.validate().is_ok());
    }

    #[test]
    fn three_way_equalizer_intersects_pairwise_agreements() {
        let e = arrow_emergence("e", FinFunction::identity(&bits()), 1);
        let cat = e.category().clone();
        let id = Functor::identity(cat.clone());
        let collapse_a = Functor::constant(cat.clone(), cat.clone(), 0);
        let collapse_b = Functor::constant(cat.clone(), cat.clone(), 1);
        let res = equalizer_emergence(&e, &[id, collapse_a, collapse_b]).unwrap();
        assert!(res.empty);
        assert_eq!(res.emergence.category().object_count(), 0);
    }

    #[test]
    fn constructed_equalizer_verifies_universally() {
        let e = arrow_emergence("e", FinFunction::identity(&bits()), 1);
        let cat = e.category().clone();
        let id = Functor::identity(cat.clone());
        let collapse = Functor::constant(cat.clone(), cat.clone(), 0);
        let parallel = vec![id, collapse];
        let res = equalizer_emergence(&e, &parallel).unwrap();
        let verdict = verify_universal(
            &UniversalCandidate::Equalizer {
                inclusion: &res.inclusion,
                parallel: &parallel,
            },
            &default_battery(),
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert!(verdict.overall, "{}", verdict.render());
    }

    #[test]
    fn stabilizer_of_identical_readings_is_everything() {
        let e = arrow_emergence("e", FinFunction::identity(&bits()), 1);
        let gu = e.gu.clone();
        let res = stabilizer(&e, &gu, &gu, DEFAULT_BUDGET).unwrap();
        assert_eq!(res.emergence.category().morphism_count(), 3);
    }

    #[test]
    fn stabilizer_filters_disagreeing_assignments() {
        let e = arrow_emergence("e", FinFunction::identity(&bits()), 1);
        let cat = e.category().clone();
        let f = cat.morphism_id("f").unwrap();
        let mut other = e.construct.underlying_all().to_vec();
        other[f] =
            FinFunction::from_pairs(bits(), bits(), [("0", "1"), ("1", "0")]).unwrap();
        let gu2 = GuFunctor::new(e.construct.clone(), other).unwrap();
        assert!(gu2.validate().is_ok());
        let res = stabilizer(&e, &e.gu, &gu2, DEFAULT_BUDGET).unwrap();
        // Objects survive (same carriers) but f is filtered out.
        assert_eq!(res.emergence.category().object_count(), 2);
        assert_eq!(res.emergence.category().morphism_count(), 2);
    }

    #[test]
    fn product_counts_and_order() {
        let a = arrow_emergence("a", FinFunction::identity(&bits()), 1);
        let b = arrow_emergence("b", FinFunction::identity(&bits()), 2);
        let p = product_emergence(&[a.clone(), b.clone()], DEFAULT_BUDGET).unwrap();
        assert_eq!(p.emergence.category().object_count(), 4);
        assert_eq!(p.emergence.order(), 3);
        assert!(p.emergence.validate().is_ok(), "{}", p.emergence.validate().render());
        for proj in &p.projections {
            assert!(proj.validate().is_ok());
        }
    }

    #[test]
    fn product_of_one_is_itself() {
        let a = arrow_emergence("a", FinFunction::identity(&bits()), 1);
        let p = product_emergence(&[a.clone()], DEFAULT_BUDGET).unwrap();
        assert_eq!(p.emergence.name, a.name);
        assert_eq!(p.projections.len(), 1);
    }

    #[test]
    fn product_verifies_universally() {
        let a = point_emergence("a", bits(), 1);
        let b = point_emergence("b", FinSet::new(["p", "q"]), 1);
        let p = product_emergence(&[a, b], DEFAULT_BUDGET).unwrap();
        let verdict = verify_universal(
            &UniversalCandidate::Product {
                projections: &p.projections,
            },
            &default_battery(),
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert!(verdict.overall, "{}", verdict.render());
    }

    #[test]
    fn product_is_a_mono_source() {
        let a = point_emergence("a", bits(), 1);
        let b = point_emergence("b", FinSet::new(["p", "q"]), 1);
        let p = product_emergence(&[a, b], DEFAULT_BUDGET).unwrap();
        let verdict = verify_universal(
            &UniversalCandidate::MonoSource {
                legs: &p.projections,
            },
            &default_battery(),
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert!(verdict.overall, "{}", verdict.render());
    }

    #[test]
    fn coproduct_partitions_by_tag() {
        let a = arrow_emergence("a", FinFunction::identity(&bits()), 1);
        let b = point_emergence("b", bits(), 1);
        let c = coproduct_emergence(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(c.emergence.category().object_count(), 3);
        assert!(c.emergence.validate().is_ok());
        for inj in &c.injections {
            assert!(inj.validate().is_ok());
        }
        // No cross-tag morphisms.
        let cat = c.emergence.category();
        for m in cat.morphism_ids() {
            let mor = cat.morphism(m);
            let dom_tag = cat.object_name(mor.dom).rsplit('@').next().unwrap().to_string();
            let cod_tag = cat.object_name(mor.cod).rsplit('@').next().unwrap().to_string();
            assert_eq!(dom_tag, cod_tag);
        }
    }

    #[test]
    fn coproduct_mediators_are_unique() {
        let a = point_emergence("a", bits(), 1);
        let b = point_emergence("b", FinSet::new(["p", "q"]), 1);
        let c = coproduct_emergence(&[a, b]).unwrap();
        let verdict = verify_universal(
            &UniversalCandidate::Coproduct {
                injections: &c.injections,
            },
            &default_battery(),
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert!(verdict.overall, "{}", verdict.render());
    }

    #[test]
    fn coproduct_presents_as_a_valid_sink() {
        let a = point_emergence("a", bits(), 1);
        let b = point_emergence("b", FinSet::new(["p", "q"]), 1);
        let factors = vec![a, b];
        let c = coproduct_emergence(&factors).unwrap();
        let sink = c.as_sink(&factors);
        assert!(sink.validate().is_ok(), "{}", sink.validate().render());
    }

    #[test]
    fn coproduct_requires_shared_signature_shape() {
        let a = point_emergence("a", bits(), 1);
        let b = point_emergence("b", bits(), 2);
        assert!(matches!(
            coproduct_emergence(&[a, b]),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn pullback_matches_brute_force_pair_filter() {
        let a = arrow_emergence("a", FinFunction::identity(&bits()), 1);
        let b = point_emergence("b", bits(), 1);
        let pb = pullback_emergence(&a, &b).unwrap();
        // Independent double loop.
        let mut expected = 0;
        for x in 0..a.category().object_count() {
            for y in 0..b.category().object_count() {
                if a.gu.object_set(x) == b.gu.object_set(y) {
                    expected += 1;
                }
            }
        }
        assert_eq!(pb.emergence.category().object_count(), expected);
        assert!(pb.emergence.validate().is_ok());
        assert!(pb.to_a.validate().is_ok());
        assert!(pb.to_b.validate().is_ok());
        assert_eq!(pb.emergence.order(), a.order() + b.order());
    }

    #[test]
    fn pullback_of_disjoint_carriers_is_empty_and_flagged() {
        let a = point_emergence("a", bits(), 1);
        let b = point_emergence("b", FinSet::new(["p", "q"]), 1);
        let pb = pullback_emergence(&a, &b).unwrap();
        assert!(pb.empty);
        assert_eq!(pb.emergence.category().object_count(), 0);
    }

    #[test]
    fn pullback_verifies_universally() {
        let a = arrow_emergence("a", FinFunction::identity(&bits()), 1);
        let b = point_emergence("b", bits(), 1);
        let pb = pullback_emergence(&a, &b).unwrap();
        let verdict = verify_universal(
            &UniversalCandidate::Pullback {
                to_a: &pb.to_a,
                to_b: &pb.to_b,
                a: &a,
                b: &b,
            },
            &default_battery(),
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert!(verdict.overall, "{}", verdict.render());
    }

    fn discrete_scheme(n: usize) -> Arc<FinCategory> {
        let mut b = CategoryBuilder::new(format!("disc{n}"));
        for i in 0..n {
            b.object(format!("n{i}"));
        }
        b.auto_identities().fill_identity_compositions();
        Arc::new(b.build().unwrap())
    }

    #[test]
    fn limit_over_discrete_scheme_is_the_product() {
        let scheme = discrete_scheme(3);
        let nodes = vec![
            point_emergence("a", bits(), 1),
            point_emergence("b", FinSet::new(["p", "q"]), 1),
            point_emergence("c", FinSet::singleton("z"), 1),
        ];
        let edges: Vec<Functor> = (0..3)
            .map(|i| Functor::identity(nodes[i].category().clone()))
            .collect();
        let diagram = DiagramEmergence::new(scheme, nodes.clone(), edges).unwrap();
        let lim = limit_of_diagram(&diagram, DEFAULT_BUDGET).unwrap();
        let prod = product_emergence(&nodes, DEFAULT_BUDGET).unwrap();
        let lim_legs: Vec<Functor> = lim.source.legs.iter().map(|(f, _)| f.clone()).collect();
        let iso = essential_uniqueness(&prod.projections, &lim_legs, DEFAULT_BUDGET).unwrap();
        assert!(iso.is_some());
    }

    #[test]
    fn limit_over_parallel_pair_scheme_is_the_equalizer() {
        // Scheme: two objects with two parallel arrows.
        let scheme = Arc::new(crate::battery::parallel_pair());
        let a = arrow_emergence("a", FinFunction::identity(&bits()), 1);
        let b = arrow_emergence("b", FinFunction::identity(&bits()), 1);
        let cat = a.category().clone();
        let id = Functor::identity(cat.clone());
        let collapse = Functor::constant(cat.clone(), cat.clone(), 0);
        let u = scheme.morphism_id("u").unwrap();
        let v = scheme.morphism_id("v").unwrap();
        let mut edges = vec![Functor::identity(cat.clone()); scheme.morphism_count()];
        edges[u] = id.clone();
        edges[v] = collapse.clone();
        let diagram = DiagramEmergence::new(scheme, vec![a.clone(), b.clone()], edges).unwrap();
        let lim = limit_of_diagram(&diagram, DEFAULT_BUDGET).unwrap();

        let eq = equalizer_emergence(&a, &[id, collapse]).unwrap();
        // The limit's first leg corresponds to the equalizer inclusion.
        let lim_leg_a = lim.source.legs[0].0.clone();
        let iso =
            essential_uniqueness(&[eq.inclusion.clone()], &[lim_leg_a], DEFAULT_BUDGET).unwrap();
        assert!(iso.is_some());
    }

    #[test]
    fn limit_legs_form_a_mono_source() {
        let scheme = discrete_scheme(2);
        let nodes = vec![
            point_emergence("a", bits(), 1),
            point_emergence("b", FinSet::new(["p", "q"]), 1),
        ];
        let edges: Vec<Functor> = (0..2)
            .map(|i| Functor::identity(nodes[i].category().clone()))
            .collect();
        let diagram = DiagramEmergence::new(scheme, nodes, edges).unwrap();
        let lim = limit_of_diagram(&diagram, DEFAULT_BUDGET).unwrap();
        let legs: Vec<Functor> = lim.source.legs.iter().map(|(f, _)| f.clone()).collect();
        let verdict = verify_universal(
            &UniversalCandidate::MonoSource { legs: &legs },
            &default_battery(),
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert!(verdict.overall, "{}", verdict.render());
    }

    #[test]
    fn single_node_scheme_limit_is_the_node() {
        let scheme = discrete_scheme(1);
        let node = point_emergence("a", bits(), 1);
        let edges = vec![Functor::identity(node.category().clone())];
        let diagram = DiagramEmergence::new(scheme, vec![node.clone()], edges).unwrap();
        let lim = limit_of_diagram(&diagram, DEFAULT_BUDGET).unwrap();
        assert_eq!(lim.source.apex.category().object_count(), 1);
        assert_eq!(lim.source.apex.order(), node.order());
    }

    #[test]
    fn regular_mono_fixture_recovers_the_full_sub() {
        let parent = arrow_emergence("parent", FinFunction::identity(&bits()), 1);
        // Full sub on object A only.
        let (target, collapse, membership) = regular_mono_fixture(&parent, &[0]).unwrap();
        assert!(target.validate().is_ok());
        assert!(collapse.validate().is_ok());
        assert!(membership.validate().is_ok());
        let res = equalizer_emergence(&parent, &[collapse, membership]).unwrap();
        assert_eq!(res.emergence.category().object_count(), 1);
        assert_eq!(res.emergence.category().object_name(0), "A");
    }

    #[test]
    fn internal_structure_of_chain_and_antichain() {
        // 3-chain: thin with terminal, binary products, complete lattice.
        let chain = Arc::new(chain3());
        let s = FinSet::singleton("x");
        let t =
            OperationTable::internal_from_rows(s.clone(), [("x", "x", "x")], BTreeSet::new())
                .unwrap();
        let construct = Construct::new(
            "chainc",
            chain.clone(),
            StructureSignature::new(vec![untagged_slot("op")]).unwrap(),
            vec![s.clone(); 3],
            vec![vec![t.clone()], vec![t.clone()], vec![t.clone()]],
            vec![FinFunction::identity(&s); chain.morphism_count()],
        )
        .unwrap();
        let report = internal_structure_report(&construct, DEFAULT_BUDGET).unwrap();
        assert!(report.thin);
        assert!(report.has_terminal);
        assert!(report.has_binary_products);
        assert!(report.finitely_complete);
        assert!(report.complete_lattice.as_ref().unwrap().holds);

        // 2-antichain: none of it.
        let disc = Arc::new(crate::battery::discrete2());
        let construct = Construct::new(
            "discc",
            disc.clone(),
            StructureSignature::new(vec![untagged_slot("op")]).unwrap(),
            vec![s.clone(); 2],
            vec![vec![t.clone()], vec![t.clone()]],
            vec![FinFunction::identity(&s); disc.morphism_count()],
        )
        .unwrap();
        let report = internal_structure_report(&construct, DEFAULT_BUDGET).unwrap();
        assert!(report.thin);
        assert!(!report.has_terminal);
        assert!(!report.has_binary_products);
        assert!(!report.complete_lattice.as_ref().unwrap().holds);
    }

    #[test]
    fn semi_pullback_pairs_objects_by_assigned_sets() {
        use crate::construct::GsuFunctor;
        use crate::emergence::SemiEmergence;
        // Discrete construct with two equal-sized carriers and a gsu
        // swapping them; the self-pullback pairs objects whose assigned
        // sets coincide, which here crosses the diagonal.
        let cat = Arc::new(crate::battery::discrete2());
        let sa = FinSet::new(["a0", "a1"]);
        let sb = FinSet::new(["b0", "b1"]);
        let ta = OperationTable::internal_from_rows(
            sa.clone(),
            [
                ("a0", "a0", "a0"),
                ("a0", "a1", "a0"),
                ("a1", "a0", "a1"),
                ("a1", "a1", "a1"),
            ],
            BTreeSet::new(),
        )
        .unwrap();
        let tb = OperationTable::internal_from_rows(
            sb.clone(),
            [
                ("b0", "b0", "b0"),
                ("b0", "b1", "b0"),
                ("b1", "b0", "b1"),
                ("b1", "b1", "b1"),
            ],
            BTreeSet::new(),
        )
        .unwrap();
        let construct = Arc::new(
            Construct::new(
                "swapc",
                cat.clone(),
                StructureSignature::new(vec![untagged_slot("op")]).unwrap(),
                vec![sa.clone(), sb.clone()],
                vec![vec![ta], vec![tb]],
                vec![FinFunction::identity(&sa), FinFunction::identity(&sb)],
            )
            .unwrap(),
        );
        let gsu = GsuFunctor::new(
            construct.clone(),
            vec![sb.clone(), sa.clone()],
            vec![FinFunction::identity(&sb), FinFunction::identity(&sa)],
        )
        .unwrap();
        assert!(gsu.validate().is_ok());
        let semi = SemiEmergence::new("swap", construct, gsu).unwrap();
        let (pb, to_a, to_b, empty) = pullback_semi(&semi, &semi).unwrap();
        assert!(!empty);
        // Only the diagonal pairs match assigned sets here.
        assert_eq!(pb.category().object_count(), 2);
        assert!(to_a.validate().is_ok());
        assert!(to_b.validate().is_ok());
        assert_eq!(pb.order(), 2 * semi.order());
    }

    #[test]
    fn essential_uniqueness_of_identical_candidates_is_identity_shaped() {
        let a = point_emergence("a", bits(), 1);
        let b = point_emergence("b", FinSet::new(["p", "q"]), 1);
        let p = product_emergence(&[a, b], DEFAULT_BUDGET).unwrap();
        let iso = essential_uniqueness(&p.projections, &p.projections, DEFAULT_BUDGET)
            .unwrap()
            .unwrap();
        let n = iso.source.object_count();
        assert_eq!(iso.object_map, (0..n).collect::<Vec<_>>());
    }
}
