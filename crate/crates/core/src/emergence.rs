//! The emergence triple and its comparison algebra: homomorphisms
//! (plain, strong, semi, strong-semi), isomorphisms and equivalences,
//! sub-emergences, induction between emergences, representability,
//! graded (partial/relative) arrows with degrees, and battery-relative
//! initial/terminal status.

use std::sync::Arc;

use serde::Serialize;

use crate::construct::{Construct, GsuFunctor, GuFunctor};
use crate::fincat::{
    enumerate_functors, functor_properties, FinCategory, Functor, MorId, NaturalTransformation,
    ObjId,
};
use crate::fincat::{search_functors, SearchSpec};
use crate::finset::{materialize_finset, FinFunction, FinSet, FinSetFragment, FinSetMode};
use crate::report::{Error, Result, ValidationReport, Verdict};

/// An emergence: a construct together with a generalized underlying
/// functor. The order is the number of signature slots.
#[derive(Debug, Clone, PartialEq)]
pub struct Emergence {
    pub name: String,
    pub construct: Arc<Construct>,
    pub gu: GuFunctor,
}

impl Emergence {
    pub fn new(name: impl Into<String>, construct: Arc<Construct>, gu: GuFunctor) -> Result<Self> {
        if !Arc::ptr_eq(&gu.construct, &construct) && gu.construct.name != construct.name {
            return Err(Error::structural("gu functor belongs to a different construct"));
        }
        Ok(Emergence {
            name: name.into(),
            construct,
            gu,
        })
    }

    pub fn standard(name: impl Into<String>, construct: Arc<Construct>) -> Self {
        Emergence {
            name: name.into(),
            gu: GuFunctor::standard(construct.clone()),
            construct,
        }
    }

    pub fn order(&self) -> usize {
        self.construct.signature.order()
    }

    pub fn category(&self) -> &Arc<FinCategory> {
        &self.construct.category
    }

    /// Full cross-validation. A zero-slot signature is rejected here:
    /// data without operations is the ambient set category, not an
    /// emergence.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new(format!("emergence {}", self.name));
        report.absorb(self.construct.validate());
        report.absorb(self.gu.validate());
        if self.order() == 0 {
            report.push(
                "zero-order",
                "signature has no operation slots; structureless data is not an emergence",
            );
        }
        report
    }
}

/// A semi-emergence: the generalized semi-underlying functor may move
/// objects to other carriers, as long as the image set-of-sets matches
/// the standard underlying functor's image.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiEmergence {
    pub name: String,
    pub construct: Arc<Construct>,
    pub gsu: GsuFunctor,
}

impl SemiEmergence {
    pub fn new(name: impl Into<String>, construct: Arc<Construct>, gsu: GsuFunctor) -> Result<Self> {
        if !Arc::ptr_eq(&gsu.construct, &construct) && gsu.construct.name != construct.name {
            return Err(Error::structural("gsu functor belongs to a different construct"));
        }
        Ok(SemiEmergence {
            name: name.into(),
            construct,
            gsu,
        })
    }

    pub fn order(&self) -> usize {
        self.construct.signature.order()
    }

    pub fn category(&self) -> &Arc<FinCategory> {
        &self.construct.category
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new(format!("semi-emergence {}", self.name));
        report.absorb(self.construct.validate());
        report.absorb(self.gsu.validate());
        if self.order() == 0 {
            report.push(
                "zero-order",
                "signature has no operation slots; structureless data is not an emergence",
            );
        }
        report
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MorphismMode {
    Hom,
    Strong,
    Semi,
    StrongSemi,
}

/// Either kind of emergence, for operations shared by both.
#[derive(Debug, Clone, Copy)]
pub enum EmergenceRef<'a> {
    Plain(&'a Emergence),
    Semi(&'a SemiEmergence),
}

impl<'a> EmergenceRef<'a> {
    pub fn name(&self) -> &str {
        match self {
            EmergenceRef::Plain(e) => &e.name,
            EmergenceRef::Semi(e) => &e.name,
        }
    }

    pub fn construct(&self) -> &Arc<Construct> {
        match self {
            EmergenceRef::Plain(e) => &e.construct,
            EmergenceRef::Semi(e) => &e.construct,
        }
    }

    pub fn category(&self) -> &Arc<FinCategory> {
        &self.construct().category
    }

    pub fn order(&self) -> usize {
        self.construct().signature.order()
    }

    pub fn object_set(&self, o: ObjId) -> &FinSet {
        match self {
            EmergenceRef::Plain(e) => e.gu.object_set(o),
            EmergenceRef::Semi(e) => e.gsu.object_set(o),
        }
    }

    pub fn function_of(&self, m: MorId) -> &FinFunction {
        match self {
            EmergenceRef::Plain(e) => e.gu.on_morphism(m),
            EmergenceRef::Semi(e) => e.gsu.on_morphism(m),
        }
    }

    fn is_semi(&self) -> bool {
        matches!(self, EmergenceRef::Semi(_))
    }
}

/// Check the commuting triangle U_target ∘ F = U_source on every object
/// and morphism, by exact equality of set assignments and function
/// tables. Strong modes additionally compare signature cardinalities.
pub fn check_morphism(
    f: &Functor,
    a: EmergenceRef<'_>,
    b: EmergenceRef<'_>,
    mode: MorphismMode,
) -> Result<Verdict> {
    let semi_mode = matches!(mode, MorphismMode::Semi | MorphismMode::StrongSemi);
    if semi_mode != (a.is_semi() && b.is_semi()) {
        return Err(Error::structural(
            "semi modes require semi-emergences on both sides (and plain modes plain ones)",
        ));
    }
    if f.source.name != a.category().name || f.target.name != b.category().name {
        return Err(Error::structural(format!(
            "functor `{}` does not run between `{}` and `{}`",
            f.name,
            a.name(),
            b.name()
        )));
    }
    if matches!(mode, MorphismMode::Strong | MorphismMode::StrongSemi) && a.order() != b.order() {
        return Ok(Verdict::no(format!(
            "orders differ: {} has {}, {} has {}",
            a.name(),
            a.order(),
            b.name(),
            b.order()
        )));
    }
    for o in 0..a.category().object_count() {
        let lhs = b.object_set(f.on_object(o));
        let rhs = a.object_set(o);
        if lhs != rhs {
            return Ok(Verdict::no(format!(
                "object `{}`: U_{}(F({})) = {} but U_{}({}) = {}",
                a.category().object_name(o),
                b.name(),
                a.category().object_name(o),
                lhs,
                a.name(),
                a.category().object_name(o),
                rhs
            )));
        }
    }
    for m in a.category().morphism_ids() {
        let lhs = b.function_of(f.on_morphism(m));
        let rhs = a.function_of(m);
        if lhs != rhs {
            return Ok(Verdict::no(format!(
                "morphism `{}`: composite assignment {} differs from {}",
                a.category().morphism(m).name,
                lhs,
                rhs
            )));
        }
    }
    Ok(Verdict::yes())
}

/// Enumerate every functor that passes `check_morphism` in the given
/// mode, in the usual deterministic order. Underlying-compatibility is
/// folded into the search as candidate pruning.
pub fn enumerate_homomorphisms(
    a: EmergenceRef<'_>,
    b: EmergenceRef<'_>,
    mode: MorphismMode,
    budget: u64,
) -> Result<Vec<Functor>> {
    let semi_mode = matches!(mode, MorphismMode::Semi | MorphismMode::StrongSemi);
    if semi_mode != (a.is_semi() && b.is_semi()) {
        return Err(Error::structural(
            "semi modes require semi-emergences on both sides (and plain modes plain ones)",
        ));
    }
    if matches!(mode, MorphismMode::Strong | MorphismMode::StrongSemi) && a.order() != b.order() {
        return Ok(Vec::new());
    }
    let src = a.category();
    let tgt = b.category();
    let mut object_candidates = Vec::with_capacity(src.object_count());
    for o in 0..src.object_count() {
        let want = a.object_set(o);
        let cands: Vec<ObjId> = (0..tgt.object_count())
            .filter(|&t| b.object_set(t) == want)
            .collect();
        object_candidates.push(cands);
    }
    let spec = SearchSpec {
        source: src,
        target: tgt,
        object_candidates,
        morphism_ok: Box::new(move |m, img| b.function_of(img) == a.function_of(m)),
        bijective: false,
        budget,
        limit: None,
    };
    search_functors(&spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IsoMode {
    Iso,
    StrongIso,
    SemiIso,
    StrongSemiIso,
    Equivalence,
    SemiEquivalence,
}

/// Verdict of an isomorphism/equivalence search, with the witness
/// functor on success.
#[derive(Debug, Clone)]
pub struct IsoVerdict {
    pub holds: bool,
    pub witness: Option<Functor>,
    pub notes: Vec<String>,
}

/// Search for a witness functor for the mode's conjunction: category
/// isomorphism plus underlying-compatibility (plus equal orders in the
/// strong modes), or a full+faithful+isomorphism-dense homomorphism for
/// the equivalence modes.
pub fn check_iso(
    a: EmergenceRef<'_>,
    b: EmergenceRef<'_>,
    mode: IsoMode,
    budget: u64,
) -> Result<IsoVerdict> {
    let semi_mode = matches!(
        mode,
        IsoMode::SemiIso | IsoMode::StrongSemiIso | IsoMode::SemiEquivalence
    );
    if semi_mode != (a.is_semi() && b.is_semi()) {
        return Err(Error::structural(
            "semi modes require semi-emergences on both sides (and plain modes plain ones)",
        ));
    }
    let mut notes = Vec::new();
    if matches!(mode, IsoMode::StrongIso | IsoMode::StrongSemiIso) && a.order() != b.order() {
        return Ok(IsoVerdict {
            holds: false,
            witness: None,
            notes: vec![format!(
                "orders differ: {} vs {}",
                a.order(),
                b.order()
            )],
        });
    }
    match mode {
        IsoMode::Equivalence | IsoMode::SemiEquivalence => {
            let hom_mode = if semi_mode {
                MorphismMode::Semi
            } else {
                MorphismMode::Hom
            };
            let homs = enumerate_homomorphisms(a, b, hom_mode, budget)?;
            for h in homs {
                let flags = functor_properties(&h);
                if flags.full && flags.faithful && flags.isomorphism_dense {
                    return Ok(IsoVerdict {
                        holds: true,
                        witness: Some(h),
                        notes,
                    });
                }
            }
            notes.push("no full, faithful, isomorphism-dense homomorphism exists".into());
            Ok(IsoVerdict {
                holds: false,
                witness: None,
                notes,
            })
        }
        _ => {
            let src = a.category();
            let tgt = b.category();
            if src.object_count() != tgt.object_count()
                || src.morphism_count() != tgt.morphism_count()
            {
                return Ok(IsoVerdict {
                    holds: false,
                    witness: None,
                    notes: vec!["object or morphism counts differ".into()],
                });
            }
            let mut object_candidates = Vec::with_capacity(src.object_count());
            for o in 0..src.object_count() {
                let want = a.object_set(o);
                let cands: Vec<ObjId> = (0..tgt.object_count())
                    .filter(|&t| b.object_set(t) == want)
                    .collect();
                object_candidates.push(cands);
            }
            let spec = SearchSpec {
                source: src,
                target: tgt,
                object_candidates,
                morphism_ok: Box::new(move |m, img| b.function_of(img) == a.function_of(m)),
                bijective: true,
                budget,
                limit: Some(1),
            };
            let found = search_functors(&spec)?;
            match found.into_iter().next() {
                Some(mut w) => {
                    w.name = format!("iso_{}_{}", a.name(), b.name());
                    notes.push("categories isomorphic and underlying triangles commute".into());
                    Ok(IsoVerdict {
                        holds: true,
                        witness: Some(w),
                        notes,
                    })
                }
                None => Ok(IsoVerdict {
                    holds: false,
                    witness: None,
                    notes,
                }),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SmallThin {
    pub small: bool,
    pub thin: bool,
}

/// Smallness is trivially true for finite presentations (reported with
/// that caveat by callers); thin means every hom-set has at most one
/// morphism.
pub fn classify(e: &Emergence) -> SmallThin {
    SmallThin {
        small: true,
        thin: e.category().is_thin(),
    }
}

/// How the opposite emergence's underlying functions were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OppositeGuMode {
    /// Caller supplied explicit reversal functions.
    Supplied,
    /// Every underlying function was bijective; inverses were used.
    Inverses,
    /// Original functions re-indexed onto the reversed arrows. This is
    /// bookkeeping only: the result fails carrier typing unless the
    /// carriers coincide, and validation will say so.
    Reindexed,
}

#[derive(Debug, Clone)]
pub struct OppositeEmergence {
    pub emergence: Emergence,
    pub mode: OppositeGuMode,
    /// True when the emitted data does not validate as a construct
    /// (re-indexed functions on mismatched carriers).
    pub degenerate: bool,
}

/// Opposite emergence: the category is arrow-reversed, carriers and
/// signature are unchanged, and the order is preserved exactly. The
/// underlying functions of reversed morphisms are taken from `reversal`
/// when supplied; otherwise inverses are used when every function is
/// bijective, else the original functions are re-indexed and the result
/// is flagged degenerate.
pub fn opposite_emergence(
    e: &Emergence,
    reversal: Option<Vec<FinFunction>>,
) -> Result<OppositeEmergence> {
    let cat = e.category();
    let op_cat = Arc::new(cat.opposite());
    let (underlying, mode) = match reversal {
        Some(fns) => {
            if fns.len() != cat.morphism_count() {
                return Err(Error::structural(
                    "reversal must supply one function per morphism",
                ));
            }
            (fns, OppositeGuMode::Supplied)
        }
        None => {
            let all = e.construct.underlying_all();
            if all.iter().all(|f| f.is_bijective()) {
                let inv = all
                    .iter()
                    .map(|f| f.inverse().expect("bijective"))
                    .collect();
                (inv, OppositeGuMode::Inverses)
            } else {
                (all.to_vec(), OppositeGuMode::Reindexed)
            }
        }
    };
    let construct = Arc::new(Construct::new(
        format!("{}^op", e.construct.name.trim_end_matches("^op")),
        op_cat,
        e.construct.signature.clone(),
        e.construct.carriers().to_vec(),
        (0..cat.object_count())
            .map(|o| e.construct.tables(o).to_vec())
            .collect(),
        underlying,
    )?);
    let emergence = Emergence::standard(format!("{}^op", e.name.trim_end_matches("^op")), construct);
    let degenerate = !emergence.validate().is_ok();
    Ok(OppositeEmergence {
        emergence,
        mode,
        degenerate,
    })
}

/// Conditions (i)–(v) for `sub` to be a sub-emergence of `parent`:
/// object and hom inclusion by name, identity agreement, composition
/// restriction, structure restriction, and the inclusion-functor
/// underlying equation U_sub = U_parent ∘ E. Full mode adds hom-set
/// equality on shared objects.
pub fn check_sub_emergence(sub: &Emergence, parent: &Emergence, full: bool) -> Verdict {
    let sc = sub.category();
    let pc = parent.category();
    // (i) object inclusion by name.
    for o in 0..sc.object_count() {
        let name = sc.object_name(o);
        let Some(po) = pc.object_id(name) else {
            return Verdict::no(format!("object `{name}` is not a parent object"));
        };
        if sub.construct.carrier(o) != parent.construct.carrier(po) {
            return Verdict::no(format!("object `{name}` changes carrier"));
        }
        let st = sub.construct.tables(o);
        let pt = parent.construct.tables(po);
        if st != pt {
            return Verdict::no(format!("object `{name}` changes structure"));
        }
    }
    if sub.construct.signature != parent.construct.signature {
        return Verdict::no("signatures differ; a sub-emergence shares its parent's operations");
    }
    // (ii) hom inclusion by name, endpoints preserved.
    for m in sc.morphism_ids() {
        let mor = sc.morphism(m);
        let Some(pm) = pc.morphism_id(&mor.name) else {
            return Verdict::no(format!("morphism `{}` is not a parent morphism", mor.name));
        };
        let pmor = pc.morphism(pm);
        if pc.object_name(pmor.dom) != sc.object_name(mor.dom)
            || pc.object_name(pmor.cod) != sc.object_name(mor.cod)
        {
            return Verdict::no(format!("morphism `{}` changes endpoints", mor.name));
        }
    }
    // (iii) identities agree.
    for o in 0..sc.object_count() {
        let name = sc.object_name(o);
        let po = pc.object_id(name).expect("checked above");
        let sid = &sc.morphism(sc.identity_of(o)).name;
        let pid = &pc.morphism(pc.identity_of(po)).name;
        if sid != pid {
            return Verdict::no(format!(
                "identity of `{name}` is `{sid}` in the candidate but `{pid}` in the parent"
            ));
        }
    }
    // (iv) composition is the restriction.
    for g in sc.morphism_ids() {
        for f in sc.morphism_ids() {
            let (pg, pf) = (
                pc.morphism_id(&sc.morphism(g).name).expect("checked"),
                pc.morphism_id(&sc.morphism(f).name).expect("checked"),
            );
            match (sc.compose(g, f), pc.compose(pg, pf)) {
                (Some(h), Some(ph)) => {
                    if sc.morphism(h).name != pc.morphism(ph).name {
                        return Verdict::no(format!(
                            "composite of ({}, {}) differs from the parent's",
                            sc.morphism(g).name,
                            sc.morphism(f).name
                        ));
                    }
                }
                (None, None) => {}
                _ => {
                    return Verdict::no(format!(
                        "composability of ({}, {}) differs from the parent's",
                        sc.morphism(g).name,
                        sc.morphism(f).name
                    ))
                }
            }
        }
    }
    // (v) U_sub = U_parent ∘ E on the nose.
    for m in sc.morphism_ids() {
        let pm = pc.morphism_id(&sc.morphism(m).name).expect("checked");
        if sub.gu.on_morphism(m) != parent.gu.on_morphism(pm) {
            return Verdict::no(format!(
                "underlying function of `{}` differs from the parent's",
                sc.morphism(m).name
            ));
        }
    }
    if full {
        for a in 0..sc.object_count() {
            for b in 0..sc.object_count() {
                let pa = pc.object_id(sc.object_name(a)).expect("checked");
                let pb = pc.object_id(sc.object_name(b)).expect("checked");
                if sc.hom(a, b).len() != pc.hom(pa, pb).len() {
                    return Verdict::no(format!(
                        "hom({}, {}) is a proper subset of the parent's hom-set",
                        sc.object_name(a),
                        sc.object_name(b)
                    ));
                }
            }
        }
    }
    Verdict::yes()
}

/// `a` induces `b`: every b-object has an a-object with identical
/// carrier whose slot set contains each of the b-object's slots as a
/// (kind, tag set, table) triple. Slot names are not compared; the
/// interpretation is flagged in the verdict notes.
pub fn check_induces(a: &Emergence, b: &Emergence) -> Verdict {
    let note = "slot containment read as (kind, tags, table) membership per object";
    for bo in 0..b.category().object_count() {
        let carrier = b.construct.carrier(bo);
        let b_slots: Vec<_> = b
            .construct
            .signature
            .slots
            .iter()
            .zip(b.construct.tables(bo))
            .collect();
        let mut found = false;
        'candidates: for ao in 0..a.category().object_count() {
            if a.construct.carrier(ao) != carrier {
                continue;
            }
            let a_slots: Vec<_> = a
                .construct
                .signature
                .slots
                .iter()
                .zip(a.construct.tables(ao))
                .collect();
            for (b_slot, b_table) in &b_slots {
                let matched = a_slots.iter().any(|(a_slot, a_table)| {
                    a_slot.kind == b_slot.kind
                        && a_slot.tags == b_slot.tags
                        && a_table == b_table
                });
                if !matched {
                    continue 'candidates;
                }
            }
            found = true;
            break;
        }
        if !found {
            return Verdict::no(format!(
                "no a-object with carrier {} covers the structure of `{}`",
                carrier,
                b.category().object_name(bo)
            ))
            .note(note);
        }
    }
    Verdict::yes().note(note)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GradedKind {
    /// Order strictly drops and the underlying triangle commutes.
    Partial,
    /// Order strictly drops; the underlying functors are not compared.
    Relative,
}

/// A strict-order-dropping functor between emergences; the degree is
/// the order difference, always positive.
#[derive(Debug, Clone)]
pub struct GradedArrow {
    pub kind: GradedKind,
    pub source: Emergence,
    pub target: Emergence,
    pub functor: Functor,
    pub degree: usize,
}

/// Build a graded arrow, rejecting non-positive degrees: nothing is
/// "more emergent" than itself.
pub fn graded_arrow(
    kind: GradedKind,
    a: &Emergence,
    b: &Emergence,
    f: &Functor,
) -> Result<GradedArrow> {
    if a.order() <= b.order() {
        return Err(Error::structural(format!(
            "degree must be positive: order({}) = {} is not above order({}) = {}",
            a.name,
            a.order(),
            b.name,
            b.order()
        )));
    }
    let report = f.validate();
    if !report.is_ok() {
        return Err(Error::structural(format!(
            "functor `{}` does not validate: {}",
            f.name,
            report.render()
        )));
    }
    if kind == GradedKind::Partial {
        let verdict = check_morphism(
            f,
            EmergenceRef::Plain(a),
            EmergenceRef::Plain(b),
            MorphismMode::Hom,
        )?;
        if !verdict.holds {
            return Err(Error::structural(format!(
                "partial arrow requires the commuting underlying triangle: {}",
                verdict.witness.unwrap_or_default()
            )));
        }
    }
    Ok(GradedArrow {
        kind,
        source: a.clone(),
        target: b.clone(),
        functor: f.clone(),
        degree: a.order() - b.order(),
    })
}

/// Compose two graded arrows of the same kind; degrees add exactly, and
/// the partial triangle is re-verified on the composite.
pub fn compose_graded(first: &GradedArrow, second: &GradedArrow) -> Result<GradedArrow> {
    if first.kind != second.kind {
        return Err(Error::structural("graded arrows of different kinds do not compose"));
    }
    if first.target != second.source {
        return Err(Error::structural(
            "graded arrows do not chain: first.target differs from second.source",
        ));
    }
    let functor = second.functor.compose_after(&first.functor)?;
    let composed = graded_arrow(first.kind, &first.source, &second.target, &functor)?;
    debug_assert_eq!(composed.degree, first.degree + second.degree);
    Ok(composed)
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtremalReport {
    pub initial: Verdict,
    pub terminal: Verdict,
    pub battery: Vec<String>,
}

/// Battery-relative initial/terminal verdicts. Initial: for every
/// battery member a unique homomorphism out of `e` with strictly larger
/// order at `e`. Terminal: every member of order ≥ 2 admits a unique
/// homomorphism into `e` that drops order strictly. Both are stated
/// relative to the named battery.
pub fn extremal_status(e: &Emergence, battery: &[Emergence], budget: u64) -> Result<ExtremalReport> {
    let mut initial = Verdict::yes();
    for b in battery {
        if e.order() <= b.order() {
            initial = Verdict::no(format!(
                "battery member `{}` has order {} ≥ {}",
                b.name,
                b.order(),
                e.order()
            ));
            break;
        }
        let homs = enumerate_homomorphisms(
            EmergenceRef::Plain(e),
            EmergenceRef::Plain(b),
            MorphismMode::Hom,
            budget,
        )?;
        if homs.len() != 1 {
            initial = Verdict::no(format!(
                "{} homomorphism(s) into battery member `{}` (need exactly 1)",
                homs.len(),
                b.name
            ));
            break;
        }
    }

    let mut terminal = Verdict::yes();
    for b in battery {
        if b.order() < 2 {
            continue;
        }
        if b.order() <= e.order() {
            terminal = Verdict::no(format!(
                "battery member `{}` has order {} ≤ order {} of `{}`, so no relative arrow exists",
                b.name,
                b.order(),
                e.order(),
                e.name
            ));
            break;
        }
        let homs = enumerate_homomorphisms(
            EmergenceRef::Plain(b),
            EmergenceRef::Plain(e),
            MorphismMode::Hom,
            budget,
        )?;
        if homs.len() != 1 {
            terminal = Verdict::no(format!(
                "{} homomorphism(s) from battery member `{}` (need exactly 1)",
                homs.len(),
                b.name
            ));
            break;
        }
    }
    let terminal = terminal.note(
        "terminal arrows run from the battery member into the candidate; \
         the defining triple is written with the opposite label order",
    );

    Ok(ExtremalReport {
        initial,
        terminal,
        battery: battery.iter().map(|b| b.name.clone()).collect(),
    })
}

/// A successful representability witness: the representing object, the
/// materialized fragment both functors land in, and the natural
/// isomorphism from the hom-functor to the underlying functor.
#[derive(Debug, Clone)]
pub struct Representation {
    pub object: String,
    pub fragment: FinSetFragment,
    pub hom_functor: Functor,
    pub underlying_functor: Functor,
    pub iso: NaturalTransformation,
}

/// Search for a representing object: an object A and a natural
/// isomorphism hom(A,−) ⇒ U. Candidates are screened by hom-set sizes
/// first; surviving candidates are tried by picking the element that
/// the identity would map to, which determines every component. On
/// success, preservation of monomorphisms is asserted as a sanity
/// check.
pub fn find_representation(e: &Emergence, budget: u64) -> Result<Option<Representation>> {
    let cat = e.category();
    'candidates: for a in 0..cat.object_count() {
        for x in 0..cat.object_count() {
            if cat.hom(a, x).len() != e.gu.object_set(x).len() {
                continue 'candidates;
            }
        }
        let hom_at = |x: ObjId| -> FinSet {
            FinSet::new(cat.hom(a, x).iter().map(|&m| cat.morphism(m).name.clone()))
        };
        // Try each element of U(A) as the image of the identity.
        for xi in 0..e.gu.object_set(a).len() {
            let x_label = e.gu.object_set(a).elem(xi).to_string();
            let mut components = Vec::with_capacity(cat.object_count());
            let mut all_bijective = true;
            for obj in 0..cat.object_count() {
                let pairs: Vec<(String, String)> = cat
                    .hom(a, obj)
                    .iter()
                    .map(|&g| {
                        let img = e
                            .gu
                            .on_morphism(g)
                            .apply(&x_label)
                            .expect("element of U(A)")
                            .to_string();
                        (cat.morphism(g).name.clone(), img)
                    })
                    .collect();
                let comp = FinFunction::from_pairs(
                    hom_at(obj),
                    e.gu.object_set(obj).clone(),
                    pairs.iter().map(|(p, q)| (p.as_str(), q.as_str())),
                )?;
                if !comp.is_bijective() {
                    all_bijective = false;
                    break;
                }
                components.push(comp);
            }
            if !all_bijective {
                continue;
            }
            // Materialize one fragment holding both functors and the
            // components (plus inverses, so the components are fragment
            // isomorphisms), then hand back a checked natural iso.
            let mut sets: Vec<FinSet> = (0..cat.object_count()).map(hom_at).collect();
            sets.extend((0..cat.object_count()).map(|o| e.gu.object_set(o).clone()));
            let mut seeds: Vec<FinFunction> = Vec::new();
            for m in cat.morphism_ids() {
                let mor = cat.morphism(m);
                let pairs: Vec<(String, String)> = cat
                    .hom(a, mor.dom)
                    .iter()
                    .map(|&g| {
                        let c = cat.compose(m, g).expect("total composition");
                        (cat.morphism(g).name.clone(), cat.morphism(c).name.clone())
                    })
                    .collect();
                seeds.push(FinFunction::from_pairs(
                    hom_at(mor.dom),
                    hom_at(mor.cod),
                    pairs.iter().map(|(p, q)| (p.as_str(), q.as_str())),
                )?);
                seeds.push(e.gu.on_morphism(m).clone());
            }
            for c in &components {
                seeds.push(c.clone());
                seeds.push(c.inverse().expect("bijective component"));
            }
            let fragment = materialize_finset(&sets, FinSetMode::Generated, &seeds, budget)?;
            let target = Arc::new(fragment.category.clone());
            let hom_functor = Functor::new(
                format!("hom({},-)", cat.object_name(a)),
                cat.clone(),
                target.clone(),
                (0..cat.object_count())
                    .map(|o| fragment.object_of(&hom_at(o)).expect("present"))
                    .collect(),
                cat.morphism_ids()
                    .map(|m| fragment.morphism_of(&seeds[2 * m]).expect("present"))
                    .collect(),
            )?;
            let underlying_functor = Functor::new(
                format!("U_{}", e.name),
                cat.clone(),
                target,
                (0..cat.object_count())
                    .map(|o| fragment.object_of(e.gu.object_set(o)).expect("present"))
                    .collect(),
                cat.morphism_ids()
                    .map(|m| fragment.morphism_of(e.gu.on_morphism(m)).expect("present"))
                    .collect(),
            )?;
            let iso = NaturalTransformation {
                from: hom_functor.clone(),
                to: underlying_functor.clone(),
                components: components
                    .iter()
                    .map(|c| fragment.morphism_of(c).expect("present"))
                    .collect(),
            };
            let report = iso.validate();
            if !report.is_ok() {
                return Err(Error::Internal(format!(
                    "constructed transformation is not natural: {}",
                    report.render()
                )));
            }
            if !iso.is_natural_isomorphism() {
                return Err(Error::Internal(
                    "constructed transformation is not a natural isomorphism".into(),
                ));
            }
            // Representable functors preserve monomorphisms; a failure
            // here would mean the construction above is wrong.
            for m in cat.morphism_ids() {
                if cat.is_mono(m) && !e.gu.on_morphism(m).is_injective() {
                    return Err(Error::Internal(format!(
                        "mono `{}` has a non-injective underlying function despite representability",
                        cat.morphism(m).name
                    )));
                }
            }
            return Ok(Some(Representation {
                object: cat.object_name(a).to_string(),
                fragment,
                hom_functor,
                underlying_functor,
                iso,
            }));
        }
    }
    Ok(None)
}

/// Realize a family of underlying functors as genuine functors into one
/// shared generated fragment of the set category. Used wherever the
/// triangle over the ambient set category must be checked with real
/// composition (stabilizers, strong equalizers, pushout squares).
pub fn materialize_underlying(
    items: &[EmergenceRef<'_>],
    budget: u64,
) -> Result<(FinSetFragment, Vec<Functor>)> {
    let mut sets = Vec::new();
    let mut seeds = Vec::new();
    for it in items {
        for o in 0..it.category().object_count() {
            sets.push(it.object_set(o).clone());
        }
        for m in it.category().morphism_ids() {
            seeds.push(it.function_of(m).clone());
        }
    }
    let fragment = materialize_finset(&sets, FinSetMode::Generated, &seeds, budget)?;
    let target = Arc::new(fragment.category.clone());
    let mut functors = Vec::with_capacity(items.len());
    for it in items {
        let object_map = (0..it.category().object_count())
            .map(|o| {
                fragment
                    .object_of(it.object_set(o))
                    .ok_or_else(|| Error::Internal("object set missing from fragment".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let morphism_map = it
            .category()
            .morphism_ids()
            .map(|m| {
                fragment
                    .morphism_of(it.function_of(m))
                    .ok_or_else(|| Error::Internal("assignment missing from fragment".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        functors.push(Functor::new(
            format!("U_{}", it.name()),
            it.category().clone(),
            target.clone(),
            object_map,
            morphism_map,
        )?);
    }
    Ok((fragment, functors))
}

/// All functors between the underlying categories, for callers that
/// need raw competitor enumeration.
pub fn enumerate_plain_functors(
    a: &Arc<FinCategory>,
    b: &Arc<FinCategory>,
    budget: u64,
) -> Result<Vec<Functor>> {
    enumerate_functors(a, b, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::battery::{arrow, chain3, one_object};
    use crate::construct::{OperationTable, SignatureSlot, SlotKind, StructureSignature};
    use crate::report::DEFAULT_BUDGET;
    use std::collections::BTreeSet;

    fn bits() -> FinSet {
        FinSet::new(["0", "1"])
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

    fn slot(name: &str) -> SignatureSlot {
        SignatureSlot {
            name: name.into(),
            kind: SlotKind::Internal,
            tags: BTreeSet::new(),
        }
    }

    fn point_emergence(name: &str, slots: usize) -> Emergence {
        let cat = Arc::new(one_object());
        let sig = StructureSignature::new(
            (0..slots).map(|i| slot(&format!("s{i}"))).collect(),
        )
        .unwrap();
        let construct = Arc::new(
            Construct::new(
                format!("{name}-construct"),
                cat,
                sig,
                vec![bits()],
                vec![(0..slots).map(|_| xor()).collect()],
                vec![FinFunction::identity(&bits())],
            )
            .unwrap(),
        );
        Emergence::standard(name, construct)
    }

    #[test]
    fn xor_point_emergence_has_order_one() {
        let e = point_emergence("e", 1);
        assert!(e.validate().is_ok());
        assert_eq!(e.order(), 1);
    }

    #[test]
    fn two_slot_emergence_has_order_two() {
        let e = point_emergence("ring-like", 2);
        assert!(e.validate().is_ok());
        assert_eq!(e.order(), 2);
    }

    #[test]
    fn zero_slot_signature_is_rejected_as_emergence() {
        let e = point_emergence("flat", 0);
        let report = e.validate();
        assert!(report.violations.iter().any(|v| v.rule == "zero-order"));
    }

    #[test]
    fn identity_functor_is_a_homomorphism() {
        let e = point_emergence("e", 1);
        let id = Functor::identity(e.category().clone());
        let v = check_morphism(
            &id,
            EmergenceRef::Plain(&e),
            EmergenceRef::Plain(&e),
            MorphismMode::Hom,
        )
        .unwrap();
        assert!(v.holds);
    }

    #[test]
    fn composite_of_homomorphisms_is_a_homomorphism() {
        let e = point_emergence("e", 1);
        let f = point_emergence("f", 2);
        let g = point_emergence("g", 3);
        let ef = enumerate_homomorphisms(
            EmergenceRef::Plain(&e),
            EmergenceRef::Plain(&f),
            MorphismMode::Hom,
            DEFAULT_BUDGET,
        )
        .unwrap();
        let fg = enumerate_homomorphisms(
            EmergenceRef::Plain(&f),
            EmergenceRef::Plain(&g),
            MorphismMode::Hom,
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert!(!ef.is_empty() && !fg.is_empty());
        let comp = fg[0].compose_after(&ef[0]).unwrap();
        let v = check_morphism(
            &comp,
            EmergenceRef::Plain(&e),
            EmergenceRef::Plain(&g),
            MorphismMode::Hom,
        )
        .unwrap();
        assert!(v.holds);
    }

    #[test]
    fn carrier_mismatch_fails_with_object_witness() {
        let e = point_emergence("e", 1);
        let cat = Arc::new(one_object());
        let s = FinSet::new(["a", "b"]);
        let table = OperationTable::internal_from_rows(
            s.clone(),
            [
                ("a", "a", "a"),
                ("a", "b", "b"),
                ("b", "a", "b"),
                ("b", "b", "a"),
            ],
            BTreeSet::new(),
        )
        .unwrap();
        let construct = Arc::new(
            Construct::new(
                "other",
                cat,
                StructureSignature::new(vec![slot("s0")]).unwrap(),
                vec![s.clone()],
                vec![vec![table]],
                vec![FinFunction::identity(&s)],
            )
            .unwrap(),
        );
        let other = Emergence::standard("other", construct);
        let f = Functor::constant(e.category().clone(), other.category().clone(), 0);
        let v = check_morphism(
            &f,
            EmergenceRef::Plain(&e),
            EmergenceRef::Plain(&other),
            MorphismMode::Hom,
        )
        .unwrap();
        assert!(!v.holds);
        assert!(v.witness.unwrap().contains("object"));
    }

    #[test]
    fn no_homomorphism_exists_into_an_incompatible_singleton_target() {
        // The target's singleton carrier differs from the source
        // carriers, so no underlying-compatible functor exists.
        let a = point_emergence("a", 1);
        let cat = Arc::new(one_object());
        let s = FinSet::singleton("z");
        let t = OperationTable::internal_from_rows(s.clone(), [("z", "z", "z")], BTreeSet::new())
            .unwrap();
        let term = Emergence::standard(
            "term",
            Arc::new(
                Construct::new(
                    "termc",
                    cat,
                    StructureSignature::new(vec![slot("s0")]).unwrap(),
                    vec![s.clone()],
                    vec![vec![t]],
                    vec![FinFunction::identity(&s)],
                )
                .unwrap(),
            ),
        );
        let homs = enumerate_homomorphisms(
            EmergenceRef::Plain(&a),
            EmergenceRef::Plain(&term),
            MorphismMode::Hom,
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert!(homs.is_empty());
    }

    #[test]
    fn opposite_preserves_order_and_is_involutive_on_the_category() {
        let e = point_emergence("e", 2);
        let op = opposite_emergence(&e, None).unwrap();
        assert_eq!(op.emergence.order(), e.order());
        assert_eq!(op.mode, OppositeGuMode::Inverses);
        assert!(!op.degenerate);
        let back = opposite_emergence(&op.emergence, None).unwrap();
        assert_eq!(back.emergence.category().as_ref(), e.category().as_ref());
    }

    #[test]
    fn opposite_of_non_bijective_underlying_is_flagged_degenerate() {
        // Arrow construct whose endpoints have different carriers and
        // whose arrow function collapses onto a singleton: no reversal
        // is derivable, so re-indexing is emitted and flagged.
        let cat = Arc::new(arrow());
        let sa = bits();
        let sb = FinSet::singleton("x");
        let tb = OperationTable::internal_from_rows(sb.clone(), [("x", "x", "x")], BTreeSet::new())
            .unwrap();
        let f = cat.morphism_id("f").unwrap();
        let id_b = cat.morphism_id("id_B").unwrap();
        let mut underlying = vec![FinFunction::identity(&sa); 3];
        underlying[id_b] = FinFunction::identity(&sb);
        underlying[f] = FinFunction::constant(sa.clone(), sb.clone(), "x").unwrap();
        let construct = Arc::new(
            Construct::new(
                "arrowc",
                cat,
                StructureSignature::new(vec![slot("s0")]).unwrap(),
                vec![sa.clone(), sb.clone()],
                vec![vec![xor()], vec![tb]],
                underlying,
            )
            .unwrap(),
        );
        let e = Emergence::standard("e", construct);
        assert!(e.validate().is_ok());
        let op = opposite_emergence(&e, None).unwrap();
        assert_eq!(op.mode, OppositeGuMode::Reindexed);
        assert!(op.degenerate);
        assert_eq!(op.emergence.order(), e.order());
    }

    #[test]
    fn opposite_with_supplied_reversal_validates() {
        let cat = Arc::new(arrow());
        let sa = bits();
        let sb = FinSet::singleton("x");
        let tb = OperationTable::internal_from_rows(sb.clone(), [("x", "x", "x")], BTreeSet::new())
            .unwrap();
        let f = cat.morphism_id("f").unwrap();
        let id_a = cat.morphism_id("id_A").unwrap();
        let id_b = cat.morphism_id("id_B").unwrap();
        let mut underlying = vec![FinFunction::identity(&sa); 3];
        underlying[id_b] = FinFunction::identity(&sb);
        underlying[f] = FinFunction::constant(sa.clone(), sb.clone(), "x").unwrap();
        let construct = Arc::new(
            Construct::new(
                "arrowc",
                cat,
                StructureSignature::new(vec![slot("s0")]).unwrap(),
                vec![sa.clone(), sb.clone()],
                vec![vec![xor()], vec![tb]],
                underlying,
            )
            .unwrap(),
        );
        let e = Emergence::standard("e", construct);
        // In the opposite, f runs B → A, so it needs {x} → {0,1}.
        let mut reversal = vec![FinFunction::identity(&sa); 3];
        reversal[id_a] = FinFunction::identity(&sa);
        reversal[id_b] = FinFunction::identity(&sb);
        reversal[f] = FinFunction::constant(sb.clone(), sa.clone(), "0").unwrap();
        let op = opposite_emergence(&e, Some(reversal)).unwrap();
        assert_eq!(op.mode, OppositeGuMode::Supplied);
        assert!(!op.degenerate);
        assert!(op.emergence.validate().is_ok());
        assert_eq!(op.emergence.order(), e.order());
    }

    #[test]
    fn classify_reports_thin_for_chains_and_not_for_parallel_pairs() {
        use crate::battery::parallel_pair;
        let chain = Arc::new(chain3());
        let s = FinSet::singleton("x");
        let t = OperationTable::internal_from_rows(s.clone(), [("x", "x", "x")], BTreeSet::new())
            .unwrap();
        let construct = Arc::new(
            Construct::new(
                "chainc",
                chain.clone(),
                StructureSignature::new(vec![slot("s0")]).unwrap(),
                vec![s.clone(); 3],
                vec![vec![t.clone()], vec![t.clone()], vec![t.clone()]],
                vec![FinFunction::identity(&s); chain.morphism_count()],
            )
            .unwrap(),
        );
        let e = Emergence::standard("chain-e", construct);
        assert!(e.validate().is_ok());
        assert!(classify(&e).thin);
        assert!(classify(&e).small);

        let pp = Arc::new(parallel_pair());
        let construct = Arc::new(
            Construct::new(
                "ppc",
                pp.clone(),
                StructureSignature::new(vec![slot("s0")]).unwrap(),
                vec![s.clone(); 2],
                vec![vec![t.clone()], vec![t.clone()]],
                vec![FinFunction::identity(&s); pp.morphism_count()],
            )
            .unwrap(),
        );
        let e2 = Emergence::standard("pp-e", construct);
        assert!(!classify(&e2).thin);
    }

    #[test]
    fn graded_arrow_rejects_equal_orders() {
        let e = point_emergence("e", 2);
        let id = Functor::identity(e.category().clone());
        assert!(graded_arrow(GradedKind::Relative, &e, &e, &id).is_err());
    }

    #[test]
    fn graded_degrees_add_under_composition() {
        let a = point_emergence("a", 3);
        let b = point_emergence("b", 2);
        let c = point_emergence("c", 1);
        let id_ab = Functor::constant(a.category().clone(), b.category().clone(), 0);
        let id_bc = Functor::constant(b.category().clone(), c.category().clone(), 0);
        let g1 = graded_arrow(GradedKind::Partial, &a, &b, &id_ab).unwrap();
        let g2 = graded_arrow(GradedKind::Partial, &b, &c, &id_bc).unwrap();
        assert_eq!(g1.degree, 1);
        let comp = compose_graded(&g1, &g2).unwrap();
        assert_eq!(comp.degree, 2);
    }

    #[test]
    fn relative_arrow_of_degree_two() {
        let a = point_emergence("a", 3);
        let c = point_emergence("c", 1);
        let f = Functor::constant(a.category().clone(), c.category().clone(), 0);
        let g = graded_arrow(GradedKind::Relative, &a, &c, &f).unwrap();
        assert_eq!(g.degree, 2);
    }

    #[test]
    fn sub_emergence_is_reflexive_in_full_mode() {
        let e = point_emergence("e", 1);
        let v = check_sub_emergence(&e, &e, true);
        assert!(v.holds);
    }

    #[test]
    fn induces_holds_reflexively_and_on_enrichment() {
        let e = point_emergence("e", 1);
        assert!(check_induces(&e, &e).holds);
        let enriched = point_emergence("rich", 2);
        // The enriched emergence's objects carry a superset of slots.
        assert!(check_induces(&enriched, &e).holds);
        // Carrier mismatch breaks it.
        let cat = Arc::new(one_object());
        let s = FinSet::new(["p", "q", "r"]);
        let t = OperationTable::internal_from_rows(
            s.clone(),
            (0..3).flat_map(|i: usize| (0..3).map(move |j: usize| (i, j, (i + j) % 3))).map(
                |(i, j, k)| {
                    let names = ["p", "q", "r"];
                    (names[i], names[j], names[k])
                },
            ),
            BTreeSet::new(),
        )
        .unwrap();
        let construct = Arc::new(
            Construct::new(
                "triple",
                cat,
                StructureSignature::new(vec![slot("s0")]).unwrap(),
                vec![s.clone()],
                vec![vec![t]],
                vec![FinFunction::identity(&s)],
            )
            .unwrap(),
        );
        let big = Emergence::standard("big", construct);
        assert!(!check_induces(&big, &e).holds);
    }

    #[test]
    fn point_emergence_with_singleton_carrier_is_representable() {
        let cat = Arc::new(one_object());
        let s = FinSet::singleton("x");
        let t = OperationTable::internal_from_rows(s.clone(), [("x", "x", "x")], BTreeSet::new())
            .unwrap();
        let construct = Arc::new(
            Construct::new(
                "pointc",
                cat,
                StructureSignature::new(vec![slot("s0")]).unwrap(),
                vec![s.clone()],
                vec![vec![t]],
                vec![FinFunction::identity(&s)],
            )
            .unwrap(),
        );
        let e = Emergence::standard("pt", construct);
        let rep = find_representation(&e, DEFAULT_BUDGET).unwrap();
        assert!(rep.is_some());
        let rep = rep.unwrap();
        assert_eq!(rep.object, "*");
        assert!(rep.iso.is_natural_isomorphism());
    }

    #[test]
    fn size_screen_rejects_unrepresentable_emergences() {
        // Carrier has two elements but all hom-sets are singletons.
        let e = point_emergence("e", 1);
        assert!(find_representation(&e, DEFAULT_BUDGET).unwrap().is_none());
    }

    #[test]
    fn designed_representable_emergence_is_found_with_injective_monos() {
        // Parallel-pair construct: hom(A,A) = {id}, hom(A,B) = {u, v},
        // carriers sized to match, underlying functions chosen so the
        // two arrows pick out the two elements of B's carrier.
        use crate::battery::parallel_pair;
        let cat = Arc::new(parallel_pair());
        let sa = FinSet::singleton("x");
        let sb = FinSet::new(["p", "q"]);
        let ta = OperationTable::internal_from_rows(sa.clone(), [("x", "x", "x")], BTreeSet::new())
            .unwrap();
        let tb = OperationTable::internal_from_rows(
            sb.clone(),
            [
                ("p", "p", "p"),
                ("p", "q", "q"),
                ("q", "p", "q"),
                ("q", "q", "p"),
            ],
            BTreeSet::new(),
        )
        .unwrap();
        let u = cat.morphism_id("u").unwrap();
        let v = cat.morphism_id("v").unwrap();
        let id_b = cat.morphism_id("id_B").unwrap();
        let mut underlying = vec![FinFunction::identity(&sa); cat.morphism_count()];
        underlying[id_b] = FinFunction::identity(&sb);
        underlying[u] = FinFunction::constant(sa.clone(), sb.clone(), "p").unwrap();
        underlying[v] = FinFunction::constant(sa.clone(), sb.clone(), "q").unwrap();
        let construct = Arc::new(
            Construct::new(
                "walker",
                cat,
                StructureSignature::new(vec![slot("s0")]).unwrap(),
                vec![sa.clone(), sb.clone()],
                vec![vec![ta], vec![tb]],
                underlying,
            )
            .unwrap(),
        );
        let e = Emergence::standard("walker", construct);
        assert!(e.validate().is_ok());
        let rep = find_representation(&e, DEFAULT_BUDGET).unwrap().expect("representable");
        assert_eq!(rep.object, "A");
        assert!(rep.iso.is_natural_isomorphism());
        // Monos of the category map to injective functions.
        for m in e.category().morphism_ids() {
            if e.category().is_mono(m) {
                assert!(e.gu.on_morphism(m).is_injective());
            }
        }
    }

    #[test]
    fn extremal_terminal_example() {
        // Terminal candidate: one object, one identity, order 1, carrier {x}.
        let cat = Arc::new(one_object());
        let s = FinSet::singleton("x");
        let t = OperationTable::internal_from_rows(s.clone(), [("x", "x", "x")], BTreeSet::new())
            .unwrap();
        let term = Emergence::standard(
            "term",
            Arc::new(
                Construct::new(
                    "termc",
                    cat.clone(),
                    StructureSignature::new(vec![slot("s0")]).unwrap(),
                    vec![s.clone()],
                    vec![vec![t.clone()]],
                    vec![FinFunction::identity(&s)],
                )
                .unwrap(),
            ),
        );
        // Battery: order ≥ 2 emergences with singleton carriers.
        let battery: Vec<Emergence> = (2..4)
            .map(|k| {
                let sig = StructureSignature::new(
                    (0..k).map(|i| slot(&format!("s{i}"))).collect(),
                )
                .unwrap();
                Emergence::standard(
                    format!("b{k}"),
                    Arc::new(
                        Construct::new(
                            format!("b{k}c"),
                            cat.clone(),
                            sig,
                            vec![s.clone()],
                            vec![vec![t.clone(); k]],
                            vec![FinFunction::identity(&s)],
                        )
                        .unwrap(),
                    ),
                )
            })
            .collect();
        let report = extremal_status(&term, &battery, DEFAULT_BUDGET).unwrap();
        assert!(report.terminal.holds);
        assert!(!report.initial.holds);
    }

    #[test]
    fn iso_and_equivalence_modes_agree_on_identical_emergences() {
        let e = point_emergence("e", 1);
        let iso = check_iso(
            EmergenceRef::Plain(&e),
            EmergenceRef::Plain(&e),
            IsoMode::Iso,
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert!(iso.holds);
        let equiv = check_iso(
            EmergenceRef::Plain(&e),
            EmergenceRef::Plain(&e),
            IsoMode::Equivalence,
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert!(equiv.holds);
    }
}
