//! Finite categories presented by explicit composition tables, functors
//! between them, and natural transformations — everything validated or
//! searched by exhaustive enumeration.
//!
//! Hom-set disjointness is structural: every morphism identifier is
//! globally unique within its category and carries exactly one
//! (domain, codomain) pair. Objects and morphisms keep declaration
//! order, and every enumeration below emits results in a fixed
//! lexicographic order, so output is reproducible run to run.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::report::{Error, Result, ValidationReport};

pub type ObjId = usize;
pub type MorId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    pub name: String,
    pub dom: ObjId,
    pub cod: ObjId,
}

/// A finite category: objects, morphisms with endpoints, an identity
/// assignment, and a total composition table over composable pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct FinCategory {
    pub name: String,
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identity: Vec<MorId>,
    compose: HashMap<(MorId, MorId), MorId>,
    hom: HashMap<(ObjId, ObjId), Vec<MorId>>,
}

/// Incremental presentation of a category; structural problems
/// (duplicate or unknown identifiers) are rejected at `build`, while
/// axiom violations are left for `FinCategory::validate` to report.
#[derive(Debug, Clone, Default)]
pub struct CategoryBuilder {
    name: String,
    objects: Vec<String>,
    morphisms: Vec<(String, String, String)>,
    identities: Vec<(String, String)>,
    compose_rows: Vec<(String, String, String)>,
}

impl CategoryBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        CategoryBuilder {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn object(&mut self, name: impl Into<String>) -> &mut Self {
        self.objects.push(name.into());
        self
    }

    pub fn morphism(
        &mut self,
        name: impl Into<String>,
        dom: impl Into<String>,
        cod: impl Into<String>,
    ) -> &mut Self {
        self.morphisms.push((name.into(), dom.into(), cod.into()));
        self
    }

    pub fn identity(&mut self, obj: impl Into<String>, mor: impl Into<String>) -> &mut Self {
        self.identities.push((obj.into(), mor.into()));
        self
    }

    /// Record compose(g, f) = h, i.e. h = g ∘ f.
    pub fn compose(
        &mut self,
        g: impl Into<String>,
        f: impl Into<String>,
        h: impl Into<String>,
    ) -> &mut Self {
        self.compose_rows.push((g.into(), f.into(), h.into()));
        self
    }

    /// Declare `id_X` identities plus their forced composition rows for
    /// every object that lacks an explicit identity. Explicit rows are
    /// never overwritten, so deliberately broken tables stay expressible.
    pub fn auto_identities(&mut self) -> &mut Self {
        let declared: Vec<String> = self.identities.iter().map(|(o, _)| o.clone()).collect();
        for obj in self.objects.clone() {
            if !declared.contains(&obj) {
                let id_name = format!("id_{obj}");
                self.morphism(id_name.clone(), obj.clone(), obj.clone());
                self.identity(obj, id_name);
            }
        }
        self
    }

    /// Fill in the identity-law composition rows (id ∘ f and f ∘ id) for
    /// every pair that has no explicit row yet.
    pub fn fill_identity_compositions(&mut self) -> &mut Self {
        let mut have: Vec<(String, String)> = self
            .compose_rows
            .iter()
            .map(|(g, f, _)| (g.clone(), f.clone()))
            .collect();
        let idents = self.identities.clone();
        let morphisms = self.morphisms.clone();
        for (obj, id_mor) in &idents {
            for (m, dom, cod) in &morphisms {
                if cod == obj && !have.contains(&(id_mor.clone(), m.clone())) {
                    self.compose_rows
                        .push((id_mor.clone(), m.clone(), m.clone()));
                    have.push((id_mor.clone(), m.clone()));
                }
                if dom == obj && !have.contains(&(m.clone(), id_mor.clone())) {
                    self.compose_rows
                        .push((m.clone(), id_mor.clone(), m.clone()));
                    have.push((m.clone(), id_mor.clone()));
                }
            }
        }
        self
    }

    pub fn build(&self) -> Result<FinCategory> {
        let mut obj_index: HashMap<&str, ObjId> = HashMap::new();
        for (i, o) in self.objects.iter().enumerate() {
            if obj_index.insert(o, i).is_some() {
                return Err(Error::structural(format!("duplicate object `{o}`")));
            }
        }
        let mut mor_index: HashMap<&str, MorId> = HashMap::new();
        let mut morphisms = Vec::with_capacity(self.morphisms.len());
        for (i, (name, dom, cod)) in self.morphisms.iter().enumerate() {
            if mor_index.insert(name, i).is_some() {
                return Err(Error::structural(format!("duplicate morphism `{name}`")));
            }
            let dom = *obj_index
                .get(dom.as_str())
                .ok_or_else(|| Error::structural(format!("morphism `{name}`: unknown object `{dom}`")))?;
            let cod = *obj_index
                .get(cod.as_str())
                .ok_or_else(|| Error::structural(format!("morphism `{name}`: unknown object `{cod}`")))?;
            morphisms.push(Morphism {
                name: name.clone(),
                dom,
                cod,
            });
        }
        let mut identity: Vec<Option<MorId>> = vec![None; self.objects.len()];
        for (obj, mor) in &self.identities {
            let o = *obj_index
                .get(obj.as_str())
                .ok_or_else(|| Error::structural(format!("identity for unknown object `{obj}`")))?;
            let m = *mor_index
                .get(mor.as_str())
                .ok_or_else(|| Error::structural(format!("identity names unknown morphism `{mor}`")))?;
            if identity[o].is_some() {
                return Err(Error::structural(format!("object `{obj}` has two identities")));
            }
            identity[o] = Some(m);
        }
        let identity = identity
            .into_iter()
            .enumerate()
            .map(|(o, v)| {
                v.ok_or_else(|| {
                    Error::structural(format!("object `{}` has no identity morphism", self.objects[o]))
                })
            })
            .collect::<Result<Vec<MorId>>>()?;

        let mut compose: HashMap<(MorId, MorId), MorId> = HashMap::new();
        for (g, f, h) in &self.compose_rows {
            let g = *mor_index
                .get(g.as_str())
                .ok_or_else(|| Error::structural(format!("compose row names unknown morphism `{g}`")))?;
            let f = *mor_index
                .get(f.as_str())
                .ok_or_else(|| Error::structural(format!("compose row names unknown morphism `{f}`")))?;
            let h = *mor_index
                .get(h.as_str())
                .ok_or_else(|| Error::structural(format!("compose row names unknown morphism `{h}`")))?;
            if let Some(prev) = compose.insert((g, f), h) {
                if prev != h {
                    return Err(Error::structural(format!(
                        "conflicting compose rows for ({}, {})",
                        morphisms[g].name, morphisms[f].name
                    )));
                }
            }
        }

        let mut hom: HashMap<(ObjId, ObjId), Vec<MorId>> = HashMap::new();
        for (i, m) in morphisms.iter().enumerate() {
            hom.entry((m.dom, m.cod)).or_default().push(i);
        }

        Ok(FinCategory {
            name: self.name.clone(),
            objects: self.objects.clone(),
            morphisms,
            identity,
            compose,
            hom,
        })
    }
}

impl FinCategory {
    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn object_name(&self, o: ObjId) -> &str {
        &self.objects[o]
    }

    pub fn object_id(&self, name: &str) -> Option<ObjId> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn morphism(&self, m: MorId) -> &Morphism {
        &self.morphisms[m]
    }

    pub fn morphism_id(&self, name: &str) -> Option<MorId> {
        self.morphisms.iter().position(|m| m.name == name)
    }

    pub fn morphism_ids(&self) -> impl Iterator<Item = MorId> {
        0..self.morphisms.len()
    }

    pub fn identity_of(&self, o: ObjId) -> MorId {
        self.identity[o]
    }

    pub fn is_identity(&self, m: MorId) -> bool {
        self.identity.contains(&m)
    }

    pub fn compose(&self, g: MorId, f: MorId) -> Option<MorId> {
        self.compose.get(&(g, f)).copied()
    }

    pub fn hom(&self, a: ObjId, b: ObjId) -> &[MorId] {
        self.hom.get(&(a, b)).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Exhaustive axiom check: composition totality and typing,
    /// associativity over every composable triple, and both identity
    /// laws. Every violation names its witnessing pair or triple.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new(format!("category {}", self.name));
        for (o, &id) in self.identity.iter().enumerate() {
            let m = &self.morphisms[id];
            if m.dom != o || m.cod != o {
                report.push(
                    "identity-endpoints",
                    format!(
                        "identity `{}` of `{}` is not an endomorphism of it",
                        m.name, self.objects[o]
                    ),
                );
            }
        }
        // compose(g, f) defined exactly when cod(f) = dom(g).
        for g in 0..self.morphisms.len() {
            for f in 0..self.morphisms.len() {
                let composable = self.morphisms[f].cod == self.morphisms[g].dom;
                match self.compose.get(&(g, f)) {
                    None if composable => report.push(
                        "compose-total",
                        format!(
                            "no composite for ({}, {})",
                            self.morphisms[g].name, self.morphisms[f].name
                        ),
                    ),
                    Some(&h) if !composable => report.push(
                        "compose-spurious",
                        format!(
                            "composite `{}` declared for non-composable ({}, {})",
                            self.morphisms[h].name, self.morphisms[g].name, self.morphisms[f].name
                        ),
                    ),
                    Some(&h) if composable => {
                        let hm = &self.morphisms[h];
                        if hm.dom != self.morphisms[f].dom || hm.cod != self.morphisms[g].cod {
                            report.push(
                                "compose-endpoints",
                                format!(
                                    "composite of ({}, {}) is `{}` with wrong endpoints",
                                    self.morphisms[g].name, self.morphisms[f].name, hm.name
                                ),
                            );
                        }
                    }
                    _ => {}
                }
            }
        }
        // Identity laws.
        for (i, m) in self.morphisms.iter().enumerate() {
            let id_dom = self.identity[m.dom];
            let id_cod = self.identity[m.cod];
            if let Some(c) = self.compose(i, id_dom) {
                if c != i {
                    report.push(
                        "identity-law",
                        format!(
                            "{} ∘ {} = {} (expected {})",
                            m.name,
                            self.morphisms[id_dom].name,
                            self.morphisms[c].name,
                            m.name
                        ),
                    );
                }
            }
            if let Some(c) = self.compose(id_cod, i) {
                if c != i {
                    report.push(
                        "identity-law",
                        format!(
                            "{} ∘ {} = {} (expected {})",
                            self.morphisms[id_cod].name,
                            m.name,
                            self.morphisms[c].name,
                            m.name
                        ),
                    );
                }
            }
        }
        // Associativity over composable triples, iterated via hom sets.
        for f in 0..self.morphisms.len() {
            for g in self.out_of(self.morphisms[f].cod) {
                for h in self.out_of(self.morphisms[g].cod) {
                    let gf = self.compose(g, f);
                    let hg = self.compose(h, g);
                    if let (Some(gf), Some(hg)) = (gf, hg) {
                        let left = self.compose(h, gf);
                        let right = self.compose(hg, f);
                        if let (Some(l), Some(r)) = (left, right) {
                            if l != r {
                                report.push(
                                    "associativity",
                                    format!(
                                        "({} ∘ {}) ∘ {} = {} but {} ∘ ({} ∘ {}) = {}",
                                        self.morphisms[h].name,
                                        self.morphisms[g].name,
                                        self.morphisms[f].name,
                                        self.morphisms[r].name,
                                        self.morphisms[h].name,
                                        self.morphisms[g].name,
                                        self.morphisms[f].name,
                                        self.morphisms[l].name,
                                    ),
                                );
                            }
                        }
                    }
                }
            }
        }
        report
    }

    fn out_of(&self, o: ObjId) -> Vec<MorId> {
        let mut out = Vec::new();
        for b in 0..self.objects.len() {
            out.extend_from_slice(self.hom(o, b));
        }
        out.sort_unstable();
        out
    }

    /// Arrow-reversed category. Objects and morphism names are kept, the
    /// endpoints swap, and compose_op(g, f) = compose(f, g). Applying it
    /// twice restores the original field for field.
    pub fn opposite(&self) -> FinCategory {
        let name = match self.name.strip_suffix("^op") {
            Some(base) => base.to_string(),
            None => format!("{}^op", self.name),
        };
        let morphisms: Vec<Morphism> = self
            .morphisms
            .iter()
            .map(|m| Morphism {
                name: m.name.clone(),
                dom: m.cod,
                cod: m.dom,
            })
            .collect();
        let compose = self
            .compose
            .iter()
            .map(|(&(g, f), &h)| ((f, g), h))
            .collect();
        let mut hom: HashMap<(ObjId, ObjId), Vec<MorId>> = HashMap::new();
        for (i, m) in morphisms.iter().enumerate() {
            hom.entry((m.dom, m.cod)).or_default().push(i);
        }
        FinCategory {
            name,
            objects: self.objects.clone(),
            morphisms,
            identity: self.identity.clone(),
            compose,
            hom,
        }
    }

    /// Morphism-level isomorphisms: arrows with a two-sided inverse.
    pub fn iso_morphisms(&self) -> Vec<MorId> {
        (0..self.morphisms.len())
            .filter(|&m| self.morphism_inverse(m).is_some())
            .collect()
    }

    pub fn morphism_inverse(&self, m: MorId) -> Option<MorId> {
        let mor = &self.morphisms[m];
        for &g in self.hom(mor.cod, mor.dom) {
            if self.compose(g, m) == Some(self.identity[mor.dom])
                && self.compose(m, g) == Some(self.identity[mor.cod])
            {
                return Some(g);
            }
        }
        None
    }

    /// Object isomorphism classes, each sorted, listed by least member.
    pub fn object_iso_classes(&self) -> Vec<Vec<ObjId>> {
        let n = self.objects.len();
        let mut class = vec![usize::MAX; n];
        let mut classes: Vec<Vec<ObjId>> = Vec::new();
        for a in 0..n {
            if class[a] != usize::MAX {
                continue;
            }
            let c = classes.len();
            class[a] = c;
            let mut members = vec![a];
            for b in (a + 1)..n {
                if class[b] == usize::MAX && self.objects_isomorphic(a, b) {
                    class[b] = c;
                    members.push(b);
                }
            }
            classes.push(members);
        }
        classes
    }

    pub fn objects_isomorphic(&self, a: ObjId, b: ObjId) -> bool {
        a == b
            || self
                .hom(a, b)
                .iter()
                .any(|&m| self.morphism_inverse(m).is_some())
    }

    /// Monomorphism test by left cancellation over every parallel pair
    /// within this category.
    pub fn is_mono(&self, m: MorId) -> bool {
        let dom = self.morphisms[m].dom;
        for c in 0..self.objects.len() {
            let arrows = self.hom(c, dom);
            for (i, &g) in arrows.iter().enumerate() {
                for &h in &arrows[i + 1..] {
                    if self.compose(m, g) == self.compose(m, h) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Epimorphism test by right cancellation.
    pub fn is_epi(&self, m: MorId) -> bool {
        let cod = self.morphisms[m].cod;
        for c in 0..self.objects.len() {
            let arrows = self.hom(cod, c);
            for (i, &g) in arrows.iter().enumerate() {
                for &h in &arrows[i + 1..] {
                    if self.compose(g, m) == self.compose(h, m) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Every hom-set has at most one morphism.
    pub fn is_thin(&self) -> bool {
        self.hom.values().all(|v| v.len() <= 1)
    }

    /// Per-object degree profile used to prune isomorphism search.
    fn degree_signature(&self, o: ObjId) -> (usize, usize, usize, Vec<usize>, Vec<usize>) {
        let endo = self.hom(o, o).len();
        let mut outgoing = 0;
        let mut incoming = 0;
        let mut out_sizes = Vec::new();
        let mut in_sizes = Vec::new();
        for b in 0..self.objects.len() {
            let h = self.hom(o, b).len();
            outgoing += h;
            out_sizes.push(h);
            let h = self.hom(b, o).len();
            incoming += h;
            in_sizes.push(h);
        }
        out_sizes.sort_unstable();
        in_sizes.sort_unstable();
        (endo, outgoing, incoming, out_sizes, in_sizes)
    }
}

/// A functor presented by explicit object and morphism maps. Equality is
/// extensional: same named endpoints and identical maps.
#[derive(Debug, Clone)]
pub struct Functor {
    pub name: String,
    pub source: Arc<FinCategory>,
    pub target: Arc<FinCategory>,
    pub object_map: Vec<ObjId>,
    pub morphism_map: Vec<MorId>,
}

impl PartialEq for Functor {
    fn eq(&self, other: &Self) -> bool {
        self.source.name == other.source.name
            && self.target.name == other.target.name
            && self.object_map == other.object_map
            && self.morphism_map == other.morphism_map
    }
}

impl Eq for Functor {}

impl Functor {
    pub fn new(
        name: impl Into<String>,
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        object_map: Vec<ObjId>,
        morphism_map: Vec<MorId>,
    ) -> Result<Self> {
        if object_map.len() != source.object_count() {
            return Err(Error::structural("object map is not total"));
        }
        if morphism_map.len() != source.morphism_count() {
            return Err(Error::structural("morphism map is not total"));
        }
        if object_map.iter().any(|&o| o >= target.object_count()) {
            return Err(Error::structural("object map hits outside the target"));
        }
        if morphism_map.iter().any(|&m| m >= target.morphism_count()) {
            return Err(Error::structural("morphism map hits outside the target"));
        }
        Ok(Functor {
            name: name.into(),
            source,
            target,
            object_map,
            morphism_map,
        })
    }

    pub fn identity(cat: Arc<FinCategory>) -> Self {
        Functor {
            name: format!("Id_{}", cat.name),
            source: cat.clone(),
            object_map: (0..cat.object_count()).collect(),
            morphism_map: (0..cat.morphism_count()).collect(),
            target: cat,
        }
    }

    /// Constant functor collapsing everything onto one target object.
    pub fn constant(source: Arc<FinCategory>, target: Arc<FinCategory>, obj: ObjId) -> Self {
        let id = target.identity_of(obj);
        Functor {
            name: format!("const_{}", target.object_name(obj)),
            object_map: vec![obj; source.object_count()],
            morphism_map: vec![id; source.morphism_count()],
            source,
            target,
        }
    }

    pub fn on_object(&self, o: ObjId) -> ObjId {
        self.object_map[o]
    }

    pub fn on_morphism(&self, m: MorId) -> MorId {
        self.morphism_map[m]
    }

    /// g.compose_after(f) = g ∘ f.
    pub fn compose_after(&self, f: &Functor) -> Result<Functor> {
        if f.target.name != self.source.name {
            return Err(Error::structural(format!(
                "cannot compose functors: `{}` lands in `{}`, `{}` starts at `{}`",
                f.name, f.target.name, self.name, self.source.name
            )));
        }
        Ok(Functor {
            name: format!("{}∘{}", self.name, f.name),
            source: f.source.clone(),
            target: self.target.clone(),
            object_map: f.object_map.iter().map(|&o| self.object_map[o]).collect(),
            morphism_map: f
                .morphism_map
                .iter()
                .map(|&m| self.morphism_map[m])
                .collect(),
        })
    }

    /// Exhaustive functor-law check: endpoint preservation, identity
    /// preservation, and composition preservation.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new(format!("functor {}", self.name));
        for (i, m) in self.source.morphisms().iter().enumerate() {
            let img = self.target.morphism(self.morphism_map[i]);
            if img.dom != self.object_map[m.dom] || img.cod != self.object_map[m.cod] {
                report.push(
                    "endpoint-preservation",
                    format!(
                        "image of `{}: {}→{}` is `{}: {}→{}`",
                        m.name,
                        self.source.object_name(m.dom),
                        self.source.object_name(m.cod),
                        img.name,
                        self.target.object_name(img.dom),
                        self.target.object_name(img.cod),
                    ),
                );
            }
        }
        for o in 0..self.source.object_count() {
            let id = self.source.identity_of(o);
            let expect = self.target.identity_of(self.object_map[o]);
            if self.morphism_map[id] != expect {
                report.push(
                    "identity-preservation",
                    format!(
                        "identity of `{}` maps to `{}`",
                        self.source.object_name(o),
                        self.target.morphism(self.morphism_map[id]).name
                    ),
                );
            }
        }
        for g in 0..self.source.morphism_count() {
            for f in 0..self.source.morphism_count() {
                if let Some(h) = self.source.compose(g, f) {
                    let lhs = self.morphism_map[h];
                    match self
                        .target
                        .compose(self.morphism_map[g], self.morphism_map[f])
                    {
                        Some(rhs) if rhs == lhs => {}
                        Some(rhs) => report.push(
                            "composition-preservation",
                            format!(
                                "F({} ∘ {}) = {} but F({}) ∘ F({}) = {}",
                                self.source.morphism(g).name,
                                self.source.morphism(f).name,
                                self.target.morphism(lhs).name,
                                self.source.morphism(g).name,
                                self.source.morphism(f).name,
                                self.target.morphism(rhs).name,
                            ),
                        ),
                        None => report.push(
                            "composition-preservation",
                            format!(
                                "images of ({}, {}) do not compose in the target",
                                self.source.morphism(g).name,
                                self.source.morphism(f).name
                            ),
                        ),
                    }
                }
            }
        }
        report
    }

    /// Compact textual fingerprint of the two maps, used in reports.
    pub fn describe(&self) -> String {
        let objs: Vec<String> = self
            .object_map
            .iter()
            .enumerate()
            .map(|(a, &b)| {
                format!(
                    "{}→{}",
                    self.source.object_name(a),
                    self.target.object_name(b)
                )
            })
            .collect();
        let mors: Vec<String> = self
            .morphism_map
            .iter()
            .enumerate()
            .map(|(a, &b)| {
                format!(
                    "{}→{}",
                    self.source.morphism(a).name,
                    self.target.morphism(b).name
                )
            })
            .collect();
        format!("[{} | {}]", objs.join(" "), mors.join(" "))
    }
}

impl FinCategory {
    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }
}

/// Exhaustively computed functor properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PropertyFlags {
    pub faithful: bool,
    pub full: bool,
    pub embedding: bool,
    pub injective_on_objects: bool,
    pub isomorphism_dense: bool,
    pub is_isomorphism: bool,
}

/// Compute every property flag by exhaustive checking. Isomorphism
/// density enumerates target object isomorphism classes; the
/// isomorphism flag is decided by constructing the inverse.
pub fn functor_properties(f: &Functor) -> PropertyFlags {
    let src = &f.source;
    let tgt = &f.target;

    let mut faithful = true;
    let mut full = true;
    for a in 0..src.object_count() {
        for b in 0..src.object_count() {
            let hom = src.hom(a, b);
            let fa = f.object_map[a];
            let fb = f.object_map[b];
            let mut images: Vec<MorId> = hom.iter().map(|&m| f.morphism_map[m]).collect();
            images.sort_unstable();
            let before = images.len();
            images.dedup();
            if images.len() != before {
                faithful = false;
            }
            for &t in tgt.hom(fa, fb) {
                if !images.contains(&t) {
                    full = false;
                }
            }
        }
    }

    let mut mor_images: Vec<MorId> = f.morphism_map.clone();
    mor_images.sort_unstable();
    let before = mor_images.len();
    mor_images.dedup();
    let embedding = mor_images.len() == before;

    let mut obj_images: Vec<ObjId> = f.object_map.clone();
    obj_images.sort_unstable();
    let before = obj_images.len();
    obj_images.dedup();
    let injective_on_objects = obj_images.len() == before;

    let isomorphism_dense = {
        let classes = tgt.object_iso_classes();
        classes.iter().all(|class| {
            class
                .iter()
                .any(|&b| f.object_map.iter().any(|&img| tgt.objects_isomorphic(img, b)))
        })
    };

    let is_isomorphism = inverse_functor(f).is_some();

    PropertyFlags {
        faithful,
        full,
        embedding,
        injective_on_objects,
        isomorphism_dense,
        is_isomorphism,
    }
}

/// The two-sided inverse of a functor, when one exists.
pub fn inverse_functor(f: &Functor) -> Option<Functor> {
    let src = &f.source;
    let tgt = &f.target;
    if src.object_count() != tgt.object_count() || src.morphism_count() != tgt.morphism_count() {
        return None;
    }
    let mut object_map = vec![usize::MAX; tgt.object_count()];
    for (a, &b) in f.object_map.iter().enumerate() {
        if object_map[b] != usize::MAX {
            return None;
        }
        object_map[b] = a;
    }
    let mut morphism_map = vec![usize::MAX; tgt.morphism_count()];
    for (a, &b) in f.morphism_map.iter().enumerate() {
        if morphism_map[b] != usize::MAX {
            return None;
        }
        morphism_map[b] = a;
    }
    let inv = Functor {
        name: format!("{}⁻¹", f.name),
        source: f.target.clone(),
        target: f.source.clone(),
        object_map,
        morphism_map,
    };
    if inv.validate().is_ok() {
        Some(inv)
    } else {
        None
    }
}

/// Constraints threaded through the backtracking functor search. Object
/// and morphism candidates are filtered per assignment; the search
/// always enforces the functor laws.
pub(crate) struct SearchSpec<'a> {
    pub source: &'a Arc<FinCategory>,
    pub target: &'a Arc<FinCategory>,
    /// Allowed object images per source object, in target order.
    pub object_candidates: Vec<Vec<ObjId>>,
    /// Extra per-morphism admissibility predicate.
    pub morphism_ok: Box<dyn Fn(MorId, MorId) -> bool + 'a>,
    /// Require the resulting functor to be bijective on objects and on
    /// morphisms (isomorphism search).
    pub bijective: bool,
    pub budget: u64,
    /// Stop after this many functors have been found.
    pub limit: Option<usize>,
}

impl<'a> SearchSpec<'a> {
    pub fn unconstrained(source: &'a Arc<FinCategory>, target: &'a Arc<FinCategory>, budget: u64) -> Self {
        let cands: Vec<ObjId> = (0..target.object_count()).collect();
        SearchSpec {
            source,
            target,
            object_candidates: vec![cands; source.object_count()],
            morphism_ok: Box::new(|_, _| true),
            bijective: false,
            budget,
            limit: None,
        }
    }
}

/// Backtracking enumeration of all functors satisfying a `SearchSpec`,
/// emitted in lexicographic order of (object map, morphism map). The
/// budget counts candidate object maps and the search refuses up front
/// when the whole space exceeds it.
pub(crate) fn search_functors(spec: &SearchSpec<'_>) -> Result<Vec<Functor>> {
    let src = spec.source;
    let tgt = spec.target;

    let mut estimate: u64 = 1;
    for c in &spec.object_candidates {
        estimate = estimate.saturating_mul(c.len() as u64);
        if estimate > spec.budget {
            return Err(Error::budget(
                format!("functor enumeration {} → {}", src.name, tgt.name),
                estimate,
                spec.budget,
            ));
        }
    }

    let n_obj = src.object_count();
    let n_mor = src.morphism_count();
    // Non-identity morphisms in declaration order; identities are forced.
    let free_mors: Vec<MorId> = (0..n_mor).filter(|&m| !src.is_identity(m)).collect();

    let mut results = Vec::new();
    let mut object_map = vec![0usize; n_obj];
    let mut morphism_map = vec![usize::MAX; n_mor];

    // Pairs (g, f, h) with h = g∘f, grouped by the greatest morphism id
    // involved so constraints fire as soon as all three are assigned.
    let mut comp_rows: Vec<(MorId, MorId, MorId)> = Vec::new();
    for g in 0..n_mor {
        for f in 0..n_mor {
            if let Some(h) = src.compose(g, f) {
                comp_rows.push((g, f, h));
            }
        }
    }

    fn assign_objects(
        depth: usize,
        spec: &SearchSpec<'_>,
        object_map: &mut Vec<ObjId>,
        morphism_map: &mut Vec<MorId>,
        free_mors: &[MorId],
        comp_rows: &[(MorId, MorId, MorId)],
        results: &mut Vec<Functor>,
    ) -> bool {
        let src = spec.source;
        if depth == object_map.len() {
            if spec.bijective {
                let mut seen = vec![false; spec.target.object_count()];
                for &o in object_map.iter() {
                    if seen[o] {
                        return true;
                    }
                    seen[o] = true;
                }
                if spec.target.object_count() != object_map.len() {
                    return true;
                }
            }
            // Force identity images and recurse over free morphisms.
            for o in 0..object_map.len() {
                let id = src.identity_of(o);
                let img = spec.target.identity_of(object_map[o]);
                if !(spec.morphism_ok)(id, img) {
                    return true;
                }
                morphism_map[id] = img;
            }
            let done = assign_morphisms(
                0,
                spec,
                object_map,
                morphism_map,
                free_mors,
                comp_rows,
                results,
            );
            for o in 0..object_map.len() {
                morphism_map[src.identity_of(o)] = usize::MAX;
            }
            return done;
        }
        for &cand in &spec.object_candidates[depth] {
            if spec.bijective && object_map[..depth].contains(&cand) {
                continue;
            }
            object_map[depth] = cand;
            if !assign_objects(
                depth + 1,
                spec,
                object_map,
                morphism_map,
                free_mors,
                comp_rows,
                results,
            ) {
                return false;
            }
        }
        true
    }

    #[allow(clippy::too_many_arguments)]
    fn assign_morphisms(
        depth: usize,
        spec: &SearchSpec<'_>,
        object_map: &[ObjId],
        morphism_map: &mut Vec<MorId>,
        free_mors: &[MorId],
        comp_rows: &[(MorId, MorId, MorId)],
        results: &mut Vec<Functor>,
    ) -> bool {
        if depth == free_mors.len() {
            if spec.bijective {
                let mut seen = vec![false; spec.target.morphism_count()];
                for &m in morphism_map.iter() {
                    if seen[m] {
                        return true;
                    }
                    seen[m] = true;
                }
                if spec.target.morphism_count() != morphism_map.len() {
                    return true;
                }
            }
            results.push(Functor {
                name: format!("F{}", results.len()),
                source: spec.source.clone(),
                target: spec.target.clone(),
                object_map: object_map.to_vec(),
                morphism_map: morphism_map.clone(),
            });
            return spec.limit.is_none_or(|l| results.len() < l);
        }
        let m = free_mors[depth];
        let mor = spec.source.morphism(m);
        let fa = object_map[mor.dom];
        let fb = object_map[mor.cod];
        for &img in spec.target.hom(fa, fb) {
            if !(spec.morphism_ok)(m, img) {
                continue;
            }
            if spec.bijective && morphism_map.iter().any(|&x| x == img) {
                continue;
            }
            morphism_map[m] = img;
            let mut consistent = true;
            for &(g, f, h) in comp_rows {
                let (mg, mf, mh) = (morphism_map[g], morphism_map[f], morphism_map[h]);
                if mg != usize::MAX && mf != usize::MAX && mh != usize::MAX {
                    match spec.target.compose(mg, mf) {
                        Some(c) if c == mh => {}
                        _ => {
                            consistent = false;
                            break;
                        }
                    }
                }
            }
            if consistent
                && !assign_morphisms(
                    depth + 1,
                    spec,
                    object_map,
                    morphism_map,
                    free_mors,
                    comp_rows,
                    results,
                )
            {
                return false;
            }
            morphism_map[m] = usize::MAX;
        }
        true
    }

    if n_obj == 0 {
        // The empty source admits exactly the empty functor.
        results.push(Functor {
            name: "F0".into(),
            source: src.clone(),
            target: tgt.clone(),
            object_map: Vec::new(),
            morphism_map: Vec::new(),
        });
        if spec.bijective && (tgt.object_count() != 0 || tgt.morphism_count() != 0) {
            results.clear();
        }
        return Ok(results);
    }

    assign_objects(
        0,
        spec,
        &mut object_map,
        &mut morphism_map,
        &free_mors,
        &comp_rows,
        &mut results,
    );
    Ok(results)
}

/// Complete, duplicate-free, deterministically ordered list of every
/// functor from `a` to `b`. Budget overrun is signalled before any
/// partial output.
pub fn enumerate_functors(
    a: &Arc<FinCategory>,
    b: &Arc<FinCategory>,
    budget: u64,
) -> Result<Vec<Functor>> {
    search_functors(&SearchSpec::unconstrained(a, b, budget))
}

/// Search for an isomorphism of categories, pruning on per-object
/// degree signatures. `Ok(None)` means the categories are genuinely
/// non-isomorphic; budget overrun is an error, never a `None`.
pub fn find_isomorphism(
    a: &Arc<FinCategory>,
    b: &Arc<FinCategory>,
    budget: u64,
) -> Result<Option<Functor>> {
    if a.object_count() != b.object_count() || a.morphism_count() != b.morphism_count() {
        return Ok(None);
    }
    let sig_b: Vec<_> = (0..b.object_count()).map(|o| b.degree_signature(o)).collect();
    let mut object_candidates = Vec::with_capacity(a.object_count());
    for o in 0..a.object_count() {
        let sig = a.degree_signature(o);
        let cands: Vec<ObjId> = (0..b.object_count()).filter(|&t| sig_b[t] == sig).collect();
        if cands.is_empty() {
            return Ok(None);
        }
        object_candidates.push(cands);
    }
    let spec = SearchSpec {
        source: a,
        target: b,
        object_candidates,
        morphism_ok: Box::new(|_, _| true),
        bijective: true,
        budget,
        limit: Some(1),
    };
    let found = search_functors(&spec)?;
    Ok(found.into_iter().next().map(|mut f| {
        f.name = format!("iso_{}_{}", a.name, b.name);
        f
    }))
}

/// A finite product of categories together with its projection functors.
#[derive(Debug, Clone)]
pub struct ProductCategory {
    pub category: Arc<FinCategory>,
    pub projections: Vec<Functor>,
    factor_obj_counts: Vec<usize>,
    factor_mor_counts: Vec<usize>,
}

impl ProductCategory {
    /// Object of the product with the given per-factor components.
    pub fn object_index(&self, components: &[ObjId]) -> ObjId {
        let mut idx = 0;
        for (i, &c) in components.iter().enumerate() {
            idx = idx * self.factor_obj_counts[i] + c;
        }
        idx
    }

    pub fn morphism_index(&self, components: &[MorId]) -> MorId {
        let mut idx = 0;
        for (i, &c) in components.iter().enumerate() {
            idx = idx * self.factor_mor_counts[i] + c;
        }
        idx
    }

    pub fn object_components(&self, mut o: ObjId) -> Vec<ObjId> {
        let mut out = vec![0; self.factor_obj_counts.len()];
        for i in (0..self.factor_obj_counts.len()).rev() {
            out[i] = o % self.factor_obj_counts[i];
            o /= self.factor_obj_counts[i];
        }
        out
    }

    pub fn morphism_components(&self, mut m: MorId) -> Vec<MorId> {
        let mut out = vec![0; self.factor_mor_counts.len()];
        for i in (0..self.factor_mor_counts.len()).rev() {
            out[i] = m % self.factor_mor_counts[i];
            m /= self.factor_mor_counts[i];
        }
        out
    }
}

fn tuple_name(parts: &[&str]) -> String {
    format!("({})", parts.join(","))
}

/// Cartesian product of finitely many categories: objects and morphisms
/// are tuples, composition and identities are componentwise. Returns the
/// product with its projections; refuses with a size estimate when the
/// composition table would exceed the budget.
pub fn product_category(factors: &[Arc<FinCategory>], budget: u64) -> Result<ProductCategory> {
    if factors.is_empty() {
        return Err(Error::structural("product of zero categories is not supported"));
    }
    let mut mor_total: u64 = 1;
    let mut obj_total: u64 = 1;
    for f in factors {
        mor_total = mor_total.saturating_mul(f.morphism_count() as u64);
        obj_total = obj_total.saturating_mul(f.object_count() as u64);
    }
    let estimate = mor_total.saturating_mul(mor_total).max(obj_total);
    if estimate > budget {
        return Err(Error::budget("product category table", estimate, budget));
    }

    let factor_obj_counts: Vec<usize> = factors.iter().map(|f| f.object_count()).collect();
    let factor_mor_counts: Vec<usize> = factors.iter().map(|f| f.morphism_count()).collect();
    let n_obj = obj_total as usize;
    let n_mor = mor_total as usize;

    let decompose = |mut idx: usize, counts: &[usize]| -> Vec<usize> {
        let mut out = vec![0; counts.len()];
        for i in (0..counts.len()).rev() {
            out[i] = idx % counts[i];
            idx /= counts[i];
        }
        out
    };

    let mut objects = Vec::with_capacity(n_obj);
    for o in 0..n_obj {
        let comps = decompose(o, &factor_obj_counts);
        let names: Vec<&str> = comps
            .iter()
            .enumerate()
            .map(|(i, &c)| factors[i].object_name(c))
            .collect();
        objects.push(tuple_name(&names));
    }

    let mut morphisms = Vec::with_capacity(n_mor);
    for m in 0..n_mor {
        let comps = decompose(m, &factor_mor_counts);
        let names: Vec<&str> = comps
            .iter()
            .enumerate()
            .map(|(i, &c)| factors[i].morphism(c).name.as_str())
            .collect();
        let dom = comps
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &c)| acc * factor_obj_counts[i] + factors[i].morphism(c).dom);
        let cod = comps
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &c)| acc * factor_obj_counts[i] + factors[i].morphism(c).cod);
        morphisms.push(Morphism {
            name: tuple_name(&names),
            dom,
            cod,
        });
    }

    let mut identity = Vec::with_capacity(n_obj);
    for o in 0..n_obj {
        let comps = decompose(o, &factor_obj_counts);
        let id = comps
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &c)| acc * factor_mor_counts[i] + factors[i].identity_of(c));
        identity.push(id);
    }

    let mut compose: HashMap<(MorId, MorId), MorId> = HashMap::new();
    for g in 0..n_mor {
        let gc = decompose(g, &factor_mor_counts);
        for f in 0..n_mor {
            if morphisms[f].cod != morphisms[g].dom {
                continue;
            }
            let fc = decompose(f, &factor_mor_counts);
            let mut h = 0usize;
            let mut ok = true;
            for i in 0..factors.len() {
                match factors[i].compose(gc[i], fc[i]) {
                    Some(c) => h = h * factor_mor_counts[i] + c,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                compose.insert((g, f), h);
            }
        }
    }

    let mut hom: HashMap<(ObjId, ObjId), Vec<MorId>> = HashMap::new();
    for (i, m) in morphisms.iter().enumerate() {
        hom.entry((m.dom, m.cod)).or_default().push(i);
    }

    let name = factors
        .iter()
        .map(|f| f.name.clone())
        .collect::<Vec<_>>()
        .join("×");
    let category = Arc::new(FinCategory {
        name,
        objects,
        morphisms,
        identity,
        compose,
        hom,
    });

    let mut projections = Vec::with_capacity(factors.len());
    for (j, factor) in factors.iter().enumerate() {
        let object_map = (0..n_obj).map(|o| decompose(o, &factor_obj_counts)[j]).collect();
        let morphism_map = (0..n_mor).map(|m| decompose(m, &factor_mor_counts)[j]).collect();
        projections.push(Functor {
            name: format!("π{}", j + 1),
            source: category.clone(),
            target: factor.clone(),
            object_map,
            morphism_map,
        });
    }

    Ok(ProductCategory {
        category,
        projections,
        factor_obj_counts,
        factor_mor_counts,
    })
}

/// Componentwise lifting: given functors F_i between the i-th factors,
/// the product functor ∏F_i between the product categories.
pub fn product_functor(
    pa: &ProductCategory,
    pb: &ProductCategory,
    factors: &[Functor],
) -> Result<Functor> {
    if factors.len() != pa.factor_obj_counts.len() || factors.len() != pb.factor_obj_counts.len() {
        return Err(Error::structural("factor count mismatch in product functor"));
    }
    let n_obj = pa.category.object_count();
    let n_mor = pa.category.morphism_count();
    let mut object_map = Vec::with_capacity(n_obj);
    for o in 0..n_obj {
        let comps = pa.object_components(o);
        let imgs: Vec<ObjId> = comps
            .iter()
            .enumerate()
            .map(|(i, &c)| factors[i].object_map[c])
            .collect();
        object_map.push(pb.object_index(&imgs));
    }
    let mut morphism_map = Vec::with_capacity(n_mor);
    for m in 0..n_mor {
        let comps = pa.morphism_components(m);
        let imgs: Vec<MorId> = comps
            .iter()
            .enumerate()
            .map(|(i, &c)| factors[i].morphism_map[c])
            .collect();
        morphism_map.push(pb.morphism_index(&imgs));
    }
    Ok(Functor {
        name: format!(
            "∏({})",
            factors.iter().map(|f| f.name.clone()).collect::<Vec<_>>().join(",")
        ),
        source: pa.category.clone(),
        target: pb.category.clone(),
        object_map,
        morphism_map,
    })
}

/// The unique mediator ⟨F_1,…,F_n⟩ into a product determined by legs
/// F_i sharing a common source.
pub fn tupling_functor(product: &ProductCategory, legs: &[Functor]) -> Result<Functor> {
    if legs.is_empty() {
        return Err(Error::structural("tupling needs at least one leg"));
    }
    let source = legs[0].source.clone();
    for l in legs {
        if l.source.name != source.name {
            return Err(Error::structural("tupling legs must share a source"));
        }
    }
    let object_map = (0..source.object_count())
        .map(|o| {
            let comps: Vec<ObjId> = legs.iter().map(|l| l.object_map[o]).collect();
            product.object_index(&comps)
        })
        .collect();
    let morphism_map = (0..source.morphism_count())
        .map(|m| {
            let comps: Vec<MorId> = legs.iter().map(|l| l.morphism_map[m]).collect();
            product.morphism_index(&comps)
        })
        .collect();
    Ok(Functor {
        name: format!(
            "⟨{}⟩",
            legs.iter().map(|l| l.name.clone()).collect::<Vec<_>>().join(",")
        ),
        source,
        target: product.category.clone(),
        object_map,
        morphism_map,
    })
}

/// The covariant hom-functor at an object, landing in a generated
/// finite fragment of the category of sets. Hom-sets become label sets
/// of morphism names; the action on f is post-composition g ↦ f ∘ g.
pub fn hom_functor(
    cat: &Arc<FinCategory>,
    at: ObjId,
    budget: u64,
) -> Result<(crate::finset::FinSetFragment, Functor)> {
    use crate::finset::{materialize_finset, FinFunction, FinSet, FinSetMode};

    let hom_set = |x: ObjId| -> FinSet {
        FinSet::new(cat.hom(at, x).iter().map(|&m| cat.morphism(m).name.clone()))
    };

    let sets: Vec<FinSet> = (0..cat.object_count()).map(hom_set).collect();
    let mut seeds = Vec::new();
    let mut actions = Vec::with_capacity(cat.morphism_count());
    for m in cat.morphism_ids() {
        let mor = cat.morphism(m);
        let dom_set = &sets[mor.dom];
        let cod_set = &sets[mor.cod];
        let pairs: Vec<(String, String)> = cat
            .hom(at, mor.dom)
            .iter()
            .map(|&g| {
                let c = cat.compose(m, g).ok_or_else(|| {
                    Error::structural(format!(
                        "missing composite for hom action of `{}`",
                        mor.name
                    ))
                })?;
                Ok((cat.morphism(g).name.clone(), cat.morphism(c).name.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        let f = FinFunction::from_pairs(
            dom_set.clone(),
            cod_set.clone(),
            pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())),
        )?;
        seeds.push(f.clone());
        actions.push(f);
    }
    let fragment = materialize_finset(&sets, FinSetMode::Generated, &seeds, budget)?;
    let object_map = (0..cat.object_count())
        .map(|x| {
            fragment
                .object_of(&sets[x])
                .ok_or_else(|| Error::Internal("hom-set missing from fragment".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let morphism_map = actions
        .iter()
        .map(|f| {
            fragment
                .morphism_of(f)
                .ok_or_else(|| Error::Internal("hom action missing from fragment".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let functor = Functor {
        name: format!("hom({},-)", cat.object_name(at)),
        source: cat.clone(),
        target: Arc::new(fragment.category.clone()),
        object_map,
        morphism_map,
    };
    Ok((fragment, functor))
}

/// A natural transformation between parallel functors, presented by one
/// target morphism per source object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaturalTransformation {
    pub from: Functor,
    pub to: Functor,
    pub components: Vec<MorId>,
}

impl NaturalTransformation {
    /// Checks component typing and every naturality square.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new("natural transformation");
        if self.from.source.name != self.to.source.name
            || self.from.target.name != self.to.target.name
        {
            report.push("parallel", "the two functors are not parallel");
            return report;
        }
        let src = &self.from.source;
        let tgt = &self.from.target;
        if self.components.len() != src.object_count() {
            report.push("components", "one component required per source object");
            return report;
        }
        for (o, &c) in self.components.iter().enumerate() {
            let m = tgt.morphism(c);
            if m.dom != self.from.object_map[o] || m.cod != self.to.object_map[o] {
                report.push(
                    "component-endpoints",
                    format!(
                        "component at `{}` is `{}`, not F({0}) → G({0})",
                        src.object_name(o),
                        m.name
                    ),
                );
            }
        }
        if !report.is_ok() {
            return report;
        }
        for (mi, m) in src.morphisms().iter().enumerate() {
            let lhs = tgt.compose(self.components[m.cod], self.from.morphism_map[mi]);
            let rhs = tgt.compose(self.to.morphism_map[mi], self.components[m.dom]);
            if lhs.is_none() || lhs != rhs {
                report.push(
                    "naturality",
                    format!("square at `{}` does not commute", m.name),
                );
            }
        }
        report
    }

    pub fn is_natural_isomorphism(&self) -> bool {
        self.validate().is_ok()
            && self
                .components
                .iter()
                .all(|&c| self.from.target.morphism_inverse(c).is_some())
    }
}

/// Enumerate all natural transformations (or only the natural
/// isomorphisms) between two parallel functors, in lexicographic
/// component order.
pub fn enumerate_naturals(
    from: &Functor,
    to: &Functor,
    only_isos: bool,
    budget: u64,
) -> Result<Vec<NaturalTransformation>> {
    if from.source.name != to.source.name || from.target.name != to.target.name {
        return Err(Error::structural("functors are not parallel"));
    }
    let src = &from.source;
    let tgt = &from.target;
    let isos = tgt.iso_morphisms();
    let mut candidates: Vec<Vec<MorId>> = Vec::with_capacity(src.object_count());
    let mut estimate: u64 = 1;
    for o in 0..src.object_count() {
        let mut cands: Vec<MorId> = tgt
            .hom(from.object_map[o], to.object_map[o])
            .iter()
            .copied()
            .filter(|m| !only_isos || isos.contains(m))
            .collect();
        cands.sort_unstable();
        estimate = estimate.saturating_mul(cands.len() as u64);
        if estimate > budget {
            return Err(Error::budget("natural transformation search", estimate, budget));
        }
        candidates.push(cands);
    }

    let mut results = Vec::new();
    let mut components = vec![usize::MAX; src.object_count()];
    fn rec(
        depth: usize,
        candidates: &[Vec<MorId>],
        components: &mut Vec<MorId>,
        from: &Functor,
        to: &Functor,
        results: &mut Vec<NaturalTransformation>,
    ) {
        let src = &from.source;
        let tgt = &from.target;
        if depth == components.len() {
            results.push(NaturalTransformation {
                from: from.clone(),
                to: to.clone(),
                components: components.clone(),
            });
            return;
        }
        'next: for &c in &candidates[depth] {
            components[depth] = c;
            for (mi, m) in src.morphisms().iter().enumerate() {
                if m.dom > depth || m.cod > depth {
                    continue;
                }
                let lhs = tgt.compose(components[m.cod], from.morphism_map[mi]);
                let rhs = tgt.compose(to.morphism_map[mi], components[m.dom]);
                if lhs.is_none() || lhs != rhs {
                    continue 'next;
                }
            }
            rec(depth + 1, candidates, components, from, to, results);
        }
        components[depth] = usize::MAX;
    }
    rec(0, &candidates, &mut components, from, to, &mut results);
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::battery::{arrow, chain3, discrete2, empty, one_object, parallel_pair};
    use crate::report::DEFAULT_BUDGET;

    #[test]
    fn one_object_identity_category_is_valid() {
        let c = one_object();
        assert!(c.validate().is_ok());
    }

    #[test]
    fn free_arrow_category_is_valid() {
        let c = arrow();
        assert!(c.validate().is_ok());
    }

    #[test]
    fn broken_identity_law_is_reported_with_witness() {
        let mut b = CategoryBuilder::new("broken");
        b.object("A").object("B");
        b.morphism("idA", "A", "A").morphism("idB", "B", "B");
        b.morphism("f", "A", "B");
        b.identity("A", "idA").identity("B", "idB");
        b.compose("idA", "idA", "idA");
        b.compose("idB", "idB", "idB");
        b.compose("f", "idA", "f");
        // Redirected: should be f.
        b.compose("idB", "f", "idB");
        let c = b.build().unwrap();
        let report = c.validate();
        assert!(!report.is_ok());
        let witness = report
            .violations
            .iter()
            .find(|v| v.rule == "identity-law")
            .expect("identity-law violation");
        assert!(witness.message.contains("idB") && witness.message.contains("f"));
    }

    #[test]
    fn duplicate_morphism_identifier_is_structural() {
        let mut b = CategoryBuilder::new("dup");
        b.object("A");
        b.morphism("idA", "A", "A").morphism("idA", "A", "A");
        b.identity("A", "idA");
        assert!(matches!(b.build(), Err(Error::Structural(_))));
    }

    #[test]
    fn opposite_is_an_involution_field_for_field() {
        for c in [one_object(), arrow(), chain3(), parallel_pair()] {
            let back = c.opposite().opposite();
            assert_eq!(c, back);
        }
    }

    #[test]
    fn opposite_reverses_arrows_and_table() {
        let c = chain3();
        let op = c.opposite();
        assert!(op.validate().is_ok());
        let f = op.morphism_id("f").unwrap();
        let g = op.morphism_id("g").unwrap();
        let h = op.morphism_id("h").unwrap();
        // In the opposite, f: B→A and g: C→B, so f ∘ g = h.
        assert_eq!(op.compose(f, g), Some(h));
    }

    #[test]
    fn enumerate_functors_from_point_picks_each_object() {
        let pt = Arc::new(one_object());
        let c = Arc::new(chain3());
        let fs = enumerate_functors(&pt, &c, DEFAULT_BUDGET).unwrap();
        assert_eq!(fs.len(), 3);
        for f in &fs {
            assert!(f.validate().is_ok());
        }
    }

    #[test]
    fn enumerate_functors_from_empty_category_is_singleton() {
        let e = Arc::new(empty());
        let c = Arc::new(arrow());
        let fs = enumerate_functors(&e, &c, DEFAULT_BUDGET).unwrap();
        assert_eq!(fs.len(), 1);
    }

    #[test]
    fn arrow_to_arrow_has_three_functors() {
        let a = Arc::new(arrow());
        let fs = enumerate_functors(&a, &a, DEFAULT_BUDGET).unwrap();
        assert_eq!(fs.len(), 3);
        for f in &fs {
            assert!(f.validate().is_ok());
        }
    }

    #[test]
    fn identity_functor_has_every_flag() {
        let c = Arc::new(chain3());
        let id = Functor::identity(c);
        let flags = functor_properties(&id);
        assert!(flags.faithful && flags.full && flags.embedding);
        assert!(flags.injective_on_objects && flags.isomorphism_dense && flags.is_isomorphism);
    }

    #[test]
    fn collapse_functor_is_faithful_but_not_embedding() {
        // Two-object discrete category onto the point.
        let d = Arc::new(discrete2());
        let pt = Arc::new(one_object());
        let f = Functor::constant(d.clone(), pt.clone(), 0);
        assert!(f.validate().is_ok());
        let flags = functor_properties(&f);
        assert!(flags.faithful);
        assert!(!flags.injective_on_objects);
        assert!(!flags.embedding);
    }

    #[test]
    fn find_isomorphism_on_self_returns_identity_shape() {
        let c = Arc::new(chain3());
        let iso = find_isomorphism(&c, &c, DEFAULT_BUDGET).unwrap().unwrap();
        assert!(iso.validate().is_ok());
        assert!(functor_properties(&iso).is_isomorphism);
    }

    #[test]
    fn arrow_vs_discrete_two_is_not_isomorphic() {
        let a = Arc::new(arrow());
        let d = Arc::new(discrete2());
        assert!(find_isomorphism(&a, &d, DEFAULT_BUDGET).unwrap().is_none());
    }

    #[test]
    fn relabeled_chain_is_isomorphic() {
        let c = Arc::new(chain3());
        let mut b = CategoryBuilder::new("chain3-relabeled");
        b.object("X").object("Y").object("Z");
        b.morphism("u", "X", "Y").morphism("v", "Y", "Z").morphism("w", "X", "Z");
        b.auto_identities().fill_identity_compositions();
        b.compose("v", "u", "w");
        let d = Arc::new(b.build().unwrap());
        assert!(d.validate().is_ok());
        let iso = find_isomorphism(&c, &d, DEFAULT_BUDGET).unwrap().unwrap();
        assert!(iso.validate().is_ok());
    }

    #[test]
    fn identity_transformation_is_natural() {
        let c = Arc::new(chain3());
        let id = Functor::identity(c.clone());
        let tau = NaturalTransformation {
            from: id.clone(),
            to: id.clone(),
            components: (0..c.object_count()).map(|o| c.identity_of(o)).collect(),
        };
        assert!(tau.validate().is_ok());
        assert!(tau.is_natural_isomorphism());
    }

    #[test]
    fn naturals_between_flipped_embeddings_are_forced_empty() {
        // Two embeddings of the point into the arrow category, at the two
        // different endpoints: no component can bridge B → A.
        let pt = Arc::new(one_object());
        let a = Arc::new(arrow());
        let at0 = Functor::constant(pt.clone(), a.clone(), 0);
        let at1 = Functor::constant(pt.clone(), a.clone(), 1);
        let forward = enumerate_naturals(&at0, &at1, false, DEFAULT_BUDGET).unwrap();
        assert_eq!(forward.len(), 1);
        let backward = enumerate_naturals(&at1, &at0, false, DEFAULT_BUDGET).unwrap();
        assert!(backward.is_empty());
    }

    #[test]
    fn functor_enumeration_budget_refusal_is_upfront() {
        let big = Arc::new(chain3());
        let err = enumerate_functors(&big, &big, 2).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn endpoint_violation_is_reported_with_the_offending_morphism() {
        // Map f: A→B to an identity while separating the endpoints.
        let a = Arc::new(arrow());
        let f = a.morphism_id("f").unwrap();
        let id_a = a.morphism_id("id_A").unwrap();
        let id_b = a.morphism_id("id_B").unwrap();
        let mut morphism_map = vec![0; a.morphism_count()];
        morphism_map[id_a] = id_a;
        morphism_map[id_b] = id_b;
        morphism_map[f] = id_a;
        let bad = Functor::new("bad", a.clone(), a.clone(), vec![0, 1], morphism_map).unwrap();
        let report = bad.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| v.rule == "endpoint-preservation" && v.message.contains('f')));
    }

    #[test]
    fn product_budget_refusal_carries_a_size_estimate() {
        let c = Arc::new(chain3());
        let err = product_category(&[c.clone(), c], 10).unwrap_err();
        match err {
            Error::BudgetExceeded { estimate, .. } => assert!(estimate > 10),
            other => panic!("expected budget refusal, got {other}"),
        }
    }

    #[test]
    fn product_of_two_points_is_a_point() {
        let pt = Arc::new(one_object());
        let p = product_category(&[pt.clone(), pt], DEFAULT_BUDGET).unwrap();
        assert_eq!(p.category.object_count(), 1);
        assert_eq!(p.category.morphism_count(), 1);
        assert!(p.category.validate().is_ok());
    }

    #[test]
    fn arrow_squared_has_four_objects_and_nine_morphisms() {
        let a = Arc::new(arrow());
        let p = product_category(&[a.clone(), a], DEFAULT_BUDGET).unwrap();
        assert_eq!(p.category.object_count(), 4);
        assert_eq!(p.category.morphism_count(), 9);
        assert!(p.category.validate().is_ok());
        for proj in &p.projections {
            assert!(proj.validate().is_ok());
        }
    }

    #[test]
    fn projections_recover_tuple_components() {
        let a = Arc::new(arrow());
        let p = product_category(&[a.clone(), a.clone()], DEFAULT_BUDGET).unwrap();
        let f = a.morphism_id("f").unwrap();
        let idb = a.morphism_id("id_B").unwrap();
        let tuple = p.morphism_index(&[f, idb]);
        assert_eq!(p.projections[0].on_morphism(tuple), f);
        assert_eq!(p.projections[1].on_morphism(tuple), idb);
    }

    #[test]
    fn componentwise_functor_lifting_is_a_functor() {
        let a = Arc::new(arrow());
        let pt = Arc::new(one_object());
        let p = product_category(&[a.clone(), a.clone()], DEFAULT_BUDGET).unwrap();
        let q = product_category(&[pt.clone(), a.clone()], DEFAULT_BUDGET).unwrap();
        let collapse = Functor::constant(a.clone(), pt.clone(), 0);
        let ident = Functor::identity(a.clone());
        let lifted = product_functor(&p, &q, &[collapse, ident]).unwrap();
        assert!(lifted.validate().is_ok());
    }

    #[test]
    fn tupling_satisfies_projection_laws() {
        let a = Arc::new(arrow());
        let c = Arc::new(chain3());
        let p = product_category(&[a.clone(), a.clone()], DEFAULT_BUDGET).unwrap();
        // Two functors chain-to-arrow: collapse everything to an endpoint.
        let f1 = Functor::constant(c.clone(), a.clone(), 0);
        let f2 = Functor::constant(c.clone(), a.clone(), 1);
        let m = tupling_functor(&p, &[f1.clone(), f2.clone()]).unwrap();
        assert!(m.validate().is_ok());
        let back1 = p.projections[0].compose_after(&m).unwrap();
        let back2 = p.projections[1].compose_after(&m).unwrap();
        assert_eq!(back1.object_map, f1.object_map);
        assert_eq!(back1.morphism_map, f1.morphism_map);
        assert_eq!(back2.object_map, f2.object_map);
        assert_eq!(back2.morphism_map, f2.morphism_map);
    }

    #[test]
    fn hom_functor_on_terminal_category_is_constant_singleton() {
        let pt = Arc::new(one_object());
        let (frag, h) = hom_functor(&pt, 0, DEFAULT_BUDGET).unwrap();
        assert!(h.validate().is_ok());
        assert_eq!(frag.set_at(h.on_object(0)).len(), 1);
    }

    #[test]
    fn hom_functor_object_images_match_hom_sizes() {
        let c = Arc::new(chain3());
        let (frag, h) = hom_functor(&c, 0, DEFAULT_BUDGET).unwrap();
        assert!(h.validate().is_ok());
        for x in 0..c.object_count() {
            assert_eq!(frag.set_at(h.on_object(x)).len(), c.hom(0, x).len());
        }
    }

    #[test]
    fn hom_functor_action_respects_composition() {
        // Functor law on the arrow category's hom functor, checked through
        // the fragment's own composition table.
        let a = Arc::new(arrow());
        let (frag, h) = hom_functor(&a, 0, DEFAULT_BUDGET).unwrap();
        for g in 0..a.morphism_count() {
            for f in 0..a.morphism_count() {
                if let Some(c) = a.compose(g, f) {
                    let lhs = frag
                        .category
                        .compose(h.on_morphism(g), h.on_morphism(f))
                        .unwrap();
                    assert_eq!(lhs, h.on_morphism(c));
                }
            }
        }
    }
}
