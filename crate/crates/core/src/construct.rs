//! Constructs: finite categories whose objects carry finite underlying
//! sets with tagged operation tables, and whose morphisms carry concrete
//! functions between those sets. Generalized underlying functors relax
//! the morphism assignment (and, in the semi variant, the object
//! assignment) of the standard forgetful functor.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::fincat::{FinCategory, MorId, ObjId};
use crate::finset::{FinFunction, FinSet};
use crate::report::{Error, Result, ValidationReport};

/// Machine-verified operation properties. `DistributesOver` names a
/// sibling slot of the same signature.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum PropertyTag {
    Associative,
    Commutative,
    HasIdentity,
    HasInverses,
    DistributesOver(String),
}

impl fmt::Display for PropertyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyTag::Associative => write!(f, "associative"),
            PropertyTag::Commutative => write!(f, "commutative"),
            PropertyTag::HasIdentity => write!(f, "has_identity"),
            PropertyTag::HasInverses => write!(f, "has_inverses"),
            PropertyTag::DistributesOver(s) => write!(f, "distributes_over:{s}"),
        }
    }
}

impl PropertyTag {
    pub fn parse(s: &str) -> Result<PropertyTag> {
        match s {
            "associative" => Ok(PropertyTag::Associative),
            "commutative" => Ok(PropertyTag::Commutative),
            "has_identity" => Ok(PropertyTag::HasIdentity),
            "has_inverses" => Ok(PropertyTag::HasInverses),
            other => match other.strip_prefix("distributes_over:") {
                Some(slot) if !slot.is_empty() => {
                    Ok(PropertyTag::DistributesOver(slot.to_string()))
                }
                _ => Err(Error::structural(format!("unknown property tag `{other}`"))),
            },
        }
    }
}

/// Internal operations are tables A×A → A; external ones act on A by a
/// finite scalar set, K×A → A.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SlotKind {
    Internal,
    External(FinSet),
}

impl SlotKind {
    pub fn matches(&self, other: &SlotKind) -> bool {
        self == other
    }
}

/// A total operation table over a carrier, with its declared tags.
/// Internal tables are indexed row-by-left-argument; external tables
/// row-by-scalar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperationTable {
    pub kind: SlotKind,
    pub carrier: FinSet,
    map: Vec<u32>,
    pub declared_tags: BTreeSet<PropertyTag>,
}

impl OperationTable {
    pub fn internal_from_rows<'a, I>(
        carrier: FinSet,
        rows: I,
        tags: BTreeSet<PropertyTag>,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str, &'a str)>,
    {
        let n = carrier.len();
        let mut map: Vec<Option<u32>> = vec![None; n * n];
        for (a, b, c) in rows {
            let i = carrier
                .index_of(a)
                .ok_or_else(|| Error::structural(format!("`{a}` not in carrier {carrier}")))?;
            let j = carrier
                .index_of(b)
                .ok_or_else(|| Error::structural(format!("`{b}` not in carrier {carrier}")))?;
            let k = carrier
                .index_of(c)
                .ok_or_else(|| Error::structural(format!("`{c}` not in carrier {carrier}")))?;
            let cell = &mut map[i * n + j];
            if let Some(prev) = cell {
                if *prev != k as u32 {
                    return Err(Error::structural(format!("conflicting rows for ({a},{b})")));
                }
            }
            *cell = Some(k as u32);
        }
        let map = map
            .into_iter()
            .enumerate()
            .map(|(idx, v)| {
                v.ok_or_else(|| {
                    Error::structural(format!(
                        "table not total: no row for ({},{})",
                        carrier.elem(idx / n),
                        carrier.elem(idx % n)
                    ))
                })
            })
            .collect::<Result<Vec<u32>>>()?;
        Ok(OperationTable {
            kind: SlotKind::Internal,
            carrier,
            map,
            declared_tags: tags,
        })
    }

    pub fn external_from_rows<'a, I>(
        scalars: FinSet,
        carrier: FinSet,
        rows: I,
        tags: BTreeSet<PropertyTag>,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str, &'a str)>,
    {
        let n = carrier.len();
        let k_n = scalars.len();
        let mut map: Vec<Option<u32>> = vec![None; k_n * n];
        for (k, a, c) in rows {
            let ki = scalars
                .index_of(k)
                .ok_or_else(|| Error::structural(format!("`{k}` not in scalar set {scalars}")))?;
            let i = carrier
                .index_of(a)
                .ok_or_else(|| Error::structural(format!("`{a}` not in carrier {carrier}")))?;
            let ci = carrier
                .index_of(c)
                .ok_or_else(|| Error::structural(format!("`{c}` not in carrier {carrier}")))?;
            let cell = &mut map[ki * n + i];
            if let Some(prev) = cell {
                if *prev != ci as u32 {
                    return Err(Error::structural(format!("conflicting rows for ({k},{a})")));
                }
            }
            *cell = Some(ci as u32);
        }
        let map = map
            .into_iter()
            .enumerate()
            .map(|(idx, v)| {
                v.ok_or_else(|| {
                    Error::structural(format!(
                        "table not total: no row for ({},{})",
                        scalars.elem(idx / n),
                        carrier.elem(idx % n)
                    ))
                })
            })
            .collect::<Result<Vec<u32>>>()?;
        Ok(OperationTable {
            kind: SlotKind::External(scalars),
            carrier,
            map,
            declared_tags: tags,
        })
    }

    /// Internal application by element index.
    pub fn apply_internal(&self, i: usize, j: usize) -> usize {
        debug_assert!(matches!(self.kind, SlotKind::Internal));
        self.map[i * self.carrier.len() + j] as usize
    }

    /// External application: scalar index, element index.
    pub fn apply_external(&self, k: usize, i: usize) -> usize {
        debug_assert!(matches!(self.kind, SlotKind::External(_)));
        self.map[k * self.carrier.len() + i] as usize
    }

    pub fn rows(&self) -> Vec<(String, String, String)> {
        let n = self.carrier.len();
        match &self.kind {
            SlotKind::Internal => (0..n)
                .flat_map(|i| {
                    (0..n).map(move |j| {
                        (
                            self.carrier.elem(i).to_string(),
                            self.carrier.elem(j).to_string(),
                            self.carrier.elem(self.map[i * n + j] as usize).to_string(),
                        )
                    })
                })
                .collect(),
            SlotKind::External(scalars) => (0..scalars.len())
                .flat_map(|k| {
                    (0..n).map(move |i| {
                        (
                            scalars.elem(k).to_string(),
                            self.carrier.elem(i).to_string(),
                            self.carrier.elem(self.map[k * n + i] as usize).to_string(),
                        )
                    })
                })
                .collect(),
        }
    }

    fn holds_associative(&self) -> bool {
        let n = self.carrier.len();
        if !matches!(self.kind, SlotKind::Internal) {
            return false;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.apply_internal(self.apply_internal(a, b), c)
                        != self.apply_internal(a, self.apply_internal(b, c))
                    {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn holds_commutative(&self) -> bool {
        let n = self.carrier.len();
        if !matches!(self.kind, SlotKind::Internal) {
            return false;
        }
        for a in 0..n {
            for b in 0..n {
                if self.apply_internal(a, b) != self.apply_internal(b, a) {
                    return false;
                }
            }
        }
        true
    }

    /// Internal: a two-sided identity element. External: an identity
    /// scalar acting as the identity function.
    fn identity_index(&self) -> Option<usize> {
        let n = self.carrier.len();
        match &self.kind {
            SlotKind::Internal => (0..n).find(|&e| {
                (0..n).all(|a| self.apply_internal(e, a) == a && self.apply_internal(a, e) == a)
            }),
            SlotKind::External(scalars) => {
                (0..scalars.len()).find(|&k| (0..n).all(|a| self.apply_external(k, a) == a))
            }
        }
    }

    fn holds_has_identity(&self) -> bool {
        // An operation on the empty carrier has no identity element.
        match &self.kind {
            SlotKind::Internal => self.carrier.len() > 0 && self.identity_index().is_some(),
            SlotKind::External(_) => self.identity_index().is_some(),
        }
    }

    /// Internal: every element has a two-sided inverse for some
    /// identity. External: every scalar action is undone by another
    /// scalar's action.
    fn holds_has_inverses(&self) -> bool {
        let n = self.carrier.len();
        match &self.kind {
            SlotKind::Internal => match self.identity_index() {
                Some(e) => (0..n).all(|a| {
                    (0..n).any(|b| self.apply_internal(a, b) == e && self.apply_internal(b, a) == e)
                }),
                None => false,
            },
            SlotKind::External(scalars) => (0..scalars.len()).all(|k| {
                (0..scalars.len())
                    .any(|k2| (0..n).all(|a| self.apply_external(k2, self.apply_external(k, a)) == a))
            }),
        }
    }

    /// Two-sided distributivity over an internal sibling operation on
    /// the same carrier.
    fn holds_distributes_over(&self, other: &OperationTable) -> bool {
        if other.carrier != self.carrier || !matches!(other.kind, SlotKind::Internal) {
            return false;
        }
        let n = self.carrier.len();
        match &self.kind {
            SlotKind::Internal => {
                for a in 0..n {
                    for b in 0..n {
                        for c in 0..n {
                            let bc = other.apply_internal(b, c);
                            let left = self.apply_internal(a, bc)
                                == other
                                    .apply_internal(self.apply_internal(a, b), self.apply_internal(a, c));
                            let right = self.apply_internal(bc, a)
                                == other
                                    .apply_internal(self.apply_internal(b, a), self.apply_internal(c, a));
                            if !left || !right {
                                return false;
                            }
                        }
                    }
                }
                true
            }
            SlotKind::External(scalars) => {
                for k in 0..scalars.len() {
                    for b in 0..n {
                        for c in 0..n {
                            let bc = other.apply_internal(b, c);
                            if self.apply_external(k, bc)
                                != other.apply_internal(
                                    self.apply_external(k, b),
                                    self.apply_external(k, c),
                                )
                            {
                                return false;
                            }
                        }
                    }
                }
                true
            }
        }
    }

    /// Does one declared tag hold on this table, given sibling slots for
    /// distributivity lookups?
    pub fn tag_holds(&self, tag: &PropertyTag, siblings: &[(String, &OperationTable)]) -> bool {
        match tag {
            PropertyTag::Associative => self.holds_associative(),
            PropertyTag::Commutative => self.holds_commutative(),
            PropertyTag::HasIdentity => self.holds_has_identity(),
            PropertyTag::HasInverses => self.holds_has_inverses(),
            PropertyTag::DistributesOver(name) => siblings
                .iter()
                .find(|(n, _)| n == name)
                .is_some_and(|(_, t)| self.holds_distributes_over(t)),
        }
    }
}

/// Compute the maximal honest tag set for a table: exactly the tags
/// that hold, deterministically ordered. Distributivity is reported
/// against each named sibling where it holds.
pub fn check_operation_properties(
    table: &OperationTable,
    siblings: &[(String, &OperationTable)],
) -> BTreeSet<PropertyTag> {
    let mut out = BTreeSet::new();
    for tag in [
        PropertyTag::Associative,
        PropertyTag::Commutative,
        PropertyTag::HasIdentity,
        PropertyTag::HasInverses,
    ] {
        if table.tag_holds(&tag, siblings) {
            out.insert(tag);
        }
    }
    for (name, _) in siblings {
        let tag = PropertyTag::DistributesOver(name.clone());
        if table.tag_holds(&tag, siblings) {
            out.insert(tag);
        }
    }
    out
}

/// One named operation slot that every object of a construct must
/// instantiate with a matching kind and an identical verified tag set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureSlot {
    pub name: String,
    pub kind: SlotKind,
    pub tags: BTreeSet<PropertyTag>,
}

/// The finite list of operation slots shared by every object.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StructureSignature {
    pub slots: Vec<SignatureSlot>,
}

impl StructureSignature {
    pub fn new(slots: Vec<SignatureSlot>) -> Result<Self> {
        let mut names: Vec<&str> = slots.iter().map(|s| s.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        if names.len() != slots.len() {
            return Err(Error::structural("duplicate slot names in signature"));
        }
        Ok(StructureSignature { slots })
    }

    pub fn order(&self) -> usize {
        self.slots.len()
    }

    pub fn slot_index(&self, name: &str) -> Option<usize> {
        self.slots.iter().position(|s| s.name == name)
    }
}

/// A finite category whose objects are structured finite sets and whose
/// morphisms carry concrete underlying functions (the standard
/// underlying assignment, required to be functorial).
#[derive(Debug, Clone, PartialEq)]
pub struct Construct {
    pub name: String,
    pub category: Arc<FinCategory>,
    pub signature: StructureSignature,
    carriers: Vec<FinSet>,
    structure: Vec<Vec<OperationTable>>,
    underlying: Vec<FinFunction>,
}

impl Construct {
    pub fn new(
        name: impl Into<String>,
        category: Arc<FinCategory>,
        signature: StructureSignature,
        carriers: Vec<FinSet>,
        structure: Vec<Vec<OperationTable>>,
        underlying: Vec<FinFunction>,
    ) -> Result<Self> {
        if carriers.len() != category.object_count() {
            return Err(Error::structural("one carrier required per object"));
        }
        if structure.len() != category.object_count() {
            return Err(Error::structural("one structure list required per object"));
        }
        for (o, tables) in structure.iter().enumerate() {
            if tables.len() != signature.order() {
                return Err(Error::structural(format!(
                    "object `{}` instantiates {} slot(s), signature has {}",
                    category.object_name(o),
                    tables.len(),
                    signature.order()
                )));
            }
            for t in tables {
                if t.carrier != carriers[o] {
                    return Err(Error::structural(format!(
                        "table on `{}` is over {} instead of its carrier {}",
                        category.object_name(o),
                        t.carrier,
                        carriers[o]
                    )));
                }
            }
        }
        if underlying.len() != category.morphism_count() {
            return Err(Error::structural("one underlying function required per morphism"));
        }
        Ok(Construct {
            name: name.into(),
            category,
            signature,
            carriers,
            structure,
            underlying,
        })
    }

    pub fn carrier(&self, o: ObjId) -> &FinSet {
        &self.carriers[o]
    }

    pub fn carriers(&self) -> &[FinSet] {
        &self.carriers
    }

    pub fn tables(&self, o: ObjId) -> &[OperationTable] {
        &self.structure[o]
    }

    pub fn underlying(&self, m: MorId) -> &FinFunction {
        &self.underlying[m]
    }

    pub fn underlying_all(&self) -> &[FinFunction] {
        &self.underlying
    }

    /// Sibling view of an object's slots for distributivity checks.
    fn slot_context(&self, o: ObjId) -> Vec<(String, &OperationTable)> {
        self.signature
            .slots
            .iter()
            .zip(self.structure[o].iter())
            .map(|(slot, table)| (slot.name.clone(), table))
            .collect()
    }

    /// Full construct validation: category axioms, slot alignment
    /// (kind and declared-tag equality with the signature), machine
    /// verification of every declared tag, and functoriality of the
    /// underlying assignment.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new(format!("construct {}", self.name));
        report.absorb(self.category.validate());

        for o in 0..self.category.object_count() {
            let ctx = self.slot_context(o);
            for (slot, table) in self.signature.slots.iter().zip(self.structure[o].iter()) {
                if !slot.kind.matches(&table.kind) {
                    report.push(
                        "slot-kind",
                        format!(
                            "slot `{}` on `{}` has the wrong kind or scalar set",
                            slot.name,
                            self.category.object_name(o)
                        ),
                    );
                }
                if table.declared_tags != slot.tags {
                    report.push(
                        "slot-tags",
                        format!(
                            "slot `{}` on `{}` declares {{{}}}, signature requires {{{}}}",
                            slot.name,
                            self.category.object_name(o),
                            render_tags(&table.declared_tags),
                            render_tags(&slot.tags),
                        ),
                    );
                }
                for tag in &table.declared_tags {
                    if !table.tag_holds(tag, &ctx) {
                        report.push(
                            format!("tag:{tag}"),
                            format!(
                                "tag `{tag}` does not hold for slot `{}` on `{}`: {}",
                                slot.name,
                                self.category.object_name(o),
                                tag_counterexample(table, tag, &ctx),
                            ),
                        );
                    }
                }
            }
        }

        report.absorb(self.validate_underlying_functoriality());
        report
    }

    fn validate_underlying_functoriality(&self) -> ValidationReport {
        let mut report = ValidationReport::new("underlying");
        for m in self.category.morphism_ids() {
            let mor = self.category.morphism(m);
            let f = &self.underlying[m];
            if f.domain() != &self.carriers[mor.dom] || f.codomain() != &self.carriers[mor.cod] {
                report.push(
                    "carrier-endpoints",
                    format!(
                        "function of `{}` runs {}→{} but carriers are {}→{}",
                        mor.name,
                        f.domain(),
                        f.codomain(),
                        self.carriers[mor.dom],
                        self.carriers[mor.cod]
                    ),
                );
            }
        }
        if !report.is_ok() {
            return report;
        }
        for o in 0..self.category.object_count() {
            let id = self.category.identity_of(o);
            if self.underlying[id] != FinFunction::identity(&self.carriers[o]) {
                report.push(
                    "identity-function",
                    format!(
                        "identity of `{}` is not the identity function",
                        self.category.object_name(o)
                    ),
                );
            }
        }
        for g in self.category.morphism_ids() {
            for f in self.category.morphism_ids() {
                if let Some(h) = self.category.compose(g, f) {
                    match self.underlying[g].compose_after(&self.underlying[f]) {
                        Ok(c) if c == self.underlying[h] => {}
                        _ => report.push(
                            "composition-function",
                            format!(
                                "U({} ∘ {}) differs from U({}) ∘ U({})",
                                self.category.morphism(g).name,
                                self.category.morphism(f).name,
                                self.category.morphism(g).name,
                                self.category.morphism(f).name
                            ),
                        ),
                    }
                }
            }
        }
        report
    }
}

fn render_tags(tags: &BTreeSet<PropertyTag>) -> String {
    tags.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" ")
}

/// First counterexample for a failed tag, for witness messages.
fn tag_counterexample(
    table: &OperationTable,
    tag: &PropertyTag,
    siblings: &[(String, &OperationTable)],
) -> String {
    let c = &table.carrier;
    let n = c.len();
    match tag {
        PropertyTag::Commutative if matches!(table.kind, SlotKind::Internal) => {
            for a in 0..n {
                for b in 0..n {
                    if table.apply_internal(a, b) != table.apply_internal(b, a) {
                        return format!("witness ({},{})", c.elem(a), c.elem(b));
                    }
                }
            }
            "no witness found".into()
        }
        PropertyTag::Associative if matches!(table.kind, SlotKind::Internal) => {
            for a in 0..n {
                for b in 0..n {
                    for d in 0..n {
                        if table.apply_internal(table.apply_internal(a, b), d)
                            != table.apply_internal(a, table.apply_internal(b, d))
                        {
                            return format!("witness ({},{},{})", c.elem(a), c.elem(b), c.elem(d));
                        }
                    }
                }
            }
            "no witness found".into()
        }
        PropertyTag::DistributesOver(name) if !siblings.iter().any(|(s, _)| s == name) => {
            format!("no sibling slot named `{name}`")
        }
        _ => "exhaustive check failed".into(),
    }
}

/// A generalized underlying functor: object assignment forced to the
/// carriers, morphism assignment any functorial choice of functions.
#[derive(Debug, Clone, PartialEq)]
pub struct GuFunctor {
    pub construct: Arc<Construct>,
    assignment: Vec<FinFunction>,
}

/// A generalized semi-underlying functor: free object assignment whose
/// image (as a set of sets) equals the image of the standard underlying
/// functor.
#[derive(Debug, Clone, PartialEq)]
pub struct GsuFunctor {
    pub construct: Arc<Construct>,
    object_sets: Vec<FinSet>,
    assignment: Vec<FinFunction>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnderlyingMode {
    Gu,
    Gsu,
}

impl GuFunctor {
    pub fn new(construct: Arc<Construct>, assignment: Vec<FinFunction>) -> Result<Self> {
        if assignment.len() != construct.category.morphism_count() {
            return Err(Error::structural("one function required per morphism"));
        }
        Ok(GuFunctor {
            construct,
            assignment,
        })
    }

    /// The usual forgetful functor: exactly the construct's underlying
    /// assignment.
    pub fn standard(construct: Arc<Construct>) -> Self {
        GuFunctor {
            assignment: construct.underlying_all().to_vec(),
            construct,
        }
    }

    pub fn object_set(&self, o: ObjId) -> &FinSet {
        self.construct.carrier(o)
    }

    pub fn on_morphism(&self, m: MorId) -> &FinFunction {
        &self.assignment[m]
    }

    pub fn assignment(&self) -> &[FinFunction] {
        &self.assignment
    }

    pub fn validate(&self) -> ValidationReport {
        validate_underlying(
            &self.construct,
            |o| self.construct.carrier(o),
            &self.assignment,
            UnderlyingMode::Gu,
        )
    }

    /// Faithful ⇔ parallel morphisms get distinct functions.
    pub fn is_faithful(&self) -> bool {
        let cat = &self.construct.category;
        for a in 0..cat.object_count() {
            for b in 0..cat.object_count() {
                let hom = cat.hom(a, b);
                for (i, &f) in hom.iter().enumerate() {
                    for &g in &hom[i + 1..] {
                        if self.assignment[f] == self.assignment[g] {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Embedding ⇔ injective on morphisms, where the image of a
    /// morphism is its function together with its carrier endpoints.
    pub fn is_embedding(&self) -> bool {
        let n = self.assignment.len();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.assignment[i] == self.assignment[j] {
                    return false;
                }
            }
        }
        true
    }
}

impl GsuFunctor {
    pub fn new(
        construct: Arc<Construct>,
        object_sets: Vec<FinSet>,
        assignment: Vec<FinFunction>,
    ) -> Result<Self> {
        if object_sets.len() != construct.category.object_count() {
            return Err(Error::structural("one object set required per object"));
        }
        if assignment.len() != construct.category.morphism_count() {
            return Err(Error::structural("one function required per morphism"));
        }
        Ok(GsuFunctor {
            construct,
            object_sets,
            assignment,
        })
    }

    pub fn object_set(&self, o: ObjId) -> &FinSet {
        &self.object_sets[o]
    }

    pub fn on_morphism(&self, m: MorId) -> &FinFunction {
        &self.assignment[m]
    }

    pub fn assignment(&self) -> &[FinFunction] {
        &self.assignment
    }

    pub fn validate(&self) -> ValidationReport {
        validate_underlying(
            &self.construct,
            |o| &self.object_sets[o],
            &self.assignment,
            UnderlyingMode::Gsu,
        )
    }

    pub fn is_faithful(&self) -> bool {
        let cat = &self.construct.category;
        for a in 0..cat.object_count() {
            for b in 0..cat.object_count() {
                let hom = cat.hom(a, b);
                for (i, &f) in hom.iter().enumerate() {
                    for &g in &hom[i + 1..] {
                        if self.assignment[f] == self.assignment[g] {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

impl From<GuFunctor> for GsuFunctor {
    fn from(gu: GuFunctor) -> GsuFunctor {
        GsuFunctor {
            object_sets: gu.construct.carriers().to_vec(),
            construct: gu.construct,
            assignment: gu.assignment,
        }
    }
}

/// Shared validation for GU/GSU assignments: endpoint typing against
/// the object assignment, functoriality into the (implicit) finite set
/// fragment, and — in the gsu mode — image-on-objects equality with the
/// standard underlying functor, reported with the symmetric-difference
/// witness.
fn validate_underlying<'a, F>(
    construct: &'a Construct,
    object_set: F,
    assignment: &[FinFunction],
    mode: UnderlyingMode,
) -> ValidationReport
where
    F: Fn(ObjId) -> &'a FinSet,
{
    let label = match mode {
        UnderlyingMode::Gu => "gu",
        UnderlyingMode::Gsu => "gsu",
    };
    let mut report = ValidationReport::new(format!("{label} functor on {}", construct.name));
    let cat = &construct.category;

    if mode == UnderlyingMode::Gsu {
        let mut actual: Vec<&FinSet> = (0..cat.object_count()).map(&object_set).collect();
        let mut expected: Vec<&FinSet> = construct.carriers().iter().collect();
        actual.sort();
        actual.dedup();
        expected.sort();
        expected.dedup();
        if actual != expected {
            let mut witness: Vec<String> = Vec::new();
            for s in &expected {
                if !actual.contains(s) {
                    witness.push(format!("missing {s}"));
                }
            }
            for s in &actual {
                if !expected.contains(s) {
                    witness.push(format!("extra {s}"));
                }
            }
            report.push(
                "image-equality",
                format!("object image differs from the carriers: {}", witness.join(", ")),
            );
        }
    }

    for m in cat.morphism_ids() {
        let mor = cat.morphism(m);
        let f = &assignment[m];
        if f.domain() != object_set(mor.dom) || f.codomain() != object_set(mor.cod) {
            report.push(
                "endpoint-typing",
                format!(
                    "function of `{}` runs {}→{} but the object assignment gives {}→{}",
                    mor.name,
                    f.domain(),
                    f.codomain(),
                    object_set(mor.dom),
                    object_set(mor.cod)
                ),
            );
        }
    }
    if !report.is_ok() {
        return report;
    }
    for o in 0..cat.object_count() {
        let id = cat.identity_of(o);
        if assignment[id] != FinFunction::identity(object_set(o)) {
            report.push(
                "identity-function",
                format!(
                    "identity of `{}` is not assigned the identity function",
                    cat.object_name(o)
                ),
            );
        }
    }
    for g in cat.morphism_ids() {
        for f in cat.morphism_ids() {
            if let Some(h) = cat.compose(g, f) {
                match assignment[g].compose_after(&assignment[f]) {
                    Ok(c) if c == assignment[h] => {}
                    _ => report.push(
                        "composition-function",
                        format!(
                            "assignment breaks functoriality at ({}, {})",
                            cat.morphism(g).name,
                            cat.morphism(f).name
                        ),
                    ),
                }
            }
        }
    }
    report
}

/// The standard (forgetful) underlying functor of a construct.
pub fn standard_underlying(construct: &Arc<Construct>) -> GuFunctor {
    GuFunctor::standard(construct.clone())
}
