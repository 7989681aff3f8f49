//! Finite sets of opaque element labels, total functions between them, and
//! materialized fragments of the category of sets.
//!
//! Element labels are opaque strings; set equality is label-set equality.
//! A `FinSet` keeps its labels sorted so equality and ordering are
//! canonical. A `FinFunction` is total on its domain by construction.

use std::collections::HashMap;
use std::fmt;

use crate::fincat::{CategoryBuilder, FinCategory, MorId, ObjId};
use crate::report::{Error, Result};

/// A finite set of element labels, kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinSet {
    elems: Vec<String>,
}

impl FinSet {
    pub fn new<I, S>(elems: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut elems: Vec<String> = elems.into_iter().map(Into::into).collect();
        elems.sort();
        elems.dedup();
        FinSet { elems }
    }

    pub fn empty() -> Self {
        FinSet { elems: Vec::new() }
    }

    pub fn singleton(label: impl Into<String>) -> Self {
        FinSet {
            elems: vec![label.into()],
        }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.elems.binary_search_by(|e| e.as_str().cmp(label)).is_ok()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.elems.binary_search_by(|e| e.as_str().cmp(label)).ok()
    }

    pub fn elem(&self, idx: usize) -> &str {
        &self.elems[idx]
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.elems.iter().map(|s| s.as_str())
    }

    pub fn is_subset_of(&self, other: &FinSet) -> bool {
        self.iter().all(|e| other.contains(e))
    }

    /// Elements in exactly one of the two sets; witness for image-equality
    /// failures.
    pub fn symmetric_difference(&self, other: &FinSet) -> FinSet {
        let mut out = Vec::new();
        for e in self.iter() {
            if !other.contains(e) {
                out.push(e.to_string());
            }
        }
        for e in other.iter() {
            if !self.contains(e) {
                out.push(e.to_string());
            }
        }
        FinSet::new(out)
    }

    /// Cartesian product under the canonical ordered-pair encoding with
    /// fixed left bracketing: `(a,b)`.
    pub fn product(&self, other: &FinSet) -> FinSet {
        let mut out = Vec::with_capacity(self.len() * other.len());
        for a in self.iter() {
            for b in other.iter() {
                out.push(pair_label(a, b));
            }
        }
        FinSet::new(out)
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.elems.join(","))
    }
}

/// Canonical ordered-pair encoding. n-ary products fold left:
/// `((a,b),c)`.
pub fn pair_label(a: &str, b: &str) -> String {
    format!("({a},{b})")
}

/// Left-bracketed encoding of a tuple of labels. A 1-tuple is the label
/// itself; the empty tuple gets a unit marker.
pub fn tuple_label(parts: &[&str]) -> String {
    match parts {
        [] => "()".to_string(),
        [one] => (*one).to_string(),
        [first, rest @ ..] => {
            let mut acc = (*first).to_string();
            for p in rest {
                acc = pair_label(&acc, p);
            }
            acc
        }
    }
}

/// A total function between finite sets, stored as an index table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinFunction {
    domain: FinSet,
    codomain: FinSet,
    map: Vec<u32>,
}

impl FinFunction {
    pub fn from_pairs<'a, I>(domain: FinSet, codomain: FinSet, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut map: Vec<Option<u32>> = vec![None; domain.len()];
        for (a, b) in pairs {
            let i = domain
                .index_of(a)
                .ok_or_else(|| Error::structural(format!("element `{a}` not in domain {domain}")))?;
            let j = codomain.index_of(b).ok_or_else(|| {
                Error::structural(format!("element `{b}` not in codomain {codomain}"))
            })?;
            if let Some(prev) = map[i] {
                if prev != j as u32 {
                    return Err(Error::structural(format!(
                        "conflicting images for `{a}`: `{}` and `{b}`",
                        codomain.elem(prev as usize)
                    )));
                }
            }
            map[i] = Some(j as u32);
        }
        let map = map
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::structural(format!("no image for `{}`", domain.elem(i)))))
            .collect::<Result<Vec<u32>>>()?;
        Ok(FinFunction {
            domain,
            codomain,
            map,
        })
    }

    pub fn from_index_map(domain: FinSet, codomain: FinSet, map: Vec<u32>) -> Result<Self> {
        if map.len() != domain.len() {
            return Err(Error::structural("index map length differs from domain size"));
        }
        if map.iter().any(|&j| j as usize >= codomain.len()) {
            return Err(Error::structural("index map hits outside the codomain"));
        }
        Ok(FinFunction {
            domain,
            codomain,
            map,
        })
    }

    pub fn identity(set: &FinSet) -> Self {
        FinFunction {
            domain: set.clone(),
            codomain: set.clone(),
            map: (0..set.len() as u32).collect(),
        }
    }

    pub fn constant(domain: FinSet, codomain: FinSet, value: &str) -> Result<Self> {
        let j = codomain
            .index_of(value)
            .ok_or_else(|| Error::structural(format!("`{value}` not in codomain")))?
            as u32;
        let n = domain.len();
        Ok(FinFunction {
            domain,
            codomain,
            map: vec![j; n],
        })
    }

    pub fn domain(&self) -> &FinSet {
        &self.domain
    }

    pub fn codomain(&self) -> &FinSet {
        &self.codomain
    }

    pub fn apply(&self, label: &str) -> Option<&str> {
        let i = self.domain.index_of(label)?;
        Some(self.codomain.elem(self.map[i] as usize))
    }

    pub fn apply_idx(&self, i: usize) -> usize {
        self.map[i] as usize
    }

    /// g.compose_after(f) = g ∘ f; requires cod(f) = dom(g) as label sets.
    pub fn compose_after(&self, f: &FinFunction) -> Result<FinFunction> {
        if f.codomain != self.domain {
            return Err(Error::structural(format!(
                "cannot compose: codomain {} differs from domain {}",
                f.codomain, self.domain
            )));
        }
        let map = f.map.iter().map(|&i| self.map[i as usize]).collect();
        Ok(FinFunction {
            domain: f.domain.clone(),
            codomain: self.codomain.clone(),
            map,
        })
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.codomain.len()];
        for &j in &self.map {
            if seen[j as usize] {
                return false;
            }
            seen[j as usize] = true;
        }
        true
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.codomain.len()];
        for &j in &self.map {
            seen[j as usize] = true;
        }
        seen.into_iter().all(|b| b)
    }

    pub fn is_bijective(&self) -> bool {
        self.domain.len() == self.codomain.len() && self.is_injective()
    }

    pub fn inverse(&self) -> Option<FinFunction> {
        if !self.is_bijective() {
            return None;
        }
        let mut map = vec![0u32; self.codomain.len()];
        for (i, &j) in self.map.iter().enumerate() {
            map[j as usize] = i as u32;
        }
        Some(FinFunction {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            map,
        })
    }

    /// Image of the domain as a set.
    pub fn image(&self) -> FinSet {
        FinSet::new(self.map.iter().map(|&j| self.codomain.elem(j as usize).to_string()))
    }

    /// Deterministic rank of this function among all functions
    /// domain → codomain in lexicographic table order.
    pub fn lex_rank(&self) -> u64 {
        let base = self.codomain.len().max(1) as u64;
        self.map.iter().fold(0u64, |acc, &j| acc * base + j as u64)
    }
}

impl fmt::Display for FinFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .domain
            .iter()
            .enumerate()
            .map(|(i, e)| format!("{e}->{}", self.codomain.elem(self.map[i] as usize)))
            .collect();
        write!(f, "[{}]", rows.join(" "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FinSetMode {
    /// Every function between every pair of the given sets.
    Full,
    /// Seed functions, identities, and closure under composition.
    Generated,
}

/// A materialized finite fragment of the category of sets: a genuine
/// `FinCategory` whose objects are label sets and whose morphisms carry
/// concrete function tables.
#[derive(Debug, Clone)]
pub struct FinSetFragment {
    pub category: FinCategory,
    sets: Vec<FinSet>,
    functions: Vec<FinFunction>,
    set_index: HashMap<FinSet, ObjId>,
    fn_index: HashMap<FinFunction, MorId>,
}

impl FinSetFragment {
    pub fn object_of(&self, set: &FinSet) -> Option<ObjId> {
        self.set_index.get(set).copied()
    }

    pub fn morphism_of(&self, f: &FinFunction) -> Option<MorId> {
        self.fn_index.get(f).copied()
    }

    pub fn set_at(&self, o: ObjId) -> &FinSet {
        &self.sets[o]
    }

    pub fn function_at(&self, m: MorId) -> &FinFunction {
        &self.functions[m]
    }

    pub fn sets(&self) -> &[FinSet] {
        &self.sets
    }
}

fn set_object_name(s: &FinSet) -> String {
    s.to_string()
}

/// Materialize a finite fragment of the category of sets over the given
/// label sets.
///
/// Full mode enumerates every function between every ordered pair of
/// sets (budgeted); generated mode takes seed functions and closes under
/// composition, which terminates because only finitely many functions
/// exist between the sets in play.
pub fn materialize_finset(
    sets: &[FinSet],
    mode: FinSetMode,
    seeds: &[FinFunction],
    budget: u64,
) -> Result<FinSetFragment> {
    let mut uniq: Vec<FinSet> = Vec::new();
    for s in sets {
        if !uniq.contains(s) {
            uniq.push(s.clone());
        }
    }
    for f in seeds {
        for s in [f.domain(), f.codomain()] {
            if !uniq.contains(s) {
                uniq.push(s.clone());
            }
        }
    }
    uniq.sort();

    let mut functions: Vec<FinFunction> = Vec::new();
    match mode {
        FinSetMode::Full => {
            let mut estimate: u64 = 0;
            for dom in &uniq {
                for cod in &uniq {
                    let count = (cod.len() as u64)
                        .checked_pow(dom.len() as u32)
                        .unwrap_or(u64::MAX);
                    estimate = estimate.saturating_add(count);
                }
            }
            if estimate > budget {
                return Err(Error::budget(
                    "full finite-set fragment (try generated mode)",
                    estimate,
                    budget,
                ));
            }
            for dom in &uniq {
                for cod in &uniq {
                    enumerate_functions(dom, cod, &mut functions);
                }
            }
        }
        FinSetMode::Generated => {
            for s in &uniq {
                functions.push(FinFunction::identity(s));
            }
            for f in seeds {
                if !functions.contains(f) {
                    functions.push(f.clone());
                }
            }
            // Closure under composition by a worklist over new entries.
            let mut frontier = 0;
            while frontier < functions.len() {
                let upto = functions.len();
                for i in frontier..upto {
                    for j in 0..upto {
                        for (g, f) in [(i, j), (j, i)] {
                            if functions[f].codomain() == functions[g].domain() {
                                let c = functions[g].compose_after(&functions[f])?;
                                if !functions.contains(&c) {
                                    functions.push(c);
                                    if functions.len() as u64 > budget {
                                        return Err(Error::budget(
                                            "generated finite-set fragment closure",
                                            functions.len() as u64,
                                            budget,
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
                frontier = upto;
            }
            functions.sort();
            functions.dedup();
        }
    }

    // In full mode identities are produced by enumeration; ensure present.
    for s in &uniq {
        let id = FinFunction::identity(s);
        if !functions.contains(&id) {
            functions.push(id);
        }
    }
    functions.sort();
    functions.dedup();

    let mut builder = CategoryBuilder::new("finset-fragment");
    let mut set_index: HashMap<FinSet, ObjId> = HashMap::new();
    for (i, s) in uniq.iter().enumerate() {
        builder.object(set_object_name(s));
        set_index.insert(s.clone(), i);
    }
    let mut fn_index: HashMap<FinFunction, MorId> = HashMap::new();
    let mut names: Vec<String> = Vec::new();
    for (i, f) in functions.iter().enumerate() {
        let name = if f == &FinFunction::identity(f.domain()) {
            format!("id{}", f.domain())
        } else {
            format!("{}to{}#{}", f.domain(), f.codomain(), f.lex_rank())
        };
        builder.morphism(&name, set_object_name(f.domain()), set_object_name(f.codomain()));
        fn_index.insert(f.clone(), i);
        names.push(name);
    }
    for s in &uniq {
        let id = FinFunction::identity(s);
        builder.identity(set_object_name(s), &names[fn_index[&id]]);
    }
    // Composition rows: function composition wherever composable and
    // present (always present in full mode and in generated closures).
    for (gi, g) in functions.iter().enumerate() {
        for (fi, f) in functions.iter().enumerate() {
            if f.codomain() == g.domain() {
                let c = g.compose_after(f)?;
                let ci = *fn_index.get(&c).ok_or_else(|| {
                    Error::Internal("fragment closure is missing a composite".into())
                })?;
                builder.compose(&names[gi], &names[fi], &names[ci]);
            }
        }
    }
    let category = builder.build()?;
    Ok(FinSetFragment {
        category,
        sets: uniq,
        functions,
        set_index,
        fn_index,
    })
}

fn enumerate_functions(dom: &FinSet, cod: &FinSet, out: &mut Vec<FinFunction>) {
    let n = dom.len();
    let k = cod.len();
    if k == 0 {
        if n == 0 {
            out.push(FinFunction {
                domain: dom.clone(),
                codomain: cod.clone(),
                map: Vec::new(),
            });
        }
        return;
    }
    let mut map = vec![0u32; n];
    loop {
        out.push(FinFunction {
            domain: dom.clone(),
            codomain: cod.clone(),
            map: map.clone(),
        });
        // Lexicographic increment.
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if map[i] as usize + 1 < k {
                map[i] += 1;
                for m in map.iter_mut().skip(i + 1) {
                    *m = 0;
                }
                break;
            }
        }
    }
}
