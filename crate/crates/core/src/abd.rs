//! Abstract block diagrams over finite sets: components with typed
//! input/output ports and total mapping tables, wired by shared port
//! names. Supports canonical forms (no mapping factors through a proper
//! sub-product of its inputs), single-output refinement, finite
//! set-functor tables with regularity/multiplicativity checks, and
//! extraction of an emergence from a diagram plus structure hints.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::construct::{Construct, OperationTable, SignatureSlot, StructureSignature};
use crate::emergence::Emergence;
use crate::fincat::CategoryBuilder;
use crate::finset::{tuple_label, FinFunction, FinSet};
use crate::report::{Error, Result, ValidationReport, Verdict};

pub type PortId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Port {
    pub name: String,
    pub set: FinSet,
}

/// A component: a total mapping from the product of its input port sets
/// to the product of its output port sets, stored row-wise in
/// mixed-radix input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub name: String,
    pub inputs: Vec<PortId>,
    pub outputs: Vec<PortId>,
    table: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractBlockDiagram {
    pub name: String,
    pub ports: Vec<Port>,
    pub components: Vec<Component>,
}

/// Mixed-radix enumeration of index tuples over the given sizes.
fn index_tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &s in sizes {
        let mut next = Vec::with_capacity(out.len() * s);
        for t in &out {
            for v in 0..s {
                let mut t2 = t.clone();
                t2.push(v);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

fn radix_index(tuple: &[usize], sizes: &[usize]) -> usize {
    tuple
        .iter()
        .zip(sizes.iter())
        .fold(0usize, |acc, (&t, &s)| acc * s + t)
}

impl Component {
    pub fn rows(&self, ports: &[Port]) -> Vec<(Vec<String>, Vec<String>)> {
        let in_sizes: Vec<usize> = self.inputs.iter().map(|&p| ports[p].set.len()).collect();
        index_tuples(&in_sizes)
            .into_iter()
            .enumerate()
            .map(|(row, tuple)| {
                let ins = tuple
                    .iter()
                    .zip(self.inputs.iter())
                    .map(|(&v, &p)| ports[p].set.elem(v).to_string())
                    .collect();
                let outs = self.table[row]
                    .iter()
                    .zip(self.outputs.iter())
                    .map(|(&v, &p)| ports[p].set.elem(v as usize).to_string())
                    .collect();
                (ins, outs)
            })
            .collect()
    }

    fn apply_indices(&self, input: &[usize], ports: &[Port]) -> &[u32] {
        let in_sizes: Vec<usize> = self.inputs.iter().map(|&p| ports[p].set.len()).collect();
        &self.table[radix_index(input, &in_sizes)]
    }

    /// The mapping as one function between encoded product sets.
    pub fn as_function(&self, ports: &[Port]) -> Result<FinFunction> {
        let dom = product_set(&self.inputs, ports);
        let cod = product_set(&self.outputs, ports);
        let in_sizes: Vec<usize> = self.inputs.iter().map(|&p| ports[p].set.len()).collect();
        let pairs: Vec<(String, String)> = index_tuples(&in_sizes)
            .into_iter()
            .enumerate()
            .map(|(row, tuple)| {
                let ins: Vec<&str> = tuple
                    .iter()
                    .zip(self.inputs.iter())
                    .map(|(&v, &p)| ports[p].set.elem(v))
                    .collect();
                let outs: Vec<&str> = self.table[row]
                    .iter()
                    .zip(self.outputs.iter())
                    .map(|(&v, &p)| ports[p].set.elem(v as usize))
                    .collect();
                (tuple_label(&ins), tuple_label(&outs))
            })
            .collect();
        FinFunction::from_pairs(dom, cod, pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())))
    }
}

/// Encoded product of port sets under the canonical left-bracketed pair
/// encoding. Zero ports give the unit set.
pub fn product_set(ports_sel: &[PortId], ports: &[Port]) -> FinSet {
    let sizes: Vec<usize> = ports_sel.iter().map(|&p| ports[p].set.len()).collect();
    FinSet::new(index_tuples(&sizes).into_iter().map(|tuple| {
        let parts: Vec<&str> = tuple
            .iter()
            .zip(ports_sel.iter())
            .map(|(&v, &p)| ports[p].set.elem(v))
            .collect();
        tuple_label(&parts)
    }))
}

/// Builder input for a diagram: named port sets plus components given
/// by element-label rows.
pub struct AbdBuilder {
    pub name: String,
    pub ports: Vec<(String, FinSet)>,
    pub components: Vec<(String, Vec<String>, Vec<String>, Vec<(Vec<String>, Vec<String>)>)>,
}

impl AbdBuilder {
    pub fn build(self) -> Result<AbstractBlockDiagram> {
        let mut port_index: HashMap<&str, PortId> = HashMap::new();
        let mut ports = Vec::with_capacity(self.ports.len());
        for (i, (name, set)) in self.ports.iter().enumerate() {
            if port_index.insert(name, i).is_some() {
                return Err(Error::structural(format!("duplicate port `{name}`")));
            }
            ports.push(Port {
                name: name.clone(),
                set: set.clone(),
            });
        }
        let mut components = Vec::with_capacity(self.components.len());
        let mut names: BTreeSet<&str> = BTreeSet::new();
        for (name, ins, outs, rows) in &self.components {
            if !names.insert(name) {
                return Err(Error::structural(format!("duplicate component `{name}`")));
            }
            let inputs: Vec<PortId> = ins
                .iter()
                .map(|p| {
                    port_index
                        .get(p.as_str())
                        .copied()
                        .ok_or_else(|| Error::structural(format!("component `{name}` reads unknown port `{p}`")))
                })
                .collect::<Result<_>>()?;
            let outputs: Vec<PortId> = outs
                .iter()
                .map(|p| {
                    port_index
                        .get(p.as_str())
                        .copied()
                        .ok_or_else(|| Error::structural(format!("component `{name}` writes unknown port `{p}`")))
                })
                .collect::<Result<_>>()?;
            let in_sizes: Vec<usize> = inputs.iter().map(|&p| ports[p].set.len()).collect();
            let row_count: usize = in_sizes.iter().product();
            let mut table: Vec<Option<Vec<u32>>> = vec![None; row_count];
            for (in_labels, out_labels) in rows {
                if in_labels.len() != inputs.len() || out_labels.len() != outputs.len() {
                    return Err(Error::structural(format!(
                        "component `{name}`: row arity does not match its ports"
                    )));
                }
                let tuple: Vec<usize> = in_labels
                    .iter()
                    .zip(inputs.iter())
                    .map(|(l, &p)| {
                        ports[p].set.index_of(l).ok_or_else(|| {
                            Error::structural(format!(
                                "component `{name}`: `{l}` is not in port `{}`",
                                ports[p].name
                            ))
                        })
                    })
                    .collect::<Result<_>>()?;
                let value: Vec<u32> = out_labels
                    .iter()
                    .zip(outputs.iter())
                    .map(|(l, &p)| {
                        ports[p].set.index_of(l).map(|v| v as u32).ok_or_else(|| {
                            Error::structural(format!(
                                "component `{name}`: `{l}` is not in port `{}`",
                                ports[p].name
                            ))
                        })
                    })
                    .collect::<Result<_>>()?;
                let idx = radix_index(&tuple, &in_sizes);
                if let Some(prev) = &table[idx] {
                    if prev != &value {
                        return Err(Error::structural(format!(
                            "component `{name}`: conflicting rows for {:?}",
                            in_labels
                        )));
                    }
                }
                table[idx] = Some(value);
            }
            let table = table
                .into_iter()
                .enumerate()
                .map(|(i, v)| {
                    v.ok_or_else(|| {
                        Error::structural(format!("component `{name}`: table not total (row {i} missing)"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            components.push(Component {
                name: name.clone(),
                inputs,
                outputs,
                table,
            });
        }
        let abd = AbstractBlockDiagram {
            name: self.name,
            ports,
            components,
        };
        let report = abd.validate();
        if !report.is_ok() {
            return Err(Error::structural(report.render()));
        }
        Ok(abd)
    }
}

impl AbstractBlockDiagram {
    /// Well-formedness: each port produced by at most one component.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new(format!("abd {}", self.name));
        let mut producer: HashMap<PortId, &str> = HashMap::new();
        for c in &self.components {
            for &o in &c.outputs {
                if let Some(prev) = producer.insert(o, &c.name) {
                    report.push(
                        "multiple-producers",
                        format!(
                            "port `{}` is produced by both `{prev}` and `{}`",
                            self.ports[o].name, c.name
                        ),
                    );
                }
            }
        }
        report
    }

    pub fn producer_of(&self, p: PortId) -> Option<usize> {
        self.components.iter().position(|c| c.outputs.contains(&p))
    }

    /// Ports consumed but never produced: the diagram's external inputs.
    pub fn external_inputs(&self) -> Vec<PortId> {
        (0..self.ports.len())
            .filter(|&p| {
                self.producer_of(p).is_none()
                    && self.components.iter().any(|c| c.inputs.contains(&p))
            })
            .collect()
    }

    /// Ports produced but never consumed: the diagram's external outputs.
    pub fn external_outputs(&self) -> Vec<PortId> {
        (0..self.ports.len())
            .filter(|&p| {
                self.producer_of(p).is_some()
                    && !self.components.iter().any(|c| c.inputs.contains(&p))
            })
            .collect()
    }

    pub fn port_id(&self, name: &str) -> Option<PortId> {
        self.ports.iter().position(|p| p.name == name)
    }

    pub fn component(&self, name: &str) -> Option<&Component> {
        self.components.iter().find(|c| c.name == name)
    }

    /// Topological order of components along wires; errors on feedback
    /// loops, where table evaluation is undefined.
    fn topo_order(&self) -> Result<Vec<usize>> {
        let n = self.components.len();
        let mut deps: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, c) in self.components.iter().enumerate() {
            for &p in &c.inputs {
                if let Some(j) = self.producer_of(p) {
                    if j != i {
                        deps[i].push(j);
                    } else {
                        return Err(Error::Unsupported(format!(
                            "component `{}` feeds itself; evaluation is undefined on feedback loops",
                            c.name
                        )));
                    }
                }
            }
        }
        let mut order = Vec::with_capacity(n);
        let mut state = vec![0u8; n];
        fn visit(
            i: usize,
            deps: &[Vec<usize>],
            state: &mut [u8],
            order: &mut Vec<usize>,
            names: &[String],
        ) -> Result<()> {
            match state[i] {
                2 => Ok(()),
                1 => Err(Error::Unsupported(format!(
                    "feedback loop through component `{}`; evaluation is undefined",
                    names[i]
                ))),
                _ => {
                    state[i] = 1;
                    for &d in &deps[i] {
                        visit(d, deps, state, order, names)?;
                    }
                    state[i] = 2;
                    order.push(i);
                    Ok(())
                }
            }
        }
        let names: Vec<String> = self.components.iter().map(|c| c.name.clone()).collect();
        for i in 0..n {
            visit(i, &deps, &mut state, &mut order, &names)?;
        }
        Ok(order)
    }

    /// Evaluate the diagram on an assignment of external-input values
    /// (element indices per external input port). Returns values for
    /// every port reachable from the inputs.
    pub fn evaluate(&self, inputs: &HashMap<PortId, usize>) -> Result<HashMap<PortId, usize>> {
        let order = self.topo_order()?;
        let mut values: HashMap<PortId, usize> = inputs.clone();
        for i in order {
            let c = &self.components[i];
            let mut in_vals = Vec::with_capacity(c.inputs.len());
            let mut ready = true;
            for &p in &c.inputs {
                match values.get(&p) {
                    Some(&v) => in_vals.push(v),
                    None => {
                        ready = false;
                        break;
                    }
                }
            }
            if !ready {
                continue;
            }
            let out = self.components[i].apply_indices(&in_vals, &self.ports).to_vec();
            for (&o, v) in self.components[i].outputs.iter().zip(out) {
                values.insert(o, v as usize);
            }
        }
        Ok(values)
    }

    /// The full external-input → all-port behavior table, for
    /// behavior-preservation comparisons.
    pub fn behavior_table(&self) -> Result<Vec<(HashMap<PortId, usize>, HashMap<PortId, usize>)>> {
        let ext = self.external_inputs();
        let sizes: Vec<usize> = ext.iter().map(|&p| self.ports[p].set.len()).collect();
        let mut out = Vec::new();
        for tuple in index_tuples(&sizes) {
            let assignment: HashMap<PortId, usize> =
                ext.iter().copied().zip(tuple.iter().copied()).collect();
            let result = self.evaluate(&assignment)?;
            out.push((assignment, result));
        }
        Ok(out)
    }
}

/// The set of input coordinates a mapping genuinely depends on: the
/// coordinates where flipping a single value can change the output.
/// A mapping factors exactly through the projections onto supersets of
/// this set.
pub fn coordinate_support(c: &Component, ports: &[Port]) -> Vec<usize> {
    let in_sizes: Vec<usize> = c.inputs.iter().map(|&p| ports[p].set.len()).collect();
    let tuples = index_tuples(&in_sizes);
    let mut support = Vec::new();
    'coord: for i in 0..c.inputs.len() {
        for t in &tuples {
            let base = c.apply_indices(t, ports);
            let mut alt = t.clone();
            for v in 0..in_sizes[i] {
                if v == t[i] {
                    continue;
                }
                alt[i] = v;
                if c.apply_indices(&alt, ports) != base {
                    support.push(i);
                    continue 'coord;
                }
            }
        }
    }
    support
}

/// The minimal proper coordinate subset the mapping factors through,
/// or None when it depends on every coordinate. Defined for components
/// with at least two input ports.
pub fn is_factorable(c: &Component, ports: &[Port]) -> Option<Vec<usize>> {
    if c.inputs.len() < 2 {
        return None;
    }
    let support = coordinate_support(c, ports);
    if support.len() == c.inputs.len() {
        None
    } else {
        Some(support)
    }
}

/// Restrict every mapping to its true coordinate support, removing the
/// dropped input wires. Idempotent and behavior-preserving; the result
/// has no factorable mapping.
pub fn canonical_form(abd: &AbstractBlockDiagram) -> AbstractBlockDiagram {
    let mut out = abd.clone();
    for c in out.components.iter_mut() {
        let support = coordinate_support(c, &out.ports);
        if support.len() == c.inputs.len() {
            continue;
        }
        let in_sizes: Vec<usize> = c.inputs.iter().map(|&p| out.ports[p].set.len()).collect();
        let kept_sizes: Vec<usize> = support.iter().map(|&i| in_sizes[i]).collect();
        let mut table = Vec::with_capacity(kept_sizes.iter().product());
        for kept in index_tuples(&kept_sizes) {
            // Extend with zeros off-support; irrelevance makes the choice
            // immaterial.
            let mut full = vec![0usize; c.inputs.len()];
            for (si, &coord) in support.iter().enumerate() {
                full[coord] = kept[si];
            }
            table.push(c.apply_indices(&full, &out.ports).to_vec());
        }
        c.inputs = support.iter().map(|&i| c.inputs[i]).collect();
        c.table = table;
    }
    out
}

/// Split every component with several outputs into one single-output
/// component per output coordinate, sharing the same inputs. The
/// recombined behavior is identical row by row.
pub fn refine_single_output(abd: &AbstractBlockDiagram) -> AbstractBlockDiagram {
    let mut components = Vec::new();
    for c in &abd.components {
        if c.outputs.len() <= 1 {
            components.push(c.clone());
            continue;
        }
        for (k, &o) in c.outputs.iter().enumerate() {
            components.push(Component {
                name: format!("{}.{}", c.name, abd.ports[o].name),
                inputs: c.inputs.clone(),
                outputs: vec![o],
                table: c.table.iter().map(|row| vec![row[k]]).collect(),
            });
        }
    }
    AbstractBlockDiagram {
        name: abd.name.clone(),
        ports: abd.ports.clone(),
        components,
    }
}

/// A system resolution: declared signals and raw component tables,
/// prior to materialization as a diagram.
#[derive(Debug, Clone)]
pub struct Resolution {
    pub name: String,
    pub signals: Vec<(String, FinSet)>,
    pub parts: Vec<(String, Vec<String>, Vec<String>, Vec<(Vec<String>, Vec<String>)>)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolveNotices {
    pub external_inputs: Vec<String>,
    pub external_outputs: Vec<String>,
}

/// Materialize a resolution as an abstract block diagram. Ports that
/// are consumed but never produced are accepted as external inputs and
/// flagged in the notices.
pub fn resolve_to_abd(r: &Resolution) -> Result<(AbstractBlockDiagram, ResolveNotices)> {
    for (_, ins, outs, _) in &r.parts {
        for s in ins.iter().chain(outs.iter()) {
            if !r.signals.iter().any(|(n, _)| n == s) {
                return Err(Error::structural(format!("signal `{s}` is not declared")));
            }
        }
    }
    let abd = AbdBuilder {
        name: r.name.clone(),
        ports: r.signals.clone(),
        components: r.parts.clone(),
    }
    .build()?;
    let notices = ResolveNotices {
        external_inputs: abd
            .external_inputs()
            .into_iter()
            .map(|p| abd.ports[p].name.clone())
            .collect(),
        external_outputs: abd
            .external_outputs()
            .into_iter()
            .map(|p| abd.ports[p].name.clone())
            .collect(),
    };
    Ok((abd, notices))
}

/// A finite presentation of a set-endofunctor: assignments on a
/// declared lattice of subsets of a universe, function actions on
/// declared arrows, and declared product triples under the canonical
/// pair encoding. All verdicts are lattice-relative.
#[derive(Debug, Clone)]
pub struct SetFunctorTable {
    pub name: String,
    pub universe: FinSet,
    pub nodes: Vec<(String, FinSet)>,
    pub assignment: Vec<FinSet>,
    /// Declared function arrows `f: nodes[i] → nodes[j]` with their
    /// images T(f).
    pub actions: Vec<(String, FinFunction, FinFunction)>,
    /// Declared product triples: `nodes[k]` is `nodes[i] × nodes[j]`
    /// under the canonical encoding.
    pub products: Vec<(usize, usize, usize)>,
}

impl SetFunctorTable {
    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|(n, _)| n == name)
    }

    pub fn node_of_set(&self, set: &FinSet) -> Option<usize> {
        self.nodes.iter().position(|(_, s)| s == set)
    }

    /// Structural checks plus functoriality on the declared arrows.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new(format!("set-functor {}", self.name));
        for (name, set) in &self.nodes {
            if !set.is_subset_of(&self.universe) {
                report.push(
                    "node-universe",
                    format!("node `{name}` is not a subset of the universe"),
                );
            }
        }
        if self.assignment.len() != self.nodes.len() {
            report.push("assignment", "one assigned set required per node");
            return report;
        }
        for (i, j, k) in &self.products {
            let expect = self.nodes[*i].1.product(&self.nodes[*j].1);
            if self.nodes[*k].1 != expect {
                report.push(
                    "product-declaration",
                    format!(
                        "node `{}` is not the encoded product of `{}` and `{}`",
                        self.nodes[*k].0, self.nodes[*i].0, self.nodes[*j].0
                    ),
                );
            }
        }
        for (name, f, tf) in &self.actions {
            let Some(i) = self.node_of_set(f.domain()) else {
                report.push("action-typing", format!("arrow `{name}`: domain is not a node"));
                continue;
            };
            let Some(j) = self.node_of_set(f.codomain()) else {
                report.push("action-typing", format!("arrow `{name}`: codomain is not a node"));
                continue;
            };
            if tf.domain() != &self.assignment[i] || tf.codomain() != &self.assignment[j] {
                report.push(
                    "action-typing",
                    format!("arrow `{name}`: image does not run T(dom) → T(cod)"),
                );
            }
        }
        // Identity and composition on declared arrows.
        for (name, f, tf) in &self.actions {
            if let Some(i) = self.node_of_set(f.domain()) {
                if f == &FinFunction::identity(f.domain())
                    && tf != &FinFunction::identity(&self.assignment[i])
                {
                    report.push(
                        "identity-action",
                        format!("arrow `{name}` is an identity but its image is not"),
                    );
                }
            }
            for (name2, g, tg) in &self.actions {
                if g.domain() == f.codomain() {
                    let gf = g.compose_after(f).expect("checked");
                    if let Some((name3, _, tgf)) =
                        self.actions.iter().find(|(_, h, _)| *h == gf)
                    {
                        let expect = tg.compose_after(tf);
                        match expect {
                            Ok(e) if &e == tgf => {}
                            _ => report.push(
                                "composition-action",
                                format!("images of `{name2}` ∘ `{name}` differ from the image of `{name3}`"),
                            ),
                        }
                    }
                }
            }
        }
        report
    }

    pub fn action_for(&self, f: &FinFunction) -> Option<&FinFunction> {
        self.actions.iter().find(|(_, g, _)| g == f).map(|(_, _, tf)| tf)
    }

    pub fn assigned(&self, set: &FinSet) -> Option<&FinSet> {
        self.node_of_set(set).map(|i| &self.assignment[i])
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SetFunctorVerdict {
    pub regular: Verdict,
    pub multiplicative: Verdict,
    pub notes: Vec<String>,
}

/// Regularity (nonemptiness and inclusion preservation over every node
/// pair) and multiplicativity (set equality under the canonical pair
/// encoding over every declared product). Undeclared products are
/// reported as inconclusive, not failed.
pub fn check_set_functor(t: &SetFunctorTable) -> SetFunctorVerdict {
    let mut regular = Verdict::yes();
    for (i, (name, set)) in t.nodes.iter().enumerate() {
        if !set.is_empty() && t.assignment[i].is_empty() {
            regular = Verdict::no(format!("node `{name}` is nonempty but its image is empty"));
            break;
        }
    }
    if regular.holds {
        'pairs: for (i, (ni, si)) in t.nodes.iter().enumerate() {
            for (j, (nj, sj)) in t.nodes.iter().enumerate() {
                if i != j && si.is_subset_of(sj) && !t.assignment[i].is_subset_of(&t.assignment[j]) {
                    regular = Verdict::no(format!(
                        "`{ni}` ⊆ `{nj}` but T({ni}) ⊄ T({nj})"
                    ));
                    break 'pairs;
                }
            }
        }
    }

    let mut multiplicative = Verdict::yes();
    for (i, j, k) in &t.products {
        let lhs = t.assignment[*i].product(&t.assignment[*j]);
        let rhs = &t.assignment[*k];
        if &lhs != rhs {
            let diff = lhs.symmetric_difference(rhs);
            multiplicative = Verdict::no(format!(
                "T({}) × T({}) ≠ T({}); symmetric difference {}",
                t.nodes[*i].0, t.nodes[*j].0, t.nodes[*k].0, diff
            ));
            break;
        }
    }
    let mut notes = Vec::new();
    if t.products.is_empty() {
        notes.push("no products declared in the lattice; multiplicativity is inconclusive".into());
    }
    notes.push(format!(
        "verdicts are relative to the declared lattice of {} node(s)",
        t.nodes.len()
    ));
    SetFunctorVerdict {
        regular,
        multiplicative,
        notes,
    }
}

/// The identity set-functor presented on exactly the lattice a diagram
/// needs: all port sets, all component input/output product sets, the
/// component mappings as declared arrows, and the product triples.
pub fn identity_set_functor(abd: &AbstractBlockDiagram) -> Result<SetFunctorTable> {
    let mut universe_elems: Vec<String> = Vec::new();
    let mut nodes: Vec<(String, FinSet)> = Vec::new();
    let push_node = |name: String, set: FinSet, nodes: &mut Vec<(String, FinSet)>| {
        if !nodes.iter().any(|(_, s)| *s == set) {
            nodes.push((name, set));
        }
    };
    for p in &abd.ports {
        universe_elems.extend(p.set.iter().map(|e| e.to_string()));
        push_node(p.name.clone(), p.set.clone(), &mut nodes);
    }
    let mut products = Vec::new();
    for c in &abd.components {
        for sel in [&c.inputs, &c.outputs] {
            let set = product_set(sel, &abd.ports);
            universe_elems.extend(set.iter().map(|e| e.to_string()));
            push_node(format!("prod:{}", set), set.clone(), &mut nodes);
            // Record the binary product chain of the encoding.
            if sel.len() == 2 {
                let a = nodes.iter().position(|(_, s)| s == &abd.ports[sel[0]].set).unwrap();
                let b = nodes.iter().position(|(_, s)| s == &abd.ports[sel[1]].set).unwrap();
                let k = nodes.iter().position(|(_, s)| s == &set).unwrap();
                products.push((a, b, k));
            }
        }
    }
    let assignment: Vec<FinSet> = nodes.iter().map(|(_, s)| s.clone()).collect();
    let mut actions = Vec::new();
    for c in &abd.components {
        let f = c.as_function(&abd.ports)?;
        actions.push((c.name.clone(), f.clone(), f));
    }
    Ok(SetFunctorTable {
        name: "identity".into(),
        universe: FinSet::new(universe_elems),
        nodes,
        assignment,
        actions,
        products,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ApplyVerdict {
    pub functor: SetFunctorVerdict,
    pub transformed_valid: bool,
    pub defects: Vec<String>,
    /// True when the functor passed and the transformed diagram is a
    /// valid representation.
    pub pass: bool,
}

/// Transform a diagram by a set-functor table: ports become T(port),
/// mappings become T(mapping). The checks exercise the representation
/// biconditional constructively: a passing functor yields a valid
/// diagram; a failing one has its concrete defect exhibited when one
/// exists.
pub fn apply_set_functor(
    abd: &AbstractBlockDiagram,
    t: &SetFunctorTable,
) -> Result<(Option<AbstractBlockDiagram>, ApplyVerdict)> {
    let functor = check_set_functor(t);
    let mut defects = Vec::new();

    let mut new_ports = Vec::with_capacity(abd.ports.len());
    for p in &abd.ports {
        match t.assigned(&p.set) {
            Some(s) => new_ports.push(Port {
                name: p.name.clone(),
                set: s.clone(),
            }),
            None => {
                return Err(Error::structural(format!(
                    "set functor `{}` is undefined on port `{}`",
                    t.name, p.name
                )))
            }
        }
    }

    let mut new_components = Vec::with_capacity(abd.components.len());
    for c in &abd.components {
        let f = c.as_function(&abd.ports)?;
        let Some(tf) = t.action_for(&f) else {
            return Err(Error::structural(format!(
                "set functor `{}` is undefined on the mapping of `{}`",
                t.name, c.name
            )));
        };
        // Decode T(mapping) into a table over the transformed ports.
        // This requires T(∏ ins) to be the encoded product of the T(ins)
        // — exactly multiplicativity — and nonempty ports to stay
        // nonempty; failures surface as concrete defects.
        let in_sizes: Vec<usize> = c.inputs.iter().map(|&p| new_ports[p].set.len()).collect();
        let expected_rows: usize = in_sizes.iter().product();
        if c.inputs.iter().any(|&p| new_ports[p].set.is_empty() && !abd.ports[p].set.is_empty()) {
            defects.push(format!(
                "component `{}`: an input port was collapsed to the empty set",
                c.name
            ));
        }
        let mut rows: Vec<Vec<u32>> = Vec::with_capacity(expected_rows);
        let mut ok = true;
        for tuple in index_tuples(&in_sizes) {
            let parts: Vec<&str> = tuple
                .iter()
                .zip(c.inputs.iter())
                .map(|(&v, &p)| new_ports[p].set.elem(v))
                .collect();
            let encoded = tuple_label(&parts);
            let Some(image) = tf.apply(&encoded) else {
                defects.push(format!(
                    "component `{}`: T-image set does not contain the encoded tuple {encoded}",
                    c.name
                ));
                ok = false;
                break;
            };
            // Decode the output by reverse lookup over output tuples.
            let out_sizes: Vec<usize> = c.outputs.iter().map(|&p| new_ports[p].set.len()).collect();
            let mut decoded: Option<Vec<u32>> = None;
            for out_tuple in index_tuples(&out_sizes) {
                let out_parts: Vec<&str> = out_tuple
                    .iter()
                    .zip(c.outputs.iter())
                    .map(|(&v, &p)| new_ports[p].set.elem(v))
                    .collect();
                if tuple_label(&out_parts) == image {
                    decoded = Some(out_tuple.iter().map(|&v| v as u32).collect());
                    break;
                }
            }
            match decoded {
                Some(d) => rows.push(d),
                None => {
                    defects.push(format!(
                        "component `{}`: T-image `{image}` does not decode over the transformed output ports",
                        c.name
                    ));
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            break;
        }
        new_components.push(Component {
            name: c.name.clone(),
            inputs: c.inputs.clone(),
            outputs: c.outputs.clone(),
            table: rows,
        });
    }

    let transformed = if defects.is_empty() && new_components.len() == abd.components.len() {
        let out = AbstractBlockDiagram {
            name: format!("{}[{}]", abd.name, t.name),
            ports: new_ports,
            components: new_components,
        };
        let valid = out.validate().is_ok();
        if !valid {
            defects.push("transformed diagram fails well-formedness".into());
        }
        Some(out)
    } else {
        None
    };
    let functor_pass = functor.regular.holds && functor.multiplicative.holds;
    let transformed_valid = transformed.is_some();
    let pass = functor_pass && transformed_valid;
    if functor_pass && !transformed_valid {
        defects.push("functor passed but the transformed diagram failed to assemble".into());
    }
    Ok((
        transformed,
        ApplyVerdict {
            functor,
            transformed_valid,
            defects,
            pass,
        },
    ))
}

/// Per-port structure hints: one shared slot shape plus a table list
/// per port, aligned with the slots.
#[derive(Debug, Clone)]
pub struct SignatureHints {
    pub slots: Vec<SignatureSlot>,
    pub tables: Vec<(String, Vec<OperationTable>)>,
}

/// Read an emergence out of a diagram: objects are the port sets
/// (with the hinted operations), morphisms are the component mappings
/// plus identities plus all composites, closed over the finite function
/// space, and the underlying functor is the standard one. Components
/// must be single-input single-output; refine and encode first if not.
pub fn abd_to_emergence(
    abd: &AbstractBlockDiagram,
    hints: &SignatureHints,
    auto_canonical: bool,
) -> Result<(Emergence, Vec<String>)> {
    let mut notices = Vec::new();
    let canonical = canonical_form(abd);
    let abd = if &canonical != abd {
        if !auto_canonical {
            return Err(Error::structural(
                "diagram is not canonical; pass the canonicalized form or enable auto-canonicalization",
            ));
        }
        notices.push("diagram was canonicalized first".into());
        &canonical
    } else {
        abd
    };
    for c in &abd.components {
        if c.inputs.len() != 1 || c.outputs.len() != 1 {
            return Err(Error::Unsupported(format!(
                "component `{}` is not single-input single-output; refine outputs and declare \
                 encoded product ports for multi-input mappings",
                c.name
            )));
        }
    }
    if hints.slots.is_empty() {
        return Err(Error::structural(
            "structure hints declare no operation slots; structureless data is the ambient set \
             category, not an emergence",
        ));
    }
    let mut missing = Vec::new();
    for p in &abd.ports {
        match hints.tables.iter().find(|(n, _)| n == &p.name) {
            Some((_, tables)) if tables.len() == hints.slots.len() => {}
            Some(_) => missing.push(format!("`{}` (wrong slot count)", p.name)),
            None => missing.push(format!("`{}`", p.name)),
        }
    }
    if !missing.is_empty() {
        return Err(Error::structural(format!(
            "structure hints missing for port(s): {}",
            missing.join(", ")
        )));
    }

    // Morphism closure: component functions, identities, and composites,
    // identified by (dom port, cod port, table).
    #[derive(Clone)]
    struct Arrow {
        name: String,
        dom: PortId,
        cod: PortId,
        table: FinFunction,
    }
    let mut arrows: Vec<Arrow> = Vec::new();
    for (p, port) in abd.ports.iter().enumerate() {
        arrows.push(Arrow {
            name: format!("id_{}", port.name),
            dom: p,
            cod: p,
            table: FinFunction::identity(&port.set),
        });
    }
    for c in &abd.components {
        let f = c.as_function(&abd.ports)?;
        let same = arrows
            .iter()
            .any(|a| a.dom == c.inputs[0] && a.cod == c.outputs[0] && a.table == f);
        if !same {
            arrows.push(Arrow {
                name: c.name.clone(),
                dom: c.inputs[0],
                cod: c.outputs[0],
                table: f,
            });
        } else {
            notices.push(format!(
                "component `{}` duplicates an existing arrow and was merged",
                c.name
            ));
        }
    }
    let mut frontier = 0;
    while frontier < arrows.len() {
        let upto = arrows.len();
        for i in frontier..upto {
            for j in 0..upto {
                for (g, f) in [(i, j), (j, i)] {
                    if arrows[f].cod == arrows[g].dom {
                        let table = arrows[g].table.compose_after(&arrows[f].table)?;
                        let dom = arrows[f].dom;
                        let cod = arrows[g].cod;
                        if !arrows.iter().any(|a| a.dom == dom && a.cod == cod && a.table == table)
                        {
                            arrows.push(Arrow {
                                name: format!("{}∘{}", arrows[g].name, arrows[f].name),
                                dom,
                                cod,
                                table,
                            });
                        }
                    }
                }
            }
        }
        frontier = upto;
    }

    let mut b = CategoryBuilder::new(format!("{}-cat", abd.name));
    for p in &abd.ports {
        b.object(&p.name);
    }
    for a in &arrows {
        b.morphism(&a.name, &abd.ports[a.dom].name, &abd.ports[a.cod].name);
    }
    for port in &abd.ports {
        b.identity(&port.name, format!("id_{}", port.name));
    }
    for g in 0..arrows.len() {
        for f in 0..arrows.len() {
            if arrows[f].cod == arrows[g].dom {
                let table = arrows[g].table.compose_after(&arrows[f].table)?;
                let h = arrows
                    .iter()
                    .position(|a| {
                        a.dom == arrows[f].dom && a.cod == arrows[g].cod && a.table == table
                    })
                    .ok_or_else(|| Error::Internal("closure is missing a composite".into()))?;
                b.compose(&arrows[g].name, &arrows[f].name, &arrows[h].name);
            }
        }
    }
    let cat = Arc::new(b.build()?);
    let signature = StructureSignature::new(hints.slots.clone())?;
    let carriers: Vec<FinSet> = abd.ports.iter().map(|p| p.set.clone()).collect();
    let structure: Vec<Vec<OperationTable>> = abd
        .ports
        .iter()
        .map(|p| {
            hints
                .tables
                .iter()
                .find(|(n, _)| n == &p.name)
                .map(|(_, t)| t.clone())
                .expect("checked above")
        })
        .collect();
    let underlying: Vec<FinFunction> = arrows.iter().map(|a| a.table.clone()).collect();
    let construct = Arc::new(Construct::new(
        format!("{}-construct", abd.name),
        cat,
        signature,
        carriers,
        structure,
        underlying,
    )?);
    let emergence = Emergence::standard(format!("{}-emergence", abd.name), construct);
    Ok((emergence, notices))
}
