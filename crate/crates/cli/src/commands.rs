//! Command handlers: every engine operation is reachable from at least
//! one subcommand. A computed verdict — even a failing one — exits 0;
//! operational errors exit 1; exceeded budgets exit 2.

use serde_json::json;
use std::sync::Arc;

use emcat_core::battery::default_battery;
use emcat_core::{
    abd_to_emergence, apply_set_functor, canonical_form, check_induces, check_iso,
    check_morphism, check_operation_properties, check_set_functor, check_strong_equalizer,
    check_sub_emergence, classify, compose_graded, coproduct_emergence, enumerate_functors,
    enumerate_homomorphisms, enumerate_naturals, equalizer_emergence, essential_uniqueness,
    extremal_status, find_isomorphism, find_representation, functor_properties, graded_arrow,
    internal_structure_report, is_factorable, limit_of_diagram, materialize_finset,
    opposite_emergence, product_category, product_emergence, pullback_category,
    pullback_emergence, refine_single_output, regular_mono_fixture, resolve_to_abd, stabilizer,
    standard_underlying, verify_universal, Emergence, EmergenceRef, Error as CoreError,
    FinCategory, FinSetMode, Functor, GradedKind, IsoMode, MorphismMode, OppositeGuMode,
    UniversalCandidate, UniversalVerdict,
};

use crate::cliargs::{
    AbdCmd, CheckKind, ClassifyCmd, Cmd, ConstructCmd, EnumerateCmd, ExportKind, GradedKindArg,
    RelateCmd, VerifyCmd,
};
use crate::dot;
use crate::reportfmt::Report;
use crate::workspace::{
    serialize_abd, serialize_category, serialize_emergence, serialize_functor, Workspace,
};

pub enum CliError {
    Op(String),
    Budget(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            other => CliError::Op(other.to_string()),
        }
    }
}

type CResult = Result<Report, CliError>;

pub struct Ctx {
    pub ws: Workspace,
    pub budget: u64,
    pub battery_name: Option<String>,
    pub with_identities: bool,
}

impl Ctx {
    fn op_err(&self, msg: impl Into<String>) -> CliError {
        CliError::Op(msg.into())
    }

    fn emergence(&self, name: &str) -> Result<&Emergence, CliError> {
        self.ws
            .emergence(name)
            .ok_or_else(|| self.op_err(format!("unknown emergence `{name}`")))
    }

    fn functor(&self, name: &str) -> Result<&Functor, CliError> {
        self.ws
            .functor(name)
            .ok_or_else(|| self.op_err(format!("unknown functor `{name}`")))
    }

    fn category(&self, name: &str) -> Result<&Arc<FinCategory>, CliError> {
        self.ws
            .category(name)
            .ok_or_else(|| self.op_err(format!("unknown category `{name}`")))
    }

    /// The competitor battery: the built-in default, or a declared one.
    fn battery(&self) -> Result<Vec<Arc<FinCategory>>, CliError> {
        match self.battery_name.as_deref() {
            None | Some("default") => Ok(default_battery()),
            Some(name) => {
                let decl = self
                    .ws
                    .battery(name)
                    .ok_or_else(|| self.op_err(format!("unknown battery `{name}`")))?;
                let mut out = Vec::new();
                for c in &decl.categories {
                    out.push(self.category(c)?.clone());
                }
                for e in &decl.emergences {
                    out.push(self.emergence(e)?.category().clone());
                }
                if out.is_empty() {
                    return Err(self.op_err(format!("battery `{name}` is empty")));
                }
                Ok(out)
            }
        }
    }

    fn emergence_battery(&self) -> Result<Vec<Emergence>, CliError> {
        let name = self
            .battery_name
            .as_deref()
            .ok_or_else(|| self.op_err("this command needs `--battery <name>` naming declared emergences"))?;
        let decl = self
            .ws
            .battery(name)
            .ok_or_else(|| self.op_err(format!("unknown battery `{name}`")))?;
        if decl.emergences.is_empty() {
            return Err(self.op_err(format!("battery `{name}` declares no emergences")));
        }
        decl.emergences
            .iter()
            .map(|e| self.emergence(e).cloned())
            .collect()
    }
}

fn verdict_json(v: &emcat_core::Verdict) -> serde_json::Value {
    json!({"holds": v.holds, "witness": v.witness, "notes": v.notes})
}

fn universal_json(v: &UniversalVerdict) -> serde_json::Value {
    serde_json::to_value(v).expect("serializable")
}

fn report_validation(report: &mut Report, v: &emcat_core::ValidationReport) {
    report.block(&v.render());
    report.field("valid", json!(v.is_ok()));
    report.field(
        "violations",
        serde_json::to_value(&v.violations).expect("serializable"),
    );
}

fn push_universal(report: &mut Report, v: &UniversalVerdict) {
    report.block(&v.render());
    report.field("verdict", universal_json(v));
}

pub fn run(ctx: &Ctx, cmd: &Cmd, echo: &str) -> CResult {
    match cmd {
        Cmd::Check { kind, name } => run_check(ctx, kind, name.as_deref(), echo),
        Cmd::Construct(c) => run_construct(ctx, c, echo),
        Cmd::Verify(v) => run_verify(ctx, v, echo),
        Cmd::Relate(r) => run_relate(ctx, r, echo),
        Cmd::Classify(c) => run_classify(ctx, c, echo),
        Cmd::Represent { emergence } => run_represent(ctx, emergence, echo),
        Cmd::Extremal { emergence } => run_extremal(ctx, emergence, echo),
        Cmd::Internal { subject } => run_internal(ctx, subject, echo),
        Cmd::Abd(a) => run_abd(ctx, a, echo),
        Cmd::Export { kind, name } => run_export(ctx, kind, name, echo),
        Cmd::Enumerate(e) => run_enumerate(ctx, e, echo),
    }
}

fn run_check(ctx: &Ctx, kind: &CheckKind, name: Option<&str>, echo: &str) -> CResult {
    let mut report = Report::new(echo);
    fn need<'a>(name: Option<&'a str>) -> Result<&'a str, CliError> {
        name.ok_or_else(|| CliError::Op("this check needs a subject name".into()))
    }
    match kind {
        CheckKind::Category => {
            let c = ctx.category(need(name)?)?;
            report_validation(&mut report, &c.validate());
        }
        CheckKind::Functor => {
            let f = ctx.functor(need(name)?)?;
            report_validation(&mut report, &f.validate());
        }
        CheckKind::Natural => {
            let name = need(name)?;
            let t = ctx
                .ws
                .natural(name)
                .ok_or_else(|| ctx.op_err(format!("unknown natural transformation `{name}`")))?;
            report_validation(&mut report, &t.validate());
            report.field("natural_isomorphism", json!(t.is_natural_isomorphism()));
        }
        CheckKind::Construct => {
            let name = need(name)?;
            let c = ctx
                .ws
                .construct(name)
                .ok_or_else(|| ctx.op_err(format!("unknown construct `{name}`")))?;
            report_validation(&mut report, &c.validate());
        }
        CheckKind::Gu => {
            let name = need(name)?;
            let g = ctx
                .ws
                .gu(name)
                .ok_or_else(|| ctx.op_err(format!("unknown gu functor `{name}`")))?;
            report_validation(&mut report, &g.validate());
            report.field("faithful", json!(g.is_faithful()));
            report.field("embedding", json!(g.is_embedding()));
        }
        CheckKind::Gsu => {
            let name = need(name)?;
            let g = ctx
                .ws
                .gsu(name)
                .ok_or_else(|| ctx.op_err(format!("unknown gsu functor `{name}`")))?;
            report_validation(&mut report, &g.validate());
        }
        CheckKind::Emergence => {
            let e = ctx.emergence(need(name)?)?;
            report_validation(&mut report, &e.validate());
            report.field("order", json!(e.order()));
            report.line(format!("order: {}", e.order()));
        }
        CheckKind::Semi => {
            let name = need(name)?;
            let e = ctx
                .ws
                .semi(name)
                .ok_or_else(|| ctx.op_err(format!("unknown semi-emergence `{name}`")))?;
            report_validation(&mut report, &e.validate());
            report.field("order", json!(e.order()));
        }
        CheckKind::Abd => {
            let name = need(name)?;
            let a = ctx
                .ws
                .abd(name)
                .ok_or_else(|| ctx.op_err(format!("unknown abd `{name}`")))?;
            report_validation(&mut report, &a.validate());
        }
        CheckKind::Setfunctor => {
            let name = need(name)?;
            let t = ctx
                .ws
                .setfunctor(name)
                .ok_or_else(|| ctx.op_err(format!("unknown setfunctor `{name}`")))?;
            report_validation(&mut report, &t.validate());
        }
        CheckKind::Diagram => {
            let name = need(name)?;
            let d = ctx
                .ws
                .diagram(name)
                .ok_or_else(|| ctx.op_err(format!("unknown diagram `{name}`")))?;
            report_validation(&mut report, &d.validate());
        }
        CheckKind::Workspace => {
            let mut all_ok = true;
            let mut count = 0usize;
            for (n, c) in &ctx.ws.categories {
                let v = c.validate();
                all_ok &= v.is_ok();
                count += 1;
                report.line(format!("category {n}: {}", if v.is_ok() { "ok" } else { "INVALID" }));
            }
            for (n, f) in &ctx.ws.functors {
                let v = f.validate();
                all_ok &= v.is_ok();
                count += 1;
                report.line(format!("functor {n}: {}", if v.is_ok() { "ok" } else { "INVALID" }));
            }
            for (n, c) in &ctx.ws.constructs {
                let v = c.validate();
                all_ok &= v.is_ok();
                count += 1;
                report.line(format!("construct {n}: {}", if v.is_ok() { "ok" } else { "INVALID" }));
            }
            for (n, e) in &ctx.ws.emergences {
                let v = e.validate();
                all_ok &= v.is_ok();
                count += 1;
                report.line(format!("emergence {n}: {}", if v.is_ok() { "ok" } else { "INVALID" }));
            }
            for (n, e) in &ctx.ws.semis {
                let v = e.validate();
                all_ok &= v.is_ok();
                count += 1;
                report.line(format!("semi {n}: {}", if v.is_ok() { "ok" } else { "INVALID" }));
            }
            for (n, a) in &ctx.ws.abds {
                let v = a.validate();
                all_ok &= v.is_ok();
                count += 1;
                report.line(format!("abd {n}: {}", if v.is_ok() { "ok" } else { "INVALID" }));
            }
            report.line(format!("{count} declaration(s) checked"));
            report.field("all_valid", json!(all_ok));
        }
    }
    Ok(report)
}

fn named_or<'a>(as_name: &'a Option<String>, fallback: &'a str) -> &'a str {
    as_name.as_deref().unwrap_or(fallback)
}

fn emit_dot_if_requested(ctx: &Ctx, report: &mut Report, path: &Option<std::path::PathBuf>, dot_text: &str) -> Result<(), CliError> {
    let _ = ctx;
    if let Some(p) = path {
        std::fs::write(p, dot_text).map_err(|e| CliError::Op(format!("cannot write {}: {e}", p.display())))?;
        report.line(format!("dot written to {}", p.display()));
    }
    Ok(())
}

fn run_construct(ctx: &Ctx, cmd: &ConstructCmd, echo: &str) -> CResult {
    let mut report = Report::new(echo);
    match cmd {
        ConstructCmd::Equalizer {
            base,
            functors,
            as_name,
            verify,
            emit_dot,
        } => {
            let e = ctx.emergence(base)?;
            let fs: Vec<Functor> = functors
                .iter()
                .map(|f| ctx.functor(f).cloned())
                .collect::<Result<_, _>>()?;
            let mut res = equalizer_emergence(e, &fs)?;
            res.emergence.name = named_or(as_name, &res.emergence.name).to_string();
            if res.empty {
                report.line("note: the equalizer is empty (no structured objects)");
            }
            report.block(&serialize_emergence(&res.emergence));
            report.block(&serialize_functor(&res.inclusion.name.clone(), &res.inclusion));
            report.field("objects", json!(res.emergence.category().object_count()));
            report.field("empty", json!(res.empty));
            if *verify {
                let verdict = verify_universal(
                    &UniversalCandidate::Equalizer {
                        inclusion: &res.inclusion,
                        parallel: &fs,
                    },
                    &ctx.battery()?,
                    ctx.budget,
                )?;
                push_universal(&mut report, &verdict);
            }
            emit_dot_if_requested(ctx, &mut report, emit_dot, &dot::category_dot(res.emergence.category(), ctx.with_identities))?;
        }
        ConstructCmd::Stabilizer {
            base,
            first,
            second,
            as_name,
        } => {
            let e = ctx.emergence(base)?;
            let u1 = ctx
                .ws
                .gu(first)
                .ok_or_else(|| ctx.op_err(format!("unknown gu functor `{first}`")))?;
            let u2 = ctx
                .ws
                .gu(second)
                .ok_or_else(|| ctx.op_err(format!("unknown gu functor `{second}`")))?;
            let mut res = stabilizer(e, u1, u2, ctx.budget)?;
            res.emergence.name = named_or(as_name, &res.emergence.name).to_string();
            if res.empty {
                report.line("note: the stabilizer is empty (the readings never agree)");
            }
            report.block(&serialize_emergence(&res.emergence));
            report.field("objects", json!(res.emergence.category().object_count()));
            report.field("empty", json!(res.empty));
        }
        ConstructCmd::Product {
            subjects,
            as_name,
            verify,
            emit_dot,
        } => {
            if subjects.iter().all(|s| ctx.ws.emergence(s).is_some()) {
                let es: Vec<Emergence> = subjects
                    .iter()
                    .map(|s| ctx.emergence(s).cloned())
                    .collect::<Result<_, _>>()?;
                let mut res = product_emergence(&es, ctx.budget)?;
                res.emergence.name = named_or(as_name, &res.emergence.name).to_string();
                report.block(&serialize_emergence(&res.emergence));
                for p in &res.projections {
                    report.block(&serialize_functor(&p.name.clone(), p));
                }
                report.field("objects", json!(res.emergence.category().object_count()));
                report.field("order", json!(res.emergence.order()));
                report.line(format!(
                    "order {} = sum of factor orders; slot tags re-verified on the lifted tables",
                    res.emergence.order()
                ));
                if *verify {
                    let verdict = verify_universal(
                        &UniversalCandidate::Product {
                            projections: &res.projections,
                        },
                        &ctx.battery()?,
                        ctx.budget,
                    )?;
                    push_universal(&mut report, &verdict);
                }
                emit_dot_if_requested(ctx, &mut report, emit_dot, &dot::category_dot(res.emergence.category(), ctx.with_identities))?;
            } else {
                let cats: Vec<Arc<FinCategory>> = subjects
                    .iter()
                    .map(|s| ctx.category(s).cloned())
                    .collect::<Result<_, _>>()?;
                let res = product_category(&cats, ctx.budget)?;
                report.block(&serialize_category(&res.category));
                for p in &res.projections {
                    report.block(&serialize_functor(&p.name.clone(), p));
                }
                report.field("objects", json!(res.category.object_count()));
                report.field("morphisms", json!(res.category.morphism_count()));
                emit_dot_if_requested(ctx, &mut report, emit_dot, &dot::category_dot(&res.category, ctx.with_identities))?;
            }
        }
        ConstructCmd::Coproduct {
            subjects,
            as_name,
            verify,
            emit_dot,
        } => {
            let es: Vec<Emergence> = subjects
                .iter()
                .map(|s| ctx.emergence(s).cloned())
                .collect::<Result<_, _>>()?;
            let mut res = coproduct_emergence(&es)?;
            res.emergence.name = named_or(as_name, &res.emergence.name).to_string();
            report.block(&serialize_emergence(&res.emergence));
            for inj in &res.injections {
                report.block(&serialize_functor(&inj.name.clone(), inj));
            }
            report.field("objects", json!(res.emergence.category().object_count()));
            if *verify {
                let verdict = verify_universal(
                    &UniversalCandidate::Coproduct {
                        injections: &res.injections,
                    },
                    &ctx.battery()?,
                    ctx.budget,
                )?;
                push_universal(&mut report, &verdict);
            }
            emit_dot_if_requested(ctx, &mut report, emit_dot, &dot::category_dot(res.emergence.category(), ctx.with_identities))?;
        }
        ConstructCmd::Pullback {
            first,
            second,
            cospan,
            semi,
            as_name,
            verify,
            emit_dot,
        } => {
            if *semi {
                let a = ctx
                    .ws
                    .semi(first)
                    .ok_or_else(|| ctx.op_err(format!("unknown semi-emergence `{first}`")))?;
                let b = ctx
                    .ws
                    .semi(second)
                    .ok_or_else(|| ctx.op_err(format!("unknown semi-emergence `{second}`")))?;
                let (pb, to_a, to_b, empty) = emcat_core::pullback_semi(a, b)?;
                if empty {
                    report.line("note: the pullback is empty (no matching pairs)");
                }
                report.line(format!("semi pullback with {} object(s)", pb.category().object_count()));
                report.block(&serialize_functor("pb~to-a", &to_a));
                report.block(&serialize_functor("pb~to-b", &to_b));
                report_validation(&mut report, &pb.validate());
                report.field("objects", json!(pb.category().object_count()));
                report.field("empty", json!(empty));
            } else if *cospan {
                let f = ctx.functor(first)?;
                let g = ctx.functor(second)?;
                let (cat, to_a, to_b) = pullback_category(f, g)?;
                report.line("note: general-cospan pullback at the category level (extension)");
                report.block(&serialize_category(&cat));
                report.block(&serialize_functor(&to_a.name.clone(), &to_a));
                report.block(&serialize_functor(&to_b.name.clone(), &to_b));
                report.field("objects", json!(cat.object_count()));
            } else {
                let a = ctx.emergence(first)?;
                let b = ctx.emergence(second)?;
                let mut res = pullback_emergence(a, b)?;
                res.emergence.name = named_or(as_name, &res.emergence.name).to_string();
                if res.empty {
                    report.line("note: the pullback is empty (no matching pairs)");
                }
                report.block(&serialize_emergence(&res.emergence));
                report.block(&serialize_functor("pb-to-a", &res.to_a));
                report.block(&serialize_functor("pb-to-b", &res.to_b));
                report.field("objects", json!(res.emergence.category().object_count()));
                report.field("empty", json!(res.empty));
                if *verify {
                    let verdict = verify_universal(
                        &UniversalCandidate::Pullback {
                            to_a: &res.to_a,
                            to_b: &res.to_b,
                            a,
                            b,
                        },
                        &ctx.battery()?,
                        ctx.budget,
                    )?;
                    push_universal(&mut report, &verdict);
                }
                emit_dot_if_requested(ctx, &mut report, emit_dot, &dot::category_dot(res.emergence.category(), ctx.with_identities))?;
            }
        }
        ConstructCmd::Limit {
            diagram,
            as_name,
            verify,
        } => {
            let d = ctx
                .ws
                .diagram(diagram)
                .ok_or_else(|| ctx.op_err(format!("unknown diagram `{diagram}`")))?;
            let mut res = limit_of_diagram(d, ctx.budget)?;
            res.source.apex.name = named_or(as_name, &res.source.apex.name).to_string();
            report.block(&serialize_emergence(&res.source.apex));
            for (leg, node) in &res.source.legs {
                report.line(format!("leg {} -> {}", leg.name, node.name));
                report.block(&serialize_functor(&leg.name.clone(), leg));
            }
            report.field("objects", json!(res.source.apex.category().object_count()));
            if *verify {
                let legs: Vec<Functor> = res.source.legs.iter().map(|(f, _)| f.clone()).collect();
                let verdict = verify_universal(
                    &UniversalCandidate::Limit { diagram: d, legs: &legs },
                    &ctx.battery()?,
                    ctx.budget,
                )?;
                push_universal(&mut report, &verdict);
                let mono = verify_universal(
                    &UniversalCandidate::MonoSource { legs: &legs },
                    &ctx.battery()?,
                    ctx.budget,
                )?;
                push_universal(&mut report, &mono);
            }
        }
        ConstructCmd::Opposite { subject, as_name } => {
            if let Some(e) = ctx.ws.emergence(subject) {
                let res = opposite_emergence(e, None)?;
                let mut em = res.emergence;
                em.name = named_or(as_name, &em.name).to_string();
                report.line(format!(
                    "underlying functions: {}",
                    match res.mode {
                        OppositeGuMode::Supplied => "supplied reversal",
                        OppositeGuMode::Inverses => "inverses of the originals",
                        OppositeGuMode::Reindexed => "re-indexed originals (degenerate)",
                    }
                ));
                if res.degenerate {
                    report.line("note: degenerate opposite; `check emergence` on it will report the typing defects");
                }
                report.field("degenerate", json!(res.degenerate));
                report.field("order", json!(em.order()));
                report.block(&serialize_emergence(&em));
            } else {
                let c = ctx.category(subject)?;
                let op = c.opposite();
                report.block(&serialize_category(&op));
            }
        }
        ConstructCmd::Finset {
            sets,
            generated_from,
        } => {
            if let Some(cname) = generated_from {
                let c = ctx
                    .ws
                    .construct(cname)
                    .ok_or_else(|| ctx.op_err(format!("unknown construct `{cname}`")))?;
                let fragment = materialize_finset(
                    c.carriers(),
                    FinSetMode::Generated,
                    c.underlying_all(),
                    ctx.budget,
                )?;
                report.block(&serialize_category(&fragment.category));
                report.field("morphisms", json!(fragment.category.morphism_count()));
            } else {
                let sets: Vec<emcat_core::FinSet> = sets
                    .iter()
                    .map(|s| {
                        ctx.ws
                            .set(s)
                            .cloned()
                            .ok_or_else(|| ctx.op_err(format!("unknown set `{s}`")))
                    })
                    .collect::<Result<_, _>>()?;
                let fragment = materialize_finset(&sets, FinSetMode::Full, &[], ctx.budget)?;
                report.block(&serialize_category(&fragment.category));
                report.field("morphisms", json!(fragment.category.morphism_count()));
            }
        }
        ConstructCmd::StandardGu { construct } => {
            let c = ctx
                .ws
                .construct(construct)
                .ok_or_else(|| ctx.op_err(format!("unknown construct `{construct}`")))?;
            let gu = standard_underlying(c);
            report_validation(&mut report, &gu.validate());
            report.line(format!(
                "standard underlying functor of `{construct}`: faithful={} embedding={}",
                gu.is_faithful(),
                gu.is_embedding()
            ));
        }
        ConstructCmd::Hom { category, object } => {
            let c = ctx.category(category)?;
            let at = c
                .object_id(object)
                .ok_or_else(|| ctx.op_err(format!("unknown object `{object}`")))?;
            let (fragment, h) = emcat_core::fincat::hom_functor(c, at, ctx.budget)?;
            report.block(&serialize_category(&fragment.category));
            report.block(&serialize_functor(&h.name.clone(), &h));
            report_validation(&mut report, &h.validate());
        }
        ConstructCmd::RegularMonoFixture { parent, objects } => {
            let e = ctx.emergence(parent)?;
            let ids: Vec<usize> = objects
                .iter()
                .map(|o| {
                    e.category()
                        .object_id(o)
                        .ok_or_else(|| ctx.op_err(format!("unknown object `{o}`")))
                })
                .collect::<Result<_, _>>()?;
            let (target, collapse, membership) = regular_mono_fixture(e, &ids)?;
            report.block(&serialize_emergence(&target));
            report.block(&serialize_functor("F", &collapse));
            report.block(&serialize_functor("G", &membership));
        }
    }
    Ok(report)
}

fn run_verify(ctx: &Ctx, cmd: &VerifyCmd, echo: &str) -> CResult {
    let mut report = Report::new(echo);
    let battery = ctx.battery()?;
    let verdict = match cmd {
        VerifyCmd::Equalizer { inclusion, parallel } | VerifyCmd::NEqualizer { inclusion, parallel } => {
            let inc = ctx.functor(inclusion)?;
            let fs: Vec<Functor> = parallel
                .iter()
                .map(|f| ctx.functor(f).cloned())
                .collect::<Result<_, _>>()?;
            verify_universal(
                &UniversalCandidate::Equalizer {
                    inclusion: inc,
                    parallel: &fs,
                },
                &battery,
                ctx.budget,
            )?
        }
        VerifyCmd::StrongEqualizer {
            inclusion,
            first,
            second,
            target,
        } => {
            let inc = ctx.functor(inclusion)?;
            let f = ctx.functor(first)?;
            let g = ctx.functor(second)?;
            let b = ctx.emergence(target)?;
            check_strong_equalizer(inc, f, g, b, &battery, ctx.budget)?
        }
        VerifyCmd::Product { projections } => {
            let ps: Vec<Functor> = projections
                .iter()
                .map(|f| ctx.functor(f).cloned())
                .collect::<Result<_, _>>()?;
            verify_universal(
                &UniversalCandidate::Product { projections: &ps },
                &battery,
                ctx.budget,
            )?
        }
        VerifyCmd::Coproduct { injections } => {
            let is: Vec<Functor> = injections
                .iter()
                .map(|f| ctx.functor(f).cloned())
                .collect::<Result<_, _>>()?;
            verify_universal(
                &UniversalCandidate::Coproduct { injections: &is },
                &battery,
                ctx.budget,
            )?
        }
        VerifyCmd::Pullback {
            to_a,
            to_b,
            over,
        } => {
            let fa = ctx.functor(to_a)?;
            let fb = ctx.functor(to_b)?;
            let a = ctx.emergence(&over[0])?;
            let b = ctx.emergence(&over[1])?;
            verify_universal(
                &UniversalCandidate::Pullback {
                    to_a: fa,
                    to_b: fb,
                    a,
                    b,
                },
                &battery,
                ctx.budget,
            )?
        }
        VerifyCmd::Limit { diagram, legs } => {
            let d = ctx
                .ws
                .diagram(diagram)
                .ok_or_else(|| ctx.op_err(format!("unknown diagram `{diagram}`")))?;
            let ls: Vec<Functor> = legs
                .iter()
                .map(|f| ctx.functor(f).cloned())
                .collect::<Result<_, _>>()?;
            verify_universal(
                &UniversalCandidate::Limit { diagram: d, legs: &ls },
                &battery,
                ctx.budget,
            )?
        }
        VerifyCmd::Coequalizer { co, parallel } => {
            let c = ctx.functor(co)?;
            let fs: Vec<Functor> = parallel
                .iter()
                .map(|f| ctx.functor(f).cloned())
                .collect::<Result<_, _>>()?;
            verify_universal(
                &UniversalCandidate::CoequalizerCandidate { co: c, parallel: &fs },
                &battery,
                ctx.budget,
            )?
        }
        VerifyCmd::Colimit { diagram, legs } => {
            let d = ctx
                .ws
                .diagram(diagram)
                .ok_or_else(|| ctx.op_err(format!("unknown diagram `{diagram}`")))?;
            let ls: Vec<Functor> = legs
                .iter()
                .map(|f| ctx.functor(f).cloned())
                .collect::<Result<_, _>>()?;
            verify_universal(
                &UniversalCandidate::ColimitCandidate { diagram: d, legs: &ls },
                &battery,
                ctx.budget,
            )?
        }
        VerifyCmd::Pushout {
            span_to_b,
            span_to_a,
            over,
        } => {
            let fb = ctx.functor(span_to_b)?;
            let fa = ctx.functor(span_to_a)?;
            let a = ctx.emergence(&over[0])?;
            let b = ctx.emergence(&over[1])?;
            verify_universal(
                &UniversalCandidate::PushoutCandidate {
                    span_to_b: fb,
                    span_to_a: fa,
                    a,
                    b,
                },
                &battery,
                ctx.budget,
            )?
        }
        VerifyCmd::MonoSource { legs } => {
            let ls: Vec<Functor> = legs
                .iter()
                .map(|f| ctx.functor(f).cloned())
                .collect::<Result<_, _>>()?;
            verify_universal(&UniversalCandidate::MonoSource { legs: &ls }, &battery, ctx.budget)?
        }
        VerifyCmd::EssentialUniqueness { legs1, legs2 } => {
            let l1: Vec<Functor> = legs1
                .iter()
                .map(|f| ctx.functor(f).cloned())
                .collect::<Result<_, _>>()?;
            let l2: Vec<Functor> = legs2
                .iter()
                .map(|f| ctx.functor(f).cloned())
                .collect::<Result<_, _>>()?;
            let iso = essential_uniqueness(&l1, &l2, ctx.budget)?;
            match iso {
                Some(f) => {
                    report.line("connecting isomorphism found");
                    report.block(&serialize_functor("connecting-iso", &f));
                    report.field("found", json!(true));
                }
                None => {
                    report.line("no connecting isomorphism exists");
                    report.field("found", json!(false));
                }
            }
            return Ok(report);
        }
    };
    push_universal(&mut report, &verdict);
    Ok(report)
}

fn iso_mode(strong: bool, semi: bool) -> IsoMode {
    match (strong, semi) {
        (false, false) => IsoMode::Iso,
        (true, false) => IsoMode::StrongIso,
        (false, true) => IsoMode::SemiIso,
        (true, true) => IsoMode::StrongSemiIso,
    }
}

fn hom_mode(strong: bool, semi: bool) -> MorphismMode {
    match (strong, semi) {
        (false, false) => MorphismMode::Hom,
        (true, false) => MorphismMode::Strong,
        (false, true) => MorphismMode::Semi,
        (true, true) => MorphismMode::StrongSemi,
    }
}

fn emergence_pair<'a>(
    ctx: &'a Ctx,
    a: &str,
    b: &str,
    semi: bool,
) -> Result<(EmergenceRef<'a>, EmergenceRef<'a>), CliError> {
    if semi {
        let ea = ctx
            .ws
            .semi(a)
            .ok_or_else(|| ctx.op_err(format!("unknown semi-emergence `{a}`")))?;
        let eb = ctx
            .ws
            .semi(b)
            .ok_or_else(|| ctx.op_err(format!("unknown semi-emergence `{b}`")))?;
        Ok((EmergenceRef::Semi(ea), EmergenceRef::Semi(eb)))
    } else {
        Ok((
            EmergenceRef::Plain(ctx.emergence(a)?),
            EmergenceRef::Plain(ctx.emergence(b)?),
        ))
    }
}

fn run_relate(ctx: &Ctx, cmd: &RelateCmd, echo: &str) -> CResult {
    let mut report = Report::new(echo);
    match cmd {
        RelateCmd::Hom {
            a,
            b,
            via,
            strong,
            semi,
            list,
        } => {
            let (ra, rb) = emergence_pair(ctx, a, b, *semi)?;
            let mode = hom_mode(*strong, *semi);
            match via {
                Some(fname) => {
                    let f = ctx.functor(fname)?;
                    let v = check_morphism(f, ra, rb, mode)?;
                    report.line(format!(
                        "{} is {}a homomorphism {} -> {}",
                        fname,
                        if v.holds { "" } else { "NOT " },
                        a,
                        b
                    ));
                    if let Some(w) = &v.witness {
                        report.line(format!("witness: {w}"));
                    }
                    report.field("verdict", verdict_json(&v));
                }
                None => {
                    let homs = enumerate_homomorphisms(ra, rb, mode, ctx.budget)?;
                    report.line(format!("{} homomorphism(s) {} -> {}", homs.len(), a, b));
                    report.field("count", json!(homs.len()));
                    if *list {
                        for h in &homs {
                            report.line(h.describe());
                        }
                    }
                }
            }
        }
        RelateCmd::Iso { a, b, strong, semi } => {
            let (ra, rb) = emergence_pair(ctx, a, b, *semi)?;
            let v = check_iso(ra, rb, iso_mode(*strong, *semi), ctx.budget)?;
            report.line(format!(
                "{a} and {b} are {}isomorphic{}",
                if v.holds { "" } else { "NOT " },
                if *strong { " (strong)" } else { "" }
            ));
            for n in &v.notes {
                report.line(format!("note: {n}"));
            }
            if let Some(w) = &v.witness {
                report.line(format!("witness: {}", w.describe()));
            }
            report.field("holds", json!(v.holds));
        }
        RelateCmd::Equivalence { a, b, semi } => {
            let (ra, rb) = emergence_pair(ctx, a, b, *semi)?;
            let mode = if *semi {
                IsoMode::SemiEquivalence
            } else {
                IsoMode::Equivalence
            };
            let v = check_iso(ra, rb, mode, ctx.budget)?;
            report.line(format!(
                "{a} is {}equivalent to {b}",
                if v.holds { "" } else { "NOT " }
            ));
            if let Some(w) = &v.witness {
                report.line(format!("witness: {}", w.describe()));
            }
            report.field("holds", json!(v.holds));
        }
        RelateCmd::Sub { sub, parent, full } => {
            let s = ctx.emergence(sub)?;
            let p = ctx.emergence(parent)?;
            let v = check_sub_emergence(s, p, *full);
            report.line(format!(
                "{sub} is {}a {}sub-emergence of {parent}",
                if v.holds { "" } else { "NOT " },
                if *full { "full " } else { "" }
            ));
            if let Some(w) = &v.witness {
                report.line(format!("witness: {w}"));
            }
            report.field("verdict", verdict_json(&v));
        }
        RelateCmd::Induces { a, b } => {
            let ea = ctx.emergence(a)?;
            let eb = ctx.emergence(b)?;
            let v = check_induces(ea, eb);
            report.line(format!("{a} {}induces {b}", if v.holds { "" } else { "does NOT " }));
            for n in &v.notes {
                report.line(format!("note: {n}"));
            }
            if let Some(w) = &v.witness {
                report.line(format!("witness: {w}"));
            }
            report.field("verdict", verdict_json(&v));
        }
        RelateCmd::Graded { kind, a, b, via } => {
            let ea = ctx.emergence(a)?;
            let eb = ctx.emergence(b)?;
            let f = ctx.functor(via)?;
            let g = graded_arrow(
                match kind {
                    GradedKindArg::Partial => GradedKind::Partial,
                    GradedKindArg::Relative => GradedKind::Relative,
                },
                ea,
                eb,
                f,
            )?;
            report.line(format!("{:?} arrow {a} -> {b} of degree {}", g.kind, g.degree));
            report.field("degree", json!(g.degree));
        }
        RelateCmd::GradedChain { kind, emergences, via } => {
            if via.len() + 1 != emergences.len() {
                return Err(ctx.op_err("a chain of n emergences needs n-1 functors"));
            }
            let kind = match kind {
                GradedKindArg::Partial => GradedKind::Partial,
                GradedKindArg::Relative => GradedKind::Relative,
            };
            let mut arrows = Vec::new();
            for (i, fname) in via.iter().enumerate() {
                let ea = ctx.emergence(&emergences[i])?;
                let eb = ctx.emergence(&emergences[i + 1])?;
                let f = ctx.functor(fname)?;
                arrows.push(graded_arrow(kind, ea, eb, f)?);
            }
            let mut acc = arrows[0].clone();
            for next in &arrows[1..] {
                acc = compose_graded(&acc, next)?;
            }
            report.line(format!(
                "chain folds to one {:?} arrow of degree {} (= {})",
                acc.kind,
                acc.degree,
                arrows.iter().map(|a| a.degree.to_string()).collect::<Vec<_>>().join("+")
            ));
            report.field("degree", json!(acc.degree));
        }
    }
    Ok(report)
}

fn run_classify(ctx: &Ctx, cmd: &ClassifyCmd, echo: &str) -> CResult {
    let mut report = Report::new(echo);
    match cmd {
        ClassifyCmd::Emergence { name } => {
            let e = ctx.emergence(name)?;
            let st = classify(e);
            report.line(format!(
                "small: {} (finite presentations are always small)",
                st.small
            ));
            report.line(format!("thin: {}", st.thin));
            report.line(format!("order: {}", e.order()));
            report.field("small", json!(st.small));
            report.field("thin", json!(st.thin));
            report.field("order", json!(e.order()));
        }
        ClassifyCmd::Functor { name } => {
            let f = ctx.functor(name)?;
            let flags = functor_properties(f);
            report.line(format!("faithful: {}", flags.faithful));
            report.line(format!("full: {}", flags.full));
            report.line(format!("embedding: {}", flags.embedding));
            report.line(format!("injective_on_objects: {}", flags.injective_on_objects));
            report.line(format!("isomorphism_dense: {}", flags.isomorphism_dense));
            report.line(format!("is_isomorphism: {}", flags.is_isomorphism));
            report.field("flags", serde_json::to_value(flags).expect("serializable"));
        }
        ClassifyCmd::Operation {
            construct,
            object,
            slot,
        } => {
            let c = ctx
                .ws
                .construct(construct)
                .ok_or_else(|| ctx.op_err(format!("unknown construct `{construct}`")))?;
            let oi = c
                .category
                .object_id(object)
                .ok_or_else(|| ctx.op_err(format!("unknown object `{object}`")))?;
            let si = c
                .signature
                .slot_index(slot)
                .ok_or_else(|| ctx.op_err(format!("unknown slot `{slot}`")))?;
            let siblings: Vec<(String, &emcat_core::OperationTable)> = c
                .signature
                .slots
                .iter()
                .zip(c.tables(oi))
                .filter(|(s, _)| s.name != *slot)
                .map(|(s, t)| (s.name.clone(), t))
                .collect();
            let tags = check_operation_properties(&c.tables(oi)[si], &siblings);
            let rendered: Vec<String> = tags.iter().map(|t| t.to_string()).collect();
            report.line(format!("verified tags: [{}]", rendered.join(" ")));
            report.field("tags", json!(rendered));
        }
    }
    Ok(report)
}

fn run_represent(ctx: &Ctx, name: &str, echo: &str) -> CResult {
    let mut report = Report::new(echo);
    let e = ctx.emergence(name)?;
    match find_representation(e, ctx.budget)? {
        Some(rep) => {
            report.line(format!("representable by object `{}`", rep.object));
            report.line("components of the natural isomorphism hom(A,-) => U:");
            for (o, &c) in rep.iso.components.iter().enumerate() {
                report.line(format!(
                    "  at {}: {}",
                    e.category().object_name(o),
                    rep.fragment.function_at(c)
                ));
            }
            report.line("monomorphisms map to injective functions (checked)");
            report.field("representable", json!(true));
            report.field("object", json!(rep.object));
        }
        None => {
            report.line("not representable (no object passes the hom-size screen with a natural isomorphism)");
            report.field("representable", json!(false));
        }
    }
    Ok(report)
}

fn run_extremal(ctx: &Ctx, name: &str, echo: &str) -> CResult {
    let mut report = Report::new(echo);
    let e = ctx.emergence(name)?;
    let battery = ctx.emergence_battery()?;
    let res = extremal_status(e, &battery, ctx.budget)?;
    report.line(format!(
        "initial (relative to battery {{{}}}): {}",
        res.battery.join(", "),
        res.initial.holds
    ));
    if let Some(w) = &res.initial.witness {
        report.line(format!("  witness: {w}"));
    }
    report.line(format!("terminal (relative to the same battery): {}", res.terminal.holds));
    if let Some(w) = &res.terminal.witness {
        report.line(format!("  witness: {w}"));
    }
    for n in &res.terminal.notes {
        report.line(format!("  note: {n}"));
    }
    let zero = res.initial.holds && res.terminal.holds;
    report.line(format!("zero: {zero} (no zero emergences exist)"));
    report.field("initial", verdict_json(&res.initial));
    report.field("terminal", verdict_json(&res.terminal));
    report.field("zero", json!(zero));
    Ok(report)
}

fn run_internal(ctx: &Ctx, subject: &str, echo: &str) -> CResult {
    let mut report = Report::new(echo);
    let construct = if let Some(c) = ctx.ws.construct(subject) {
        c.clone()
    } else if let Some(e) = ctx.ws.emergence(subject) {
        e.construct.clone()
    } else {
        return Err(ctx.op_err(format!("unknown construct or emergence `{subject}`")));
    };
    let r = internal_structure_report(&construct, ctx.budget)?;
    report.line(format!("thin: {}", r.thin));
    report.line(format!(
        "terminal objects: [{}]",
        r.terminal_objects.join(", ")
    ));
    for rec in &r.binary_products {
        match &rec.found {
            Some(w) => report.line(format!("product {}: {}", rec.subject, w)),
            None => report.line(format!("product {}: none", rec.subject)),
        };
    }
    for rec in &r.equalizers {
        match &rec.found {
            Some(w) => report.line(format!("equalizer {}: {}", rec.subject, w)),
            None => report.line(format!("equalizer {}: none", rec.subject)),
        };
    }
    report.line(format!("has terminal: {}", r.has_terminal));
    report.line(format!("has binary products: {}", r.has_binary_products));
    report.line(format!("has equalizers of parallel pairs: {}", r.has_equalizers));
    report.line(format!("finitely complete: {}", r.finitely_complete));
    match &r.complete_lattice {
        Some(v) => {
            report.line(format!("complete lattice (thin order): {}", v.holds));
            if let Some(w) = &v.witness {
                report.line(format!("  witness: {w}"));
            }
        }
        None => {
            report.line("complete lattice: not applicable (not thin)");
        }
    }
    report.field("report", serde_json::to_value(&r).expect("serializable"));
    Ok(report)
}

fn run_abd(ctx: &Ctx, cmd: &AbdCmd, echo: &str) -> CResult {
    let mut report = Report::new(echo);
    match cmd {
        AbdCmd::Build { resolution, as_name } => {
            let r = ctx
                .ws
                .resolution(resolution)
                .ok_or_else(|| ctx.op_err(format!("unknown resolution `{resolution}`")))?;
            let (mut abd, notices) = resolve_to_abd(r)?;
            abd.name = named_or(as_name, &abd.name).to_string();
            report.line(format!(
                "external inputs: [{}]",
                notices.external_inputs.join(", ")
            ));
            report.line(format!(
                "external outputs: [{}]",
                notices.external_outputs.join(", ")
            ));
            report.block(&serialize_abd(&abd));
            report.field("notices", serde_json::to_value(&notices).expect("serializable"));
        }
        AbdCmd::Canonical { abd, as_name, emit_dot } => {
            let a = ctx
                .ws
                .abd(abd)
                .ok_or_else(|| ctx.op_err(format!("unknown abd `{abd}`")))?;
            let mut canon = canonical_form(a);
            canon.name = named_or(as_name, &canon.name).to_string();
            let changed = canon.components.iter().zip(a.components.iter()).any(|(c, o)| c.inputs != o.inputs);
            report.line(if changed {
                "factorable mappings restricted to their supports"
            } else {
                "already canonical"
            });
            report.block(&serialize_abd(&canon));
            report.field("changed", json!(changed));
            emit_dot_if_requested(ctx, &mut report, emit_dot, &dot::abd_dot(&canon))?;
        }
        AbdCmd::Refine { abd, as_name } => {
            let a = ctx
                .ws
                .abd(abd)
                .ok_or_else(|| ctx.op_err(format!("unknown abd `{abd}`")))?;
            let mut refined = refine_single_output(a);
            refined.name = named_or(as_name, &refined.name).to_string();
            report.block(&serialize_abd(&refined));
            report.field("components", json!(refined.components.len()));
        }
        AbdCmd::Factor { abd, component } => {
            let a = ctx
                .ws
                .abd(abd)
                .ok_or_else(|| ctx.op_err(format!("unknown abd `{abd}`")))?;
            let c = a
                .component(component)
                .ok_or_else(|| ctx.op_err(format!("unknown component `{component}`")))?;
            match is_factorable(c, &a.ports) {
                Some(support) => {
                    let names: Vec<String> = support
                        .iter()
                        .map(|&i| a.ports[c.inputs[i]].name.clone())
                        .collect();
                    report.line(format!(
                        "factorable through coordinate subset {{{}}}",
                        names.join(", ")
                    ));
                    report.field("factorable", json!(true));
                    report.field("support", json!(names));
                }
                None => {
                    report.line("not factorable (depends on every coordinate, or has fewer than two inputs)");
                    report.field("factorable", json!(false));
                }
            }
        }
        AbdCmd::FunctorCheck { setfunctor, apply, as_name } => {
            let t = ctx
                .ws
                .setfunctor(setfunctor)
                .ok_or_else(|| ctx.op_err(format!("unknown setfunctor `{setfunctor}`")))?;
            report_validation(&mut report, &t.validate());
            let v = check_set_functor(t);
            report.line(format!("regular: {}", v.regular.holds));
            if let Some(w) = &v.regular.witness {
                report.line(format!("  witness: {w}"));
            }
            report.line(format!("multiplicative: {}", v.multiplicative.holds));
            if let Some(w) = &v.multiplicative.witness {
                report.line(format!("  witness: {w}"));
            }
            for n in &v.notes {
                report.line(format!("note: {n}"));
            }
            report.field("setfunctor", serde_json::to_value(&v).expect("serializable"));
            if let Some(abd_name) = apply {
                let a = ctx
                    .ws
                    .abd(abd_name)
                    .ok_or_else(|| ctx.op_err(format!("unknown abd `{abd_name}`")))?;
                let (out, verdict) = apply_set_functor(a, t)?;
                report.line(format!(
                    "application: {}",
                    if verdict.pass { "pass (valid representation)" } else { "fail" }
                ));
                for d in &verdict.defects {
                    report.line(format!("defect: {d}"));
                }
                if let Some(mut transformed) = out {
                    transformed.name = named_or(as_name, &transformed.name).to_string();
                    report.block(&serialize_abd(&transformed));
                }
                report.field("apply", serde_json::to_value(&verdict).expect("serializable"));
            }
        }
        AbdCmd::ToEmergence { abd, hints, as_name } => {
            let a = ctx
                .ws
                .abd(abd)
                .ok_or_else(|| ctx.op_err(format!("unknown abd `{abd}`")))?;
            let h = ctx
                .ws
                .hint(hints)
                .ok_or_else(|| ctx.op_err(format!("unknown hints `{hints}`")))?;
            let (mut e, notices) = abd_to_emergence(a, h, true)?;
            e.name = named_or(as_name, &e.name).to_string();
            for n in &notices {
                report.line(format!("note: {n}"));
            }
            report.line(format!("order: {}", e.order()));
            report.block(&serialize_emergence(&e));
            report_validation(&mut report, &e.validate());
            report.field("order", json!(e.order()));
        }
    }
    Ok(report)
}

fn run_export(ctx: &Ctx, kind: &ExportKind, name: &str, echo: &str) -> CResult {
    let mut report = Report::new(echo);
    let text = match kind {
        ExportKind::Category => dot::category_dot(ctx.category(name)?, ctx.with_identities),
        ExportKind::Functor => dot::functor_dot(name, ctx.functor(name)?, ctx.with_identities),
        ExportKind::Diagram => {
            let d = ctx
                .ws
                .diagram(name)
                .ok_or_else(|| ctx.op_err(format!("unknown diagram `{name}`")))?;
            dot::diagram_dot(name, d, ctx.with_identities)
        }
        ExportKind::Abd => {
            let a = ctx
                .ws
                .abd(name)
                .ok_or_else(|| ctx.op_err(format!("unknown abd `{name}`")))?;
            dot::abd_dot(a)
        }
    };
    report.block(&text);
    report.field("dot", json!(text));
    Ok(report)
}

fn run_enumerate(ctx: &Ctx, cmd: &EnumerateCmd, echo: &str) -> CResult {
    let mut report = Report::new(echo);
    match cmd {
        EnumerateCmd::Functors { a, b } => {
            let ca = ctx.category(a)?;
            let cb = ctx.category(b)?;
            let fs = enumerate_functors(ca, cb, ctx.budget).map_err(CliError::from)?;
            report.line(format!("{} functor(s) {} -> {}", fs.len(), a, b));
            for f in &fs {
                report.line(f.describe());
            }
            report.field("count", json!(fs.len()));
            let iso = find_isomorphism(ca, cb, ctx.budget)?;
            report.line(format!(
                "isomorphic as categories: {}",
                if iso.is_some() { "yes" } else { "no" }
            ));
            report.field("isomorphic", json!(iso.is_some()));
        }
        EnumerateCmd::Naturals { from, to, iso } => {
            let f = ctx.functor(from)?;
            let g = ctx.functor(to)?;
            let ts = enumerate_naturals(f, g, *iso, ctx.budget)?;
            report.line(format!(
                "{} natural {}(s) {} => {}",
                ts.len(),
                if *iso { "isomorphism" } else { "transformation" },
                from,
                to
            ));
            for t in &ts {
                let comps: Vec<String> = t
                    .components
                    .iter()
                    .enumerate()
                    .map(|(o, &c)| {
                        format!(
                            "{}:{}",
                            f.source.object_name(o),
                            f.target.morphism(c).name
                        )
                    })
                    .collect();
                report.line(format!("  [{}]", comps.join(" ")));
            }
            report.field("count", json!(ts.len()));
        }
        EnumerateCmd::Homs { a, b, strong, semi } => {
            let (ra, rb) = emergence_pair(ctx, a, b, *semi)?;
            let homs = enumerate_homomorphisms(ra, rb, hom_mode(*strong, *semi), ctx.budget)?;
            report.line(format!("{} homomorphism(s) {} -> {}", homs.len(), a, b));
            for h in &homs {
                report.line(h.describe());
            }
            report.field("count", json!(homs.len()));
        }
    }
    Ok(report)
}
