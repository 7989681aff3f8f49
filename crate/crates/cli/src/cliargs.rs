//! Command-line surface. Budgets come from `--budget`, then the
//! `EMCAT_BUDGET` environment variable, then the built-in default.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "emcat",
    about = "Finite categories, constructs, and the emergence algebra — exhaustively checked at desk scale",
    after_help = "Exit codes: 0 verdict computed (even a failing one), 1 operational error, 2 budget exceeded.\n\
                  Default search budget: 1000000 candidates (override with --budget or EMCAT_BUDGET)."
)]
pub struct Cli {
    /// Workspace file(s), merged in order.
    #[arg(short = 'w', long = "workspace", global = true)]
    pub workspace: Vec<PathBuf>,

    /// Search budget in candidates (enumeration refuses up front beyond it).
    #[arg(long, global = true)]
    pub budget: Option<u64>,

    /// Competitor battery: `default` or the name of a declared battery.
    #[arg(long, global = true)]
    pub battery: Option<String>,

    /// Emit the structured JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Append wall-clock timing (excluded from byte-stability).
    #[arg(long, global = true)]
    pub timing: bool,

    /// Include identity arrows in DOT exports.
    #[arg(long, global = true)]
    pub with_identities: bool,

    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Validate a declaration (or the whole workspace) and report every
    /// violated axiom with its witness.
    Check {
        #[arg(value_enum)]
        kind: CheckKind,
        name: Option<String>,
    },
    /// Build a universal object (or auxiliary structure) and print it as
    /// a new declaration.
    #[command(subcommand)]
    Construct(ConstructCmd),
    /// Verify a universal property against competitor cones enumerated
    /// from the battery.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Compare two emergences: homomorphisms, isomorphisms,
    /// equivalences, sub-emergences, induction, graded arrows.
    #[command(subcommand)]
    Relate(RelateCmd),
    /// Classify an emergence (small/thin), a functor (property flags),
    /// or one operation table (verified tags).
    #[command(subcommand)]
    Classify(ClassifyCmd),
    /// Search for a representing object of the underlying functor.
    Represent { emergence: String },
    /// Battery-relative initial/terminal status.
    Extremal { emergence: String },
    /// Within-construct structure: terminal objects, binary products,
    /// equalizers, finite completeness, complete-lattice check.
    Internal { subject: String },
    /// Block-diagram pipeline: build, canonicalize, refine,
    /// factorability, set-functor checks, emergence extraction.
    #[command(subcommand)]
    Abd(AbdCmd),
    /// DOT export of a category, functor, diagram, or block diagram.
    Export {
        #[arg(value_enum)]
        kind: ExportKind,
        name: String,
    },
    /// Raw enumerations: functors, natural transformations,
    /// homomorphisms.
    #[command(subcommand)]
    Enumerate(EnumerateCmd),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum CheckKind {
    Category,
    Functor,
    Natural,
    Construct,
    Gu,
    Gsu,
    Emergence,
    Semi,
    Diagram,
    Abd,
    Setfunctor,
    Workspace,
}

#[derive(Args)]
pub struct CommonConstructArgs {
    /// Name for the emitted declaration.
    #[arg(long = "as")]
    pub as_name: Option<String>,
}

#[derive(Subcommand)]
pub enum ConstructCmd {
    /// n-ary equalizer of parallel functors out of an emergence's
    /// category.
    Equalizer {
        base: String,
        #[arg(required = true, num_args = 2..)]
        functors: Vec<String>,
        #[arg(long = "as")]
        as_name: Option<String>,
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        emit_dot: Option<PathBuf>,
    },
    /// Equalizer of two underlying readings of one construct.
    Stabilizer {
        base: String,
        first: String,
        second: String,
        #[arg(long = "as")]
        as_name: Option<String>,
    },
    /// Product of emergences (or of plain categories).
    Product {
        #[arg(required = true, num_args = 1..)]
        subjects: Vec<String>,
        #[arg(long = "as")]
        as_name: Option<String>,
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        emit_dot: Option<PathBuf>,
    },
    /// Tagged disjoint union of emergences sharing a signature shape.
    Coproduct {
        #[arg(required = true, num_args = 1..)]
        subjects: Vec<String>,
        #[arg(long = "as")]
        as_name: Option<String>,
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        emit_dot: Option<PathBuf>,
    },
    /// Pullback of two emergences over their underlying functors
    /// (`--cospan` instead takes two functors with a shared codomain).
    Pullback {
        first: String,
        second: String,
        #[arg(long)]
        cospan: bool,
        /// Pull back two semi-emergences over their gsu functors.
        #[arg(long)]
        semi: bool,
        #[arg(long = "as")]
        as_name: Option<String>,
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        emit_dot: Option<PathBuf>,
    },
    /// Limit of a declared finite diagram.
    Limit {
        diagram: String,
        #[arg(long = "as")]
        as_name: Option<String>,
        #[arg(long)]
        verify: bool,
    },
    /// Arrow-reversed category or emergence.
    Opposite {
        subject: String,
        #[arg(long = "as")]
        as_name: Option<String>,
    },
    /// Materialized finite fragment of the set category: full mode over
    /// named sets, or generated from a construct's underlying functions.
    Finset {
        #[arg(num_args = 0..)]
        sets: Vec<String>,
        #[arg(long)]
        generated_from: Option<String>,
    },
    /// The standard (forgetful) underlying functor of a construct.
    StandardGu { construct: String },
    /// Covariant hom-functor at an object, landing in a generated
    /// fragment.
    Hom { category: String, object: String },
    /// The two-object fixture category with mutually inverse arrows and
    /// the collapse/membership functor pair for a full sub-construct.
    RegularMonoFixture {
        parent: String,
        #[arg(num_args = 0..)]
        objects: Vec<String>,
    },
}

#[derive(Subcommand)]
pub enum VerifyCmd {
    Equalizer {
        inclusion: String,
        #[arg(required = true, num_args = 2..)]
        parallel: Vec<String>,
    },
    /// Alias of `equalizer` for explicitly n-ary use.
    NEqualizer {
        inclusion: String,
        #[arg(required = true, num_args = 2..)]
        parallel: Vec<String>,
    },
    /// Equalizer of the underlying composites, plus the embedding check.
    StrongEqualizer {
        inclusion: String,
        first: String,
        second: String,
        #[arg(long)]
        target: String,
    },
    Product {
        #[arg(required = true, num_args = 1..)]
        projections: Vec<String>,
    },
    Coproduct {
        #[arg(required = true, num_args = 1..)]
        injections: Vec<String>,
    },
    Pullback {
        to_a: String,
        to_b: String,
        /// The two emergences whose underlying functors form the cospan.
        #[arg(long, num_args = 2)]
        over: Vec<String>,
    },
    Limit {
        diagram: String,
        #[arg(required = true, num_args = 1..)]
        legs: Vec<String>,
    },
    /// User-supplied co-equalizer candidate (verification only).
    Coequalizer {
        co: String,
        #[arg(required = true, num_args = 2..)]
        parallel: Vec<String>,
    },
    /// User-supplied co-limit candidate (verification only).
    Colimit {
        diagram: String,
        #[arg(required = true, num_args = 1..)]
        legs: Vec<String>,
    },
    /// User-supplied pushout candidate (verification only).
    Pushout {
        span_to_b: String,
        span_to_a: String,
        #[arg(long, num_args = 2)]
        over: Vec<String>,
    },
    MonoSource {
        #[arg(required = true, num_args = 1..)]
        legs: Vec<String>,
    },
    /// Connecting isomorphism between two verified candidates.
    EssentialUniqueness {
        #[arg(long, num_args = 1.., required = true)]
        legs1: Vec<String>,
        #[arg(long, num_args = 1.., required = true)]
        legs2: Vec<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum GradedKindArg {
    Partial,
    Relative,
}

#[derive(Subcommand)]
pub enum RelateCmd {
    /// Homomorphism check (with `--via`) or enumeration.
    Hom {
        a: String,
        b: String,
        #[arg(long)]
        via: Option<String>,
        #[arg(long)]
        strong: bool,
        #[arg(long)]
        semi: bool,
        #[arg(long)]
        list: bool,
    },
    Iso {
        a: String,
        b: String,
        #[arg(long)]
        strong: bool,
        #[arg(long)]
        semi: bool,
    },
    Equivalence {
        a: String,
        b: String,
        #[arg(long)]
        semi: bool,
    },
    Sub {
        sub: String,
        parent: String,
        #[arg(long)]
        full: bool,
    },
    Induces { a: String, b: String },
    Graded {
        #[arg(value_enum)]
        kind: GradedKindArg,
        a: String,
        b: String,
        #[arg(long)]
        via: String,
    },
    /// Fold a chain of graded arrows; degrees add exactly.
    GradedChain {
        #[arg(value_enum)]
        kind: GradedKindArg,
        #[arg(required = true, num_args = 2..)]
        emergences: Vec<String>,
        #[arg(long, num_args = 1..)]
        via: Vec<String>,
    },
}

#[derive(Subcommand)]
pub enum ClassifyCmd {
    Emergence { name: String },
    Functor { name: String },
    Operation {
        construct: String,
        object: String,
        slot: String,
    },
}

#[derive(Subcommand)]
pub enum AbdCmd {
    /// Materialize a resolution as a block diagram.
    Build {
        resolution: String,
        #[arg(long = "as")]
        as_name: Option<String>,
    },
    /// Restrict every mapping to its true coordinate support.
    Canonical {
        abd: String,
        #[arg(long = "as")]
        as_name: Option<String>,
        #[arg(long)]
        emit_dot: Option<PathBuf>,
    },
    /// Split multi-output components into single-output ones.
    Refine {
        abd: String,
        #[arg(long = "as")]
        as_name: Option<String>,
    },
    /// Minimal coordinate subset one component factors through.
    Factor { abd: String, component: String },
    /// Regularity/multiplicativity of a set-functor table; `--apply`
    /// additionally transforms a diagram through it.
    FunctorCheck {
        setfunctor: String,
        #[arg(long)]
        apply: Option<String>,
        #[arg(long = "as")]
        as_name: Option<String>,
    },
    /// Read an emergence out of a diagram plus structure hints.
    ToEmergence {
        abd: String,
        #[arg(long)]
        hints: String,
        #[arg(long = "as")]
        as_name: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ExportKind {
    Category,
    Functor,
    Diagram,
    Abd,
}

#[derive(Subcommand)]
pub enum EnumerateCmd {
    /// All functors between two categories (and whether an isomorphism
    /// exists).
    Functors { a: String, b: String },
    /// All natural transformations (or isomorphisms) between two
    /// parallel functors.
    Naturals {
        from: String,
        to: String,
        #[arg(long)]
        iso: bool,
    },
    /// All emergence homomorphisms in a given mode.
    Homs {
        a: String,
        b: String,
        #[arg(long)]
        strong: bool,
        #[arg(long)]
        semi: bool,
    },
}
