//! Finite-category computation engine: categories with explicit
//! composition tables, constructs whose objects carry finite operation
//! tables, generalized underlying functors, the emergence comparison
//! algebra, constructive universal objects, and abstract block
//! diagrams over finite sets — all verified by exhaustive enumeration
//! at desk scale.

pub mod abd;
pub mod battery;
pub mod construct;
pub mod emergence;
pub mod fincat;
pub mod finset;
pub mod universal;
pub mod report;

pub use fincat::{
    enumerate_functors, enumerate_naturals, find_isomorphism, functor_properties, hom_functor,
    inverse_functor, product_category, product_functor, tupling_functor, CategoryBuilder,
    FinCategory, Functor, MorId, Morphism, NaturalTransformation, ObjId, ProductCategory,
    PropertyFlags,
};
pub use abd::{
    abd_to_emergence, apply_set_functor, canonical_form, check_set_functor, coordinate_support,
    identity_set_functor, is_factorable, refine_single_output, resolve_to_abd,
    AbstractBlockDiagram, AbdBuilder, ApplyVerdict, Component, Port, PortId, Resolution,
    ResolveNotices, SetFunctorTable, SetFunctorVerdict, SignatureHints,
};
pub use construct::{
    check_operation_properties, standard_underlying, Construct, GsuFunctor, GuFunctor,
    OperationTable, PropertyTag, SignatureSlot, SlotKind, StructureSignature, UnderlyingMode,
};
pub use emergence::{
    check_induces, check_iso, check_morphism, check_sub_emergence, classify, compose_graded,
    enumerate_homomorphisms, extremal_status, find_representation, graded_arrow,
    materialize_underlying, opposite_emergence, Emergence, EmergenceRef, ExtremalReport,
    GradedArrow, GradedKind, IsoMode, IsoVerdict, MorphismMode, OppositeEmergence,
    OppositeGuMode, Representation, SemiEmergence, SmallThin,
};
pub use finset::{
    materialize_finset, pair_label, tuple_label, FinFunction, FinSet, FinSetFragment, FinSetMode,
};
pub use universal::{
    check_strong_equalizer, coproduct_emergence, equalizer_emergence, essential_uniqueness,
    internal_structure_report, is_epi_battery, limit_of_diagram, product_emergence,
    pullback_category, pullback_emergence, pullback_semi, regular_mono_fixture, stabilizer,
    verify_universal,
    CoproductEmergenceResult, DiagramEmergence, EqualizerResult, InternalReport, LimitResult,
    MediatorRecord, ProductEmergenceResult, PullbackEmergenceResult, SinkEmergence,
    SourceEmergence, UniversalCandidate, UniversalVerdict,
};
pub use report::{Error, Result, ValidationReport, Verdict, Violation, DEFAULT_BUDGET};
