//! Exterior calculus on symbolic differential forms: the Pfaff sequence and
//! its finite Cartan topology, electromagnetic and fluid fixtures, and period
//! integrals over closed chains.

pub mod expr;
pub mod forms;
pub mod parse;
pub mod periods;
pub mod pfaff;
pub mod physics;
pub mod quadrature;
pub mod random;
pub mod sampling;
pub mod topology;

pub use expr::{Context, EvalError, Exponent, Func, Node, ScalarExpr};
pub use forms::{form_is_zero, Basis, DifferentialForm, FormError, SmoothMap, VectorField};
pub use parse::{parse_expr, ParseError};
pub use periods::{
    braid_integral, circulate, clebsch_circulation, clebsch_form, cofactor_adjoint_current, gauss_linking, holder_current,
    Chain3, ClosedCurve, PeriodError, SignatureSpec,
};
pub use pfaff::{
    analyze, build_cartan_topology, pfaff_sequence, torsion_current, Connectedness, PfaffElement, PfaffError, PfaffReport,
    PfaffSequence, TorsionCurrent,
};
pub use physics::{
    charge_current, classify_process, continuity_anomaly, em_fields, euler_residual, helicity_diagnostics, helmholtz_residual,
    master_residuals, maxwell_faraday_residual, ns_parity, ns_residual, EMPotentials, FluidState, PhysicsError, ProcessClass,
    Vec3,
};
pub use quadrature::{QuadratureResult, QuadratureSpec, Rule};
pub use sampling::{is_zero, SampleBox, SampleError, TolerancePolicy, Witness, ZeroVerdict};
pub use topology::{cartan_topology, map_continuous, FiniteTopology, PointSet, TopologyError};
