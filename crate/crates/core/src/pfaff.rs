//! Pfaff sequences `A, dA, A∧dA, dA∧dA, …`, Pfaff dimension, torsion and
//! parity data, and the Cartan topology generated by the nonvanishing
//! elements.

use thiserror::Error;

use crate::expr::{Context, ScalarExpr};
use crate::forms::{form_is_zero, DifferentialForm, FormError};
use crate::physics::Vec3;
use crate::sampling::{SampleBox, SampleError, TolerancePolicy, ZeroVerdict};
use crate::topology::{cartan_topology, ladder_label, FiniteTopology, TopologyError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PfaffError {
    #[error("Pfaff sequence needs a 1-form, got degree {0}")]
    NotAOneForm(usize),
    #[error("torsion current needs four variables (x, y, z, t), got {0}")]
    NotFourDimensional(usize),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

#[derive(Debug, Clone)]
pub struct PfaffElement {
    pub label: String,
    pub form: DifferentialForm,
    pub verdict: ZeroVerdict,
}

impl PfaffElement {
    pub fn degree(&self) -> usize {
        self.form.degree()
    }

    pub fn nonvanishing(&self) -> bool {
        !self.verdict.is_zero()
    }
}

/// Elements in ladder order; element `k` has degree `k + 1`. The list ends
/// with the first vanishing element or at degree N.
#[derive(Debug, Clone)]
pub struct PfaffSequence {
    pub context: Context,
    pub elements: Vec<PfaffElement>,
}

impl PfaffSequence {
    /// Number of leading nonvanishing elements.
    pub fn dimension(&self) -> usize {
        self.elements.iter().take_while(|e| e.nonvanishing()).count()
    }

    pub fn element(&self, label: &str) -> Option<&PfaffElement> {
        self.elements.iter().find(|e| e.label == label)
    }

    /// Whether `A∧dA` vanishes on the box (absent counts as vanishing).
    pub fn torsion_vanishes(&self) -> bool {
        self.elements.get(2).map_or(true, |h| !h.nonvanishing())
    }
}

/// Builds the ladder by alternately wedging with `A` and differentiating.
pub fn pfaff_sequence(a: &DifferentialForm, bx: &SampleBox, pol: &TolerancePolicy) -> Result<PfaffSequence, PfaffError> {
    if a.degree() != 1 {
        return Err(PfaffError::NotAOneForm(a.degree()));
    }
    let dim = a.dim();
    let mut elements = Vec::new();
    let mut current = a.clone();
    for k in 0..dim {
        if k > 0 {
            // element 2j+1 = d(element 2j), element 2j = A ∧ element 2j-1
            current = if k % 2 == 1 { elements_last(&elements).ext_d() } else { a.wedge(elements_last(&elements))? };
        }
        let verdict = form_is_zero(&current, bx, pol)?;
        let stop = verdict.is_zero();
        elements.push(PfaffElement { label: ladder_label(k), form: current.clone(), verdict });
        if stop {
            break;
        }
    }
    Ok(PfaffSequence { context: a.context().clone(), elements })
}

fn elements_last(elements: &[PfaffElement]) -> &DifferentialForm {
    &elements.last().expect("ladder has a previous element").form
}

/// Pointwise Pfaff dimension at one sample point; `None` where the point is
/// excluded or some coefficient cannot be evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct PointwiseDimension {
    pub point: Vec<f64>,
    pub dimension: Option<usize>,
}

pub fn pointwise_dimensions(seq: &PfaffSequence, bx: &SampleBox, pol: &TolerancePolicy) -> Vec<PointwiseDimension> {
    bx.points()
        .into_iter()
        .map(|point| {
            let dimension = if pol.is_excluded(&point) { None } else { dimension_at(seq, &point, pol) };
            PointwiseDimension { point, dimension }
        })
        .collect()
}

fn dimension_at(seq: &PfaffSequence, point: &[f64], pol: &TolerancePolicy) -> Option<usize> {
    let mut dim = 0;
    for element in &seq.elements {
        let mut nonzero = false;
        for (_, c) in element.form.terms() {
            let (v, s) = c.eval_with_scale(point).ok()?;
            if !v.is_finite() {
                return None;
            }
            nonzero |= !pol.accepts(v, s);
        }
        if !nonzero {
            break;
        }
        dim += 1;
    }
    Some(dim)
}

/// Four-current `[T, h]` of `A∧dA` on (x, y, z, t).
#[derive(Debug, Clone)]
pub struct TorsionCurrent {
    pub t: Vec3,
    pub h: ScalarExpr,
}

/// `[E×A + φB, A·B]` for `A = A·dr − φ dt`, with `B = curl A` and
/// `E = −∂A/∂t − grad φ`.
///
/// With the basis ordered `dx∧dy∧dz∧dt` these reproduce `A∧dA` as
/// `−T_x dy∧dz∧dt + T_y dx∧dz∧dt − T_z dx∧dy∧dt + h dx∧dy∧dz`,
/// i.e. `A∧dA = −i(T, h)(dx∧dy∧dz∧dt)`; see [`torsion_from_three_form`].
pub fn torsion_current(a: &DifferentialForm) -> Result<TorsionCurrent, PfaffError> {
    if a.dim() != 4 {
        return Err(PfaffError::NotFourDimensional(a.dim()));
    }
    if a.degree() != 1 {
        return Err(PfaffError::NotAOneForm(a.degree()));
    }
    let vec_a = Vec3::new([a.coefficient(&[0]), a.coefficient(&[1]), a.coefficient(&[2])]);
    let phi = -a.coefficient(&[3]);
    let b = vec_a.curl();
    let e = -(vec_a.dt()) - Vec3::grad(&phi);
    let t = e.cross(&vec_a) + b.scale(&phi);
    let h = vec_a.dot(&b);
    Ok(TorsionCurrent { t, h })
}

/// Reads `[T, h]` back off a 3-form on (x, y, z, t) with the sign map of
/// [`torsion_current`].
pub fn torsion_from_three_form(h3: &DifferentialForm) -> Result<TorsionCurrent, PfaffError> {
    if h3.dim() != 4 {
        return Err(PfaffError::NotFourDimensional(h3.dim()));
    }
    Ok(TorsionCurrent {
        t: Vec3::new([
            -h3.coefficient(&[1, 2, 3]),
            h3.coefficient(&[0, 2, 3]),
            -h3.coefficient(&[0, 1, 3]),
        ]),
        h: h3.coefficient(&[0, 1, 2]),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectedness {
    Connected,
    Disconnected,
}

#[derive(Debug, Clone)]
pub struct PfaffReport {
    pub sequence: PfaffSequence,
    pub dimension: usize,
    pub pointwise: Vec<PointwiseDimension>,
    pub torsion: Option<TorsionCurrent>,
    /// Coefficient of `dx∧dy∧dz∧dt` in `dA∧dA` when N = 4.
    pub parity: Option<ScalarExpr>,
    pub topology: Option<FiniteTopology>,
    pub connectedness: Connectedness,
}

/// Cartan topology on the nonvanishing elements of the sequence.
pub fn build_cartan_topology(seq: &PfaffSequence) -> Result<FiniteTopology, PfaffError> {
    Ok(cartan_topology(seq.dimension())?)
}

/// Sequence, dimension, pointwise samples, torsion/parity (N = 4), topology
/// and connectedness for a 1-form.
pub fn analyze(a: &DifferentialForm, bx: &SampleBox, pol: &TolerancePolicy) -> Result<PfaffReport, PfaffError> {
    let sequence = pfaff_sequence(a, bx, pol)?;
    let dimension = sequence.dimension();
    let pointwise = pointwise_dimensions(&sequence, bx, pol);
    let (torsion, parity) = if a.dim() == 4 {
        let f = a.ext_d();
        let k = f.wedge(&f)?;
        (Some(torsion_current(a)?), Some(k.coefficient(&[0, 1, 2, 3])))
    } else {
        (None, None)
    };
    let topology = if dimension > 0 { Some(build_cartan_topology(&sequence)?) } else { None };
    let connectedness = match &topology {
        Some(t) if !t.is_connected() => Connectedness::Disconnected,
        _ => Connectedness::Connected,
    };
    Ok(PfaffReport { sequence, dimension, pointwise, torsion, parity, topology, connectedness })
}
