//! Geometric transformations of (possibly degenerate) levels.
//!
//! A path-ordered exponential of the connection is discretized as an ordered
//! product of polar-projected overlap matrices between consecutive frames.
//! With frames `V_k` (columns spanning the level subspace at sample `k`),
//!
//! ```text
//! U = M_{N−2} ⋯ M_1 M_0,     M_k = polar(V_{k+1}† V_k)
//! ```
//!
//! maps coefficients in the first frame to coefficients of the parallel
//! transported state in the last frame. Replacing every `V_k` by `V_k g_k`
//! turns the result into `g_last† U g_first`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{
    eigensystem, max_abs, min_singular_value, polar_unitary, unitarity_error, CMatrix,
    HermitianOperator, UnitaryOperator, MIN_FRAME_OVERLAP,
};

const ORTHONORMAL_TOL: f64 = 1e-10;
const JUNCTION_TOL: f64 = 1e-6;
const CLOSURE_TOL: f64 = 1e-6;

/// Orthonormal basis of one level (or a degenerate group of levels).
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceFrame {
    vectors: CMatrix,
    energy: f64,
}

impl SubspaceFrame {
    pub fn new(vectors: CMatrix, energy: f64) -> Result<Self> {
        if vectors.ncols() == 0 || vectors.nrows() < vectors.ncols() {
            return Err(Error::Input(format!(
                "a {}×{} frame cannot hold an orthonormal basis",
                vectors.nrows(),
                vectors.ncols()
            )));
        }
        let gram = vectors.adjoint() * &vectors;
        let err = max_abs(&(gram - CMatrix::identity(vectors.ncols(), vectors.ncols())));
        if err > ORTHONORMAL_TOL {
            return Err(Error::Contract(format!(
                "frame columns not orthonormal (error {err:.2e})"
            )));
        }
        Ok(Self { vectors, energy })
    }

    /// Columns `levels` of an eigenframe; the energy is their mean.
    pub fn from_levels(frame: &crate::linalg::EigenFrame, levels: &[usize]) -> Result<Self> {
        if levels.is_empty() || levels.iter().any(|&l| l >= frame.dim()) {
            return Err(Error::Input(format!(
                "level selection {levels:?} out of range"
            )));
        }
        let vectors = CMatrix::from_fn(frame.dim(), levels.len(), |i, j| {
            frame.vectors()[(i, levels[j])]
        });
        let energy = levels.iter().map(|&l| frame.energies()[l]).sum::<f64>() / levels.len() as f64;
        Ok(Self { vectors, energy })
    }

    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn dim_total(&self) -> usize {
        self.vectors.nrows()
    }

    /// Degeneracy `p`.
    pub fn p(&self) -> usize {
        self.vectors.ncols()
    }

    /// Same subspace, basis changed to `V·g`.
    pub fn regauged(&self, g: &CMatrix) -> Result<Self> {
        Self::new(&self.vectors * g, self.energy)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Incoming,
    Outgoing,
}

/// Direction along which a crossing point is approached.
///
/// The sampled ray is `point + ε·tangent` for [`Side::Outgoing`] and
/// `point − ε·tangent` for [`Side::Incoming`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproachDirection {
    tangent: Vec<f64>,
    side: Side,
}

impl ApproachDirection {
    /// Normalizes `tangent` to unit length.
    pub fn new(tangent: Vec<f64>, side: Side) -> Result<Self> {
        let norm = tangent.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Input(
                "approach tangent must be a finite nonzero vector".into(),
            ));
        }
        Ok(Self {
            tangent: tangent.iter().map(|x| x / norm).collect(),
            side,
        })
    }

    pub fn tangent(&self) -> &[f64] {
        &self.tangent
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Point at distance `eps` from `origin` on the approach ray.
    pub fn ray_point(&self, origin: &[f64], eps: f64) -> Vec<f64> {
        let s = match self.side {
            Side::Outgoing => eps,
            Side::Incoming => -eps,
        };
        origin
            .iter()
            .zip(&self.tangent)
            .map(|(o, t)| o + s * t)
            .collect()
    }
}

/// Endpoints and approach directions of one transported segment.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SegmentMeta {
    pub label: String,
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    pub start_direction: Option<ApproachDirection>,
    pub end_direction: Option<ApproachDirection>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HolonomyResult {
    pub geometric: UnitaryOperator,
    /// `−∫ E dt`
    pub dynamical_phase: f64,
    pub segments: Vec<SegmentMeta>,
    pub initial_frame: SubspaceFrame,
    pub final_frame: SubspaceFrame,
}

impl HolonomyResult {
    /// The transformation in the fixed basis, `V_final · U · V_initial†`.
    pub fn lab_operator(&self) -> CMatrix {
        self.final_frame.vectors()
            * self.geometric.matrix()
            * self.initial_frame.vectors().adjoint()
    }

    /// The inverse transformation, traversing the same frames backward.
    pub fn reversed(&self) -> Self {
        let segments: Vec<SegmentMeta> = self
            .segments
            .iter()
            .rev()
            .map(|m| SegmentMeta {
                label: m.label.clone(),
                start: m.end.clone(),
                end: m.start.clone(),
                start_direction: m.end_direction.clone(),
                end_direction: m.start_direction.clone(),
            })
            .collect();
        Self {
            geometric: self.geometric.adjoint(),
            dynamical_phase: -self.dynamical_phase,
            segments,
            initial_frame: self.final_frame.clone(),
            final_frame: self.initial_frame.clone(),
        }
    }

    /// JSON with complex entries as `[re, im]` pairs.
    pub fn to_json(&self) -> Value {
        json!({
            "geometric": complex_matrix_json(self.geometric.matrix()),
            "dynamical_phase": self.dynamical_phase,
            "p": self.geometric.dim(),
            "segments": self.segments,
            "initial_frame": complex_matrix_json(self.initial_frame.vectors()),
            "final_frame": complex_matrix_json(self.final_frame.vectors()),
            "lab_operator": complex_matrix_json(&self.lab_operator()),
        })
    }
}

pub fn complex_matrix_json(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| {
                Value::Array(
                    (0..m.ncols())
                        .map(|j| json!([m[(i, j)].re, m[(i, j)].im]))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn check_compatible(frames: &[SubspaceFrame]) -> Result<()> {
    let first = frames
        .first()
        .ok_or_else(|| Error::Input("at least one frame required".into()))?;
    if frames
        .iter()
        .any(|f| f.p() != first.p() || f.dim_total() != first.dim_total())
    {
        return Err(Error::Input(
            "frames differ in dimension or degeneracy".into(),
        ));
    }
    Ok(())
}

fn principal_overlap(o: &CMatrix) -> f64 {
    if o.nrows() == 1 {
        o[(0, 0)].norm()
    } else {
        min_singular_value(o)
    }
}

/// Ordered product of polar-projected overlaps between consecutive frames.
pub fn wilczek_zee(frames: &[SubspaceFrame]) -> Result<UnitaryOperator> {
    check_compatible(frames)?;
    let p = frames[0].p();
    let mut u = CMatrix::identity(p, p);
    for (k, w) in frames.windows(2).enumerate() {
        let o = w[1].vectors().adjoint() * w[0].vectors();
        let principal = principal_overlap(&o);
        if principal <= MIN_FRAME_OVERLAP {
            return Err(Error::Discontinuity {
                index: k + 1,
                overlap: principal,
            });
        }
        u = polar_unitary(&o)? * u;
    }
    Ok(UnitaryOperator::from_raw(u))
}

/// Holonomy of a closed loop expressed in the first frame's basis; its
/// spectrum does not depend on the gauge of any frame.
pub fn closed_loop_holonomy(frames: &[SubspaceFrame]) -> Result<UnitaryOperator> {
    let u = wilczek_zee(frames)?;
    let first = &frames[0];
    let last = frames.last().expect("checked non-empty");
    let closure = first.vectors().adjoint() * last.vectors();
    if min_singular_value(&closure) < 1.0 - CLOSURE_TOL {
        return Err(Error::Input(
            "path is not closed: end frame spans a different subspace".into(),
        ));
    }
    Ok(UnitaryOperator::from_raw(
        polar_unitary(&closure)? * u.matrix(),
    ))
}

/// Berry phase of a non-degenerate level around a closed loop, in `(−π, π]`.
pub fn berry_phase(frames: &[SubspaceFrame]) -> Result<f64> {
    check_compatible(frames)?;
    if frames[0].p() != 1 {
        return Err(Error::Input(
            "Berry phase needs a non-degenerate level (p = 1)".into(),
        ));
    }
    let u = closed_loop_holonomy(frames)?;
    Ok(u.matrix()[(0, 0)].arg())
}

/// Transports a level along sampled frames, accumulating the dynamical phase
/// `−∫E dt` by the trapezoid rule.
pub fn transport_segment(frames: &[SubspaceFrame], times: &[f64]) -> Result<HolonomyResult> {
    if frames.len() != times.len() {
        return Err(Error::Input("frames and times differ in length".into()));
    }
    let geometric = wilczek_zee(frames)?;
    let dynamical_phase = -frames
        .windows(2)
        .zip(times.windows(2))
        .map(|(f, t)| 0.5 * (f[0].energy() + f[1].energy()) * (t[1] - t[0]))
        .sum::<f64>();
    Ok(HolonomyResult {
        geometric,
        dynamical_phase,
        segments: vec![SegmentMeta {
            start: vec![times[0]],
            end: vec![*times.last().expect("checked non-empty")],
            ..SegmentMeta::default()
        }],
        initial_frame: frames[0].clone(),
        final_frame: frames.last().expect("checked non-empty").clone(),
    })
}

/// Multiplies segment transformations in path order, inserting the overlap
/// of adjacent end and start frames at each junction.
pub fn compose_segments(segments: &[HolonomyResult]) -> Result<HolonomyResult> {
    let first = segments
        .first()
        .ok_or_else(|| Error::Input("no segments to compose".into()))?;
    let mut total = first.clone();
    for (k, next) in segments.iter().enumerate().skip(1) {
        let a = &total.final_frame;
        let b = &next.initial_frame;
        if a.dim_total() != b.dim_total() || a.p() != b.p() {
            return Err(Error::Input(format!(
                "segment {k} frame dimension differs from its predecessor; supply an embedding"
            )));
        }
        let junction = b.vectors().adjoint() * a.vectors();
        if unitarity_error(&junction) > JUNCTION_TOL {
            return Err(Error::Input(format!(
                "segment {k} does not start in the subspace its predecessor ended in"
            )));
        }
        let joined = next.geometric.matrix() * polar_unitary(&junction)? * total.geometric.matrix();
        total = HolonomyResult {
            geometric: UnitaryOperator::from_raw(joined),
            dynamical_phase: total.dynamical_phase + next.dynamical_phase,
            segments: total
                .segments
                .iter()
                .chain(&next.segments)
                .cloned()
                .collect(),
            initial_frame: total.initial_frame,
            final_frame: next.final_frame.clone(),
        };
    }
    Ok(total)
}

/// Which eigenvectors form the tracked level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum LevelSelector {
    /// Positions in the ascending spectrum.
    Indices(Vec<usize>),
    /// The `count` levels closest to `energy`.
    NearestEnergy { energy: f64, count: usize },
}

impl LevelSelector {
    pub fn select(&self, energies: &[f64]) -> Result<Vec<usize>> {
        let mut levels = match self {
            LevelSelector::Indices(ix) => ix.clone(),
            LevelSelector::NearestEnergy { energy, count } => {
                let mut order: Vec<usize> = (0..energies.len()).collect();
                order.sort_by(|&i, &j| {
                    (energies[i] - energy)
                        .abs()
                        .total_cmp(&(energies[j] - energy).abs())
                });
                order.truncate(*count);
                order
            }
        };
        levels.sort_unstable();
        if levels.is_empty() || levels.iter().any(|&l| l >= energies.len()) {
            return Err(Error::Input(format!(
                "level selection {levels:?} out of range"
            )));
        }
        Ok(levels)
    }
}

/// Limiting frame together with its extrapolation residual.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionalLimit {
    pub frame: SubspaceFrame,
    pub residual: f64,
}

/// Distances from the crossing at which frames are sampled.
pub const LIMIT_EPSILONS: [f64; 4] = [1e-3, 1e-4, 1e-5, 1e-6];
pub const LIMIT_RESIDUAL_TOL: f64 = 1e-4;

/// Limit of the selected level's frame as the crossing point is approached
/// along `dir`, by Richardson extrapolation in the distance `ε`.
pub fn directional_limit_frame(
    family: &dyn Fn(&[f64]) -> HermitianOperator,
    crossing_point: &[f64],
    dir: &ApproachDirection,
    selector: &LevelSelector,
) -> Result<DirectionalLimit> {
    if crossing_point.len() != dir.tangent().len() {
        return Err(Error::Input(
            "approach tangent and crossing point differ in dimension".into(),
        ));
    }
    let mut frames: Vec<SubspaceFrame> = Vec::with_capacity(LIMIT_EPSILONS.len());
    for (k, &eps) in LIMIT_EPSILONS.iter().enumerate() {
        let ef = eigensystem(&family(&dir.ray_point(crossing_point, eps)));
        let levels = selector.select(ef.energies())?;
        let mut f = SubspaceFrame::from_levels(&ef, &levels)?;
        if let Some(prev) = frames.last() {
            if f.p() != prev.p() {
                return Err(Error::Input(
                    "selection size changed along the approach".into(),
                ));
            }
            let o = f.vectors().adjoint() * prev.vectors();
            let principal = principal_overlap(&o);
            if principal <= MIN_FRAME_OVERLAP {
                return Err(Error::Discontinuity {
                    index: k,
                    overlap: principal,
                });
            }
            f = f.regauged(&polar_unitary(&o)?)?;
        }
        frames.push(f);
    }

    let (rows, cols) = (frames[0].dim_total(), frames[0].p());
    let mut limit = CMatrix::zeros(rows, cols);
    let mut residual: f64 = 0.0;
    for i in 0..rows {
        for j in 0..cols {
            let ys: Vec<C64> = frames.iter().map(|f| f.vectors()[(i, j)]).collect();
            let full = neville_at_zero(&LIMIT_EPSILONS, &ys);
            let partial = neville_at_zero(&LIMIT_EPSILONS[1..], &ys[1..]);
            residual = residual.max((full - partial).norm());
            limit[(i, j)] = full;
        }
    }
    let energies: Vec<C64> = frames.iter().map(|f| C64::new(f.energy(), 0.0)).collect();
    let energy = neville_at_zero(&LIMIT_EPSILONS, &energies).re;
    if !(residual <= LIMIT_RESIDUAL_TOL) {
        return Err(Error::NoDirectionalLimit { residual });
    }
    let vectors = polar_unitary(&limit)?;
    Ok(DirectionalLimit {
        frame: SubspaceFrame::new(vectors, energy)?,
        residual,
    })
}

/// Value at `x = 0` of the polynomial through `(xs, ys)`.
fn neville_at_zero(xs: &[f64], ys: &[C64]) -> C64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for m in 1..n {
        for i in 0..n - m {
            let (xi, xj) = (xs[i], xs[i + m]);
            p[i] = (p[i + 1] * xi - p[i] * xj) / (xi - xj);
        }
    }
    p[0]
}

/// Frames of one spin level around the cone of polar angle `theta0`,
/// `φ = 2πk/(n−1)`, `k = 0..n`, field strength `b`.
pub fn spin_cone_frames(theta0: f64, b: f64, level: usize, n: usize) -> Result<Vec<SubspaceFrame>> {
    if n < 2 || level > 1 {
        return Err(Error::Input(
            "need at least two samples and level 0 or 1".into(),
        ));
    }
    (0..n)
        .map(|k| {
            let phi = std::f64::consts::TAU * k as f64 / (n - 1) as f64;
            let h = crate::adiabaticity::spin_hamiltonian(&crate::path::ParameterPoint::new(
                b, theta0, phi,
            ));
            SubspaceFrame::from_levels(&eigensystem(&h), &[level])
        })
        .collect()
}

/// Frames of the selected level at each parameter point.
pub fn frames_along(
    family: &dyn Fn(&[f64]) -> HermitianOperator,
    points: &[Vec<f64>],
    selector: &LevelSelector,
) -> Result<Vec<SubspaceFrame>> {
    points
        .iter()
        .map(|x| {
            let ef = eigensystem(&family(x));
            SubspaceFrame::from_levels(&ef, &selector.select(ef.energies())?)
        })
        .collect()
}
