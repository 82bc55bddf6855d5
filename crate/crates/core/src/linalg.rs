//! Small dense complex linear algebra: Hermitian eigensystems, unitary
//! propagators and gauge-smoothed eigenframes.
//!
//! Everything here targets dimensions of at most a few dozen. The Hermitian
//! eigensolver is a cyclic complex Jacobi iteration; it keeps relative
//! accuracy on tiny eigenvalue splittings, which matters close to level
//! crossings where two eigenvalues differ by 1e-12 of the spectral norm.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative eigenvalue spacing below which two levels are treated as one
/// degenerate block.
pub const DEGENERACY_RTOL: f64 = 1e-12;

/// Minimum principal overlap accepted between consecutive frames.
pub const MIN_FRAME_OVERLAP: f64 = 0.5;

const HERMITIAN_TOL: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-10;

/// Largest absolute entry of a matrix.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Deviation `max |U†U − I|` of a matrix from unitarity.
pub fn unitarity_error(m: &CMatrix) -> f64 {
    let n = m.ncols();
    max_abs(&(m.adjoint() * m - CMatrix::identity(n, n)))
}

/// A normalized state on a fixed basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector(CVector);

impl StateVector {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::Contract("state dimension must be at least 2".into()));
        }
        let norm2 = amplitudes.norm_squared();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::Contract(format!(
                "state norm² {norm2} deviates from 1"
            )));
        }
        Ok(Self(amplitudes))
    }

    /// Normalizes `amplitudes`; fails on the zero vector.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Input(
                "cannot normalize a zero or non-finite vector".into(),
            ));
        }
        Self::new(amplitudes / C64::new(norm, 0.0))
    }

    /// The `k`-th fixed basis state of a `dim`-level system.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dimension {dim}");
        let mut v = CVector::zeros(dim);
        v[k] = C64::new(1.0, 0.0);
        Self(v)
    }

    pub(crate) fn from_raw(amplitudes: CVector) -> Self {
        Self(amplitudes)
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// Populations `|c_k|²` on the fixed basis.
    pub fn populations(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.norm_sqr()).collect()
    }

    /// `⟨other|self⟩`.
    pub fn overlap(&self, other: &StateVector) -> C64 {
        other.0.dotc(&self.0)
    }
}

/// A Hermitian operator on a fixed basis (energy units, ħ = 1).
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator(CMatrix);

impl HermitianOperator {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::Contract(
                "operator must be a non-empty square matrix".into(),
            ));
        }
        let scale = max_abs(&entries).max(1.0);
        let asym = max_abs(&(&entries - entries.adjoint()));
        if asym > HERMITIAN_TOL * scale || entries.iter().any(|z| !z.is_finite()) {
            return Err(Error::Contract(format!(
                "operator is not Hermitian (max |H − H†| = {asym:.3e})"
            )));
        }
        Ok(Self(entries))
    }

    /// Builds a Hermitian operator from a real symmetric row-major table.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let m = CMatrix::from_fn(n, n, |i, j| {
            C64::new(rows[i].get(j).copied().unwrap_or(f64::NAN), 0.0)
        });
        Self::new(m)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim, dim))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self(CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    pub(crate) fn from_raw(entries: CMatrix) -> Self {
        Self(entries)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Scales by a real factor.
    pub fn scaled(&self, factor: f64) -> Self {
        Self(&self.0 * C64::new(factor, 0.0))
    }

    pub fn apply(&self, psi: &CVector) -> CVector {
        &self.0 * psi
    }
}

/// A unitary operator on a fixed basis.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryOperator(CMatrix);

impl UnitaryOperator {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::Contract("unitary must be square".into()));
        }
        let err = unitarity_error(&entries);
        if err > UNITARY_TOL {
            return Err(Error::Contract(format!(
                "matrix is not unitary (error {err:.3e})"
            )));
        }
        Ok(Self(entries))
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim))
    }

    pub(crate) fn from_raw(entries: CMatrix) -> Self {
        Self(entries)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// `self · other` (apply `other` first).
    pub fn then_after(&self, other: &UnitaryOperator) -> Self {
        Self(&self.0 * &other.0)
    }

    pub fn apply(&self, psi: &StateVector) -> StateVector {
        StateVector(&self.0 * &psi.0)
    }

    pub fn unitarity_error(&self) -> f64 {
        unitarity_error(&self.0)
    }
}

/// Ordered instantaneous eigenvectors of a Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenFrame {
    energies: Vec<f64>,
    vectors: CMatrix,
    gap: f64,
    blocks: Vec<(usize, usize)>,
}

impl EigenFrame {
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Eigenvectors as columns, ordered like [`EigenFrame::energies`].
    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    /// Smallest adjacent energy difference (infinite for one level).
    pub fn gap(&self) -> f64 {
        self.gap
    }

    /// Degenerate blocks as `(first index, size)`, covering every level.
    pub fn blocks(&self) -> &[(usize, usize)] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn is_degenerate(&self) -> bool {
        self.blocks.iter().any(|&(_, len)| len > 1)
    }

    pub fn vector(&self, level: usize) -> CVector {
        self.vectors.column(level).into_owned()
    }

    /// Populations of `psi` on each level.
    pub fn populations(&self, psi: &CVector) -> Vec<f64> {
        (0..self.dim())
            .map(|k| self.vectors.column(k).dotc(psi).norm_sqr())
            .collect()
    }

    /// Replaces the eigenvectors, keeping energies and block structure.
    pub(crate) fn with_vectors(&self, vectors: CMatrix) -> Self {
        Self {
            energies: self.energies.clone(),
            vectors,
            gap: self.gap,
            blocks: self.blocks.clone(),
        }
    }
}

/// Cyclic complex Jacobi diagonalization. Returns unsorted eigenvalues and
/// the matrix of eigenvectors (as columns).
fn jacobi_eigh(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.nrows();
    let mut a = h.clone();
    let mut v = CMatrix::identity(n, n);
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
    }
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if mag <= f64::MIN_POSITIVE
                    || mag <= f64::EPSILON * 0.5 * (app.abs() * aqq.abs()).sqrt()
                {
                    continue;
                }
                rotated = true;
                let phase = apq / mag;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let s_ph = phase * s;
                let s_ph_conj = s_ph.conj();
                // A ← A J
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - s_ph_conj * akq;
                    a[(k, q)] = s_ph * akp + akq * c;
                }
                // A ← J† A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - s_ph * aqk;
                    a[(q, k)] = s_ph_conj * apk + aqk * c;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(app - t * mag, 0.0);
                a[(q, q)] = C64::new(aqq + t * mag, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - s_ph_conj * vkq;
                    v[(k, q)] = s_ph * vkp + vkq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    ((0..n).map(|i| a[(i, i)].re).collect(), v)
}

/// Rotates the phase of `v` so its largest-modulus component is real positive.
fn fix_phase(v: &mut CVector) {
    let max = v.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    if max == 0.0 {
        return;
    }
    // first component within rounding of the maximum, for reproducibility
    let pivot = v
        .iter()
        .find(|z| z.norm() >= max * (1.0 - 1e-10))
        .copied()
        .unwrap();
    let phase = (pivot / pivot.norm()).conj();
    for z in v.iter_mut() {
        *z *= phase;
    }
}

fn degenerate_blocks(energies: &[f64], scale: f64) -> Vec<(usize, usize)> {
    let mut blocks = Vec::new();
    let mut start = 0;
    for i in 1..=energies.len() {
        let split =
            i == energies.len() || (energies[i] - energies[i - 1]) > DEGENERACY_RTOL * scale;
        if split {
            blocks.push((start, i - start));
            start = i;
        }
    }
    blocks
}

/// Diagonalizes a Hermitian operator. Energies ascend; each eigenvector has
/// its largest-modulus component real positive; degenerate levels are
/// grouped into contiguous blocks.
pub fn eigensystem(h: &HermitianOperator) -> EigenFrame {
    let (values, vecs) = jacobi_eigh(h.matrix());
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let energies: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = vecs.column(src).into_owned();
        fix_phase(&mut col);
        vectors.set_column(dst, &col);
    }
    let scale = energies.iter().fold(0.0_f64, |m, e| m.max(e.abs()));
    let gap = energies
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let blocks = degenerate_blocks(&energies, scale);
    EigenFrame {
        energies,
        vectors,
        gap,
        blocks,
    }
}

/// `exp(−i·h·dt)` via the eigendecomposition of `h`.
pub fn unitary_exp(h: &HermitianOperator, dt: f64) -> UnitaryOperator {
    let (values, v) = jacobi_eigh(h.matrix());
    let phases = CVector::from_iterator(
        values.len(),
        values.iter().map(|e| C64::from_polar(1.0, -e * dt)),
    );
    let mut vd = v.clone();
    for (j, mut col) in vd.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    UnitaryOperator(vd * v.adjoint())
}

/// Unitary factor `U` of the polar decomposition `M = U·P`.
///
/// Fails when `M` is (numerically) singular.
pub fn polar_unitary(m: &CMatrix) -> Result<CMatrix> {
    let gram = m.adjoint() * m;
    let (values, v) = jacobi_eigh(&gram);
    let smallest = values.iter().copied().fold(f64::INFINITY, f64::min);
    let largest = values.iter().copied().fold(0.0_f64, f64::max);
    if !(smallest > 1e-28 * largest.max(1e-300)) {
        return Err(Error::Contract(
            "polar decomposition of a singular matrix".into(),
        ));
    }
    let mut vd = v.clone();
    for (j, mut col) in vd.column_iter_mut().enumerate() {
        col *= C64::new(1.0 / values[j].sqrt(), 0.0);
    }
    Ok(m * (vd * v.adjoint()))
}

/// Smallest singular value of a square matrix.
pub fn min_singular_value(m: &CMatrix) -> f64 {
    let (values, _) = jacobi_eigh(&(m.adjoint() * m));
    values
        .into_iter()
        .fold(f64::INFINITY, f64::min)
        .max(0.0)
        .sqrt()
}

fn check_block_overlap(overlap: &CMatrix, index: usize) -> Result<()> {
    let principal = if overlap.nrows() == 1 {
        overlap[(0, 0)].norm()
    } else {
        min_singular_value(overlap)
    };
    if principal <= MIN_FRAME_OVERLAP {
        return Err(Error::Discontinuity {
            index,
            overlap: principal,
        });
    }
    Ok(())
}

/// Aligns `current`'s columns to `reference` block by block so that each
/// block overlap `reference† · current` is Hermitian positive definite.
fn align_to(reference: &CMatrix, current: &EigenFrame, index: usize) -> Result<CMatrix> {
    let mut out = current.vectors.clone();
    for &(start, len) in current.blocks() {
        let cur = current.vectors.columns(start, len).into_owned();
        let prev = reference.columns(start, len).into_owned();
        let overlap = cur.adjoint() * &prev;
        check_block_overlap(&overlap, index)?;
        let g = polar_unitary(&overlap)?;
        out.columns_mut(start, len).copy_from(&(cur * g));
    }
    Ok(out)
}

/// Fixes the eigenvector gauge along a sequence of frames sampled at nearby
/// parameter points.
///
/// After smoothing, every eigenvector's overlap with its predecessor is real
/// and non-negative, and degenerate blocks are rotated to best match the
/// preceding frame. A degenerate first frame is resolved against the second
/// one (the limit taken from the outgoing side).
pub fn smooth_frames(frames: &[EigenFrame]) -> Result<Vec<EigenFrame>> {
    let mut out: Vec<EigenFrame> = Vec::with_capacity(frames.len());
    let Some(first) = frames.first() else {
        return Ok(out);
    };
    let mut first = first.clone();
    if first.is_degenerate() && frames.len() > 1 {
        let next = &frames[1];
        let mut vecs = first.vectors.clone();
        for &(start, len) in first.blocks() {
            if len < 2 {
                continue;
            }
            let own = first.vectors.columns(start, len).into_owned();
            let target = next.vectors.columns(start, len).into_owned();
            let overlap = own.adjoint() * &target;
            check_block_overlap(&overlap, 0)?;
            vecs.columns_mut(start, len)
                .copy_from(&(own * polar_unitary(&overlap)?));
        }
        first = first.with_vectors(vecs);
    }
    out.push(first);
    for (k, frame) in frames.iter().enumerate().skip(1) {
        if frame.dim() != out[k - 1].dim() {
            return Err(Error::Input("frames of different dimension".into()));
        }
        let aligned = align_to(&out[k - 1].vectors, frame, k)?;
        out.push(frame.with_vectors(aligned));
    }
    Ok(out)
}
