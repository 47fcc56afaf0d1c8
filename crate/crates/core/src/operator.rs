//! Validated operators, density operators, subspace decompositions and the
//! block (pinching) machinery.

use std::collections::BTreeMap;
use std::ops::Range;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};

pub const HERMITIAN_TOL: f64 = 1e-10;
/// Trace deviations above this are rejected; smaller ones are renormalized.
pub const TRACE_TOL: f64 = 1e-6;
/// Eigenvalues below `-NEGATIVE_TOL` are rejected.
pub const NEGATIVE_TOL: f64 = 1e-6;
/// Negative eigenvalues above this magnitude are clipped and the state
/// renormalized. Anything smaller is floating-point noise and left alone.
pub const DUST_TOL: f64 = 1e-12;

/// A dense square complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    m: CMat,
}

impl Operator {
    pub fn new(m: CMat) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Operator { m })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: r.len(),
            });
        }
        let flat: Vec<Complex64> = rows.iter().flatten().copied().collect();
        Operator::new(CMat::from_row_slice(n, n, &flat))
    }

    pub fn identity(dim: usize) -> Self {
        Operator {
            m: linalg::identity(dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Operator {
            m: linalg::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    pub fn into_matrix(self) -> CMat {
        self.m
    }

    pub fn adjoint(&self) -> Operator {
        Operator {
            m: self.m.adjoint(),
        }
    }
}

/// A Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    op: Operator,
}

/// Validates `entries` as a density operator. Hermiticity violations above
/// 1e-10, trace deviations above 1e-6 and eigenvalues below -1e-6 are errors;
/// smaller defects are repaired.
pub fn make_density(entries: CMat) -> Result<DensityOperator> {
    let op = Operator::new(entries)?;
    let mut m = op.into_matrix();
    let herm = linalg::hermitian_deviation(&m);
    if herm > HERMITIAN_TOL {
        return Err(Error::NotHermitian(herm));
    }
    if herm > 0.0 {
        m = linalg::hermitian_part(&m);
    }
    let tr = linalg::trace(&m).re;
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(Error::TraceDeviation((tr - 1.0).abs()));
    }
    let (vals, vecs) = linalg::eigh(&m);
    let min = vals.last().copied().unwrap_or(0.0);
    if min < -NEGATIVE_TOL {
        return Err(Error::NegativeEigenvalue(min));
    }
    if min < -DUST_TOL {
        let clipped: Vec<f64> = vals.iter().map(|&x| x.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        let d: Vec<f64> = clipped.iter().map(|x| x / total).collect();
        m = &vecs * linalg::from_real_diagonal(&d) * vecs.adjoint();
        m = linalg::hermitian_part(&m);
    } else if (tr - 1.0).abs() > 1e-14 {
        m /= linalg::real(tr);
    }
    Ok(DensityOperator {
        op: Operator { m },
    })
}

impl DensityOperator {
    pub fn new(entries: CMat) -> Result<Self> {
        make_density(entries)
    }

    /// Wraps a matrix the caller knows to be a valid state (e.g. the output
    /// of a trace-preserving positive map applied to a validated state).
    pub(crate) fn from_trusted(m: CMat) -> Self {
        DensityOperator {
            op: Operator { m },
        }
    }

    pub fn pure(psi: &CVec) -> Result<Self> {
        let n = psi.norm();
        if !(n > 0.0) {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let v = psi / linalg::real(n);
        Ok(Self::from_trusted(linalg::projector_onto(&v)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_trusted(linalg::identity(dim) / linalg::real(dim as f64))
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        make_density(linalg::from_real_diagonal(probs))
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn matrix(&self) -> &CMat {
        self.op.matrix()
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn into_matrix(self) -> CMat {
        self.op.into_matrix()
    }

    /// Eigenvalues in non-increasing order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh(self.matrix())
    }

    /// Eigenvalues (non-increasing) and eigenvectors as columns.
    pub fn eigensystem(&self) -> (Vec<f64>, CMat) {
        linalg::eigh(self.matrix())
    }

    pub fn purity(&self) -> f64 {
        linalg::trace(&(self.matrix() * self.matrix())).re
    }

    /// `mu * self + (1 - mu) * other`.
    pub fn mix(&self, other: &DensityOperator, mu: f64) -> Result<DensityOperator> {
        check_dim(other.dim(), self.dim())?;
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::InvalidArgument(format!("mixing weight {mu}")));
        }
        Ok(Self::from_trusted(
            self.matrix() * linalg::real(mu) + other.matrix() * linalg::real(1.0 - mu),
        ))
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        Self::from_trusted(linalg::kron(self.matrix(), other.matrix()))
    }

    /// `u * rho * u^dagger` for a unitary `u`.
    pub fn conjugate(&self, u: &CMat) -> Result<DensityOperator> {
        check_dim(u.nrows(), self.dim())?;
        let dev = linalg::unitary_deviation(u);
        if dev > 1e-8 {
            return Err(Error::NotUnitary(dev));
        }
        make_density(linalg::hermitian_part(&(u * self.matrix() * u.adjoint())))
    }

    /// Traces out the second tensor factor (dimension `db`).
    pub fn partial_trace_second(&self, da: usize, db: usize) -> Result<DensityOperator> {
        check_dim(self.dim(), da * db)?;
        Ok(Self::from_trusted(linalg::partial_trace_second(
            self.matrix(),
            da,
            db,
        )))
    }

    pub fn partial_trace_first(&self, da: usize, db: usize) -> Result<DensityOperator> {
        check_dim(self.dim(), da * db)?;
        Ok(Self::from_trusted(linalg::partial_trace_first(
            self.matrix(),
            da,
            db,
        )))
    }
}

pub(crate) fn check_dim(found: usize, expected: usize) -> Result<()> {
    if found != expected {
        Err(Error::DimensionMismatch { expected, found })
    } else {
        Ok(())
    }
}

/// An ordered partition of the computational basis into contiguous ranges of
/// sizes `dims[0], dims[1], ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Decomposition {
    dims: Vec<usize>,
}

impl Decomposition {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::InvalidDecomposition(format!(
                "need at least two subspaces, got {}",
                dims.len()
            )));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidDecomposition(
                "every subspace must be at least one-dimensional".into(),
            ));
        }
        Ok(Decomposition { dims })
    }

    pub fn bipartite(n1: usize, n2: usize) -> Result<Self> {
        Self::new(vec![n1, n2])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn ranges(&self) -> Vec<Range<usize>> {
        let mut start = 0;
        self.dims
            .iter()
            .map(|&d| {
                let r = start..start + d;
                start += d;
                r
            })
            .collect()
    }

    pub fn range(&self, k: usize) -> Result<Range<usize>> {
        self.check_index(k)?;
        let start: usize = self.dims[..k].iter().sum();
        Ok(start..start + self.dims[k])
    }

    /// Which block a basis index belongs to.
    pub fn block_of(&self, index: usize) -> Option<usize> {
        self.ranges().iter().position(|r| r.contains(&index))
    }

    pub fn check_index(&self, k: usize) -> Result<()> {
        if k >= self.dims.len() {
            Err(Error::IndexOutOfRange {
                index: k,
                len: self.dims.len(),
            })
        } else {
            Ok(())
        }
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        check_dim(dim, self.total())
    }

    pub fn require_bipartite(&self) -> Result<()> {
        if self.dims.len() != 2 {
            Err(Error::NotBipartite(self.dims.len()))
        } else {
            Ok(())
        }
    }

    pub fn projector(&self, k: usize) -> Result<CMat> {
        let r = self.range(k)?;
        let mut p = linalg::zeros(self.total(), self.total());
        for i in r {
            p[(i, i)] = linalg::ONE;
        }
        Ok(p)
    }

    pub fn projectors(&self) -> Vec<CMat> {
        (0..self.len())
            .map(|k| self.projector(k).expect("index in range"))
            .collect()
    }

    /// Decomposition `self ⊗ 1_a` of `H ⊗ H_a` (first factor major).
    pub fn extend_by_ancilla(&self, ancilla_dim: usize) -> Result<Decomposition> {
        if ancilla_dim == 0 {
            return Err(Error::InvalidArgument("ancilla dimension 0".into()));
        }
        Decomposition::new(self.dims.iter().map(|d| d * ancilla_dim).collect())
    }
}

impl Decomposition {
    /// Product decomposition `{L_i ⊗ L'_j}` (i major) of `H ⊗ H'`. Its blocks
    /// are not contiguous in the product basis, so the permutation `U` that
    /// makes them contiguous is returned as well: use `U (ρ⊗σ) U†`.
    pub fn tensor(&self, other: &Decomposition) -> (CMat, Decomposition) {
        let (n1, n2) = (self.total(), other.total());
        let mut order = Vec::with_capacity(n1 * n2);
        let mut dims = Vec::with_capacity(self.len() * other.len());
        for r1 in self.ranges() {
            for r2 in other.ranges() {
                dims.push(r1.len() * r2.len());
                for a in r1.clone() {
                    for b in r2.clone() {
                        order.push(a * n2 + b);
                    }
                }
            }
        }
        let mut u = linalg::zeros(n1 * n2, n1 * n2);
        for (row, &col) in order.iter().enumerate() {
            u[(row, col)] = linalg::ONE;
        }
        (u, Decomposition { dims })
    }
}

/// Removes every off-diagonal block: `Σ_k P_k ρ P_k`.
pub fn pinch(rho: &DensityOperator, l: &Decomposition) -> Result<DensityOperator> {
    l.check_dim(rho.dim())?;
    Ok(DensityOperator::from_trusted(pinch_matrix(rho.matrix(), l)))
}

pub(crate) fn pinch_matrix(m: &CMat, l: &Decomposition) -> CMat {
    let mut out = linalg::zeros(m.nrows(), m.ncols());
    for r in l.ranges() {
        for i in r.clone() {
            for j in r.clone() {
                out[(i, j)] = m[(i, j)];
            }
        }
    }
    out
}

/// Pinching with respect to an arbitrary family of orthogonal projectors.
pub fn pinch_with_projectors(m: &CMat, projectors: &[CMat]) -> CMat {
    let mut out = linalg::zeros(m.nrows(), m.ncols());
    for p in projectors {
        out += p * m * p;
    }
    out
}

/// `P_i ρ P_j` embedded in the ambient space (zero outside the block).
pub fn block(rho: &DensityOperator, l: &Decomposition, i: usize, j: usize) -> Result<Operator> {
    l.check_dim(rho.dim())?;
    Ok(Operator {
        m: block_matrix(rho.matrix(), l, i, j)?,
    })
}

pub(crate) fn block_matrix(m: &CMat, l: &Decomposition, i: usize, j: usize) -> Result<CMat> {
    let ri = l.range(i)?;
    let rj = l.range(j)?;
    let mut out = linalg::zeros(m.nrows(), m.ncols());
    for a in ri {
        for b in rj.clone() {
            out[(a, b)] = m[(a, b)];
        }
    }
    Ok(out)
}

/// The `(i, j)` block as a compact `N_i x N_j` matrix.
pub fn compact_block(m: &CMat, l: &Decomposition, i: usize, j: usize) -> Result<CMat> {
    let ri = l.range(i)?;
    let rj = l.range(j)?;
    Ok(m.view((ri.start, rj.start), (ri.len(), rj.len())).into_owned())
}

/// Non-increasing singular values of a square operator (length = dim).
pub fn singular_values(op: &Operator) -> Vec<f64> {
    linalg::singular_values(op.matrix())
}

/// `ρ = Σ_k p_k σ_k + Σ_{k≠k'} √(p_k p_k') √σ_k D^(kk') √σ_k'`.
#[derive(Debug, Clone)]
pub struct BlockForm {
    pub probs: Vec<f64>,
    /// Normalized diagonal blocks embedded in the ambient space; the zero
    /// matrix where `p_k = 0`.
    pub diag_states: Vec<CMat>,
    pub off_diag: BTreeMap<(usize, usize), CMat>,
}

impl BlockForm {
    pub fn reassemble(&self) -> CMat {
        let n = self.diag_states[0].nrows();
        let mut out = linalg::zeros(n, n);
        let roots: Vec<CMat> = self.diag_states.iter().map(linalg::sqrt_psd).collect();
        for (k, s) in self.diag_states.iter().enumerate() {
            out += s * linalg::real(self.probs[k]);
        }
        for (&(k, kp), d) in &self.off_diag {
            let w = (self.probs[k] * self.probs[kp]).sqrt();
            out += &roots[k] * d * &roots[kp] * linalg::real(w);
        }
        out
    }

    /// Largest singular value over all off-diagonal `D` operators.
    pub fn max_contraction(&self) -> f64 {
        self.off_diag
            .values()
            .map(linalg::operator_norm)
            .fold(0.0, f64::max)
    }
}

/// Probabilities below this are treated as empty blocks.
const EMPTY_BLOCK: f64 = 1e-15;

pub fn block_form(rho: &DensityOperator, l: &Decomposition) -> Result<BlockForm> {
    l.check_dim(rho.dim())?;
    let m = rho.matrix();
    let k = l.len();
    let mut probs = Vec::with_capacity(k);
    let mut diag_states = Vec::with_capacity(k);
    let mut inv_roots = Vec::with_capacity(k);
    for i in 0..k {
        let b = block_matrix(m, l, i, i)?;
        let p = linalg::trace(&b).re.max(0.0);
        probs.push(p);
        if p > EMPTY_BLOCK {
            let s = b / linalg::real(p);
            inv_roots.push(linalg::inv_sqrt_psd(&s));
            diag_states.push(s);
        } else {
            inv_roots.push(linalg::zeros(m.nrows(), m.ncols()));
            diag_states.push(linalg::zeros(m.nrows(), m.ncols()));
        }
    }
    let mut off_diag = BTreeMap::new();
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let w = (probs[i] * probs[j]).sqrt();
            let d = if w > EMPTY_BLOCK {
                &inv_roots[i] * block_matrix(m, l, i, j)? * &inv_roots[j] / linalg::real(w)
            } else {
                linalg::zeros(m.nrows(), m.ncols())
            };
            off_diag.insert((i, j), d);
        }
    }
    Ok(BlockForm {
        probs,
        diag_states,
        off_diag,
    })
}

/// A pure-state ensemble `(λ_l, |ψ_l⟩)`.
#[derive(Debug, Clone)]
pub struct PureStateEnsemble {
    pub weights: Vec<f64>,
    pub vectors: Vec<CVec>,
}

impl PureStateEnsemble {
    /// Builds an ensemble from unnormalized vectors `ψ̃_l` (weights are the
    /// squared norms). Zero vectors are dropped.
    pub fn from_unnormalized(vectors: &[CVec]) -> Self {
        let mut weights = Vec::new();
        let mut out = Vec::new();
        for v in vectors {
            let n2 = v.norm_squared();
            if n2 > 0.0 {
                weights.push(n2);
                out.push(v / linalg::real(n2.sqrt()));
            }
        }
        PureStateEnsemble {
            weights,
            vectors: out,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn density(&self) -> CMat {
        let n = self.vectors.first().map(|v| v.len()).unwrap_or(0);
        let mut out = linalg::zeros(n, n);
        for (w, v) in self.weights.iter().zip(&self.vectors) {
            out += linalg::projector_onto(v) * linalg::real(*w);
        }
        out
    }

    /// Product ensemble `(λ_l μ_m, |ψ_l⟩|φ_m⟩)`.
    pub fn tensor(&self, other: &PureStateEnsemble) -> PureStateEnsemble {
        let mut weights = Vec::with_capacity(self.len() * other.len());
        let mut vectors = Vec::with_capacity(self.len() * other.len());
        for (w1, v1) in self.weights.iter().zip(&self.vectors) {
            for (w2, v2) in other.weights.iter().zip(&other.vectors) {
                weights.push(w1 * w2);
                vectors.push(linalg::kron_vec(v1, v2));
            }
        }
        PureStateEnsemble { weights, vectors }
    }

    /// `(λ_l, U|ψ_l⟩)`.
    pub fn transform(&self, u: &CMat) -> PureStateEnsemble {
        PureStateEnsemble {
            weights: self.weights.clone(),
            vectors: self.vectors.iter().map(|v| u * v).collect(),
        }
    }

    /// Mixture `μ·self + (1−μ)·other` as one ensemble.
    pub fn mix(&self, other: &PureStateEnsemble, mu: f64) -> PureStateEnsemble {
        let mut weights: Vec<f64> = self.weights.iter().map(|w| w * mu).collect();
        weights.extend(other.weights.iter().map(|w| w * (1.0 - mu)));
        let mut vectors = self.vectors.clone();
        vectors.extend(other.vectors.iter().cloned());
        PureStateEnsemble { weights, vectors }
    }

    /// Checks that the ensemble reproduces `target` within 1e-8.
    pub fn reconstructs(&self, target: &DensityOperator) -> bool {
        let wsum: f64 = self.weights.iter().sum();
        (wsum - 1.0).abs() < 1e-10
            && self.vectors.iter().all(|v| (v.norm() - 1.0).abs() < 1e-10)
            && linalg::max_abs_diff(&self.density(), target.matrix()) < 1e-8
    }
}

/// Rotates `rho` into a basis in which each projector's range is a contiguous
/// block, in the order given. Returns `U ρ U†` and the block sizes.
pub fn align_basis(
    rho: &DensityOperator,
    projectors: &[Operator],
) -> Result<(DensityOperator, Decomposition)> {
    let (u, l) = aligning_unitary(projectors)?;
    check_dim(rho.dim(), u.nrows())?;
    let m = linalg::hermitian_part(&(&u * rho.matrix() * u.adjoint()));
    Ok((make_density(m)?, l))
}

/// The unitary `U` whose rows are orthonormal bases of the projector ranges,
/// stacked in order.
pub fn aligning_unitary(projectors: &[Operator]) -> Result<(CMat, Decomposition)> {
    let n = projectors
        .first()
        .map(|p| p.dim())
        .ok_or(Error::IncompleteResolution)?;
    let mut basis: Vec<CVec> = Vec::new();
    let mut dims = Vec::new();
    for (k, p) in projectors.iter().enumerate() {
        check_dim(p.dim(), n)?;
        let m = p.matrix();
        if linalg::hermitian_deviation(m) > HERMITIAN_TOL
            || linalg::max_abs_diff(&(m * m), m) > HERMITIAN_TOL
        {
            return Err(Error::NotAProjector(k));
        }
        let (vals, vecs) = linalg::eigh(m);
        let rank = vals.iter().filter(|&&v| v > 0.5).count();
        for j in 0..rank {
            basis.push(canonical_phase(vecs.column(j).into_owned()));
        }
        dims.push(rank);
    }
    for i in 0..projectors.len() {
        for j in i + 1..projectors.len() {
            let prod = projectors[i].matrix() * projectors[j].matrix();
            if linalg::max_abs(&prod) > HERMITIAN_TOL {
                return Err(Error::NotOrthogonal(i, j));
            }
        }
    }
    let mut sum = linalg::zeros(n, n);
    for p in projectors {
        sum += p.matrix();
    }
    if linalg::max_abs_diff(&sum, &linalg::identity(n)) > HERMITIAN_TOL || basis.len() != n {
        return Err(Error::IncompleteResolution);
    }
    let w = CMat::from_columns(&basis);
    Ok((w.adjoint(), Decomposition::new(dims)?))
}

/// Fixes the phase so the largest-magnitude component is real and positive.
fn canonical_phase(v: CVec) -> CVec {
    let (idx, _) = v
        .iter()
        .enumerate()
        .fold((0, -1.0), |acc, (i, z)| {
            if z.norm() > acc.1 + 1e-12 {
                (i, z.norm())
            } else {
                acc
            }
        });
    let z = v[idx];
    if z.norm() == 0.0 {
        return v;
    }
    let phase = z.conj() / linalg::real(z.norm());
    v * phase
}

#[cfg(test)]
mod tests {
    #[test]
    fn tensor_decomposition_aligns_product_blocks() {
        use super::*;
        let l1 = Decomposition::new(vec![1, 2]).unwrap();
        let l2 = Decomposition::bipartite(1, 1).unwrap();
        let (u, l) = l1.tensor(&l2);
        assert_eq!(l.dims(), &[1, 1, 2, 2]);
        let a = DensityOperator::diagonal(&[0.2, 0.3, 0.5]).unwrap();
        let b = DensityOperator::diagonal(&[0.6, 0.4]).unwrap();
        let ab = a.tensor(&b).conjugate(&u).unwrap();
        let diag: Vec<f64> = (0..6).map(|i| ab.matrix()[(i, i)].re).collect();
        let expected = [0.12, 0.08, 0.18, 0.3, 0.12, 0.2];
        for (x, y) in diag.iter().zip(expected) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    use super::*;
    use crate::linalg::{c, real};
    use approx::assert_abs_diff_eq;

    fn qubit(cre: f64) -> DensityOperator {
        make_density(CMat::from_row_slice(
            2,
            2,
            &[real(0.5), real(cre / 2.0), real(cre / 2.0), real(0.5)],
        ))
        .unwrap()
    }

    #[test]
    fn make_density_examples() {
        let mm = make_density(linalg::identity(2) * real(0.5)).unwrap();
        assert_eq!(mm, DensityOperator::maximally_mixed(2));

        let plus = make_density(CMat::from_element(2, 2, real(0.5))).unwrap();
        assert_abs_diff_eq!(plus.purity(), 1.0, epsilon = 1e-14);

        let r = qubit(0.6);
        let ev = r.eigenvalues();
        assert_abs_diff_eq!(ev[0], 0.8, epsilon = 1e-14);
        assert_abs_diff_eq!(ev[1], 0.2, epsilon = 1e-14);
    }

    #[test]
    fn make_density_errors() {
        assert!(matches!(
            make_density(CMat::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
        let mut m = linalg::identity(2) * real(0.5);
        m[(0, 1)] = real(0.1);
        assert!(matches!(make_density(m), Err(Error::NotHermitian(_))));
        assert!(matches!(
            make_density(linalg::identity(2)),
            Err(Error::TraceDeviation(_))
        ));
        assert!(matches!(
            make_density(linalg::from_real_diagonal(&[1.1, -0.1])),
            Err(Error::NegativeEigenvalue(_))
        ));
        let mut nan = linalg::identity(2) * real(0.5);
        nan[(0, 0)] = c(f64::NAN, 0.0);
        assert!(matches!(make_density(nan), Err(Error::NonFinite)));
    }

    #[test]
    fn small_defects_are_repaired() {
        let d = make_density(linalg::from_real_diagonal(&[1.0 + 1e-9, -1e-9])).unwrap();
        let ev = d.eigenvalues();
        assert!(ev[1] >= 0.0);
        assert_abs_diff_eq!(ev.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
        let t = make_density(linalg::from_real_diagonal(&[0.5, 0.5 + 1e-8])).unwrap();
        assert_abs_diff_eq!(linalg::trace(t.matrix()).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn pinch_examples() {
        let l = Decomposition::bipartite(1, 1).unwrap();
        let plus = qubit(1.0);
        assert_eq!(pinch(&plus, &l).unwrap(), DensityOperator::maximally_mixed(2));
        let diag = DensityOperator::diagonal(&[0.3, 0.7]).unwrap();
        assert_eq!(pinch(&diag, &l).unwrap(), diag);
        let p = pinch(&qubit(0.6), &l).unwrap();
        assert_eq!(p.matrix()[(0, 1)], real(0.0));
        assert_eq!(p.matrix()[(0, 0)], real(0.5));
    }

    #[test]
    fn block_examples() {
        let l = Decomposition::bipartite(1, 1).unwrap();
        let r = qubit(0.6);
        let b = block(&r, &l, 0, 1).unwrap();
        assert_eq!(b.matrix()[(0, 1)], real(0.3));
        assert_eq!(b.matrix()[(1, 0)], real(0.0));
        let pb = block(&pinch(&r, &l).unwrap(), &l, 0, 1).unwrap();
        assert_eq!(linalg::max_abs(pb.matrix()), 0.0);
        assert!(matches!(
            block(&r, &l, 0, 2),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            pinch(&r, &Decomposition::bipartite(2, 1).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn block_form_qubit() {
        let l = Decomposition::bipartite(1, 1).unwrap();
        let f = block_form(&qubit(0.6), &l).unwrap();
        assert_abs_diff_eq!(f.probs[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(f.probs[1], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(f.off_diag[&(0, 1)][(0, 1)].re, 0.6, epsilon = 1e-14);
        let diag = block_form(&DensityOperator::diagonal(&[0.3, 0.7]).unwrap(), &l).unwrap();
        assert_eq!(diag.max_contraction(), 0.0);
    }

    #[test]
    fn block_form_pure_balanced_has_unit_singular_value() {
        let psi = CVec::from_vec(vec![real(0.5), c(0.0, 0.5), real(0.5), c(0.5, 0.0)]);
        let rho = DensityOperator::pure(&psi).unwrap();
        let l = Decomposition::bipartite(2, 2).unwrap();
        let f = block_form(&rho, &l).unwrap();
        assert_abs_diff_eq!(linalg::operator_norm(&f.off_diag[&(0, 1)]), 1.0, epsilon = 1e-10);
        assert!(linalg::max_abs_diff(&f.reassemble(), rho.matrix()) < 1e-10);
    }

    #[test]
    fn singular_values_examples() {
        let d = Operator::new(linalg::from_real_diagonal(&[3.0, -4.0])).unwrap();
        assert_eq!(singular_values(&d), vec![4.0, 3.0]);
        let u = Operator::new(CMat::from_row_slice(
            2,
            2,
            &[real(0.0), c(0.0, 1.0), real(1.0), real(0.0)],
        ))
        .unwrap();
        for s in singular_values(&u) {
            assert_abs_diff_eq!(s, 1.0, epsilon = 1e-14);
        }
        let uvec = CVec::from_vec(vec![real(0.6), c(0.0, 0.8), real(0.0)]);
        let vvec = CVec::from_vec(vec![real(0.0), real(1.0), real(0.0)]);
        let r1 = Operator::new(linalg::outer(&uvec, &vvec) * c(1.5, 2.0)).unwrap();
        let s = singular_values(&r1);
        assert_abs_diff_eq!(s[0], 2.5, epsilon = 1e-14);
        assert_abs_diff_eq!(s[1], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn align_basis_identity_and_swap() {
        let r = make_density(CMat::from_row_slice(
            2,
            2,
            &[real(0.7), c(0.1, 0.2), c(0.1, -0.2), real(0.3)],
        ))
        .unwrap();
        let l = Decomposition::bipartite(1, 1).unwrap();
        let ps: Vec<Operator> = l.projectors().into_iter().map(|p| Operator::new(p).unwrap()).collect();
        let (same, dims) = align_basis(&r, &ps).unwrap();
        assert_eq!(dims.dims(), &[1, 1]);
        assert!(linalg::max_abs_diff(same.matrix(), r.matrix()) < 1e-15);

        let swapped: Vec<Operator> = ps.iter().rev().cloned().collect();
        let (sw, _) = align_basis(&r, &swapped).unwrap();
        assert_abs_diff_eq!(sw.matrix()[(0, 0)].re, 0.3, epsilon = 1e-15);
        assert!((sw.matrix()[(0, 1)] - r.matrix()[(1, 0)]).norm() < 1e-15);
    }

    #[test]
    fn align_basis_errors() {
        let r = DensityOperator::maximally_mixed(2);
        let half = Operator::new(linalg::identity(2) * real(0.5)).unwrap();
        assert!(matches!(
            align_basis(&r, &[half.clone(), half]),
            Err(Error::NotAProjector(0))
        ));
        let p0 = Operator::new(linalg::from_real_diagonal(&[1.0, 0.0])).unwrap();
        let id = Operator::identity(2);
        assert!(matches!(
            align_basis(&r, &[p0.clone(), id]),
            Err(Error::NotOrthogonal(0, 1))
        ));
        assert!(matches!(
            align_basis(&r, &[p0.clone(), Operator::zeros(2)]),
            Err(Error::IncompleteResolution)
        ));
    }
}
