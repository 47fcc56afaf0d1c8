//! Second quantization: each subspace becomes a mode register with a vacuum
//! level, so superposition between subspaces becomes entanglement between
//! registers.
//!
//! Occupation basis is row-major over `[N₁+1, …, N_K+1]`; level 0 of every
//! factor is the vacuum.

use rand::Rng;

use crate::entropy::{matrix_entropy, matrix_relative_entropy};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::measures::{self, FormationConfig};
use crate::operator::{check_dim, Decomposition, DensityOperator};
use crate::random;

/// Largest lifted dimension built unless the caller raises the cap.
pub const DEFAULT_TARGET_CAP: usize = 4096;

#[derive(Debug, Clone)]
pub struct LiftMap {
    source: Decomposition,
    target_dims: Vec<usize>,
    /// `Π(N_k+1) × ΣN_k` isometry.
    matrix: CMat,
}

pub fn build_lift(l: &Decomposition) -> Result<LiftMap> {
    build_lift_with_cap(l, DEFAULT_TARGET_CAP)
}

pub fn build_lift_with_cap(l: &Decomposition, cap: usize) -> Result<LiftMap> {
    let target_dims: Vec<usize> = l.dims().iter().map(|n| n + 1).collect();
    let mut dim: usize = 1;
    for d in &target_dims {
        dim = dim.saturating_mul(*d);
    }
    if dim > cap {
        return Err(Error::TargetTooLarge { dim, cap });
    }
    let mut matrix = linalg::zeros(dim, l.total());
    for (k, r) in l.ranges().into_iter().enumerate() {
        for (local, col) in r.enumerate() {
            let mut occ = vec![0; l.len()];
            occ[k] = local + 1;
            matrix[(occupation_index(&target_dims, &occ), col)] = linalg::ONE;
        }
    }
    Ok(LiftMap {
        source: l.clone(),
        target_dims,
        matrix,
    })
}

/// Row-major index of an occupation tuple.
pub fn occupation_index(dims: &[usize], occ: &[usize]) -> usize {
    dims.iter().zip(occ).fold(0, |acc, (d, o)| acc * d + o)
}

impl LiftMap {
    pub fn source(&self) -> &Decomposition {
        &self.source
    }

    pub fn target_dims(&self) -> &[usize] {
        &self.target_dims
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    /// `M U` for a source unitary; with block-local `U` this is another
    /// valid choice of lift.
    pub fn compose_source_unitary(&self, u: &CMat) -> Result<LiftMap> {
        check_dim(u.nrows(), self.source.total())?;
        Ok(LiftMap {
            source: self.source.clone(),
            target_dims: self.target_dims.clone(),
            matrix: &self.matrix * u,
        })
    }

    /// `M A M†`.
    pub fn lift_operator(&self, a: &CMat) -> Result<CMat> {
        check_dim(a.nrows(), self.source.total())?;
        Ok(&self.matrix * a * self.matrix.adjoint())
    }

    /// `M† X M`.
    pub fn restrict_operator(&self, x: &CMat) -> Result<CMat> {
        check_dim(x.nrows(), self.target_dim())?;
        Ok(self.matrix.adjoint() * x * &self.matrix)
    }

    /// Projector `MM†` onto the single-particle sector.
    pub fn single_particle_projector(&self) -> CMat {
        &self.matrix * self.matrix.adjoint()
    }

    /// Projectors `P̄_k` onto "particle in register `k`, vacuum elsewhere".
    pub fn sector_projectors(&self) -> Vec<CMat> {
        self.source
            .projectors()
            .iter()
            .map(|p| &self.matrix * p * self.matrix.adjoint())
            .collect()
    }

    /// The bipartite tensor split and the paired subspaces `𝓛_k⁽¹⁾⊗𝓛_k⁽²⁾`
    /// of a two-register lift.
    pub fn paired(&self) -> Result<(BipartiteSplit, PairedDecomposition)> {
        self.source.require_bipartite()?;
        let (n1, n2) = (self.source.dims()[0], self.source.dims()[1]);
        let split = BipartiteSplit::new(n1 + 1, n2 + 1)?;
        let pairs = PairedDecomposition::new(
            vec![((1..=n1).collect(), vec![0]), (vec![0], (1..=n2).collect())],
            split,
        )?;
        Ok((split, pairs))
    }
}

pub fn lift_state(m: &LiftMap, rho: &DensityOperator) -> Result<DensityOperator> {
    Ok(DensityOperator::from_trusted(m.lift_operator(rho.matrix())?))
}

/// Tensor factorization `𝓗 = 𝓗_A ⊗ 𝓗_B`, first factor major.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BipartiteSplit {
    pub dim_a: usize,
    pub dim_b: usize,
}

impl BipartiteSplit {
    pub fn new(dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::InvalidArgument("split factors must be positive".into()));
        }
        Ok(BipartiteSplit { dim_a, dim_b })
    }

    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn index(&self, a: usize, b: usize) -> usize {
        a * self.dim_b + b
    }
}

/// Pairs of subspaces `(𝓛_k⁽¹⁾, 𝓛_k⁽²⁾)` given as basis-index sets of the two
/// factors, mutually orthogonal within each factor. They need not cover the
/// factors, nor be contiguous.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairedDecomposition {
    pairs: Vec<(Vec<usize>, Vec<usize>)>,
}

impl PairedDecomposition {
    pub fn new(pairs: Vec<(Vec<usize>, Vec<usize>)>, split: BipartiteSplit) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidDecomposition("no pairs".into()));
        }
        let mut used_a = vec![false; split.dim_a];
        let mut used_b = vec![false; split.dim_b];
        for (a, b) in &pairs {
            if a.is_empty() || b.is_empty() {
                return Err(Error::InvalidDecomposition("empty pair member".into()));
            }
            for (set, used) in [(a, &mut used_a), (b, &mut used_b)] {
                for &i in set {
                    if i >= used.len() {
                        return Err(Error::IndexOutOfRange { index: i, len: used.len() });
                    }
                    if used[i] {
                        return Err(Error::InvalidDecomposition(format!(
                            "factor index {i} used by two pairs"
                        )));
                    }
                    used[i] = true;
                }
            }
        }
        Ok(PairedDecomposition { pairs })
    }

    pub fn pairs(&self) -> &[(Vec<usize>, Vec<usize>)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Global indices spanning `𝓛_k⁽¹⁾⊗𝓛_k⁽²⁾`, ascending.
    pub fn indices(&self, k: usize, split: BipartiteSplit) -> Vec<usize> {
        let (a, b) = &self.pairs[k];
        let mut out: Vec<usize> = a
            .iter()
            .flat_map(|&i| b.iter().map(move |&j| split.index(i, j)))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn has_one_dim_members(&self) -> bool {
        self.pairs.iter().all(|(a, b)| a.len() == 1 || b.len() == 1)
    }

    /// Permutation matrix `U` and contiguous decomposition such that `UρU†`
    /// lists the pair subspaces first (in order) and the rest of the space as
    /// one final block.
    pub fn to_contiguous(&self, split: BipartiteSplit) -> Result<(CMat, Decomposition)> {
        let n = split.dim();
        let mut order = Vec::with_capacity(n);
        let mut dims = Vec::new();
        let mut seen = vec![false; n];
        for k in 0..self.len() {
            let idx = self.indices(k, split);
            dims.push(idx.len());
            for i in idx {
                seen[i] = true;
                order.push(i);
            }
        }
        let rest: Vec<usize> = (0..n).filter(|&i| !seen[i]).collect();
        if !rest.is_empty() {
            dims.push(rest.len());
            order.extend(rest);
        }
        let mut u = linalg::zeros(n, n);
        for (row, &col) in order.iter().enumerate() {
            u[(row, col)] = linalg::ONE;
        }
        Ok((u, Decomposition::new(dims)?))
    }

    fn pinch(&self, m: &CMat, split: BipartiteSplit) -> CMat {
        let mut out = linalg::zeros(m.nrows(), m.ncols());
        for k in 0..self.len() {
            let idx = self.indices(k, split);
            for &i in &idx {
                for &j in &idx {
                    out[(i, j)] = m[(i, j)];
                }
            }
        }
        out
    }

    /// Trace of `ρ` outside `⊕_k 𝓛_k⁽¹⁾⊗𝓛_k⁽²⁾`.
    fn leak(&self, m: &CMat, split: BipartiteSplit) -> f64 {
        let mut inside = vec![false; split.dim()];
        for k in 0..self.len() {
            for i in self.indices(k, split) {
                inside[i] = true;
            }
        }
        (0..split.dim()).filter(|&i| !inside[i]).map(|i| m[(i, i)].re.abs()).sum()
    }
}

/// Largest trace a state may have outside the paired subspaces.
pub const LEAK_TOL: f64 = 1e-10;

fn check_supported(sigma: &DensityOperator, split: BipartiteSplit, pairs: &PairedDecomposition) -> Result<()> {
    check_dim(sigma.dim(), split.dim())?;
    let leak = pairs.leak(sigma.matrix(), split);
    if leak > LEAK_TOL {
        return Err(Error::UnsupportedStructure(format!(
            "state has weight {leak:.3e} outside the paired subspaces"
        )));
    }
    Ok(())
}

/// Functional applied to the lifted state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InducedEntanglement {
    /// `S(σ || Π̄(σ))` with `Π̄` the pinching onto the register sectors.
    RelativeEntropySurrogate,
    /// Two-qubit entanglement of formation (requires dims `[1, 1]`).
    FormationTwoQubit,
}

pub fn induced_measure(m: &LiftMap, e: InducedEntanglement, rho: &DensityOperator) -> Result<f64> {
    let lifted = lift_state(m, rho)?;
    match e {
        InducedEntanglement::RelativeEntropySurrogate => {
            let pinched = sector_pinch(m, lifted.matrix());
            Ok(matrix_relative_entropy(lifted.matrix(), &pinched))
        }
        InducedEntanglement::FormationTwoQubit => {
            if m.target_dims() != [2, 2] {
                return Err(Error::UnsupportedStructure(
                    "two-qubit formation needs decomposition dims [1, 1]".into(),
                ));
            }
            wootters_ef(&lifted)
        }
    }
}

/// `E(MρM†)` for an arbitrary functional on the lifted space.
pub fn induced_measure_with<F>(m: &LiftMap, rho: &DensityOperator, e: F) -> Result<f64>
where
    F: FnOnce(&DensityOperator) -> Result<f64>,
{
    e(&lift_state(m, rho)?)
}

/// Pinching of a lifted operator onto the register sectors `P̄_k`.
pub fn sector_pinch(m: &LiftMap, x: &CMat) -> CMat {
    let mut out = linalg::zeros(x.nrows(), x.ncols());
    for p in m.sector_projectors() {
        out += &p * x * &p;
    }
    out
}

/// The pinched state `Σ_k P̄_kσP̄_k`, separable when every pair has a
/// one-dimensional member (each block is then a product).
pub fn candidate_min_separable(
    sigma: &DensityOperator,
    split: BipartiteSplit,
    pairs: &PairedDecomposition,
) -> Result<DensityOperator> {
    if !pairs.has_one_dim_members() {
        return Err(Error::UnsupportedStructure(
            "every pair needs a one-dimensional member".into(),
        ));
    }
    check_supported(sigma, split, pairs)?;
    let p = pairs.pinch(sigma.matrix(), split);
    let t = linalg::trace(&p).re;
    Ok(DensityOperator::from_trusted(p / linalg::real(t)))
}

#[derive(Debug, Clone)]
pub struct FirstOrderReport {
    pub samples: usize,
    /// Smallest estimated directional derivative.
    pub min_derivative: f64,
    /// Largest `|1 − f'|`.
    pub max_deviation: f64,
    pub violations: usize,
    /// Index of the first violating sample.
    pub first_violation: Option<usize>,
}

impl FirstOrderReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

pub const DERIVATIVE_TOL: f64 = 1e-4;
pub const DEVIATION_TOL: f64 = 1e-3;

/// Richardson-combined forward difference of `x ↦ S(σ||(1−x)ρ* + xρ)` at 0.
pub fn directional_derivative(sigma: &CMat, rho_star: &CMat, rho: &CMat) -> f64 {
    let f = |x: f64| {
        let mix = rho_star * linalg::real(1.0 - x) + rho * linalg::real(x);
        matrix_relative_entropy(sigma, &mix)
    };
    let f0 = f(0.0);
    let (h1, h2) = (1e-5, 1e-6);
    let d1 = (f(h1) - f0) / h1;
    let d2 = (f(h2) - f0) / h2;
    (h1 * d2 - h2 * d1) / (h1 - h2)
}

/// Samples random pure product states `ρ` and checks that moving `ρ*` towards
/// each of them does not decrease `S(σ||·)` to first order.
pub fn first_order_min_check(
    sigma: &DensityOperator,
    rho_star: &DensityOperator,
    split: BipartiteSplit,
    samples: usize,
    seed: u64,
) -> Result<FirstOrderReport> {
    check_dim(sigma.dim(), split.dim())?;
    check_dim(rho_star.dim(), split.dim())?;
    let (vals, vecs) = rho_star.eigensystem();
    let top = vals.first().copied().unwrap_or(0.0);
    let mut kernel_weight = 0.0;
    for (j, v) in vals.iter().enumerate() {
        if *v <= 1e-12 * top.max(1.0) {
            let e = vecs.column(j);
            kernel_weight += (e.adjoint() * sigma.matrix() * e)[(0, 0)].re;
        }
    }
    if kernel_weight > LEAK_TOL {
        return Err(Error::SupportFailure(format!(
            "sigma has weight {kernel_weight:.3e} outside the support of the candidate"
        )));
    }
    let mut rng = random::rng(seed, 0);
    let mut rep = FirstOrderReport {
        samples,
        min_derivative: f64::INFINITY,
        max_deviation: 0.0,
        violations: 0,
        first_violation: None,
    };
    for s in 0..samples {
        let a = random::random_vector(&mut rng, split.dim_a);
        let b = random::random_vector(&mut rng, split.dim_b);
        let prod = linalg::projector_onto(&linalg::kron_vec(&a, &b));
        let d = directional_derivative(sigma.matrix(), rho_star.matrix(), &prod);
        rep.min_derivative = rep.min_derivative.min(d);
        rep.max_deviation = rep.max_deviation.max((1.0 - d).abs());
        if d < -DERIVATIVE_TOL || (1.0 - d).abs() > 1.0 + DEVIATION_TOL {
            rep.violations += 1;
            rep.first_violation.get_or_insert(s);
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone)]
pub struct IdentityReport {
    /// `S(σ||ρ*)` via the relative-entropy routine.
    pub relative_entropy: f64,
    /// `S(Π̄σ) − S(σ)` over the paired decomposition.
    pub a_s: f64,
}

impl IdentityReport {
    pub fn holds(&self, tol: f64) -> bool {
        (self.relative_entropy - self.a_s).abs() <= tol
    }
}

pub fn es_decomposition_identity(
    sigma: &DensityOperator,
    split: BipartiteSplit,
    pairs: &PairedDecomposition,
) -> Result<IdentityReport> {
    let star = candidate_min_separable(sigma, split, pairs)?;
    let relative_entropy = matrix_relative_entropy(sigma.matrix(), star.matrix());
    let a_s = (matrix_entropy(star.matrix()) - matrix_entropy(sigma.matrix())).max(0.0);
    Ok(IdentityReport { relative_entropy, a_s })
}

fn sigma_y_sigma_y() -> CMat {
    // σ_y ⊗ σ_y
    let mut m = linalg::zeros(4, 4);
    m[(0, 3)] = linalg::real(-1.0);
    m[(1, 2)] = linalg::ONE;
    m[(2, 1)] = linalg::ONE;
    m[(3, 0)] = linalg::real(-1.0);
    m
}

/// Two-qubit concurrence `max(0, s₁ − s₂ − s₃ − s₄)`, with `s_i` the singular
/// values of `τ_ij = w_iᵀ(σ_y⊗σ_y)w_j` over the subnormalized eigenvectors
/// `w_i = √λ_i v_i`. Eigenvalues below `1e-13·λ_max` are rounding dust and are
/// dropped rather than square-rooted.
pub fn concurrence(rho: &DensityOperator) -> Result<f64> {
    check_dim(rho.dim(), 4)?;
    let yy = sigma_y_sigma_y();
    let (vals, vecs) = rho.eigensystem();
    let top = vals.first().copied().unwrap_or(0.0);
    let w: Vec<CVec> = vals
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > 1e-13 * top)
        .map(|(i, v)| vecs.column(i) * linalg::real(v.sqrt()))
        .collect();
    let tau = CMat::from_fn(w.len(), w.len(), |i, j| (w[i].transpose() * &yy * &w[j])[(0, 0)]);
    let mut s = linalg::svd(&tau).s;
    s.resize(4, 0.0);
    Ok((s[0] - s[1] - s[2] - s[3]).max(0.0))
}

/// Entanglement of formation `h((1+√(1−C²))/2)` in nats.
pub fn wootters_ef(rho: &DensityOperator) -> Result<f64> {
    let c = concurrence(rho)?.min(1.0);
    let x = (1.0 + (1.0 - c * c).sqrt()) / 2.0;
    Ok(linalg::shannon(&[x, 1.0 - x]))
}

/// Entanglement entropy of a pure bipartite state.
pub fn entanglement_entropy(psi: &CVec, split: BipartiteSplit) -> Result<f64> {
    check_dim(psi.len(), split.dim())?;
    let p = linalg::projector_onto(&(psi / linalg::real(psi.norm())));
    Ok(matrix_entropy(&linalg::partial_trace_second(&p, split.dim_a, split.dim_b)))
}

/// Entanglement of formation where it is computable exactly: pure states,
/// product blocks, and two qubits.
pub fn exact_ef(rho: &DensityOperator, split: BipartiteSplit) -> Result<f64> {
    check_dim(rho.dim(), split.dim())?;
    let (vals, vecs) = rho.eigensystem();
    if vals.get(1).copied().unwrap_or(0.0) <= 1e-12 {
        return entanglement_entropy(&vecs.column(0).into_owned(), split);
    }
    if split.dim_a == 2 && split.dim_b == 2 {
        return wootters_ef(rho);
    }
    Err(Error::UnsupportedStructure(
        "entanglement of formation only for pure states or two qubits".into(),
    ))
}

#[derive(Debug, Clone)]
pub struct SuperadditivityReport {
    pub e_f: f64,
    pub probs: Vec<f64>,
    pub block_e_f: Vec<f64>,
    pub a_f: f64,
    /// Every pair has a one-dimensional member, so equality is expected.
    pub one_dim_pairs: bool,
}

impl SuperadditivityReport {
    pub fn rhs(&self) -> f64 {
        self.probs.iter().zip(&self.block_e_f).map(|(p, e)| p * e).sum::<f64>() + self.a_f
    }

    pub fn inequality_holds(&self, tol: f64) -> bool {
        self.e_f >= self.rhs() - tol
    }

    pub fn equality_holds(&self, tol: f64) -> bool {
        (self.e_f - self.a_f).abs() <= tol
    }
}

/// Compares `E_f(ρ)` with `Σ_k p_k E_f(σ_k) + A_f(ρ)`, `A_f` taken over the
/// paired subspaces.
pub fn ef_superadditivity_check(
    rho: &DensityOperator,
    split: BipartiteSplit,
    pairs: &PairedDecomposition,
    cfg: &FormationConfig,
) -> Result<SuperadditivityReport> {
    check_supported(rho, split, pairs)?;
    let e_f = exact_ef(rho, split)?;
    let mut probs = Vec::with_capacity(pairs.len());
    let mut block_e_f = Vec::with_capacity(pairs.len());
    for k in 0..pairs.len() {
        let idx = pairs.indices(k, split);
        let mut block = linalg::zeros(split.dim(), split.dim());
        for &i in &idx {
            for &j in &idx {
                block[(i, j)] = rho.matrix()[(i, j)];
            }
        }
        let p = linalg::trace(&block).re;
        probs.push(p);
        if p <= 1e-14 {
            block_e_f.push(0.0);
            continue;
        }
        let (a, b) = &pairs.pairs()[k];
        if a.len() == 1 || b.len() == 1 {
            block_e_f.push(0.0);
        } else {
            let s = DensityOperator::from_trusted(block / linalg::real(p));
            block_e_f.push(exact_ef(&s, split)?);
        }
    }
    let (u, l) = pairs.to_contiguous(split)?;
    let aligned = rho.conjugate(&u)?;
    let a_f = measures::a_f(&aligned, &l, cfg)?.value;
    Ok(SuperadditivityReport {
        e_f,
        probs,
        block_e_f,
        a_f,
        one_dim_pairs: pairs.has_one_dim_members(),
    })
}

/// Random state supported on the paired subspaces.
pub fn random_paired_state<R: Rng + ?Sized>(
    rng: &mut R,
    split: BipartiteSplit,
    pairs: &PairedDecomposition,
) -> DensityOperator {
    let idx: Vec<usize> = (0..pairs.len()).flat_map(|k| pairs.indices(k, split)).collect();
    let s = random::random_state(rng, idx.len());
    let mut m = linalg::zeros(split.dim(), split.dim());
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            m[(i, j)] = s.matrix()[(a, b)];
        }
    }
    DensityOperator::from_trusted(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real;
    use crate::measures::a_s;
    use approx::assert_abs_diff_eq;

    fn qubit(c: f64) -> DensityOperator {
        DensityOperator::new(CMat::from_row_slice(
            2,
            2,
            &[real(0.5), real(c / 2.0), real(c / 2.0), real(0.5)],
        ))
        .unwrap()
    }

    fn l11() -> Decomposition {
        Decomposition::bipartite(1, 1).unwrap()
    }

    #[test]
    fn lift_of_two_modes() {
        let m = build_lift(&l11()).unwrap();
        assert_eq!(m.target_dims(), [2, 2]);
        let mut expected = linalg::zeros(4, 2);
        expected[(2, 0)] = linalg::ONE; // |1̃0̃⟩⟨1|
        expected[(1, 1)] = linalg::ONE; // |0̃1̃⟩⟨2|
        assert_eq!(m.matrix(), &expected);
        assert!(linalg::max_abs_diff(&(m.matrix().adjoint() * m.matrix()), &linalg::identity(2)) < 1e-12);
    }

    #[test]
    fn lift_of_three_dims() {
        let m = build_lift(&Decomposition::bipartite(2, 1).unwrap()).unwrap();
        assert_eq!(m.target_dim(), 6);
        let g = m.matrix().adjoint() * m.matrix();
        assert!(linalg::max_abs_diff(&g, &linalg::identity(3)) < 1e-12);
        let p = m.single_particle_projector();
        assert!(linalg::max_abs_diff(&(&p * &p), &p) < 1e-12);
        assert_abs_diff_eq!(linalg::trace(&p).re, 3.0);
    }

    #[test]
    fn lift_cap() {
        let l = Decomposition::new(vec![3; 6]).unwrap();
        assert_eq!(build_lift(&l).unwrap().target_dim(), 4096);
        let l = Decomposition::new(vec![4; 6]).unwrap();
        assert!(matches!(build_lift(&l), Err(Error::TargetTooLarge { dim: 15625, cap: 4096 })));
    }

    #[test]
    fn lifted_states() {
        let m = build_lift(&l11()).unwrap();
        let (a, b) = (0.6, 0.8);
        let psi = CVec::from_vec(vec![real(a), real(b)]);
        let lifted = lift_state(&m, &DensityOperator::pure(&psi).unwrap()).unwrap();
        assert_abs_diff_eq!(lifted.matrix()[(2, 1)].re, a * b, epsilon = 1e-15);
        assert_abs_diff_eq!(wootters_ef(&lifted).unwrap(), linalg::shannon(&[a * a, b * b]), epsilon = 1e-12);

        let diag = DensityOperator::diagonal(&[0.3, 0.7]).unwrap();
        assert_eq!(wootters_ef(&lift_state(&m, &diag).unwrap()).unwrap(), 0.0);
        let r = qubit(0.6);
        assert_abs_diff_eq!(
            crate::entropy::von_neumann_entropy(&lift_state(&m, &r).unwrap()),
            crate::entropy::von_neumann_entropy(&r),
            epsilon = 1e-12
        );
    }

    #[test]
    fn wootters_examples() {
        let prod = DensityOperator::diagonal(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(wootters_ef(&prod).unwrap(), 0.0);
        let s = 0.5f64.sqrt();
        let bell = CVec::from_vec(vec![real(s), real(0.0), real(0.0), real(s)]);
        assert_abs_diff_eq!(
            wootters_ef(&DensityOperator::pure(&bell).unwrap()).unwrap(),
            2f64.ln(),
            epsilon = 1e-10
        );
        let lifted = lift_state(&build_lift(&l11()).unwrap(), &qubit(0.6)).unwrap();
        assert_abs_diff_eq!(concurrence(&lifted).unwrap(), 0.6, epsilon = 1e-10);
        assert_abs_diff_eq!(wootters_ef(&lifted).unwrap(), 0.3250829733914482, epsilon = 1e-9);
        assert!(matches!(
            wootters_ef(&DensityOperator::maximally_mixed(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn induced_measures() {
        let m = build_lift(&l11()).unwrap();
        let r = qubit(0.6);
        assert_abs_diff_eq!(
            induced_measure(&m, InducedEntanglement::RelativeEntropySurrogate, &r).unwrap(),
            a_s(&r, &l11()).unwrap().value,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            induced_measure(&m, InducedEntanglement::FormationTwoQubit, &r).unwrap(),
            0.3250829733914482,
            epsilon = 1e-9
        );
        let d = DensityOperator::diagonal(&[0.4, 0.6]).unwrap();
        for e in [InducedEntanglement::RelativeEntropySurrogate, InducedEntanglement::FormationTwoQubit] {
            assert_eq!(induced_measure(&m, e, &d).unwrap(), 0.0);
        }
    }

    #[test]
    fn candidate_and_identity() {
        let m = build_lift(&l11()).unwrap();
        let (split, pairs) = m.paired().unwrap();
        let sigma = lift_state(&m, &qubit(1.0)).unwrap();
        let star = candidate_min_separable(&sigma, split, &pairs).unwrap();
        let mut expected = linalg::zeros(4, 4);
        expected[(1, 1)] = real(0.5);
        expected[(2, 2)] = real(0.5);
        assert!(linalg::max_abs_diff(star.matrix(), &expected) < 1e-15);
        let id = es_decomposition_identity(&sigma, split, &pairs).unwrap();
        assert_abs_diff_eq!(id.relative_entropy, 2f64.ln(), epsilon = 1e-12);
        assert!(id.holds(1e-9));

        let id = es_decomposition_identity(&lift_state(&m, &qubit(0.6)).unwrap(), split, &pairs).unwrap();
        assert_abs_diff_eq!(id.a_s, 0.19274475702175742, epsilon = 1e-12);
        assert!(id.holds(1e-9));

        let localized = lift_state(&m, &DensityOperator::diagonal(&[1.0, 0.0]).unwrap()).unwrap();
        let star = candidate_min_separable(&localized, split, &pairs).unwrap();
        assert!(linalg::max_abs_diff(star.matrix(), localized.matrix()) < 1e-15);

        let leaky = DensityOperator::maximally_mixed(4);
        assert!(matches!(
            candidate_min_separable(&leaky, split, &pairs),
            Err(Error::UnsupportedStructure(_))
        ));
    }

    #[test]
    fn first_order_accepts_pinch_rejects_mixed() {
        let m = build_lift(&l11()).unwrap();
        let (split, pairs) = m.paired().unwrap();
        let sigma = lift_state(&m, &qubit(0.6)).unwrap();
        let star = candidate_min_separable(&sigma, split, &pairs).unwrap();
        let rep = first_order_min_check(&sigma, &star, split, 200, 1).unwrap();
        assert!(rep.passed(), "{rep:?}");
        let wrong = first_order_min_check(&sigma, &DensityOperator::maximally_mixed(4), split, 200, 1).unwrap();
        assert!(!wrong.passed());
        let same = first_order_min_check(&star, &star, split, 20, 2).unwrap();
        assert!(same.min_derivative >= -DERIVATIVE_TOL);
        let pure = DensityOperator::diagonal(&[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            first_order_min_check(&sigma, &pure, split, 1, 0),
            Err(Error::SupportFailure(_))
        ));
    }

    #[test]
    fn superadditivity_on_lifted_qubit_and_schmidt_state() {
        let m = build_lift(&l11()).unwrap();
        let (split, pairs) = m.paired().unwrap();
        let rep = ef_superadditivity_check(
            &lift_state(&m, &qubit(0.6)).unwrap(),
            split,
            &pairs,
            &FormationConfig::default(),
        )
        .unwrap();
        assert!(rep.one_dim_pairs);
        assert!(rep.equality_holds(1e-4), "{rep:?}");
        assert_abs_diff_eq!(rep.e_f, 0.3250829733914482, epsilon = 1e-9);

        let split = BipartiteSplit::new(3, 3).unwrap();
        let pairs = PairedDecomposition::new(
            vec![(vec![0], vec![0]), (vec![1], vec![1]), (vec![2], vec![2])],
            split,
        )
        .unwrap();
        let s = [0.5f64, 0.3, 0.2];
        let mut psi = CVec::zeros(9);
        for i in 0..3 {
            psi[split.index(i, i)] = real(s[i].sqrt());
        }
        let rho = DensityOperator::pure(&psi).unwrap();
        let rep = ef_superadditivity_check(&rho, split, &pairs, &FormationConfig::default()).unwrap();
        assert_abs_diff_eq!(rep.e_f, linalg::shannon(&s), epsilon = 1e-10);
        assert!(rep.equality_holds(1e-4));

        let prod = DensityOperator::diagonal(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let rep = ef_superadditivity_check(&prod, split, &pairs, &FormationConfig::default()).unwrap();
        assert!(rep.e_f.abs() < 1e-12 && rep.a_f.abs() < 1e-8);
    }

    #[test]
    fn pairs_reject_overlap() {
        let split = BipartiteSplit::new(2, 2).unwrap();
        assert!(PairedDecomposition::new(vec![(vec![0], vec![0]), (vec![0], vec![1])], split).is_err());
        assert!(PairedDecomposition::new(vec![(vec![2], vec![0])], split).is_err());
    }
}
