//! Kraus channels, the subspace-preserving (SP) and local-subspace-preserving
//! (LSP) classes, and harnesses checking that measures do not increase under
//! them.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::measures::{self, NormSpec};
use crate::operator::{check_dim, pinch, pinch_matrix, Decomposition, DensityOperator};
use crate::random;
use crate::secondq::LiftMap;

/// Tolerance for the trace-preservation identity and the SP/block tests.
pub const CHANNEL_TOL: f64 = 1e-10;

/// Completely positive trace-preserving map `ρ ↦ Σ K ρ K†`.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    kraus: Vec<CMat>,
}

/// Completely positive trace-non-increasing family, `Σ K†K ≤ 1`.
#[derive(Debug, Clone)]
pub struct SubChannel {
    kraus: Vec<CMat>,
}

fn check_family(kraus: &[CMat]) -> Result<usize> {
    let Some(first) = kraus.first() else {
        return Err(Error::InvalidArgument("empty Kraus list".into()));
    };
    let d = first.nrows();
    for k in kraus {
        if k.nrows() != k.ncols() {
            return Err(Error::NotSquare { rows: k.nrows(), cols: k.ncols() });
        }
        check_dim(k.nrows(), d)?;
        if k.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
    }
    Ok(d)
}

fn gram(kraus: &[CMat]) -> CMat {
    let d = kraus[0].nrows();
    kraus.iter().fold(linalg::zeros(d, d), |acc, k| acc + k.adjoint() * k)
}

impl KrausChannel {
    pub fn new(kraus: Vec<CMat>) -> Result<Self> {
        let d = check_family(&kraus)?;
        let dev = linalg::max_abs_diff(&gram(&kraus), &linalg::identity(d));
        if dev > CHANNEL_TOL {
            return Err(Error::NotTracePreserving(format!("|Σ K†K − 1| = {dev:.3e}")));
        }
        Ok(KrausChannel { kraus })
    }

    pub fn identity(dim: usize) -> Self {
        KrausChannel { kraus: vec![linalg::identity(dim)] }
    }

    pub fn unitary(u: CMat) -> Result<Self> {
        KrausChannel::new(vec![u])
    }

    /// The pinching map as a channel with Kraus operators `{P_k}`.
    pub fn pinching(l: &Decomposition) -> Self {
        KrausChannel { kraus: l.projectors() }
    }

    /// Replaces every state by `I/d`.
    pub fn completely_depolarizing(dim: usize) -> Self {
        let s = linalg::real((1.0 / dim as f64).sqrt());
        let mut kraus = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut k = linalg::zeros(dim, dim);
                k[(i, j)] = s;
                kraus.push(k);
            }
        }
        KrausChannel { kraus }
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].nrows()
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    pub fn apply_matrix(&self, m: &CMat) -> CMat {
        self.kraus
            .iter()
            .fold(linalg::zeros(m.nrows(), m.ncols()), |acc, k| acc + k * m * k.adjoint())
    }

    /// Heisenberg-picture map `X ↦ Σ K† X K`.
    pub fn adjoint_apply(&self, x: &CMat) -> CMat {
        self.kraus
            .iter()
            .fold(linalg::zeros(x.nrows(), x.ncols()), |acc, k| acc + k.adjoint() * x * k)
    }

    /// Kraus form of a column-stacked superoperator, read off the
    /// eigendecomposition of its Choi matrix `Σ |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`.
    pub fn from_superoperator(s: &CMat, dim: usize) -> Result<Self> {
        check_dim(s.nrows(), dim * dim)?;
        let mut choi = linalg::zeros(dim * dim, dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let col = s.column(i + j * dim);
                for a in 0..dim {
                    for b in 0..dim {
                        choi[(i * dim + a, j * dim + b)] = col[a + b * dim];
                    }
                }
            }
        }
        let (vals, vecs) = linalg::eigh(&choi);
        let top = vals.first().copied().unwrap_or(0.0);
        if let Some(min) = vals.last() {
            if *min < -1e-9 * top.max(1.0) {
                return Err(Error::InvalidArgument(format!(
                    "superoperator is not completely positive (Choi eigenvalue {min:.3e})"
                )));
            }
        }
        let mut kraus = Vec::new();
        for (v, lam) in vals.iter().enumerate() {
            if *lam <= 1e-14 * top.max(1.0) {
                continue;
            }
            let mut k = linalg::zeros(dim, dim);
            for i in 0..dim {
                for a in 0..dim {
                    k[(a, i)] = vecs[(i * dim + a, v)] * linalg::real(lam.sqrt());
                }
            }
            kraus.push(k);
        }
        KrausChannel::new(kraus)
    }

    /// `Φ₂ ∘ Φ₁` where `self = Φ₁`.
    pub fn then(&self, next: &KrausChannel) -> Result<KrausChannel> {
        check_dim(next.dim(), self.dim())?;
        let mut kraus = Vec::with_capacity(self.kraus.len() * next.kraus.len());
        for b in &next.kraus {
            for a in &self.kraus {
                kraus.push(b * a);
            }
        }
        Ok(KrausChannel { kraus })
    }
}

impl SubChannel {
    pub fn new(kraus: Vec<CMat>) -> Result<Self> {
        let d = check_family(&kraus)?;
        let slack = linalg::identity(d) - gram(&kraus);
        let min = linalg::eigvalsh(&slack).last().copied().unwrap_or(0.0);
        if min < -CHANNEL_TOL {
            return Err(Error::NotTracePreserving(format!(
                "Σ K†K exceeds the identity by {:.3e}",
                -min
            )));
        }
        Ok(SubChannel { kraus })
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }
}

impl From<KrausChannel> for SubChannel {
    fn from(c: KrausChannel) -> Self {
        SubChannel { kraus: c.kraus }
    }
}

pub fn apply(phi: &KrausChannel, rho: &DensityOperator) -> Result<DensityOperator> {
    check_dim(rho.dim(), phi.dim())?;
    DensityOperator::new(phi.apply_matrix(rho.matrix()))
}

/// Whether the block weights are preserved for every input, tested through
/// `Φ†(P₁) = P₁`.
pub fn is_sp(phi: &KrausChannel, l: &Decomposition) -> Result<bool> {
    l.require_bipartite()?;
    l.check_dim(phi.dim())?;
    let p1 = l.projector(0)?;
    Ok(linalg::max_abs_diff(&phi.adjoint_apply(&p1), &p1) <= CHANNEL_TOL)
}

/// Hermitian spanning set of the block-diagonal operators.
pub fn block_diagonal_basis(l: &Decomposition) -> Vec<CMat> {
    let n = l.total();
    let mut out = Vec::new();
    for r in l.ranges() {
        for i in r.clone() {
            for j in r.clone() {
                let mut m = linalg::zeros(n, n);
                if i == j {
                    m[(i, i)] = linalg::ONE;
                } else if i < j {
                    m[(i, j)] = linalg::ONE;
                    m[(j, i)] = linalg::ONE;
                } else {
                    m[(i, j)] = linalg::I;
                    m[(j, i)] = -linalg::I;
                }
                out.push(m);
            }
        }
    }
    out
}

/// Whether `Π∘Φ∘Π = Φ∘Π`, i.e. block-diagonal inputs stay block diagonal.
pub fn is_block_preserving(phi: &KrausChannel, l: &Decomposition) -> Result<bool> {
    l.check_dim(phi.dim())?;
    Ok(block_diagonal_basis(l).iter().all(|x| {
        let y = phi.apply_matrix(x);
        linalg::max_abs_diff(&pinch_matrix(&y, l), &y) <= CHANNEL_TOL
    }))
}

/// Local channels on the two lifted registers certifying an LSP channel.
#[derive(Debug, Clone)]
pub struct LspCertificate {
    pub factor1: KrausChannel,
    pub factor2: KrausChannel,
}

#[derive(Debug, Clone)]
pub struct ChannelClassification {
    pub is_sp: bool,
    pub is_block_preserving: bool,
    pub lsp_certificate: Option<LspCertificate>,
}

pub fn classify(phi: &KrausChannel, l: &Decomposition) -> Result<ChannelClassification> {
    Ok(ChannelClassification {
        is_sp: is_sp(phi, l)?,
        is_block_preserving: is_block_preserving(phi, l)?,
        lsp_certificate: None,
    })
}

/// A channel compressed from a product of local register channels.
#[derive(Debug, Clone)]
pub struct LspChannel {
    pub channel: KrausChannel,
    pub certificate: LspCertificate,
}

impl LspChannel {
    pub fn classification(&self, l: &Decomposition) -> Result<ChannelClassification> {
        let mut c = classify(&self.channel, l)?;
        c.lsp_certificate = Some(self.certificate.clone());
        Ok(c)
    }

    /// `(V, W)` with `P₁Φ(ρ)P₂ = V (P₁ρP₂) W†` on the compact blocks:
    /// `V = Σ_i conj(⟨0|A_i|0⟩) A_i|particle`, `W = Σ_j conj(⟨0|B_j|0⟩) B_j|particle`.
    pub fn offdiag_maps(&self) -> (CMat, CMat) {
        fn reduce(c: &KrausChannel) -> CMat {
            let d = c.dim();
            c.kraus().iter().fold(linalg::zeros(d - 1, d - 1), |acc, a| {
                let vac = a[(0, 0)].conj();
                acc + a.view((1, 1), (d - 1, d - 1)) * vac
            })
        }
        (reduce(&self.certificate.factor1), reduce(&self.certificate.factor2))
    }
}

/// `Φ(ρ) = M†[Φ₁⊗Φ₂](MρM†)M`, rejected unless it is trace preserving on the
/// single-particle sector.
pub fn make_lsp(m: &LiftMap, phi1: &KrausChannel, phi2: &KrausChannel) -> Result<LspChannel> {
    m.source().require_bipartite()?;
    check_dim(phi1.dim(), m.target_dims()[0])?;
    check_dim(phi2.dim(), m.target_dims()[1])?;
    let mut kraus = Vec::new();
    for a in phi1.kraus() {
        for b in phi2.kraus() {
            let k = m.restrict_operator(&linalg::kron(a, b))?;
            if linalg::max_abs(&k) > 1e-15 {
                kraus.push(k);
            }
        }
    }
    let n = m.source().total();
    if kraus.is_empty() {
        return Err(Error::NotTracePreservingOnSector(1.0));
    }
    let dev = linalg::max_abs_diff(&gram(&kraus), &linalg::identity(n));
    if dev > CHANNEL_TOL {
        return Err(Error::NotTracePreservingOnSector(dev));
    }
    Ok(LspChannel {
        channel: KrausChannel { kraus },
        certificate: LspCertificate {
            factor1: phi1.clone(),
            factor2: phi2.clone(),
        },
    })
}

/// Random channel with block-diagonal Kraus operators `A_i ⊕ B_i`; these are
/// exactly the SP channels.
pub fn random_sp_channel<R: Rng + ?Sized>(rng: &mut R, l: &Decomposition, n_kraus: usize) -> KrausChannel {
    let n = l.total();
    let isos: Vec<(std::ops::Range<usize>, CMat)> = l
        .ranges()
        .into_iter()
        .map(|r| {
            let d = r.len();
            (r, random::random_isometry(rng, d * n_kraus, d))
        })
        .collect();
    let kraus = (0..n_kraus)
        .map(|i| {
            let mut k = linalg::zeros(n, n);
            for (r, iso) in &isos {
                let d = r.len();
                k.view_mut((r.start, r.start), (d, d))
                    .copy_from(&iso.view((i * d, 0), (d, d)));
            }
            k
        })
        .collect();
    KrausChannel { kraus }
}

/// Random register channel that keeps vacuum and particle levels apart:
/// Kraus operators `a_i ⊕ Ã_i` with `Σ|a_i|² = 1`, `Σ Ã_i†Ã_i = 1`.
pub fn random_sector_channel<R: Rng + ?Sized>(rng: &mut R, levels: usize, n_kraus: usize) -> KrausChannel {
    let vac = random::random_isometry(rng, n_kraus, 1);
    let part = random::random_isometry(rng, levels * n_kraus, levels);
    let kraus = (0..n_kraus)
        .map(|i| {
            let mut k = linalg::zeros(levels + 1, levels + 1);
            k[(0, 0)] = vac[(i, 0)];
            k.view_mut((1, 1), (levels, levels))
                .copy_from(&part.view((i * levels, 0), (levels, levels)));
            k
        })
        .collect();
    KrausChannel { kraus }
}

/// Random channel with `n_kraus` Kraus operators.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, dim: usize, n_kraus: usize) -> KrausChannel {
    KrausChannel {
        kraus: random::random_kraus(rng, dim, n_kraus),
    }
}

/// Measure watched by the monotonicity harness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Monotone {
    RelativeEntropy,
    Norm(NormSpec),
    /// Every Ky-Fan measure `A_(1) … A_(min(N₁,N₂))`.
    AllKyFan,
}

/// How the harness draws inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HarnessMode {
    /// Random states of random rank.
    Random,
    /// Block-diagonal inputs `Π(ρ′)`.
    Pinched,
    /// Random states followed by local ascent on the increase.
    Search,
}

pub const MONOTONE_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    pub samples: usize,
    pub violations: usize,
    /// Largest observed `A(Φ(ρ)) − A(ρ)` (over all watched values).
    pub max_increase: f64,
    pub witness: Option<DensityOperator>,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn watched_values(rho: &DensityOperator, l: &Decomposition, m: Monotone) -> Result<Vec<f64>> {
    Ok(match m {
        Monotone::RelativeEntropy => vec![measures::a_s(rho, l)?.value],
        Monotone::Norm(spec) => vec![measures::norm_measure(rho, l, spec)?],
        Monotone::AllKyFan => measures::kyfan_profile(rho, l)?,
    })
}

fn increase(phi: &KrausChannel, rho: &DensityOperator, l: &Decomposition, m: Monotone) -> Result<f64> {
    let before = watched_values(rho, l, m)?;
    let after = watched_values(&apply(phi, rho)?, l, m)?;
    Ok(after
        .iter()
        .zip(&before)
        .map(|(a, b)| a - b)
        .fold(f64::NEG_INFINITY, f64::max))
}

pub fn monotonicity_harness(
    phi: &KrausChannel,
    l: &Decomposition,
    measure: Monotone,
    mode: HarnessMode,
    samples: usize,
    seed: u64,
) -> Result<MonotonicityReport> {
    l.check_dim(phi.dim())?;
    if let Monotone::Norm(spec) = measure {
        spec.validate(l)?;
    }
    let mut rng = random::rng(seed, 0);
    let n = l.total();
    let mut rep = MonotonicityReport {
        samples,
        violations: 0,
        max_increase: f64::NEG_INFINITY,
        witness: None,
    };
    let mut best: Option<(f64, DensityOperator)> = None;
    for _ in 0..samples {
        let mut rho = random::random_state(&mut rng, n);
        if mode == HarnessMode::Pinched {
            rho = pinch(&rho, l)?;
        }
        let inc = increase(phi, &rho, l, measure)?;
        if best.as_ref().is_none_or(|(b, _)| inc > *b) {
            best = Some((inc, rho.clone()));
        }
        rep.max_increase = rep.max_increase.max(inc);
        if inc > MONOTONE_TOL {
            rep.violations += 1;
            rep.witness.get_or_insert(rho);
        }
    }
    if mode == HarnessMode::Search && rep.violations == 0 {
        if let Some((mut val, mut rho)) = best {
            let mut step = 0.3;
            for _ in 0..400 {
                let h = random::random_hermitian(&mut rng, n, step);
                let u = linalg::expi_hermitian(&h);
                let target = random::random_pure(&mut rng, n);
                let cand = rho.conjugate(&u)?.mix(&target, 1.0 - step * 0.2)?;
                let inc = increase(phi, &cand, l, measure)?;
                if inc > val {
                    val = inc;
                    rho = cand;
                    step = (step * 1.5).min(1.0);
                } else {
                    step = (step * 0.9).max(1e-3);
                }
                if val > MONOTONE_TOL {
                    break;
                }
            }
            rep.max_increase = rep.max_increase.max(val);
            if val > MONOTONE_TOL {
                rep.violations += 1;
                rep.witness = Some(rho);
            }
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone)]
pub struct ContractionReport {
    pub lhs: f64,
    pub rhs: f64,
}

impl ContractionReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs + tol
    }
}

/// `‖Σ C_kl V_k Q W_l†‖_Tr ≤ ‖Q‖_Tr` for `CC† ≤ 1` and trace-non-increasing
/// families `{V_k}`, `{W_l}`.
pub fn trace_contraction_check(c: &CMat, v: &SubChannel, w: &SubChannel, q: &CMat) -> Result<ContractionReport> {
    if c.nrows() != v.kraus().len() || c.ncols() != w.kraus().len() {
        return Err(Error::DimensionMismatch {
            expected: v.kraus().len() * w.kraus().len(),
            found: c.nrows() * c.ncols(),
        });
    }
    let top = linalg::eigvalsh(&(c * c.adjoint())).first().copied().unwrap_or(0.0);
    if top > 1.0 + CHANNEL_TOL {
        return Err(Error::CoefficientMatrixTooLarge(top));
    }
    let d = q.nrows();
    if v.kraus()[0].nrows() != d || w.kraus()[0].nrows() != q.ncols() {
        return Err(Error::DimensionMismatch { expected: d, found: v.kraus()[0].nrows() });
    }
    let mut out = linalg::zeros(d, q.ncols());
    for (k, vk) in v.kraus().iter().enumerate() {
        for (l, wl) in w.kraus().iter().enumerate() {
            out += vk * q * wl.adjoint() * c[(k, l)];
        }
    }
    Ok(ContractionReport {
        lhs: linalg::trace_norm(&out),
        rhs: linalg::trace_norm(q),
    })
}

/// Random contraction `C` (`CC† ≤ 1`) of the given shape.
pub fn random_contraction<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    let g = random::ginibre(rng, rows, cols);
    let s = linalg::operator_norm(&g);
    let shrink: f64 = rng.random::<f64>();
    if s > 0.0 {
        g * linalg::real(shrink / s)
    } else {
        g
    }
}

/// Random trace-non-increasing family.
pub fn random_subchannel<R: Rng + ?Sized>(rng: &mut R, dim: usize, n_kraus: usize) -> SubChannel {
    let shrink = rng.random::<f64>().sqrt();
    SubChannel {
        kraus: random::random_kraus(rng, dim, n_kraus)
            .into_iter()
            .map(|k| k * linalg::real(shrink))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real;
    use crate::secondq::build_lift;
    use approx::assert_abs_diff_eq;

    fn l11() -> Decomposition {
        Decomposition::bipartite(1, 1).unwrap()
    }

    #[test]
    fn apply_examples() {
        let mut g = random::rng(1, 0);
        let rho = random::random_state(&mut g, 4);
        let l = Decomposition::bipartite(2, 2).unwrap();
        let id = apply(&KrausChannel::identity(4), &rho).unwrap();
        assert!(linalg::max_abs_diff(id.matrix(), rho.matrix()) < 1e-15);
        let p = apply(&KrausChannel::pinching(&l), &rho).unwrap();
        assert!(linalg::max_abs_diff(p.matrix(), pinch(&rho, &l).unwrap().matrix()) < 1e-15);
        let dep = apply(&KrausChannel::completely_depolarizing(4), &rho).unwrap();
        assert!(linalg::max_abs_diff(dep.matrix(), &(linalg::identity(4) * real(0.25))) < 1e-14);
        assert!(KrausChannel::new(vec![linalg::identity(2) * real(0.5)]).is_err());
    }

    #[test]
    fn sp_and_block_preservation() {
        let l = Decomposition::bipartite(2, 2).unwrap();
        let mut g = random::rng(2, 0);
        let local = KrausChannel::unitary(random::block_unitary(&mut g, &l)).unwrap();
        assert!(is_sp(&local, &l).unwrap());
        assert!(is_block_preserving(&local, &l).unwrap());

        let mut swap = linalg::zeros(4, 4);
        for i in 0..2 {
            swap[(i, i + 2)] = linalg::ONE;
            swap[(i + 2, i)] = linalg::ONE;
        }
        let swap = KrausChannel::unitary(swap).unwrap();
        assert!(!is_sp(&swap, &l).unwrap());
        assert!(is_block_preserving(&swap, &l).unwrap());

        let pinching = KrausChannel::pinching(&l);
        assert!(is_sp(&pinching, &l).unwrap());

        let sp = random_sp_channel(&mut g, &l, 3);
        assert!(is_sp(&sp, &l).unwrap() && is_block_preserving(&sp, &l).unwrap());

        let generic = random_channel(&mut g, 4, 2);
        assert!(!is_block_preserving(&generic, &l).unwrap());
    }

    #[test]
    fn lsp_examples() {
        let m = build_lift(&l11()).unwrap();
        let mut g = random::rng(3, 0);
        // occupation-preserving local unitaries
        let u1 = KrausChannel::unitary(CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            linalg::ONE,
            linalg::c(0.0, 1.0),
        ])))
        .unwrap();
        let lsp = make_lsp(&m, &u1, &KrausChannel::identity(2)).unwrap();
        assert_eq!(lsp.channel.kraus().len(), 1);
        assert!(linalg::unitary_deviation(&lsp.channel.kraus()[0]) < 1e-12);

        // phase damping on register 1 damps the coherence
        let p: f64 = 0.3;
        let z = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![linalg::ONE, real(-1.0)]));
        let damp = KrausChannel::new(vec![
            linalg::identity(2) * real((1.0 - p).sqrt()),
            z * real(p.sqrt()),
        ])
        .unwrap();
        let lsp = make_lsp(&m, &damp, &KrausChannel::identity(2)).unwrap();
        assert!(is_sp(&lsp.channel, &l11()).unwrap());
        let plus = DensityOperator::new(CMat::from_element(2, 2, real(0.5))).unwrap();
        let out = apply(&lsp.channel, &plus).unwrap();
        assert_abs_diff_eq!(out.matrix()[(0, 1)].re, 0.5 * (1.0 - 2.0 * p), epsilon = 1e-14);
        assert!(lsp.classification(&l11()).unwrap().lsp_certificate.is_some());

        // amplitude damping empties the register into the vacuum
        let gamma: f64 = 0.4;
        let mut a0 = linalg::identity(2);
        a0[(1, 1)] = real((1.0 - gamma).sqrt());
        let mut a1 = linalg::zeros(2, 2);
        a1[(0, 1)] = real(gamma.sqrt());
        let amp = KrausChannel::new(vec![a0, a1]).unwrap();
        assert!(matches!(
            make_lsp(&m, &amp, &KrausChannel::identity(2)),
            Err(Error::NotTracePreservingOnSector(_))
        ));

        let l = Decomposition::bipartite(2, 3).unwrap();
        let m = build_lift(&l).unwrap();
        let lsp = make_lsp(&m, &random_sector_channel(&mut g, 2, 3), &random_sector_channel(&mut g, 3, 2)).unwrap();
        let (v, w) = lsp.offdiag_maps();
        let rho = random::random_state(&mut g, 5);
        let out = apply(&lsp.channel, &rho).unwrap();
        let x = crate::operator::compact_block(rho.matrix(), &l, 0, 1).unwrap();
        let y = crate::operator::compact_block(out.matrix(), &l, 0, 1).unwrap();
        assert!(linalg::max_abs_diff(&y, &(&v * x * w.adjoint())) < 1e-12);
        assert!(linalg::operator_norm(&v) <= 1.0 + 1e-9 && linalg::operator_norm(&w) <= 1.0 + 1e-9);
    }

    #[test]
    fn harness_behaviour() {
        let l = Decomposition::bipartite(2, 2).unwrap();
        let mut g = random::rng(4, 0);
        let sp = random_sp_channel(&mut g, &l, 2);
        for m in [Monotone::RelativeEntropy, Monotone::Norm(NormSpec::Trace)] {
            assert!(monotonicity_harness(&sp, &l, m, HarnessMode::Random, 100, 1).unwrap().passed());
        }
        // decay of both paths' internal states to |e₁⟩ builds up A_(1)
        let mut kraus = Vec::new();
        for i in 0..2 {
            let mut k = linalg::zeros(4, 4);
            k[(0, i)] = linalg::ONE;
            k[(2, 2 + i)] = linalg::ONE;
            kraus.push(k);
        }
        let decay = KrausChannel::new(kraus).unwrap();
        assert!(is_sp(&decay, &l).unwrap());
        let rep = monotonicity_harness(&decay, &l, Monotone::Norm(NormSpec::KyFan(1)), HarnessMode::Search, 50, 2)
            .unwrap();
        assert!(!rep.passed());
        let w = rep.witness.unwrap();
        assert!(increase(&decay, &w, &l, Monotone::Norm(NormSpec::KyFan(1))).unwrap() > MONOTONE_TOL);

        let generic = random_channel(&mut g, 4, 2);
        let rep = monotonicity_harness(&generic, &l, Monotone::RelativeEntropy, HarnessMode::Pinched, 5, 3).unwrap();
        assert!(!rep.passed());
    }

    #[test]
    fn superoperator_round_trip() {
        let mut g = random::rng(6, 0);
        let phi = random_channel(&mut g, 3, 2);
        let mut s = linalg::zeros(9, 9);
        for i in 0..3 {
            for j in 0..3 {
                let mut e = linalg::zeros(3, 3);
                e[(i, j)] = linalg::ONE;
                let out = phi.apply_matrix(&e);
                for a in 0..3 {
                    for b in 0..3 {
                        s[(a + 3 * b, i + 3 * j)] = out[(a, b)];
                    }
                }
            }
        }
        let back = KrausChannel::from_superoperator(&s, 3).unwrap();
        let rho = random::random_state(&mut g, 3);
        assert!(linalg::max_abs_diff(&back.apply_matrix(rho.matrix()), &phi.apply_matrix(rho.matrix())) < 1e-12);
    }

    #[test]
    fn contraction_examples() {
        let mut g = random::rng(5, 0);
        let q = random::ginibre(&mut g, 3, 3);
        let id = SubChannel::new(vec![linalg::identity(3)]).unwrap();
        let c = linalg::identity(1);
        let rep = trace_contraction_check(&c, &id, &id, &q).unwrap();
        assert_abs_diff_eq!(rep.lhs, rep.rhs, epsilon = 1e-12);

        let l = Decomposition::new(vec![1, 2]).unwrap();
        let proj = SubChannel::new(l.projectors()).unwrap();
        let rep = trace_contraction_check(&linalg::identity(2), &proj, &proj, &q).unwrap();
        assert!(rep.holds(1e-9) && rep.lhs < rep.rhs);

        for _ in 0..50 {
            let v = random_subchannel(&mut g, 3, 2);
            let w = random_subchannel(&mut g, 3, 3);
            let c = random_contraction(&mut g, 2, 3);
            assert!(trace_contraction_check(&c, &v, &w, &q).unwrap().holds(1e-9));
        }
        let big = linalg::identity(1) * real(1.5);
        assert!(matches!(
            trace_contraction_check(&big, &id, &id, &q),
            Err(Error::CoefficientMatrixTooLarge(_))
        ));
    }
}
