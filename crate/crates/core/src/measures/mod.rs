//! Superposition measures: relative entropy of superposition, superposition
//! of formation, and the unitarily invariant norm (Ky-Fan) family together
//! with predictability and its bounds.

mod formation;

pub use formation::{a_f, a_f_pure, ensemble_cost, FormationConfig};

use crate::entropy::{matrix_entropy, matrix_relative_entropy, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::operator::{compact_block, pinch, Decomposition, DensityOperator, PureStateEnsemble};
use crate::random;

/// Value of a measure plus the object that certifies it, where one exists.
#[derive(Debug, Clone)]
pub struct MeasureReport {
    pub value: f64,
    pub witness: Option<Witness>,
    /// False only when an iterative optimizer stopped on its iteration cap.
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub enum Witness {
    /// Block-diagonal state attaining the relative-entropy minimum.
    BlockDiagonal(DensityOperator),
    /// Ensemble attaining the reported formation value.
    Ensemble(PureStateEnsemble),
    /// Path unitaries attaining an interferometric optimum.
    Unitaries { u: CMat, v: CMat },
}

/// Relative entropy of superposition `S(Π(ρ)) − S(ρ)`.
pub fn a_s(rho: &DensityOperator, l: &Decomposition) -> Result<MeasureReport> {
    let pinched = pinch(rho, l)?;
    let value = (von_neumann_entropy(&pinched) - von_neumann_entropy(rho)).max(0.0);
    Ok(MeasureReport {
        value,
        witness: Some(Witness::BlockDiagonal(pinched)),
        converged: true,
    })
}

/// Minimum of `S(ρ||σ)` over `σ = Π(ρ)` and `trials` sampled block-diagonal
/// states. Half of the samples are full-rank block states, the other half are
/// random mixtures of `Π(ρ)` with such states so the challengers crowd the
/// minimizer.
pub fn a_s_min_check(rho: &DensityOperator, l: &Decomposition, trials: usize, seed: u64) -> Result<f64> {
    let pinched = pinch(rho, l)?;
    let mut best = matrix_relative_entropy(rho.matrix(), pinched.matrix());
    let mut rng = random::rng(seed, 0);
    for t in 0..trials {
        let sample = full_rank_block_state(&mut rng, l);
        let candidate = if t % 2 == 0 {
            sample
        } else {
            let eps: f64 = rand::Rng::random::<f64>(&mut rng) * 0.5;
            pinched.matrix() * linalg::real(1.0 - eps) + sample * linalg::real(eps)
        };
        best = best.min(matrix_relative_entropy(rho.matrix(), &candidate));
    }
    Ok(best)
}

fn full_rank_block_state<R: rand::Rng + ?Sized>(rng: &mut R, l: &Decomposition) -> CMat {
    let w = random::random_simplex(rng, l.len());
    let n = l.total();
    let mut m = linalg::zeros(n, n);
    for (k, r) in l.ranges().into_iter().enumerate() {
        let s = random::random_full_rank(rng, r.len());
        let b = s.matrix() * linalg::real(w[k]);
        m.view_mut((r.start, r.start), (r.len(), r.len())).copy_from(&b);
    }
    m
}

/// Unitarily invariant norm applied to the off-diagonal block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormSpec {
    /// Sum of the `k` largest singular values.
    KyFan(usize),
    /// Sum of all singular values.
    Trace,
    /// `(Σ s^p)^(1/p)`; `p = ∞` gives the operator norm.
    SchattenP(f64),
}

impl NormSpec {
    pub fn validate(&self, l: &Decomposition) -> Result<()> {
        l.require_bipartite()?;
        match *self {
            NormSpec::KyFan(k) => {
                let max = l.dims()[0].min(l.dims()[1]);
                if k == 0 || k > max {
                    return Err(Error::KOutOfRange { k, max });
                }
            }
            NormSpec::Trace => {}
            NormSpec::SchattenP(p) => {
                if p.is_nan() || p < 1.0 {
                    return Err(Error::InvalidNorm(format!("Schatten p = {p} must be >= 1")));
                }
            }
        }
        Ok(())
    }

    /// Evaluates the norm on a list of non-increasing singular values.
    pub fn apply(&self, s: &[f64]) -> f64 {
        match *self {
            NormSpec::KyFan(k) => s.iter().take(k).sum(),
            NormSpec::Trace => s.iter().sum(),
            NormSpec::SchattenP(p) if p.is_infinite() => s.first().copied().unwrap_or(0.0),
            NormSpec::SchattenP(p) => {
                let top = s.first().copied().unwrap_or(0.0);
                if top == 0.0 {
                    return 0.0;
                }
                top * s.iter().map(|x| (x / top).powf(p)).sum::<f64>().powf(1.0 / p)
            }
        }
    }

    pub fn name(&self) -> String {
        match *self {
            NormSpec::KyFan(k) => format!("kyfan:{k}"),
            NormSpec::Trace => "trace".into(),
            NormSpec::SchattenP(p) => format!("schatten:{p}"),
        }
    }
}

/// Singular values of the `(1, 2)` block `P₁ρP₂`, non-increasing, length
/// `min(N₁, N₂)`.
pub fn offdiag_singular_values(rho: &DensityOperator, l: &Decomposition) -> Result<Vec<f64>> {
    l.require_bipartite()?;
    l.check_dim(rho.dim())?;
    Ok(linalg::singular_values(&compact_block(rho.matrix(), l, 0, 1)?))
}

/// Ky-Fan `k`-norm of the off-diagonal block.
pub fn kyfan_measure(rho: &DensityOperator, l: &Decomposition, k: usize) -> Result<f64> {
    norm_measure(rho, l, NormSpec::KyFan(k))
}

/// Every Ky-Fan measure `A_(1), …, A_(min(N₁,N₂))`.
pub fn kyfan_profile(rho: &DensityOperator, l: &Decomposition) -> Result<Vec<f64>> {
    let s = offdiag_singular_values(rho, l)?;
    Ok(s
        .iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect())
}

/// Trace-norm measure `A_(Tr)`.
pub fn trace_measure(rho: &DensityOperator, l: &Decomposition) -> Result<f64> {
    norm_measure(rho, l, NormSpec::Trace)
}

pub fn norm_measure(rho: &DensityOperator, l: &Decomposition, spec: NormSpec) -> Result<f64> {
    spec.validate(l)?;
    Ok(spec.apply(&offdiag_singular_values(rho, l)?))
}

#[derive(Debug, Clone)]
pub struct NormComparison {
    pub spec: NormSpec,
    pub rho: f64,
    pub sigma: f64,
    pub dominated: bool,
}

#[derive(Debug, Clone)]
pub struct DominanceReport {
    pub kyfan_rho: Vec<f64>,
    pub kyfan_sigma: Vec<f64>,
    /// `A_(k)(ρ) ≤ A_(k)(σ)` for every `k`.
    pub kyfan_dominated: bool,
    pub norms: Vec<NormComparison>,
    pub all_norms_dominated: bool,
}

impl DominanceReport {
    /// Ky-Fan dominance must carry over to every unitarily invariant norm.
    pub fn consistent(&self) -> bool {
        !self.kyfan_dominated || self.all_norms_dominated
    }
}

/// Slack used when comparing measure values for dominance.
pub const DOMINANCE_SLACK: f64 = 1e-12;

pub fn dominance_check(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    l: &Decomposition,
    specs: &[NormSpec],
) -> Result<DominanceReport> {
    let kyfan_rho = kyfan_profile(rho, l)?;
    let kyfan_sigma = kyfan_profile(sigma, l)?;
    let kyfan_dominated = kyfan_rho
        .iter()
        .zip(&kyfan_sigma)
        .all(|(a, b)| *a <= b + DOMINANCE_SLACK);
    let sr = offdiag_singular_values(rho, l)?;
    let ss = offdiag_singular_values(sigma, l)?;
    let mut norms = Vec::with_capacity(specs.len());
    for spec in specs {
        spec.validate(l)?;
        let a = spec.apply(&sr);
        let b = spec.apply(&ss);
        norms.push(NormComparison {
            spec: *spec,
            rho: a,
            sigma: b,
            dominated: a <= b + DOMINANCE_SLACK,
        });
    }
    let all_norms_dominated = norms.iter().all(|n| n.dominated);
    Ok(DominanceReport {
        kyfan_rho,
        kyfan_sigma,
        kyfan_dominated,
        norms,
        all_norms_dominated,
    })
}

/// Block probabilities `(Tr P₁ρ, Tr P₂ρ)`.
pub fn path_probabilities(rho: &DensityOperator, l: &Decomposition) -> Result<(f64, f64)> {
    l.require_bipartite()?;
    l.check_dim(rho.dim())?;
    let m = rho.matrix();
    let p = |k: usize| -> f64 { l.ranges()[k].clone().map(|i| m[(i, i)].re).sum() };
    Ok((p(0), p(1)))
}

/// `|p₁ − p₂|`.
pub fn predictability(rho: &DensityOperator, l: &Decomposition) -> Result<f64> {
    let (p1, p2) = path_probabilities(rho, l)?;
    Ok((p1 - p2).abs())
}

/// Upper bound `√(p₁p₂) Σ_{l≤k} √(λ_l(σ₁) λ_l(σ₂))` on `A_(k)`, with the
/// shorter marginal spectrum zero-padded.
pub fn kyfan_bound(rho: &DensityOperator, l: &Decomposition, k: usize) -> Result<f64> {
    let (p1, p2) = path_probabilities(rho, l)?;
    let max = l.dims()[0].max(l.dims()[1]);
    if k == 0 || k > max {
        return Err(Error::KOutOfRange { k, max });
    }
    if p1 * p2 <= 0.0 {
        return Ok(0.0);
    }
    let m = rho.matrix();
    let s1: Vec<f64> = linalg::eigvalsh(&compact_block(m, l, 0, 0)?)
        .into_iter()
        .map(|x| (x / p1).max(0.0))
        .collect();
    let s2: Vec<f64> = linalg::eigvalsh(&compact_block(m, l, 1, 1)?)
        .into_iter()
        .map(|x| (x / p2).max(0.0))
        .collect();
    let fid: f64 = (0..k)
        .map(|i| {
            let a = s1.get(i).copied().unwrap_or(0.0);
            let b = s2.get(i).copied().unwrap_or(0.0);
            (a * b).sqrt()
        })
        .sum();
    Ok((p1 * p2).sqrt() * fid)
}

fn check_spectrum(s: &[f64], which: &str) -> Result<Vec<f64>> {
    if s.is_empty() || s.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::InvalidSpectrum(format!("{which}: entries must be finite and non-negative")));
    }
    let total: f64 = s.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidSpectrum(format!("{which}: sums to {total}")));
    }
    let mut out = s.to_vec();
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

/// State attaining [`kyfan_bound`] with equality for every `k`, given the
/// block probability `p1` and the two marginal spectra. The decomposition is
/// `[spectrum1.len(), spectrum2.len()]`.
pub fn sharp_state(p1: f64, spectrum1: &[f64], spectrum2: &[f64]) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&p1) {
        return Err(Error::InvalidSpectrum(format!("p1 = {p1} outside [0, 1]")));
    }
    let s1 = check_spectrum(spectrum1, "spectrum1")?;
    let s2 = check_spectrum(spectrum2, "spectrum2")?;
    let p2 = 1.0 - p1;
    let (n1, n2) = (s1.len(), s2.len());
    let mut m = linalg::zeros(n1 + n2, n1 + n2);
    for (i, x) in s1.iter().enumerate() {
        m[(i, i)] = linalg::real(p1 * x);
    }
    for (j, x) in s2.iter().enumerate() {
        m[(n1 + j, n1 + j)] = linalg::real(p2 * x);
    }
    for i in 0..n1.min(n2) {
        let v = linalg::real((p1 * p2 * s1[i] * s2[i]).sqrt());
        m[(i, n1 + i)] = v;
        m[(n1 + i, i)] = v;
    }
    DensityOperator::new(m)
}

/// Entropy of the block-probability distribution of a pure state; the
/// formation cost of a single ensemble member.
pub fn pinched_entropy(rho: &DensityOperator, l: &Decomposition) -> Result<f64> {
    Ok(matrix_entropy(pinch(rho, l)?.matrix()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, real, CVec};
    use approx::assert_abs_diff_eq;

    fn qubit(cv: f64) -> DensityOperator {
        DensityOperator::new(CMat::from_row_slice(
            2,
            2,
            &[real(0.5), real(cv / 2.0), real(cv / 2.0), real(0.5)],
        ))
        .unwrap()
    }

    fn l11() -> Decomposition {
        Decomposition::bipartite(1, 1).unwrap()
    }

    #[test]
    fn a_s_examples() {
        assert_abs_diff_eq!(a_s(&qubit(1.0), &l11()).unwrap().value, 2f64.ln(), epsilon = 1e-14);
        let pinched = pinch(&qubit(0.6), &l11()).unwrap();
        assert_eq!(a_s(&pinched, &l11()).unwrap().value, 0.0);
        assert_abs_diff_eq!(
            a_s(&qubit(0.6), &l11()).unwrap().value,
            0.19274475702175742,
            epsilon = 1e-13
        );
    }

    #[test]
    fn a_s_min_check_examples() {
        let r = qubit(0.6);
        let direct = a_s(&r, &l11()).unwrap().value;
        assert_abs_diff_eq!(a_s_min_check(&r, &l11(), 0, 1).unwrap(), direct, epsilon = 1e-12);
        let sampled = a_s_min_check(&r, &l11(), 500, 3).unwrap();
        assert_abs_diff_eq!(sampled, 0.19274475702175742, epsilon = 1e-9);
        let diag = DensityOperator::diagonal(&[0.2, 0.8]).unwrap();
        assert_eq!(a_s_min_check(&diag, &l11(), 50, 1).unwrap(), 0.0);
    }

    #[test]
    fn kyfan_examples() {
        let r = qubit(0.6);
        assert_abs_diff_eq!(kyfan_measure(&r, &l11(), 1).unwrap(), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(trace_measure(&r, &l11()).unwrap(), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(
            norm_measure(&r, &l11(), NormSpec::SchattenP(2.0)).unwrap(),
            0.3,
            epsilon = 1e-15
        );
        let pinched = pinch(&r, &l11()).unwrap();
        assert_eq!(kyfan_measure(&pinched, &l11(), 1).unwrap(), 0.0);

        // (I_N / N) ⊗ |+⟩⟨+| in path-major layout: block I_N / (2N)
        for n in 1..=4usize {
            let mut m = linalg::zeros(2 * n, 2 * n);
            for i in 0..n {
                for a in 0..2 {
                    for b in 0..2 {
                        m[(a * n + i, b * n + i)] = real(0.5 / n as f64);
                    }
                }
            }
            let rho = DensityOperator::new(m).unwrap();
            let l = Decomposition::bipartite(n, n).unwrap();
            for k in 1..=n {
                assert_abs_diff_eq!(
                    kyfan_measure(&rho, &l, k).unwrap(),
                    k as f64 / (2.0 * n as f64),
                    epsilon = 1e-14
                );
            }
        }
    }

    #[test]
    fn kyfan_errors() {
        let r = qubit(0.6);
        assert!(matches!(
            kyfan_measure(&r, &l11(), 2),
            Err(Error::KOutOfRange { k: 2, max: 1 })
        ));
        let three = Decomposition::new(vec![1, 1, 1]).unwrap();
        assert!(matches!(
            kyfan_measure(&DensityOperator::maximally_mixed(3), &three, 1),
            Err(Error::NotBipartite(3))
        ));
        assert!(norm_measure(&r, &l11(), NormSpec::SchattenP(0.5)).is_err());
    }

    #[test]
    fn predictability_examples() {
        assert_eq!(predictability(&qubit(0.4), &l11()).unwrap(), 0.0);
        let loc = DensityOperator::diagonal(&[1.0, 0.0]).unwrap();
        assert_eq!(predictability(&loc, &l11()).unwrap(), 1.0);
        let p = DensityOperator::diagonal(&[0.7, 0.3]).unwrap();
        assert_abs_diff_eq!(predictability(&p, &l11()).unwrap(), 0.4, epsilon = 1e-15);
    }

    #[test]
    fn bound_and_sharp_state_examples() {
        let r = qubit(0.6);
        assert_abs_diff_eq!(kyfan_bound(&r, &l11(), 1).unwrap(), 0.5, epsilon = 1e-15);

        let s = sharp_state(0.5, &[0.7, 0.3], &[0.7, 0.3]).unwrap();
        let l = Decomposition::bipartite(2, 2).unwrap();
        assert_abs_diff_eq!(kyfan_bound(&s, &l, 2).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(kyfan_bound(&s, &l, 1).unwrap(), 0.35, epsilon = 1e-12);
        assert_abs_diff_eq!(kyfan_measure(&s, &l, 1).unwrap(), 0.35, epsilon = 1e-12);
        assert_abs_diff_eq!(trace_measure(&s, &l).unwrap(), 0.5, epsilon = 1e-12);

        let pure = sharp_state(0.5, &[1.0], &[1.0]).unwrap();
        assert_abs_diff_eq!(pure.purity(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(kyfan_measure(&pure, &l11(), 1).unwrap(), 0.5, epsilon = 1e-15);

        let loc = sharp_state(1.0, &[0.6, 0.4], &[1.0]).unwrap();
        let l21 = Decomposition::bipartite(2, 1).unwrap();
        assert_eq!(kyfan_measure(&loc, &l21, 1).unwrap(), 0.0);

        assert!(matches!(sharp_state(0.5, &[0.5, 0.6], &[1.0]), Err(Error::InvalidSpectrum(_))));
        assert!(matches!(sharp_state(0.5, &[1.5, -0.5], &[1.0]), Err(Error::InvalidSpectrum(_))));
    }

    #[test]
    fn dominance_examples() {
        let mut rng = random::rng(11, 0);
        let l = Decomposition::bipartite(2, 2).unwrap();
        let sigma = random::random_state(&mut rng, 4);
        let specs = [NormSpec::Trace, NormSpec::SchattenP(2.0), NormSpec::KyFan(1)];
        let rep = dominance_check(&pinch(&sigma, &l).unwrap(), &sigma, &l, &specs).unwrap();
        assert!(rep.kyfan_dominated && rep.all_norms_dominated);
        let same = dominance_check(&sigma, &sigma, &l, &specs).unwrap();
        assert!(same.kyfan_dominated && same.consistent());
    }

    #[test]
    fn dominance_flags_crossing_pair() {
        // singular values (0.3, 0) vs (0.2, 0.2): A_(1) larger, A_(2) smaller
        let l = Decomposition::bipartite(2, 2).unwrap();
        let mk = |s: [f64; 2]| {
            let mut m = linalg::identity(4) * real(0.25);
            m[(0, 2)] = real(s[0]);
            m[(2, 0)] = real(s[0]);
            m[(1, 3)] = real(s[1]);
            m[(3, 1)] = real(s[1]);
            DensityOperator::new(m).unwrap()
        };
        let a = mk([0.2, 0.2]);
        let b = mk([0.24, 0.0]);
        let rep = dominance_check(&a, &b, &l, &[NormSpec::Trace]).unwrap();
        assert!(!rep.kyfan_dominated);
        assert!(!rep.all_norms_dominated);
        assert!(rep.consistent());
        let _ = c(0.0, 0.0);
        let _ = CVec::zeros(1);
    }

    #[test]
    fn schatten_limits() {
        let s = [0.4, 0.1, 0.05];
        assert_abs_diff_eq!(NormSpec::SchattenP(1.0).apply(&s), NormSpec::Trace.apply(&s), epsilon = 1e-15);
        assert_eq!(NormSpec::SchattenP(f64::INFINITY).apply(&s), NormSpec::KyFan(1).apply(&s));
        assert_abs_diff_eq!(NormSpec::SchattenP(400.0).apply(&s), 0.4, epsilon = 1e-3);
    }
}
