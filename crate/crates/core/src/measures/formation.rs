//! Superposition of formation.
//!
//! Every ensemble with `m` members reproducing `ρ = Σ μ_j |e_j⟩⟨e_j|` has the
//! form `ψ̃_l = Σ_j T_lj √μ_j |e_j⟩` for an `m × r` matrix with orthonormal
//! columns, so the infimum becomes a minimization over a compact Stiefel
//! manifold. The cost of member `l` with weight `λ_l` and block weights
//! `q_lk = ‖P_k ψ̃_l‖²` is `λ_l H(q_l/λ_l) = −Σ_k q_lk ln q_lk + λ_l ln λ_l`.
//! We descend along the Riemannian gradient with a QR retraction, an Armijo
//! backtracking line search seeded with Barzilai-Borwein step lengths, and
//! run several starts (in parallel, each with its own random stream).

use rayon::prelude::*;

use super::{MeasureReport, Witness};
use crate::error::{Error, Result};
use crate::linalg::{self, xlnx, CMat, CVec};
use crate::operator::{pinch_matrix, Decomposition, DensityOperator, PureStateEnsemble};
use crate::random;

#[derive(Debug, Clone)]
pub struct FormationConfig {
    /// Random starts in addition to the eigen-ensemble start.
    pub starts: usize,
    pub max_iters: usize,
    /// Stop when the objective improves by less than this over `patience`
    /// iterations.
    pub tol: f64,
    pub patience: usize,
    pub seed: u64,
    /// Ensemble size; defaults to `r²`, never below `r`.
    pub ensemble_size: Option<usize>,
    pub parallel: bool,
    /// Extra starting ensembles (each must reproduce `ρ`).
    pub initial: Vec<PureStateEnsemble>,
}

impl Default for FormationConfig {
    fn default() -> Self {
        FormationConfig {
            starts: 16,
            max_iters: 3000,
            tol: 1e-9,
            patience: 50,
            seed: 0,
            ensemble_size: None,
            parallel: true,
            initial: Vec::new(),
        }
    }
}

/// `Σ_l λ_l H(block distribution of ψ_l)` for an arbitrary ensemble.
pub fn ensemble_cost(ensemble: &PureStateEnsemble, l: &Decomposition) -> Result<f64> {
    let mut total = 0.0;
    for (w, v) in ensemble.weights.iter().zip(&ensemble.vectors) {
        l.check_dim(v.len())?;
        let q: Vec<f64> = l
            .ranges()
            .into_iter()
            .map(|r| r.map(|i| v[i].norm_sqr()).sum())
            .collect();
        total += w * linalg::shannon(&q);
    }
    Ok(total)
}

/// Exact value for a pure state: the entropy of its block probabilities.
pub fn a_f_pure(psi: &CVec, l: &Decomposition) -> Result<f64> {
    if psi.norm_squared() == 0.0 {
        return Err(Error::InvalidArgument("zero vector".into()));
    }
    ensemble_cost(&PureStateEnsemble::from_unnormalized(std::slice::from_ref(psi)), l)
}

struct Problem {
    /// `n × r`, columns `√μ_j e_j`.
    a: CMat,
    /// `n × r`, columns `e_j / √μ_j` (for converting ensembles to `T`).
    a_inv: CMat,
    ranges: Vec<std::ops::Range<usize>>,
    m: usize,
    r: usize,
}

impl Problem {
    fn new(rho: &DensityOperator, l: &Decomposition, size: Option<usize>) -> Self {
        let (vals, vecs) = rho.eigensystem();
        let top = vals.first().copied().unwrap_or(0.0);
        let r = vals
            .iter()
            .filter(|&&x| x > 1e-13 * top.max(1.0) && x > 0.0)
            .count()
            .max(1);
        let n = rho.dim();
        let mut a = linalg::zeros(n, r);
        let mut a_inv = linalg::zeros(n, r);
        for j in 0..r {
            let s = vals[j].max(0.0).sqrt();
            a.set_column(j, &(vecs.column(j) * linalg::real(s)));
            if s > 0.0 {
                a_inv.set_column(j, &(vecs.column(j) * linalg::real(1.0 / s)));
            }
        }
        let m = size.unwrap_or(r * r).max(r);
        Problem {
            a,
            a_inv,
            ranges: l.ranges(),
            m,
            r,
        }
    }

    /// Unnormalized members `ψ̃_l` as columns of `A Tᵀ`.
    fn members(&self, t: &CMat) -> CMat {
        &self.a * t.transpose()
    }

    fn value(&self, t: &CMat) -> f64 {
        let psi = self.members(t);
        let mut f = 0.0;
        for col in 0..self.m {
            let mut lam = 0.0;
            for r in &self.ranges {
                let q: f64 = r.clone().map(|i| psi[(i, col)].norm_sqr()).sum();
                lam += q;
                f -= xlnx(q);
            }
            f += xlnx(lam);
        }
        f
    }

    /// Objective and the gradient with respect to `conj(T)`.
    fn value_and_grad(&self, t: &CMat) -> (f64, CMat) {
        let psi = self.members(t);
        let mut g = linalg::zeros(psi.nrows(), self.m);
        let mut f = 0.0;
        let mut q = vec![0.0; self.ranges.len()];
        for col in 0..self.m {
            let mut lam = 0.0;
            for (k, r) in self.ranges.iter().enumerate() {
                q[k] = r.clone().map(|i| psi[(i, col)].norm_sqr()).sum();
                lam += q[k];
                f -= xlnx(q[k]);
            }
            f += xlnx(lam);
            for (k, r) in self.ranges.iter().enumerate() {
                if q[k] <= 0.0 {
                    continue;
                }
                let w = linalg::real((lam / q[k]).ln());
                for i in r.clone() {
                    g[(i, col)] = psi[(i, col)] * w;
                }
            }
        }
        // row l of the gradient is (A† g_l)ᵀ
        let z = (self.a.adjoint() * g).transpose();
        (f, z)
    }

    fn riemannian(t: &CMat, z: &CMat) -> CMat {
        let tz = t.adjoint() * z;
        z - t * linalg::hermitian_part(&tz)
    }

    fn eigen_start(&self) -> CMat {
        let mut t = linalg::zeros(self.m, self.r);
        for j in 0..self.r {
            t[(j, j)] = linalg::ONE;
        }
        t
    }

    fn from_ensemble(&self, ens: &PureStateEnsemble) -> Option<CMat> {
        if ens.vectors.iter().any(|v| v.len() != self.a.nrows()) {
            return None;
        }
        let m = self.m.max(ens.len());
        let mut t = linalg::zeros(m, self.r);
        for (l, (w, v)) in ens.weights.iter().zip(&ens.vectors).enumerate() {
            let scaled = v * linalg::real(w.max(0.0).sqrt());
            let row = self.a_inv.adjoint() * scaled;
            for j in 0..self.r {
                t[(l, j)] = row[j];
            }
        }
        Some(linalg::qr_orthonormalize(&t))
    }
}

/// States whose off-diagonal blocks are this small are treated as block
/// diagonal; their blockwise eigen-ensembles are localized and cost nothing.
pub const BLOCK_DIAGONAL_TOL: f64 = 1e-14;

fn block_diagonal_report(rho: &DensityOperator, l: &Decomposition) -> MeasureReport {
    let n = rho.dim();
    let mut vectors = Vec::new();
    for r in l.ranges() {
        let block = rho.matrix().view((r.start, r.start), (r.len(), r.len())).into_owned();
        let (vals, vecs) = linalg::eigh(&block);
        for (j, v) in vals.iter().enumerate() {
            if *v > 0.0 {
                let mut full = CVec::zeros(n);
                full.rows_mut(r.start, r.len())
                    .copy_from(&(vecs.column(j) * linalg::real(v.sqrt())));
                vectors.push(full);
            }
        }
    }
    MeasureReport {
        value: 0.0,
        witness: Some(Witness::Ensemble(PureStateEnsemble::from_unnormalized(&vectors))),
        converged: true,
    }
}

struct Run {
    value: f64,
    t: CMat,
    converged: bool,
}

fn descend(p: &Problem, mut t: CMat, cfg: &FormationConfig) -> Run {
    const ARMIJO: f64 = 1e-4;
    let (mut f, mut z) = p.value_and_grad(&t);
    let mut grad = Problem::riemannian(&t, &z);
    let mut step = 1.0;
    let mut history = vec![f];
    for _ in 0..cfg.max_iters {
        let gn2 = grad.iter().map(|x| x.norm_sqr()).sum::<f64>();
        if gn2 < 1e-24 {
            return Run { value: f, t, converged: true };
        }
        let mut alpha = step;
        let mut accepted = None;
        for _ in 0..60 {
            let cand = linalg::qr_orthonormalize(&(&t - &grad * linalg::real(alpha)));
            let fc = p.value(&cand);
            if fc <= f - ARMIJO * alpha * gn2 {
                accepted = Some((cand, fc));
                break;
            }
            alpha *= 0.5;
        }
        let Some((t_new, _)) = accepted else {
            // no descent possible at machine precision: stationary
            return Run { value: f, t, converged: true };
        };
        let (f_new, z_new) = p.value_and_grad(&t_new);
        let grad_new = Problem::riemannian(&t_new, &z_new);
        let s = &t_new - &t;
        let y = &grad_new - &grad;
        let sy: f64 = s.iter().zip(y.iter()).map(|(a, b)| (a.conj() * b).re).sum();
        let ss: f64 = s.iter().map(|a| a.norm_sqr()).sum();
        step = if sy.abs() > 1e-300 {
            (ss / sy.abs()).clamp(1e-6, 1e3)
        } else {
            (alpha * 2.0).min(1e3)
        };
        t = t_new;
        f = f_new;
        z = z_new;
        grad = grad_new;
        history.push(f);
        if history.len() > cfg.patience {
            let old = history[history.len() - 1 - cfg.patience];
            if old - f < cfg.tol {
                return Run { value: f, t, converged: true };
            }
        }
    }
    let _ = z;
    Run { value: f, t, converged: false }
}

/// Superposition of formation by multi-start Stiefel descent. The value is an
/// upper bound on the infimum; the witness is the best ensemble found.
pub fn a_f(rho: &DensityOperator, l: &Decomposition, cfg: &FormationConfig) -> Result<MeasureReport> {
    l.check_dim(rho.dim())?;
    if cfg.max_iters == 0 {
        return Err(Error::InvalidArgument("max_iters must be positive".into()));
    }
    if linalg::max_abs_diff(&pinch_matrix(rho.matrix(), l), rho.matrix()) <= BLOCK_DIAGONAL_TOL {
        return Ok(block_diagonal_report(rho, l));
    }
    let p = Problem::new(rho, l, cfg.ensemble_size);
    let mut starts: Vec<CMat> = Vec::with_capacity(cfg.starts + 1 + cfg.initial.len());
    for ens in &cfg.initial {
        if !ens.reconstructs(rho) {
            return Err(Error::InvalidArgument(
                "initial ensemble does not reproduce the state".into(),
            ));
        }
        if let Some(t) = p.from_ensemble(ens) {
            starts.push(t);
        }
    }
    starts.push(p.eigen_start());
    for s in 0..cfg.starts {
        let mut g = random::rng(cfg.seed, s as u64 + 1);
        starts.push(random::random_isometry(&mut g, p.m, p.r));
    }

    let run = |t0: &CMat| -> Run {
        // ensembles longer than m need their own problem size
        if t0.nrows() != p.m {
            let q = Problem { m: t0.nrows(), a: p.a.clone(), a_inv: p.a_inv.clone(), ranges: p.ranges.clone(), r: p.r };
            descend(&q, t0.clone(), cfg)
        } else {
            descend(&p, t0.clone(), cfg)
        }
    };
    let runs: Vec<Run> = if cfg.parallel {
        starts.par_iter().map(run).collect()
    } else {
        starts.iter().map(run).collect()
    };
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.value < runs[best].value {
            best = i;
        }
    }
    let winner = &runs[best];
    let members = &p.a * winner.t.transpose();
    let vectors: Vec<CVec> = (0..members.ncols())
        .map(|c| members.column(c).into_owned())
        .filter(|v: &CVec| v.norm_squared() > 1e-300)
        .collect();
    Ok(MeasureReport {
        value: winner.value.max(0.0),
        witness: Some(Witness::Ensemble(PureStateEnsemble::from_unnormalized(&vectors))),
        converged: runs.iter().all(|r| r.converged),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real;
    use approx::assert_abs_diff_eq;

    fn qubit(c: f64) -> DensityOperator {
        DensityOperator::new(CMat::from_row_slice(
            2,
            2,
            &[real(0.5), real(c / 2.0), real(c / 2.0), real(0.5)],
        ))
        .unwrap()
    }

    fn h2(x: f64) -> f64 {
        linalg::shannon(&[x, 1.0 - x])
    }

    #[test]
    fn qubit_formation_matches_closed_form() {
        let l = Decomposition::bipartite(1, 1).unwrap();
        for &cv in &[0.0, 0.3, 0.6, 0.95, 1.0] {
            let rep = a_f(&qubit(cv), &l, &FormationConfig::default()).unwrap();
            let exact = h2((1.0 + (1.0 - cv * cv).sqrt()) / 2.0);
            assert_abs_diff_eq!(rep.value, exact, epsilon = 1e-6);
        }
        let rep = a_f(&qubit(0.6), &l, &FormationConfig::default()).unwrap();
        assert_abs_diff_eq!(rep.value, 0.3250829733914482, epsilon = 1e-6);
        let Some(Witness::Ensemble(ens)) = rep.witness else { panic!() };
        assert!(ens.reconstructs(&qubit(0.6)));
        assert_abs_diff_eq!(ensemble_cost(&ens, &l).unwrap(), rep.value, epsilon = 1e-10);
    }

    #[test]
    fn pure_and_block_diagonal() {
        let l = Decomposition::bipartite(1, 1).unwrap();
        let plus = qubit(1.0);
        let rep = a_f(&plus, &l, &FormationConfig::default()).unwrap();
        assert_abs_diff_eq!(rep.value, 2f64.ln(), epsilon = 1e-12);
        let diag = DensityOperator::diagonal(&[0.3, 0.7]).unwrap();
        assert!(a_f(&diag, &l, &FormationConfig::default()).unwrap().value < 1e-8);
    }

    #[test]
    fn deterministic_across_threads() {
        let mut g = random::rng(5, 0);
        let rho = random::random_state_with_rank(&mut g, 4, 2);
        let l = Decomposition::bipartite(2, 2).unwrap();
        let cfg = FormationConfig { seed: 9, ..Default::default() };
        let a = a_f(&rho, &l, &cfg).unwrap().value;
        let b = a_f(&rho, &l, &FormationConfig { parallel: false, ..cfg }).unwrap().value;
        assert_eq!(a, b);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut g = random::rng(3, 0);
        let rho = random::random_state_with_rank(&mut g, 5, 3);
        let l = Decomposition::new(vec![2, 1, 2]).unwrap();
        let p = Problem::new(&rho, &l, None);
        let t = random::random_isometry(&mut g, p.m, p.r);
        let (_, z) = p.value_and_grad(&t);
        let dir = random::ginibre(&mut g, p.m, p.r);
        let h = 1e-6;
        let fd = (p.value(&(&t + &dir * real(h))) - p.value(&(&t - &dir * real(h)))) / (2.0 * h);
        // df = 2 Re Σ conj(dir) ∘ z
        let an: f64 = 2.0 * dir.iter().zip(z.iter()).map(|(d, z)| (d.conj() * z).re).sum::<f64>();
        assert_abs_diff_eq!(fd, an, epsilon = 1e-5 * an.abs().max(1.0));
    }

    #[test]
    fn initial_ensemble_is_used() {
        let l = Decomposition::bipartite(1, 1).unwrap();
        let rho = qubit(0.6);
        let (vals, vecs) = rho.eigensystem();
        let ens = PureStateEnsemble::from_unnormalized(&[
            vecs.column(0) * real(vals[0].sqrt()),
            vecs.column(1) * real(vals[1].sqrt()),
        ]);
        let cfg = FormationConfig { starts: 0, initial: vec![ens], ..Default::default() };
        let v = a_f(&rho, &l, &cfg).unwrap().value;
        assert!(v <= ln2() + 1e-12);
        let bad = PureStateEnsemble::from_unnormalized(&[vecs.column(0).into_owned()]);
        let cfg = FormationConfig { initial: vec![bad], ..Default::default() };
        assert!(a_f(&rho, &l, &cfg).is_err());
    }

    fn ln2() -> f64 {
        2f64.ln()
    }
}
