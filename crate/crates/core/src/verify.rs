//! Randomized property suites behind `superposition verify`.
//!
//! Every check draws its samples from `rng(seed, stream)` with a stream
//! derived from the check name and the sample index, so results do not depend
//! on thread scheduling. A sample that returns an error counts as a
//! violation.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channels::{self, HarnessMode, KrausChannel, Monotone};
use crate::dynamics::{self, Scenario, ScenarioKind};
use crate::entropy::{relative_entropy, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::interferometer::{self, filter_projector};
use crate::linalg::{self, CVec};
use crate::measures::{self, FormationConfig, NormSpec, Witness};
use crate::operator::{block_form, compact_block, pinch, Decomposition, DensityOperator, PureStateEnsemble};
use crate::random;
use crate::secondq::{self, InducedEntanglement};

/// Outcome of one property over many samples.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub trials: usize,
    pub violations: usize,
    /// Largest observed discrepancy (compared against `tol`).
    pub worst: f64,
    pub tol: f64,
    /// First error message, or a note on how the check was run.
    pub detail: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn from_results(name: &str, tol: f64, results: Vec<Result<f64>>) -> Check {
        let mut c = Check {
            name: name.to_string(),
            trials: results.len(),
            violations: 0,
            worst: f64::NEG_INFINITY,
            tol,
            detail: None,
        };
        for r in results {
            match r {
                Ok(d) if d <= tol => c.worst = c.worst.max(d),
                Ok(d) => {
                    c.violations += 1;
                    // NaN must not hide behind max
                    c.worst = if d.is_nan() { f64::NAN } else { c.worst.max(d) };
                }
                Err(e) => {
                    c.violations += 1;
                    c.detail.get_or_insert_with(|| e.to_string());
                }
            }
        }
        c
    }

    fn note(mut self, s: impl Into<String>) -> Check {
        self.detail.get_or_insert(s.into());
        self
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<52} trials={:<5} violations={:<4} worst={:<11.3e} tol={:.0e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.trials,
            self.violations,
            self.worst,
            self.tol
        )?;
        if let Some(d) = &self.detail {
            write!(f, "  ({d})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Axioms,
    Entropy,
    Formation,
    Secondq,
    Channels,
    Dynamics,
    Interferometer,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Axioms,
        Suite::Entropy,
        Suite::Formation,
        Suite::Secondq,
        Suite::Channels,
        Suite::Dynamics,
        Suite::Interferometer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Entropy => "entropy",
            Suite::Formation => "formation",
            Suite::Secondq => "secondq",
            Suite::Channels => "channels",
            Suite::Dynamics => "dynamics",
            Suite::Interferometer => "interferometer",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

pub fn run_suite(suite: Suite, samples: usize, seed: u64) -> Vec<Check> {
    match suite {
        Suite::Axioms => axioms(samples, seed),
        Suite::Entropy => entropy(samples, seed),
        Suite::Formation => formation(samples, seed),
        Suite::Secondq => secondq(samples, seed),
        Suite::Channels => channels(samples, seed),
        Suite::Dynamics => dynamics(samples, seed),
        Suite::Interferometer => interferometer(samples, seed),
        Suite::All => Suite::EACH
            .into_iter()
            .flat_map(|s| run_suite(s, samples, seed))
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// sampling plumbing

fn stream_id(name: &str) -> u64 {
    // FNV-1a, truncated to 32 bits so the sample index fits below it
    let mut h: u64 = 0xcbf29ce484222325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h & 0xffff_ffff
}

fn sampled<F>(name: &str, trials: usize, seed: u64, tol: f64, f: F) -> Check
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    let id = stream_id(name);
    let results = (0..trials)
        .into_par_iter()
        .map(|i| f(&mut random::rng(seed, (id << 32) | i as u64)))
        .collect();
    Check::from_results(name, tol, results)
}

/// Passes when at least one of `trials` samples returns `true`.
fn existential<F>(name: &str, trials: usize, seed: u64, f: F) -> Check
where
    F: Fn(&mut ChaCha8Rng) -> Result<bool> + Sync,
{
    let id = stream_id(name);
    let results: Vec<Result<bool>> = (0..trials)
        .into_par_iter()
        .map(|i| f(&mut random::rng(seed, (id << 32) | i as u64)))
        .collect();
    let found = results.iter().filter(|r| matches!(r, Ok(true))).count();
    let err = results.iter().find_map(|r| r.as_ref().err().map(|e| e.to_string()));
    Check {
        name: name.to_string(),
        trials,
        violations: usize::from(found == 0),
        worst: if found == 0 { 1.0 } else { 0.0 },
        tol: 0.5,
        detail: Some(err.unwrap_or_else(|| format!("witnessed in {found} of {trials}"))),
    }
}

fn flag(ok: bool) -> f64 {
    if ok {
        0.0
    } else {
        1.0
    }
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn bipartite<R: Rng + ?Sized>(rng: &mut R, max: usize) -> Decomposition {
    Decomposition::bipartite(rng.random_range(1..=max), rng.random_range(1..=max)).expect("positive dims")
}

/// Two or three blocks of size 1..=3.
fn blocks<R: Rng + ?Sized>(rng: &mut R) -> Decomposition {
    let k = rng.random_range(2..=3);
    Decomposition::new((0..k).map(|_| rng.random_range(1..=3)).collect()).expect("positive dims")
}

fn norm_specs(l: &Decomposition) -> Vec<NormSpec> {
    let mut v: Vec<NormSpec> = (1..=l.dims()[0].min(l.dims()[1])).map(NormSpec::KyFan).collect();
    v.push(NormSpec::Trace);
    v.extend([1.5, 2.0, 3.0, f64::INFINITY].map(NormSpec::SchattenP));
    v
}

/// `A_S` followed by every norm measure when the decomposition is bipartite.
fn closed_form_values(rho: &DensityOperator, l: &Decomposition) -> Result<Vec<f64>> {
    let mut v = vec![measures::a_s(rho, l)?.value];
    if l.len() == 2 {
        for spec in norm_specs(l) {
            v.push(measures::norm_measure(rho, l, spec)?);
        }
    }
    Ok(v)
}

fn offdiag_max(rho: &DensityOperator, l: &Decomposition) -> f64 {
    let m = rho.matrix();
    linalg::max_abs_diff(m, &crate::operator::pinch_matrix(m, l))
}

fn ensemble_of(r: &measures::MeasureReport) -> Result<PureStateEnsemble> {
    match &r.witness {
        Some(Witness::Ensemble(e)) => Ok(e.clone()),
        _ => Err(Error::InvalidArgument("formation report without ensemble".into())),
    }
}

/// Lighter optimizer settings for the bulk axiom checks; witnesses from
/// related states are supplied as extra starts where the property allows.
fn bulk_formation(seed: u64) -> FormationConfig {
    FormationConfig {
        starts: 4,
        max_iters: 1000,
        seed,
        parallel: false,
        ..FormationConfig::default()
    }
}

fn with_initial(cfg: &FormationConfig, initial: Vec<PureStateEnsemble>) -> FormationConfig {
    FormationConfig { initial, ..cfg.clone() }
}

fn low_rank<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DensityOperator {
    let rank = rng.random_range(1..=2.min(n));
    random::random_state_with_rank(rng, n, rank)
}

// ---------------------------------------------------------------------------
// axioms

fn axioms(samples: usize, seed: u64) -> Vec<Check> {
    let mut out = vec![
        sampled("C1 non-negativity (A_S, norms)", samples, seed, 0.0, |g| {
            let l = if g.random() { blocks(g) } else { bipartite(g, 3) };
            let rho = random::random_state(g, l.total());
            Ok(max_of(closed_form_values(&rho, &l)?.into_iter().map(|x| -x)))
        }),
        sampled("C2 zero on block-diagonal states (A_S, norms)", samples, seed, 1e-8, |g| {
            let l = if g.random() { blocks(g) } else { bipartite(g, 3) };
            let rho = random::block_diagonal_state(g, &l);
            Ok(max_of(closed_form_values(&rho, &l)?))
        }),
        sampled("C2 positive off block-diagonal (A_S, norms)", samples, seed, 0.5, |g| {
            let l = bipartite(g, 3);
            let rho = random::random_state(g, l.total());
            if offdiag_max(&rho, &l) < 1e-3 {
                return Ok(0.0);
            }
            let min = -max_of(closed_form_values(&rho, &l)?.into_iter().map(|x| -x));
            Ok(flag(min > 1e-8))
        }),
        sampled("C3 block-unitary invariance (A_S, norms)", samples, seed, 1e-8, |g| {
            let l = if g.random() { blocks(g) } else { bipartite(g, 3) };
            let rho = random::random_state(g, l.total());
            let u = random::block_unitary(g, &l);
            let a = closed_form_values(&rho, &l)?;
            let b = closed_form_values(&rho.conjugate(&u)?, &l)?;
            Ok(max_of(a.iter().zip(&b).map(|(x, y)| (x - y).abs())))
        }),
        sampled("C4 convexity (A_S, norms)", samples, seed, 1e-8, |g| {
            let l = if g.random() { blocks(g) } else { bipartite(g, 3) };
            let r1 = random::random_state(g, l.total());
            let r2 = random::random_state(g, l.total());
            let mu: f64 = g.random();
            let a1 = closed_form_values(&r1, &l)?;
            let a2 = closed_form_values(&r2, &l)?;
            let am = closed_form_values(&r1.mix(&r2, mu)?, &l)?;
            Ok(max_of((0..am.len()).map(|i| am[i] - mu * a1[i] - (1.0 - mu) * a2[i])))
        }),
    ];

    let cfg = bulk_formation(seed);
    out.push(
        sampled("C1/C2 A_f on random states", samples, seed, 0.5, |g| {
            let l = bipartite(g, 3);
            let rho = low_rank(g, l.total());
            let af = measures::a_f(&rho, &l, &cfg)?.value;
            let as_ = measures::a_s(&rho, &l)?.value;
            // positive whenever the off-diagonal part is non-zero, since A_f ≥ A_S
            let positive = offdiag_max(&rho, &l) < 1e-3 || af > 1e-8;
            Ok(flag(af >= 0.0 && positive && af + 1e-12 >= as_))
        })
        .note("rank <= 2, 4 random starts"),
    );
    out.push(sampled("C2 A_f zero on block-diagonal states", samples, seed, 1e-8, |g| {
        let l = if g.random() { blocks(g) } else { bipartite(g, 3) };
        let rho = random::block_diagonal_state(g, &l);
        Ok(measures::a_f(&rho, &l, &cfg)?.value)
    }));
    out.push(
        sampled("C3 A_f block-unitary invariance", samples, seed, 1e-4, |g| {
            let l = bipartite(g, 3);
            let rho = low_rank(g, l.total());
            let u = random::block_unitary(g, &l);
            let rho_u = rho.conjugate(&u)?;
            let w = ensemble_of(&measures::a_f(&rho, &l, &cfg)?)?;
            let r2 = measures::a_f(&rho_u, &l, &with_initial(&cfg, vec![w.transform(&u)]))?;
            let back = ensemble_of(&r2)?.transform(&u.adjoint());
            let r3 = measures::a_f(&rho, &l, &with_initial(&cfg, vec![back]))?;
            Ok((r2.value - r3.value).abs())
        })
        .note("witnesses carried across the unitary as extra starts"),
    );
    out.push(
        sampled("C4 A_f convexity", samples, seed, 1e-8, |g| {
            let l = bipartite(g, 3);
            let r1 = low_rank(g, l.total());
            let r2 = low_rank(g, l.total());
            let mu: f64 = g.random();
            let a1 = measures::a_f(&r1, &l, &cfg)?;
            let a2 = measures::a_f(&r2, &l, &cfg)?;
            let seed_ens = ensemble_of(&a1)?.mix(&ensemble_of(&a2)?, mu);
            let mixed = r1.mix(&r2, mu)?;
            let am = measures::a_f(&mixed, &l, &with_initial(&cfg, vec![seed_ens]))?;
            Ok(am.value - mu * a1.value - (1.0 - mu) * a2.value)
        })
        .note("mixed witness ensemble as extra start"),
    );

    out.push(sampled("A_S additivity on product states", samples, seed, 1e-8, |g| {
        let l1 = if g.random() { blocks(g) } else { bipartite(g, 2) };
        let l2 = bipartite(g, 2);
        let r1 = random::random_state(g, l1.total());
        let r2 = random::random_state(g, l2.total());
        let (u, l) = l1.tensor(&l2);
        let prod = r1.tensor(&r2).conjugate(&u)?;
        let lhs = measures::a_s(&prod, &l)?.value;
        Ok((lhs - measures::a_s(&r1, &l1)?.value - measures::a_s(&r2, &l2)?.value).abs())
    }));
    out.push(sampled("A_S monotonicity under ancilla trace", samples, seed, 1e-8, |g| {
        let l = if g.random() { blocks(g) } else { bipartite(g, 3) };
        let da = g.random_range(1..=3);
        let rho = random::random_state(g, l.total() * da);
        let reduced = rho.partial_trace_second(l.total(), da)?;
        Ok(measures::a_s(&reduced, &l)?.value - measures::a_s(&rho, &l.extend_by_ancilla(da)?)?.value)
    }));
    out.push(
        sampled("A_f subadditivity on product states", samples, seed, 1e-4, |g| {
            let l1 = bipartite(g, 2);
            let l2 = Decomposition::bipartite(1, 1)?;
            let r1 = low_rank(g, l1.total());
            let r2 = low_rank(g, 2);
            let a1 = measures::a_f(&r1, &l1, &cfg)?;
            let a2 = measures::a_f(&r2, &l2, &cfg)?;
            let (u, l) = l1.tensor(&l2);
            let prod = r1.tensor(&r2).conjugate(&u)?;
            let start = ensemble_of(&a1)?.tensor(&ensemble_of(&a2)?).transform(&u);
            let lhs = measures::a_f(&prod, &l, &with_initial(&cfg, vec![start]))?.value;
            Ok(lhs - a1.value - a2.value)
        })
        .note("product witness as extra start"),
    );
    out.push(
        sampled("A_f monotonicity under ancilla trace", samples, seed, 1e-4, |g| {
            let l = bipartite(g, 2);
            let da = 2;
            let n = l.total();
            let rho = low_rank(g, n * da);
            let big = measures::a_f(&rho, &l.extend_by_ancilla(da)?, &cfg)?;
            // (1 ⊗ ⟨a|)ψ_l for every member and ancilla basis vector
            let w = ensemble_of(&big)?;
            let mut parts: Vec<CVec> = Vec::new();
            for (lam, v) in w.weights.iter().zip(&w.vectors) {
                for a in 0..da {
                    parts.push(CVec::from_fn(n, |i, _| v[i * da + a] * linalg::real(lam.sqrt())));
                }
            }
            let start = PureStateEnsemble::from_unnormalized(&parts);
            let reduced = rho.partial_trace_second(n, da)?;
            let small = measures::a_f(&reduced, &l, &with_initial(&cfg, vec![start]))?;
            Ok(small.value - big.value)
        })
        .note("reduced witness as extra start"),
    );
    out.push(sampled("A_S <= A_f", samples, seed, 1e-4, |g| {
        let l = bipartite(g, 3);
        let rho = low_rank(g, l.total());
        Ok(measures::a_s(&rho, &l)?.value - measures::a_f(&rho, &l, &cfg)?.value)
    }));

    out.push(sampled("Ky-Fan bounded by marginal fidelities", samples, seed, 1e-9, |g| {
        let l = bipartite(g, 3);
        let rho = random::random_state(g, l.total());
        let (p1, p2) = measures::path_probabilities(&rho, &l)?;
        let geo = (p1 * p2).sqrt();
        let mut worst = geo - 0.5;
        for k in 1..=l.dims()[0].min(l.dims()[1]) {
            let a = measures::kyfan_measure(&rho, &l, k)?;
            let b = measures::kyfan_bound(&rho, &l, k)?;
            worst = worst.max(a - b).max(b - geo);
        }
        Ok(worst)
    }));
    out.push(sampled("A_(k)^2 + P^2 <= 1", samples, seed, 1e-9, |g| {
        let l = bipartite(g, 3);
        let rho = random::random_state(g, l.total());
        let p = measures::predictability(&rho, &l)?;
        let kf = measures::kyfan_profile(&rho, &l)?;
        Ok(max_of(kf.iter().map(|a| a * a + p * p - 1.0)))
    }));
    out.push(sampled("sharp state attains the Ky-Fan bound", samples, seed, 1e-9, |g| {
        let (n1, n2) = (g.random_range(1..=3), g.random_range(1..=3));
        let p1: f64 = g.random();
        let s1 = random::random_simplex(g, n1);
        let s2 = random::random_simplex(g, n2);
        let rho = measures::sharp_state(p1, &s1, &s2)?;
        let l = Decomposition::bipartite(n1, n2)?;
        let mut worst: f64 = 0.0;
        for k in 1..=n1.min(n2) {
            let a = measures::kyfan_measure(&rho, &l, k)?;
            worst = worst.max((a - measures::kyfan_bound(&rho, &l, k)?).abs());
        }
        Ok(worst)
    }));
    out.push(sampled("Ky-Fan dominance implies norm dominance", samples, seed, 1e-9, |g| {
        let l = bipartite(g, 3);
        let sigma = random::random_state(g, l.total());
        // half the pairs are dominated by construction: shrink the coherences
        let rho = if g.random() {
            let t: f64 = g.random();
            sigma.mix(&pinch(&sigma, &l)?, 1.0 - t)?
        } else {
            random::random_state(g, l.total())
        };
        let rep = measures::dominance_check(&rho, &sigma, &l, &norm_specs(&l))?;
        if !rep.kyfan_dominated {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(max_of(rep.norms.iter().map(|n| n.rho - n.sigma)))
    }));
    out
}

// ---------------------------------------------------------------------------
// entropy identities

fn entropy(samples: usize, seed: u64) -> Vec<Check> {
    vec![
        sampled("A_S as relative entropy to the pinched state", samples, seed, 1e-9, |g| {
            let l = bipartite(g, 3);
            let rho = random::random_state(g, l.total());
            let pinched = pinch(&rho, &l)?;
            let diff = von_neumann_entropy(&pinched) - von_neumann_entropy(&rho);
            Ok((relative_entropy(&rho, &pinched)? - diff).abs())
        }),
        sampled("pinched state minimizes relative entropy", samples, seed, 1e-9, |g| {
            let l = bipartite(g, 3);
            let rho = random::random_state(g, l.total());
            let a = measures::a_s(&rho, &l)?.value;
            let challenger_seed: u64 = g.random();
            Ok(a - measures::a_s_min_check(&rho, &l, 50, challenger_seed)?)
        }),
        sampled("A_S equals lifted relative entropy", samples, seed, 1e-9, |g| {
            let l = bipartite(g, 3);
            let rho = random::random_state(g, l.total());
            let m = secondq::build_lift(&l)?;
            let lifted = secondq::induced_measure(&m, InducedEntanglement::RelativeEntropySurrogate, &rho)?;
            Ok((measures::a_s(&rho, &l)?.value - lifted).abs())
        }),
        sampled("pinching: idempotent, unital trace, mixing", samples, seed, 1e-10, |g| {
            let n = g.random_range(2..=8);
            // the first block leaves room for at least one more
            let first = g.random_range(1..n);
            let mut dims = vec![first];
            let mut left = n - first;
            while left > 0 {
                let d = g.random_range(1..=left);
                dims.push(d);
                left -= d;
            }
            let l = Decomposition::new(dims)?;
            let rho = random::random_state(g, n);
            let p = pinch(&rho, &l)?;
            let pp = pinch(&p, &l)?;
            let idem = linalg::max_abs_diff(pp.matrix(), p.matrix());
            let tr = (linalg::trace(p.matrix()).re - 1.0).abs();
            let min_eig = p.eigenvalues().last().copied().unwrap_or(0.0);
            let mixing = von_neumann_entropy(&rho) - von_neumann_entropy(&p);
            Ok(idem.max(tr).max(-min_eig).max(mixing))
        }),
        sampled("block form reassembles with contractive D", samples, seed, 1e-8, |g| {
            let l = blocks(g);
            let rho = random::random_state(g, l.total());
            let bf = block_form(&rho, &l)?;
            let dev = linalg::max_abs_diff(&bf.reassemble(), rho.matrix());
            Ok(dev.max(bf.max_contraction() - 1.0))
        }),
    ]
}

// ---------------------------------------------------------------------------
// formation oracle

fn formation(samples: usize, seed: u64) -> Vec<Check> {
    let trials = samples.clamp(1, 50);
    let cfg = FormationConfig { seed, ..FormationConfig::default() };
    let l = Decomposition::bipartite(1, 1).expect("valid");
    let m = secondq::build_lift(&l).expect("small lift");
    vec![
        sampled("A_f matches two-qubit E_f of the lift", trials, seed, 1e-4, |g| {
            let rho = random::random_state(g, 2);
            let af = measures::a_f(&rho, &l, &cfg)?.value;
            let ef = secondq::induced_measure(&m, InducedEntanglement::FormationTwoQubit, &rho)?;
            Ok((af - ef).abs())
        }),
        sampled("A_S <= A_f on qubits", trials, seed, 1e-4, |g| {
            let rho = random::random_state(g, 2);
            Ok(measures::a_s(&rho, &l)?.value - measures::a_f(&rho, &l, &cfg)?.value)
        }),
        sampled("A_f of pure states is the block entropy", trials, seed, 1e-6, |g| {
            let l = bipartite(g, 3);
            let psi = random::random_vector(g, l.total());
            let rho = DensityOperator::pure(&psi)?;
            Ok((measures::a_f(&rho, &l, &cfg)?.value - measures::a_f_pure(&psi, &l)?).abs())
        }),
    ]
}

// ---------------------------------------------------------------------------
// second quantization

fn reduced_impurity(v: &CVec, da: usize, db: usize) -> f64 {
    let p = linalg::projector_onto(&(v / linalg::real(v.norm())));
    let r = linalg::partial_trace_second(&p, da, db);
    1.0 - linalg::trace(&(&r * &r)).re
}

/// Lifted state, its split and paired decomposition for a random bipartite
/// source of size up to `[max, max]`.
fn lifted_sample<R: Rng + ?Sized>(
    g: &mut R,
    max: usize,
) -> Result<(DensityOperator, secondq::BipartiteSplit, secondq::PairedDecomposition)> {
    let l = bipartite(g, max);
    let m = secondq::build_lift(&l)?;
    let rho = random::random_state(g, l.total());
    let sigma = secondq::lift_state(&m, &rho)?;
    let (split, pairs) = m.paired()?;
    Ok((sigma, split, pairs))
}

fn secondq(samples: usize, seed: u64) -> Vec<Check> {
    let cert_states = samples.clamp(1, 20);
    let cfg = FormationConfig { seed, ..FormationConfig::default() };
    vec![
        sampled("lift is an isometry", samples, seed, 1e-12, |g| {
            let l = blocks(g);
            let m = secondq::build_lift(&l)?;
            let mm = m.matrix().adjoint() * m.matrix();
            Ok(linalg::max_abs_diff(&mm, &linalg::identity(l.total())))
        }),
        sampled("localized states lift to products", samples, seed, 1e-8, |g| {
            let l = bipartite(g, 3);
            let m = secondq::build_lift(&l)?;
            let k = g.random_range(0..2);
            let r = l.range(k)?;
            let local = random::random_state(g, r.len());
            let mut full = linalg::zeros(l.total(), l.total());
            full.view_mut((r.start, r.start), (r.len(), r.len())).copy_from(local.matrix());
            let sigma = secondq::lift_state(&m, &DensityOperator::new(full)?)?;
            let [da, db] = [m.target_dims()[0], m.target_dims()[1]];
            let a = linalg::partial_trace_second(sigma.matrix(), da, db);
            let b = linalg::partial_trace_first(sigma.matrix(), da, db);
            Ok((sigma.matrix() - linalg::kron(&a, &b)).norm())
        }),
        sampled("block-diagonal states lift to product mixtures", samples, seed, 1e-8, |g| {
            let l = bipartite(g, 3);
            let m = secondq::build_lift(&l)?;
            let rho = random::block_diagonal_state(g, &l);
            // the blockwise eigen-ensemble, as returned by the zero shortcut
            let ens = ensemble_of(&measures::a_f(&rho, &l, &FormationConfig::default())?)?;
            let [da, db] = [m.target_dims()[0], m.target_dims()[1]];
            let mut sum = linalg::zeros(da * db, da * db);
            let mut impurity: f64 = 0.0;
            for (w, v) in ens.weights.iter().zip(&ens.vectors) {
                let mv = m.matrix() * v;
                impurity = impurity.max(reduced_impurity(&mv, da, db));
                sum += linalg::projector_onto(&mv) * linalg::real(*w);
            }
            let lifted = secondq::lift_state(&m, &rho)?;
            Ok(impurity.max(linalg::max_abs_diff(&sum, lifted.matrix())))
        }),
        sampled("induced measures independent of lift basis", samples, seed, 1e-9, |g| {
            let l = bipartite(g, 3);
            let m = secondq::build_lift(&l)?;
            let mt = m.compose_source_unitary(&random::block_unitary(g, &l))?;
            let rho = random::random_state(g, l.total());
            let e = InducedEntanglement::RelativeEntropySurrogate;
            let mut d = (secondq::induced_measure(&m, e, &rho)? - secondq::induced_measure(&mt, e, &rho)?).abs();
            if l.dims() == [1, 1] {
                let e = InducedEntanglement::FormationTwoQubit;
                d = d.max((secondq::induced_measure(&m, e, &rho)? - secondq::induced_measure(&mt, e, &rho)?).abs());
            }
            Ok(d)
        }),
        sampled("sector pinching commutes with the lift", samples, seed, 1e-12, |g| {
            let l = blocks(g);
            let m = secondq::build_lift(&l)?;
            let rho = random::random_state(g, l.total());
            let lhs = secondq::sector_pinch(&m, secondq::lift_state(&m, &rho)?.matrix());
            let rhs = m.lift_operator(pinch(&rho, &l)?.matrix())?;
            Ok(linalg::max_abs_diff(&lhs, &rhs))
        }),
        sampled("A_S equals lifted relative entropy (lift suite)", samples, seed, 1e-9, |g| {
            let l = blocks(g);
            let rho = random::random_state(g, l.total());
            let m = secondq::build_lift(&l)?;
            let lifted = secondq::induced_measure(&m, InducedEntanglement::RelativeEntropySurrogate, &rho)?;
            Ok((measures::a_s(&rho, &l)?.value - lifted).abs())
        }),
        sampled("first-order minimizer certificate", cert_states, seed, 0.0, |g| {
            let (sigma, split, pairs) = lifted_sample(g, 3)?;
            let star = secondq::candidate_min_separable(&sigma, split, &pairs)?;
            let rep = secondq::first_order_min_check(&sigma, &star, split, 200, g.random())?;
            Ok(rep.violations as f64)
        })
        .note("200 product directions per state"),
        sampled("separable minimum equals A_S of the lift", cert_states, seed, 1e-9, |g| {
            let (sigma, split, pairs) = lifted_sample(g, 3)?;
            let rep = secondq::es_decomposition_identity(&sigma, split, &pairs)?;
            Ok((rep.relative_entropy - rep.a_s).abs())
        }),
        sampled("E_f superadditivity with equality", cert_states, seed, 1e-4, |g| {
            // mixed states on two qubits, pure states on larger registers
            let (split, pairs) = if g.random() {
                secondq::build_lift(&Decomposition::bipartite(1, 1)?)?.paired()?
            } else {
                secondq::build_lift(&bipartite(g, 3))?.paired()?
            };
            let rho = if split.dim() == 4 {
                secondq::random_paired_state(g, split, &pairs)
            } else {
                let mixed = secondq::random_paired_state(g, split, &pairs);
                let (_, vecs) = mixed.eigensystem();
                DensityOperator::pure(&vecs.column(0).into_owned())?
            };
            let rep = secondq::ef_superadditivity_check(&rho, split, &pairs, &cfg)?;
            let gap = (rep.rhs() - rep.e_f).max((rep.e_f - rep.a_f).abs());
            Ok(gap)
        }),
    ]
}

// ---------------------------------------------------------------------------
// channels

const CHANNELS: usize = 20;

fn sp_sample<R: Rng + ?Sized>(g: &mut R) -> (Decomposition, KrausChannel) {
    let l = bipartite(g, 3);
    let n_kraus = g.random_range(1..=3);
    let phi = channels::random_sp_channel(g, &l, n_kraus);
    (l, phi)
}

fn lsp_sample<R: Rng + ?Sized>(g: &mut R) -> Result<(Decomposition, channels::LspChannel)> {
    let l = bipartite(g, 3);
    let m = secondq::build_lift(&l)?;
    let k1 = g.random_range(1..=3);
    let k2 = g.random_range(1..=3);
    let phi1 = channels::random_sector_channel(g, l.dims()[0], k1);
    let phi2 = channels::random_sector_channel(g, l.dims()[1], k2);
    let lsp = channels::make_lsp(&m, &phi1, &phi2)?;
    Ok((l, lsp))
}

fn channels(samples: usize, seed: u64) -> Vec<Check> {
    let states = samples.max(1);
    vec![
        sampled("constructed SP channels are SP and block preserving", CHANNELS, seed, 0.5, |g| {
            let (l, phi) = sp_sample(g);
            Ok(flag(channels::is_sp(&phi, &l)? && channels::is_block_preserving(&phi, &l)?))
        }),
        sampled("SP channels do not increase A_S", CHANNELS, seed, channels::MONOTONE_TOL, |g| {
            let (l, phi) = sp_sample(g);
            let rep = channels::monotonicity_harness(&phi, &l, Monotone::RelativeEntropy, HarnessMode::Random, states, g.random())?;
            Ok(rep.max_increase)
        })
        .note(format!("{states} states per channel")),
        sampled("SP channels do not increase A_Tr", CHANNELS, seed, channels::MONOTONE_TOL, |g| {
            let (l, phi) = sp_sample(g);
            let m = Monotone::Norm(NormSpec::Trace);
            let rep = channels::monotonicity_harness(&phi, &l, m, HarnessMode::Random, states, g.random())?;
            Ok(rep.max_increase)
        })
        .note(format!("{states} states per channel")),
        sampled("SP channels act blockwise", CHANNELS, seed, 1e-10, |g| {
            let (l, phi) = sp_sample(g);
            let rho = random::random_state(g, l.total());
            let out = phi.apply_matrix(rho.matrix());
            let p = l.projectors();
            let mut sum = linalg::zeros(l.total(), l.total());
            for pi in &p {
                for pj in &p {
                    sum += pi * phi.apply_matrix(&(pi * rho.matrix() * pj)) * pj;
                }
            }
            Ok(linalg::max_abs_diff(&sum, &out))
        }),
        sampled("LSP channels do not increase any A_(k)", CHANNELS, seed, channels::MONOTONE_TOL, |g| {
            let (l, lsp) = lsp_sample(g)?;
            let rep = channels::monotonicity_harness(&lsp.channel, &l, Monotone::AllKyFan, HarnessMode::Random, states, g.random())?;
            Ok(rep.max_increase)
        })
        .note(format!("{states} states per channel")),
        sampled("LSP coherence block is V rho_12 W^dag", CHANNELS, seed, 1e-10, |g| {
            let (l, lsp) = lsp_sample(g)?;
            let (v, w) = lsp.offdiag_maps();
            let rho = random::random_state(g, l.total());
            let out = lsp.channel.apply_matrix(rho.matrix());
            let lhs = compact_block(&out, &l, 0, 1)?;
            let rhs = &v * compact_block(rho.matrix(), &l, 0, 1)? * w.adjoint();
            Ok(linalg::max_abs_diff(&lhs, &rhs))
        }),
        sampled("LSP coherence maps are contractions", CHANNELS, seed, 1e-9, |g| {
            let (_, lsp) = lsp_sample(g)?;
            let (v, w) = lsp.offdiag_maps();
            Ok(linalg::operator_norm(&v).max(linalg::operator_norm(&w)) - 1.0)
        }),
        existential("non-block-preserving channel increases A_S", CHANNELS, seed, |g| {
            let l = bipartite(g, 2);
            let phi = channels::random_channel(g, l.total(), 2);
            if channels::is_block_preserving(&phi, &l)? {
                return Ok(false);
            }
            let rep = channels::monotonicity_harness(&phi, &l, Monotone::RelativeEntropy, HarnessMode::Pinched, 50, g.random())?;
            Ok(!rep.passed())
        }),
        sampled("trace-norm contraction", samples.max(500), seed, 1e-10, |g| {
            let d = g.random_range(1..=4);
            let (kv, kw) = (g.random_range(1..=3), g.random_range(1..=3));
            let c = channels::random_contraction(g, kv, kw);
            let v = channels::random_subchannel(g, d, kv);
            let w = channels::random_subchannel(g, d, kw);
            let q = random::ginibre(g, d, d);
            let rep = channels::trace_contraction_check(&c, &v, &w, &q)?;
            Ok(rep.lhs - rep.rhs)
        }),
    ]
}

// ---------------------------------------------------------------------------
// dynamics

const GRID: [f64; 6] = [0.0, 0.25, 0.5, 1.0, 2.0, 5.0];
const FIG_SEEDS: u64 = 5;

fn closed_form_deviation(kind: ScenarioKind) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for n in [2, 3, 5] {
        let ts = dynamics::run_timeseries(&Scenario::simple(kind, n, 1.0), &GRID)?;
        for (i, &t) in GRID.iter().enumerate() {
            for k in 1..=n {
                let exact = match kind {
                    ScenarioKind::NonlocalF1 => dynamics::analytic_nonlocal(n, 1.0, t, k)?,
                    _ => dynamics::analytic_local(n, 1.0, t, k)?,
                };
                worst = worst.max((ts.rows[i].kyfan[k - 1] - exact).abs());
            }
            if kind == ScenarioKind::NonlocalF1 {
                worst = worst.max((ts.rows[i].kyfan[n - 1] - 0.5).abs());
            }
        }
    }
    Ok(worst)
}

/// Largest increase between consecutive grid points of the selected columns.
fn max_rise(ts: &dynamics::TimeSeries, cols: impl Fn(&dynamics::TimeRow) -> Vec<f64>) -> f64 {
    ts.rows
        .windows(2)
        .flat_map(|w| {
            let (a, b) = (cols(&w[0]), cols(&w[1]));
            a.into_iter().zip(b).map(|(x, y)| y - x).collect::<Vec<_>>()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn fig_grid(s: &Scenario) -> Vec<f64> {
    dynamics::uniform_grid(12.0 / s.g_min(), 240)
}

fn dynamics(samples: usize, seed: u64) -> Vec<Check> {
    let scenarios = samples.clamp(1, 10);
    vec![
        sampled("nonlocal model closed form", 1, seed, 1e-7, |_| closed_form_deviation(ScenarioKind::NonlocalF1))
            .note("N in {2,3,5}, g = 1, t in {0,...,5}; includes A_Tr = 1/2"),
        sampled("local model closed form", 1, seed, 1e-7, |_| closed_form_deviation(ScenarioKind::LocalF2)),
        sampled("exponential agrees with RK4", scenarios, seed, dynamics::CROSS_CHECK_TOL, |g| {
            let kinds = [ScenarioKind::NonlocalF1, ScenarioKind::LocalF2, ScenarioKind::Mixture { w1: 0.8, w2: 0.2 }];
            let s = Scenario::random(kinds[g.random_range(0..3)], g.random_range(1..=3), g.random());
            let gen = dynamics::build_scenario(&s)?;
            let rho0 = dynamics::initial_state(s.levels)?;
            let t = 2.0 * g.random::<f64>();
            let a = dynamics::evolve(&gen, &rho0, t)?;
            let b = dynamics::evolve_rk4(&gen, &rho0, t, 1e-3)?;
            Ok(linalg::max_abs_diff(a.matrix(), b.matrix()))
        }),
        sampled("nonlocal dynamics keep path weights", scenarios, seed, 1e-9, |g| {
            let s = Scenario::random(ScenarioKind::NonlocalF1, g.random_range(1..=4), g.random());
            let gen = dynamics::build_scenario(&s)?;
            let rho0 = random::random_state(g, 2 * s.levels);
            let l = s.decomposition();
            let p0 = measures::path_probabilities(&rho0, &l)?.0;
            let mut worst: f64 = 0.0;
            for t in [0.3, 1.0, 4.0] {
                let rho = dynamics::evolve(&gen, &rho0, t)?;
                worst = worst.max((measures::path_probabilities(&rho, &l)?.0 - p0).abs());
            }
            Ok(worst)
        }),
        sampled("nonlocal trajectories: A_S and A_Tr non-increasing", scenarios, seed, 1e-8, |g| {
            let s = Scenario::random(ScenarioKind::NonlocalF1, g.random_range(1..=4), g.random());
            let ts = dynamics::run_timeseries(&s, &dynamics::uniform_grid(6.0, 60))?;
            Ok(max_rise(&ts, |r| vec![r.a_s, *r.kyfan.last().expect("N >= 1")]))
        }),
        sampled("local trajectories: every A_(k) non-increasing", scenarios, seed, 1e-8, |g| {
            let s = Scenario::random(ScenarioKind::LocalF2, g.random_range(1..=4), g.random());
            let ts = dynamics::run_timeseries(&s, &dynamics::uniform_grid(6.0, 60))?;
            Ok(max_rise(&ts, |r| r.kyfan.clone()))
        }),
        sampled("long-time limits of the simple models", 1, seed, 0.01, |_| {
            let mut worst: f64 = 0.0;
            for n in [2, 3, 5] {
                let f1 = dynamics::run_timeseries(&Scenario::simple(ScenarioKind::NonlocalF1, n, 1.0), &[12.0])?;
                let f2 = dynamics::run_timeseries(&Scenario::simple(ScenarioKind::LocalF2, n, 1.0), &[12.0])?;
                worst = worst.max(max_of(f1.rows[0].kyfan.iter().map(|a| (a - 0.5).abs())));
                worst = worst.max(max_of(f2.rows[0].kyfan.iter().copied()));
            }
            Ok(worst)
        }),
        sampled("local dynamics compress register evolutions", scenarios, seed, 1e-8, |g| {
            let s = Scenario::random(ScenarioKind::LocalF2, g.random_range(1..=3), g.random());
            let t = 3.0 * g.random::<f64>();
            let reg = dynamics::register_generator(&s)?;
            let sup = (dynamics::liouvillian(&reg)? * linalg::real(t)).exp();
            let factor = KrausChannel::from_superoperator(&sup, s.levels + 1)?;
            let m = secondq::build_lift(&s.decomposition())?;
            let lsp = channels::make_lsp(&m, &factor, &factor)?;
            let gen = dynamics::build_scenario(&s)?;
            let rho = random::random_state(g, 2 * s.levels);
            let direct = dynamics::evolve(&gen, &rho, t)?;
            Ok(linalg::max_abs_diff(&lsp.channel.apply_matrix(rho.matrix()), direct.matrix()))
        }),
        sampled("random nonlocal runs saturate at 1/2", FIG_SEEDS as usize, seed, 0.01, |g| {
            let s = Scenario::random(ScenarioKind::NonlocalF1, 3, g.random());
            let end = 12.0 / s.g_min();
            let ts = dynamics::run_timeseries(&s, &[0.0, end])?;
            Ok(max_of(ts.rows[1].kyfan.iter().map(|a| 0.5 - a)))
        })
        .note("all A_(k) >= 0.49 at t = 12/g_min"),
        sampled("random local runs decay", FIG_SEEDS as usize, seed, 0.01, |g| {
            let s = Scenario::random(ScenarioKind::LocalF2, 3, g.random());
            let end = 12.0 / s.g_min();
            let ts = dynamics::run_timeseries(&s, &[0.0, end])?;
            Ok(max_of(ts.rows[1].kyfan.iter().copied()))
        }),
        existential("0.8/0.2 mixture raises some A_(k), k < N", FIG_SEEDS as usize, seed, |g| {
            let s = Scenario::random(ScenarioKind::Mixture { w1: 0.8, w2: 0.2 }, 3, g.random());
            let ts = dynamics::run_timeseries(&s, &fig_grid(&s))?;
            Ok((1..s.levels).any(|k| {
                let traj = ts.kyfan(k);
                max_of(traj.iter().copied()) > traj[0] + 1e-3
            }))
        }),
    ]
}

// ---------------------------------------------------------------------------
// interferometer

fn interferometer(samples: usize, seed: u64) -> Vec<Check> {
    let seeds = samples.clamp(1, 20);
    vec![
        sampled("optimal (U, V) attain A_(k)", samples, seed, 1e-10, |g| {
            let n = g.random_range(1..=4);
            let k = g.random_range(1..=n);
            let rho = random::random_state(g, 2 * n);
            let l = Decomposition::bipartite(n, n)?;
            let pair = interferometer::optimal_uv(&rho, k)?;
            let out = interferometer::run_protocol(&rho, &pair.u, &pair.v, &filter_projector(n, k))?;
            let a = measures::kyfan_measure(&rho, &l, k)?;
            Ok((pair.value - a).abs().max(((out.p1 - out.p2) / 2.0 - a).abs()))
        }),
        sampled("single unitary attains A_Tr", samples, seed, 1e-10, |g| {
            let n = g.random_range(1..=4);
            let rho = random::random_state(g, 2 * n);
            let l = Decomposition::bipartite(n, n)?;
            let pair = interferometer::optimal_single_u(&rho)?;
            let out = interferometer::run_protocol(&rho, &pair.u, &pair.v, &linalg::identity(n))?;
            let a = measures::trace_measure(&rho, &l)?;
            Ok((pair.value - a).abs().max(((out.p1 - out.p2) / 2.0 - a).abs()))
        }),
        sampled("stochastic search reaches A_(k)", seeds, seed, 1e-3, |g| {
            let rho = random::random_state(g, 6);
            let l = Decomposition::bipartite(3, 3)?;
            let best = interferometer::stochastic_maximize(&rho, 2, 3000, g.random())?;
            Ok((best.value - measures::kyfan_measure(&rho, &l, 2)?).abs())
        }),
        sampled("larger filters never lower the optimum", samples, seed, 1e-12, |g| {
            let n = g.random_range(1..=4);
            let rho = random::random_state(g, 2 * n);
            let vals = (1..=n)
                .map(|k| Ok(interferometer::optimal_uv(&rho, k)?.value))
                .collect::<Result<Vec<f64>>>()?;
            Ok(max_of(vals.windows(2).map(|w| w[0] - w[1])).max(0.0))
        }),
        sampled("port probabilities affine in the state", samples, seed, 1e-12, |g| {
            let n = g.random_range(1..=4);
            let k = g.random_range(1..=n);
            let (u, v) = (random::haar_unitary(g, n), random::haar_unitary(g, n));
            let pc = filter_projector(n, k);
            let r1 = random::random_state(g, 2 * n);
            let r2 = random::random_state(g, 2 * n);
            let mu: f64 = g.random();
            let o1 = interferometer::run_protocol(&r1, &u, &v, &pc)?;
            let o2 = interferometer::run_protocol(&r2, &u, &v, &pc)?;
            let om = interferometer::run_protocol(&r1.mix(&r2, mu)?, &u, &v, &pc)?;
            let lin = |a: f64, b: f64, m: f64| (m - mu * a - (1.0 - mu) * b).abs();
            let split = (om.p1 - (om.q1 + om.q2 + om.r)).abs().max((om.p2 - (om.q1 + om.q2 - om.r)).abs());
            Ok(lin(o1.p1, o2.p1, om.p1).max(lin(o1.p2, o2.p2, om.p2)).max(split))
        }),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn errors_count_as_violations() {
        let c = sampled("always errs", 3, 0, 1.0, |_| Err(Error::InvalidArgument("x".into())));
        assert_eq!(c.violations, 3);
        assert!(!c.passed());
        let c = sampled("nan", 2, 0, 1.0, |_| Ok(f64::NAN));
        assert_eq!(c.violations, 2);
    }

    #[test]
    fn sampling_is_deterministic() {
        let f = |g: &mut ChaCha8Rng| Ok(g.random::<f64>());
        let a = sampled("det", 16, 5, 2.0, f);
        let b = sampled("det", 16, 5, 2.0, f);
        assert_eq!(a.worst, b.worst);
    }

    #[test]
    fn small_suites_pass() {
        for suite in [Suite::Entropy, Suite::Interferometer] {
            for c in run_suite(suite, 10, 3) {
                assert!(c.passed(), "{c}");
            }
        }
    }
}
