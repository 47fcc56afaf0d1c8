//! Lindblad relaxation of an atom travelling through both arms of an
//! interferometer.
//!
//! The total space is path ⊗ internal in path-major order, so the path
//! decomposition is `[N, N]` and `⟨1|ρ|2⟩` is the `(0, 1)` block. Internal
//! energy eigenstates are the canonical basis vectors in increasing energy.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::measures;
use crate::operator::{check_dim, Decomposition, DensityOperator, HERMITIAN_TOL};
use crate::random;

/// Largest state dimension for the dense superoperator (`dim² ≤ 4096`).
pub const MAX_DIM: usize = 64;
/// Agreement demanded between the exponential and the RK4 cross-check.
pub const CROSS_CHECK_TOL: f64 = 1e-7;

/// `F(ρ) = −i[H, ρ] + Σ LρL† − ½{L†L, ρ}`.
#[derive(Debug, Clone)]
pub struct LindbladGenerator {
    h: CMat,
    lindblads: Vec<CMat>,
}

impl LindbladGenerator {
    pub fn new(h: CMat, lindblads: Vec<CMat>) -> Result<Self> {
        if h.nrows() != h.ncols() {
            return Err(Error::NotSquare { rows: h.nrows(), cols: h.ncols() });
        }
        let dev = linalg::hermitian_deviation(&h);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        for l in &lindblads {
            if l.nrows() != l.ncols() {
                return Err(Error::NotSquare { rows: l.nrows(), cols: l.ncols() });
            }
            check_dim(l.nrows(), h.nrows())?;
        }
        Ok(LindbladGenerator { h, lindblads })
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn hamiltonian(&self) -> &CMat {
        &self.h
    }

    pub fn lindblads(&self) -> &[CMat] {
        &self.lindblads
    }

    /// Direct evaluation of `F(ρ)`.
    pub fn apply(&self, rho: &CMat) -> CMat {
        let mut out = (&self.h * rho - rho * &self.h) * linalg::c(0.0, -1.0);
        for l in &self.lindblads {
            let ll = l.adjoint() * l;
            out += l * rho * l.adjoint() - (&ll * rho + rho * &ll) * linalg::real(0.5);
        }
        out
    }
}

/// Column-stacking vectorization: `vec(ρ)[i + j·d] = ρ_ij`.
pub fn vectorize(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &CVec, d: usize) -> CMat {
    CMat::from_column_slice(d, d, v.as_slice())
}

/// Matrix of `F` acting on column-stacked states, using
/// `vec(AXB) = (Bᵀ ⊗ A) vec(X)`.
pub fn liouvillian(gen: &LindbladGenerator) -> Result<CMat> {
    let d = gen.dim();
    if d > MAX_DIM {
        return Err(Error::TargetTooLarge { dim: d * d, cap: MAX_DIM * MAX_DIM });
    }
    let id = linalg::identity(d);
    let mi = linalg::c(0.0, -1.0);
    let mut s = (linalg::kron(&id, &gen.h) - linalg::kron(&gen.h.transpose(), &id)) * mi;
    for l in &gen.lindblads {
        let ll = l.adjoint() * l;
        s += linalg::kron(&l.map(|z| z.conj()), l)
            - (linalg::kron(&id, &ll) + linalg::kron(&ll.transpose(), &id)) * linalg::real(0.5);
    }
    Ok(s)
}

fn revalidate(m: CMat) -> Result<DensityOperator> {
    DensityOperator::new(m).map_err(|e| Error::ValidationFailure(e.to_string()))
}

/// `ρ(t) = exp(tF)(ρ₀)` by the dense exponential of the Liouvillian.
pub fn evolve(gen: &LindbladGenerator, rho0: &DensityOperator, t: f64) -> Result<DensityOperator> {
    check_dim(rho0.dim(), gen.dim())?;
    let s = liouvillian(gen)?;
    evolve_with(&s, rho0, t)
}

fn evolve_with(s: &CMat, rho0: &DensityOperator, t: f64) -> Result<DensityOperator> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time {t} must be finite and non-negative")));
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let prop = (s * linalg::real(t)).exp();
    let v = prop * vectorize(rho0.matrix());
    revalidate(unvectorize(&v, rho0.dim()))
}

/// Classical fourth-order Runge-Kutta on the master equation with fixed
/// step no larger than `h`.
pub fn evolve_rk4(gen: &LindbladGenerator, rho0: &DensityOperator, t: f64, h: f64) -> Result<DensityOperator> {
    check_dim(rho0.dim(), gen.dim())?;
    if !(t >= 0.0) || !(h > 0.0) {
        return Err(Error::InvalidArgument("time and step must be positive".into()));
    }
    let steps = (t / h).ceil().max(1.0) as usize;
    let dt = linalg::real(t / steps as f64);
    let half = linalg::real(0.5);
    let mut r = rho0.matrix().clone();
    for _ in 0..steps {
        let k1 = gen.apply(&r);
        let k2 = gen.apply(&(&r + &k1 * dt * half));
        let k3 = gen.apply(&(&r + &k2 * dt * half));
        let k4 = gen.apply(&(&r + &k3 * dt));
        r += (k1 + k2 * linalg::real(2.0) + k3 * linalg::real(2.0) + k4) * (dt / linalg::real(6.0));
    }
    revalidate(r)
}

/// Exponential evolution cross-checked against RK4 (step `1e-3 / max rate`).
pub fn evolve_checked(gen: &LindbladGenerator, rho0: &DensityOperator, t: f64) -> Result<DensityOperator> {
    let exact = evolve(gen, rho0, t)?;
    let rate = gen
        .lindblads
        .iter()
        .map(|l| linalg::operator_norm(l).powi(2))
        .chain(std::iter::once(linalg::operator_norm(&gen.h)))
        .fold(1.0, f64::max);
    let rk = evolve_rk4(gen, rho0, t, 1e-3 / rate)?;
    let dev = linalg::max_abs_diff(exact.matrix(), rk.matrix());
    if dev > CROSS_CHECK_TOL {
        return Err(Error::ValidationFailure(format!(
            "exponential and RK4 disagree by {dev:.3e}"
        )));
    }
    Ok(exact)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Relaxation acting identically on both paths (`L ⊗ 1_s`).
    NonlocalF1,
    /// Relaxation acting separately on each path (`L ⊗ |s⟩⟨s|`).
    LocalF2,
    /// `w1·F1 + w2·F2`.
    Mixture { w1: f64, w2: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub kind: ScenarioKind,
    /// Internal levels `N`.
    pub levels: usize,
    /// `rates[k][k']` is the rate of `|e_k⟩⟨e_k'|`; only `k ≤ k'` is used.
    pub rates: Vec<Vec<f64>>,
    /// Internal energies in increasing order.
    pub energies: Vec<f64>,
    /// Seed used to draw random energies and rates, if any.
    pub seed: Option<u64>,
}

impl Scenario {
    /// `H = 0`, every level decays to the ground state with rate `g`.
    pub fn simple(kind: ScenarioKind, levels: usize, g: f64) -> Self {
        let mut rates = vec![vec![0.0; levels]; levels];
        for r in rates[0].iter_mut() {
            *r = g;
        }
        Scenario {
            kind,
            levels,
            rates,
            energies: vec![0.0; levels],
            seed: None,
        }
    }

    /// Energies uniform in `[0, 1]` (sorted), rates uniform in `[0.2, 1]`
    /// for every `k ≤ k'`.
    pub fn random(kind: ScenarioKind, levels: usize, seed: u64) -> Self {
        let mut rng = random::rng(seed, 0);
        let mut energies: Vec<f64> = (0..levels).map(|_| rng.random::<f64>()).collect();
        energies.sort_by(f64::total_cmp);
        let mut rates = vec![vec![0.0; levels]; levels];
        for k in 0..levels {
            for kp in k..levels {
                rates[k][kp] = 0.2 + 0.8 * rng.random::<f64>();
            }
        }
        Scenario {
            kind,
            levels,
            rates,
            energies,
            seed: Some(seed),
        }
    }

    pub fn with_kind(&self, kind: ScenarioKind) -> Self {
        Scenario { kind, ..self.clone() }
    }

    /// Smallest positive rate.
    pub fn g_min(&self) -> f64 {
        self.rates
            .iter()
            .enumerate()
            .flat_map(|(k, row)| row.iter().skip(k).copied())
            .filter(|&g| g > 0.0)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn decomposition(&self) -> Decomposition {
        Decomposition::bipartite(self.levels, self.levels).expect("levels >= 1")
    }

    fn validate(&self) -> Result<()> {
        let n = self.levels;
        if n < 1 {
            return Err(Error::InvalidRates("need at least one internal level".into()));
        }
        if 2 * n > MAX_DIM {
            return Err(Error::TargetTooLarge { dim: 4 * n * n, cap: MAX_DIM * MAX_DIM });
        }
        if self.energies.len() != n || self.rates.len() != n || self.rates.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidRates(format!("rates must be {n}×{n} and energies length {n}")));
        }
        for (k, row) in self.rates.iter().enumerate() {
            for (kp, &g) in row.iter().enumerate() {
                if !g.is_finite() || g < 0.0 {
                    return Err(Error::InvalidRates(format!("rate g[{k}][{kp}] = {g}")));
                }
                if kp < k && g != 0.0 {
                    return Err(Error::InvalidRates(format!(
                        "rate g[{k}][{kp}] below the diagonal must be zero"
                    )));
                }
            }
        }
        if self.energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidRates("energies must be finite".into()));
        }
        if let ScenarioKind::Mixture { w1, w2 } = self.kind {
            if !(w1 >= 0.0 && w2 >= 0.0) || (w1 + w2 - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidRates(format!("mixture weights {w1}, {w2}")));
            }
        }
        Ok(())
    }

    fn jumps(&self) -> Vec<CMat> {
        let n = self.levels;
        let mut out = Vec::new();
        for k in 0..n {
            for kp in k..n {
                let g = self.rates[k][kp];
                if g > 0.0 {
                    let mut m = linalg::zeros(n, n);
                    m[(k, kp)] = linalg::real(g.sqrt());
                    out.push(m);
                }
            }
        }
        out
    }
}

fn path_projector(s: usize) -> CMat {
    let mut p = linalg::zeros(2, 2);
    p[(s, s)] = linalg::ONE;
    p
}

pub fn build_scenario(s: &Scenario) -> Result<LindbladGenerator> {
    s.validate()?;
    let id2 = linalg::identity(2);
    let h = linalg::kron(&id2, &linalg::from_real_diagonal(&s.energies));
    let nonlocal = |w: f64| -> Vec<CMat> {
        s.jumps()
            .iter()
            .map(|j| linalg::kron(&id2, j) * linalg::real(w.sqrt()))
            .collect()
    };
    let local = |w: f64| -> Vec<CMat> {
        let mut out = Vec::new();
        for p in 0..2 {
            for j in s.jumps() {
                out.push(linalg::kron(&path_projector(p), &j) * linalg::real(w.sqrt()));
            }
        }
        out
    };
    let lindblads = match s.kind {
        ScenarioKind::NonlocalF1 => nonlocal(1.0),
        ScenarioKind::LocalF2 => local(1.0),
        ScenarioKind::Mixture { w1, w2 } => {
            let mut v = nonlocal(w1);
            v.extend(local(w2));
            v.retain(|m| linalg::max_abs(m) > 0.0);
            v
        }
    };
    LindbladGenerator::new(h, lindblads)
}

/// Generator acting on one lifted path register (vacuum plus `N` levels):
/// the internal dynamics on the particle levels, vacuum untouched. The local
/// model's dynamics are the compression of the product of two of these.
pub fn register_generator(s: &Scenario) -> Result<LindbladGenerator> {
    s.validate()?;
    let n = s.levels;
    let embed = |m: &CMat| {
        let mut out = linalg::zeros(n + 1, n + 1);
        out.view_mut((1, 1), (n, n)).copy_from(m);
        out
    };
    LindbladGenerator::new(
        embed(&linalg::from_real_diagonal(&s.energies)),
        s.jumps().iter().map(embed).collect(),
    )
}

/// `(1_N / N) ⊗ |ψ⟩⟨ψ|` with `|ψ⟩ = (|1⟩ + |2⟩)/√2`, path-major.
pub fn initial_state(levels: usize) -> Result<DensityOperator> {
    if levels == 0 {
        return Err(Error::InvalidArgument("need at least one level".into()));
    }
    let plus = CMat::from_element(2, 2, linalg::real(0.5));
    let mixed = linalg::identity(levels) * linalg::real(1.0 / levels as f64);
    DensityOperator::new(linalg::kron(&plus, &mixed))
}

fn check_analytic(n: usize, g: f64, t: f64, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, max: n });
    }
    if !(g > 0.0) || !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("need g > 0 and t >= 0 (g = {g}, t = {t})")));
    }
    Ok(())
}

/// `A_(k)` of the simple nonlocal model: `½ − e^{−gt}(½ − k/(2N))`.
pub fn analytic_nonlocal(n: usize, g: f64, t: f64, k: usize) -> Result<f64> {
    check_analytic(n, g, t, k)?;
    let nf = n as f64;
    Ok(0.5 - (-g * t).exp() * (0.5 - k as f64 / (2.0 * nf)))
}

/// `A_(k)` of the simple local model: `k e^{−gt} / (2N)`.
pub fn analytic_local(n: usize, g: f64, t: f64, k: usize) -> Result<f64> {
    check_analytic(n, g, t, k)?;
    Ok(k as f64 * (-g * t).exp() / (2.0 * n as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeRow {
    pub kyfan: Vec<f64>,
    pub a_s: f64,
    pub predictability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub rows: Vec<TimeRow>,
}

impl TimeSeries {
    /// `A_(k)` trajectory, `k` starting at 1.
    pub fn kyfan(&self, k: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.kyfan[k - 1]).collect()
    }

    pub fn to_csv(&self) -> String {
        let n = self.rows.first().map_or(0, |r| r.kyfan.len());
        let mut out = String::from("t");
        for k in 1..=n {
            out.push_str(&format!(",A_{k}"));
        }
        out.push_str(",A_S,predictability\n");
        for (t, r) in self.times.iter().zip(&self.rows) {
            out.push_str(&sig12(*t));
            for v in r.kyfan.iter().chain([&r.a_s, &r.predictability]) {
                out.push(',');
                out.push_str(&sig12(*v));
            }
            out.push('\n');
        }
        out
    }
}

/// Twelve significant digits.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

fn record(rho: &DensityOperator, l: &Decomposition) -> Result<TimeRow> {
    Ok(TimeRow {
        kyfan: measures::kyfan_profile(rho, l)?,
        a_s: measures::a_s(rho, l)?.value,
        predictability: measures::predictability(rho, l)?,
    })
}

/// Evolves `initial_state(N)` under the scenario and records every Ky-Fan
/// measure, `A_S` and the predictability at each grid time.
pub fn run_timeseries(s: &Scenario, grid: &[f64]) -> Result<TimeSeries> {
    if grid.is_empty() || grid.windows(2).any(|w| !(w[1] > w[0])) || grid[0] < 0.0 {
        return Err(Error::InvalidArgument("time grid must be non-negative and increasing".into()));
    }
    let gen = build_scenario(s)?;
    let sup = liouvillian(&gen)?;
    let rho0 = initial_state(s.levels)?;
    let l = s.decomposition();
    let rows = grid
        .par_iter()
        .map(|&t| record(&evolve_with(&sup, &rho0, t)?, &l))
        .collect::<Result<Vec<_>>>()?;
    Ok(TimeSeries {
        times: grid.to_vec(),
        rows,
    })
}

/// `steps + 1` equally spaced times on `[0, t_max]`.
pub fn uniform_grid(t_max: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|i| t_max * i as f64 / steps.max(1) as f64).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata<'a> {
    pub scenario: &'a Scenario,
    pub t_max: f64,
    pub steps: usize,
    /// Largest `|numeric − closed form|` over the grid, when compared.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic_max_deviation: Option<f64>,
}

/// Largest deviation of a simple-model run from its closed form. Only the
/// simple models (`H = 0`, uniform rate into the ground level) have one.
pub fn analytic_deviation(s: &Scenario, ts: &TimeSeries) -> Result<f64> {
    let g = s.rates[0][0];
    if *s != Scenario::simple(s.kind, s.levels, g) || g <= 0.0 {
        return Err(Error::InvalidArgument("closed forms exist only for the simple models".into()));
    }
    let mut worst: f64 = 0.0;
    for (t, row) in ts.times.iter().zip(&ts.rows) {
        for (i, a) in row.kyfan.iter().enumerate() {
            let exact = match s.kind {
                ScenarioKind::NonlocalF1 => analytic_nonlocal(s.levels, g, *t, i + 1)?,
                ScenarioKind::LocalF2 => analytic_local(s.levels, g, *t, i + 1)?,
                ScenarioKind::Mixture { .. } => {
                    return Err(Error::InvalidArgument("mixtures have no closed form".into()))
                }
            };
            worst = worst.max((a - exact).abs());
        }
    }
    Ok(worst)
}
