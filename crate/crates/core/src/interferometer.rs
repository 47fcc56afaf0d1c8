//! Mach-Zehnder protocol realizing the Ky-Fan measures: path-dependent
//! unitaries `V` (path 1) and `U` (path 2) on the internal degree of freedom,
//! a 50-50 beam splitter, and a detector behind a `k`-dimensional internal
//! filter.
//!
//! States live on path ⊗ internal, path-major, decomposition `[N, N]`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::operator::{compact_block, Decomposition, DensityOperator};
use crate::random;

pub const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolMode {
    /// No filter (`k = N`), `V = 1`, only `U` varied.
    TraceNormSingleU,
    GeneralUV,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProtocolConfig {
    pub internal_dim: usize,
    pub filter_dim: usize,
    pub mode: ProtocolMode,
}

impl ProtocolConfig {
    pub fn new(internal_dim: usize, filter_dim: usize, mode: ProtocolMode) -> Result<Self> {
        if filter_dim == 0 || filter_dim > internal_dim {
            return Err(Error::KOutOfRange { k: filter_dim, max: internal_dim });
        }
        if mode == ProtocolMode::TraceNormSingleU && filter_dim != internal_dim {
            return Err(Error::InvalidArgument("single-U mode has no filter (k = N)".into()));
        }
        Ok(ProtocolConfig { internal_dim, filter_dim, mode })
    }

    pub fn filter(&self) -> CMat {
        filter_projector(self.internal_dim, self.filter_dim)
    }
}

/// Projector onto the first `k` internal basis vectors.
pub fn filter_projector(n: usize, k: usize) -> CMat {
    let mut p = linalg::zeros(n, n);
    for i in 0..k.min(n) {
        p[(i, i)] = linalg::ONE;
    }
    p
}

/// Detection probabilities behind the two output ports, and their
/// decomposition `p₁ = q₁ + q₂ + r`, `p₂ = q₁ + q₂ − r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolOutcome {
    pub p1: f64,
    pub p2: f64,
    pub q1: f64,
    pub q2: f64,
    pub r: f64,
}

fn internal_dim(rho: &DensityOperator) -> Result<usize> {
    let d = rho.dim();
    if !d.is_multiple_of(2) || d == 0 {
        return Err(Error::DimensionMismatch { expected: d + 1, found: d });
    }
    Ok(d / 2)
}

fn check_unitary(u: &CMat, n: usize) -> Result<()> {
    if u.nrows() != n || u.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: u.nrows() });
    }
    let dev = linalg::unitary_deviation(u);
    if dev > UNITARY_TOL {
        return Err(Error::NotUnitary(dev));
    }
    Ok(())
}

fn check_projector(p: &CMat, n: usize) -> Result<()> {
    if p.nrows() != n || p.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: p.nrows() });
    }
    if linalg::hermitian_deviation(p) > UNITARY_TOL || linalg::max_abs_diff(&(p * p), p) > UNITARY_TOL {
        return Err(Error::NotAProjector(0));
    }
    Ok(())
}

/// Simulates the interferometer: `W = |1⟩⟨1|⊗V + |2⟩⟨2|⊗U`, then the beam
/// splitter `|1⟩ → (|1⟩+|2⟩)/√2`, `|2⟩ → (|1⟩−|2⟩)/√2`, then detection of
/// port `s` behind the filter `P_𝒞`.
pub fn run_protocol(rho: &DensityOperator, u: &CMat, v: &CMat, pc: &CMat) -> Result<ProtocolOutcome> {
    let n = internal_dim(rho)?;
    check_unitary(u, n)?;
    check_unitary(v, n)?;
    check_projector(pc, n)?;

    let mut w = linalg::zeros(2 * n, 2 * n);
    w.view_mut((0, 0), (n, n)).copy_from(v);
    w.view_mut((n, n), (n, n)).copy_from(u);
    let s = linalg::real(0.5f64.sqrt());
    let bs = CMat::from_row_slice(2, 2, &[s, s, s, -s]);
    let total = linalg::kron(&bs, &linalg::identity(n)) * w;
    let out = &total * rho.matrix() * total.adjoint();
    let port = |p: usize| -> f64 {
        let mut e = linalg::zeros(2, 2);
        e[(p, p)] = linalg::ONE;
        linalg::trace(&(linalg::kron(&e, pc) * &out)).re
    };

    let l = Decomposition::bipartite(n, n)?;
    let m = rho.matrix();
    let r11 = compact_block(m, &l, 0, 0)?;
    let r22 = compact_block(m, &l, 1, 1)?;
    let r12 = compact_block(m, &l, 0, 1)?;
    let q1 = 0.5 * linalg::trace(&(pc * v * r11 * v.adjoint())).re;
    let q2 = 0.5 * linalg::trace(&(pc * u * r22 * u.adjoint())).re;
    let r = linalg::trace(&(pc * v * r12 * u.adjoint())).re;
    Ok(ProtocolOutcome {
        p1: port(0),
        p2: port(1),
        q1,
        q2,
        r,
    })
}

#[derive(Debug, Clone)]
pub struct UnitaryPair {
    pub u: CMat,
    pub v: CMat,
    /// `max Re Tr(P_𝒞 V⟨1|ρ|2⟩U†)`, i.e. `(p₁ − p₂)/2` at `(U, V)`.
    pub value: f64,
}

fn coherence_block(rho: &DensityOperator) -> Result<(usize, CMat)> {
    let n = internal_dim(rho)?;
    let l = Decomposition::bipartite(n, n)?;
    Ok((n, compact_block(rho.matrix(), &l, 0, 1)?))
}

/// `(p₁ − p₂)/2 = Re Tr(P_𝒞 V C U†)` with `C = ⟨1|ρ|2⟩`.
pub fn half_contrast(c: &CMat, u: &CMat, v: &CMat, k: usize) -> f64 {
    let m = v * c * u.adjoint();
    (0..k).map(|i| m[(i, i)].re).sum()
}

/// Optimal path unitaries from the SVD `C = Σ s_n |a_n⟩⟨b_n|`: `V` sends
/// `a_n` and `U` sends `b_n` to the `n`-th filter basis vector.
pub fn optimal_uv(rho: &DensityOperator, k: usize) -> Result<UnitaryPair> {
    let (n, c) = coherence_block(rho)?;
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, max: n });
    }
    let svd = linalg::svd(&c);
    let v = svd.u.adjoint();
    let u = svd.v_adj.clone();
    let value = svd.s.iter().take(k).sum();
    Ok(UnitaryPair { u, v, value })
}

/// Unfiltered optimum with `V = 1`: `U` is the unitary polar factor of `C`.
pub fn optimal_single_u(rho: &DensityOperator) -> Result<UnitaryPair> {
    let (n, c) = coherence_block(rho)?;
    let svd = linalg::svd(&c);
    let u = &svd.u * &svd.v_adj;
    let v = linalg::identity(n);
    let value = half_contrast(&c, &u, &v, n);
    Ok(UnitaryPair { u, v, value })
}

/// Independent restarts used by [`stochastic_maximize`].
pub const RESTARTS: usize = 4;

/// Hill climbing over `(U, V)` with random near-identity unitary kicks
/// `exp(iεH)`, `RESTARTS` restarts of `iters` steps each; the best value is
/// returned (lowest restart index on ties).
pub fn stochastic_maximize(rho: &DensityOperator, k: usize, iters: usize, seed: u64) -> Result<UnitaryPair> {
    let (n, c) = coherence_block(rho)?;
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, max: n });
    }
    if iters == 0 {
        return Err(Error::InvalidArgument("iters must be positive".into()));
    }
    let climb = |restart: usize| -> UnitaryPair {
        let mut rng = random::rng(seed, restart as u64);
        let mut u = random::haar_unitary(&mut rng, n);
        let mut v = random::haar_unitary(&mut rng, n);
        let mut best = half_contrast(&c, &u, &v, k);
        let mut step = 0.5;
        for _ in 0..iters {
            let du = linalg::expi_hermitian(&random::random_hermitian(&mut rng, n, step));
            let dv = linalg::expi_hermitian(&random::random_hermitian(&mut rng, n, step));
            let (cu, cv) = (&du * &u, &dv * &v);
            let val = half_contrast(&c, &cu, &cv, k);
            if val > best {
                best = val;
                u = cu;
                v = cv;
                step = (step * 1.3).min(1.0);
            } else {
                step = (step * 0.93).max(1e-4);
            }
        }
        UnitaryPair { u, v, value: best }
    };
    let runs: Vec<UnitaryPair> = (0..RESTARTS).into_par_iter().map(climb).collect();
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.value > runs[best].value {
            best = i;
        }
    }
    Ok(runs.into_iter().nth(best).expect("at least one restart"))
}
