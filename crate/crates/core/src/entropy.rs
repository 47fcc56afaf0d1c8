//! Von Neumann and relative entropies, in nats.

use crate::error::Result;
use crate::linalg::{self, CMat};
use crate::operator::{check_dim, DensityOperator};

/// Eigenvalues at or below this count as outside the support.
pub const SUPPORT_TOL: f64 = 1e-12;
/// Weight of `ρ` outside `supp(σ)` above which `S(ρ||σ)` is infinite.
pub const LEAK_TOL: f64 = 1e-10;

/// `S(ρ) = −Tr ρ ln ρ` with `0 ln 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    matrix_entropy(rho.matrix())
}

pub(crate) fn matrix_entropy(m: &CMat) -> f64 {
    linalg::shannon(&linalg::eigvalsh(m))
}

/// `S(ρ||σ) = Tr ρ ln ρ − Tr ρ ln σ`; `+∞` when the support of `ρ` is not
/// contained in the support of `σ`.
pub fn relative_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    check_dim(sigma.dim(), rho.dim())?;
    Ok(matrix_relative_entropy(rho.matrix(), sigma.matrix()))
}

pub(crate) fn matrix_relative_entropy(rho: &CMat, sigma: &CMat) -> f64 {
    let (mu, w) = linalg::eigh(sigma);
    let rotated = w.adjoint() * rho * &w;
    let mut leak = 0.0;
    let mut cross = 0.0;
    for (i, &m) in mu.iter().enumerate() {
        let weight = rotated[(i, i)].re;
        if m > SUPPORT_TOL {
            cross += weight * m.ln();
        } else {
            leak += weight;
        }
    }
    if leak > LEAK_TOL {
        return f64::INFINITY;
    }
    let neg_s: f64 = linalg::eigvalsh(rho).iter().map(|&x| linalg::xlnx(x)).sum();
    (neg_s - cross).max(0.0)
}
