//! Ky-Fan and Schatten superposition measures of the coherence block, their
//! bound by the marginal fidelities and the predictability, and the state
//! that saturates the bound.

use superposition::linalg::real;
use superposition::measures::{
    dominance_check, kyfan_bound, kyfan_measure, kyfan_profile, norm_measure, predictability, sharp_state,
};
use superposition::operator::pinch;
use superposition::{random, CMat, Decomposition, DensityOperator, NormSpec};

fn main() -> superposition::Result<()> {
    let l = Decomposition::bipartite(1, 1)?;
    let qubit = DensityOperator::new(CMat::from_row_slice(2, 2, &[real(0.5), real(0.3), real(0.3), real(0.5)]))?;
    println!("qubit with coherence 0.6: A_(1) = {}", kyfan_measure(&qubit, &l, 1)?);

    let mut rng = random::rng(5, 0);
    let l = Decomposition::bipartite(3, 3)?;
    let rho = random::random_state(&mut rng, 6);
    let p = predictability(&rho, &l)?;
    println!("random state over [3,3], predictability {p:.6}");
    for (k, a) in kyfan_profile(&rho, &l)?.iter().enumerate() {
        let bound = kyfan_bound(&rho, &l, k + 1)?;
        println!("  A_({}) = {a:.6} <= {bound:.6}   A^2 + P^2 = {:.6}", k + 1, a * a + p * p);
    }
    for spec in [NormSpec::Trace, NormSpec::SchattenP(2.0), NormSpec::SchattenP(f64::INFINITY)] {
        println!("  {:<14} {:.6}", spec.name(), norm_measure(&rho, &l, spec)?);
    }

    // damping the coherences lowers every Ky-Fan value, hence every norm
    let damped = rho.mix(&pinch(&rho, &l)?, 0.4)?;
    let specs = [NormSpec::SchattenP(1.5), NormSpec::SchattenP(3.0)];
    let rep = dominance_check(&damped, &rho, &l, &specs)?;
    println!("damped state: Ky-Fan dominated = {}, all norms dominated = {}", rep.kyfan_dominated, rep.all_norms_dominated);

    let sharp = sharp_state(0.3, &[0.7, 0.3], &[0.5, 0.25, 0.25])?;
    let l = Decomposition::bipartite(2, 3)?;
    for k in 1..=2 {
        println!(
            "sharp state: A_({k}) = {:.12}, bound = {:.12}",
            kyfan_measure(&sharp, &l, k)?,
            kyfan_bound(&sharp, &l, k)?
        );
    }
    Ok(())
}
