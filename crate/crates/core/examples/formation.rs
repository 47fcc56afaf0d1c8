//! Superposition of formation versus the relative entropy of superposition.
//!
//! For qubits split as [1,1] the optimizer is compared with the two-qubit
//! entanglement of formation of the lifted state; for a larger split the
//! reported value is bracketed from below by A_S.

use std::time::Instant;

use superposition::measures::{a_f, a_s, FormationConfig};
use superposition::secondq::{build_lift, induced_measure, InducedEntanglement};
use superposition::{random, Decomposition, Witness};

fn main() -> superposition::Result<()> {
    let cfg = FormationConfig::default();
    let l = Decomposition::bipartite(1, 1)?;
    let lift = build_lift(&l)?;
    let mut rng = random::rng(11, 0);
    println!("qubit states, dims [1,1]");
    for _ in 0..4 {
        let rho = random::random_state(&mut rng, 2);
        let af = a_f(&rho, &l, &cfg)?;
        let ef = induced_measure(&lift, InducedEntanglement::FormationTwoQubit, &rho)?;
        let as_ = a_s(&rho, &l)?.value;
        println!("  A_S = {as_:.6}  A_f = {:.6}  E_f(lifted) = {ef:.6}", af.value);
    }

    let l = Decomposition::bipartite(3, 3)?;
    let rho = random::random_full_rank(&mut rng, 6);
    let start = Instant::now();
    let af = a_f(&rho, &l, &cfg)?;
    let members = match &af.witness {
        Some(Witness::Ensemble(e)) => e.len(),
        _ => 0,
    };
    println!(
        "full-rank state, dims [3,3]: A_S = {:.6} <= A_f = {:.6} ({members} members, {:.2?})",
        a_s(&rho, &l)?.value,
        af.value,
        start.elapsed()
    );
    Ok(())
}
