//! Lifting a single particle spread over two subspaces to two mode
//! registers: the relative entropy of superposition reappears as a relative
//! entropy of the lifted state, the separable candidate passes the
//! first-order optimality test, and for qubits the lifted entanglement of
//! formation equals the superposition of formation.

use superposition::measures::{a_f, a_s, FormationConfig};
use superposition::secondq::{
    build_lift, candidate_min_separable, es_decomposition_identity, first_order_min_check, induced_measure,
    lift_state, InducedEntanglement,
};
use superposition::{random, Decomposition};

fn main() -> superposition::Result<()> {
    let l = Decomposition::bipartite(2, 3)?;
    let m = build_lift(&l)?;
    println!("lift of {:?}: registers {:?}, {} -> {} dims", l.dims(), m.target_dims(), l.total(), m.target_dim());

    let mut rng = random::rng(8, 0);
    let rho = random::random_state(&mut rng, l.total());
    let lifted = induced_measure(&m, InducedEntanglement::RelativeEntropySurrogate, &rho)?;
    println!("A_S = {:.12}, lifted relative entropy = {lifted:.12}", a_s(&rho, &l)?.value);

    let sigma = lift_state(&m, &rho)?;
    let (split, pairs) = m.paired()?;
    let star = candidate_min_separable(&sigma, split, &pairs)?;
    let rep = first_order_min_check(&sigma, &star, split, 200, 1)?;
    println!(
        "first-order check over {} product directions: min derivative {:.4}, violations {}",
        rep.samples, rep.min_derivative, rep.violations
    );
    let id = es_decomposition_identity(&sigma, split, &pairs)?;
    println!("S(sigma||rho*) = {:.12}, A_S over the pairs = {:.12}", id.relative_entropy, id.a_s);

    let l = Decomposition::bipartite(1, 1)?;
    let m = build_lift(&l)?;
    let q = random::random_state(&mut rng, 2);
    let ef = induced_measure(&m, InducedEntanglement::FormationTwoQubit, &q)?;
    let af = a_f(&q, &l, &FormationConfig::default())?.value;
    println!("qubit: E_f of lift = {ef:.9}, A_f = {af:.9}");
    Ok(())
}
