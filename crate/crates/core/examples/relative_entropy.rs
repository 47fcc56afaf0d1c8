//! Relative entropy of superposition for a qutrit split as [1, 2], the block
//! form of the state, and the same value reached from a rotated projector
//! family through `align_basis`.

use superposition::linalg::{self, real};
use superposition::measures::{a_s, a_s_min_check};
use superposition::operator::{align_basis, block_form, pinch};
use superposition::{random, CMat, Decomposition, DensityOperator, Operator};

fn main() -> superposition::Result<()> {
    let plus = DensityOperator::new(CMat::from_element(2, 2, real(0.5)))?;
    let l = Decomposition::bipartite(1, 1)?;
    println!("|+><+| over [1,1]: A_S = {:.12} (ln 2 = {:.12})", a_s(&plus, &l)?.value, 2f64.ln());

    let mut rng = random::rng(3, 0);
    let l = Decomposition::new(vec![1, 2])?;
    let rho = random::random_state(&mut rng, 3);
    let value = a_s(&rho, &l)?.value;
    println!("random qutrit over [1,2]: A_S = {value:.12}");
    println!("  best of 200 sampled block-diagonal states: {:.12}", a_s_min_check(&rho, &l, 200, 1)?);
    println!("  pinched state:\n{}", pinch(&rho, &l)?.matrix());

    let bf = block_form(&rho, &l)?;
    println!(
        "  block probabilities {:?}, largest |D| = {:.6}, reassembly error {:.1e}",
        bf.probs,
        bf.max_contraction(),
        linalg::max_abs_diff(&bf.reassemble(), rho.matrix())
    );

    // the same split seen through a rotated basis
    let u = random::haar_unitary(&mut rng, 3);
    let rotated = rho.conjugate(&u.adjoint())?;
    let projectors = l
        .projectors()
        .into_iter()
        .map(|p| Operator::new(u.adjoint() * p * &u))
        .collect::<superposition::Result<Vec<_>>>()?;
    let (aligned, dims) = align_basis(&rotated, &projectors)?;
    println!("  via rotated projectors: A_S = {:.12} over {:?}", a_s(&aligned, &dims)?.value, dims.dims());
    Ok(())
}
