//! Which-path interferometry: path unitaries, a 50/50 beam splitter and a
//! rank-k filter behind one output port. Half the best port contrast is the
//! Ky-Fan measure A_(k); the closed-form optimum is compared with a blind
//! stochastic search.

use superposition::interferometer::{filter_projector, optimal_uv, run_protocol, stochastic_maximize};
use superposition::measures::kyfan_measure;
use superposition::{random, Decomposition};

fn main() -> superposition::Result<()> {
    let mut rng = random::rng(13, 0);
    let n = 3;
    let l = Decomposition::bipartite(n, n)?;
    let rho = random::random_state(&mut rng, 2 * n);
    for k in 1..=n {
        let pair = optimal_uv(&rho, k)?;
        let out = run_protocol(&rho, &pair.u, &pair.v, &filter_projector(n, k))?;
        let search = stochastic_maximize(&rho, k, 3000, k as u64)?;
        println!(
            "k={k}: A_(k) = {:.10}  (p1 - p2)/2 = {:.10}  search = {:.6}",
            kyfan_measure(&rho, &l, k)?,
            (out.p1 - out.p2) / 2.0,
            search.value
        );
    }
    Ok(())
}
