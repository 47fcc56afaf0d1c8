//! Channel classes relative to a two-block split: SP channels (block weights
//! preserved) never raise A_S or A_Tr, channels built from local register
//! channels never raise any Ky-Fan measure, and a generic channel that does
//! not preserve block-diagonal states is caught raising A_S.

use superposition::channels::{
    classify, make_lsp, monotonicity_harness, random_channel, random_sector_channel, random_sp_channel,
    HarnessMode, Monotone,
};
use superposition::secondq::build_lift;
use superposition::{io, random, Decomposition, NormSpec};

fn main() -> superposition::Result<()> {
    let l = Decomposition::bipartite(2, 2)?;
    let mut rng = random::rng(21, 0);

    let sp = random_sp_channel(&mut rng, &l, 3);
    let c = classify(&sp, &l)?;
    println!("SP channel: is_sp={} block_preserving={}", c.is_sp, c.is_block_preserving);
    for m in [Monotone::RelativeEntropy, Monotone::Norm(NormSpec::Trace)] {
        let r = monotonicity_harness(&sp, &l, m, HarnessMode::Random, 100, 1)?;
        println!("  {m:?}: largest change {:+.3e} over {} states", r.max_increase, r.samples);
    }

    let lift = build_lift(&l)?;
    let phi1 = random_sector_channel(&mut rng, 2, 2);
    let phi2 = random_sector_channel(&mut rng, 2, 2);
    let lsp = make_lsp(&lift, &phi1, &phi2)?;
    let r = monotonicity_harness(&lsp.channel, &l, Monotone::AllKyFan, HarnessMode::Random, 100, 2)?;
    println!("local channel: every A_(k) non-increasing = {} (largest change {:+.3e})", r.passed(), r.max_increase);

    let generic = random_channel(&mut rng, 4, 2);
    let c = classify(&generic, &l)?;
    let r = monotonicity_harness(&generic, &l, Monotone::RelativeEntropy, HarnessMode::Pinched, 50, 3)?;
    println!(
        "generic channel: block_preserving={} A_S raised on {} of {} block-diagonal inputs",
        c.is_block_preserving, r.violations, r.samples
    );
    if let Some(w) = r.witness {
        println!("  witness: {}", io::matrix_to_json(w.matrix()));
    }
    Ok(())
}
