//! Word sources and return words: Thue–Morse, the squarefree indicator
//! and a block program, cut at returns to a marker.

use nonneg_cocycle::symbolic::{
    decompose_returns, empirical_frequency, long_word_mass, BlockProgram, EpochSchedule,
    InfiniteWordSource, FiniteWord,
};

fn main() -> nonneg_cocycle::Result<()> {
    let tm = InfiniteWordSource::thue_morse();
    let prefix = tm.emit_prefix(100_000)?;
    println!("Thue-Morse: {}", FiniteWord::from(&prefix[..32]));

    let marker = [0, 1, 1, 0];
    let dec = decompose_returns(&prefix, &marker)?;
    let i = dec.last_index();
    println!(
        "returns to [0110]: i = {i}, i/τ_i = {:.5}, frequency of 0110 = {:.5}",
        i as f64 / dec.last_return_time() as f64,
        empirical_frequency(&prefix, &marker)
    );
    let mut lengths: Vec<usize> = dec.return_lengths().collect();
    lengths.sort_unstable();
    lengths.dedup();
    println!("distinct return-word lengths: {lengths:?}");

    let sf = InfiniteWordSource::squarefree(1 << 17)?.emit_prefix(100_000)?;
    println!(
        "squarefree: {} ... density {:.5} (6/π² = {:.5})",
        FiniteWord::from(&sf[..24]),
        empirical_frequency(&sf, &[1]),
        6.0 / std::f64::consts::PI.powi(2)
    );
    let dec = decompose_returns(&sf, &[0, 0])?;
    println!("squarefree returns to [00]: long-word mass above 64 = {:.4}", long_word_mass(&dec, 64));

    // sources are plain data: they round-trip through TOML
    let x = InfiniteWordSource::bernoulli(vec![0.5, 0.5, 0.0, 0.0], 1)?;
    let program = InfiniteWordSource::block_schedule(4, BlockProgram::nolimit(x, EpochSchedule::Geometric { base: 4 }))?;
    let text = program.to_toml()?;
    assert_eq!(InfiniteWordSource::from_toml(&text)?, program);
    println!("block program head: {}", program.emit_prefix(40)?);
    Ok(())
}
