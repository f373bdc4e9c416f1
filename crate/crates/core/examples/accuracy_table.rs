//! Seeded 60-record benchmark and its accuracy table.
//!
//! ```bash
//! cargo run --release --example accuracy_table -- 42
//! ```

use vsi_fault::{evaluate, gen_corpus, CorpusSpec, Thresholds, WindowSpec};

fn main() -> vsi_fault::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(42);
    let spec = CorpusSpec {
        seed,
        ..CorpusSpec::default()
    };
    let corpus = gen_corpus(&spec)?;
    let report = evaluate(&corpus, &WindowSpec::default(), &Thresholds::default())?;
    print!("{}", report.to_table());

    let misses: Vec<_> = report
        .labels
        .iter()
        .enumerate()
        .flat_map(|(i, t)| {
            let row = &report.confusion[i];
            report
                .labels
                .iter()
                .zip(row)
                .filter(move |(p, &n)| *p != t && n > 0)
                .map(move |(p, n)| format!("{t} -> {p} x{n}"))
        })
        .collect();
    if !misses.is_empty() {
        println!("confusions: {}", misses.join(", "));
    }
    Ok(())
}
