//! Simulates a five-driver study and prints a window-size sweep.
//!
//! ```text
//! cargo run --release -p gazewall --example synthetic_study -- [duration_s] [seed] [windows...]
//! ```

use std::time::Instant;

use gazewall::evaluation::{format_confusion, format_sweep_table, window_sweep, EvalConfig};
use gazewall::synth::{make_corpus, CorpusConfig};
use gazewall::{FeatureConfig, HeatmapConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let duration: u32 = args.first().map_or(Ok(600), |s| s.parse())?;
    let seed: u64 = args.get(1).map_or(Ok(2024), |s| s.parse())?;
    let windows: Vec<u32> = if args.len() > 2 {
        args[2..].iter().map(|s| s.parse()).collect::<Result<_, _>>()?
    } else {
        vec![5, 10, 15, 20, 25, 30]
    };

    let start = Instant::now();
    let sessions = make_corpus(5, seed, &CorpusConfig::with_duration(duration))?;
    let table = window_sweep(&sessions, &windows, &HeatmapConfig::default(), &FeatureConfig::default(), &EvalConfig::default())?;
    print!("{}", format_sweep_table(&table));
    println!("spearman(window, accuracy) = {:.3}", table.window_accuracy_spearman());
    if let Some(last) = table.rows.last() {
        println!("\nconfusion at {} s:\n{}", last.window_s, format_confusion(&last.report.confusion));
        for f in &last.report.folds {
            println!("fold {} {:?}: acc {:.1} f1 {:.3}", f.fold, f.held_out_drivers, f.accuracy, f.f1);
        }
    }
    println!("elapsed {:.1} s", start.elapsed().as_secs_f64());
    Ok(())
}
