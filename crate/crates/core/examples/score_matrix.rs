//! Full target x proxy matrix over two classification datasets.

use assessor_bench::dataio::{generate_logs, synth_dataset, Shape, SynthSpec};
use assessor_bench::experiment::{run_matrix, MatrixConfig};
use assessor_bench::learners::{default_assessors, default_grid};
use assessor_bench::metrics::Task;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let datasets = [Shape::Symmetric, Shape::Bimodal]
        .into_iter()
        .enumerate()
        .map(|(i, shape)| synth_dataset(&SynthSpec { n: 500, shape, ..SynthSpec::new(Task::Classification, i as u64) }))
        .collect::<Result<Vec<_>, _>>()?;
    let logs = generate_logs(&datasets, &default_grid(Task::Classification), 0.3, 8)?;
    let report = run_matrix(&logs, &MatrixConfig::new(Task::Classification, default_assessors(), 8))?;
    for fam in &report.families {
        println!("{} (rows target, columns proxy)", fam.family);
        for (t, row) in report.targets.iter().zip(&fam.score) {
            let cells: Vec<String> = row.iter().map(|c| c.map_or("NA".into(), |v| format!("{v:>3}"))).collect();
            println!("  {:<4} {}", t.symbol(), cells.join(" "));
        }
    }
    Ok(())
}
