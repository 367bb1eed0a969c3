//! Histograms of residuals and losses for a regression log, and of principals
//! and scores for a classification log.

use assessor_bench::dataio::{dataset_calibration, generate_logs, synth_dataset, SynthSpec};
use assessor_bench::experiment::distribution_report;
use assessor_bench::learners::default_grid;
use assessor_bench::metrics::{MetricKind, Task};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for task in [Task::Regression, Task::Classification] {
        let ds = synth_dataset(&SynthSpec { n: 500, ..SynthSpec::new(task, 2) })?;
        let log = generate_logs(&[ds], &default_grid(task), 0.3, 2)?.remove(0);
        let b = match task {
            Task::Regression => Some(dataset_calibration(&log)?),
            Task::Classification => None,
        };
        let report = distribution_report(&log, MetricKind::all_for(task), b)?;
        println!("{} ({} rows)", report.dataset, report.rows);
        for h in &report.histograms {
            let peak = *h.counts.iter().max().unwrap() as f64;
            let spark: String = h
                .counts
                .iter()
                .map(|&c| [' ', '.', ':', '-', '=', '+', '*', '#'][((c as f64 / peak) * 7.0).round() as usize])
                .collect();
            println!("  {:<18} [{:>8.3}, {:>8.3}] mode {:>7.3} |{spark}|", h.name, h.lo, h.hi, h.mode());
        }
    }
    Ok(())
}
