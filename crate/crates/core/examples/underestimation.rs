//! Mean-reversion diagnostic: how far below the true unsigned loss a signed
//! proxy lands compared with a direct assessor, overall and per decile.

use assessor_bench::dataio::{generate_logs, synth_dataset, SynthSpec};
use assessor_bench::experiment::{run_cell, underestimation_summary, CellSpec};
use assessor_bench::learners::{default_assessors, default_grid};
use assessor_bench::metrics::{MetricKind, Task};
use assessor_bench::stats::BootstrapConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ds = synth_dataset(&SynthSpec { n: 600, ..SynthSpec::outlier_heavy(6) })?;
    let log = generate_logs(&[ds], &default_grid(Task::Regression), 0.3, 6)?.remove(0);
    for target in [MetricKind::SimpleUnsigned, MetricKind::SquaredUnsigned] {
        let spec = CellSpec {
            dataset: log.meta.dataset.clone(),
            assessor: default_assessors()[0].seed(6),
            target,
            proxy: target.signed_counterpart().unwrap(),
            split_seed: 6,
            train_fraction: 0.7,
            bootstrap: BootstrapConfig { n_resamples: 200, ..Default::default() },
            bootstrap_seed: 6,
        };
        let u = underestimation_summary(&run_cell(&spec, &log)?)?;
        println!("{}: mean truth {:.3}, proxy gap {:.3}, target gap {:.3}", target.symbol(), u.mean_truth, u.proxy_gap, u.target_gap);
        let fmt = |v: &[f64]| v.iter().map(|g| format!("{g:>7.2}")).collect::<Vec<_>>().join("");
        println!("  proxy deciles  {}", fmt(&u.decile_proxy_gaps));
        println!("  target deciles {}", fmt(&u.decile_target_gaps));
    }
    Ok(())
}
