//! One target-versus-proxy comparison: an assessor trained on the squared
//! loss against one trained on the signed squared loss and mapped across.

use assessor_bench::dataio::{generate_logs, synth_dataset, SynthSpec};
use assessor_bench::experiment::{run_cell, CellSpec};
use assessor_bench::learners::{default_assessors, default_grid};
use assessor_bench::metrics::{MetricKind, Task};
use assessor_bench::stats::BootstrapConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ds = synth_dataset(&SynthSpec { n: 600, outlier_rate: 0.1, outlier_scale: 5.0, ..SynthSpec::new(Task::Regression, 5) })?;
    let log = generate_logs(&[ds], &default_grid(Task::Regression), 0.3, 5)?.remove(0);
    for assessor in default_assessors() {
        let spec = CellSpec {
            dataset: log.meta.dataset.clone(),
            assessor: assessor.seed(5),
            target: MetricKind::SquaredUnsigned,
            proxy: MetricKind::SquaredSigned,
            split_seed: 5,
            train_fraction: 0.7,
            bootstrap: BootstrapConfig::default(),
            bootstrap_seed: 5,
        };
        let r = run_cell(&spec, &log)?.result;
        println!(
            "{:<24} target rho {:.3} [{:.3}, {:.3}]  proxy rho {:.3} [{:.3}, {:.3}]  {:?} margin {:.3}",
            r.family, r.rho_target.rho, r.ci_target.lo, r.ci_target.hi, r.rho_proxy.rho, r.ci_proxy.lo,
            r.ci_proxy.hi, r.verdict.outcome, r.verdict.margin
        );
    }
    Ok(())
}
