//! Fits every default subject configuration on a synthetic regression task
//! and prints its held-out mean absolute error.

use assessor_bench::dataio::{grouped_split, synth_dataset, SynthSpec};
use assessor_bench::learners::{default_grid, fit};
use assessor_bench::metrics::Task;
use ndarray::Axis;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ds = synth_dataset(&SynthSpec { n: 600, ..SynthSpec::new(Task::Regression, 1) })?;
    let ids: Vec<u64> = (0..ds.features.nrows() as u64).collect();
    let split = grouped_split(&ids, 0.7, 1)?;
    let (train, test) = split.partition_rows(&ids);
    let (xtr, ytr) = (ds.features.select(Axis(0), &train), ds.targets.select(Axis(0), &train));
    let (xte, yte) = (ds.features.select(Axis(0), &test), ds.targets.select(Axis(0), &test));
    for spec in default_grid(Task::Regression) {
        let pred = fit(&spec, xtr.view(), ytr.view())?.predict(xte.view())?;
        let mae = (&pred - &yte).mapv(f64::abs).mean().unwrap();
        println!("{:<24} {:?} mae {mae:.3}", spec.family.name(), spec.params);
    }
    Ok(())
}
