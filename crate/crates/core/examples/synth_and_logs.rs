//! Generates a synthetic dataset, trains a small subject grid on it and
//! writes the canonical prediction log plus its JSON sidecar.

use assessor_bench::dataio::{generate_logs, read_log, synth_dataset, validate_log, Shape, SynthSpec};
use assessor_bench::learners::default_grid;
use assessor_bench::metrics::Task;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SynthSpec {
        n: 400,
        outlier_rate: 0.05,
        outlier_scale: 4.0,
        shape: Shape::Skewed,
        ..SynthSpec::new(Task::Regression, 7)
    };
    let ds = synth_dataset(&spec)?;
    println!("{}: {} rows, {} outliers", ds.name, ds.features.nrows(), ds.n_corrupted());

    let grid = &default_grid(Task::Regression)[..6];
    let log = generate_logs(&[ds], grid, 0.3, 7)?.remove(0);
    let dir = std::env::temp_dir().join("assessor-bench-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("log.csv");
    assessor_bench::dataio::write_log(&path, &log)?;
    let report = validate_log(&path, Some(Task::Regression))?;
    println!("{} rows written to {}, valid: {}", report.rows, path.display(), report.is_valid());
    assert_eq!(read_log(&path, None)?, log);
    Ok(())
}
