//! Calibrates the logistic loss on a residual sample: a residual equal to the
//! mean absolute residual scores exactly 0.5.

use assessor_bench::metrics::{calibrate_b, eval_loss_residual, MetricKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let residuals = [0.2, -0.4, 1.1, -0.9, 0.05, 2.3, -0.6];
    let b = calibrate_b(&residuals)?;
    let mean_abs = residuals.iter().map(|e: &f64| e.abs()).sum::<f64>() / residuals.len() as f64;
    println!("mean |e| = {mean_abs:.4}, B = ln 3 / mean |e| = {:.4}", b.value());
    for e in [0.0, mean_abs / 2.0, mean_abs, 2.0 * mean_abs, 10.0 * mean_abs] {
        let l = eval_loss_residual(MetricKind::LogisticUnsigned, e, Some(b))?;
        println!("|e| = {e:>7.4}  L_L = {l:.6}");
    }
    Ok(())
}
