//! Spearman correlation with average-rank ties and a paired percentile
//! bootstrap for two predictors of the same truth.

use assessor_bench::seed::rng;
use assessor_bench::stats::{paired_bootstrap_ci, spearman, verdict, BootstrapConfig};
use rand::Rng;
use rand_distr::StandardNormal;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("tied example rho = {:.6}", spearman(&[1.0, 2.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 4.0])?.rho);

    let mut g = rng(3);
    let truth: Vec<f64> = (0..300).map(|_| g.sample(StandardNormal)).collect();
    let good: Vec<f64> = truth.iter().map(|t| t + 0.5 * g.sample::<f64, _>(StandardNormal)).collect();
    let poor: Vec<f64> = truth.iter().map(|t| t + 2.0 * g.sample::<f64, _>(StandardNormal)).collect();
    let cfg = BootstrapConfig::default();
    let ci = paired_bootstrap_ci(&truth, &[&good, &poor], None, &cfg, 4)?;
    let (rg, rp) = (spearman(&good, &truth)?.rho, spearman(&poor, &truth)?.rho);
    println!("good rho {rg:.3} CI [{:.3}, {:.3}]", ci[0].lo, ci[0].hi);
    println!("poor rho {rp:.3} CI [{:.3}, {:.3}]", ci[1].lo, ci[1].hi);
    println!("poor as proxy for good: {:?}", verdict(&ci[1], &ci[0], rp, rg));
    Ok(())
}
