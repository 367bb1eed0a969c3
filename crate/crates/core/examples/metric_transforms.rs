//! Maps a value of one metric onto another through the shared residual or
//! principal, and shows which directions are undefined.

use assessor_bench::metrics::{calibrate_b, eval_score, MetricKind, Principal, TransformSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let b = calibrate_b(&[1.0, -1.0, 0.5, -1.5])?;
    println!("B = {:.4}", b.value());

    let residual = -2.0;
    for from in MetricKind::REGRESSION {
        let v = assessor_bench::metrics::eval_loss_residual(from, residual, Some(b))?;
        let row: Vec<String> = MetricKind::REGRESSION
            .iter()
            .map(|&to| match TransformSpec::new(from, to, Some(b)) {
                Ok(t) => format!("{:>8.4}", t.apply(v).unwrap()),
                Err(_) => format!("{:>8}", "NA"),
            })
            .collect();
        println!("{:>6} = {v:>8.4} -> {}", from.symbol(), row.join(" "));
    }

    let r = Principal::new(0.8)?;
    for from in MetricKind::CLASSIFICATION {
        let v = eval_score(from, r)?;
        let to_log = TransformSpec::new(from, MetricKind::LogScore, None)?.apply(v)?;
        println!("{} = {v:.6}, as S_L = {to_log:.6}", from.symbol());
    }
    Ok(())
}
