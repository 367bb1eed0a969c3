//! Splits a multi-row log by instance id so that no instance lands on both
//! sides.

use assessor_bench::dataio::grouped_split;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // 12 instances, each logged under 3 subjects
    let ids: Vec<u64> = (0..3).flat_map(|_| 0..12).collect();
    let split = grouped_split(&ids, 0.75, 99)?;
    let (train, test) = split.partition_rows(&ids);
    println!("train ids {:?}", split.train_ids);
    println!("test ids  {:?}", split.test_ids);
    println!("{} train rows, {} test rows, overlap {}", train.len(), test.len(), split.overlap());
    Ok(())
}
