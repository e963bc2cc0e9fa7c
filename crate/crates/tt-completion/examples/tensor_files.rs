//! Tensor and mask files: text first, binary twin for bulk data.
//!
//! ```bash
//! cargo run --release --example tensor_files
//! ```

use tt_completion::experiments::{bernoulli_mask, random_tt_tensor};
use tt_completion::io::{
    read_mask, read_tensor, write_mask, write_tensor, write_tensor_binary,
};
use tt_completion::Result;

fn main() -> Result<()> {
    let dir = std::env::temp_dir();
    let tensor_path = dir.join("tt_completion_demo.tns");
    let binary_path = dir.join("tt_completion_demo.tnsb");
    let mask_path = dir.join("tt_completion_demo.msk");

    let t = random_tt_tensor(&[2, 3, 2], &[1, 2, 2, 1], 5)?;
    write_tensor(&tensor_path, &t)?;
    let back = read_tensor(&tensor_path)?;
    assert_eq!(back.data(), t.data(), "text round trip is bit-exact");

    println!("text format ({}):", tensor_path.display());
    let raw = std::fs::read_to_string(&tensor_path).expect("just written");
    for line in raw.lines().take(6) {
        println!("  {line}");
    }
    println!("  ... one value per line, first index fastest\n");

    write_tensor_binary(&binary_path, &t)?;
    let back = read_tensor(&binary_path)?;
    assert_eq!(back.data(), t.data(), "binary round trip is bit-exact");
    let text_len = std::fs::metadata(&tensor_path).expect("meta").len();
    let bin_len = std::fs::metadata(&binary_path).expect("meta").len();
    println!("sizes: text {text_len} bytes, binary {bin_len} bytes (read_tensor sniffs the format)");

    let mask = bernoulli_mask(&[2, 3, 2], 0.5, 6)?;
    write_mask(&mask_path, &mask)?;
    let back = read_mask(&mask_path)?;
    assert_eq!(back, mask);
    println!(
        "mask file {} observes {}/{} entries",
        mask_path.display(),
        mask.observed_count(),
        mask.len()
    );
    Ok(())
}
