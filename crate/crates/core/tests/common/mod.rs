#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use agghb_core::data::{load_dataset, LabelPolicy};
use agghb_core::problems::FeatureMatrix;
use agghb_core::Dataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `AGGHB_DATA_DIR/australian` or `AGGHB_DATA_DIR/australian_scale`, if present.
pub fn australian_path() -> Option<PathBuf> {
    let dir = PathBuf::from(std::env::var_os("AGGHB_DATA_DIR")?);
    ["australian", "australian_scale", "australian.gz", "australian_scale.gz"]
        .iter()
        .map(|name| dir.join(name))
        .find(|p| p.is_file())
}

/// 690 × 14 binary classification set with features in `[-1, 1]` and labels
/// from a noisy linear model.
pub fn synthetic_australian() -> Dataset {
    let (m, n) = (690, 14);
    let mut rng = ChaCha8Rng::seed_from_u64(690_014);
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let mut rows = Vec::with_capacity(m);
    let mut labels = Vec::with_capacity(m);
    for _ in 0..m {
        let common: f64 = rng.gen_range(-1.0..1.0);
        let mut row = Vec::with_capacity(n);
        let mut score = 0.0;
        for (j, wj) in w.iter().enumerate() {
            // a few binary-like columns, the rest correlated through `common`
            let v: f64 = if j % 5 == 0 {
                if rng.gen_bool(0.4) { 1.0 } else { -1.0 }
            } else {
                (0.6 * common + 0.4 * rng.gen_range(-1.0..1.0f64)).clamp(-1.0, 1.0)
            };
            score += wj * v;
            row.push((j, v));
        }
        let u: f64 = rng.gen_range(1e-12..1.0);
        let noise = (u / (1.0 - u)).ln();
        labels.push(if score + noise > 0.0 { 1.0 } else { -1.0 });
        rows.push(row);
    }
    Dataset::new(FeatureMatrix::from_rows(n, &rows).unwrap(), labels).unwrap()
}

/// The real file when available, otherwise the synthetic stand-in, with a
/// label saying which one was used.
pub fn australian() -> (Arc<Dataset>, &'static str) {
    match australian_path() {
        Some(p) => (Arc::new(load_dataset(&p, LabelPolicy::Auto, Some(14)).unwrap()), "australian"),
        None => (Arc::new(synthetic_australian()), "synthetic"),
    }
}
