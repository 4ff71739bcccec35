//! Parameter sets of the reference experiments.

use crate::model::ModelParams;

/// Two types, `v = (0.9, 0.2)`, one ancestor each, `kappa = 25`.
pub fn two_type() -> ModelParams {
    ModelParams::new(25, vec![0.9, 0.2], vec![1, 1], 2025).expect("valid preset")
}

/// Five equally efficient types started from `(16, 8, 4, 2, 1)` copies,
/// `kappa = 29`.
pub fn five_type() -> ModelParams {
    ModelParams::new(29, vec![0.9; 5], vec![16, 8, 4, 2, 1], 2025).expect("valid preset")
}

/// Eight types with `b = 1.9, 1.8, ..., 1.2` for the `G_i` curve family.
pub fn g_family() -> ModelParams {
    ModelParams::new(
        25,
        vec![0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2],
        vec![1; 8],
        2025,
    )
    .expect("valid preset")
}
