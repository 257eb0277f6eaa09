//! Exact integer dynamics of discrete PNG, the multilayer lift, last-passage
//! recursions, the RSK oracle, and the KPZ rescaling.

mod field;
mod growth;
mod lpp;
mod multilayer;
mod params;
mod rescale;
mod rsk;

pub use field::{sample_weight_field, WeightField};
pub use growth::{evolve_png, jumps, HeightEvolution, JumpProfile};
pub use lpp::{lpp_table, point_to_line, LastPassageTable};
pub use multilayer::{
    check_nonintersection, field_ledger, multilayer, reconstruct_weights, t_operator, LabelLedger,
    MultiLayerConfig,
};
pub use params::{GeomParams, ScalingConstants};
pub use rescale::{rescale_height, transversal_argmax, RescaledPath};
pub use rsk::{rsk_shape, Partition};

/// Lattice cell (i, j) of ω(x, t): i = (t+x+1)/2, j = (t−x+1)/2.
pub fn cell_of(x: i64, t: i64) -> Option<(i64, i64)> {
    if (t - x).rem_euclid(2) != 1 {
        return None;
    }
    Some(((t + x + 1) / 2, (t - x + 1) / 2))
}

/// Space-time point of cell (i, j): x = i − j, t = i + j − 1.
pub fn point_of(i: i64, j: i64) -> (i64, i64) {
    (i - j, i + j - 1)
}
