pub mod budget;
pub mod cls_eval;
pub mod loss_eval;
pub mod mot_eval;
pub mod prune_sim;
pub mod reid_sim;
pub mod storage;

use std::path::PathBuf;

/// Global flags shared by every subcommand.
pub struct Ctx {
    pub manifest_only: bool,
    pub out: Option<PathBuf>,
}
