use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::math::RngState;
use crate::ppo::Trainer;
use crate::{Error, Result};

pub const CHECKPOINT_VERSION: u32 = 1;

/// Everything needed to continue a training run bit-exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    /// Batch updates completed.
    pub update: u64,
    pub trainer: Trainer,
    /// Stream that draws per-update episode seeds.
    pub run_rng: RngState,
}

impl Checkpoint {
    pub fn new(trainer: Trainer, run_rng: RngState) -> Self {
        Self {
            version: CHECKPOINT_VERSION,
            update: trainer.opt.updates,
            trainer,
            run_rng,
        }
    }

    /// Write via a temporary file and rename, so a crash never leaves a
    /// truncated checkpoint behind.
    pub fn save(&self, path: &Path) -> Result<()> {
        let fail = |reason: String| Error::Checkpoint {
            path: path.to_path_buf(),
            reason,
        };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| fail(e.to_string()))?;
        }
        let json = serde_json::to_vec(self).map_err(|e| fail(e.to_string()))?;
        let tmp = path.with_extension("json.tmp");
        {
            let mut f = fs::File::create(&tmp).map_err(|e| fail(e.to_string()))?;
            f.write_all(&json).map_err(|e| fail(e.to_string()))?;
            f.sync_all().map_err(|e| fail(e.to_string()))?;
        }
        fs::rename(&tmp, path).map_err(|e| fail(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let fail = |reason: String| Error::Checkpoint {
            path: path.to_path_buf(),
            reason,
        };
        let bytes = fs::read(path).map_err(|e| fail(e.to_string()))?;
        let ck: Checkpoint = serde_json::from_slice(&bytes).map_err(|e| fail(e.to_string()))?;
        if ck.version != CHECKPOINT_VERSION {
            return Err(fail(format!(
                "unsupported version {} (expected {CHECKPOINT_VERSION})",
                ck.version
            )));
        }
        let t = &ck.trainer;
        let sizes_ok = t.policy.net.params.len() == t.policy.net.sizes.num_params()
            && t.value.net.params.len() == t.value.net.sizes.num_params()
            && t.policy.log_std.len() == t.policy.net.sizes.output;
        if !sizes_ok {
            return Err(fail("parameter vector does not match network sizes".into()));
        }
        if !t.policy.net.params.iter().chain(&t.value.net.params).all(|p| p.is_finite()) {
            return Err(fail("non-finite network parameter".into()));
        }
        Ok(ck)
    }
}
