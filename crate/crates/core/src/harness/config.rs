use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::asteroid::Range;
use crate::env::{EpisodeConfig, GravityMode};
use crate::ppo::PpoConfig;
use crate::spacecraft::VehicleParams;
use crate::{Error, Result};

/// Environment variable that overrides the output directory.
pub const OUTPUT_DIR_ENV: &str = "ASTEROID_GNC_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Spacecraft,
    SmallLander,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainSettings {
    /// Total batch updates.
    pub updates: u64,
    /// Write a checkpoint every this many updates (0 disables periodic ones).
    pub checkpoint_every: u64,
    /// Emit an SVG learning curve next to the log.
    pub plots: bool,
}

impl Default for TrainSettings {
    fn default() -> Self {
        Self {
            updates: 120,
            checkpoint_every: 10,
            plots: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalSettings {
    pub episodes: usize,
    pub plots: bool,
}

impl Default for EvalSettings {
    fn default() -> Self {
        Self {
            episodes: 500,
            plots: true,
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub variant: Variant,
    pub output_dir: PathBuf,
    pub ppo: PpoConfig,
    pub train: TrainSettings,
    pub eval: EvalSettings,
    /// Episode settings used while training.
    pub training_env: EpisodeConfig,
    /// Episode settings used by `eval` and `simulate`.
    pub eval_env: EpisodeConfig,
}

/// Top-level keys accepted in a config file.
const KNOWN_KEYS: [&str; 9] = [
    "seed",
    "variant",
    "output_dir",
    "ppo",
    "train",
    "eval",
    "episode",
    "training",
    "evaluation",
];

fn merge(base: &mut toml::Value, over: &toml::Value) {
    match (base, over) {
        (toml::Value::Table(b), toml::Value::Table(o)) => {
            for (k, v) in o {
                match b.get_mut(k) {
                    // A tagged enum is replaced wholesale when its tag changes.
                    Some(slot @ toml::Value::Table(_))
                        if v.is_table()
                            && v.get("kind").is_some()
                            && v.get("kind") != slot.get("kind") =>
                    {
                        *slot = v.clone()
                    }
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (b, o) => *b = o.clone(),
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<toml::Value> {
    toml::Value::try_from(v).map_err(|e| Error::Config(e.to_string()))
}

/// Episode defaults for a vehicle variant.
pub fn variant_defaults(variant: Variant) -> EpisodeConfig {
    match variant {
        Variant::Spacecraft => EpisodeConfig::default(),
        Variant::SmallLander => {
            let mut cfg = EpisodeConfig {
                vehicle: VehicleParams::small_lander(),
                ..EpisodeConfig::default()
            };
            cfg.initial.mass = Range::new(4.5, 5.0);
            cfg.initial.com = Range::new(-0.005, 0.005);
            cfg
        }
    }
}

fn training_overrides(cfg: &mut EpisodeConfig) {
    cfg.gravity = GravityMode::Sphere {
        mass: Range::new(1e10, 15e10),
    };
    cfg.target_offset = 0.0;
}

impl RunConfig {
    /// Defaults for a variant with no file.
    pub fn defaults(variant: Variant) -> Self {
        let eval_env = variant_defaults(variant);
        let mut training_env = eval_env.clone();
        training_overrides(&mut training_env);
        Self {
            seed: 1,
            variant,
            output_dir: PathBuf::from("out"),
            ppo: PpoConfig::default(),
            train: TrainSettings::default(),
            eval: EvalSettings::default(),
            training_env,
            eval_env,
        }
    }

    /// Parse a config. `[episode]` applies to both modes; `[training]` and
    /// `[evaluation]` then override it for one mode each.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let doc: toml::Value = text
            .parse::<toml::Table>()
            .map(toml::Value::Table)
            .map_err(|e| Error::Config(format!("invalid TOML: {e}")))?;
        if let Some(t) = doc.as_table() {
            for k in t.keys() {
                if !KNOWN_KEYS.contains(&k.as_str()) {
                    return Err(Error::Config(format!("unknown top-level key `{k}`")));
                }
            }
        }
        let get = |k: &str| doc.get(k).cloned();
        let variant: Variant = match get("variant") {
            Some(v) => v.try_into().map_err(|e| Error::Config(format!("variant: {e}")))?,
            None => Variant::Spacecraft,
        };
        let base = variant_defaults(variant);

        let build = |mode_defaults: &EpisodeConfig, mode_key: &str| -> Result<EpisodeConfig> {
            let mut v = to_value(mode_defaults)?;
            if let Some(ep) = get("episode") {
                merge(&mut v, &ep);
            }
            if let Some(m) = get(mode_key) {
                merge(&mut v, &m);
            }
            v.try_into()
                .map_err(|e: toml::de::Error| Error::Config(format!("[{mode_key}]: {e}")))
        };
        let mut train_base = base.clone();
        training_overrides(&mut train_base);
        let training_env = build(&train_base, "training")?;
        let eval_env = build(&base, "evaluation")?;

        let section = |k: &str| -> toml::Value {
            get(k).unwrap_or_else(|| toml::Value::Table(Default::default()))
        };
        let ppo: PpoConfig = section("ppo")
            .try_into()
            .map_err(|e| Error::Config(format!("[ppo]: {e}")))?;
        let train: TrainSettings = section("train")
            .try_into()
            .map_err(|e| Error::Config(format!("[train]: {e}")))?;
        let eval: EvalSettings = section("eval")
            .try_into()
            .map_err(|e| Error::Config(format!("[eval]: {e}")))?;
        let seed = match get("seed") {
            Some(toml::Value::Integer(i)) if i >= 0 => i as u64,
            Some(_) => return Err(Error::Config("seed must be a non-negative integer".into())),
            None => 1,
        };
        let output_dir = match get("output_dir") {
            Some(toml::Value::String(s)) => PathBuf::from(s),
            Some(_) => return Err(Error::Config("output_dir must be a string".into())),
            None => PathBuf::from("out"),
        };
        let cfg = Self {
            seed,
            variant,
            output_dir,
            ppo,
            train,
            eval,
            training_env,
            eval_env,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.ppo.validate()?;
        self.training_env.validate()?;
        self.eval_env.validate()?;
        Ok(())
    }

    /// Output directory after applying the environment override.
    pub fn resolved_output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(v) if !v.is_empty() => PathBuf::from(v),
            _ => self.output_dir.clone(),
        }
    }
}
