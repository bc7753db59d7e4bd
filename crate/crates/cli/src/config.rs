//! Optional defaults file pointed to by the `DLG_CONFIG` environment
//! variable: the same knobs as the command-line flags, JSON-encoded. Explicit
//! flags always win over the file, the file over built-in defaults.

use anyhow::Context;
use serde::Deserialize;

use dlg_core::engine::ClarificationMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ClarifyChoice {
    /// Accept every correction proposal
    Accept,
    /// Reject every correction proposal
    Reject,
    /// Report implausible input without clarifying
    Off,
}

impl ClarifyChoice {
    pub fn mode(self) -> ClarificationMode {
        match self {
            ClarifyChoice::Accept => ClarificationMode::AutoAccept,
            ClarifyChoice::Reject => ClarificationMode::AutoReject,
            ClarifyChoice::Off => ClarificationMode::Off,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Defaults {
    pub max_order: Option<u32>,
    pub held_out: Option<f64>,
    pub seed: Option<u64>,
    pub top_n: Option<u32>,
    pub min_support: Option<u64>,
    pub top_k: Option<u32>,
    pub threshold: Option<f64>,
    pub clarify: Option<ClarifyChoice>,
    pub track: Option<String>,
    pub speaking_time: Option<String>,
}

impl Defaults {
    pub fn load() -> anyhow::Result<Defaults> {
        match std::env::var_os("DLG_CONFIG") {
            None => Ok(Defaults::default()),
            Some(path) => {
                let text = std::fs::read_to_string(&path).with_context(|| {
                    format!("reading DLG_CONFIG file {}", path.to_string_lossy())
                })?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing DLG_CONFIG file {}", path.to_string_lossy()))
            }
        }
    }
}
