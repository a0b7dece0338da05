//! Built-in experiment files reproducing the four latency figures.

use crate::config::{parse_config_text, SweepSpec};
use crate::error::{CliError, Result};

pub const NAMES: [&str; 4] = ["fig3", "fig4", "fig5", "fig6"];

/// Source text of preset `name`.
pub fn text(name: &str) -> Result<&'static str> {
    Ok(match name {
        "fig3" => include_str!("../presets/fig3.conf"),
        "fig4" => include_str!("../presets/fig4.conf"),
        "fig5" => include_str!("../presets/fig5.conf"),
        "fig6" => include_str!("../presets/fig6.conf"),
        other => {
            return Err(CliError::Usage(format!(
                "unknown preset {other:?}; expected one of {}",
                NAMES.join(", ")
            )))
        }
    })
}

/// Parses preset `name` with `overrides` applied.
pub fn load(name: &str, overrides: &[(String, String)]) -> Result<SweepSpec> {
    parse_config_text(text(name)?, &format!("preset {name}"), overrides)
}
