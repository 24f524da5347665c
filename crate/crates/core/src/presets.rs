//! Named parameter sets, loaded from the bundled `data/presets.toml`.

use std::sync::OnceLock;

use thiserror::Error;

use crate::config::RunConfig;
use crate::fields::{FieldConfig, InitialState};

const PRESET_TABLE: &str = include_str!("../data/presets.toml");

pub const PRESET_NAMES: [&str; 18] = [
    "fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11",
    "fig12", "fig13", "fig14", "fig15", "fig16", "fig17", "hydrogen",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown preset {name:?}; valid names: {}", PRESET_NAMES.join(", "))]
pub struct UnknownPreset {
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub config: FieldConfig,
    pub initial_state: InitialState,
    pub t_end: f64,
    pub dt_out: f64,
    pub desk_scale: bool,
}

impl Preset {
    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            field: self.config,
            initial: self.initial_state.clone(),
            t_end: self.t_end,
            dt_out: self.dt_out,
            desk_scale: self.desk_scale,
            ..RunConfig::default()
        }
    }

    /// `figN` for N in 1..=17.
    pub fn figure_number(&self) -> Option<u32> {
        self.name.strip_prefix("fig")?.parse().ok()
    }
}

fn table() -> &'static [Preset] {
    static PRESETS: OnceLock<Vec<Preset>> = OnceLock::new();
    PRESETS.get_or_init(|| {
        let doc: toml::Table = PRESET_TABLE.parse().expect("bundled preset table is valid TOML");
        PRESET_NAMES
            .iter()
            .map(|&name| {
                let section = doc
                    .get(name)
                    .and_then(|v| v.as_table())
                    .unwrap_or_else(|| panic!("preset table lacks [{name}]"));
                let mut cfg = RunConfig::default();
                cfg.apply(section)
                    .and_then(|()| cfg.validate())
                    .unwrap_or_else(|e| panic!("preset [{name}]: {e}"));
                Preset {
                    name,
                    config: cfg.field,
                    initial_state: cfg.initial,
                    t_end: cfg.t_end,
                    dt_out: cfg.dt_out,
                    desk_scale: cfg.desk_scale,
                }
            })
            .collect()
    })
}

pub fn preset(name: &str) -> Result<Preset, UnknownPreset> {
    table()
        .iter()
        .find(|p| p.name == name)
        .cloned()
        .ok_or_else(|| UnknownPreset { name: name.to_string() })
}

pub fn all_presets() -> &'static [Preset] {
    table()
}

/// Presets fig1 through fig17.
pub fn figure_presets() -> impl Iterator<Item = &'static Preset> {
    table().iter().filter(|p| p.figure_number().is_some())
}
