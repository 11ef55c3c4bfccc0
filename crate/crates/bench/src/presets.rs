//! Experiment presets shipped with the binary.

use crate::config::{ConfigError, ExperimentConfig};

pub const PRESETS: &[(&str, &str)] = &[
    ("nash-a", include_str!("../presets/nash-a.cfg")),
    ("nash-b", include_str!("../presets/nash-b.cfg")),
    ("balls-100x200", include_str!("../presets/balls-100x200.cfg")),
    ("balls-200x100", include_str!("../presets/balls-200x100.cfg")),
    ("linear-cfp", include_str!("../presets/linear-cfp.cfg")),
    ("logistic", include_str!("../presets/logistic.cfg")),
    ("nonmonotone", include_str!("../presets/nonmonotone.cfg")),
    ("saddle", include_str!("../presets/saddle.cfg")),
];

pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn preset(name: &str) -> Option<Result<ExperimentConfig, ConfigError>> {
    preset_text(name).map(ExperimentConfig::parse)
}
