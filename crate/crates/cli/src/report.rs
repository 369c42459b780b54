use cycleqw_core::periodicity::{Limits, Strategy};
use cycleqw_core::ShiftKind;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::source::LayoutArgs;

/// Echo of what was run.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunConfig {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<LayoutArgs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<ShiftKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<Strategy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limits: Option<Limits>,
    /// Command-specific settings (ranges, seeds, steps).
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub extra: Value,
    pub format: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReportEnvelope {
    pub tool_version: String,
    pub config: RunConfig,
    pub wall_clock_seconds: f64,
    pub payload: Value,
}

impl ReportEnvelope {
    pub fn new(config: RunConfig, wall_clock_seconds: f64, payload: Value) -> Self {
        ReportEnvelope {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            wall_clock_seconds,
            payload,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn envelope_round_trips() {
        let env = ReportEnvelope::new(
            RunConfig {
                command: "period".into(),
                layout: Some(LayoutArgs {
                    coin: Some("hadamard".into()),
                    n: Some(8),
                    pattern: None,
                    coin_c: None,
                    coin_c2: None,
                }),
                shift: Some(ShiftKind::Ms),
                strategy: Some(Strategy::Auto),
                limits: Some(Limits::default()),
                extra: json!({"seed": 7}),
                format: "json".into(),
                output: None,
            },
            0.1 + 0.2,
            json!({"T": 24, "mu": [0.6000000000000001, -0.7999999999999999]}),
        );
        let text = serde_json::to_string(&env).unwrap();
        let back: ReportEnvelope = serde_json::from_str(&text).unwrap();
        assert_eq!(back, env);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}
