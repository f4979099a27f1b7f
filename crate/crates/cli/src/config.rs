//! Configuration ingestion: JSON file plus flag overrides, with unit-aware
//! parsing. Powers are accepted as `"<x>dBm"` strings or plain watts;
//! ratios as `"<x>dB"` strings or plain linear values. Everything is stored
//! internally in watts / linear.

use std::path::Path;

use serde::Deserialize;

use uavsec::error::{Error, Result};
use uavsec::geometry::DeploymentRegion;
use uavsec::harness::{
    ExperimentConfig, SchemePair, Stage1Scheme, Stage2Scheme, SweepAxis, SweepSpec,
};
use uavsec::units::{db_to_linear, dbm_to_watts};

/// A power field: watts, or a string like "10dBm".
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum PowerField {
    Watts(f64),
    Text(String),
}

impl PowerField {
    fn to_watts(&self, field: &str) -> Result<f64> {
        match self {
            PowerField::Watts(w) => Ok(*w),
            PowerField::Text(text) => parse_power(text)
                .ok_or_else(|| Error::Config(format!("{field}: cannot parse power '{text}'"))),
        }
    }
}

/// A ratio field: linear, or a string like "10dB".
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RatioField {
    Linear(f64),
    Text(String),
}

impl RatioField {
    fn to_linear(&self, field: &str) -> Result<f64> {
        match self {
            RatioField::Linear(x) => Ok(*x),
            RatioField::Text(text) => parse_ratio(text)
                .ok_or_else(|| Error::Config(format!("{field}: cannot parse ratio '{text}'"))),
        }
    }
}

/// `"10dBm"` or `"0.01W"` or `"0.01"` -> watts.
pub fn parse_power(text: &str) -> Option<f64> {
    let trimmed = text.trim();
    if let Some(dbm) = trimmed.strip_suffix("dBm") {
        return dbm.trim().parse::<f64>().ok().map(dbm_to_watts);
    }
    if let Some(watts) = trimmed.strip_suffix('W') {
        return watts.trim().parse::<f64>().ok();
    }
    trimmed.parse::<f64>().ok()
}

/// `"10dB"` or `"10"` -> linear ratio.
pub fn parse_ratio(text: &str) -> Option<f64> {
    let trimmed = text.trim();
    if let Some(db) = trimmed.strip_suffix("dB") {
        return db.trim().parse::<f64>().ok().map(db_to_linear);
    }
    trimmed.parse::<f64>().ok()
}

fn parse_stage1(text: &str) -> Result<Stage1Scheme> {
    match text.to_ascii_uppercase().as_str() {
        "PMA" => Ok(Stage1Scheme::Pma),
        "DAMS" => Ok(Stage1Scheme::Dams),
        "RMS" => Ok(Stage1Scheme::Rms),
        other => Err(Error::Config(format!(
            "stage1: unknown scheme '{other}' (expected PMA, DAMS, or RMS)"
        ))),
    }
}

fn parse_stage2(text: &str) -> Result<Stage2Scheme> {
    match text.to_ascii_uppercase().as_str() {
        "OCFA" => Ok(Stage2Scheme::Ocfa),
        "AS" => Ok(Stage2Scheme::As),
        "FGS" => Ok(Stage2Scheme::Fgs),
        "DCS" => Ok(Stage2Scheme::Dcs),
        other => Err(Error::Config(format!(
            "stage2: unknown scheme '{other}' (expected OCFA, AS, FGS, or DCS)"
        ))),
    }
}

pub fn parse_axis(text: &str) -> Result<SweepAxis> {
    match text.to_ascii_uppercase().as_str() {
        "N" => Ok(SweepAxis::NUt),
        "M" => Ok(SweepAxis::NUr),
        "R" => Ok(SweepAxis::NUe),
        "Q" => Ok(SweepAxis::Quota),
        "P0" => Ok(SweepAxis::PowerBudgetDbm),
        "GAMMA" => Ok(SweepAxis::SnrThresholdDb),
        "NOISE" => Ok(SweepAxis::NoisePowerDbm),
        other => Err(Error::Config(format!(
            "sweep axis: unknown axis '{other}' (expected N, M, R, Q, P0, gamma, or noise)"
        ))),
    }
}

/// Sweep values in figure units: counts are plain integers; P0/noise values
/// are dBm (a `dBm` suffix is allowed); gamma values are dB (a `dB` suffix
/// is allowed).
pub fn parse_sweep_values(axis: SweepAxis, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .filter(|token| !token.trim().is_empty())
        .map(|token| {
            let token = token.trim();
            let stripped = match axis {
                SweepAxis::PowerBudgetDbm | SweepAxis::NoisePowerDbm => {
                    token.strip_suffix("dBm").unwrap_or(token)
                }
                SweepAxis::SnrThresholdDb => token.strip_suffix("dB").unwrap_or(token),
                _ => token,
            };
            stripped.trim().parse::<f64>().map_err(|_| {
                Error::Config(format!("sweep values: cannot parse '{token}' for axis {}", axis.label()))
            })
        })
        .collect()
}

/// The JSON configuration schema. Every field is optional; omitted fields
/// take the baseline defaults. Unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    n_ut: Option<usize>,
    n_ur: Option<usize>,
    n_ue: Option<usize>,
    quota: Option<usize>,
    bandwidth_hz: Option<f64>,
    noise_power: Option<PowerField>,
    power_budget: Option<PowerField>,
    path_loss_exponent: Option<f64>,
    snr_threshold: Option<RatioField>,
    region: Option<DeploymentRegion>,
    repetitions: Option<usize>,
    master_seed: Option<u64>,
    stage1: Option<Vec<String>>,
    stage2: Option<Vec<String>>,
    sweep: Option<FileSweep>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSweep {
    axis: String,
    values: Vec<f64>,
    quota_schedule: Option<Vec<usize>>,
}

/// Flag-level overrides collected by the CLI layer.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub n_ut: Option<usize>,
    pub n_ur: Option<usize>,
    pub n_ue: Option<usize>,
    pub quota: Option<usize>,
    pub bandwidth: Option<f64>,
    pub noise: Option<String>,
    pub p0: Option<String>,
    pub alpha: Option<f64>,
    pub gamma: Option<String>,
    pub repetitions: Option<usize>,
    pub seed: Option<u64>,
    pub stage1: Option<String>,
    pub stage2: Option<String>,
}

/// Build the experiment configuration: baseline defaults, then the config
/// file, then flags, validated at the end.
pub fn build_config(path: Option<&Path>, overrides: &Overrides) -> Result<ExperimentConfig> {
    let file: FileConfig = match path {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };

    let mut config = ExperimentConfig::default();
    if let Some(v) = file.n_ut {
        config.n_ut = v;
    }
    if let Some(v) = file.n_ur {
        config.n_ur = v;
    }
    if let Some(v) = file.n_ue {
        config.n_ue = v;
    }
    if let Some(v) = file.quota {
        config.quota = v;
    }
    if let Some(v) = file.bandwidth_hz {
        config.params.bandwidth = v;
    }
    if let Some(v) = &file.noise_power {
        config.params.noise_power = v.to_watts("noise_power")?;
    }
    if let Some(v) = &file.power_budget {
        config.params.power_budget = v.to_watts("power_budget")?;
    }
    if let Some(v) = file.path_loss_exponent {
        config.params.path_loss_exponent = v;
    }
    if let Some(v) = &file.snr_threshold {
        config.params.snr_threshold = v.to_linear("snr_threshold")?;
    }
    if let Some(v) = file.region {
        config.region = v;
    }
    if let Some(v) = file.repetitions {
        config.repetitions = v;
    }
    if let Some(v) = file.master_seed {
        config.master_seed = v;
    }

    let mut stage1: Vec<Stage1Scheme> = vec![Stage1Scheme::Pma];
    let mut stage2: Vec<Stage2Scheme> = vec![
        Stage2Scheme::Ocfa,
        Stage2Scheme::As,
        Stage2Scheme::Fgs,
        Stage2Scheme::Dcs,
    ];
    if let Some(list) = &file.stage1 {
        stage1 = list.iter().map(|s| parse_stage1(s)).collect::<Result<_>>()?;
    }
    if let Some(list) = &file.stage2 {
        stage2 = list.iter().map(|s| parse_stage2(s)).collect::<Result<_>>()?;
    }
    if let Some(sweep) = &file.sweep {
        let axis = parse_axis(&sweep.axis)?;
        config.sweep = Some(SweepSpec {
            axis,
            values: sweep.values.clone(),
            quota_schedule: sweep.quota_schedule.clone(),
        });
    }

    // Flags override the file.
    if let Some(v) = overrides.n_ut {
        config.n_ut = v;
    }
    if let Some(v) = overrides.n_ur {
        config.n_ur = v;
    }
    if let Some(v) = overrides.n_ue {
        config.n_ue = v;
    }
    if let Some(v) = overrides.quota {
        config.quota = v;
    }
    if let Some(v) = overrides.bandwidth {
        config.params.bandwidth = v;
    }
    if let Some(text) = &overrides.noise {
        config.params.noise_power = parse_power(text)
            .ok_or_else(|| Error::Config(format!("noise: cannot parse power '{text}'")))?;
    }
    if let Some(text) = &overrides.p0 {
        config.params.power_budget = parse_power(text)
            .ok_or_else(|| Error::Config(format!("p0: cannot parse power '{text}'")))?;
    }
    if let Some(v) = overrides.alpha {
        config.params.path_loss_exponent = v;
    }
    if let Some(text) = &overrides.gamma {
        config.params.snr_threshold = parse_ratio(text)
            .ok_or_else(|| Error::Config(format!("gamma: cannot parse ratio '{text}'")))?;
    }
    if let Some(v) = overrides.repetitions {
        config.repetitions = v;
    }
    if let Some(v) = overrides.seed {
        config.master_seed = v;
    }
    if let Some(list) = &overrides.stage1 {
        stage1 = list.split(',').map(parse_stage1).collect::<Result<_>>()?;
    }
    if let Some(list) = &overrides.stage2 {
        stage2 = list.split(',').map(parse_stage2).collect::<Result<_>>()?;
    }

    if stage1.is_empty() || stage2.is_empty() {
        return Err(Error::Config("stage1 and stage2 scheme lists must be non-empty".into()));
    }
    config.schemes = stage1
        .iter()
        .flat_map(|&s1| stage2.iter().map(move |&s2| SchemePair::new(s1, s2)))
        .collect();

    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_baseline_defaults() {
        let config = build_config(None, &Overrides::default()).unwrap();
        assert_eq!(config.n_ut, 12);
        assert_eq!(config.n_ur, 3);
        assert_eq!(config.n_ue, 2);
        assert_eq!(config.quota, 4);
        assert_eq!(config.params.bandwidth, 1e5);
        assert!((config.params.noise_power - 1e-9).abs() < 1e-21);
        assert!((config.params.power_budget - 1e-2).abs() < 1e-14);
        assert_eq!(config.params.path_loss_exponent, 2.0);
        assert!((config.params.snr_threshold - 10.0).abs() < 1e-12);
        assert_eq!(config.repetitions, 100);
        assert_eq!(config.schemes.len(), 4);
    }

    #[test]
    fn unit_strings_parse() {
        assert!((parse_power("10dBm").unwrap() - 0.01).abs() < 1e-15);
        assert!((parse_power("0.01W").unwrap() - 0.01).abs() < 1e-15);
        assert!((parse_power("0.01").unwrap() - 0.01).abs() < 1e-15);
        assert!((parse_ratio("10dB").unwrap() - 10.0).abs() < 1e-12);
        assert!((parse_ratio("2.5").unwrap() - 2.5).abs() < 1e-12);
        assert!(parse_power("tendBm").is_none());
    }

    #[test]
    fn sweep_values_respect_axis_units() {
        let values =
            parse_sweep_values(SweepAxis::PowerBudgetDbm, "6,8,10,12,14,16,18dBm").unwrap();
        assert_eq!(values, vec![6.0, 8.0, 10.0, 12.0, 14.0, 16.0, 18.0]);
        let values = parse_sweep_values(SweepAxis::SnrThresholdDb, "6dB,14dB").unwrap();
        assert_eq!(values, vec![6.0, 14.0]);
        let values = parse_sweep_values(SweepAxis::NUr, "2,3,4").unwrap();
        assert_eq!(values, vec![2.0, 3.0, 4.0]);
        assert!(parse_sweep_values(SweepAxis::NUr, "2,x").is_err());
    }

    #[test]
    fn zero_quota_is_rejected_as_infeasible() {
        let overrides = Overrides { quota: Some(0), ..Overrides::default() };
        match build_config(None, &overrides) {
            Err(Error::Infeasible { seats, uts }) => {
                assert_eq!(seats, 0);
                assert_eq!(uts, 12);
            }
            other => panic!("expected infeasibility, got {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected_by_name() {
        let dir = std::env::temp_dir().join("uavsec_cfg_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.json");
        std::fs::write(&path, r#"{"n_utz": 5}"#).unwrap();
        let err = build_config(Some(&path), &Overrides::default()).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("n_utz"), "diagnostic should name the field: {message}");
    }

    #[test]
    fn file_values_and_flag_overrides_compose() {
        let dir = std::env::temp_dir().join("uavsec_cfg_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ok.json");
        std::fs::write(
            &path,
            r#"{
                "n_ut": 10,
                "power_budget": "18dBm",
                "snr_threshold": "6dB",
                "stage1": ["RMS"],
                "stage2": ["AS"]
            }"#,
        )
        .unwrap();
        let overrides = Overrides { n_ut: Some(15), quota: Some(5), ..Overrides::default() };
        let config = build_config(Some(&path), &overrides).unwrap();
        assert_eq!(config.n_ut, 15);
        assert_eq!(config.quota, 5);
        assert!((config.params.power_budget - dbm_to_watts(18.0)).abs() < 1e-12);
        assert!((config.params.snr_threshold - db_to_linear(6.0)).abs() < 1e-12);
        assert_eq!(config.schemes.len(), 1);
        assert_eq!(config.schemes[0].label(), "RMS+AS");
    }
}
