//! Plain `key = value` experiment configuration.
//!
//! Recognised keys: `classes`, `seeds`, `width`, `height`, `frames`,
//! `qps`, `profile`. List values are comma-separated. Unknown and
//! duplicate keys are rejected; `#` starts a comment.

use lfx_codec::encoder::Profile;

use crate::error::{LabError, Result};
use crate::experiment::NamedSequence;
use crate::synth::{synth_sequence, ContentClass, SynthSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub classes: Vec<ContentClass>,
    pub seeds: Vec<u64>,
    pub width: u32,
    pub height: u32,
    pub frames: usize,
    /// QP ladder override; commands fall back to their own default.
    pub qps: Option<Vec<u8>>,
    pub profile: Profile,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            classes: ContentClass::ALL.to_vec(),
            seeds: vec![1, 2, 3],
            width: 64,
            height: 64,
            frames: 61,
            qps: None,
            profile: Profile::H264Like,
        }
    }
}

impl ExperimentConfig {
    /// Generates the full classes x seeds corpus.
    pub fn sequences(&self) -> Result<Vec<NamedSequence>> {
        let mut seqs = Vec::with_capacity(self.classes.len() * self.seeds.len());
        for &class in &self.classes {
            for &seed in &self.seeds {
                let spec = SynthSpec {
                    class,
                    seed,
                    width: self.width,
                    height: self.height,
                    frames: self.frames,
                };
                seqs.push(NamedSequence {
                    id: spec.sequence_id(),
                    class,
                    frames: synth_sequence(&spec)?,
                });
            }
        }
        Ok(seqs)
    }
}

pub fn parse_profile(s: &str) -> Result<Profile> {
    match s.to_ascii_lowercase().as_str() {
        "h264" => Ok(Profile::H264Like),
        "hevc" => Ok(Profile::HevcLike),
        other => Err(LabError::Usage(format!(
            "unknown profile {other:?} (expected h264 or hevc)"
        ))),
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig::default();
    let mut seen: Vec<String> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = i + 1;
        let (key, value) = line.split_once('=').ok_or_else(|| {
            LabError::Data(format!("config line {lineno}: expected key = value, got {raw:?}"))
        })?;
        let key = key.trim();
        let value = value.trim();
        if seen.iter().any(|k| k == key) {
            return Err(LabError::Data(format!("config line {lineno}: duplicate key {key:?}")));
        }
        seen.push(key.to_string());

        match key {
            "classes" => {
                config.classes = split_list(value, lineno, |item| {
                    item.parse::<ContentClass>()
                        .map_err(|e| LabError::Data(format!("config line {lineno}: {e}")))
                })?;
            }
            "seeds" => {
                config.seeds = split_list(value, lineno, |item| {
                    item.parse::<u64>().map_err(|_| {
                        LabError::Data(format!("config line {lineno}: bad seed {item:?}"))
                    })
                })?;
            }
            "width" => config.width = parse_num(value, "width", lineno)?,
            "height" => config.height = parse_num(value, "height", lineno)?,
            "frames" => config.frames = parse_num(value, "frames", lineno)?,
            "qps" => {
                let qps = split_list(value, lineno, |item| {
                    item.parse::<u8>().map_err(|_| {
                        LabError::Data(format!("config line {lineno}: bad qp {item:?}"))
                    })
                })?;
                config.qps = Some(qps);
            }
            "profile" => {
                config.profile = parse_profile(value)
                    .map_err(|e| LabError::Data(format!("config line {lineno}: {e}")))?;
            }
            other => {
                return Err(LabError::Data(format!(
                    "config line {lineno}: unknown key {other:?}"
                )));
            }
        }
    }
    validate(&config)?;
    Ok(config)
}

fn split_list<T>(value: &str, lineno: usize, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    let items: Vec<&str> = value.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(LabError::Data(format!("config line {lineno}: empty list")));
    }
    items.into_iter().map(parse).collect()
}

fn parse_num<T: std::str::FromStr>(value: &str, what: &str, lineno: usize) -> Result<T> {
    value.parse().map_err(|_| {
        LabError::Data(format!("config line {lineno}: bad {what} {value:?}"))
    })
}

fn validate(config: &ExperimentConfig) -> Result<()> {
    let mut sorted_seeds = config.seeds.clone();
    sorted_seeds.sort_unstable();
    sorted_seeds.dedup();
    if sorted_seeds.len() != config.seeds.len() {
        return Err(LabError::Data("config: duplicate seeds".into()));
    }
    if config
        .classes
        .iter()
        .enumerate()
        .any(|(i, class)| config.classes[..i].contains(class))
    {
        return Err(LabError::Data("config: duplicate classes".into()));
    }
    if let Some(qps) = &config.qps {
        if qps.len() < 4 {
            return Err(LabError::Data(format!(
                "config: RD curves need at least 4 QPs, got {}",
                qps.len()
            )));
        }
        let mut sorted = qps.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != qps.len() {
            return Err(LabError::Data("config: duplicate QPs".into()));
        }
        if let Some(&bad) = qps.iter().find(|&&qp| qp > 51) {
            return Err(LabError::Data(format!("config: qp {bad} out of range [0, 51]")));
        }
    }
    Ok(())
}
