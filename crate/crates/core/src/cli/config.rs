//! Pipeline configuration and its `key=value` file format.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::anchors::{AnchorSpec, DEFAULT_K_SET, DEFAULT_STRIDES};
use crate::curve::{CurveConfig, DEFAULT_SAMPLE_SIZE};
use crate::error::{Error, Result};
use crate::merge::{MergeConfig, DEFAULT_CANVAS_STRIDE, DEFAULT_S1, DEFAULT_S2};

pub const DEFAULT_S3: f64 = 0.4;
pub const DEFAULT_MAX_ROIS: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Mask binarization threshold.
    pub s1: f64,
    /// Merge overlap threshold.
    pub s2: f64,
    /// Positive-square score threshold.
    pub s3: f64,
    pub n_sample: usize,
    pub max_rois: usize,
    pub canvas_stride: f64,
    pub strides: Vec<u32>,
    pub k_set: Vec<f64>,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            s1: DEFAULT_S1,
            s2: DEFAULT_S2,
            s3: DEFAULT_S3,
            n_sample: DEFAULT_SAMPLE_SIZE,
            max_rois: DEFAULT_MAX_ROIS,
            canvas_stride: DEFAULT_CANVAS_STRIDE,
            strides: DEFAULT_STRIDES.to_vec(),
            k_set: DEFAULT_K_SET.to_vec(),
            seed: 0,
        }
    }
}

pub const KEYS: [&str; 9] = [
    "s1",
    "s2",
    "s3",
    "n_sample",
    "max_rois",
    "canvas_stride",
    "strides",
    "k_set",
    "seed",
];

fn value<T: FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {raw:?}")))
}

fn list<T: FromStr>(key: &str, raw: &str) -> Result<Vec<T>> {
    raw.split(',').map(|t| value(key, t)).collect()
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("s1", self.s1), ("s2", self.s2), ("s3", self.s3)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        if self.max_rois == 0 {
            return Err(Error::Config("max_rois must be at least 1".into()));
        }
        if self.n_sample < crate::curve::CENTER_POINTS {
            return Err(Error::Config(format!(
                "n_sample must be at least {}",
                crate::curve::CENTER_POINTS
            )));
        }
        self.merge_config().validate()?;
        self.anchor_spec()?;
        Ok(())
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, raw: &str) -> Result<()> {
        match key {
            "s1" => self.s1 = value(key, raw)?,
            "s2" => self.s2 = value(key, raw)?,
            "s3" => self.s3 = value(key, raw)?,
            "n_sample" => self.n_sample = value(key, raw)?,
            "max_rois" => self.max_rois = value(key, raw)?,
            "canvas_stride" => self.canvas_stride = value(key, raw)?,
            "strides" => self.strides = list(key, raw)?,
            "k_set" => self.k_set = list(key, raw)?,
            "seed" => self.seed = value(key, raw)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies a `key=value` file on top of `self`. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, raw) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", n + 1)))?;
            self.set(key.trim(), raw)
                .map_err(|e| Error::Config(format!("line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = PipelineConfig::default();
        cfg.apply_text(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        let join = |v: Vec<String>| v.join(",");
        let mut s = String::new();
        let _ = writeln!(s, "s1={}", self.s1);
        let _ = writeln!(s, "s2={}", self.s2);
        let _ = writeln!(s, "s3={}", self.s3);
        let _ = writeln!(s, "n_sample={}", self.n_sample);
        let _ = writeln!(s, "max_rois={}", self.max_rois);
        let _ = writeln!(s, "canvas_stride={}", self.canvas_stride);
        let _ = writeln!(s, "strides={}", join(self.strides.iter().map(|x| x.to_string()).collect()));
        let _ = writeln!(s, "k_set={}", join(self.k_set.iter().map(|x| x.to_string()).collect()));
        let _ = writeln!(s, "seed={}", self.seed);
        s
    }

    pub fn merge_config(&self) -> MergeConfig {
        MergeConfig {
            s1: self.s1,
            s2: self.s2,
            canvas_stride: self.canvas_stride,
        }
    }

    pub fn curve_config(&self) -> CurveConfig {
        CurveConfig {
            n_sample: self.n_sample,
            seed: self.seed,
        }
    }

    pub fn anchor_spec(&self) -> Result<AnchorSpec> {
        AnchorSpec::new(self.strides.clone(), self.k_set.clone())
            .map_err(|e| Error::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = PipelineConfig::default();
        assert_eq!((c.s3, c.max_rois), (0.4, 2000));
        assert_eq!(c.strides, vec![8, 16, 32, 64]);
        assert_eq!(c.k_set, vec![2.0, 2.5, 3.0, 3.5]);
        c.validate().unwrap();
    }

    #[test]
    fn text_round_trip() {
        let c = PipelineConfig {
            s2: 0.3,
            strides: vec![4, 8],
            seed: 99,
            ..PipelineConfig::default()
        };
        assert_eq!(PipelineConfig::from_text(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn parse_errors() {
        assert!(PipelineConfig::from_text("s1=0.2\n# note\n\nseed = 5\n").is_ok());
        let e = PipelineConfig::from_text("s1=0.2\nbogus=1\n").unwrap_err();
        assert!(e.to_string().contains("line 2"));
        assert!(PipelineConfig::from_text("s1\n").is_err());
        assert!(PipelineConfig::from_text("s3=1.5\n").is_err());
        assert!(PipelineConfig::from_text("max_rois=0\n").is_err());
        assert!(PipelineConfig::from_text("strides=8,x\n").is_err());
    }
}
