use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HardyError, Result};
use crate::geometry::ConeSpec;

/// `count` evenly spaced values from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamRange {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl ParamRange {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        let r = Self { min, max, count };
        r.validate("range")?;
        Ok(r)
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if self.count == 0 {
            return Err(HardyError::Config(format!("{name}: count must be positive")));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.max < self.min {
            return Err(HardyError::Config(format!(
                "{name}: need finite min <= max, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.count == 1 && self.max != self.min {
            return Err(HardyError::Config(format!("{name}: a single point needs min == max")));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.max } else { self.min + step * i as f64 })
            .collect()
    }
}

/// Domain swept over. In tube mode the row parameter `c` is the constant
/// value of the weight `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepGeometry {
    Cone { cone: ConeSpec },
    Tube { k: usize, circle_radius: f64, beta: f64 },
}

impl Default for SweepGeometry {
    fn default() -> Self {
        SweepGeometry::Cone {
            cone: ConeSpec::hemisphere(),
        }
    }
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default)]
    pub geometry: SweepGeometry,
    pub c: ParamRange,
    pub p: ParamRange,
    #[serde(default = "yes")]
    pub certify: bool,
    #[serde(default = "yes")]
    pub zeta0: bool,
    /// Smallest radius sampled by the Prop-3.2-type certifier.
    #[serde(default)]
    pub radius_floor: Option<f64>,
    /// Nodes per decade for the `ζ₀` solves.
    #[serde(default)]
    pub per_decade: Option<usize>,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub plot: Option<PathBuf>,
}

impl SweepConfig {
    pub fn new(n: usize, geometry: SweepGeometry, c: ParamRange, p: ParamRange) -> Self {
        Self {
            n,
            geometry,
            c,
            p,
            certify: true,
            zeta0: true,
            radius_floor: None,
            per_decade: None,
            threads: None,
            out: None,
            plot: None,
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| HardyError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| HardyError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(HardyError::Config(format!("N = {} must be at least 3", self.n)));
        }
        self.c.validate("c")?;
        self.p.validate("p")?;
        if let SweepGeometry::Tube { k, circle_radius, beta } = self.geometry {
            if k != 1 || self.n < 4 {
                return Err(HardyError::Config("tube sweeps need k = 1 and N >= 4".into()));
            }
            if !(circle_radius > 0.0 && beta > 0.0 && beta < circle_radius) {
                return Err(HardyError::Config("tube sweeps need 0 < beta < circle_radius".into()));
            }
        }
        if let Some(f) = self.radius_floor {
            if !(f > 0.0 && f < 0.25) {
                return Err(HardyError::Config(format!("radius_floor = {f} must lie in (0, 0.25)")));
            }
        }
        if self.per_decade == Some(0) || self.threads == Some(0) {
            return Err(HardyError::Config("per_decade and threads must be positive".into()));
        }
        Ok(())
    }

    /// SHA-256 of the canonical TOML form of the fields that affect results.
    pub fn sha256(&self) -> Result<String> {
        let canonical = Self {
            threads: None,
            out: None,
            plot: None,
            ..self.clone()
        };
        let digest = Sha256::digest(canonical.to_toml_string()?.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
N = 3
certify = false

[geometry]
kind = "cone"
cone = { kind = "cap", theta0 = 1.5707963267948966 }

[c]
min = 2.05
max = 2.25
count = 20

[p]
min = 3.0
max = 6.0
count = 20
"#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = SweepConfig::from_toml_str(SAMPLE).unwrap();
        assert_eq!(cfg.n, 3);
        assert!(!cfg.certify && cfg.zeta0);
        assert!(cfg.geometry == SweepGeometry::default());
        let again = SweepConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn hash_ignores_output_paths() {
        let a = SweepConfig::from_toml_str(SAMPLE).unwrap();
        let mut b = a.clone();
        b.out = Some("x.csv".into());
        b.threads = Some(2);
        assert_eq!(a.sha256().unwrap(), b.sha256().unwrap());
        b.p.count = 21;
        assert_ne!(a.sha256().unwrap(), b.sha256().unwrap());
        assert_eq!(a.sha256().unwrap().len(), 64);
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(ParamRange::new(1.0, 0.0, 3).is_err());
        assert!(ParamRange::new(1.0, 2.0, 0).is_err());
        assert!(ParamRange::new(1.0, 2.0, 1).is_err());
        assert_eq!(ParamRange::new(1.0, 1.0, 1).unwrap().values(), vec![1.0]);
        let v = ParamRange::new(3.0, 6.0, 20).unwrap().values();
        assert_eq!(v.len(), 20);
        assert_eq!(v[19], 6.0);
        assert!(SweepConfig::from_toml_str("N = 3\nbogus = 1\n[c]\nmin=1\nmax=1\ncount=1\n[p]\nmin=1\nmax=1\ncount=1\n").is_err());
    }
}
