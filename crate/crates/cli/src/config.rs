//! The pipeline configuration document.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use ssf_core::matching::CensusWindow;
use ssf_core::refine::{ConfidencePoolParams, SubpixelMode};
use ssf_core::sgm::SgmParams;
use ssf_core::stereo::StereoConfig;
use ssf_core::supervision::{ProxyConfig, ProxySource};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MatchingSection {
    pub d_max: usize,
    /// Census window as `[width, height]`.
    pub window: [usize; 2],
}

impl Default for MatchingSection {
    fn default() -> Self {
        let w = CensusWindow::default();
        Self {
            d_max: StereoConfig::default().d_max,
            window: [w.width, w.height],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RefineSection {
    pub lrc_threshold: f64,
    pub wmdd_window: usize,
    pub wmdd_threshold: f64,
    pub wmdd_sigma_color: f64,
    pub subpixel: SubpixelMode,
}

impl Default for RefineSection {
    fn default() -> Self {
        let p = ConfidencePoolParams::default();
        Self {
            lrc_threshold: p.lrc_threshold,
            wmdd_window: p.wmdd_window,
            wmdd_threshold: p.wmdd_threshold,
            wmdd_sigma_color: p.wmdd_sigma_color,
            subpixel: SubpixelMode::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySection {
    /// Calibration document, relative to the scene directory unless absolute.
    pub calibration: PathBuf,
    /// Meters.
    pub cleaning_radius: f64,
    pub min_neighbors: usize,
}

pub const DEFAULT_CLEANING_RADIUS: f64 = 0.02;
pub const DEFAULT_MIN_NEIGHBORS: usize = 5;

impl Default for GeometrySection {
    fn default() -> Self {
        Self {
            calibration: PathBuf::from("calibration.toml"),
            cleaning_radius: DEFAULT_CLEANING_RADIUS,
            min_neighbors: DEFAULT_MIN_NEIGHBORS,
        }
    }
}

pub const DEFAULT_SIGMA: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SupervisionSection {
    /// Spread of the Gaussian target, in disparities.
    pub sigma: f64,
    pub min_density: f64,
    pub mode: ProxySource,
}

impl Default for SupervisionSection {
    fn default() -> Self {
        let p = ProxyConfig::default();
        Self {
            sigma: DEFAULT_SIGMA,
            min_density: p.min_density,
            mode: p.source,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalSection {
    pub taus: Vec<f64>,
}

impl Default for EvalSection {
    fn default() -> Self {
        Self {
            taus: vec![1.0, 2.0, 3.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub matching: MatchingSection,
    pub sgm: SgmParams,
    pub refine: RefineSection,
    pub geometry: GeometrySection,
    pub supervision: SupervisionSection,
    pub eval: EvalSection,
}

impl PipelineConfig {
    /// Parses a document; errors name the offending key path.
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let de = toml::Deserializer::parse(text).map_err(|e| anyhow::anyhow!("config: {}", e.message().trim()))?;
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            anyhow::anyhow!("config key `{path}`: {}", e.into_inner().message().trim())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.stereo().window.validate()?;
        self.stereo().sgm.validate()?;
        self.stereo().pool.validate()?;
        self.proxy().validate()?;
        anyhow::ensure!(self.matching.d_max >= 1, "config key `matching.d_max`: must be >= 1");
        anyhow::ensure!(
            self.geometry.cleaning_radius > 0.0,
            "config key `geometry.cleaning_radius`: must be > 0"
        );
        anyhow::ensure!(self.supervision.sigma > 0.0, "config key `supervision.sigma`: must be > 0");
        anyhow::ensure!(
            self.eval.taus.iter().all(|t| t.is_finite() && *t >= 0.0),
            "config key `eval.taus`: tolerances must be finite and >= 0"
        );
        Ok(())
    }

    pub fn stereo(&self) -> StereoConfig {
        StereoConfig {
            d_max: self.matching.d_max,
            window: CensusWindow {
                width: self.matching.window[0],
                height: self.matching.window[1],
            },
            sgm: self.sgm,
            pool: ConfidencePoolParams {
                lrc_threshold: self.refine.lrc_threshold,
                wmdd_window: self.refine.wmdd_window,
                wmdd_threshold: self.refine.wmdd_threshold,
                wmdd_sigma_color: self.refine.wmdd_sigma_color,
            },
            subpixel: self.refine.subpixel,
        }
    }

    pub fn proxy(&self) -> ProxyConfig {
        ProxyConfig {
            min_density: self.supervision.min_density,
            source: self.supervision.mode,
            stereo: self.stereo(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_default() {
        assert_eq!(PipelineConfig::parse("").unwrap(), PipelineConfig::default());
    }

    #[test]
    fn round_trips_through_toml() {
        let c = PipelineConfig::default();
        assert_eq!(PipelineConfig::parse(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn unknown_keys_name_their_path() {
        let err = PipelineConfig::parse("[sgm]\np3 = 1.0\n").unwrap_err().to_string();
        assert!(err.contains("sgm"), "{err}");
        assert!(err.contains("p3"), "{err}");
        let err = PipelineConfig::parse("[refine]\nsubpixel = \"cubic\"\n").unwrap_err().to_string();
        assert!(err.contains("refine.subpixel"), "{err}");
    }

    #[test]
    fn partial_sections_keep_other_defaults() {
        let c = PipelineConfig::parse("[matching]\nd_max = 64\n[sgm]\npaths = 4\n").unwrap();
        assert_eq!(c.matching.d_max, 64);
        assert_eq!(c.matching.window, [9, 7]);
        assert_eq!(u8::from(c.sgm.paths), 4);
        assert_eq!(c.sgm.p2, 100.0);
    }

    #[test]
    fn invalid_values_are_rejected() {
        assert!(PipelineConfig::parse("[sgm]\npaths = 6\n").is_err());
        assert!(PipelineConfig::parse("[supervision]\nmin_density = 0.0\n").is_err());
        assert!(PipelineConfig::parse("[matching]\nwindow = [8, 7]\n").is_err());
    }
}
