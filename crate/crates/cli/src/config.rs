use std::path::Path;

use qsis_core::recovery::FamilySpec;
use qsis_core::{Error, KernelSpec, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Experiment parameters, from a TOML file and/or flags. Flags win.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Config {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSpec>,
    /// Interpolation kernel `φ`; defaults to `kernel`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interpolator: Option<KernelSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes_y: Option<String>,
    #[serde(rename = "J", skip_serializing_if = "Option::is_none")]
    pub half: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    /// Scan depth `K`.
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub cells: Option<usize>,
    /// Scan points per cell `M`.
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(rename = "X", skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub central_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub halves: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

pub const MAX_HALF: usize = 2000;

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| Error::Usage(format!("bad config {}: {}", path.display(), e.message())))
    }

    /// Fields set in `other` replace ours.
    pub fn overlay(self, other: Config) -> Config {
        macro_rules! pick {
            ($($f:ident),*) => { Config { $($f: other.$f.or(self.$f)),* } };
        }
        pick!(
            kernel,
            interpolator,
            nodes,
            nodes_y,
            half,
            preset,
            family,
            alphas,
            cells,
            points,
            half_width,
            h,
            central_fraction,
            halves,
            seed,
            seeds,
            threshold
        )
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(j) = self.half {
            if j == 0 || j > MAX_HALF {
                return Err(Error::Range(format!(
                    "J must be in 1..={MAX_HALF}, got {j}"
                )));
            }
        }
        if let Some(f) = self.central_fraction {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::Range(format!(
                    "central fraction must be in (0, 1], got {f}"
                )));
            }
        }
        if let Some(t) = self.threshold {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Range(format!("threshold must be positive, got {t}")));
            }
        }
        if self.cells == Some(0) {
            return Err(Error::Range("K must be at least 1".into()));
        }
        Ok(())
    }

    /// Hex prefix of the SHA-256 of the command and the resolved config.
    pub fn digest(&self, command: &str) -> String {
        let body = serde_json::to_string(&(command, self)).expect("config serializes");
        Sha256::digest(body.as_bytes())
            .iter()
            .take(6)
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// `poisson` or a TOML key list such as `kernel = "dilated", alpha = 2, base = { kernel = "gaussian", alpha = 1 }`.
pub fn kernel_flag(text: &str, alpha: Option<f64>) -> Result<KernelSpec> {
    let mut spec = if text.contains('=') {
        KernelSpec::parse(text)?
    } else {
        KernelSpec::named(text.trim())
    };
    if let Some(a) = alpha {
        spec.alpha = Some(a);
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlay_prefers_flags() {
        let file = Config {
            half: Some(8),
            seed: Some(1),
            ..Default::default()
        };
        let flags = Config {
            seed: Some(2),
            ..Default::default()
        };
        let c = file.overlay(flags);
        assert_eq!((c.half, c.seed), (Some(8), Some(2)));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<Config>("J = 4\nbogus = 1").is_err());
        let c: Config =
            toml::from_str("J = 4\nkernel = { kernel = \"poisson\", alpha = 2.0 }").unwrap();
        assert_eq!(c.kernel.unwrap().alpha, Some(2.0));
    }

    #[test]
    fn digest_tracks_content() {
        let a = Config {
            half: Some(4),
            ..Default::default()
        };
        let b = Config {
            half: Some(5),
            ..Default::default()
        };
        assert_eq!(a.digest("riesz"), a.clone().digest("riesz"));
        assert_ne!(a.digest("riesz"), b.digest("riesz"));
        assert_ne!(a.digest("riesz"), a.digest("recover"));
        assert_eq!(a.digest("riesz").len(), 12);
    }

    #[test]
    fn kernel_flags() {
        assert_eq!(
            kernel_flag("poisson", Some(2.0)).unwrap(),
            KernelSpec::named("poisson").with_alpha(2.0)
        );
        let k = kernel_flag(
            "kernel = \"dilated\", alpha = 2.0, base = { kernel = \"gaussian\", alpha = 1.0 }",
            None,
        )
        .unwrap();
        assert!(k.build().is_ok());
    }
}
