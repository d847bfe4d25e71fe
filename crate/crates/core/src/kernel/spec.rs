use serde::{Deserialize, Serialize};

use super::{Family, Kernel};
use crate::error::{Error, Result};

/// Textual kernel description, e.g. `kernel = "poisson", alpha = 2.0`.
///
/// Composite kernels nest: `kernel = "convolution", left = { kernel =
/// "gaussian", alpha = 4.0 }, right = { kernel = "triangle-spectrum" }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub kernel: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Box<KernelSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<Box<KernelSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<Box<KernelSpec>>,
}

impl KernelSpec {
    pub fn named(kernel: &str) -> Self {
        Self {
            kernel: kernel.into(),
            alpha: None,
            c: None,
            depth: None,
            base: None,
            left: None,
            right: None,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    /// Parse TOML, either as a document or as a bare comma-separated
    /// key list.
    pub fn parse(text: &str) -> Result<Self> {
        if let Ok(spec) = toml::from_str::<KernelSpec>(text) {
            return Ok(spec);
        }
        #[derive(Deserialize)]
        struct Wrapper {
            k: KernelSpec,
        }
        toml::from_str::<Wrapper>(&format!("k = {{ {} }}", text.trim()))
            .map(|w| w.k)
            .map_err(|e| Error::Usage(format!("bad kernel spec {text:?}: {}", e.message())))
    }

    fn need_alpha(&self) -> Result<f64> {
        self.alpha
            .ok_or_else(|| Error::Usage(format!("kernel {:?} needs alpha", self.kernel)))
    }

    fn need(&self, part: &Option<Box<KernelSpec>>, key: &str) -> Result<Kernel> {
        part.as_ref()
            .ok_or_else(|| Error::Usage(format!("kernel {:?} needs {key}", self.kernel)))?
            .build()
    }

    pub fn build(&self) -> Result<Kernel> {
        match self.kernel.as_str() {
            "sinc" => Ok(Kernel::sinc()),
            "triangle-spectrum" | "triangle" => Ok(Kernel::triangle_spectrum()),
            "gaussian" => Kernel::gaussian(self.need_alpha()?),
            "poisson" => Kernel::poisson(self.need_alpha()?),
            "inverse-multiquadric" | "imq" => Kernel::inverse_multiquadric(self.need_alpha()?),
            "multiquadric" => {
                let c = self
                    .c
                    .or(self.alpha)
                    .ok_or_else(|| Error::Usage("multiquadric needs c".into()))?;
                Kernel::multiquadric(c)
            }
            "dilated" => Kernel::dilated(self.need(&self.base, "base")?, self.need_alpha()?),
            "convolution" => Ok(super::convolve(
                &self.need(&self.left, "left")?,
                &self.need(&self.right, "right")?,
            )),
            "cardinal" => Kernel::cardinal(
                self.need(&self.base, "base")?,
                self.depth
                    .ok_or_else(|| Error::Usage("cardinal needs depth".into()))?,
            ),
            other => Err(Error::Usage(format!("unknown kernel {other:?}"))),
        }
    }

    pub(super) fn from_kernel(kernel: &Kernel) -> Self {
        match kernel.family() {
            Family::Sinc => Self::named("sinc"),
            Family::TriangleSpectrum => Self::named("triangle-spectrum"),
            Family::Gaussian { alpha } => Self::named("gaussian").with_alpha(*alpha),
            Family::Poisson { alpha } => Self::named("poisson").with_alpha(*alpha),
            Family::InverseMultiquadric { alpha } => {
                Self::named("inverse-multiquadric").with_alpha(*alpha)
            }
            Family::Multiquadric { c } => Self {
                c: Some(*c),
                ..Self::named("multiquadric")
            },
            Family::Dilated { base, alpha } => Self {
                base: Some(Box::new(base.spec())),
                ..Self::named("dilated").with_alpha(*alpha)
            },
            Family::Convolution { left, right } => Self {
                left: Some(Box::new(left.spec())),
                right: Some(Box::new(right.spec())),
                ..Self::named("convolution")
            },
            Family::Cardinal { base, depth } => Self {
                base: Some(Box::new(base.spec())),
                depth: Some(*depth),
                ..Self::named("cardinal")
            },
        }
    }
}

impl TryFrom<KernelSpec> for Kernel {
    type Error = Error;

    fn try_from(spec: KernelSpec) -> Result<Self> {
        spec.build()
    }
}

impl From<Kernel> for KernelSpec {
    fn from(k: Kernel) -> Self {
        k.spec()
    }
}
