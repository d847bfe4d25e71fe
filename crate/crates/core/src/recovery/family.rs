use serde::{Deserialize, Serialize};

use crate::cardinal::cardinal_depth;
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::nodes::NodeSet;

/// Shape-indexed base kernels for convolution families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseFamily {
    /// `e^{-αx²}`.
    Gaussian,
    /// `e^{-α|x|}`.
    Poisson,
    /// `(1 + x²)^{-α}`.
    InverseMultiquadric,
}

impl BaseFamily {
    pub fn kernel(self, alpha: f64) -> Result<Kernel> {
        match self {
            BaseFamily::Gaussian => Kernel::gaussian(alpha),
            BaseFamily::Poisson => Kernel::poisson(alpha),
            BaseFamily::InverseMultiquadric => Kernel::inverse_multiquadric(alpha),
        }
    }
}

/// How `φ_α` is built from `α` and the target `ψ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Construction {
    /// `e^{-|x/α|²}`.
    RegularGaussian,
    /// `base_α ∗ ψ`.
    Convolution { base: BaseFamily },
    /// `α φ(α ·) ∗ ψ`.
    DilatedApproxIdentity { base: Kernel },
    /// Lattice cardinal function of `√(x² + α²)`.
    MultiquadricCardinal,
    /// `φ_α = ψ`.
    Constant,
}

impl Construction {
    pub fn tag(&self) -> &'static str {
        match self {
            Construction::RegularGaussian => "regular-gaussian",
            Construction::Convolution { .. } => "convolution",
            Construction::DilatedApproxIdentity { .. } => "dilated-approx-identity",
            Construction::MultiquadricCardinal => "multiquadric-cardinal",
            Construction::Constant => "constant",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilySpecRepr {
    construction: Construction,
    alphas: Vec<f64>,
    target: Kernel,
    nodes_x: NodeSet,
    nodes_y: NodeSet,
}

/// A kernel family `(φ_α)` with its target generator and node windows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FamilySpecRepr", into = "FamilySpecRepr")]
pub struct FamilySpec {
    construction: Construction,
    alphas: Vec<f64>,
    target: Kernel,
    nodes_x: NodeSet,
    nodes_y: NodeSet,
}

impl TryFrom<FamilySpecRepr> for FamilySpec {
    type Error = Error;

    fn try_from(r: FamilySpecRepr) -> Result<Self> {
        Self::new(r.construction, r.alphas, r.target, r.nodes_x, r.nodes_y)
    }
}

impl From<FamilySpec> for FamilySpecRepr {
    fn from(s: FamilySpec) -> Self {
        Self {
            construction: s.construction,
            alphas: s.alphas,
            target: s.target,
            nodes_x: s.nodes_x,
            nodes_y: s.nodes_y,
        }
    }
}

impl FamilySpec {
    pub fn new(
        construction: Construction,
        alphas: Vec<f64>,
        target: Kernel,
        nodes_x: NodeSet,
        nodes_y: NodeSet,
    ) -> Result<Self> {
        if alphas.len() < 3 {
            return Err(Error::Usage(format!(
                "a family needs at least 3 values of alpha, got {}",
                alphas.len()
            )));
        }
        if alphas.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::Range(
                "alpha values must be positive and finite".into(),
            ));
        }
        if alphas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Usage(
                "alpha values must be strictly increasing".into(),
            ));
        }
        let spec = Self {
            construction,
            alphas,
            target,
            nodes_x,
            nodes_y,
        };
        // Surface range errors now rather than mid-sweep.
        for &a in &spec.alphas {
            spec.member(a)?;
        }
        Ok(spec)
    }

    pub fn construction(&self) -> &Construction {
        &self.construction
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn target(&self) -> &Kernel {
        &self.target
    }

    pub fn nodes_x(&self) -> &NodeSet {
        &self.nodes_x
    }

    pub fn nodes_y(&self) -> &NodeSet {
        &self.nodes_y
    }

    /// Same family on other windows.
    pub fn with_nodes(&self, nodes_x: NodeSet, nodes_y: NodeSet) -> Self {
        Self {
            nodes_x,
            nodes_y,
            ..self.clone()
        }
    }

    /// Same family over another `α` list.
    pub fn with_alphas(&self, alphas: Vec<f64>) -> Result<Self> {
        Self::new(
            self.construction.clone(),
            alphas,
            self.target.clone(),
            self.nodes_x.clone(),
            self.nodes_y.clone(),
        )
    }

    pub fn name(&self) -> String {
        match &self.construction {
            Construction::Convolution { base } => format!("{}-convolution", serde_plain(base)),
            Construction::DilatedApproxIdentity { base } => format!("dilated-{}", base.name()),
            c => c.tag().to_string(),
        }
    }

    /// The interpolation generator `φ_α`.
    pub fn member(&self, alpha: f64) -> Result<Kernel> {
        match &self.construction {
            Construction::RegularGaussian => Kernel::gaussian(1.0 / (alpha * alpha)),
            Construction::Convolution { base } => Ok(base.kernel(alpha)?.convolve(&self.target)),
            Construction::DilatedApproxIdentity { base } => {
                Ok(Kernel::dilated(base.clone(), alpha)?.convolve(&self.target))
            }
            Construction::MultiquadricCardinal => {
                let mq = Kernel::multiquadric(alpha)?;
                let depth = cardinal_depth(&mq);
                Kernel::cardinal(mq, depth)
            }
            Construction::Constant => Ok(self.target.clone()),
        }
    }

    /// The factor convolved with `ψ`, for families of the form `φ_α ∗ ψ`.
    pub fn base(&self, alpha: f64) -> Result<Option<Kernel>> {
        match &self.construction {
            Construction::Convolution { base } => Ok(Some(base.kernel(alpha)?)),
            Construction::DilatedApproxIdentity { base } => {
                Ok(Some(Kernel::dilated(base.clone(), alpha)?))
            }
            _ => Ok(None),
        }
    }
}

/// Named families; sweeps use `α ∈ {1, 2, 4, 8, 16}`.
pub const PRESETS: &[&str] = &[
    "gaussian-conv-triangle",
    "poisson-conv-triangle",
    "imq-conv-triangle",
    "approx-identity-triangle",
    "regular-gaussian-sinc",
    "mq-cardinal-sinc",
];

/// Default `α` list of the presets.
pub const PRESET_ALPHAS: [f64; 5] = [1.0, 2.0, 4.0, 8.0, 16.0];

/// Perturbation of the alternating windows in the triangle presets.
pub const PRESET_KADEC_EPS: f64 = 0.2;

impl FamilySpec {
    /// A preset on windows of half-size `half`.
    pub fn preset(name: &str, half: usize) -> Result<Self> {
        let triangle = |construction: Construction| -> Result<Self> {
            let x = NodeSet::kadec_alternating(half, PRESET_KADEC_EPS)?;
            Self::new(
                construction,
                PRESET_ALPHAS.to_vec(),
                Kernel::triangle_spectrum(),
                x.clone(),
                x,
            )
        };
        let sinc = |construction: Construction| -> Result<Self> {
            let z = NodeSet::lattice(half);
            Self::new(
                construction,
                PRESET_ALPHAS.to_vec(),
                Kernel::sinc(),
                z.clone(),
                z,
            )
        };
        match name {
            "gaussian-conv-triangle" => triangle(Construction::Convolution {
                base: BaseFamily::Gaussian,
            }),
            "poisson-conv-triangle" => triangle(Construction::Convolution {
                base: BaseFamily::Poisson,
            }),
            "imq-conv-triangle" => triangle(Construction::Convolution {
                base: BaseFamily::InverseMultiquadric,
            }),
            "approx-identity-triangle" => triangle(Construction::DilatedApproxIdentity {
                base: Kernel::gaussian(1.0)?,
            }),
            "regular-gaussian-sinc" => sinc(Construction::RegularGaussian),
            "mq-cardinal-sinc" => sinc(Construction::MultiquadricCardinal),
            other => Err(Error::Usage(format!(
                "unknown preset '{other}' (known: {})",
                PRESETS.join(", ")
            ))),
        }
    }
}

fn serde_plain(base: &BaseFamily) -> &'static str {
    match base {
        BaseFamily::Gaussian => "gaussian",
        BaseFamily::Poisson => "poisson",
        BaseFamily::InverseMultiquadric => "inverse-multiquadric",
    }
}
