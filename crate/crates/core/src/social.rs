//! Social-preference functionals over expected material payoffs.
//!
//! Every functional reads only `(E[m1], E[m2])` at the profile, i.e. it is an
//! ex ante model. Disutility is reported as negative utils.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{expected_material_payoff, Game, Profile};

pub const DEFAULT_EQUALITY_TOLERANCE: f64 = 1e-9;

fn default_equality_tolerance() -> f64 {
    DEFAULT_EQUALITY_TOLERANCE
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SocialRepr {
    Step {
        penalty: f64,
        #[serde(default = "default_equality_tolerance")]
        equality_tolerance: f64,
    },
    Linear {
        alpha: f64,
        beta: f64,
    },
    Zero,
}

/// An ex ante social utility model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SocialRepr", into = "SocialRepr")]
pub enum SocialFunctional {
    /// `-penalty` whenever expected payoffs differ by more than
    /// `equality_tolerance`, otherwise 0.
    StepInequalityAversion {
        penalty: f64,
        equality_tolerance: f64,
    },
    /// `-alpha * max(E[m2] - E[m1], 0) - beta * max(E[m1] - E[m2], 0)`.
    LinearInequalityAversion {
        alpha: f64,
        beta: f64,
    },
    ZeroSocial,
}

impl SocialFunctional {
    pub fn step(penalty: f64) -> Result<Self> {
        Self::step_with_tolerance(penalty, DEFAULT_EQUALITY_TOLERANCE)
    }

    pub fn step_with_tolerance(penalty: f64, equality_tolerance: f64) -> Result<Self> {
        let f = Self::StepInequalityAversion {
            penalty,
            equality_tolerance,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn linear(alpha: f64, beta: f64) -> Result<Self> {
        let f = Self::LinearInequalityAversion { alpha, beta };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = |name: &str, x: f64| {
            if x.is_finite() && x >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} must be finite and >= 0, got {x}"
                )))
            }
        };
        match *self {
            Self::StepInequalityAversion {
                penalty,
                equality_tolerance,
            } => {
                nonneg("penalty", penalty)?;
                if !(equality_tolerance.is_finite() && equality_tolerance > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "equality_tolerance must be finite and > 0, got {equality_tolerance}"
                    )));
                }
                Ok(())
            }
            Self::LinearInequalityAversion { alpha, beta } => {
                nonneg("alpha", alpha)?;
                nonneg("beta", beta)
            }
            Self::ZeroSocial => Ok(()),
        }
    }

    /// Value at a pair of expected material payoffs.
    pub fn value_at(&self, alice: f64, bob: f64) -> f64 {
        match *self {
            Self::StepInequalityAversion {
                penalty,
                equality_tolerance,
            } => {
                if (alice - bob).abs() > equality_tolerance {
                    -penalty
                } else {
                    0.0
                }
            }
            Self::LinearInequalityAversion { alpha, beta } => {
                -alpha * (bob - alice).max(0.0) - beta * (alice - bob).max(0.0)
            }
            Self::ZeroSocial => 0.0,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::StepInequalityAversion { .. } => "step",
            Self::LinearInequalityAversion { .. } => "linear",
            Self::ZeroSocial => "zero",
        }
    }
}

impl TryFrom<SocialRepr> for SocialFunctional {
    type Error = Error;

    fn try_from(r: SocialRepr) -> Result<Self> {
        let f = match r {
            SocialRepr::Step {
                penalty,
                equality_tolerance,
            } => Self::StepInequalityAversion {
                penalty,
                equality_tolerance,
            },
            SocialRepr::Linear { alpha, beta } => Self::LinearInequalityAversion { alpha, beta },
            SocialRepr::Zero => Self::ZeroSocial,
        };
        f.validate()?;
        Ok(f)
    }
}

impl From<SocialFunctional> for SocialRepr {
    fn from(f: SocialFunctional) -> Self {
        match f {
            SocialFunctional::StepInequalityAversion {
                penalty,
                equality_tolerance,
            } => Self::Step {
                penalty,
                equality_tolerance,
            },
            SocialFunctional::LinearInequalityAversion { alpha, beta } => {
                Self::Linear { alpha, beta }
            }
            SocialFunctional::ZeroSocial => Self::Zero,
        }
    }
}

pub fn eval_social(f: &SocialFunctional, game: &Game, p: &Profile) -> Result<f64> {
    let (alice, bob) = expected_material_payoff(game, p)?;
    Ok(f.value_at(alice, bob))
}
