//! Utility functionals over mixed-strategy profiles.
//!
//! Two kinds of leaves exist: pure-profile tables, which evaluate through
//! their multilinear extension and are therefore expected utility by
//! construction, and social functionals, which are arbitrary functions of the
//! profile. Inner nodes combine them pointwise.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::game::{bilinear_form, matrix_shape, pure_profile, Game, Matrix, Profile};
use crate::social::{eval_social, SocialFunctional};

/// Utils assigned to each pure profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Matrix", into = "Matrix")]
pub struct UtilityTable {
    values: Matrix,
}

impl UtilityTable {
    pub fn new(values: Matrix) -> Result<Self> {
        matrix_shape("utility table", &values)?;
        Ok(Self { values })
    }

    /// A table holding `value` everywhere.
    pub fn constant(rows: usize, cols: usize, value: f64) -> Result<Self> {
        Self::new(vec![vec![value; cols]; rows])
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    pub fn rows(&self) -> usize {
        self.values.len()
    }

    pub fn cols(&self) -> usize {
        self.values[0].len()
    }

    fn check_profile(&self, p: &Profile) -> Result<()> {
        p.check_shape(self.rows(), self.cols()).map_err(|_| {
            Error::DimensionMismatch(format!(
                "table is {}x{} but profile is {}x{}",
                self.rows(),
                self.cols(),
                p.row.len(),
                p.col.len()
            ))
        })
    }
}

impl TryFrom<Matrix> for UtilityTable {
    type Error = Error;

    fn try_from(values: Matrix) -> Result<Self> {
        Self::new(values)
    }
}

impl From<UtilityTable> for Matrix {
    fn from(t: UtilityTable) -> Self {
        t.values
    }
}

/// A utility functional on `ΔA × ΔB`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub enum UtilitySpec {
    EuTable(UtilityTable),
    Social(SocialFunctional),
    Affine {
        base: Box<UtilitySpec>,
        scale: f64,
        shift: f64,
    },
    Sum(Box<UtilitySpec>, Box<UtilitySpec>),
    Difference(Box<UtilitySpec>, Box<UtilitySpec>),
}

impl UtilitySpec {
    pub fn table(values: Matrix) -> Result<Self> {
        Ok(Self::EuTable(UtilityTable::new(values)?))
    }

    pub fn social(f: SocialFunctional) -> Self {
        Self::Social(f)
    }

    pub fn affine(base: UtilitySpec, scale: f64, shift: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::NonPositiveScale(scale));
        }
        if !shift.is_finite() {
            return Err(Error::NonFinite("affine shift".into()));
        }
        Ok(Self::Affine {
            base: Box::new(base),
            scale,
            shift,
        })
    }

    pub fn sum(left: UtilitySpec, right: UtilitySpec) -> Self {
        Self::Sum(Box::new(left), Box::new(right))
    }

    pub fn difference(left: UtilitySpec, right: UtilitySpec) -> Self {
        Self::Difference(Box::new(left), Box::new(right))
    }

    /// True when every leaf is a table. Such a tree is bilinear whatever the
    /// numbers: sums and differences of bilinear maps are bilinear, and an
    /// affine shift `c` equals the extension of the constant table `c`
    /// because probabilities sum to one.
    pub fn is_structurally_bilinear(&self) -> bool {
        match self {
            Self::EuTable(_) => true,
            Self::Social(_) => false,
            Self::Affine { base, .. } => base.is_structurally_bilinear(),
            Self::Sum(l, r) | Self::Difference(l, r) => {
                l.is_structurally_bilinear() && r.is_structurally_bilinear()
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn evaluate(&self, game: &Game, p: &Profile) -> Result<f64> {
        evaluate(self, game, p)
    }
}

pub fn evaluate(spec: &UtilitySpec, game: &Game, p: &Profile) -> Result<f64> {
    game.check_profile(p)?;
    eval_checked(spec, game, p)
}

fn eval_checked(spec: &UtilitySpec, game: &Game, p: &Profile) -> Result<f64> {
    match spec {
        UtilitySpec::EuTable(t) => multilinear_extension(t, p),
        UtilitySpec::Social(f) => eval_social(f, game, p),
        UtilitySpec::Affine { base, scale, shift } => {
            Ok(scale * eval_checked(base, game, p)? + shift)
        }
        UtilitySpec::Sum(l, r) => Ok(eval_checked(l, game, p)? + eval_checked(r, game, p)?),
        UtilitySpec::Difference(l, r) => Ok(eval_checked(l, game, p)? - eval_checked(r, game, p)?),
    }
}

/// `sum_i sum_j sigma(a_i) tau(b_j) table[i][j]`.
pub fn multilinear_extension(table: &UtilityTable, p: &Profile) -> Result<f64> {
    table.check_profile(p)?;
    Ok(bilinear_form(&table.values, p))
}

/// Tabulates `spec` on every pure profile of `game`.
pub fn restrict_to_pure(spec: &UtilitySpec, game: &Game) -> Result<UtilityTable> {
    let mut values = vec![vec![0.0; game.cols()]; game.rows()];
    for (i, row) in values.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = evaluate(spec, game, &pure_profile(game, i, j)?)?;
        }
    }
    UtilityTable::new(values)
}

/// Social utility induced by a game utility and a selfish utility.
pub fn induced_social(u_g: &UtilitySpec, u_d: &UtilitySpec) -> UtilitySpec {
    UtilitySpec::difference(u_g.clone(), u_d.clone())
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum SpecRepr {
    EuTable {
        values: UtilityTable,
    },
    Social {
        kind: String,
        #[serde(default, skip_serializing_if = "Map::is_empty")]
        params: Map<String, Value>,
    },
    Affine {
        base: Box<UtilitySpec>,
        scale: f64,
        shift: f64,
    },
    Sum {
        left: Box<UtilitySpec>,
        right: Box<UtilitySpec>,
    },
    Difference {
        left: Box<UtilitySpec>,
        right: Box<UtilitySpec>,
    },
}

impl TryFrom<SpecRepr> for UtilitySpec {
    type Error = Error;

    fn try_from(r: SpecRepr) -> Result<Self> {
        Ok(match r {
            SpecRepr::EuTable { values } => Self::EuTable(values),
            SpecRepr::Social { kind, params } => {
                if params.contains_key("kind") {
                    return Err(Error::Parse(
                        "social params must not repeat \"kind\"".into(),
                    ));
                }
                let mut flat = params;
                flat.insert("kind".into(), Value::String(kind));
                let f = serde_json::from_value(Value::Object(flat))
                    .map_err(|e| Error::Parse(format!("social spec: {e}")))?;
                Self::Social(f)
            }
            SpecRepr::Affine { base, scale, shift } => Self::affine(*base, scale, shift)?,
            SpecRepr::Sum { left, right } => Self::Sum(left, right),
            SpecRepr::Difference { left, right } => Self::Difference(left, right),
        })
    }
}

impl From<UtilitySpec> for SpecRepr {
    fn from(s: UtilitySpec) -> Self {
        match s {
            UtilitySpec::EuTable(values) => Self::EuTable { values },
            UtilitySpec::Social(f) => {
                let mut params = match serde_json::to_value(f) {
                    Ok(Value::Object(map)) => map,
                    _ => unreachable!("social functionals serialize to objects"),
                };
                let kind = match params.remove("kind") {
                    Some(Value::String(k)) => k,
                    _ => unreachable!("social functionals carry a kind tag"),
                };
                Self::Social { kind, params }
            }
            UtilitySpec::Affine { base, scale, shift } => Self::Affine { base, scale, shift },
            UtilitySpec::Sum(left, right) => Self::Sum { left, right },
            UtilitySpec::Difference(left, right) => Self::Difference { left, right },
        }
    }
}
