//! Finite two-player games in mixed extension.
//!
//! A [`Game`] carries Alice's (row) and Bob's (column) strategy labels together
//! with both players' material payoff matrices. Mixed strategies live on the
//! probability simplex over one side's pure strategies and a [`Profile`] pairs
//! one mixed strategy per side.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major real matrix.
pub type Matrix = Vec<Vec<f64>>;

/// Sum tolerance under which an incoming probability vector is kept verbatim.
pub const SIMPLEX_TOLERANCE: f64 = 1e-12;

/// Checks that `matrix` is a non-empty, rectangular, all-finite matrix and
/// returns its shape.
pub(crate) fn matrix_shape(name: &str, matrix: &Matrix) -> Result<(usize, usize)> {
    let rows = matrix.len();
    if rows == 0 {
        return Err(Error::Parse(format!("{name} has no rows")));
    }
    let cols = matrix[0].len();
    if cols == 0 {
        return Err(Error::Parse(format!("{name} has no columns")));
    }
    for (i, row) in matrix.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::Parse(format!(
                "{name} is ragged: row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!("{name} row {i}")));
        }
    }
    Ok((rows, cols))
}

/// A point on the probability simplex over one player's pure strategies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MixedStrategy(Vec<f64>);

impl MixedStrategy {
    /// Normalizes non-negative weights into a probability vector.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        let sum = Self::validate(&weights)?;
        Ok(Self(weights.into_iter().map(|w| w / sum).collect()))
    }

    /// Unit mass on strategy `index` out of `len`.
    pub fn pure(len: usize, index: usize) -> Self {
        assert!(
            index < len,
            "pure strategy index {index} out of range {len}"
        );
        let mut probs = vec![0.0; len];
        probs[index] = 1.0;
        Self(probs)
    }

    pub fn uniform(len: usize) -> Self {
        assert!(len > 0, "uniform strategy over an empty set");
        Self(vec![1.0 / len as f64; len])
    }

    /// Equal mass on the two strategies `a` and `b`.
    pub fn midpoint(len: usize, a: usize, b: usize) -> Self {
        assert!(a < len && b < len && a != b);
        let mut probs = vec![0.0; len];
        probs[a] = 0.5;
        probs[b] = 0.5;
        Self(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index of the pure strategy this mixed strategy concentrates on, if any.
    pub fn as_pure(&self) -> Option<usize> {
        let mut hit = None;
        for (i, &p) in self.0.iter().enumerate() {
            if p == 1.0 {
                hit = Some(i);
            } else if p != 0.0 {
                return None;
            }
        }
        hit
    }

    /// Convex combination `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &Self, lambda: f64) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(format!(
                "cannot mix strategies of length {} and {}",
                self.len(),
                other.len()
            )));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParameter(format!(
                "mixing weight {lambda} outside [0, 1]"
            )));
        }
        let weights = self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
            .collect();
        Self::new(weights)
    }

    fn validate(weights: &[f64]) -> Result<f64> {
        if weights.is_empty() {
            return Err(Error::EmptyVector);
        }
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite(format!("weight at index {index}")));
            }
            if value < 0.0 {
                return Err(Error::NegativeWeight { index, value });
            }
        }
        let sum: f64 = weights.iter().sum();
        if sum == 0.0 {
            return Err(Error::ZeroMass);
        }
        Ok(sum)
    }
}

impl TryFrom<Vec<f64>> for MixedStrategy {
    type Error = Error;

    /// Keeps vectors that already sum to one (so serialized strategies
    /// round-trip bit for bit) and normalizes anything else.
    fn try_from(weights: Vec<f64>) -> Result<Self> {
        let sum = Self::validate(&weights)?;
        if (sum - 1.0).abs() <= SIMPLEX_TOLERANCE {
            Ok(Self(weights))
        } else {
            Self::new(weights)
        }
    }
}

impl From<MixedStrategy> for Vec<f64> {
    fn from(s: MixedStrategy) -> Self {
        s.0
    }
}

/// Make a mixed strategy from non-negative weights.
pub fn make_mixed(weights: &[f64]) -> Result<MixedStrategy> {
    MixedStrategy::new(weights.to_vec())
}

/// A pair (row strategy, column strategy).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub row: MixedStrategy,
    pub col: MixedStrategy,
}

impl Profile {
    pub fn new(row: MixedStrategy, col: MixedStrategy) -> Self {
        Self { row, col }
    }

    /// Uniform mixing on both sides.
    pub fn centroid(rows: usize, cols: usize) -> Self {
        Self::new(MixedStrategy::uniform(rows), MixedStrategy::uniform(cols))
    }

    /// Fails unless the profile's strategy counts are `rows` by `cols`.
    pub fn check_shape(&self, rows: usize, cols: usize) -> Result<()> {
        if self.row.len() != rows || self.col.len() != cols {
            return Err(Error::DimensionMismatch(format!(
                "profile is {}x{}, expected {rows}x{cols}",
                self.row.len(),
                self.col.len()
            )));
        }
        Ok(())
    }
}

/// On-disk game layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    rows: Vec<String>,
    cols: Vec<String>,
    m1: Matrix,
    m2: Matrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    v: Option<Matrix>,
}

/// A finite two-player game: Alice picks rows, Bob picks columns.
///
/// `v` holds Bob's utils when supplied. It is kept for completeness and is
/// not read by any analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GameFile", into = "GameFile")]
pub struct Game {
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    m1: Matrix,
    m2: Matrix,
    v: Option<Matrix>,
}

impl Game {
    pub fn new(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        m1: Matrix,
        m2: Matrix,
        v: Option<Matrix>,
    ) -> Result<Self> {
        check_labels("rows", &row_labels)?;
        check_labels("cols", &col_labels)?;
        let shape = matrix_shape("m1", &m1)?;
        let expected = (row_labels.len(), col_labels.len());
        if shape != expected {
            return Err(Error::Parse(format!(
                "m1 is {}x{} but labels describe a {}x{} game",
                shape.0, shape.1, expected.0, expected.1
            )));
        }
        for (name, matrix) in [("m2", Some(&m2)), ("v", v.as_ref())] {
            if let Some(matrix) = matrix {
                let other = matrix_shape(name, matrix)?;
                if other != shape {
                    return Err(Error::Parse(format!(
                        "{name} is {}x{} but m1 is {}x{}",
                        other.0, other.1, shape.0, shape.1
                    )));
                }
            }
        }
        Ok(Self {
            row_labels,
            col_labels,
            m1,
            m2,
            v,
        })
    }

    /// Game with generated labels `r0, r1, ...` and `c0, c1, ...`.
    pub fn unlabeled(m1: Matrix, m2: Matrix) -> Result<Self> {
        let rows = m1.len();
        let cols = m1.first().map_or(0, Vec::len);
        Self::new(
            (0..rows).map(|i| format!("r{i}")).collect(),
            (0..cols).map(|j| format!("c{j}")).collect(),
            m1,
            m2,
            None,
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn m1(&self) -> &Matrix {
        &self.m1
    }

    pub fn m2(&self) -> &Matrix {
        &self.m2
    }

    pub fn bob_utils(&self) -> Option<&Matrix> {
        self.v.as_ref()
    }

    /// The same game with the players' material payoffs exchanged.
    pub fn with_swapped_payoffs(&self) -> Self {
        Self {
            m1: self.m2.clone(),
            m2: self.m1.clone(),
            ..self.clone()
        }
    }

    pub fn check_profile(&self, p: &Profile) -> Result<()> {
        p.check_shape(self.rows(), self.cols())
    }

    /// Every pure profile in row-major order.
    pub fn pure_profiles(&self) -> impl Iterator<Item = Profile> + '_ {
        let (m, n) = (self.rows(), self.cols());
        (0..m).flat_map(move |i| {
            (0..n).map(move |j| Profile::new(MixedStrategy::pure(m, i), MixedStrategy::pure(n, j)))
        })
    }
}

fn check_labels(side: &str, labels: &[String]) -> Result<()> {
    if labels.is_empty() {
        return Err(Error::Parse(format!(
            "{side} must list at least one strategy"
        )));
    }
    let mut seen = HashSet::new();
    for label in labels {
        if label.is_empty() {
            return Err(Error::Parse(format!("{side} contains an empty label")));
        }
        if !seen.insert(label.as_str()) {
            return Err(Error::Parse(format!("{side} repeats label {label:?}")));
        }
    }
    Ok(())
}

impl TryFrom<GameFile> for Game {
    type Error = Error;

    fn try_from(f: GameFile) -> Result<Self> {
        Game::new(f.rows, f.cols, f.m1, f.m2, f.v)
    }
}

impl From<Game> for GameFile {
    fn from(g: Game) -> Self {
        GameFile {
            rows: g.row_labels,
            cols: g.col_labels,
            m1: g.m1,
            m2: g.m2,
            v: g.v,
        }
    }
}

/// The profile with unit mass on row `i` and column `j`.
pub fn pure_profile(game: &Game, i: usize, j: usize) -> Result<Profile> {
    let (rows, cols) = (game.rows(), game.cols());
    if i >= rows || j >= cols {
        return Err(Error::IndexOutOfRange {
            row: i,
            col: j,
            rows,
            cols,
        });
    }
    Ok(Profile::new(
        MixedStrategy::pure(rows, i),
        MixedStrategy::pure(cols, j),
    ))
}

/// `sum_i sum_j sigma_i tau_j matrix[i][j]`, with shapes assumed checked.
pub(crate) fn bilinear_form(matrix: &Matrix, p: &Profile) -> f64 {
    let tau = p.col.probs();
    p.row
        .probs()
        .iter()
        .zip(matrix)
        .map(|(sigma_i, row)| sigma_i * row.iter().zip(tau).map(|(x, t)| x * t).sum::<f64>())
        .sum()
}

/// Expected material payoffs `(Alice, Bob)` at a profile.
pub fn expected_material_payoff(game: &Game, p: &Profile) -> Result<(f64, f64)> {
    game.check_profile(p)?;
    Ok((bilinear_form(&game.m1, p), bilinear_form(&game.m2, p)))
}
