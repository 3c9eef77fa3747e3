//! The two-by-two worked example: a game in which Alice is ex ante
//! inequality averse, her expected-utility game utility, and the selfish
//! utility that must counterbalance it.
//!
//! Alice's game utility is only pinned down against Bob's uniform strategy
//! (4 after Left, 14 after Right). It is stored as the table that repeats
//! those values across Bob's columns, which is the simplest expected-utility
//! completion.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{check_bilinear, check_vnm, counterbalance, ProbeConfig};
use crate::error::{Error, Result};
use crate::game::{expected_material_payoff, Game, MixedStrategy, Profile};
use crate::social::SocialFunctional;
use crate::utility::{evaluate, UtilitySpec};

pub fn example_game() -> Game {
    Game::new(
        vec!["L".into(), "R".into()],
        vec!["L".into(), "R".into()],
        vec![vec![0.0, 10.0], vec![30.0, 0.0]],
        vec![vec![20.0, 0.0], vec![0.0, 20.0]],
        None,
    )
    .expect("fixture game is well formed")
}

/// Game utility: 4 after Left, 14 after Right, whatever Bob does.
pub fn example_game_utility() -> UtilitySpec {
    UtilitySpec::table(vec![vec![4.0, 4.0], vec![14.0, 14.0]]).expect("fixture table")
}

/// Disutility 1 whenever expected material payoffs differ.
pub fn example_social_functional() -> SocialFunctional {
    SocialFunctional::step(1.0).expect("fixture penalty")
}

pub fn example_social() -> UtilitySpec {
    UtilitySpec::social(example_social_functional())
}

/// `u_d = u_g - s`, the selfish utility that keeps `u_g` expected utility.
pub fn counterbalanced_selfish_utility() -> UtilitySpec {
    UtilitySpec::difference(example_game_utility(), example_social())
}

/// Expected-utility selfish utility with `u_d(L, τ̂) = 5` and `u_d(R, τ̂) = 15`.
pub fn eu_selfish_utility() -> UtilitySpec {
    UtilitySpec::table(vec![vec![5.0, 5.0], vec![15.0, 15.0]]).expect("fixture table")
}

/// `(L, τ̂)`, `(σ̂, τ̂)`, `(R, τ̂)` in that order.
pub fn example_profiles() -> [Profile; 3] {
    let half = MixedStrategy::uniform(2);
    [
        Profile::new(MixedStrategy::pure(2, 0), half.clone()),
        Profile::new(half.clone(), half.clone()),
        Profile::new(MixedStrategy::pure(2, 1), half),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureCheck {
    pub quantity: String,
    pub expected: f64,
    pub actual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureSection {
    pub name: String,
    pub checks: Vec<FixtureCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureReport {
    pub tolerance: f64,
    pub sections: Vec<FixtureSection>,
    pub passed: bool,
    /// Name of the first quantity outside tolerance.
    pub first_failure: Option<String>,
}

impl FixtureReport {
    pub fn failure(&self) -> Option<Error> {
        self.first_failure
            .as_ref()
            .map(|q| Error::FixtureAssertionFailed(q.clone()))
    }
}

struct SectionBuilder {
    tolerance: f64,
    section: FixtureSection,
}

impl SectionBuilder {
    fn new(name: &str, tolerance: f64) -> Self {
        Self {
            tolerance,
            section: FixtureSection {
                name: name.into(),
                checks: Vec::new(),
            },
        }
    }

    fn check(&mut self, quantity: &str, expected: f64, actual: f64) -> &mut Self {
        self.section.checks.push(FixtureCheck {
            quantity: quantity.into(),
            expected,
            actual,
            passed: (actual - expected).abs() <= self.tolerance,
        });
        self
    }

    fn flag(&mut self, quantity: &str, expected: bool, actual: bool) -> &mut Self {
        self.check(
            quantity,
            f64::from(u8::from(expected)),
            f64::from(u8::from(actual)),
        )
    }

    fn finish(self) -> FixtureSection {
        self.section
    }
}

/// Recomputes every number of the worked example and compares each with the
/// stated value at absolute tolerance `tolerance` (zero is allowed: all
/// quantities are exact in binary floating point).
pub fn run_example_fixture(tolerance: f64) -> Result<FixtureReport> {
    if !(tolerance >= 0.0 && tolerance.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "fixture tolerance must be >= 0, got {tolerance}"
        )));
    }
    let game = example_game();
    let [left, mid, right] = example_profiles();
    let ug = example_game_utility();
    let s = example_social();
    let cfg = ProbeConfig::default();

    let mut payoffs = SectionBuilder::new("expected material payoffs", tolerance);
    for (name, p, (alice, bob)) in [
        ("(L, τ̂)", &left, (5.0, 10.0)),
        ("(R, τ̂)", &right, (15.0, 10.0)),
        ("(σ̂, τ̂)", &mid, (10.0, 10.0)),
    ] {
        let (a, b) = expected_material_payoff(&game, p)?;
        payoffs.check(&format!("E[m1]{name}"), alice, a);
        payoffs.check(&format!("E[m2]{name}"), bob, b);
    }

    let mut social = SectionBuilder::new("social utility", tolerance);
    social
        .check("s(L, τ̂)", -1.0, evaluate(&s, &game, &left)?)
        .check("s(R, τ̂)", -1.0, evaluate(&s, &game, &right)?)
        .check("s(σ̂, τ̂)", 0.0, evaluate(&s, &game, &mid)?);

    // u_g at the pure responses is s + u_d with u_d = 5 and 15; at the
    // midpoint it follows from expected utility.
    let eu_ud = eu_selfish_utility();
    let mut game_utility = SectionBuilder::new("game utility", tolerance);
    game_utility
        .check(
            "s(L, τ̂) + u_d(L, τ̂)",
            4.0,
            evaluate(&s, &game, &left)? + evaluate(&eu_ud, &game, &left)?,
        )
        .check(
            "s(R, τ̂) + u_d(R, τ̂)",
            14.0,
            evaluate(&s, &game, &right)? + evaluate(&eu_ud, &game, &right)?,
        )
        .check("u_g(L, τ̂)", 4.0, evaluate(&ug, &game, &left)?)
        .check("u_g(R, τ̂)", 14.0, evaluate(&ug, &game, &right)?)
        .check("u_g(σ̂, τ̂)", 9.0, evaluate(&ug, &game, &mid)?);

    let (ud, report) = counterbalance(&ug, &s, &game, &cfg)?;
    let mut counter = SectionBuilder::new("counterbalanced selfish utility", tolerance);
    counter
        .check("x = u_d(σ̂, τ̂)", 9.0, evaluate(&ud, &game, &mid)?)
        .check("u_d(L, τ̂)", 5.0, evaluate(&ud, &game, &left)?)
        .check("u_d(R, τ̂)", 15.0, evaluate(&ud, &game, &right)?)
        .flag("theorem consistent", true, report.theorem_consistent);

    let s_verdict = check_bilinear(&s, &game, &cfg)?;
    let ud_verdict = check_vnm(&ud, &game, &cfg)?;
    let mut eu = SectionBuilder::new("expected-utility selfish utility", tolerance);
    eu.check("EU u_d(σ̂, τ̂)", 10.0, evaluate(&eu_ud, &game, &mid)?)
        .check(
            "EU u_g(σ̂, τ̂) = s(σ̂, τ̂) + EU u_d(σ̂, τ̂)",
            10.0,
            evaluate(&s, &game, &mid)? + evaluate(&eu_ud, &game, &mid)?,
        )
        .check(
            "deviation of u_d from expected utility",
            1.0,
            ud_verdict.max_deviation,
        )
        .check(
            "deviation of s from bilinearity",
            1.0,
            s_verdict.max_deviation,
        )
        .flag("s bilinear", false, s_verdict.passed);

    let sections = vec![
        payoffs.finish(),
        social.finish(),
        game_utility.finish(),
        counter.finish(),
        eu.finish(),
    ];
    let first_failure = sections
        .iter()
        .flat_map(|s| &s.checks)
        .find(|c| !c.passed)
        .map(|c| c.quantity.clone());
    Ok(FixtureReport {
        tolerance,
        passed: first_failure.is_none(),
        sections,
        first_failure,
    })
}

impl fmt::Display for FixtureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, section) in self.sections.iter().enumerate() {
            writeln!(f, "[{}] {}", k + 1, section.name)?;
            for c in &section.checks {
                writeln!(
                    f,
                    "  {:<4} {} expected {:>6} got {}",
                    if c.passed { "ok" } else { "FAIL" },
                    crate::render::pad(&c.quantity, 42),
                    c.expected,
                    c.actual
                )?;
            }
        }
        match &self.first_failure {
            None => write!(
                f,
                "all fixture assertions hold (tolerance {:e})",
                self.tolerance
            ),
            Some(q) => write!(f, "fixture assertion failed: {q}"),
        }
    }
}

/// Writes the example as loadable files into `dir` and returns their paths.
pub fn export_fixture(dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let files: [(&str, serde_json::Result<String>); 5] = [
        ("game.json", serde_json::to_string_pretty(&example_game())),
        (
            "ug.json",
            serde_json::to_string_pretty(&example_game_utility()),
        ),
        (
            "social.json",
            serde_json::to_string_pretty(&example_social_functional()),
        ),
        (
            "ud_counterbalanced.json",
            serde_json::to_string_pretty(&counterbalanced_selfish_utility()),
        ),
        (
            "ud_eu.json",
            serde_json::to_string_pretty(&eu_selfish_utility()),
        ),
    ];
    let mut written = Vec::new();
    for (name, text) in files {
        let path = dir.join(name);
        fs::write(&path, text? + "\n")?;
        written.push(path);
    }
    Ok(written)
}
