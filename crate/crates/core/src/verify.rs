//! Seeded randomized checks of both directions of the decomposition result:
//! expected-utility `u_g` and `u_d` induce a bilinear `s`, and an
//! expected-utility `u_g` with a bilinear `s` leaves `u_d = u_g - s`
//! expected utility.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{check_bilinear, check_vnm, probe_bilinearity, verify_theorem, ProbeConfig};
use crate::error::{Error, Result};
use crate::game::{Game, Matrix};
use crate::utility::{induced_social, UtilitySpec};

/// Range of the uniform draws for utility tables.
pub const TABLE_RANGE: f64 = 10.0;
/// Random probes per trial on top of the structured ones.
pub const PROBES_PER_TRIAL: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialParams {
    pub trials: usize,
    pub max_m: usize,
    pub max_n: usize,
    pub seed: u64,
}

impl TrialParams {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.max_m == 0 || self.max_n == 0 {
            return Err(Error::InvalidParameter(
                "max_m and max_n must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub name: String,
    pub trials: usize,
    pub consistent: usize,
    /// Largest sampled deviation of the functional expected to be bilinear.
    pub worst_deviation: f64,
}

impl SuiteSummary {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            trials: 0,
            consistent: 0,
            worst_deviation: 0.0,
        }
    }

    pub fn all_consistent(&self) -> bool {
        self.consistent == self.trials
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub params: TrialParams,
    pub forward: SuiteSummary,
    pub backward: SuiteSummary,
}

impl TrialSummary {
    pub fn all_consistent(&self) -> bool {
        self.forward.all_consistent() && self.backward.all_consistent()
    }
}

/// One random instance: a game and two tables of matching shape.
#[derive(Debug, Clone)]
pub struct TrialInstance {
    pub game: Game,
    pub first: UtilitySpec,
    pub second: UtilitySpec,
    pub config: ProbeConfig,
}

pub fn random_table<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| rng.random_range(-TABLE_RANGE..=TABLE_RANGE))
                .collect()
        })
        .collect()
}

/// Draws a game of shape at most `max_m x max_n` with two random tables.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, max_m: usize, max_n: usize) -> TrialInstance {
    let m = rng.random_range(1..=max_m);
    let n = rng.random_range(1..=max_n);
    let payoffs = |rng: &mut R| -> Matrix {
        (0..m)
            .map(|_| (0..n).map(|_| rng.random_range(0.0..100.0)).collect())
            .collect()
    };
    let m1 = payoffs(rng);
    let m2 = payoffs(rng);
    let game = Game::unlabeled(m1, m2).expect("random game is well formed");
    let first = UtilitySpec::table(random_table(rng, m, n)).expect("random table");
    let second = UtilitySpec::table(random_table(rng, m, n)).expect("random table");
    let config = ProbeConfig {
        n_random: PROBES_PER_TRIAL,
        ..ProbeConfig::with_seed(rng.random())
    };
    TrialInstance {
        game,
        first,
        second,
        config,
    }
}

/// `u_g`, `u_d` expected utility: `s` must be bilinear.
fn forward_trial(t: &TrialInstance) -> Result<(bool, f64)> {
    let (u_g, u_d) = (&t.first, &t.second);
    let report = verify_theorem(u_g, u_d, &t.game, &t.config)?;
    let sampled = probe_bilinearity(&induced_social(u_g, u_d), &t.game, &t.config)?;
    let ok = report.theorem_consistent
        && report.u_d_verdict.passed
        && report.s_verdict.passed
        && sampled.passed;
    Ok((ok, sampled.max_deviation))
}

/// `u_g` expected utility, `s` bilinear: `u_d = u_g - s` must be expected utility.
fn backward_trial(t: &TrialInstance) -> Result<(bool, f64)> {
    let (u_g, s) = (&t.first, &t.second);
    let u_d = UtilitySpec::difference(u_g.clone(), s.clone());
    let verdict = check_vnm(&u_d, &t.game, &t.config)?;
    let sampled = probe_bilinearity(&u_d, &t.game, &t.config)?;
    let s_ok = check_bilinear(s, &t.game, &t.config)?.passed;
    Ok((
        verdict.passed && sampled.passed && s_ok,
        sampled.max_deviation,
    ))
}

pub fn run_randomized_verification(params: TrialParams) -> Result<TrialSummary> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut forward = SuiteSummary::new("u_g, u_d expected utility => s bilinear");
    let mut backward =
        SuiteSummary::new("u_g expected utility, s bilinear => u_d expected utility");
    for _ in 0..params.trials {
        let fwd = random_instance(&mut rng, params.max_m, params.max_n);
        let bwd = random_instance(&mut rng, params.max_m, params.max_n);
        for (suite, result) in [
            (&mut forward, forward_trial(&fwd)?),
            (&mut backward, backward_trial(&bwd)?),
        ] {
            let (ok, dev) = result;
            suite.trials += 1;
            suite.consistent += usize::from(ok);
            suite.worst_deviation = suite.worst_deviation.max(dev);
        }
    }
    Ok(TrialSummary {
        params,
        forward,
        backward,
    })
}

impl fmt::Display for TrialSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        writeln!(
            f,
            "randomized verification: {} trials, games up to {}x{}, seed {}",
            p.trials, p.max_m, p.max_n, p.seed
        )?;
        for s in [&self.forward, &self.backward] {
            writeln!(
                f,
                "  {}: {}/{} consistent, worst deviation {:.3e}",
                s.name, s.consistent, s.trials, s.worst_deviation
            )?;
        }
        write!(
            f,
            "result: {}",
            if self.all_consistent() {
                "all trials consistent"
            } else {
                "INCONSISTENT trials found"
            }
        )
    }
}
