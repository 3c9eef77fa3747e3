//! Bilinearity audits, the counterbalancing construction, and affine checks.
//!
//! A functional is treated as bilinear (equivalently, as a vNM expected
//! utility over profiles) when it agrees with the multilinear extension of its
//! own pure-profile restriction. Trees whose leaves are all tables are
//! accepted structurally; anything else is probed at a deterministic sequence
//! of profiles: every vertex, every edge midpoint paired with each opposing
//! vertex, the centroid, then seeded uniform-Dirichlet draws. A sampled pass
//! means no violation was found within the probe budget, nothing more.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Game, MixedStrategy, Profile};
use crate::utility::{
    evaluate, induced_social, multilinear_extension, restrict_to_pure, UtilitySpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    /// Absolute tolerance in utils.
    pub tolerance: f64,
    pub n_random: usize,
    pub seed: u64,
    pub include_structured: bool,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            n_random: 1000,
            seed: 0,
            include_structured: true,
        }
    }
}

impl ProbeConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Every leaf is a table, so the functional is bilinear by construction.
    Structural,
    /// Checked at probe profiles only.
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BilinearityVerdict {
    pub passed: bool,
    pub max_deviation: f64,
    /// Probe attaining `max_deviation`; absent when nothing was probed.
    pub witness: Option<Profile>,
    pub method: Method,
    pub probes_used: usize,
    #[serde(flatten)]
    pub config: ProbeConfig,
}

/// Structured probes: vertices, edge midpoints against opposing vertices,
/// then the centroid.
pub fn structured_probes(rows: usize, cols: usize) -> Vec<Profile> {
    let mut out = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            out.push(Profile::new(
                MixedStrategy::pure(rows, i),
                MixedStrategy::pure(cols, j),
            ));
        }
    }
    for a in 0..rows {
        for b in a + 1..rows {
            for j in 0..cols {
                out.push(Profile::new(
                    MixedStrategy::midpoint(rows, a, b),
                    MixedStrategy::pure(cols, j),
                ));
            }
        }
    }
    for a in 0..cols {
        for b in a + 1..cols {
            for i in 0..rows {
                out.push(Profile::new(
                    MixedStrategy::pure(rows, i),
                    MixedStrategy::midpoint(cols, a, b),
                ));
            }
        }
    }
    out.push(Profile::centroid(rows, cols));
    out
}

/// Uniform draw from the simplex of dimension `len`.
pub fn random_simplex_point<R: rand::Rng + ?Sized>(rng: &mut R, len: usize) -> MixedStrategy {
    loop {
        let weights: Vec<f64> = (0..len).map(|_| Exp1.sample(rng)).collect();
        if let Ok(s) = MixedStrategy::new(weights) {
            return s;
        }
    }
}

/// Seeded stream of independent uniform profiles.
pub struct RandomProfiles {
    rng: ChaCha8Rng,
    rows: usize,
    cols: usize,
}

impl RandomProfiles {
    pub fn new(rows: usize, cols: usize, seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            rows,
            cols,
        }
    }
}

impl Iterator for RandomProfiles {
    type Item = Profile;

    fn next(&mut self) -> Option<Profile> {
        let row = random_simplex_point(&mut self.rng, self.rows);
        let col = random_simplex_point(&mut self.rng, self.cols);
        Some(Profile::new(row, col))
    }
}

/// All probes `cfg` asks for on `game`, in enumeration order.
pub fn probes(game: &Game, cfg: &ProbeConfig) -> Vec<Profile> {
    let (m, n) = (game.rows(), game.cols());
    let mut out = if cfg.include_structured {
        structured_probes(m, n)
    } else {
        Vec::new()
    };
    out.extend(RandomProfiles::new(m, n, cfg.seed).take(cfg.n_random));
    out
}

/// Arg-max of `|spec - extension of its restriction|` over `candidates`; the
/// first probe wins ties.
fn scan<I>(
    spec: &UtilitySpec,
    game: &Game,
    candidates: I,
) -> Result<(Option<(Profile, f64)>, usize)>
where
    I: IntoIterator<Item = Profile>,
{
    let table = restrict_to_pure(spec, game)?;
    let mut best: Option<(Profile, f64)> = None;
    let mut used = 0;
    for p in candidates {
        used += 1;
        let dev = (evaluate(spec, game, &p)? - multilinear_extension(&table, &p)?).abs();
        if best.as_ref().is_none_or(|(_, d)| dev > *d) {
            best = Some((p, dev));
        }
    }
    Ok((best, used))
}

/// Probes `spec` against its multilinear extension regardless of structure.
pub fn probe_bilinearity(
    spec: &UtilitySpec,
    game: &Game,
    cfg: &ProbeConfig,
) -> Result<BilinearityVerdict> {
    cfg.validate()?;
    let (best, probes_used) = scan(spec, game, probes(game, cfg))?;
    let (witness, max_deviation) = match best {
        Some((p, d)) => (Some(p), d),
        None => (None, 0.0),
    };
    Ok(BilinearityVerdict {
        passed: max_deviation <= cfg.tolerance,
        max_deviation,
        witness,
        method: Method::Sampled,
        probes_used,
        config: *cfg,
    })
}

pub fn check_bilinear(
    spec: &UtilitySpec,
    game: &Game,
    cfg: &ProbeConfig,
) -> Result<BilinearityVerdict> {
    cfg.validate()?;
    if spec.is_structurally_bilinear() {
        // Still tabulate so that mis-shaped tables are reported.
        restrict_to_pure(spec, game)?;
        return Ok(BilinearityVerdict {
            passed: true,
            max_deviation: 0.0,
            witness: None,
            method: Method::Structural,
            probes_used: 0,
            config: *cfg,
        });
    }
    probe_bilinearity(spec, game, cfg)
}

/// Whether `spec` is a vNM expected utility over profiles; same test as
/// [`check_bilinear`].
pub fn check_vnm(spec: &UtilitySpec, game: &Game, cfg: &ProbeConfig) -> Result<BilinearityVerdict> {
    check_bilinear(spec, game, cfg)
}

/// The probe with the largest deviation among the first `budget` probes
/// (structured ones first, then random draws from `seed`).
pub fn find_witness(
    spec: &UtilitySpec,
    game: &Game,
    budget: usize,
    seed: u64,
) -> Result<(Profile, f64)> {
    if budget == 0 {
        return Err(Error::InvalidParameter(
            "witness budget must be at least 1".into(),
        ));
    }
    let (m, n) = (game.rows(), game.cols());
    let candidates = structured_probes(m, n)
        .into_iter()
        .chain(RandomProfiles::new(m, n, seed))
        .take(budget);
    let (best, _) = scan(spec, game, candidates)?;
    Ok(best.expect("budget >= 1 yields at least one probe"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub label: String,
    pub profile: Profile,
    pub u_g: f64,
    pub u_d: f64,
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub s_spec: UtilitySpec,
    pub u_d_verdict: BilinearityVerdict,
    pub s_verdict: BilinearityVerdict,
    pub theorem_consistent: bool,
    /// Set when the verdicts disagree. Exact functions cannot disagree, so
    /// this always points at the tolerance or the probe budget.
    pub note: Option<String>,
    pub probes: Vec<ProbeRow>,
}

fn strategy_label(labels: &[String], s: &MixedStrategy, uniform_name: &str) -> String {
    match s.as_pure() {
        Some(i) => labels[i].clone(),
        None if s.probs().windows(2).all(|w| w[0] == w[1]) => uniform_name.to_string(),
        None => format!("{:?}", s.probs()),
    }
}

pub fn profile_label(game: &Game, p: &Profile) -> String {
    format!(
        "({}, {})",
        strategy_label(game.row_labels(), &p.row, "σ̂"),
        strategy_label(game.col_labels(), &p.col, "τ̂")
    )
}

/// Each pure row against the uniform column strategy, with the uniform row
/// strategy slotted into the middle, followed by every pure profile.
pub fn report_profiles(game: &Game) -> Vec<Profile> {
    let (m, n) = (game.rows(), game.cols());
    let tau = MixedStrategy::uniform(n);
    let mut out: Vec<Profile> = (0..m)
        .map(|i| Profile::new(MixedStrategy::pure(m, i), tau.clone()))
        .collect();
    if m > 1 {
        out.insert(m.div_ceil(2), Profile::centroid(m, n));
    }
    if n > 1 {
        out.extend(game.pure_profiles());
    }
    out
}

fn decompose(
    u_g: &UtilitySpec,
    u_d: &UtilitySpec,
    s: UtilitySpec,
    game: &Game,
    cfg: &ProbeConfig,
) -> Result<DecompositionReport> {
    let u_d_verdict = check_vnm(u_d, game, cfg)?;
    let s_verdict = check_bilinear(&s, game, cfg)?;
    let theorem_consistent = u_d_verdict.passed == s_verdict.passed;
    let note = (!theorem_consistent).then(|| {
        format!(
            "u_d {} but s {}: a tolerance or probe-budget artifact, not a counterexample \
             (tolerance {:e}, u_d deviation {:e}, s deviation {:e})",
            if u_d_verdict.passed {
                "passed"
            } else {
                "failed"
            },
            if s_verdict.passed { "passed" } else { "failed" },
            cfg.tolerance,
            u_d_verdict.max_deviation,
            s_verdict.max_deviation,
        )
    });
    let probes = report_profiles(game)
        .into_iter()
        .map(|p| {
            Ok(ProbeRow {
                label: profile_label(game, &p),
                u_g: evaluate(u_g, game, &p)?,
                u_d: evaluate(u_d, game, &p)?,
                s: evaluate(&s, game, &p)?,
                profile: p,
            })
        })
        .collect::<Result<_>>()?;
    Ok(DecompositionReport {
        s_spec: s,
        u_d_verdict,
        s_verdict,
        theorem_consistent,
        note,
        probes,
    })
}

fn require_game_utility_eu(u_g: &UtilitySpec, game: &Game, cfg: &ProbeConfig) -> Result<()> {
    let v = check_vnm(u_g, game, cfg)?;
    if v.passed {
        Ok(())
    } else {
        Err(Error::GameUtilityNotEU {
            deviation: v.max_deviation,
            tolerance: cfg.tolerance,
        })
    }
}

/// Builds the selfish utility `u_d = u_g - s` that keeps an expected-utility
/// `u_g` intact under an arbitrary social utility `s`.
pub fn counterbalance(
    u_g: &UtilitySpec,
    s: &UtilitySpec,
    game: &Game,
    cfg: &ProbeConfig,
) -> Result<(UtilitySpec, DecompositionReport)> {
    require_game_utility_eu(u_g, game, cfg)?;
    let u_d = UtilitySpec::difference(u_g.clone(), s.clone());
    let report = decompose(u_g, &u_d, s.clone(), game, cfg)?;
    Ok((u_d, report))
}

/// Checks that `u_d` is expected utility exactly when `s = u_g - u_d` is
/// bilinear, for an expected-utility `u_g`.
pub fn verify_theorem(
    u_g: &UtilitySpec,
    u_d: &UtilitySpec,
    game: &Game,
    cfg: &ProbeConfig,
) -> Result<DecompositionReport> {
    require_game_utility_eu(u_g, game, cfg)?;
    decompose(u_g, u_d, induced_social(u_g, u_d), game, cfg)
}

pub fn affine_transform(spec: &UtilitySpec, scale: f64, shift: f64) -> Result<UtilitySpec> {
    UtilitySpec::affine(spec.clone(), scale, shift)
}

/// Two probes whose social ranking is reversed by a transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingViolation {
    pub first: Profile,
    pub second: Profile,
    pub s_first: f64,
    pub s_second: f64,
    pub transformed_first: f64,
    pub transformed_second: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineInvarianceReport {
    pub scale: f64,
    pub shift: f64,
    /// Scale applied to `u_d` alone in the mismatched transform.
    pub mismatched_scale: f64,
    pub probes_used: usize,
    /// `max |ŝ(p) - scale * s(p)|` under the common transform.
    pub max_scaling_error: f64,
    pub scaling_holds: bool,
    /// Should always be `None`.
    pub common_violation: Option<OrderingViolation>,
    pub mismatched_violation: Option<OrderingViolation>,
    #[serde(flatten)]
    pub config: ProbeConfig,
}

impl AffineInvarianceReport {
    pub fn common_ordering_preserved(&self) -> bool {
        self.common_violation.is_none()
    }
}

/// Finds `(p, q)` with `s[p] < s[q] - tol` and `t[p] > t[q] + tol`.
///
/// Sweeps probes in ascending `s`, tracking the largest `t` among probes that
/// are strictly below the current one by more than `tol`.
fn find_reversal(s: &[f64], t: &[f64], tol: f64) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]).then(a.cmp(&b)));
    let mut lower = 0;
    let mut best: Option<usize> = None;
    for &q in &order {
        while lower < order.len() && s[order[lower]] < s[q] - tol {
            let p = order[lower];
            if best.is_none_or(|b| t[p] > t[b]) {
                best = Some(p);
            }
            lower += 1;
        }
        if let Some(p) = best {
            if t[p] > t[q] + tol {
                return Some((p, q));
            }
        }
    }
    None
}

/// Compares social rankings before and after transforming `u_g` and `u_d`.
///
/// With a common transform `ŝ = scale * s` must hold at every probe and no
/// ranking may flip. With `u_d` scaled by `mismatched_scale` instead, a
/// reversed pair is searched for and reported if one exists among the probes.
pub fn check_affine_invariance(
    u_g: &UtilitySpec,
    u_d: &UtilitySpec,
    scale: f64,
    shift: f64,
    mismatched_scale: f64,
    game: &Game,
    cfg: &ProbeConfig,
) -> Result<AffineInvarianceReport> {
    cfg.validate()?;
    let common = induced_social(
        &affine_transform(u_g, scale, shift)?,
        &affine_transform(u_d, scale, shift)?,
    );
    let mismatched = induced_social(
        &affine_transform(u_g, scale, shift)?,
        &affine_transform(u_d, mismatched_scale, shift)?,
    );
    if mismatched_scale == scale {
        return Err(Error::InvalidParameter(
            "mismatched scale must differ from the common scale".into(),
        ));
    }
    let s = induced_social(u_g, u_d);

    let probes = probes(game, cfg);
    let mut base = Vec::with_capacity(probes.len());
    let mut same = Vec::with_capacity(probes.len());
    let mut split = Vec::with_capacity(probes.len());
    for p in &probes {
        base.push(evaluate(&s, game, p)?);
        same.push(evaluate(&common, game, p)?);
        split.push(evaluate(&mismatched, game, p)?);
    }
    let max_scaling_error = base
        .iter()
        .zip(&same)
        .map(|(s, hat)| (hat - scale * s).abs())
        .fold(0.0, f64::max);

    let violation = |t: &[f64]| {
        find_reversal(&base, t, cfg.tolerance).map(|(p, q)| OrderingViolation {
            first: probes[p].clone(),
            second: probes[q].clone(),
            s_first: base[p],
            s_second: base[q],
            transformed_first: t[p],
            transformed_second: t[q],
        })
    };

    Ok(AffineInvarianceReport {
        scale,
        shift,
        mismatched_scale,
        probes_used: probes.len(),
        max_scaling_error,
        scaling_holds: max_scaling_error <= cfg.tolerance,
        common_violation: violation(&same),
        mismatched_violation: violation(&split),
        config: *cfg,
    })
}
