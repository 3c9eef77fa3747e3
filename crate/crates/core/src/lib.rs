//! Social utility under risk for two-player games.
//!
//! Alice's utility in a game (`u_g`) and in the associated decision problem
//! against Nature (`u_d`) induce a social utility `s = u_g - u_d`. When `u_g`
//! is expected utility, `u_d` is expected utility exactly when `s` is
//! bilinear; this crate evaluates such functionals over mixed-strategy
//! profiles, tests bilinearity with witness search, and builds the selfish
//! utility that counterbalances a non-bilinear `s`.
//!
//! ```
//! use socpref::{analysis, fixture, game::Profile, utility::evaluate};
//!
//! let game = fixture::example_game();
//! let cfg = analysis::ProbeConfig::default();
//! let (u_d, report) = analysis::counterbalance(
//!     &fixture::example_game_utility(),
//!     &fixture::example_social(),
//!     &game,
//!     &cfg,
//! )
//! .unwrap();
//! assert_eq!(evaluate(&u_d, &game, &Profile::centroid(2, 2)).unwrap(), 9.0);
//! assert!(!report.s_verdict.passed && !report.u_d_verdict.passed);
//! ```

pub mod analysis;
pub mod error;
pub mod fixture;
pub mod game;
pub mod render;
pub mod social;
pub mod utility;
pub mod verify;

pub use analysis::{
    check_affine_invariance, check_bilinear, check_vnm, counterbalance, find_witness,
    verify_theorem, BilinearityVerdict, DecompositionReport, ProbeConfig,
};
pub use error::{Error, Result};
pub use game::{expected_material_payoff, make_mixed, pure_profile, Game, MixedStrategy, Profile};
pub use social::{eval_social, SocialFunctional};
pub use utility::{
    evaluate, induced_social, multilinear_extension, restrict_to_pure, UtilitySpec, UtilityTable,
};
