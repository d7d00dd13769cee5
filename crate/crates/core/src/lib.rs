//! Exact search for online bin stretching bounds.
//!
//! An instance is the triple `(bins, granularity, capacity)`: an adversary
//! feeds items to an online player who must keep `bins` bins below the
//! stretched `capacity`, while the adversary is bound (indirectly, through
//! the cheat check) to sequences that fit `bins` offline bins of size
//! `granularity`. A win for the online player certifies a bin stretching
//! algorithm with stretching factor `capacity / granularity`.
//!
//! The pieces:
//!
//! * [`model`] — parameters, canonical fill states, histories, items, and
//!   the single-move transition.
//! * [`packing`] — exact and heuristic multiset packing: the cheat check
//!   and the history comparison behind the cache.
//! * [`cache`] — the dominance cache of won and lost histories per fill
//!   state.
//! * [`solver`] — the minimax search with its guards, plus the capacity
//!   sweep.
//! * [`certificate`] — extraction, serialization, and rule-only
//!   verification of winning strategies.
//!
//! ```
//! use binstretch::{solve_instance, Outcome, Params, SolveConfig};
//!
//! let params = Params::new(2, 3, 4).unwrap();
//! let report = solve_instance(params, &SolveConfig::default()).unwrap();
//! assert_eq!(report.outcome, Outcome::AlgorithmWins); // stretching factor 4/3
//! ```

pub mod cache;
pub mod certificate;
pub mod model;
pub mod packing;
pub mod solver;

pub use cache::{CacheConfig, CacheOutcome, DominanceCache};
pub use certificate::{extract, Certificate, VerifyOutcome};
pub use model::{FillState, GameState, History, Item, ModelError, Params};
pub use solver::{
    minimal_capacity, solve_instance, Outcome, SolveConfig, SolveError, SolveReport, SolveStats,
    Solver, SweepConclusion, SweepResult,
};
