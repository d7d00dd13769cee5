//! Game-tree search for a winning online strategy.
//!
//! [`Solver::solve_state`] decides whether a position is winnable for the
//! online player: a state wins when every adversary item admits some placement
//! leading to a winnable state, or failing that, when the cheat check proves
//! the adversary's emitted classes were never packable. Two guards settle
//! states without recursion — the adversary has spent its volume budget, or
//! everything still outstanding fits the emptiest bin — and the dominance
//! cache settles states comparable to already-solved ones.
//!
//! The search is deterministic end to end: items are enumerated by ascending
//! class then ascending overflow vector, bins fullest-first (best fit, since
//! fill states are kept sorted), and cache scans follow canonical encoding
//! order. Two runs with equal parameters and configuration produce identical
//! outcomes, statistics, and certificates.

use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::cache::{CacheConfig, CacheError, CacheOutcome, DominanceCache, Verdict};
use crate::model::{
    render_state, FillState, GameState, History, Item, ModelError, Overflows, Params, Placement,
};
use crate::packing::che;

/// Verdict of a full-instance solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// The online player has a winning strategy: a stretching factor of
    /// `capacity / granularity` is achievable with this many bins.
    AlgorithmWins,
    /// The adversary refutes every strategy at this capacity.
    AdversaryWins,
    /// The node limit stopped the search before a verdict.
    Inconclusive,
}

/// Knobs for one solver run. The defaults reproduce the intended search;
/// the alternatives exist for experiments and for isolating regressions.
#[derive(Debug, Clone)]
pub struct SolveConfig {
    /// Consult and fill the dominance cache.
    pub cache_enabled: bool,
    /// Include the item that just failed every placement in the cheat check.
    /// Sound (the adversary did emit it) and strictly stronger; `false`
    /// restores the weaker check over the prior history only.
    pub che_includes_current_item: bool,
    /// Abort with [`Outcome::Inconclusive`] after this many solve calls.
    pub node_limit: Option<u64>,
    /// Emit a trace line on stderr for every solve entry at most this deep.
    pub trace_depth: Option<u32>,
    /// Worker threads for the root-level parallel driver. Workers split the
    /// root items and search independently, each with a private cache; the
    /// merged outcome equals the single-threaded one, statistics need not.
    pub workers: usize,
    pub cache: CacheConfig,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            cache_enabled: true,
            che_includes_current_item: true,
            node_limit: None,
            trace_depth: None,
            workers: 1,
            cache: CacheConfig::default(),
        }
    }
}

/// Counters from one run. All monotone while the run lasts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub solve_calls: u64,
    pub search_calls: u64,
    pub che_calls: u64,
    pub che_wins: u64,
    pub guard_volume_wins: u64,
    pub guard_emptiest_wins: u64,
    pub cache_queries: u64,
    pub cache_won_hits: u64,
    pub cache_lost_hits: u64,
    pub cache_insertions: u64,
    pub cache_distinct_fills: u64,
    pub cache_stored_histories: u64,
    pub peak_stored_histories: u64,
}

impl SolveStats {
    /// Flat key=value view for reports.
    pub fn entries(&self) -> [(&'static str, u64); 13] {
        [
            ("solve_calls", self.solve_calls),
            ("search_calls", self.search_calls),
            ("che_calls", self.che_calls),
            ("che_wins", self.che_wins),
            ("guard_volume_wins", self.guard_volume_wins),
            ("guard_emptiest_wins", self.guard_emptiest_wins),
            ("cache_queries", self.cache_queries),
            ("cache_won_hits", self.cache_won_hits),
            ("cache_lost_hits", self.cache_lost_hits),
            ("cache_insertions", self.cache_insertions),
            ("cache_distinct_fills", self.cache_distinct_fills),
            ("cache_stored_histories", self.cache_stored_histories),
            ("peak_stored_histories", self.peak_stored_histories),
        ]
    }

    fn absorb(&mut self, other: &SolveStats) {
        self.solve_calls += other.solve_calls;
        self.search_calls += other.search_calls;
        self.che_calls += other.che_calls;
        self.che_wins += other.che_wins;
        self.guard_volume_wins += other.guard_volume_wins;
        self.guard_emptiest_wins += other.guard_emptiest_wins;
        self.cache_queries += other.cache_queries;
        self.cache_won_hits += other.cache_won_hits;
        self.cache_lost_hits += other.cache_lost_hits;
        self.cache_insertions += other.cache_insertions;
        self.cache_distinct_fills += other.cache_distinct_fills;
        self.cache_stored_histories += other.cache_stored_histories;
        self.peak_stored_histories = self.peak_stored_histories.max(other.peak_stored_histories);
    }
}

/// Why a search stopped without a game verdict.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum SolveInterrupt {
    #[error("node limit exceeded")]
    NodeLimitExceeded,
    #[error("cache memory cap of {cap_bytes} bytes exceeded")]
    MemoryCapExceeded { cap_bytes: u64 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("cache memory cap of {cap_bytes} bytes exceeded")]
    MemoryCapExceeded { cap_bytes: u64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// All adversary items available in this fill state, in deterministic order:
/// ascending class, then ascending overflow vector (read as a binary number,
/// fullest bin first).
///
/// An item class is available while it stays strictly below
/// `min(remaining, granularity)` where `remaining` is the volume budget minus
/// the current total minus one; the all-overflow class-0 item is available
/// whenever that limit is positive. Empty once the budget is spent.
pub fn generate_items(params: &Params, fill: &FillState) -> Vec<Item> {
    let remaining = params.offline_volume() as i64 - fill.total() as i64 - 1;
    let limit = remaining.min(params.granularity() as i64);
    if limit <= 0 {
        return Vec::new();
    }
    let bins = params.bins();
    let vectors = 1u32 << bins;
    let class_limit = limit as u32;
    let mut items = Vec::with_capacity(1 + ((class_limit as usize).saturating_sub(1) << bins));
    items.push(Item::new(0, Overflows::all(bins)));
    for class in 1..class_limit {
        for value in 0..vectors {
            items.push(Item::new(class, Overflows::from_vector_value(value, bins)));
        }
    }
    items
}

/// How many items [`generate_items`] would return, without building them.
/// Lets the certificate verifier reject a branch set of the wrong size
/// before materializing anything an untrusted document sized.
pub fn available_item_count(params: &Params, fill: &FillState) -> u64 {
    let remaining = params.offline_volume() as i64 - fill.total() as i64 - 1;
    let limit = remaining.min(params.granularity() as i64);
    if limit <= 0 {
        return 0;
    }
    1 + (limit as u64 - 1) * (1u64 << params.bins())
}

/// One search engine instance: parameters, configuration, cache, counters.
///
/// Cheap to create; not meant to be shared across threads. The parallel
/// driver in [`solve_instance`] builds one per worker.
pub struct Solver {
    params: Params,
    config: SolveConfig,
    cache: DominanceCache,
    solve_calls: u64,
    search_calls: u64,
    che_calls: u64,
    che_wins: u64,
    guard_volume_wins: u64,
    guard_emptiest_wins: u64,
}

impl Solver {
    pub fn new(params: Params, config: &SolveConfig) -> Self {
        Solver {
            params,
            config: config.clone(),
            cache: DominanceCache::new(config.cache.clone()),
            solve_calls: 0,
            search_calls: 0,
            che_calls: 0,
            che_wins: 0,
            guard_volume_wins: 0,
            guard_emptiest_wins: 0,
        }
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn config(&self) -> &SolveConfig {
        &self.config
    }

    pub fn stats(&self) -> SolveStats {
        let counters = self.cache.counters();
        SolveStats {
            solve_calls: self.solve_calls,
            search_calls: self.search_calls,
            che_calls: self.che_calls,
            che_wins: self.che_wins,
            guard_volume_wins: self.guard_volume_wins,
            guard_emptiest_wins: self.guard_emptiest_wins,
            cache_queries: counters.queries,
            cache_won_hits: counters.won_hits,
            cache_lost_hits: counters.lost_hits,
            cache_insertions: counters.insertions,
            cache_distinct_fills: self.cache.distinct_fills(),
            cache_stored_histories: self.cache.stored_histories(),
            peak_stored_histories: self.cache.peak_stored_histories(),
        }
    }

    /// Decides the instance from the empty starting position.
    pub fn solve_initial(&mut self) -> Result<bool, SolveInterrupt> {
        let state = GameState::initial(&self.params);
        self.solve(&state.fill, &state.history, 0)
    }

    /// Decides an arbitrary (canonical) position.
    pub fn solve_state(&mut self, state: &GameState) -> Result<bool, SolveInterrupt> {
        self.solve(&state.fill, &state.history, 0)
    }

    pub(crate) fn solve_parts(
        &mut self,
        fill: &FillState,
        history: &History,
    ) -> Result<bool, SolveInterrupt> {
        self.solve(fill, history, 0)
    }

    /// True iff the position is winnable for the online player.
    ///
    /// Evaluation order is fixed: volume guard, emptiest-bin guard, cache
    /// query, then one search per item with the verdict recorded in the
    /// cache. The returned value does not depend on whether the cache is
    /// enabled.
    fn solve(
        &mut self,
        fill: &FillState,
        history: &History,
        depth: u32,
    ) -> Result<bool, SolveInterrupt> {
        self.solve_calls += 1;
        if let Some(limit) = self.config.node_limit {
            if self.solve_calls > limit {
                return Err(SolveInterrupt::NodeLimitExceeded);
            }
        }
        if let Some(trace_depth) = self.config.trace_depth {
            if depth <= trace_depth {
                eprintln!("trace: depth={} {}", depth, render_state(fill, history));
            }
        }

        let total = fill.total();
        let volume = self.params.offline_volume();
        // the adversary has committed at least the summed fill levels, and
        // strictly more in every non-empty bin
        if total >= volume {
            self.guard_volume_wins += 1;
            return Ok(true);
        }
        // everything still outstanding fits the emptiest bin
        let remaining = volume - total - 1;
        if remaining + (fill.min_level() as u64) < self.params.capacity() as u64 {
            self.guard_emptiest_wins += 1;
            return Ok(true);
        }

        if self.config.cache_enabled {
            match self.cache.query(fill, history) {
                CacheOutcome::Won => return Ok(true),
                CacheOutcome::Lost => return Ok(false),
                CacheOutcome::Unknown => {}
            }
        }

        for item in generate_items(&self.params, fill) {
            if !self.search(item, fill, history, depth)? {
                self.record(fill, history, Verdict::Lost)?;
                return Ok(false);
            }
        }
        self.record(fill, history, Verdict::Won)?;
        Ok(true)
    }

    /// True iff the online player survives this particular item: some bin
    /// accepts it (no online loss) and the successor is winnable — bins are
    /// tried fullest-first — or no bin does but the cheat check convicts the
    /// adversary.
    fn search(
        &mut self,
        item: Item,
        fill: &FillState,
        history: &History,
        depth: u32,
    ) -> Result<bool, SolveInterrupt> {
        self.search_calls += 1;
        let grown_history = (item.class() > 0).then(|| history.with(item.class()));
        let next_history = grown_history.as_ref().unwrap_or(history);
        for bin in 0..self.params.bins() {
            let placed = fill
                .place(item, bin, &self.params)
                .expect("bin index within range");
            if let Placement::NewFill(next_fill) = placed {
                if self.solve(&next_fill, next_history, depth + 1)? {
                    return Ok(true);
                }
            }
        }
        let cheat_history = if self.config.che_includes_current_item {
            next_history
        } else {
            history
        };
        self.che_calls += 1;
        let cheated = che(cheat_history, &self.params);
        if cheated {
            self.che_wins += 1;
        }
        Ok(cheated)
    }

    fn record(
        &mut self,
        fill: &FillState,
        history: &History,
        verdict: Verdict,
    ) -> Result<(), SolveInterrupt> {
        if !self.config.cache_enabled {
            return Ok(());
        }
        match self.cache.insert(fill, history, verdict) {
            Ok(()) => Ok(()),
            Err(CacheError::MemoryCapExceeded { cap_bytes }) => {
                Err(SolveInterrupt::MemoryCapExceeded { cap_bytes })
            }
            Err(err @ CacheError::IntegrityViolation { .. }) => {
                // both verdicts for one state: the search itself is broken
                panic!("dominance cache integrity violation: {err}");
            }
        }
    }
}

/// Result of deciding one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub outcome: Outcome,
    pub stats: SolveStats,
}

/// Decides a whole instance from the empty state, honoring
/// `config.workers`. Deterministic for fixed parameters and configuration.
pub fn solve_instance(params: Params, config: &SolveConfig) -> Result<SolveReport, SolveError> {
    if config.workers > 1 {
        return solve_instance_parallel(params, config);
    }
    let mut solver = Solver::new(params, config);
    let report = |outcome: Outcome, solver: &Solver| SolveReport {
        outcome,
        stats: solver.stats(),
    };
    match solver.solve_initial() {
        Ok(true) => Ok(report(Outcome::AlgorithmWins, &solver)),
        Ok(false) => Ok(report(Outcome::AdversaryWins, &solver)),
        Err(SolveInterrupt::NodeLimitExceeded) => Ok(report(Outcome::Inconclusive, &solver)),
        Err(SolveInterrupt::MemoryCapExceeded { cap_bytes }) => {
            Err(SolveError::MemoryCapExceeded { cap_bytes })
        }
    }
}

enum WorkerVerdict {
    AllSurvived,
    Refuted,
    Interrupted(SolveInterrupt),
}

/// Splits the root items round-robin over private single-threaded solvers.
/// A refutation found by any worker is a complete answer and wins over
/// interrupts from the others; node limits and memory caps apply per worker.
fn solve_instance_parallel(
    params: Params,
    config: &SolveConfig,
) -> Result<SolveReport, SolveError> {
    let root = GameState::initial(&params);
    let mut stats = SolveStats {
        solve_calls: 1,
        ..SolveStats::default()
    };

    // replicate the root guards so workers start below them
    let total = root.fill.total();
    let volume = params.offline_volume();
    if total >= volume {
        stats.guard_volume_wins = 1;
        return Ok(SolveReport {
            outcome: Outcome::AlgorithmWins,
            stats,
        });
    }
    let remaining = volume - total - 1;
    if remaining + (root.fill.min_level() as u64) < params.capacity() as u64 {
        stats.guard_emptiest_wins = 1;
        return Ok(SolveReport {
            outcome: Outcome::AlgorithmWins,
            stats,
        });
    }

    let items = generate_items(&params, &root.fill);
    let workers = config.workers.min(items.len()).max(1);
    let worker_config = SolveConfig {
        workers: 1,
        ..config.clone()
    };

    let results: Vec<(WorkerVerdict, SolveStats)> = thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let my_items: Vec<Item> = items.iter().skip(w).step_by(workers).copied().collect();
                let worker_config = &worker_config;
                let root = &root;
                scope.spawn(move || {
                    let mut solver = Solver::new(params, worker_config);
                    for item in my_items {
                        match solver.search(item, &root.fill, &root.history, 0) {
                            Ok(true) => {}
                            Ok(false) => return (WorkerVerdict::Refuted, solver.stats()),
                            Err(stop) => return (WorkerVerdict::Interrupted(stop), solver.stats()),
                        }
                    }
                    (WorkerVerdict::AllSurvived, solver.stats())
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver worker panicked"))
            .collect()
    });

    let mut interrupt: Option<SolveInterrupt> = None;
    let mut refuted = false;
    for (verdict, worker_stats) in &results {
        stats.absorb(worker_stats);
        match verdict {
            WorkerVerdict::Refuted => refuted = true,
            WorkerVerdict::Interrupted(stop) => {
                interrupt.get_or_insert(*stop);
            }
            WorkerVerdict::AllSurvived => {}
        }
    }
    if refuted {
        return Ok(SolveReport {
            outcome: Outcome::AdversaryWins,
            stats,
        });
    }
    match interrupt {
        Some(SolveInterrupt::MemoryCapExceeded { cap_bytes }) => {
            Err(SolveError::MemoryCapExceeded { cap_bytes })
        }
        Some(SolveInterrupt::NodeLimitExceeded) => Ok(SolveReport {
            outcome: Outcome::Inconclusive,
            stats,
        }),
        None => Ok(SolveReport {
            outcome: Outcome::AlgorithmWins,
            stats,
        }),
    }
}

/// One capacity tried during a sweep.
#[derive(Debug, Clone)]
pub struct SweepStep {
    pub capacity: u32,
    pub outcome: Outcome,
    pub stats: SolveStats,
    pub wall: Duration,
}

/// How a sweep ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepConclusion {
    /// Smallest winning capacity in `granularity..=2*granularity`.
    Found { capacity: u32 },
    /// No win up to twice the granularity (stretching factor 2).
    NoneWithinTwiceGranularity,
    /// A solve in the scanned range was inconclusive at this capacity.
    Inconclusive { capacity: u32 },
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub steps: Vec<SweepStep>,
    pub conclusion: SweepConclusion,
}

/// Scans capacities upward from the granularity and reports the smallest
/// winning one. The scan is linear by design: it never assumes wins are
/// monotone in the capacity, it observes where they start.
pub fn minimal_capacity(
    bins: usize,
    granularity: u32,
    config: &SolveConfig,
) -> Result<SweepResult, SolveError> {
    let mut steps = Vec::new();
    for capacity in granularity..=granularity.saturating_mul(2) {
        let params = Params::new(bins, granularity, capacity)?;
        let started = Instant::now();
        let report = solve_instance(params, config)?;
        let wall = started.elapsed();
        let outcome = report.outcome;
        steps.push(SweepStep {
            capacity,
            outcome,
            stats: report.stats,
            wall,
        });
        match outcome {
            Outcome::AlgorithmWins => {
                return Ok(SweepResult {
                    steps,
                    conclusion: SweepConclusion::Found { capacity },
                });
            }
            Outcome::Inconclusive => {
                return Ok(SweepResult {
                    steps,
                    conclusion: SweepConclusion::Inconclusive { capacity },
                });
            }
            Outcome::AdversaryWins => {}
        }
    }
    Ok(SweepResult {
        steps,
        conclusion: SweepConclusion::NoneWithinTwiceGranularity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(bins: usize, granularity: u32, capacity: u32) -> Params {
        Params::new(bins, granularity, capacity).unwrap()
    }

    fn fill(levels: &[u32]) -> FillState {
        FillState::canonicalize(levels.to_vec(), levels.len()).unwrap()
    }

    #[test]
    fn item_generation_from_empty_state() {
        let p = params(2, 3, 4);
        let items = generate_items(&p, &FillState::zeros(2));
        // remaining 5, limit 3: the class-0 item plus classes 1 and 2 with
        // all four overflow vectors each
        assert_eq!(items.len(), 9);
        let rendered: Vec<String> = items.iter().map(|i| i.to_string()).collect();
        assert_eq!(
            rendered,
            vec!["0|11", "1|00", "1|01", "1|10", "1|11", "2|00", "2|01", "2|10", "2|11"]
        );
    }

    #[test]
    fn item_count_matches_generation() {
        for (bins, g, c, levels) in [
            (2usize, 3u32, 4u32, vec![0, 0]),
            (2, 3, 4, vec![3, 1]),
            (2, 3, 4, vec![3, 2]),
            (3, 4, 6, vec![2, 1, 0]),
            (3, 1, 2, vec![0, 0, 0]),
        ] {
            let p = params(bins, g, c);
            let f = FillState::canonicalize(levels, bins).unwrap();
            assert_eq!(
                generate_items(&p, &f).len() as u64,
                available_item_count(&p, &f)
            );
        }
    }

    #[test]
    fn item_generation_with_spent_budget() {
        let p = params(2, 3, 4);
        // total 5 of 6: remaining 0, no items at all
        assert!(generate_items(&p, &fill(&[3, 2])).is_empty());
        // total 4: remaining 1, only the class-0 item qualifies
        let items = generate_items(&p, &fill(&[3, 1]));
        assert_eq!(items.len(), 1);
        assert_eq!(items[0].to_string(), "0|11");
    }

    #[test]
    fn volume_guard_wins_immediately() {
        let p = params(2, 3, 5);
        let mut solver = Solver::new(p, &SolveConfig::default());
        let h = History::new(vec![2, 2], &p).unwrap();
        let state = GameState::new(fill(&[3, 3]), h);
        assert!(solver.solve_state(&state).unwrap());
        assert_eq!(solver.stats().guard_volume_wins, 1);
        assert_eq!(solver.stats().search_calls, 0);
    }

    #[test]
    fn emptiest_bin_guard_wins_immediately() {
        let p = params(2, 3, 4);
        let mut solver = Solver::new(p, &SolveConfig::default());
        let state = GameState::new(fill(&[3, 0]), History::empty());
        // remaining 2 plus emptiest 0 stays below capacity 4
        assert!(solver.solve_state(&state).unwrap());
        assert_eq!(solver.stats().guard_emptiest_wins, 1);
        assert_eq!(solver.stats().search_calls, 0);
    }

    #[test]
    fn search_falls_back_to_cheat_check() {
        let p = params(2, 4, 5);
        let mut solver = Solver::new(p, &SolveConfig::default());
        let h = History::new(vec![2, 2], &p).unwrap();
        let item = Item::new(2, Overflows::all(2));
        // both placements reach 4 + 2 + 1 = 7 >= 5; the grown history
        // {2,2,2} cannot fit two offline bins of size 3
        assert!(solver.search(item, &fill(&[4, 4]), &h, 0).unwrap());
        assert_eq!(solver.stats().che_wins, 1);
    }

    #[test]
    fn search_loses_when_the_cheat_is_unproven() {
        let p = params(2, 3, 4);
        let mut solver = Solver::new(p, &SolveConfig::default());
        let item = Item::new(1, Overflows::all(2));
        // both placements reach 3 + 1 + 1 >= 4, and the lone class-1 item
        // fits an offline bin of size 2: the adversary's move stands
        assert!(!solver.search(item, &fill(&[3, 3]), &History::empty(), 0).unwrap());
        assert_eq!(solver.stats().che_calls, 1);
        assert_eq!(solver.stats().che_wins, 0);
    }

    #[test]
    fn landmark_two_bin_instances() {
        let win = solve_instance(params(2, 3, 4), &SolveConfig::default()).unwrap();
        assert_eq!(win.outcome, Outcome::AlgorithmWins);
        let loss = solve_instance(params(2, 3, 3), &SolveConfig::default()).unwrap();
        assert_eq!(loss.outcome, Outcome::AdversaryWins);
    }

    #[test]
    fn degenerate_granularity_one() {
        // with item classes capped at 0, the budget runs out at capacity 2
        let win = solve_instance(params(2, 1, 2), &SolveConfig::default()).unwrap();
        assert_eq!(win.outcome, Outcome::AlgorithmWins);
        let loss = solve_instance(params(2, 1, 1), &SolveConfig::default()).unwrap();
        assert_eq!(loss.outcome, Outcome::AdversaryWins);
    }

    #[test]
    fn node_limit_reports_inconclusive() {
        let report = solve_instance(
            params(2, 3, 4),
            &SolveConfig {
                node_limit: Some(1),
                ..SolveConfig::default()
            },
        )
        .unwrap();
        assert_eq!(report.outcome, Outcome::Inconclusive);
    }

    #[test]
    fn memory_cap_aborts() {
        let err = solve_instance(
            params(2, 3, 4),
            &SolveConfig {
                cache: CacheConfig {
                    memory_cap_bytes: Some(1),
                    ..CacheConfig::default()
                },
                ..SolveConfig::default()
            },
        )
        .unwrap_err();
        assert_eq!(err, SolveError::MemoryCapExceeded { cap_bytes: 1 });
    }

    #[test]
    fn cache_does_not_change_outcomes() {
        for (g, c) in [(3, 3), (3, 4), (2, 3), (1, 2)] {
            let p = params(2, g, c);
            let with = solve_instance(p, &SolveConfig::default()).unwrap();
            let without = solve_instance(
                p,
                &SolveConfig {
                    cache_enabled: false,
                    ..SolveConfig::default()
                },
            )
            .unwrap();
            assert_eq!(
                with.outcome, without.outcome,
                "at granularity {g} capacity {c}"
            );
        }
    }

    #[test]
    fn parallel_driver_matches_single_threaded() {
        for (g, c) in [(3, 3), (3, 4), (4, 5), (4, 6)] {
            let p = params(2, g, c);
            let single = solve_instance(p, &SolveConfig::default()).unwrap();
            let parallel = solve_instance(
                p,
                &SolveConfig {
                    workers: 3,
                    ..SolveConfig::default()
                },
            )
            .unwrap();
            assert_eq!(
                single.outcome, parallel.outcome,
                "at granularity {g} capacity {c}"
            );
        }
    }

    #[test]
    fn sweep_finds_minimal_capacity() {
        let sweep = minimal_capacity(2, 3, &SolveConfig::default()).unwrap();
        assert_eq!(sweep.conclusion, SweepConclusion::Found { capacity: 4 });
        assert_eq!(sweep.steps.len(), 2);
        assert_eq!(sweep.steps[0].outcome, Outcome::AdversaryWins);

        let sweep = minimal_capacity(2, 1, &SolveConfig::default()).unwrap();
        assert_eq!(sweep.conclusion, SweepConclusion::Found { capacity: 2 });
    }

    #[test]
    fn sweep_propagates_inconclusive() {
        let sweep = minimal_capacity(
            2,
            3,
            &SolveConfig {
                node_limit: Some(1),
                ..SolveConfig::default()
            },
        )
        .unwrap();
        assert_eq!(
            sweep.conclusion,
            SweepConclusion::Inconclusive { capacity: 3 }
        );
    }

    #[test]
    fn literal_cheat_check_never_beats_the_default() {
        // including the current item is strictly stronger, so a win under
        // the literal variant must stay a win under the default
        for bins in [2usize, 3] {
            for g in 1..=4u32 {
                for c in g..=2 * g {
                    let p = params(bins, g, c);
                    let literal = solve_instance(
                        p,
                        &SolveConfig {
                            che_includes_current_item: false,
                            ..SolveConfig::default()
                        },
                    )
                    .unwrap();
                    let default = solve_instance(p, &SolveConfig::default()).unwrap();
                    if literal.outcome == Outcome::AlgorithmWins {
                        assert_eq!(default.outcome, Outcome::AlgorithmWins);
                    }
                }
            }
        }
    }
}
