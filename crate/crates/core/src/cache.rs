//! Dominance cache over solved game states.
//!
//! Caching raw `(fill, history)` results verbatim is memory-bound long before
//! it is time-bound. Instead, each fill state keys two disjoint history sets:
//! wins and losses. A lookup succeeds not only on the exact history but on
//! any comparable one — a stored win with a [`history_leq`]-smaller history,
//! or a stored loss with a larger one — so whole families of states are
//! settled by a single stored entry.
//!
//! The cache never evicts. Bounded variants (LRU and friends) trade hit rate
//! for bookkeeping without improving runtime here, so growth is instead
//! bounded by an optional hard memory cap that aborts the run loudly rather
//! than degrading it silently.

use std::collections::{BTreeSet, HashMap};
use std::mem;

use thiserror::Error;

use crate::model::{render_state, FillState, History};
use crate::packing::history_leq;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CacheError {
    /// The same state was recorded with both verdicts — a solver bug or an
    /// unsound comparison relation.
    #[error("state {state} already cached as {existing:?}, refused {attempted:?}")]
    IntegrityViolation {
        state: String,
        existing: Verdict,
        attempted: Verdict,
    },
    #[error("cache memory cap of {cap_bytes} bytes exceeded")]
    MemoryCapExceeded { cap_bytes: u64 },
}

/// How a recursively evaluated state turned out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Won,
    Lost,
}

/// Answer to a cache lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheOutcome {
    Won,
    Lost,
    Unknown,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CacheCounters {
    pub queries: u64,
    pub won_hits: u64,
    pub lost_hits: u64,
    pub insertions: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CacheConfig {
    /// Drop stored histories made redundant by a new insertion. Off by
    /// default: it shrinks the sets but can also lose hits, since the
    /// comparison relation is not transitive.
    pub prune_dominated: bool,
    /// Hard cap on (estimated) cache heap usage, in bytes.
    pub memory_cap_bytes: Option<u64>,
}

#[derive(Debug, Default)]
struct StateSets {
    won: BTreeSet<History>,
    lost: BTreeSet<History>,
}

/// Per-fill-state sets of won and lost histories, queried through the
/// one-sided history comparison.
#[derive(Debug)]
pub struct DominanceCache {
    table: HashMap<FillState, StateSets>,
    counters: CacheCounters,
    config: CacheConfig,
    stored: u64,
    peak_stored: u64,
    approx_bytes: u64,
}

// Rough per-entry heap estimates for the memory cap: a history's class
// vector plus B-tree bookkeeping, and a fill state key plus its two sets.
const HISTORY_ENTRY_OVERHEAD: u64 = 48;
const FILL_KEY_OVERHEAD: u64 = 96;

impl DominanceCache {
    pub fn new(config: CacheConfig) -> Self {
        DominanceCache {
            table: HashMap::new(),
            counters: CacheCounters::default(),
            config,
            stored: 0,
            peak_stored: 0,
            approx_bytes: 0,
        }
    }

    /// Looks up a verdict for `(fill, history)`.
    ///
    /// Returns [`CacheOutcome::Won`] when some stored won history is
    /// `⊑ history` (a worse position was already won), otherwise
    /// [`CacheOutcome::Lost`] when `history ⊑` some stored lost history (a
    /// better position was already lost). Wins are checked first; sets are
    /// scanned in canonical encoding order, first match wins.
    pub fn query(&mut self, fill: &FillState, history: &History) -> CacheOutcome {
        self.counters.queries += 1;
        let Some(sets) = self.table.get(fill) else {
            return CacheOutcome::Unknown;
        };
        if sets.won.iter().any(|won| history_leq(won, history)) {
            self.counters.won_hits += 1;
            return CacheOutcome::Won;
        }
        if sets.lost.iter().any(|lost| history_leq(history, lost)) {
            self.counters.lost_hits += 1;
            return CacheOutcome::Lost;
        }
        CacheOutcome::Unknown
    }

    /// Records the verdict of a state that was just evaluated recursively.
    /// Only such states belong here; guard and cache exits are not recorded.
    pub fn insert(
        &mut self,
        fill: &FillState,
        history: &History,
        verdict: Verdict,
    ) -> Result<(), CacheError> {
        let new_fill = !self.table.contains_key(fill);
        let sets = self.table.entry(fill.clone()).or_default();
        let (own, opposite) = match verdict {
            Verdict::Won => (&mut sets.won, &sets.lost),
            Verdict::Lost => (&mut sets.lost, &sets.won),
        };
        if opposite.contains(history) {
            return Err(CacheError::IntegrityViolation {
                state: render_state(fill, history),
                existing: match verdict {
                    Verdict::Won => Verdict::Lost,
                    Verdict::Lost => Verdict::Won,
                },
                attempted: verdict,
            });
        }
        if self.config.prune_dominated {
            // a new win answers every query a ⊑-larger stored win answered;
            // a new loss covers every ⊑-smaller stored loss
            let redundant: Vec<History> = own
                .iter()
                .filter(|stored| match verdict {
                    Verdict::Won => *stored != history && history_leq(history, stored),
                    Verdict::Lost => *stored != history && history_leq(stored, history),
                })
                .cloned()
                .collect();
            for stale in redundant {
                own.remove(&stale);
                self.stored -= 1;
                self.approx_bytes = self
                    .approx_bytes
                    .saturating_sub(Self::history_bytes(&stale));
            }
        }
        if own.insert(history.clone()) {
            let mut added = Self::history_bytes(history);
            if new_fill {
                added += FILL_KEY_OVERHEAD + 4 * fill.bin_count() as u64;
            }
            if let Some(cap) = self.config.memory_cap_bytes {
                if self.approx_bytes + added > cap {
                    return Err(CacheError::MemoryCapExceeded { cap_bytes: cap });
                }
            }
            self.approx_bytes += added;
            self.stored += 1;
            self.peak_stored = self.peak_stored.max(self.stored);
            self.counters.insertions += 1;
        }
        Ok(())
    }

    fn history_bytes(history: &History) -> u64 {
        HISTORY_ENTRY_OVERHEAD + mem::size_of::<u32>() as u64 * history.len() as u64
    }

    pub fn counters(&self) -> CacheCounters {
        self.counters
    }

    /// Number of distinct fill states keyed.
    pub fn distinct_fills(&self) -> u64 {
        self.table.len() as u64
    }

    /// Histories currently stored across all fill states.
    pub fn stored_histories(&self) -> u64 {
        self.stored
    }

    /// High-water mark of stored histories (differs from the current count
    /// only when pruning is on).
    pub fn peak_stored_histories(&self) -> u64 {
        self.peak_stored
    }

    pub fn approx_bytes(&self) -> u64 {
        self.approx_bytes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Params;

    fn fill(levels: &[u32]) -> FillState {
        FillState::canonicalize(levels.to_vec(), levels.len()).unwrap()
    }

    fn hist(classes: &[u32]) -> History {
        let p = Params::new(2, 9, 9).unwrap();
        History::new(classes.to_vec(), &p).unwrap()
    }

    #[test]
    fn query_on_empty_cache_is_unknown() {
        let mut cache = DominanceCache::new(CacheConfig::default());
        assert_eq!(
            cache.query(&fill(&[0, 0]), &hist(&[2])),
            CacheOutcome::Unknown
        );
        assert_eq!(cache.counters().queries, 1);
    }

    #[test]
    fn won_entry_answers_larger_history() {
        let mut cache = DominanceCache::new(CacheConfig::default());
        let l = fill(&[1, 0]);
        cache.insert(&l, &hist(&[2]), Verdict::Won).unwrap();
        // {2} ⊑ {3}: the class-2 item fits a size-3 bin
        assert_eq!(cache.query(&l, &hist(&[3])), CacheOutcome::Won);
        assert_eq!(cache.counters().won_hits, 1);
    }

    #[test]
    fn lost_entry_answers_smaller_history() {
        let mut cache = DominanceCache::new(CacheConfig::default());
        let l = fill(&[1, 0]);
        cache.insert(&l, &hist(&[3]), Verdict::Lost).unwrap();
        assert_eq!(cache.query(&l, &hist(&[2])), CacheOutcome::Lost);
        assert_eq!(cache.counters().lost_hits, 1);
    }

    #[test]
    fn hits_are_keyed_by_fill_state() {
        let mut cache = DominanceCache::new(CacheConfig::default());
        cache
            .insert(&fill(&[1, 0]), &hist(&[2]), Verdict::Won)
            .unwrap();
        assert_eq!(cache.query(&fill(&[1, 0]), &hist(&[2])), CacheOutcome::Won);
        assert_eq!(
            cache.query(&fill(&[1, 1]), &hist(&[2])),
            CacheOutcome::Unknown
        );
    }

    #[test]
    fn reinsert_with_opposite_verdict_is_an_integrity_error() {
        let mut cache = DominanceCache::new(CacheConfig::default());
        let l = fill(&[1, 0]);
        cache.insert(&l, &hist(&[2]), Verdict::Won).unwrap();
        let err = cache.insert(&l, &hist(&[2]), Verdict::Lost).unwrap_err();
        assert!(matches!(err, CacheError::IntegrityViolation { .. }));
    }

    #[test]
    fn duplicate_insert_is_idempotent() {
        let mut cache = DominanceCache::new(CacheConfig::default());
        let l = fill(&[1, 0]);
        cache.insert(&l, &hist(&[2]), Verdict::Won).unwrap();
        cache.insert(&l, &hist(&[2]), Verdict::Won).unwrap();
        assert_eq!(cache.stored_histories(), 1);
        assert_eq!(cache.counters().insertions, 1);
    }

    #[test]
    fn memory_cap_aborts_insertion() {
        let mut cache = DominanceCache::new(CacheConfig {
            memory_cap_bytes: Some(1),
            ..CacheConfig::default()
        });
        let err = cache
            .insert(&fill(&[0, 0]), &hist(&[1]), Verdict::Won)
            .unwrap_err();
        assert_eq!(err, CacheError::MemoryCapExceeded { cap_bytes: 1 });
        assert_eq!(cache.stored_histories(), 0);
    }

    #[test]
    fn pruning_drops_redundant_won_histories() {
        let mut cache = DominanceCache::new(CacheConfig {
            prune_dominated: true,
            ..CacheConfig::default()
        });
        let l = fill(&[1, 0]);
        cache.insert(&l, &hist(&[3]), Verdict::Won).unwrap();
        // {2} ⊑ {3}, so the stored {3} is dropped before {2} goes in
        cache.insert(&l, &hist(&[2]), Verdict::Won).unwrap();
        assert_eq!(cache.stored_histories(), 1);
        assert_eq!(cache.query(&l, &hist(&[3])), CacheOutcome::Won);
    }

    #[test]
    fn growth_never_downgrades_answers() {
        // with pruning off, a decided query stays decided as entries pile up
        let mut cache = DominanceCache::new(CacheConfig::default());
        let l = fill(&[2, 1]);
        let probes = [hist(&[4]), hist(&[2, 1]), hist(&[1])];
        let inserts = [
            (hist(&[2]), Verdict::Won),
            (hist(&[5]), Verdict::Lost),
            (hist(&[1, 1]), Verdict::Won),
            (hist(&[4, 2]), Verdict::Lost),
        ];
        let mut last: Vec<CacheOutcome> = probes.iter().map(|_| CacheOutcome::Unknown).collect();
        for (h, v) in inserts {
            cache.insert(&l, &h, v).unwrap();
            for (i, probe) in probes.iter().enumerate() {
                let now = cache.query(&l, probe);
                if last[i] != CacheOutcome::Unknown {
                    assert_ne!(now, CacheOutcome::Unknown, "probe {i} downgraded");
                }
                last[i] = now;
            }
        }
    }
}
