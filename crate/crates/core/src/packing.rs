//! Multiset packing decisions.
//!
//! Three feasibility routines share one question — can these item sizes be
//! distributed over these bin capacities? — at different price points:
//!
//! * [`fits_exact`]: complete branch-and-bound decision, used by the cheat
//!   check [`che`].
//! * [`ffd_fits`]: first-fit-decreasing one-sided approximation (`true` is
//!   trustworthy, `false` is inconclusive), used by the history comparison
//!   [`history_leq`] where an exact answer would itself be NP-hard.
//! * [`fits_bruteforce`]: blind enumeration of every assignment, kept as an
//!   independent reference for tests and deliberately limited to tiny
//!   instances.

use std::collections::HashSet;

use thiserror::Error;

use crate::model::{History, Params};

/// Default item-count bound for [`fits_bruteforce`].
pub const BRUTE_FORCE_ITEM_LIMIT: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PackingError {
    #[error("item sizes must be at least 1")]
    ZeroSize,
    #[error("bin capacities must be at least 1")]
    ZeroCapacity,
    #[error("{items} items exceed the brute-force bound of {limit}")]
    TooManyItemsForBruteForce { items: usize, limit: usize },
}

/// A feasibility question: positive item sizes against positive bin
/// capacities, both treated as multisets (stored non-increasing).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackingInstance {
    items: Vec<u32>,
    capacities: Vec<u32>,
}

impl PackingInstance {
    pub fn new(mut items: Vec<u32>, mut capacities: Vec<u32>) -> Result<Self, PackingError> {
        if items.contains(&0) {
            return Err(PackingError::ZeroSize);
        }
        if capacities.contains(&0) {
            return Err(PackingError::ZeroCapacity);
        }
        items.sort_unstable_by(|a, b| b.cmp(a));
        capacities.sort_unstable_by(|a, b| b.cmp(a));
        Ok(PackingInstance { items, capacities })
    }

    pub fn items(&self) -> &[u32] {
        &self.items
    }

    pub fn capacities(&self) -> &[u32] {
        &self.capacities
    }
}

/// Renders a multiset in the `{a,b,c}` form (non-increasing) used in
/// messages and terminal-node justifications.
pub fn fmt_multiset(values: &[u32]) -> String {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let body = sorted
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",");
    format!("{{{body}}}")
}

/// Exact feasibility: is there an assignment of every item to some bin with
/// each bin's size sum within its capacity?
///
/// Depth-first search placing items in non-increasing size order, with three
/// standard cuts: among bins of equal residual capacity only the first is
/// tried per item, a branch is abandoned when the remaining item volume
/// exceeds the total residual capacity, and failed (item index, residual
/// multiset) pairs are memoized for the duration of the call.
pub fn fits_exact(instance: &PackingInstance) -> bool {
    if instance.items.is_empty() {
        return true;
    }
    if instance.capacities.is_empty() {
        return false;
    }
    let items = &instance.items;
    let mut suffix_volume = vec![0u64; items.len() + 1];
    for i in (0..items.len()).rev() {
        suffix_volume[i] = suffix_volume[i + 1] + items[i] as u64;
    }
    let mut residuals = instance.capacities.clone();
    let mut failed: HashSet<(usize, Vec<u32>)> = HashSet::new();
    place_remaining(items, 0, &mut residuals, &suffix_volume, &mut failed)
}

fn place_remaining(
    items: &[u32],
    index: usize,
    residuals: &mut Vec<u32>,
    suffix_volume: &[u64],
    failed: &mut HashSet<(usize, Vec<u32>)>,
) -> bool {
    if index == items.len() {
        return true;
    }
    let free: u64 = residuals.iter().map(|&r| r as u64).sum();
    if suffix_volume[index] > free {
        return false;
    }
    let mut sorted_residuals = residuals.clone();
    sorted_residuals.sort_unstable_by(|a, b| b.cmp(a));
    let key = (index, sorted_residuals);
    if failed.contains(&key) {
        return false;
    }
    let item = items[index];
    let mut tried: Vec<u32> = Vec::new();
    for bin in 0..residuals.len() {
        let residual = residuals[bin];
        if residual < item || tried.contains(&residual) {
            continue;
        }
        tried.push(residual);
        residuals[bin] -= item;
        let done = place_remaining(items, index + 1, residuals, suffix_volume, failed);
        residuals[bin] += item;
        if done {
            return true;
        }
    }
    failed.insert(key);
    false
}

/// First-fit-decreasing feasibility check. Bins are fixed in non-increasing
/// capacity order; each item (largest first) goes into the first bin whose
/// residual capacity admits it.
///
/// One-sided: `true` implies [`fits_exact`] would also say `true` (the run
/// itself is a witness packing); `false` means nothing.
pub fn ffd_fits(instance: &PackingInstance) -> bool {
    let mut residuals = instance.capacities.clone();
    for &item in &instance.items {
        match residuals.iter_mut().find(|r| **r >= item) {
            Some(r) => *r -= item,
            None => return false,
        }
    }
    true
}

/// Exhaustive reference decision: tries every item-to-bin assignment with no
/// pruning beyond the capacity check. Equals [`fits_exact`] on its domain and
/// shares no code with it. Refuses instances above `limit` items.
pub fn fits_bruteforce_with_limit(
    instance: &PackingInstance,
    limit: usize,
) -> Result<bool, PackingError> {
    if instance.items.len() > limit {
        return Err(PackingError::TooManyItemsForBruteForce {
            items: instance.items.len(),
            limit,
        });
    }
    if instance.items.is_empty() {
        return Ok(true);
    }
    if instance.capacities.is_empty() {
        return Ok(false);
    }
    let mut residuals = instance.capacities.clone();
    Ok(assign_all(&instance.items, 0, &mut residuals))
}

/// [`fits_bruteforce_with_limit`] at the default bound of
/// [`BRUTE_FORCE_ITEM_LIMIT`] items.
pub fn fits_bruteforce(instance: &PackingInstance) -> Result<bool, PackingError> {
    fits_bruteforce_with_limit(instance, BRUTE_FORCE_ITEM_LIMIT)
}

fn assign_all(items: &[u32], index: usize, residuals: &mut Vec<u32>) -> bool {
    if index == items.len() {
        return true;
    }
    for bin in 0..residuals.len() {
        if residuals[bin] >= items[index] {
            residuals[bin] -= items[index];
            let done = assign_all(items, index + 1, residuals);
            residuals[bin] += items[index];
            if done {
                return true;
            }
        }
    }
    false
}

/// The cheat check: `true` means the emitted classes, taken at the smallest
/// size their class allows, already fail to fit `bins` offline bins of size
/// `granularity - 1` — so the true items (each strictly larger than its
/// class) cannot fit offline bins of size `granularity`, the adversary's
/// sequence was never packable, and the online player wins outright.
pub fn che(history: &History, params: &Params) -> bool {
    if history.is_empty() {
        return false;
    }
    let offline_size = params.granularity() - 1;
    if offline_size == 0 {
        // non-empty history with no offline room at infimal sizes
        return true;
    }
    let capacities = vec![offline_size; params.bins()];
    let instance = PackingInstance::new(history.classes().to_vec(), capacities)
        .expect("history classes and offline sizes are positive");
    !fits_exact(&instance)
}

/// The history comparison `h1 ⊑ h2`: `true` when `h1` is a sub-multiset of
/// `h2`, or first-fit-decreasing packs `h1`'s classes into bins sized by
/// `h2`'s classes.
///
/// `true` guarantees the exact relation — every packing of `h2`'s classes
/// can absorb `h1`'s in the same space — so a state that was decided with
/// history `h1` transfers its verdict to `h2` (wins upward, losses
/// downward). `false` is inconclusive: this is a one-sided approximation of
/// a relation that is itself a packing problem. Reflexive and deterministic.
pub fn history_leq(h1: &History, h2: &History) -> bool {
    if h1.is_submultiset_of(h2) {
        return true;
    }
    if h2.is_empty() {
        return false;
    }
    let instance = PackingInstance::new(h1.classes().to_vec(), h2.classes().to_vec())
        .expect("history classes are positive");
    ffd_fits(&instance)
}
