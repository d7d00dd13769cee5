//! Game model: instance parameters, bin fill states, item histories, items
//! with overflow declarations, and the single-move state transition.
//!
//! All values are integers. An instance is scaled by its granularity so that
//! offline bins have size `granularity` and online bins have size `capacity`;
//! the stretching factor is the ratio `capacity / granularity`. Items are
//! classified by integer class `c` (true size in `(c, c+1]`) and bins carry
//! integer fill levels (a lower bound on contained volume, strict when
//! non-zero). Placing a class-`c` item raises the chosen bin's level by `c`,
//! or by `c + 1` when the adversary declared an overflow for that bin.
//!
//! Everything here is an immutable value; operations are pure functions and
//! safe to use from any number of threads.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Hard limit on the number of bins. Overflow declarations are kept as a
/// bitmask, and the per-move item universe grows with `2^bins`, so anything
/// near this limit is far beyond what a search can finish anyway.
pub const MAX_BINS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("need at least 2 bins, got {0}")]
    TooFewBins(usize),
    #[error("at most {MAX_BINS} bins are supported, got {0}")]
    TooManyBins(usize),
    #[error("granularity must be at least 1")]
    ZeroGranularity,
    #[error("capacity {capacity} is below the granularity {granularity}")]
    CapacityBelowGranularity { capacity: u32, granularity: u32 },
    #[error("expected {expected} fill levels, got {got}")]
    WrongLevelCount { expected: usize, got: usize },
    #[error("bin index {bin} out of range for {bins} bins")]
    BinOutOfRange { bin: usize, bins: usize },
    #[error("item class {class} out of range for granularity {granularity}")]
    ClassOutOfRange { class: u32, granularity: u32 },
    #[error("malformed state string {0:?}")]
    MalformedState(String),
    #[error("malformed item string {0:?}")]
    MalformedItem(String),
}

/// One game instance: `bins` online bins of capacity `capacity`, item classes
/// `0..granularity`, and an offline volume budget of `bins * granularity`.
///
/// The stretching factor certified by a win is `capacity / granularity`,
/// always handled as an exact ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Params {
    bins: usize,
    granularity: u32,
    capacity: u32,
}

impl Params {
    pub fn new(bins: usize, granularity: u32, capacity: u32) -> Result<Self, ModelError> {
        if bins < 2 {
            return Err(ModelError::TooFewBins(bins));
        }
        if bins > MAX_BINS {
            return Err(ModelError::TooManyBins(bins));
        }
        if granularity == 0 {
            return Err(ModelError::ZeroGranularity);
        }
        if capacity < granularity {
            return Err(ModelError::CapacityBelowGranularity {
                capacity,
                granularity,
            });
        }
        Ok(Params {
            bins,
            granularity,
            capacity,
        })
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn granularity(&self) -> u32 {
        self.granularity
    }

    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    /// Total volume the adversary may commit: `bins * granularity`. Once the
    /// fill levels sum to this much, the emitted items provably exceed the
    /// offline budget (non-zero levels undercount their true volume).
    pub fn offline_volume(&self) -> u64 {
        self.bins as u64 * self.granularity as u64
    }
}

/// Fill levels of the online bins, kept in non-increasing order.
///
/// Bin order carries no information, so states are canonicalized by sorting;
/// two fill states with the same multiset of levels compare and hash equal.
/// Bin indices (everywhere in this crate) refer to positions in this sorted
/// order: index 0 is the fullest bin.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FillState(Vec<u32>);

impl FillState {
    /// Sorts raw levels into canonical non-increasing order. Idempotent.
    /// Values at or above the capacity are allowed here; whether such a level
    /// means a lost bin is decided by [`FillState::place`], not by sorting.
    pub fn canonicalize(mut levels: Vec<u32>, bins: usize) -> Result<Self, ModelError> {
        if levels.len() != bins {
            return Err(ModelError::WrongLevelCount {
                expected: bins,
                got: levels.len(),
            });
        }
        levels.sort_unstable_by(|a, b| b.cmp(a));
        Ok(FillState(levels))
    }

    pub fn zeros(bins: usize) -> Self {
        FillState(vec![0; bins])
    }

    pub fn levels(&self) -> &[u32] {
        &self.0
    }

    pub fn bin_count(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&l| l as u64).sum()
    }

    /// Level of the emptiest bin (the last entry).
    pub fn min_level(&self) -> u32 {
        *self.0.last().expect("fill state is never empty")
    }

    /// Applies one placement: the target bin's level grows by the item class,
    /// plus one more on a declared overflow. Reaching the capacity loses the
    /// bin ([`Placement::OnlineLoss`]); otherwise the result is re-sorted so
    /// the next move's bin indices are canonical again.
    pub fn place(&self, item: Item, bin: usize, params: &Params) -> Result<Placement, ModelError> {
        if bin >= self.0.len() {
            return Err(ModelError::BinOutOfRange {
                bin,
                bins: self.0.len(),
            });
        }
        let bump = if item.overflows().overflows(bin) {
            1
        } else {
            0
        };
        let candidate = self.0[bin] as u64 + item.class() as u64 + bump;
        if candidate >= params.capacity() as u64 {
            return Ok(Placement::OnlineLoss);
        }
        let mut levels = self.0.clone();
        levels[bin] = candidate as u32;
        levels.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Placement::NewFill(FillState(levels)))
    }
}

/// Result of placing an item into a bin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Placement {
    /// The placement was safe; the canonical successor fill state.
    NewFill(FillState),
    /// The bin would reach the online capacity: an immediate adversary win.
    OnlineLoss,
}

/// Multiset of non-zero item classes emitted so far, kept non-increasing.
///
/// Class-0 items are never recorded: arbitrarily many of them can appear, and
/// the one class-0 item the search considers (all bins overflowing) changes
/// fill levels but says nothing useful about the offline packing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct History(Vec<u32>);

impl History {
    pub fn empty() -> Self {
        History(Vec::new())
    }

    /// Builds a history from raw classes, validating each against the params:
    /// classes live in `1..granularity`.
    pub fn new(classes: Vec<u32>, params: &Params) -> Result<Self, ModelError> {
        for &class in &classes {
            if class == 0 || class >= params.granularity() {
                return Err(ModelError::ClassOutOfRange {
                    class,
                    granularity: params.granularity(),
                });
            }
        }
        let mut classes = classes;
        classes.sort_unstable_by(|a, b| b.cmp(a));
        Ok(History(classes))
    }

    /// A copy with one more class recorded. The class must be non-zero;
    /// callers handle class-0 items by not recording them.
    pub fn with(&self, class: u32) -> Self {
        debug_assert!(class >= 1, "class-0 items are never recorded");
        let mut classes = self.0.clone();
        let at = classes.partition_point(|&c| c >= class);
        classes.insert(at, class);
        History(classes)
    }

    pub fn classes(&self) -> &[u32] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&c| c as u64).sum()
    }

    /// True when every class occurs in `other` at least as often as here.
    pub fn is_submultiset_of(&self, other: &History) -> bool {
        let mut mine = self.0.iter().peekable();
        for &theirs in &other.0 {
            match mine.peek() {
                None => return true,
                Some(&&c) if c == theirs => {
                    mine.next();
                }
                // both sorted non-increasing: a strictly larger class of ours
                // can no longer be matched
                Some(&&c) if c > theirs => return false,
                _ => {}
            }
        }
        mine.peek().is_none()
    }
}

/// Which bins the adversary declared as overflowing for one item, indexed by
/// canonical (sorted) bin position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Overflows {
    bits: u32,
    len: u8,
}

impl Overflows {
    pub fn none(bins: usize) -> Self {
        debug_assert!(bins <= MAX_BINS);
        Overflows {
            bits: 0,
            len: bins as u8,
        }
    }

    pub fn all(bins: usize) -> Self {
        debug_assert!(bins <= MAX_BINS);
        Overflows {
            bits: (1u32 << bins) - 1,
            len: bins as u8,
        }
    }

    /// Interprets `value` as the overflow vector read as a binary number:
    /// bin 0 (the fullest) is the most significant digit. Enumerating
    /// `value = 0..2^bins` therefore yields vectors in ascending numeric
    /// order, which is the deterministic item order used everywhere.
    pub fn from_vector_value(value: u32, bins: usize) -> Self {
        debug_assert!(bins <= MAX_BINS);
        debug_assert!(value < (1u32 << bins));
        let mut bits = 0u32;
        for bin in 0..bins {
            if value & (1 << (bins - 1 - bin)) != 0 {
                bits |= 1 << bin;
            }
        }
        Overflows {
            bits,
            len: bins as u8,
        }
    }

    pub fn overflows(&self, bin: usize) -> bool {
        debug_assert!(bin < self.len as usize);
        self.bits & (1 << bin) != 0
    }

    pub fn bin_count(&self) -> usize {
        self.len as usize
    }

    pub fn is_all(&self) -> bool {
        self.bits == (1u32 << self.len) - 1
    }
}

impl fmt::Display for Overflows {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bin in 0..self.len as usize {
            f.write_str(if self.overflows(bin) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// One adversary move: an item class together with its overflow declaration.
///
/// The only class-0 item that matters is the one overflowing every bin; a
/// class-0 item with any safe bin would be placed there and change nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Item {
    class: u32,
    overflows: Overflows,
}

impl Item {
    pub fn new(class: u32, overflows: Overflows) -> Self {
        debug_assert!(
            class > 0 || overflows.is_all(),
            "the only class-0 item is the all-overflow one"
        );
        Item { class, overflows }
    }

    pub fn class(&self) -> u32 {
        self.class
    }

    pub fn overflows(&self) -> Overflows {
        self.overflows
    }
}

/// Rendered as `c|b1b2…bm`: the class, a pipe, then one overflow bit per
/// canonical bin position. Example: `2|10` is a class-2 item overflowing
/// only the fullest of two bins.
impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.class, self.overflows)
    }
}

impl FromStr for Item {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::MalformedItem(s.to_string());
        let (class_part, bits_part) = s.split_once('|').ok_or_else(bad)?;
        let class: u32 = class_part.parse().map_err(|_| bad())?;
        let bins = bits_part.len();
        if bins == 0 || bins > MAX_BINS {
            return Err(bad());
        }
        let mut bits = 0u32;
        for (bin, ch) in bits_part.chars().enumerate() {
            match ch {
                '1' => bits |= 1 << bin,
                '0' => {}
                _ => return Err(bad()),
            }
        }
        let overflows = Overflows {
            bits,
            len: bins as u8,
        };
        if class == 0 && !overflows.is_all() {
            return Err(bad());
        }
        let item = Item { class, overflows };
        // round-trip check rejects non-canonical spellings (leading zeros)
        if item.to_string() != s {
            return Err(bad());
        }
        Ok(item)
    }
}

/// A full game position: canonical fill levels plus the emitted history.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GameState {
    pub fill: FillState,
    pub history: History,
}

impl GameState {
    pub fn new(fill: FillState, history: History) -> Self {
        GameState { fill, history }
    }

    /// The starting position: all bins empty, nothing emitted.
    pub fn initial(params: &Params) -> Self {
        GameState {
            fill: FillState::zeros(params.bins()),
            history: History::empty(),
        }
    }
}

/// Canonical textual form used as the state key in logs and certificates:
/// `L=[l1,…,lm];H=[c1,…,cn]`, both lists non-increasing, no whitespace.
impl fmt::Display for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_state(&self.fill, &self.history))
    }
}

impl FromStr for GameState {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::MalformedState(s.to_string());
        let rest = s.strip_prefix("L=[").ok_or_else(bad)?;
        let (levels_part, rest) = rest.split_once("];H=[").ok_or_else(bad)?;
        let classes_part = rest.strip_suffix(']').ok_or_else(bad)?;
        let parse_list = |part: &str| -> Result<Vec<u32>, ModelError> {
            if part.is_empty() {
                return Ok(Vec::new());
            }
            part.split(',')
                .map(|tok| tok.parse::<u32>().map_err(|_| bad()))
                .collect()
        };
        let mut levels = parse_list(levels_part)?;
        let mut classes = parse_list(classes_part)?;
        if levels.is_empty() {
            return Err(bad());
        }
        levels.sort_unstable_by(|a, b| b.cmp(a));
        classes.sort_unstable_by(|a, b| b.cmp(a));
        let state = GameState {
            fill: FillState(levels),
            history: History(classes),
        };
        // the canonical rendering must reproduce the input exactly; this
        // rejects unsorted lists, leading zeros, and stray whitespace
        if state.to_string() != s {
            return Err(bad());
        }
        Ok(state)
    }
}

/// Renders the canonical state key without building a [`GameState`].
pub fn render_state(fill: &FillState, history: &History) -> String {
    let join = |values: &[u32]| {
        values
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    format!(
        "L=[{}];H=[{}]",
        join(fill.levels()),
        join(history.classes())
    )
}
