//! Frequency censuses over symbol and residue streams: k-gram address
//! tables, successive-residue pair counts, rotational-distance counts,
//! standard deviations across a declared key space, and the sigma scan
//! over increasing start values.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::ifs::Address;
use crate::prime_stream::{self, RangeConvention};
use crate::residue::{self, ResidueAlphabet, SymbolStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KeyKind {
    Address,
    ResidueTuple,
    DistanceClass,
}

/// A census key. Residue tuples are in stream order (earliest element
/// first); the corresponding IFS address is the tuple's reversal mapped
/// through the alphabet.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CensusKey {
    Address(Address),
    Residues(Vec<u64>),
    Distance(u8),
}

impl CensusKey {
    pub fn label(&self) -> String {
        match self {
            CensusKey::Address(a) => a.to_string(),
            CensusKey::Residues(rs) => rs
                .iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>()
                .join(","),
            CensusKey::Distance(d) => d.to_string(),
        }
    }
}

/// Counts keyed by addresses, residue tuples or distance classes, with a
/// declared key-space size so absent keys count as zero in statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    key_kind: KeyKind,
    arity: usize,
    entries: BTreeMap<CensusKey, u64>,
    total: u64,
    key_space: usize,
    convention: RangeConvention,
}

impl FrequencyTable {
    fn new(key_kind: KeyKind, arity: usize, key_space: usize) -> Self {
        FrequencyTable {
            key_kind,
            arity,
            entries: BTreeMap::new(),
            total: 0,
            key_space,
            convention: RangeConvention::Unspecified,
        }
    }

    pub fn with_convention(mut self, convention: RangeConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn key_kind(&self) -> KeyKind {
        self.key_kind
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn key_space(&self) -> usize {
        self.key_space
    }

    pub fn convention(&self) -> RangeConvention {
        self.convention
    }

    pub fn count(&self, key: &CensusKey) -> u64 {
        self.entries.get(key).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&CensusKey, u64)> {
        self.entries.iter().map(|(k, &v)| (k, v))
    }

    /// Entries sorted by count ascending, then key lexicographically.
    pub fn sorted_entries(&self) -> Vec<(&CensusKey, u64)> {
        let mut v: Vec<(&CensusKey, u64)> = self.entries().collect();
        v.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(b.0)));
        v
    }

    /// Keys of the materialized key space with zero count.
    pub fn zero_keys(&self) -> Vec<&CensusKey> {
        self.entries
            .iter()
            .filter(|&(_, &c)| c == 0)
            .map(|(k, _)| k)
            .collect()
    }

    /// Sample standard deviation (divisor n - 1) across the declared key
    /// space; keys absent from the entry map count as zero.
    pub fn stddev(&self) -> Result<f64> {
        let n = self.key_space;
        if n < 2 {
            return Err(Error::DegenerateTable);
        }
        let mean = self.total as f64 / n as f64;
        let mut ss = 0.0;
        for &c in self.entries.values() {
            let d = c as f64 - mean;
            ss += d * d;
        }
        let absent = n - self.entries.len();
        ss += absent as f64 * mean * mean;
        Ok((ss / (n as f64 - 1.0)).sqrt())
    }

    /// JSON export: entries sorted by count then key, with percentages
    /// rounded to 3 decimals.
    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .sorted_entries()
            .into_iter()
            .map(|(k, c)| {
                let percent = if self.total == 0 {
                    0.0
                } else {
                    (100_000.0 * c as f64 / self.total as f64).round() / 1000.0
                };
                json!({ "key": k.label(), "count": c, "percent": percent })
            })
            .collect();
        json!({
            "key_kind": serde_json::to_value(self.key_kind).unwrap(),
            "arity": self.arity,
            "convention": serde_json::to_value(self.convention).unwrap(),
            "entries": entries,
            "total": self.total,
            "sigma": self.stddev().ok(),
        })
    }

    fn add(&mut self, key: CensusKey, count: u64) {
        *self.entries.entry(key).or_insert(0) += count;
        self.total += count;
    }

    fn materialize(&mut self, keys: impl Iterator<Item = CensusKey>) {
        for k in keys {
            self.entries.entry(k).or_insert(0);
        }
    }
}

#[cfg(feature = "parallel")]
fn merge_counts(mut a: BTreeMap<CensusKey, u64>, b: BTreeMap<CensusKey, u64>) -> BTreeMap<CensusKey, u64> {
    for (k, v) in b {
        *a.entry(k).or_insert(0) += v;
    }
    a
}

fn window_address(window: &[u8]) -> CensusKey {
    let digits: Vec<u8> = window.iter().rev().copied().collect();
    CensusKey::Address(Address::new(digits).expect("symbols are valid digits"))
}

/// Length-k address frequencies of a symbol stream. The address of a
/// window is its reversal (most recent transform leftmost).
pub fn kgram_frequencies(s: &SymbolStream, k: usize) -> Result<FrequencyTable> {
    kgram_precheck(s, k)?;
    let counts;
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        counts = s
            .symbols()
            .par_windows(k)
            .fold(BTreeMap::new, |mut m, w| {
                *m.entry(window_address(w)).or_insert(0u64) += 1;
                m
            })
            .reduce(BTreeMap::new, merge_counts);
    }
    #[cfg(not(feature = "parallel"))]
    {
        counts = count_windows_seq(s.symbols(), k);
    }
    Ok(table_from_counts(KeyKind::Address, k, counts))
}

/// Sequential reference path for [`kgram_frequencies`].
pub fn kgram_frequencies_seq(s: &SymbolStream, k: usize) -> Result<FrequencyTable> {
    kgram_precheck(s, k)?;
    let counts = count_windows_seq(s.symbols(), k);
    Ok(table_from_counts(KeyKind::Address, k, counts))
}

fn kgram_precheck(s: &SymbolStream, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArity);
    }
    if s.len() < k {
        return Err(Error::ShortStream {
            need: k,
            got: s.len(),
        });
    }
    Ok(())
}

fn count_windows_seq(symbols: &[u8], k: usize) -> BTreeMap<CensusKey, u64> {
    let mut m = BTreeMap::new();
    for w in symbols.windows(k) {
        *m.entry(window_address(w)).or_insert(0u64) += 1;
    }
    m
}

fn table_from_counts(kind: KeyKind, arity: usize, counts: BTreeMap<CensusKey, u64>) -> FrequencyTable {
    let mut t = FrequencyTable::new(kind, arity, 4usize.pow(arity as u32));
    for (k, v) in counts {
        t.add(k, v);
    }
    t
}

fn all_pairs(alphabet: &ResidueAlphabet) -> impl Iterator<Item = CensusKey> + '_ {
    let cs = alphabet.classes();
    cs.into_iter()
        .flat_map(move |a| cs.into_iter().map(move |b| CensusKey::Residues(vec![a, b])))
}

fn pair_table_from_residues(
    residues: impl Iterator<Item = (u64, u64)>,
    alphabet: &ResidueAlphabet,
) -> FrequencyTable {
    let mut t = FrequencyTable::new(KeyKind::ResidueTuple, 2, 16);
    t.materialize(all_pairs(alphabet));
    for (a, b) in residues {
        t.add(CensusKey::Residues(vec![a, b]), 1);
    }
    t
}

/// Successive-residue pair counts: count(a, b) is the number of positions
/// t with value_t = a and value_{t+1} = b mod q. All 16 keys of the
/// alphabet's pair space are materialized (zero-filled).
pub fn residue_pair_counts(values: &[u64], alphabet: &ResidueAlphabet) -> Result<FrequencyTable> {
    residue::symbolize(values, alphabet)?;
    let q = alphabet.modulus();
    Ok(pair_table_from_residues(
        values.windows(2).map(|w| (w[0] % q, w[1] % q)),
        alphabet,
    ))
}

/// Counts of forward rotational distances 0..=3 between consecutive
/// symbols. All four distance keys are materialized.
pub fn distance_frequencies(s: &SymbolStream) -> Result<FrequencyTable> {
    let rot = residue::rot_distance_stream(s)?;
    let mut t = FrequencyTable::new(KeyKind::DistanceClass, 1, 4);
    t.materialize((0u8..4).map(CensusKey::Distance));
    for &sym in rot.symbols() {
        t.add(CensusKey::Distance(sym - 1), 1);
    }
    Ok(t)
}

/// Free-function form of [`FrequencyTable::stddev`].
pub fn stddev_of_counts(t: &FrequencyTable) -> Result<f64> {
    t.stddev()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaInterpretation {
    /// Primes in the value window [x0, x0 + size].
    WindowWidth,
    /// The first `size` primes at or above x0.
    PrimeCount,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SigmaScanRow {
    pub x0: u64,
    pub sigma: f64,
    pub interpretation: SigmaInterpretation,
}

/// For each start value, build the successive-residue pair table over the
/// selected prime range and take the standard deviation across its 16
/// counts.
pub fn sigma_scan(
    x0_list: &[u64],
    size: u64,
    alphabet: &ResidueAlphabet,
    interpretation: SigmaInterpretation,
) -> Result<Vec<SigmaScanRow>> {
    if size == 0 {
        return Err(Error::EmptyScan);
    }
    let mut rows = Vec::with_capacity(x0_list.len());
    for &x0 in x0_list {
        let primes = match interpretation {
            SigmaInterpretation::WindowWidth => prime_stream::primes_in_range(x0, x0 + size)?,
            SigmaInterpretation::PrimeCount => prime_stream::primes_from_count(x0, size as usize)?,
        };
        let table = residue_pair_counts(&primes, alphabet)?;
        rows.push(SigmaScanRow {
            x0,
            sigma: table.stddev()?,
            interpretation,
        });
    }
    Ok(rows)
}

/// The three tables of the twin-prime census.
#[derive(Debug, Clone)]
pub struct TwinCensus {
    /// Pair counts over the concatenated stream p1, p1+2, p2, p2+2, ...
    pub concatenated: FrequencyTable,
    /// Per-pair residue classes (p mod q, p+2 mod q).
    pub classes: FrequencyTable,
    /// Residue pairs of the concatenated table with count zero.
    pub forbidden: Vec<(u64, u64)>,
}

/// Census of a twin-pair list under a residue alphabet.
///
/// Pairs with an unmapped member (for M10, only (5, 7)) are dropped
/// whole, and the concatenated stream is not bridged across the gap: no
/// spurious adjacency is counted between the pairs on either side.
pub fn twin_census(
    pairs: &[(u64, u64)],
    alphabet: &ResidueAlphabet,
    convention: RangeConvention,
) -> Result<TwinCensus> {
    let q = alphabet.modulus();
    let mapped = |v: u64| alphabet.symbol_of(v).is_some();

    let mut concatenated = FrequencyTable::new(KeyKind::ResidueTuple, 2, 16);
    concatenated.materialize(all_pairs(alphabet));
    let mut classes = FrequencyTable::new(KeyKind::ResidueTuple, 2, 16);
    classes.materialize(all_pairs(alphabet));

    let mut prev: Option<u64> = None; // residue of the previous stream element
    for &(p, p2) in pairs {
        if !(mapped(p) && mapped(p2)) {
            prev = None;
            continue;
        }
        let (a, b) = (p % q, p2 % q);
        classes.add(CensusKey::Residues(vec![a, b]), 1);
        if let Some(last) = prev {
            concatenated.add(CensusKey::Residues(vec![last, a]), 1);
        }
        concatenated.add(CensusKey::Residues(vec![a, b]), 1);
        prev = Some(b);
    }

    let forbidden = concatenated
        .zero_keys()
        .into_iter()
        .filter_map(|k| match k {
            CensusKey::Residues(rs) if rs.len() == 2 => Some((rs[0], rs[1])),
            _ => None,
        })
        .collect();

    Ok(TwinCensus {
        concatenated: concatenated.with_convention(convention),
        classes: classes.with_convention(convention),
        forbidden,
    })
}

/// Length-k residue-tuple census of a tuple-center stream. Keys are in
/// stream order; the declared key space is 4^k.
pub fn tuple_center_census(
    centers: &[u64],
    alphabet: &ResidueAlphabet,
    k: usize,
    convention: RangeConvention,
) -> Result<FrequencyTable> {
    if k == 0 {
        return Err(Error::InvalidArity);
    }
    if centers.len() < k {
        return Err(Error::ShortStream {
            need: k,
            got: centers.len(),
        });
    }
    // Symbolize first so unmapped centers surface as errors.
    residue::symbolize(centers, alphabet)?;
    let q = alphabet.modulus();
    let mut t = FrequencyTable::new(KeyKind::ResidueTuple, k, 4usize.pow(k as u32));
    if k <= 2 {
        if k == 1 {
            t.materialize(alphabet.classes().into_iter().map(|c| CensusKey::Residues(vec![c])));
        } else {
            t.materialize(all_pairs(alphabet));
        }
    }
    for w in centers.windows(k) {
        t.add(
            CensusKey::Residues(w.iter().map(|&v| v % q).collect()),
            1,
        );
    }
    Ok(t.with_convention(convention))
}
