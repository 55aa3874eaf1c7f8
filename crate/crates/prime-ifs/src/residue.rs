//! Residue-class symbolization: maps integer streams onto the transform
//! indices {1, 2, 3, 4} through a four-letter residue alphabet, and derives
//! the secondary dynamics streams (absolute differences and forward
//! rotational distances).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// The units mod q, ascending (residues in [1, q] coprime to q).
pub fn reduced_residues(q: u64) -> Vec<u64> {
    (1..=q).filter(|&r| gcd(r, q) == 1).collect()
}

/// The three vertex orderings of the 4 reduced residues mod q that are
/// inequivalent under rotation and reflection of the square: fix the
/// smallest residue first, enumerate the other 3! orders, and keep one
/// representative per reversal pair, sorted lexicographically.
pub fn canonical_orderings(q: u64) -> Result<Vec<[u64; 4]>> {
    let units = reduced_residues(q);
    if units.len() != 4 {
        return Err(Error::InvalidModulus(q));
    }
    let head = units[0];
    let rest = [units[1], units[2], units[3]];
    let perms = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut out: Vec<[u64; 4]> = Vec::new();
    for p in perms {
        let ord = [head, rest[p[0]], rest[p[1]], rest[p[2]]];
        // Reversing the circular order while keeping `head` fixed swaps
        // positions 2 and 4.
        let mirror = [ord[0], ord[3], ord[2], ord[1]];
        if !out.contains(&mirror) {
            out.push(ord);
        }
    }
    out.sort();
    debug_assert_eq!(out.len(), 3);
    Ok(out)
}

/// A four-letter residue alphabet mod q. Position in `classes` is the
/// transform index: classes[0] drives T1, ..., classes[3] drives T4.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueAlphabet {
    modulus: u64,
    classes: [u64; 4],
    reduced: bool,
}

impl ResidueAlphabet {
    pub fn new(modulus: u64, classes: [u64; 4]) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidAlphabet(format!("modulus {modulus} < 2")));
        }
        for (i, &c) in classes.iter().enumerate() {
            if c >= modulus {
                return Err(Error::InvalidAlphabet(format!(
                    "class {c} not in [0, {modulus})"
                )));
            }
            if classes[..i].contains(&c) {
                return Err(Error::InvalidAlphabet(format!("duplicate class {c}")));
            }
        }
        let mut sorted = classes;
        sorted.sort();
        let reduced = sorted.to_vec() == reduced_residues(modulus);
        Ok(ResidueAlphabet {
            modulus,
            classes,
            reduced,
        })
    }

    /// The alphabet of the full reduced residue system mod q, in
    /// ascending order. Errors unless q has exactly 4 units.
    pub fn reduced(q: u64) -> Result<Self> {
        let units = reduced_residues(q);
        if units.len() != 4 {
            return Err(Error::InvalidModulus(q));
        }
        Self::new(q, [units[0], units[1], units[2], units[3]])
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn classes(&self) -> [u64; 4] {
        self.classes
    }

    /// True when the classes form the full reduced residue system mod q.
    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    /// 1-based transform index for a value, or None if its residue is not
    /// in the alphabet.
    pub fn symbol_of(&self, value: u64) -> Option<u8> {
        let r = value % self.modulus;
        self.classes.iter().position(|&c| c == r).map(|i| i as u8 + 1)
    }

    /// Residue class driving the given symbol.
    pub fn class_of_symbol(&self, symbol: u8) -> Result<u64> {
        if (1..=4).contains(&symbol) {
            Ok(self.classes[symbol as usize - 1])
        } else {
            Err(Error::InvalidSymbol(symbol))
        }
    }
}

/// A sequence of transform indices in {1, 2, 3, 4} plus a description of
/// the driver that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolStream {
    symbols: Vec<u8>,
    provenance: String,
}

impl SymbolStream {
    pub fn new(symbols: Vec<u8>, provenance: impl Into<String>) -> Result<Self> {
        if let Some(&bad) = symbols.iter().find(|&&s| !(1..=4).contains(&s)) {
            return Err(Error::InvalidSymbol(bad));
        }
        Ok(SymbolStream {
            symbols,
            provenance: provenance.into(),
        })
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }
}

/// Symbolize a value stream: symbol t is the 1-based position of
/// value_t mod q within the alphabet's classes. Fails on the first value
/// whose residue is not in the alphabet.
pub fn symbolize(values: &[u64], alphabet: &ResidueAlphabet) -> Result<SymbolStream> {
    let mut symbols = Vec::with_capacity(values.len());
    for (index, &value) in values.iter().enumerate() {
        match alphabet.symbol_of(value) {
            Some(s) => symbols.push(s),
            None => {
                return Err(Error::UnmappedResidue {
                    value,
                    index,
                    residue: value % alphabet.modulus(),
                    modulus: alphabet.modulus(),
                })
            }
        }
    }
    Ok(SymbolStream {
        symbols,
        provenance: format!(
            "mod {} ordering {:?}",
            alphabet.modulus(),
            alphabet.classes()
        ),
    })
}

/// Absolute differences of consecutive symbols, shifted back into
/// {1, 2, 3, 4}: output_t = |s_{t+1} - s_t| + 1.
pub fn abs_diff_stream(s: &SymbolStream) -> Result<SymbolStream> {
    if s.len() < 2 {
        return Err(Error::ShortStream {
            need: 2,
            got: s.len(),
        });
    }
    let symbols = s
        .symbols
        .windows(2)
        .map(|w| w[0].abs_diff(w[1]) + 1)
        .collect();
    Ok(SymbolStream {
        symbols,
        provenance: format!("abs-diff of [{}]", s.provenance),
    })
}

/// Forward rotational distance between consecutive symbols, shifted into
/// {1, 2, 3, 4}: for j applied first and i after, output = ((i - j) mod 4) + 1.
pub fn rot_distance_stream(s: &SymbolStream) -> Result<SymbolStream> {
    if s.len() < 2 {
        return Err(Error::ShortStream {
            need: 2,
            got: s.len(),
        });
    }
    let symbols = s
        .symbols
        .windows(2)
        .map(|w| {
            let (j, i) = (w[0] as i16, w[1] as i16);
            ((i - j).rem_euclid(4)) as u8 + 1
        })
        .collect();
    Ok(SymbolStream {
        symbols,
        provenance: format!("rot-distance of [{}]", s.provenance),
    })
}
