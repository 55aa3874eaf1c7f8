//! Affine maps, deterministic IFS iteration, chaos-game and driven orbits,
//! and the base-4 address geometry on the unit square.
//!
//! Addresses are read right to left: the leftmost digit is the index of the
//! most recently applied transformation, so the address of T_i(T_j(S)) is
//! "ij".

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::residue::SymbolStream;

/// Identifier of the pseudo-random generator used by [`chaos_game`];
/// recorded in run manifests so figures are bit-reproducible.
pub const PRNG_ALGORITHM: &str = "splitmix64";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

/// One planar affine contraction: scale by (r, s), rotate by (theta, phi),
/// translate by (e, f).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap2D {
    pub r: f64,
    pub s: f64,
    pub theta: f64,
    pub phi: f64,
    pub e: f64,
    pub f: f64,
}

impl AffineMap2D {
    /// Pure scale-and-translate map (no rotation).
    pub fn scale_translate(r: f64, s: f64, e: f64, f: f64) -> Self {
        AffineMap2D {
            r,
            s,
            theta: 0.0,
            phi: 0.0,
            e,
            f,
        }
    }

    pub fn apply(&self, p: Point) -> Point {
        Point {
            x: self.r * self.theta.cos() * p.x - self.s * self.phi.sin() * p.y + self.e,
            y: self.r * self.theta.sin() * p.x + self.s * self.phi.cos() * p.y + self.f,
        }
    }

    /// For dyadic quadrant maps (halve, then translate by 0 or 1/2 on each
    /// axis), the length-1 address digit of the map's image. None otherwise.
    fn quadrant_digit(&self) -> Option<u8> {
        let is_half = |v: f64| v == 0.0 || v == 0.5;
        if self.r == 0.5
            && self.s == 0.5
            && self.theta == 0.0
            && self.phi == 0.0
            && is_half(self.e)
            && is_half(self.f)
        {
            Some(1 + (self.e == 0.5) as u8 + 2 * ((self.f == 0.5) as u8))
        } else {
            None
        }
    }
}

/// An ordered collection of contraction maps with optional selection
/// probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct IfsSystem {
    maps: Vec<AffineMap2D>,
    probabilities: Option<Vec<f64>>,
}

impl IfsSystem {
    pub fn new(maps: Vec<AffineMap2D>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidSystem("no maps".into()));
        }
        for (i, m) in maps.iter().enumerate() {
            if m.r.abs() >= 1.0 || m.s.abs() >= 1.0 {
                return Err(Error::InvalidSystem(format!(
                    "map {i} is not contractive (|r| = {}, |s| = {})",
                    m.r.abs(),
                    m.s.abs()
                )));
            }
        }
        Ok(IfsSystem {
            maps,
            probabilities: None,
        })
    }

    pub fn with_probabilities(mut self, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.len() != self.maps.len() {
            return Err(Error::InvalidSystem(format!(
                "{} probabilities for {} maps",
                probabilities.len(),
                self.maps.len()
            )));
        }
        if probabilities.iter().any(|&p| p < 0.0) {
            return Err(Error::InvalidSystem("negative probability".into()));
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSystem(format!(
                "probabilities sum to {sum}, not 1"
            )));
        }
        self.probabilities = Some(probabilities);
        Ok(self)
    }

    pub fn maps(&self) -> &[AffineMap2D] {
        &self.maps
    }

    pub fn probabilities(&self) -> Option<&[f64]> {
        self.probabilities.as_deref()
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }
}

/// Three-map Sierpinski gasket system: halve toward (0,0), (1,0), (0,1).
pub fn gasket_system() -> IfsSystem {
    IfsSystem::new(vec![
        AffineMap2D::scale_translate(0.5, 0.5, 0.0, 0.0),
        AffineMap2D::scale_translate(0.5, 0.5, 0.5, 0.0),
        AffineMap2D::scale_translate(0.5, 0.5, 0.0, 0.5),
    ])
    .expect("gasket parameters are contractive")
}

/// Four-map system whose attractor is the filled-in unit square; map i
/// halves toward vertex i of the quadrant address layout.
pub fn standard_square_system() -> IfsSystem {
    IfsSystem::new(vec![
        AffineMap2D::scale_translate(0.5, 0.5, 0.0, 0.0),
        AffineMap2D::scale_translate(0.5, 0.5, 0.5, 0.0),
        AffineMap2D::scale_translate(0.5, 0.5, 0.0, 0.5),
        AffineMap2D::scale_translate(0.5, 0.5, 0.5, 0.5),
    ])
    .expect("square parameters are contractive")
}

/// Base-4 cell label on the unit square. Digits are in {1, 2, 3, 4};
/// the empty address denotes the whole square (depth 0).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Address(Vec<u8>);

impl Address {
    pub fn new(digits: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = digits.iter().find(|&&d| !(1..=4).contains(&d)) {
            return Err(Error::InvalidAddress(format!("digit {bad} not in 1..=4")));
        }
        Ok(Address(digits))
    }

    /// Parse from a digit string such as "41".
    pub fn parse(s: &str) -> Result<Self> {
        let digits = s
            .chars()
            .map(|c| match c {
                '1'..='4' => Ok(c as u8 - b'0'),
                _ => Err(Error::InvalidAddress(format!("bad character {c:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Address::new(digits)
    }

    pub fn digits(&self) -> &[u8] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    fn prepend(&self, digit: u8) -> Address {
        let mut d = Vec::with_capacity(self.0.len() + 1);
        d.push(digit);
        d.extend_from_slice(&self.0);
        Address(d)
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// A set of equal-depth cells; approximates a compact subset of the unit
/// square at resolution 2^-depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellSet {
    depth: usize,
    members: BTreeSet<Address>,
}

impl CellSet {
    pub fn new(depth: usize, members: BTreeSet<Address>) -> Result<Self> {
        for a in &members {
            if a.depth() != depth {
                return Err(Error::InvalidAddress(format!(
                    "address {a} has depth {}, expected {depth}",
                    a.depth()
                )));
            }
        }
        Ok(CellSet { depth, members })
    }

    /// The whole unit square: depth 0, a single empty address.
    pub fn full_square() -> Self {
        let mut members = BTreeSet::new();
        members.insert(Address(Vec::new()));
        CellSet { depth: 0, members }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn members(&self) -> &BTreeSet<Address> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, a: &Address) -> bool {
        self.members.contains(a)
    }
}

/// Apply the collage map k times to a cell set. Restricted to systems of
/// dyadic quadrant maps, for which depth-d cells land exactly on
/// depth-(d+1) cells.
pub fn deterministic_iterate(sys: &IfsSystem, initial: &CellSet, k: usize) -> Result<CellSet> {
    let digits: Vec<u8> = sys
        .maps()
        .iter()
        .enumerate()
        .map(|(i, m)| m.quadrant_digit().ok_or(Error::UnsupportedMap(i)))
        .collect::<Result<Vec<u8>>>()?;
    let mut members = initial.members().clone();
    for _ in 0..k {
        members = members
            .iter()
            .flat_map(|a| digits.iter().map(move |&d| a.prepend(d)))
            .collect();
    }
    CellSet::new(initial.depth() + k, members)
}

/// Seedable 64-bit generator (splitmix64). Tiny and stable across
/// releases, which keeps manifest replays bit-identical.
struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Stochastic orbit: point t is T_{n_t}(point_{t-1}) with n_t drawn from
/// the seeded generator, uniformly unless the system carries
/// probabilities. Deterministic given (seed, start).
pub fn chaos_game(sys: &IfsSystem, n: usize, seed: u64, start: Point) -> Vec<Point> {
    let mut rng = SplitMix64::new(seed);
    let cumulative: Option<Vec<f64>> = sys.probabilities().map(|ps| {
        ps.iter()
            .scan(0.0, |acc, &p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    });
    let nmaps = sys.len() as u64;
    let mut points = Vec::with_capacity(n);
    let mut p = start;
    for _ in 0..n {
        let idx = match &cumulative {
            None => (rng.next_u64() % nmaps) as usize,
            Some(cum) => {
                let u = rng.next_f64();
                cum.iter().position(|&c| u < c).unwrap_or(cum.len() - 1)
            }
        };
        p = sys.maps()[idx].apply(p);
        points.push(p);
    }
    points
}

/// Orbit driven by a symbol stream: point t is T_{s_t}(point_{t-1}).
pub fn driven_orbit(symbols: &SymbolStream, sys: &IfsSystem, start: Point) -> Result<Vec<Point>> {
    let mut points = Vec::with_capacity(symbols.len());
    let mut p = start;
    for &s in symbols.symbols() {
        let idx = s as usize - 1;
        if idx >= sys.len() {
            return Err(Error::SymbolOutOfRange {
                symbol: s,
                maps: sys.len(),
            });
        }
        p = sys.maps()[idx].apply(p);
        points.push(p);
    }
    Ok(points)
}

/// Default orbit start, matching the driven plots' (0.5, 0.5).
pub fn default_start() -> Point {
    Point::new(0.5, 0.5)
}

/// The depth-k address of a point. Cells are half-open [lo, lo + 2^-k) on
/// both axes; a coordinate exactly 1.0 is clamped into the top cell.
pub fn address_of_point(p: Point, depth: usize) -> Result<Address> {
    if !(0.0..=1.0).contains(&p.x) || !(0.0..=1.0).contains(&p.y) {
        return Err(Error::OutOfUnitSquare(p.x, p.y));
    }
    let mut x = if p.x == 1.0 { f64_prev(1.0) } else { p.x };
    let mut y = if p.y == 1.0 { f64_prev(1.0) } else { p.y };
    let mut digits = Vec::with_capacity(depth);
    for _ in 0..depth {
        let right = x >= 0.5;
        let upper = y >= 0.5;
        digits.push(1 + right as u8 + 2 * upper as u8);
        x = 2.0 * x - if right { 1.0 } else { 0.0 };
        y = 2.0 * y - if upper { 1.0 } else { 0.0 };
        // Doubling can round back up to 1.0 at extreme depths.
        if x >= 1.0 {
            x = f64_prev(1.0);
        }
        if y >= 1.0 {
            y = f64_prev(1.0);
        }
    }
    Ok(Address(digits))
}

fn f64_prev(v: f64) -> f64 {
    f64::from_bits(v.to_bits() - 1)
}

/// Lower-left corner and side length of a cell: the image
/// T_{a1}(T_{a2}(... T_{ak}(S))).
pub fn cell_of_address(a: &Address) -> (Point, f64) {
    let mut corner = Point::new(0.0, 0.0);
    let mut side = 1.0;
    for &d in a.digits().iter().rev() {
        let ex = if d == 2 || d == 4 { 0.5 } else { 0.0 };
        let fy = if d >= 3 { 0.5 } else { 0.0 };
        corner = Point::new(corner.x * 0.5 + ex, corner.y * 0.5 + fy);
        side *= 0.5;
    }
    (corner, side)
}
