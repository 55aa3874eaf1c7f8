//! Cross-module invariants that are too heavy for inline unit tests.

use std::collections::BTreeMap;

use prime_ifs::census::{kgram_frequencies, tuple_center_census, CensusKey};
use prime_ifs::ifs::{address_of_point, cell_of_address, driven_orbit, standard_square_system, Address};
use prime_ifs::prime_stream::{
    primes_from_count, primes_in_range, simple_sieve, tuple_centers, PrimeRangeQuery,
    RangeConvention, TupleCenterQuery,
};
use prime_ifs::raster::accumulate;
use prime_ifs::residue::{symbolize, ResidueAlphabet};

#[test]
fn segmented_sieve_matches_simple_to_ten_million() {
    assert_eq!(primes_in_range(2, 10_000_000).unwrap(), simple_sieve(10_000_000));
}

#[test]
fn census_and_raster_agree_on_cells() {
    // Drive the square system with 200k primes and compare, for every
    // depth-3 address, the pixel mass inside its cell with the k-gram
    // count. Exact, because dyadic cells align with an 8x8 grid.
    let k = 3usize;
    let size = 1 << k;
    let alphabet = ResidueAlphabet::new(10, [1, 3, 7, 9]).unwrap();
    let primes = primes_from_count(7, 200_000).unwrap();
    let stream = symbolize(&primes, &alphabet).unwrap();
    let orbit = driven_orbit(&stream, &standard_square_system(), prime_ifs::ifs::default_start())
        .unwrap();
    let census = kgram_frequencies(&stream, k).unwrap();
    let grid = accumulate(&orbit[k - 1..], size).unwrap();

    let mut pixel_mass: BTreeMap<Address, u64> = BTreeMap::new();
    for row in 0..size {
        for col in 0..size {
            let x = (col as f64 + 0.5) / size as f64;
            let y = ((size - 1 - row) as f64 + 0.5) / size as f64;
            let a = address_of_point(prime_ifs::ifs::Point::new(x, y), k).unwrap();
            *pixel_mass.entry(a).or_insert(0) += grid.count_at(row, col);
        }
    }
    assert_eq!(pixel_mass.values().sum::<u64>(), census.total());
    for (addr, mass) in pixel_mass {
        let key = CensusKey::Address(addr);
        assert_eq!(mass, census.count(&key), "cell {}", key.label());
    }
}

#[test]
fn cells_tile_the_square() {
    for depth in 1..=4usize {
        let mut area = 0.0;
        for i in 0..4usize.pow(depth as u32) {
            let digits: Vec<u8> = (0..depth)
                .map(|d| ((i >> (2 * d)) & 3) as u8 + 1)
                .collect();
            let (_, side) = cell_of_address(&Address::new(digits).unwrap());
            area += side * side;
        }
        assert!((area - 1.0).abs() < 1e-12);
    }
}

#[test]
fn twin_center_bias_is_shift_invariant() {
    // Shifting every center by a constant relabels the pair counts by
    // r -> (r + c) mod 8 without changing the multiset of counts.
    let centers = tuple_centers(&TupleCenterQuery {
        offset: 1,
        query: PrimeRangeQuery::ByCountFrom { start: 5, count: 100_000 },
    })
    .unwrap();
    let alphabet = ResidueAlphabet::new(8, [0, 2, 4, 6]).unwrap();
    let base = tuple_center_census(&centers, &alphabet, 2, RangeConvention::Unspecified).unwrap();
    for c in [1u64, 2, 3, 5] {
        let shifted: Vec<u64> = centers.iter().map(|&n| n + c).collect();
        let classes = {
            let mut cl = [0u64; 4];
            for (i, &r) in [0u64, 2, 4, 6].iter().enumerate() {
                cl[i] = (r + c) % 8;
            }
            cl
        };
        let shifted_alphabet = ResidueAlphabet::new(8, classes).unwrap();
        let shifted_table =
            tuple_center_census(&shifted, &shifted_alphabet, 2, RangeConvention::Unspecified)
                .unwrap();
        // Key-by-key: count of (a, b) must equal count of (a+c, b+c).
        for (key, count) in base.entries() {
            let CensusKey::Residues(rs) = key else { panic!() };
            let mapped = CensusKey::Residues(vec![(rs[0] + c) % 8, (rs[1] + c) % 8]);
            assert_eq!(shifted_table.count(&mapped), count, "shift {c}, key {rs:?}");
        }
    }
}

#[test]
fn residue_pair_repulsion_at_desk_scale() {
    // Diagonal pairs are strictly rarer than every off-diagonal pair for
    // M10 over the first 78,498 primes from 7.
    let alphabet = ResidueAlphabet::new(10, [1, 3, 7, 9]).unwrap();
    let primes = primes_from_count(7, 78_498).unwrap();
    let table = prime_ifs::census::residue_pair_counts(&primes, &alphabet).unwrap();
    let classes = [1u64, 3, 7, 9];
    let max_diag = classes
        .iter()
        .map(|&a| table.count(&CensusKey::Residues(vec![a, a])))
        .max()
        .unwrap();
    let min_off = classes
        .iter()
        .flat_map(|&a| classes.iter().map(move |&b| (a, b)))
        .filter(|&(a, b)| a != b)
        .map(|(a, b)| table.count(&CensusKey::Residues(vec![a, b])))
        .min()
        .unwrap();
    assert!(max_diag < min_off, "max diagonal {max_diag} vs min off-diagonal {min_off}");
}
