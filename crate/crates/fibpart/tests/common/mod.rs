use fibpart::oa::{field_dm, DifferenceMatrix};
use rand::prelude::*;

/// A valid difference matrix over a small cyclic group, built from a
/// known-good seed and randomized through property-preserving moves:
/// per-row constants, a unit multiplier, a column shuffle, and
/// concatenation for index 2.
pub fn random_passing_dm(rng: &mut impl Rng) -> DifferenceMatrix {
    let n: u32 = *[2u32, 3, 4, 5].choose(rng).unwrap();
    let lambda: u32 = if rng.random_bool(0.5) { 1 } else { 2 };

    let base: Vec<Vec<u32>> = if n == 4 {
        // no multiplication table works over Z4; two rows suffice
        vec![vec![0; 4], (0..4).collect()]
    } else {
        let m = rng.random_range(2..=n.min(4));
        field_dm(n, m).unwrap().rows().to_vec()
    };

    let mut rows: Vec<Vec<u32>> = base
        .iter()
        .map(|row| {
            let mut wide = Vec::with_capacity((lambda * n) as usize);
            for _ in 0..lambda {
                wide.extend_from_slice(row);
            }
            wide
        })
        .collect();

    let unit = loop {
        let u = rng.random_range(1..n);
        if gcd(u, n) == 1 {
            break u;
        }
    };
    for row in rows.iter_mut() {
        let shift = rng.random_range(0..n);
        for x in row.iter_mut() {
            *x = (*x * unit + shift) % n;
        }
    }

    let cols = rows[0].len();
    let mut order: Vec<usize> = (0..cols).collect();
    order.shuffle(rng);
    let rows = rows
        .iter()
        .map(|row| order.iter().map(|&c| row[c]).collect())
        .collect();

    DifferenceMatrix::new(n, rows).unwrap()
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
