//! Offline recipe selection: grows the transvectant basis, samples every
//! reference table row and prints catalog lines for the chosen recipes.
//!
//! Usage: find_recipes [max_component] [probes]

use qslocc4::covariants::{Combine, Quantity};
use qslocc4::search::*;
use rand::SeedableRng;

/// Rows whose bit is not reproducible by a permutation-closed quantity.
const SKIP: &[(Quantity, &str)] = &[(Quantity::G, "L_00c2")];

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let cap: u8 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(6);
    let probes: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(4);
    let targets: Vec<Cell> = Quantity::ALL.iter().map(|q| q.cell()).collect();
    let basis = Basis::grow(&targets, &SearchConfig { max_component: cap, probes, seed: 1 });
    eprintln!("basis elements: {}", basis.elements.len());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for q in Quantity::ALL {
        let cell = q.cell();
        let ids = &basis.by_cell[&cell];
        let width = ids.len();
        let samples: Vec<RowSample> =
            sample_rows(&basis, q, 2, &mut rng).into_iter().filter(|s| !SKIP.contains(&(q, s.label))).collect();
        let chosen = match q.combine() {
            Combine::Sum => {
                let sel = select(&samples, q.combine(), &[], width);
                sparsest(&samples, q.combine(), &sel.kernel, width)
            }
            Combine::Product => {
                let sizes: Vec<usize> =
                    samples.iter().filter(|s| !s.expected_nonzero).map(|s| s.orbits[0].1.len()).collect();
                let total: usize = sizes.iter().product();
                (0..total)
                    .filter_map(|mut c| {
                        let picks: Vec<usize> = sizes
                            .iter()
                            .map(|&n| {
                                let r = c % n;
                                c /= n;
                                r
                            })
                            .collect();
                        let sel = select(&samples, q.combine(), &picks, width);
                        sel.chosen.as_ref()?;
                        sparsest(&samples, q.combine(), &sel.kernel, width)
                    })
                    .min_by_key(|v| v.iter().filter(|x| !qslocc4::Field::is_zero(*x)).count())
            }
        };
        let Some(v) = chosen else {
            eprintln!("{q}: no recipe");
            continue;
        };
        for (k, c) in v.iter().enumerate() {
            if qslocc4::Field::is_zero(c) {
                continue;
            }
            let (n, d) = rational_reconstruct(*c).unwrap();
            let coef = if d == 1 { n.to_string() } else { format!("{n}/{d}") };
            let steps: Vec<String> =
                chain(&basis, ids[k]).iter().map(|r| r.iter().map(|b| b.to_string()).collect()).collect();
            println!("{} {} {}", q.symbol(), coef, steps.join(" "));
        }
    }
}
