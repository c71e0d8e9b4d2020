//! One pass/fail line per acceptance criterion, then a single verdict.
//!
//! Run with `cargo test -p eip-core --test acceptance -- --nocapture` to see
//! the lines.

use std::time::Instant;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use eip_core::bounds::{converse_sweep, lower_bound_sweep, scaling_exponent};
use eip_core::daisy::{daisy_of_cardinality, daisy_perimeter, eip_value, is_minimizer};
use eip_core::defects::{find_defect, fill_defect, height_bound_holds, normalize_minimizer, DefectReference};
use eip_core::experiments::{fit_exponent, fluctuation_scan, Family};
use eip_core::lattice::{bond_count, edge_perimeter, Config};
use eip_core::oracle::{cross_validate, cross_validate_with, eip_bruteforce, DisconnectedCheck};
use eip_core::order::initial_segment;
use eip_core::rearrange::decreasing_rearrangement;
use eip_core::{daisy::Do1Tuple, daisy::DaisySpec, Error};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn random_configs(d: usize, count: usize, seed: u64) -> Vec<Config> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=60);
            let side = rng.gen_range(2..=10);
            let pts: Vec<Vec<i32>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(1..=side)).collect()).collect();
            Config::new(d, &pts).unwrap()
        })
        .collect()
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let report = cross_validate(12, 7).unwrap();
    let failures: Vec<String> =
        report.rows.iter().filter(|r| !r.pass).map(|r| format!("d={} n={}", r.d, r.n)).collect();
    let mut inconclusive = Vec::new();
    for (d, n_max) in [(2, 12), (3, 7)] {
        for n in 1..=n_max {
            if eip_bruteforce(n, d).unwrap().disconnected == DisconnectedCheck::Inconclusive {
                inconclusive.push(format!("d={d} n={n}"));
            }
        }
    }
    let pass = report.passed && inconclusive.is_empty();
    outcome(
        pass,
        format!(
            "{} cases, failures {:?}, disconnected ties {:?}, {:.1}s",
            report.rows.len(),
            failures,
            inconclusive,
            start.elapsed().as_secs_f64()
        ),
    )
}

fn order_daisy_identity() -> Outcome {
    let jobs: Vec<(usize, u128)> = (1..=4).flat_map(|d| (1..=500u128).map(move |n| (d, n))).collect();
    let bad: Vec<(usize, u128)> = jobs
        .par_iter()
        .filter(|&&(d, n)| initial_segment(n, d).unwrap() != daisy_of_cardinality(n, d).unwrap().materialize().unwrap())
        .copied()
        .collect();
    outcome(bad.is_empty(), format!("{} pairs, mismatches {:?}", jobs.len(), bad))
}

fn perimeter_identity() -> Outcome {
    let mut bad = 0;
    for d in 2..=4 {
        for c in random_configs(d, 10_000, 11 + d as u64) {
            if edge_perimeter(&c) + 2 * bond_count(&c) as u128 != 2 * d as u128 * c.len() as u128 {
                bad += 1;
            }
        }
    }
    outcome(bad == 0, format!("30000 random configurations, {bad} violations"))
}

fn implicit_perimeter() -> Outcome {
    let jobs: Vec<(usize, u128)> = (1..=5).flat_map(|d| (1..=5000u128).map(move |n| (d, n))).collect();
    let bad: Vec<(usize, u128)> = jobs
        .par_iter()
        .filter(|&&(d, n)| {
            let spec = daisy_of_cardinality(n, d).unwrap();
            daisy_perimeter(&spec) != edge_perimeter(&spec.materialize().unwrap())
        })
        .copied()
        .collect();
    outcome(bad.is_empty(), format!("{} daisies, mismatches {:?}", jobs.len(), bad))
}

fn rearrangement_monotone() -> Outcome {
    let mut bad = 0;
    let mut strict = 0;
    for d in 2..=4 {
        for (i, c) in random_configs(d, 10_000, 101 + d as u64).into_iter().enumerate() {
            let r = decreasing_rearrangement(&c, i % d).unwrap();
            let (before, after) = (edge_perimeter(&c), edge_perimeter(&r));
            if after > before {
                bad += 1;
            } else if after < before {
                strict += 1;
            }
        }
    }
    outcome(bad == 0, format!("30000 random configurations, {bad} increases, {strict} strict decreases"))
}

fn slab_minimality() -> Outcome {
    let mut rows = lower_bound_sweep(2, &(1..=400).collect::<Vec<_>>()).unwrap();
    rows.extend(lower_bound_sweep(3, &(1..=100).collect::<Vec<_>>()).unwrap());
    rows.extend(lower_bound_sweep(4, &[256, 625, 4096]).unwrap());
    let bad: Vec<_> = rows.iter().filter(|r| !r.is_minimizer).map(|r| (r.d, r.ell, r.p)).collect();
    outcome(bad.is_empty(), format!("{} slabs, failures {:?}", rows.len(), bad))
}

fn padded_slab_non_minimality() -> Outcome {
    let mut rows = converse_sweep(2, &(2..=200).collect::<Vec<_>>()).unwrap();
    rows.extend(converse_sweep(3, &(2..=100).collect::<Vec<_>>()).unwrap());
    let bad: Vec<_> = rows.iter().filter(|r| r.is_minimizer).map(|r| (r.d, r.ell, r.j, r.p)).collect();
    outcome(!rows.is_empty() && bad.is_empty(), format!("{} padded slabs, minimizers among them {:?}", rows.len(), bad))
}

fn normalization_regression() -> Outcome {
    let mut count = 0;
    let mut bad = Vec::new();
    for (d, n_max) in [(2, 12), (3, 7)] {
        for n in 1..=n_max {
            for c in eip_bruteforce(n, d).unwrap().minimizers {
                count += 1;
                let ok = normalize_minimizer(&c).and_then(|nf| {
                    let back = nf.to_config()?;
                    Ok(back.len() == c.len() && edge_perimeter(&back) == edge_perimeter(&c) && height_bound_holds(&nf))
                });
                if !matches!(ok, Ok(true)) {
                    bad.push(format!("d={d} n={n} {c:?}: {ok:?}"));
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{count} minimizers, failures {bad:?}"))
}

fn scaling_law() -> Outcome {
    let expected = scaling_exponent(2).unwrap();
    assert_eq!(expected, Ratio::new(3, 4));
    assert_eq!(scaling_exponent(3).unwrap(), Ratio::new(3, 4));
    let target = 0.75;
    let ells2: Vec<u64> = (1..=100).map(|k| 100 * k).collect();
    let fit2 = fit_exponent(&fluctuation_scan(2, &ells2, Family::SlabExtremal).unwrap()).unwrap();
    let ells3: Vec<u64> = (1..=20).map(|k| 50 * k).collect();
    let fit3 = fit_exponent(&fluctuation_scan(3, &ells3, Family::SlabExtremal).unwrap()).unwrap();
    let pass = (fit2.slope - target).abs() <= 0.05 && (fit3.slope - target).abs() <= 0.05;
    outcome(
        pass,
        format!(
            "d=2 slope {:.4} (constant {:.3}), d=3 slope {:.4} (constant {:.3}), expected {expected}",
            fit2.slope, fit2.constant, fit3.slope, fit3.constant
        ),
    )
}

fn negative_controls() -> Outcome {
    let line = Config::new(2, [[1, 1], [1, 2], [1, 3], [1, 4]]).unwrap();
    let line_rejected = !is_minimizer(&line).unwrap();
    let faulty = cross_validate_with(6, 4, |n, d| Ok(eip_value(n as u128, d)? + 2)).unwrap();
    let fault_caught = !faulty.passed && faulty.rows.iter().any(|r| r.witness.is_some());
    let host = DaisySpec::perfect(Do1Tuple::new(vec![1, 1]).unwrap());
    let defect = find_defect(&host, &DefectReference::Perfect(Do1Tuple::new(vec![2, 2]).unwrap())).unwrap().unwrap();
    let big = Config::new(2, [[7, 7], [8, 7], [9, 7]]).unwrap();
    let donor_refused =
        matches!(fill_defect(&host.materialize().unwrap(), &defect, &big), Err(Error::DonorDoesNotFit));
    outcome(
        line_rejected && fault_caught && donor_refused,
        format!("line rejected {line_rejected}, injected fault caught {fault_caught}, oversized donor refused {donor_refused}"),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("order and daisy identity", order_daisy_identity),
        ("perimeter identity", perimeter_identity),
        ("implicit versus explicit perimeter", implicit_perimeter),
        ("rearrangement monotonicity", rearrangement_monotone),
        ("slab minimality sweep", slab_minimality),
        ("padded slab sweep", padded_slab_non_minimality),
        ("normalization regression", normalization_regression),
        ("scaling law", scaling_law),
        ("negative controls", negative_controls),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict}: {name}: {} [{:.1}s]", i + 1, o.detail, start.elapsed().as_secs_f64());
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
