//! Acceptance suite: nine criteria, run sequentially by one test so the
//! per-criterion wall-clock numbers mean something on a single core.
//! Each criterion prints exactly one line, PASS or FAIL, and the runner
//! fails at the end if any criterion failed.
//!
//! Lines are written straight to stdout (bypassing libtest capture) so
//! a plain `cargo test` log shows them.

use std::any::Any;
use std::fs;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::Instant;

use num::complex::Complex64;
use num::{BigInt, BigRational, BigUint, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use pslab_core::exact::{is_ps_member, RationalExponent};
use pslab_core::expsum::{
    bound_prop31_at, bound_second_deriv, bound_third_deriv, golden_alpha_grid, hb_residual_batch,
    psi_diff_sum, scan_decay, weyl_vdc_sides, ExpSumParams, PhaseTable, Prop31Variant,
    PsiDiffMode,
};
use pslab_core::psets::{check_admissibility, count_ps_primes, main_term_li};
use pslab_core::singular::singular_series;
use pslab_core::ternary::{count_unweighted, sum_constrained, sum_log_weighted};
use pslab_core::{ArithTables, PrimeTable, PsProfile};

// ---- pinned tolerances and fixed grids -------------------------------

/// Criterion 2: ceiling for the identity residual over the full sweep.
const RESIDUAL_CEILING: f64 = 1e-6;
/// Criterion 3: band for count/main-term with one near-one exponent.
const SINGLE_BAND: (f64, f64) = (0.9, 1.1);
/// Criterion 3: wider band for the two-exponent intersection profile.
const PAIR_BAND: (f64, f64) = (0.85, 1.15);
/// Criterion 5: band for the log-weighted ternary ratio at desk scales
/// (the error term is of order 1/log n ~ 0.087 here).
const TERNARY_BAND: (f64, f64) = (0.85, 1.15);
/// Criterion 7: alpha-grid size for the decay scan.
const SCAN_ALPHAS: usize = 128;
/// Criterion 7: seed for the scan's alpha grid.
const SCAN_SEED: u64 = 2024;
/// Criterion 7: decay exponent 161/10000 — the largest rational with a
/// four-decimal denominator that passes the exact admissibility gate for
/// the scan profile (162/10000 is rejected; asserted below).
const SCAN_DELTA: (i64, i64) = (161, 10_000);
/// Criterion 8: regression baselines may not grow by more than 5%.
const DRIFT_CAP: f64 = 1.05;
/// Criterion 8: seed for the envelope scan's alpha grid.
const FIXTURE_SEED: u64 = 8;
/// Criterion 8: seed and trial count for the differencing inequality.
const WEYL_SEED: u64 = 0x5eed_ace5;
const WEYL_TRIALS: usize = 200;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn e2pi(x: f64) -> Complex64 {
    let (s, c) = (std::f64::consts::TAU * x).sin_cos();
    Complex64::new(c, s)
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs[xs.len() / 2]
}

// ---- criterion bodies (panic on failure, return a detail string) -----

/// 1. The sieve-side membership test and forward enumeration of floor
/// powers must produce the same set up to 10^6, for each exponent.
fn membership_equivalence() -> String {
    let limit = 1_000_000u64;
    let mut counts = Vec::new();
    for (num, den) in [(2u64, 3u64), (7, 10), (9, 10), (19, 20)] {
        let g = RationalExponent::new(num, den).unwrap();
        let by_membership: Vec<u64> =
            (1..=limit).into_par_iter().filter(|&m| is_ps_member(m, &g)).collect();

        // independent oracle: m_n = floor(n^(den/num)) via exact integer
        // powers and roots, enumerated until it leaves the window
        let mut by_enumeration = Vec::new();
        for n in 1u64.. {
            let m = BigUint::from(n)
                .pow(den as u32)
                .nth_root(num as u32)
                .to_u64()
                .expect("floor power fits u64 below the window");
            if m > limit {
                break;
            }
            by_enumeration.push(m);
        }
        assert!(
            by_enumeration.windows(2).all(|w| w[0] < w[1]),
            "oracle floors must be strictly increasing for {num}/{den}"
        );
        assert_eq!(
            by_membership, by_enumeration,
            "membership set differs from enumeration for {num}/{den}"
        );
        counts.push(format!("{num}/{den}:{}", by_membership.len()));
    }
    format!("set sizes {}", counts.join(" "))
}

/// 2. Identity residual sweep: max |Lambda_id - Lambda| < 1e-6 over all
/// n <= 3*10^5 at depth 4, cutoff 20 (valid since 3*10^5 <= 2*20^4).
fn identity_residual_ceiling() -> String {
    let limit = 300_000u64;
    let tables = ArithTables::build(limit).unwrap();
    let (max_residual, argmax) = hb_residual_batch(limit, 4, 20, &tables).unwrap();
    assert!(
        max_residual < RESIDUAL_CEILING,
        "max residual {max_residual:.3e} at n={argmax} exceeds {RESIDUAL_CEILING:.0e}"
    );
    format!("max residual {max_residual:.2e} at n={argmax}")
}

/// 3. Constrained prime counts against the logarithmic-integral main
/// term at x = 10^7: single near-one exponents inside (0.9, 1.1), the
/// two-exponent intersection inside (0.85, 1.15).
fn count_versus_main_term() -> String {
    let x = 10_000_000u64;
    let table = PrimeTable::sieve(x).unwrap();
    let mut details = Vec::new();
    for (literal, band) in [
        ("k=1; g=9/10", SINGLE_BAND),
        ("k=1; g=19/20", SINGLE_BAND),
        ("k=2; g=49/50,24/25", PAIR_BAND),
    ] {
        let profile = PsProfile::parse(literal).unwrap();
        let count = count_ps_primes(x, &profile, &table).unwrap();
        let li = main_term_li(x as f64, &profile).unwrap();
        let ratio = count as f64 / li;
        assert!(
            ratio >= band.0 && ratio <= band.1,
            "{literal}: ratio {ratio:.4} outside [{}, {}]",
            band.0,
            band.1
        );
        details.push(format!("{literal} ratio {ratio:.4}"));
    }
    details.join("; ")
}

/// 4. Singular series: exactly zero on sampled evens, positive on every
/// odd n <= 10^5, and truncation jumps within the claimed tail bound.
fn singular_series_signs_and_tails() -> String {
    let table = PrimeTable::sieve(200_000).unwrap();

    // 100 deterministic even samples spread over [4, 10^6]
    for i in 0..100u64 {
        let n = 4 + 2 * i * 4993;
        let s = singular_series(n, 1000, &table).unwrap();
        assert_eq!(s.value, 0.0, "even n={n} must vanish exactly");
        assert_eq!(s.tail_bound, 0.0);
    }

    let mut min_odd = f64::INFINITY;
    for n in (3..=99_999u64).step_by(2) {
        let s = singular_series(n, 1000, &table).unwrap();
        assert!(s.value > 0.0, "odd n={n} gave {}", s.value);
        min_odd = min_odd.min(s.value);
    }

    // truncation doubling stays inside the reported tail bound
    let mut worst = 0.0f64;
    for p in [1_000u64, 10_000, 100_000] {
        for j in 0..20u64 {
            let n = 3 + 2 * j * 24_989;
            let lo = singular_series(n, p, &table).unwrap();
            let hi = singular_series(n, 2 * p, &table).unwrap();
            let jump = (lo.value - hi.value).abs();
            assert!(
                jump <= lo.tail_bound,
                "n={n}, P={p}: jump {jump:.3e} exceeds tail bound {:.3e}",
                lo.tail_bound
            );
            if lo.tail_bound > 0.0 {
                worst = worst.max(jump / lo.tail_bound);
            }
        }
    }
    format!("min odd value {min_odd:.4}, worst jump/tail {worst:.3}")
}

/// 5. Log-weighted ternary sums against (1/2) S(n) n^2: ratios inside
/// the band at both scales, and the typical deviation must not grow
/// from 10^5 to 2*10^5.
fn ternary_log_weighted_trend() -> String {
    let table = PrimeTable::sieve(200_011).unwrap();
    let lower = [100_001u64, 100_003, 100_007, 100_009, 100_011];
    let upper = [200_001u64, 200_003, 200_007, 200_009, 200_011];
    let run = |ns: &[u64]| -> Vec<f64> {
        ns.iter()
            .map(|&n| {
                let r = sum_log_weighted(n, &table).unwrap();
                assert!(
                    r.ratio >= TERNARY_BAND.0 && r.ratio <= TERNARY_BAND.1,
                    "n={n}: ratio {:.4} outside [{}, {}]",
                    r.ratio,
                    TERNARY_BAND.0,
                    TERNARY_BAND.1
                );
                r.ratio
            })
            .collect()
    };
    let lo = run(&lower);
    let hi = run(&upper);
    let med_lo = median(lo.iter().map(|r| (r - 1.0).abs()).collect());
    let med_hi = median(hi.iter().map(|r| (r - 1.0).abs()).collect());
    assert!(
        med_hi <= med_lo,
        "median |ratio-1| grew from {med_lo:.4} at 1e5 to {med_hi:.4} at 2e5"
    );
    format!("median |ratio-1| {med_lo:.4} -> {med_hi:.4}")
}

/// 6. With fully degenerate profiles the constrained sum must equal the
/// unweighted count bit for bit, and the count must match an exhaustive
/// triple loop, for every odd n in the domain up to 1000.
fn constrained_degeneracy() -> String {
    let table = PrimeTable::sieve(1_000).unwrap();
    let ones = PsProfile::all_ones(1).unwrap();
    let primes = table.primes_up_to(1_000);
    let mut checked = 0u32;
    for n in (9..=999u64).step_by(2) {
        let count = count_unweighted(n, &table).unwrap();
        let constrained = sum_constrained(n, &ones, &ones, &ones, &table).unwrap();
        assert_eq!(
            constrained.count_or_sum, count.count_or_sum,
            "n={n}: degenerate constrained sum differs from the count"
        );

        let mut oracle = 0u64;
        for &p1 in primes.iter().take_while(|&&p| p < n) {
            for &p2 in primes.iter().take_while(|&&p| p < n - p1) {
                let r = n - p1 - p2;
                if r >= 2 && table.is_prime(r) {
                    oracle += 1;
                }
            }
        }
        assert_eq!(count.count_or_sum, oracle as f64, "n={n}: exhaustive oracle disagrees");
        checked += 1;
    }
    format!("{checked} odd targets, exact equality throughout")
}

/// 7. Sawtooth-difference sums: identically zero for degenerate
/// profiles, and the admissible decay scan's normalized maximum must
/// not grow across the size ladder.
fn sawtooth_triviality_and_decay() -> String {
    let table = PrimeTable::sieve(1 << 21).unwrap();

    for k in 1..=3usize {
        let ones = PsProfile::all_ones(k).unwrap();
        for alpha in golden_alpha_grid(16, SCAN_SEED) {
            let s = psi_diff_sum(4096, alpha, &ones, PsiDiffMode::Standard, &table).unwrap();
            assert_eq!(s, Complex64::new(0.0, 0.0), "k={k}, alpha={alpha}: not exactly zero");
        }
    }

    let profile = PsProfile::parse("k=3; g=599/600,299/300,199/200").unwrap();
    let delta = rat(SCAN_DELTA.0, SCAN_DELTA.1);
    let alphas = golden_alpha_grid(SCAN_ALPHAS, SCAN_SEED);
    let n_list: Vec<u64> = (16..=21).map(|e| 1u64 << e).collect();

    // one ulp of delta granularity past the gate must be rejected
    let too_big = rat(SCAN_DELTA.0 + 1, SCAN_DELTA.1);
    assert!(
        scan_decay(&profile, &n_list, &alphas, &too_big, &table).is_err(),
        "delta {}/{} should fail the exact gate",
        SCAN_DELTA.0 + 1,
        SCAN_DELTA.1
    );

    let report = scan_decay(&profile, &n_list, &alphas, &delta, &table).unwrap();
    let first = report.rows.first().unwrap().ratio;
    let last = report.rows.last().unwrap().ratio;
    assert!(
        report.monotone_improvement,
        "normalized maximum grew: {first:.3e} -> {last:.3e}"
    );
    format!("normalized max {first:.3e} @2^16 -> {last:.3e} @2^21")
}

/// 8. Envelope regressions against the stored baselines (no more than
/// 5% growth) and the shifted-correlation inequality on seeded trials.
fn envelope_regressions_and_differencing() -> String {
    let fixture_path = fixtures_path();
    let text = fs::read_to_string(&fixture_path).unwrap_or_else(|e| {
        panic!(
            "cannot read {} ({e}); run `cargo test -p pslab-core --test acceptance \
             regenerate_bound_fixtures -- --ignored` once to create the baseline",
            fixture_path.display()
        )
    });
    let baseline: serde_json::Value = serde_json::from_str(&text).unwrap();
    let current = compute_bound_ratios();
    for (key, value) in &current {
        let recorded = baseline[key]
            .as_f64()
            .unwrap_or_else(|| panic!("baseline missing key {key}"));
        assert!(recorded.is_finite() && recorded > 0.0, "degenerate baseline for {key}");
        assert!(
            *value <= recorded * DRIFT_CAP,
            "{key}: observed/bound max {value:.6} exceeds baseline {recorded:.6} by more than 5%"
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(WEYL_SEED);
    let mut worst = 0.0f64;
    for _ in 0..WEYL_TRIALS {
        // unit-modulus sequence on the dyadic window (N, 2N]
        let len = rng.random_range(64..=512usize);
        let q = rng.random_range(1..=len);
        let z: Vec<Complex64> = (0..len).map(|_| e2pi(rng.random::<f64>())).collect();
        let (lhs, rhs) = weyl_vdc_sides(&z, len as u64, q).unwrap();
        assert!(
            lhs <= 4.0 * rhs.max(0.0) + 1e-9,
            "differencing inequality violated: lhs {lhs:.6e}, rhs {rhs:.6e}, Q={q}, N={len}"
        );
        if rhs > 0.0 {
            worst = worst.max(lhs / (4.0 * rhs));
        }
    }
    format!(
        "baselines held ({}); worst lhs/(4 rhs) = {worst:.3} over {WEYL_TRIALS} trials",
        current.iter().map(|(k, v)| format!("{k} {v:.3}")).collect::<Vec<_>>().join(", ")
    )
}

/// 9. The exact rational admissibility system: the specialised
/// three-exponent constants, both corollary thresholds, and strictness
/// at the boundary.
fn admissibility_constants_and_boundary() -> String {
    let p = PsProfile::parse("k=3; g=599/600,299/300,199/200").unwrap();
    let rep = check_admissibility(&p, &p, &p).unwrap();
    let spec_rows = rep.specialized.as_ref().expect("three exponents use the sharper row set");
    let last = &spec_rows[2];
    assert_eq!(
        last.coeffs.to_vec(),
        vec![rat(12, 1), rat(26, 1), rat(26, 1)],
        "specialised full-row coefficients"
    );
    for row in spec_rows {
        assert_eq!(row.rhs, rat(23, 24), "specialised right-hand side");
    }
    assert_eq!(rep.corollary_equal.threshold, rat(23, 1536), "equal-profile threshold");
    assert_eq!(rep.corollary_single.threshold, rat(23, 288), "single-profile threshold");
    assert!(rep.admissible, "the scan profile itself is admissible");

    // a profile triple sitting exactly on the row boundary is rejected
    let one = RationalExponent::new(1, 1).unwrap();
    let boundary = PsProfile::new(vec![
        one.clone(),
        one.clone(),
        RationalExponent::new(1513, 1536).unwrap(),
    ])
    .unwrap();
    assert_eq!(boundary.sigma(), &rat(23, 1536), "constructed deficit");
    let rep_b = check_admissibility(&boundary, &boundary, &boundary).unwrap();
    assert!(!rep_b.admissible, "exact boundary must not be admissible");
    assert!(!rep_b.corollary_equal.satisfied, "threshold comparison is strict");

    // strictly inside the same corner is admissible
    let inside = PsProfile::new(vec![
        one.clone(),
        one,
        RationalExponent::new(9851, 10_000).unwrap(),
    ])
    .unwrap();
    let rep_i = check_admissibility(&inside, &inside, &inside).unwrap();
    assert!(rep_i.admissible, "sigma = 149/10000 sits strictly inside");

    "constants 12/26/26 vs 23/24, thresholds 23/1536 and 23/288, boundary strict".into()
}

// ---- fixture computation ---------------------------------------------

fn fixtures_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/bound_ratios.json")
}

/// Max observed/bound over the fixed grids, for both phase-sum envelope
/// variants and both derivative tests. Deterministic: fixed seeds, fixed
/// grids, fixed reduction orders.
fn compute_bound_ratios() -> Vec<(&'static str, f64)> {
    let gam = |n: u64, d: u64| RationalExponent::new(n, d).unwrap();
    let params = ExpSumParams::new(
        0.0,
        vec![1.0, 1.0, 1.0],
        vec![gam(9, 10), gam(4, 5), gam(7, 10)],
        1 << 14,
        1 << 15,
    )
    .unwrap();
    let table = PhaseTable::build(&params).unwrap();
    let mut kphase_second = 0.0f64;
    let mut kphase_third = 0.0f64;
    for alpha in golden_alpha_grid(64, FIXTURE_SEED) {
        let at = params.with_alpha(alpha).unwrap();
        let second = bound_prop31_at(&table, &at, Prop31Variant::Second).unwrap();
        let third = bound_prop31_at(&table, &at, Prop31Variant::Third).unwrap();
        kphase_second = kphase_second.max(second.ratio);
        kphase_third = kphase_third.max(third.ratio);
    }

    let mut derivative_second = 0.0f64;
    let mut derivative_third = 0.0f64;
    for a in [512u64, 1024, 2048] {
        for k in 0..7 {
            // quadratic phase: curvature is exactly 2 beta
            let beta = 1e-5 * 3.16f64.powi(k);
            let mut acc = Complex64::new(0.0, 0.0);
            for m in (a + 1)..=(2 * a) {
                acc += e2pi(beta * (m * m) as f64);
            }
            derivative_second =
                derivative_second.max(acc.norm() / bound_second_deriv(a as f64, 2.0 * beta));
        }
        for k in 0..5 {
            // cubic phase: third derivative is exactly 6 beta
            let beta = 1e-8 * 10f64.powi(k);
            let mut acc = Complex64::new(0.0, 0.0);
            for m in (a + 1)..=(2 * a) {
                let mf = m as f64;
                acc += e2pi(beta * mf * mf * mf);
            }
            derivative_third =
                derivative_third.max(acc.norm() / bound_third_deriv(a as f64, 6.0 * beta));
        }
    }

    vec![
        ("kphase_second", kphase_second),
        ("kphase_third", kphase_third),
        ("derivative_second", derivative_second),
        ("derivative_third", derivative_third),
    ]
}

/// Writes the envelope baselines. Run once to (re)baseline:
/// `cargo test -p pslab-core --test acceptance regenerate_bound_fixtures -- --ignored`
#[test]
#[ignore = "rewrites tests/fixtures/bound_ratios.json"]
fn regenerate_bound_fixtures() {
    let ratios = compute_bound_ratios();
    let mut doc = serde_json::Map::new();
    for (k, v) in &ratios {
        doc.insert((*k).to_string(), serde_json::json!(v));
    }
    let path = fixtures_path();
    fs::create_dir_all(path.parent().unwrap()).unwrap();
    fs::write(&path, serde_json::to_string_pretty(&serde_json::Value::Object(doc)).unwrap())
        .unwrap();
    println!("wrote {}", path.display());
}

// ---- runner ------------------------------------------------------------

fn panic_text(e: Box<dyn Any + Send>) -> String {
    e.downcast_ref::<String>()
        .cloned()
        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "panic without message".into())
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> String); 9] = [
        ("membership enumeration equivalence", membership_equivalence),
        ("identity residual ceiling", identity_residual_ceiling),
        ("count versus main term", count_versus_main_term),
        ("singular series signs and tails", singular_series_signs_and_tails),
        ("ternary log-weighted trend", ternary_log_weighted_trend),
        ("constrained degeneracy", constrained_degeneracy),
        ("sawtooth triviality and decay", sawtooth_triviality_and_decay),
        ("envelope regressions and differencing", envelope_regressions_and_differencing),
        ("admissibility constants and boundary", admissibility_constants_and_boundary),
    ];
    let mut failures = 0usize;
    let mut out = std::io::stdout();
    // newline first: with --nocapture, libtest leaves its "test ..." prefix
    // unterminated and the first criterion line would glue onto it
    writeln!(out).unwrap();
    for (i, (name, body)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(body));
        let secs = started.elapsed().as_secs_f64();
        let line = match result {
            Ok(detail) => format!("ACCEPTANCE {}: PASS — {name} ({secs:.1}s) — {detail}", i + 1),
            Err(e) => {
                failures += 1;
                format!("ACCEPTANCE {}: FAIL — {name} ({secs:.1}s) — {}", i + 1, panic_text(e))
            }
        };
        writeln!(out, "{line}").unwrap();
        out.flush().unwrap();
    }
    assert_eq!(failures, 0, "{failures} acceptance criteria failed");
}
