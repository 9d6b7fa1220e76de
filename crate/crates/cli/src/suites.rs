//! The bundled verification suites behind `apnforge verify`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use serde::Serialize;

use apnforge_core::ddt::{self, Family, FamilySpec};
use apnforge_core::phi::{build_phi_j, gold_product};
use apnforge_core::screen::{coprime_bruteforce, coprime_gold_formula, lucas_mod2};
use apnforge_core::{FieldCtx, TriPoly, UniPoly};

pub const SUITES: &[&str] = &[
    "gold-factorization",
    "coprimality",
    "families",
    "prop1",
    "lucas",
    "even-identity",
];

#[derive(Clone, Debug, Serialize)]
pub struct SuiteCheck {
    pub suite: String,
    pub name: String,
    pub pass: bool,
    pub detail: String,
    /// Wall time; reported on stderr only, so stdout stays deterministic.
    #[serde(skip)]
    pub millis: u128,
}

/// The family rows exercised by the `families` suite and verb.
pub fn standard_families() -> Vec<FamilySpec> {
    let row = |family, n| FamilySpec { family, n };
    vec![
        row(Family::Gold { r: 1 }, 4),
        row(Family::Gold { r: 3 }, 10),
        row(Family::KasamiWelch { r: 2 }, 5),
        row(Family::Welch { r: 2 }, 5),
        row(Family::Niho { r: 2 }, 5),
        row(Family::Inverse { r: 2 }, 5),
        row(Family::Dobbertin { r: 1 }, 5),
        row(Family::EkpBinomial { u: None }, 10),
    ]
}

fn k(n: u32) -> FieldCtx {
    FieldCtx::new(n).expect("suite fields are in range")
}

/// Runs `name` (or every suite for `all`), calling `progress` with one line
/// per finished check.
pub fn run_suite(name: &str, progress: &mut dyn FnMut(String)) -> Result<Vec<SuiteCheck>, String> {
    let names: Vec<&str> = match name {
        "all" => SUITES.to_vec(),
        n if SUITES.contains(&n) => vec![n],
        other => {
            return Err(format!(
                "unknown suite {other:?} (expected one of {}, all)",
                SUITES.join(", ")
            ))
        }
    };
    let mut out = Vec::new();
    for suite in names {
        for (check, body) in checks(suite) {
            let start = Instant::now();
            let result = catch_unwind(AssertUnwindSafe(body))
                .unwrap_or_else(|_| (false, "panicked".to_string()));
            let millis = start.elapsed().as_millis();
            progress(format!(
                "[{suite}] {check}: {} ({millis} ms)",
                if result.0 { "pass" } else { "FAIL" }
            ));
            out.push(SuiteCheck {
                suite: suite.to_string(),
                name: check,
                pass: result.0,
                detail: result.1,
                millis,
            });
        }
    }
    Ok(out)
}

type Body = Box<dyn FnOnce() -> (bool, String)>;

fn checks(suite: &str) -> Vec<(String, Body)> {
    match suite {
        "gold-factorization" => (2..=5u32)
            .map(|kk| {
                let body: Body = Box::new(move || {
                    let ctx = k(kk);
                    let product = gold_product(kk, ctx).expect("k divides n");
                    let phi = build_phi_j((1 << kk) + 1, ctx);
                    (product == phi, format!("{} terms", phi.len()))
                });
                (format!("k={kk}"), body)
            })
            .collect(),
        "coprimality" => {
            let mut v: Vec<(String, Body)> = (2..=5u32)
                .map(|kk| {
                    let body: Body = Box::new(move || {
                        let ctx = k(kk);
                        let mut agree = 0;
                        let mut total = 0;
                        for d in (3..=65).step_by(2) {
                            total += 1;
                            let formula = coprime_gold_formula(kk, d).expect("odd d");
                            let brute = coprime_bruteforce(kk, d, &ctx).expect("d in range");
                            agree += (formula == brute) as u32;
                        }
                        (agree == total, format!("{agree}/{total} agree"))
                    });
                    (format!("k={kk} odd d in [3,65]"), body)
                })
                .collect();
            for (kk, d, expect) in [(2u32, 9u32, true), (4, 5, false), (3, 9, false)] {
                let body: Body = Box::new(move || {
                    let brute = coprime_bruteforce(kk, d, &k(kk)).expect("d in range");
                    (brute == expect, format!("coprime = {brute}"))
                });
                v.push((format!("k={kk} d={d}"), body));
            }
            v
        }
        "families" => {
            let mut v: Vec<(String, Body)> = standard_families()
                .into_iter()
                .map(|spec| {
                    let name = format!("{} n={}", spec.family.name(), spec.n);
                    let body: Body = Box::new(move || {
                        let f = ddt::family_exponent(&spec).expect("row satisfies its constraints");
                        let ctx = k(spec.n);
                        let s = ddt::diff_spectrum(&f.to_poly(ctx), &ctx).expect("n in range");
                        (
                            s.uniformity == 2 && s.all_counts_even(),
                            format!("uniformity {}", s.uniformity),
                        )
                    });
                    (name, body)
                })
                .collect();
            for (d, n) in [(5u32, 4u32), (9, 6)] {
                let body: Body = Box::new(move || {
                    let ctx = k(n);
                    let s = ddt::diff_spectrum(&UniPoly::monomial(ctx, d), &ctx).expect("n in range");
                    (s.uniformity >= 4, format!("uniformity {}", s.uniformity))
                });
                v.push((format!("x^{d} over GF(2^{n}) not APN"), body));
            }
            v
        }
        "prop1" => {
            let mut v: Vec<(String, Body)> = Vec::new();
            for text in ["x^3", "x^5", "x^7", "x^9+x^7", "x^13"] {
                for n in [4u32, 5] {
                    let body: Body = Box::new(move || {
                        let ctx = k(n);
                        let f = UniPoly::parse(text, ctx).expect("valid");
                        let apn = ddt::is_apn(&f, &ctx).expect("n in range");
                        let holds = ddt::prop1_check(&f, &ctx).expect("n in range").holds;
                        (holds == apn, format!("apn = {apn}, containment = {holds}"))
                    });
                    v.push((format!("{text} n={n}"), body));
                }
            }
            v
        }
        "lucas" => {
            let pascal: Body = Box::new(|| {
                let mut row = vec![1u8];
                let mut bad = 0;
                for a in 0..=512u64 {
                    for (b, &c) in row.iter().enumerate() {
                        bad += (lucas_mod2(a, b as u64) != c) as u32;
                    }
                    let mut next = vec![1u8; row.len() + 1];
                    for i in 1..row.len() {
                        next[i] = row[i - 1] ^ row[i];
                    }
                    row = next;
                }
                (bad == 0, format!("{bad} mismatches for 0 <= b <= a <= 512"))
            });
            let pattern: Body = Box::new(|| {
                let ok = (1..=4u32).all(|i| {
                    (1..=31u64)
                        .step_by(2)
                        .all(|l| lucas_mod2((l << i) + 1, (1 << i) + 1) == 1)
                });
                (ok, "C(2^i*l+1, 2^i+1) odd for 1 <= i <= 4, odd l <= 31".into())
            });
            vec![("pascal".into(), pascal), ("proof pattern".into(), pattern)]
        }
        "even-identity" => {
            let body: Body = Box::new(|| {
                let ctx = k(1);
                let d = TriPoly::denominator(ctx);
                let bad: Vec<u32> = (1..=32u32)
                    .filter(|&m| build_phi_j(2 * m, ctx) != &d * &build_phi_j(m, ctx).square())
                    .collect();
                (bad.is_empty(), format!("failures: {bad:?}"))
            });
            vec![("phi_2m = D*phi_m^2, m <= 32".into(), body)]
        }
        _ => Vec::new(),
    }
}
