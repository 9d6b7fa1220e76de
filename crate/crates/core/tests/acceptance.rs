//! End-to-end acceptance run: one line per criterion, with the wall-time
//! budget each one must fit in. Exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use apnforge_core::ddt::{self, DiffSpectrum, Family, FamilySpec};
use apnforge_core::phi::{build_phi_j, gold_product};
use apnforge_core::screen::{
    coprime_bruteforce, coprime_gold_formula, lucas_mod2, screen_exceptional, theorem1_holds,
    theorem1_min_field, Status,
};
use apnforge_core::{FieldCtx, FieldElement, TriPoly, UniPoly};

const GOLDEN: &str = include_str!("golden/screen_regression.jsonl");

fn k(n: u32) -> FieldCtx {
    FieldCtx::new(n).unwrap()
}

// ---- naive oracle: schoolbook GF(2^n) arithmetic and a full DDT scan ----

fn naive_mul(mut a: u32, mut b: u32, n: u32, modulus: u32) -> u32 {
    let mut r = 0;
    while b != 0 {
        if b & 1 == 1 {
            r ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> n & 1 == 1 {
            a ^= modulus;
        }
    }
    r
}

fn naive_pow(a: u32, e: u32, n: u32, modulus: u32) -> u32 {
    (0..e).fold(1, |acc, _| naive_mul(acc, a, n, modulus))
}

/// Uniformity and "all counts even" from the q x q table, built by direct
/// evaluation of every term.
fn naive_ddt(f: &UniPoly) -> (u32, bool) {
    let ctx = f.ctx();
    let (n, m) = (ctx.n(), ctx.modulus());
    let q = 1usize << n;
    let values: Vec<u32> = (0..q as u32)
        .map(|x| {
            f.terms()
                .map(|(e, c)| naive_mul(c.bits(), naive_pow(x, e, n, m), n, m))
                .fold(0, |s, t| s ^ t)
        })
        .collect();
    let mut uniformity = 0;
    let mut even = true;
    let mut counts = vec![0u32; q];
    for a in 1..q {
        counts.iter_mut().for_each(|c| *c = 0);
        for x in 0..q {
            counts[(values[x] ^ values[x ^ a]) as usize] += 1;
        }
        uniformity = uniformity.max(*counts.iter().max().unwrap());
        even &= counts.iter().all(|c| c % 2 == 0);
    }
    (uniformity, even)
}

// ---- harness ----

struct Run {
    spectra: Vec<(String, DiffSpectrum)>,
    failed: usize,
}

impl Run {
    fn spectrum(&mut self, label: impl Into<String>, f: &UniPoly) -> DiffSpectrum {
        let s = ddt::diff_spectrum(f, f.ctx()).unwrap();
        self.spectra.push((label.into(), s.clone()));
        s
    }

    fn criterion(&mut self, id: u32, name: &str, budget_s: u64, body: impl FnOnce(&mut Run) -> Result<String, String>) {
        let start = Instant::now();
        let result = body(self);
        let took = start.elapsed();
        let budget = Duration::from_secs(budget_s);
        let (ok, detail) = match result {
            Ok(d) if took <= budget => (true, d),
            Ok(d) => (false, format!("{d}; over budget")),
            Err(e) => (false, e),
        };
        if !ok {
            self.failed += 1;
        }
        println!(
            "[{}] {id:>2}. {name}: {detail} ({:.2} s of {budget_s} s)",
            if ok { "pass" } else { "FAIL" },
            took.as_secs_f64()
        );
    }
}

fn check(ok: bool, detail: String) -> Result<String, String> {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    let mut run = Run { spectra: Vec::new(), failed: 0 };

    run.criterion(1, "Gold factorization", 10, |_| {
        let bad: Vec<u32> = (2..=5u32)
            .filter(|&kk| gold_product(kk, k(kk)).unwrap() != build_phi_j((1 << kk) + 1, k(kk)))
            .collect();
        check(bad.is_empty(), format!("k in 2..=5, mismatches at {bad:?}"))
    });

    run.criterion(2, "homogeneity of phi_j", 10, |_| {
        let gf2 = k(1);
        let bad: Vec<u32> = (3..=65u32)
            .filter(|&j| {
                let p = build_phi_j(j, gf2);
                // phi_j vanishes exactly for powers of two
                if p.is_zero() {
                    !j.is_power_of_two()
                } else {
                    j.is_power_of_two() || !p.is_homogeneous() || p.total_degree() != Some(j - 3)
                }
            })
            .collect();
        check(bad.is_empty(), format!("3 <= j <= 65, failures at {bad:?}"))
    });

    run.criterion(3, "even identity phi_2m = D*phi_m^2", 30, |_| {
        let gf2 = k(1);
        let d = TriPoly::denominator(gf2);
        let bad: Vec<u32> = (1..=32u32)
            .filter(|&m| {
                let phi_m = build_phi_j(m, gf2);
                let rhs = d.checked_mul(&phi_m.checked_mul(&phi_m).unwrap()).unwrap();
                build_phi_j(2 * m, gf2) != rhs
            })
            .collect();
        check(bad.is_empty(), format!("m <= 32, failures at {bad:?}"))
    });

    run.criterion(4, "coprimality formula vs brute force", 120, |_| {
        let mut cases = 0;
        let mut disagree = Vec::new();
        for kk in 2..=5u32 {
            for d in (3..=65u32).step_by(2) {
                cases += 1;
                let brute = coprime_bruteforce(kk, d, &k(kk)).unwrap();
                if coprime_gold_formula(kk, d).unwrap() != brute {
                    disagree.push((kk, d));
                }
            }
        }
        let spots = [(2u32, 9u32, true), (4, 5, false), (3, 9, false)]
            .iter()
            .all(|&(kk, d, want)| coprime_bruteforce(kk, d, &k(kk)).unwrap() == want);
        check(
            cases == 128 && disagree.is_empty() && spots,
            format!("{cases} cases, disagreements {disagree:?}, spot checks {spots}"),
        )
    });

    run.criterion(5, "APN family table", 120, |run| {
        let rows = [
            (Family::Gold { r: 1 }, 4),
            (Family::Gold { r: 3 }, 10),
            (Family::KasamiWelch { r: 2 }, 5),
            (Family::Welch { r: 2 }, 5),
            (Family::Niho { r: 2 }, 5),
            (Family::Inverse { r: 2 }, 5),
            (Family::Dobbertin { r: 1 }, 5),
        ];
        let mut bad = Vec::new();
        for (family, n) in rows {
            let f = ddt::family_exponent(&FamilySpec { family, n }).unwrap().to_poly(k(n));
            let s = run.spectrum(format!("{} n={n}", family.name()), &f);
            if s.uniformity != 2 || naive_ddt(&f).0 != 2 {
                bad.push(format!("{} n={n}: {}", family.name(), s.uniformity));
            }
        }
        for (d, n) in [(5u32, 4u32), (9, 6)] {
            let f = UniPoly::monomial(k(n), d);
            let s = run.spectrum(format!("x^{d} n={n}"), &f);
            if s.uniformity < 4 || naive_ddt(&f).0 != s.uniformity {
                bad.push(format!("x^{d} n={n}: {}", s.uniformity));
            }
        }
        check(bad.is_empty(), format!("7 APN rows, 2 non-APN rows, failures {bad:?}"))
    });

    run.criterion(6, "EKP binomial over GF(2^10)", 300, |run| {
        let ctx = k(10);
        let admissible = ddt::ekp_admissible_u(&ctx).unwrap();
        // spread the samples across the set, both cosets included
        let step = admissible.len() / 4;
        let sample: Vec<FieldElement> = (0..4).map(|i| admissible[i * step + i]).collect();
        let mut apn = 0;
        for &u in &sample {
            let f = UniPoly::from_terms(ctx, [(3, FieldElement::ONE), (36, u)]);
            let s = run.spectrum(format!("x^3+{u}*x^36"), &f);
            apn += (s.uniformity == 2 && naive_ddt(&f).0 == 2) as u32;
        }
        check(
            admissible.len() == 62 && apn == 4,
            format!("{} admissible u, {apn}/4 sampled u give uniformity 2", admissible.len()),
        )
    });

    run.criterion(7, "surface containment iff APN", 120, |run| {
        let mut bad = Vec::new();
        let mut apn_count = 0;
        for text in ["x^3", "x^5", "x^7", "x^9+x^7", "x^13"] {
            for n in [4u32, 5] {
                let f = UniPoly::parse(text, k(n)).unwrap();
                let apn = run.spectrum(format!("{text} n={n}"), &f).is_apn();
                let oracle = naive_ddt(&f).0 == 2;
                let holds = ddt::prop1_check(&f, &k(n)).unwrap().holds;
                apn_count += apn as u32;
                if holds != apn || apn != oracle {
                    bad.push(format!("{text} n={n}"));
                }
            }
        }
        check(
            bad.is_empty() && apn_count > 0 && apn_count < 10,
            format!("10 cases ({apn_count} APN), disagreements {bad:?}"),
        )
    });

    run.criterion(9, "Lucas parity", 5, |_| {
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
        let pattern = (1..=4u32).all(|i| {
            (1..=31u64).step_by(2).all(|l| lucas_mod2((l << i) + 1, (1 << i) + 1) == 1)
        });
        check(
            bad == 0 && pattern,
            format!("{bad} Pascal mismatches up to 512; C(2^i*l+1, 2^i+1) odd for 1<=i<=4, odd l<=31: {pattern}"),
        )
    });

    run.criterion(10, "point bound implication for x^9+x^7", 180, |run| {
        let mut notes = Vec::new();
        let mut ok = true;
        for n in [5u32, 7] {
            let ctx = k(n);
            let f = UniPoly::parse("x^9+x^7", ctx).unwrap();
            let verdict = screen_exceptional(&f);
            let certified = verdict.theorem.as_deref() == Some("Thm 11");
            let apn = run.spectrum(format!("x^9+x^7 n={n}"), &f).is_apn();
            let points = ddt::projective_point_count(&f, &ctx).unwrap().total;
            let bound = ddt::corollary_bound(9, ctx.order());
            ok &= certified && (!apn || points <= bound);
            notes.push(format!(
                "n={n}: {}, {points} points vs bound {bound}",
                if apn { "APN" } else { "vacuous (not APN)" }
            ));
        }
        check(ok, notes.join("; "))
    });

    run.criterion(11, "screen regression", 60, |_| {
        let expected: [(&str, Status, Option<&str>); 8] = [
            ("x^3", Status::ConjecturedExceptional, Some("Gold monomial")),
            ("x^7+x^5", Status::NotExceptional, Some("Thm 2")),
            ("x^6+x^3", Status::NotExceptional, Some("Thm 3")),
            ("x^9+x^7", Status::NotExceptional, Some("Thm 11")),
            ("x^9+x^5", Status::NotExceptional, Some("Thm 11")),
            ("x^17+x^5", Status::Inconclusive, None),
            ("x^17+x^10", Status::Inconclusive, None),
            ("x^12+x^5", Status::Informational, Some("degree-12 classification")),
        ];
        let golden: Vec<&str> = GOLDEN.lines().collect();
        let mut bad = Vec::new();
        for (i, (text, status, theorem)) in expected.iter().enumerate() {
            let v = screen_exceptional(&UniPoly::parse(text, k(5)).unwrap());
            let discrepancy = v.trace.iter().any(|e| e.test == "discrepancy");
            if v.to_json() != golden.get(i).copied().unwrap_or_default()
                || v.status != *status
                || v.theorem.as_deref() != *theorem
                || discrepancy != (*text == "x^17+x^10")
            {
                bad.push(*text);
            }
        }
        check(
            bad.is_empty() && golden.len() == expected.len(),
            format!("{} verdicts byte-exact, mismatches {bad:?}", expected.len()),
        )
    });

    run.criterion(12, "field-size threshold", 1, |_| {
        // (10(2d-1))^4 < 6561 * 2^n, recomputed directly
        let min = |d: u128| (1u32..).find(|&n| (10 * (2 * d - 1)).pow(4) < 6561u128 << n).unwrap();
        let mut ok = true;
        let mut notes = Vec::new();
        for (d, want) in [(9u64, 17u32), (13, 20)] {
            let got = theorem1_min_field(d).unwrap();
            ok &= got == want && min(d as u128) == want;
            ok &= theorem1_holds(d, got) && !theorem1_holds(d, got - 1);
            notes.push(format!("d={d} -> {got}"));
        }
        ok &= (9..=200u64).all(|d| theorem1_min_field(d).unwrap() == min(d as u128));
        check(ok, notes.join(", ") + ", boundary n-1 fails")
    });

    // Runs last so it covers every spectrum computed above.
    run.criterion(8, "evenness of every spectrum", 1, |run| {
        let odd: Vec<&str> = run
            .spectra
            .iter()
            .filter(|(_, s)| !s.all_counts_even())
            .map(|(l, _)| l.as_str())
            .collect();
        let naive_even = [(3u32, 4u32), (5, 4), (7, 5), (11, 6)]
            .iter()
            .all(|&(d, n)| naive_ddt(&UniPoly::monomial(k(n), d)).1);
        check(
            odd.is_empty() && naive_even,
            format!("{} spectra, odd counts in {odd:?}", run.spectra.len()),
        )
    });

    println!("{} of 12 criteria failed", run.failed);
    if run.failed > 0 {
        std::process::exit(1);
    }
}
