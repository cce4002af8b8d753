//! Acceptance suite: one line per criterion, nonzero exit on any failure
//! not listed in `KNOWN_FAILURES`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use pdo_core::congruence::{self, CongruenceReport, CongruenceSpec, Window};
use pdo_core::etaq::{self, pdo_bruteforce, pdo_series, EtaQuotientSpec};
use pdo_core::padic::{self, check_z_profile, d_min, nu2, tau, Valuation};
use pdo_core::xipoly::{
    self, gamma6_poly, lambda_poly, phi_direct, phi_poly, poly_to_series, zeta, XiPoly,
};
use pdo_core::Series;

/// Sub-checks that cannot pass. PDO(8) = 22 and PDO(2) = 2, so the main
/// family at k = 0 fails mod 8 at n = 1.
const KNOWN_FAILURES: &[&str] = &["main k=0 n<500 mod 8"];

struct Check {
    label: String,
    ok: bool,
    detail: String,
}

fn check(label: impl Into<String>, ok: bool) -> Check {
    Check {
        label: label.into(),
        ok,
        detail: String::new(),
    }
}

fn p(terms: &[(u32, i64)]) -> XiPoly {
    XiPoly::from_terms(terms.iter().copied())
}

fn expand(spec: &EtaQuotientSpec, order: usize) -> Series {
    etaq::expand(spec, order)
}

fn identity_suite() -> Vec<Check> {
    const ORDER: usize = 300;
    let kappa = EtaQuotientSpec::kappa();
    let xi = EtaQuotientSpec::xi();
    let cases = [
        ("U(kappa)", kappa.clone(), p(&[(3, 5), (4, -20), (5, 16)])),
        ("U(xi)", xi.clone(), p(&[(1, 5), (2, -4)])),
        (
            "U(kappa^2)",
            kappa.pow(2),
            p(&[
                (5, -1),
                (6, 50),
                (7, -400),
                (8, 1120),
                (9, -1280),
                (10, 512),
            ]),
        ),
        (
            "U(kappa xi)",
            kappa.combine(&xi),
            p(&[(3, 3), (4, -18), (5, 16)]),
        ),
        (
            "U(xi^2)",
            xi.pow(2),
            p(&[(1, -9), (2, 58), (3, -80), (4, 32)]),
        ),
        (
            "U(gamma(q^2) delta^2)",
            EtaQuotientSpec::gamma()
                .dilate(2)
                .combine(&EtaQuotientSpec::delta().pow(2)),
            p(&[(2, 3), (3, -2)]),
        ),
    ];
    let mut checks: Vec<Check> = cases
        .into_iter()
        .map(|(label, spec, poly)| {
            let lhs = expand(&spec, 2 * ORDER).u2();
            check(label, lhs == poly_to_series(&poly, ORDER))
        })
        .collect();
    let g6 = p(&[
        (10, 59049),
        (11, -262440),
        (12, 466560),
        (13, -414720),
        (14, 184320),
        (15, -32768),
    ]);
    checks.push(check("gamma6 poly", gamma6_poly() == g6));
    checks.push(check(
        "gamma^6 series",
        expand(&EtaQuotientSpec::gamma().pow(6), ORDER) == poly_to_series(&g6, ORDER),
    ));
    checks
}

fn zeta_cross_validation() -> Vec<Check> {
    let mut checks = Vec::new();
    let mut bad = Vec::new();
    for i in 0..=6u32 {
        for j in 0..=6u32 {
            let spec = EtaQuotientSpec::kappa()
                .pow(i as i64)
                .combine(&EtaQuotientSpec::xi().pow(j as i64));
            if expand(&spec, 300).u2() != poly_to_series(&zeta(i, j), 150) {
                bad.push(format!("({i},{j})"));
            }
        }
    }
    checks.push(Check {
        label: "zeta(i,j) vs U(kappa^i xi^j), i,j<=6".into(),
        ok: bad.is_empty(),
        detail: bad.join(" "),
    });
    let examples = [
        ((1, 2), p(&[(4, -15), (5, 16)])),
        ((1, 3), p(&[(4, -27), (5, 36), (6, -8)])),
        ((2, 4), p(&[(7, -81), (8, 594), (9, -1024), (10, 512)])),
        ((2, 5), p(&[(8, 405), (9, -900), (10, 496)])),
        (
            (2, 6),
            p(&[(8, 729), (9, -1944), (10, 1728), (11, -640), (12, 128)]),
        ),
    ];
    for ((i, j), poly) in examples {
        checks.push(check(format!("zeta({i},{j}) printed"), zeta(i, j) == poly));
    }
    checks
}

fn lambda5_printed() -> XiPoly {
    p(&[
        (14, 34543665),
        (15, -400588416),
        (16, 2073171024),
        (17, -6214952448),
        (18, 11906611200),
        (19, -15261990912),
        (20, 13313703936),
        (21, -7841251328),
        (22, 2994733056),
        (23, -671088640),
        (24, 67108864),
    ])
}

fn lambda_tower() -> Vec<Check> {
    let printed = [
        (2, p(&[(2, 3), (3, -2)])),
        (3, p(&[(4, 9), (5, -24), (6, 16)])),
        (
            4,
            p(&[
                (7, -729),
                (8, 7290),
                (9, -18720),
                (10, 20352),
                (11, -10240),
                (12, 2048),
            ]),
        ),
        (5, lambda5_printed()),
    ];
    let mut checks: Vec<Check> = printed
        .into_iter()
        .map(|(k, poly)| {
            check(
                format!("Lambda_{k} printed"),
                lambda_poly(k).is_ok_and(|l| l == poly),
            )
        })
        .collect();
    const ORDER: usize = 150;
    let table = pdo_series(16 * ORDER);
    let gamma = etaq::gamma_series(ORDER);
    for k in 2..=4u32 {
        let lhs = gamma
            .pow(1 << (k - 2))
            .expect("gamma is a unit")
            .mul(&table.slice_series(1 << k).truncate(ORDER));
        let rhs = poly_to_series(&lambda_poly(k).unwrap(), ORDER);
        checks.push(check(
            format!("gamma^(2^{}) sum PDO(2^{k} n) q^n", k - 2),
            lhs == rhs,
        ));
    }
    checks
}

fn phi_tower() -> Vec<Check> {
    let phi3 = p(&[
        (14, 34012224),
        (15, -396809280),
        (16, 2061728640),
        (17, -6195823488),
        (18, 11887534080),
        (19, -15250636800),
        (20, 13309968384),
        (21, -7840727040),
        (22, 2994733056),
        (23, -671088640),
        (24, 67108864),
    ]);
    let got3 = phi_poly(3).unwrap();
    let phi5 = phi_poly(5).unwrap();
    vec![
        check("Phi_3 printed", got3 == phi3),
        check("Phi_3 has 11 terms", got3.term_count() == 11),
        check(
            "Phi_4 recursive == direct",
            phi_poly(4).unwrap() == phi_direct(4).unwrap(),
        ),
        check("Phi_5 recursive == direct", phi5 == phi_direct(5).unwrap()),
        Check {
            label: "Phi_5 has 43 terms".into(),
            ok: phi5.term_count() == 43,
            detail: format!("{} terms", phi5.term_count()),
        },
    ]
}

fn minimal_degrees() -> Vec<Check> {
    let mut bad = Vec::new();
    for i in 0..=12u32 {
        for j in 0..=12u32 {
            let z = zeta(i, j);
            let d = z.min_degree().map(u64::from);
            let lead_odd = d.is_some_and(|d| z.coeff(d as u32).is_odd());
            if d != Some(d_min(i as u64, j as u64)) || !lead_odd {
                bad.push(format!("({i},{j})"));
            }
        }
    }
    let mut checks = vec![Check {
        label: "min degree of zeta(i,j) = d_min, odd leading, i,j<=12".into(),
        ok: bad.is_empty(),
        detail: bad.join(" "),
    }];
    let taus = [(3, 14), (4, 27), (5, 54)];
    for (k, expected) in taus {
        let t = tau(k).unwrap();
        let phi = phi_poly(k).unwrap();
        checks.push(check(
            format!("tau_{k} = {expected}, F_{k}(m) = 0 below, F_{k}(tau) != 0"),
            t == expected && phi.min_degree() == Some(t as u32),
        ));
    }
    let parity = (2..=8u32)
        .all(|big_k| tau(2 * big_k - 1).unwrap() % 4 == 2 && tau(2 * big_k).unwrap() % 4 == 3);
    checks.push(check(
        "tau(2K-1) = 2, tau(2K) = 3 mod 4 for 2<=K<=8",
        parity,
    ));
    checks
}

fn valuation_tables() -> Vec<Check> {
    let f = |v: u64| Valuation::Finite(v);
    let mut checks = Vec::new();
    for (k, base, head, c) in [(3u32, 14u32, [6, 6, 7], 4u64), (5, 54, [7, 7, 9], 8)] {
        let phi = phi_poly(k).unwrap();
        let prof = padic::profile(&phi, base, padic::default_window(&phi, base));
        let head_ok = prof.vals[..3] == [f(head[0]), f(head[1]), f(head[2])];
        let tail_ok = prof
            .vals
            .iter()
            .enumerate()
            .skip(3)
            .all(|(m, v)| v.at_least(m as u64 + c));
        let full = padic::check_f_profile(k).unwrap();
        let full_tail = full
            .vals
            .iter()
            .enumerate()
            .skip(3)
            .all(|(m, v)| v.at_least(m as u64 + c));
        checks.push(Check {
            label: format!("profile(Phi_{k}, {base}) = {head:?}, then >= M+{c}"),
            ok: head_ok && tail_ok && full_tail && full.verdict.passed(),
            detail: format!(
                "{:?}",
                prof.vals.iter().map(|v| v.to_string()).collect::<Vec<_>>()
            ),
        });
    }
    let mut bad = Vec::new();
    let pairs = (0..=13u32).flat_map(|i| [(i, 0), (i, 1)]).chain(
        [4u32, 8, 16]
            .into_iter()
            .flat_map(|i| (0..=10u32).map(move |j| (i, j))),
    );
    for (i, j) in pairs {
        match check_z_profile(i, j) {
            Ok(r) if r.verdict.passed() => {}
            Ok(r) => bad.push(format!("({i},{j}): {}", r.failures.join("; "))),
            Err(e) => bad.push(format!("({i},{j}): {e}")),
        }
    }
    checks.push(Check {
        label: "check_z_profile i<=13 j<=1, i in {4,8,16} j<=10".into(),
        ok: bad.is_empty(),
        detail: bad.join(" | "),
    });
    checks
}

fn report_check(label: String, r: &CongruenceReport) -> Check {
    Check {
        label,
        ok: r.passed(),
        detail: r
            .counterexample
            .as_ref()
            .map(|c| format!("n={}: {} vs {}", c.n, c.lhs, c.rhs))
            .unwrap_or_else(|| {
                format!("{} checked, order {}", r.checked_count, r.truncation_order)
            }),
    }
}

fn congruence_sweeps() -> Vec<Check> {
    let specs: Vec<(String, CongruenceSpec)> = vec![
        (
            "main k=0 n<500 mod 8".into(),
            CongruenceSpec::internal(8, 2, 8, Window::new(0, 500)).unwrap(),
        ),
        (
            "main k=1 n<60 mod 32".into(),
            CongruenceSpec::internal(32, 8, 32, Window::new(0, 60)).unwrap(),
        ),
        (
            "PDO(4n) = PDO(n) mod 4, n<500".into(),
            CongruenceSpec::internal(4, 1, 4, Window::new(0, 500)).unwrap(),
        ),
        (
            "PDO(16n) = PDO(4n) mod 8, n<500".into(),
            CongruenceSpec::internal(16, 4, 8, Window::new(0, 500)).unwrap(),
        ),
        (
            "PDO(32n) = PDO(8n) mod 64, n<40".into(),
            CongruenceSpec::internal(32, 8, 64, Window::new(0, 40)).unwrap(),
        ),
        (
            "PDO(128n) = PDO(32n) mod 128, n<40".into(),
            CongruenceSpec::internal(128, 32, 128, Window::new(0, 40)).unwrap(),
        ),
    ];
    let ramanujan_order = (1usize << 3) * (8 * 99 + 7) + 1;
    let order = specs
        .iter()
        .map(|(_, s)| s.required_order().unwrap())
        .max()
        .unwrap()
        .max(ramanujan_order);
    let table = pdo_series(order);
    let mut checks: Vec<Check> = specs
        .into_iter()
        .map(|(label, spec)| report_check(label, &congruence::verify(&spec, &table).unwrap()))
        .collect();
    let reports = congruence::verify_ramanujan(3, 100, &table).unwrap();
    for (idx, r) in reports.iter().enumerate() {
        let alpha = idx / 2;
        let label = if idx % 2 == 0 {
            format!("PDO(2^{alpha}(4n+3)) = 0 mod 4, n<100")
        } else {
            format!("PDO(2^{alpha}(8n+7)) = 0 mod 8, n<100")
        };
        checks.push(report_check(label, r));
    }
    checks
}

fn oracle_equivalence() -> Vec<Check> {
    let table = pdo_series(201);
    let bad: Vec<u64> = (0..=40u64)
        .filter(|&n| pdo_bruteforce(n).ok().as_ref() != table.get(n as usize))
        .collect();
    let delta = etaq::delta_series(100);
    vec![
        Check {
            label: "pdo_series = brute force, n<=40".into(),
            ok: bad.is_empty(),
            detail: format!("{bad:?}"),
        },
        check(
            "sum PDO(2n) q^n = delta^2 to order 100",
            table.slice_series(2).truncate(100) == delta.square(),
        ),
    ]
}

fn negative_control() -> Vec<Check> {
    let table = pdo_series(64);
    let spec = CongruenceSpec::internal(4, 1, 8, Window::new(0, 10)).unwrap();
    let r = congruence::verify(&spec, &table).unwrap();
    let expected = r
        .counterexample
        .as_ref()
        .is_some_and(|c| c.n == 1 && c.lhs == BigInt::from(5) && c.rhs == BigInt::from(1));
    let diff_ok = r.counterexample.as_ref().is_some_and(|c| {
        nu2(&(&c.lhs - &c.rhs)) == Valuation::Finite(2) && !(&c.lhs - &c.rhs).is_zero()
    });
    vec![check(
        "(4,1) mod 8 fails at n=1 with 5 vs 1",
        !r.passed() && expected && diff_ok,
    )]
}

type Criterion = (u32, &'static str, u64, fn() -> Vec<Check>);

fn main() -> ExitCode {
    // `cargo test` forwards harness flags such as --list; they carry no meaning here.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let criteria: [Criterion; 9] = [
        (1, "identity suite", 10, identity_suite),
        (2, "zeta cross-validation", 60, zeta_cross_validation),
        (3, "Lambda tower", 120, lambda_tower),
        (4, "Phi tower", 300, phi_tower),
        (5, "minimal degrees and parity", 120, minimal_degrees),
        (6, "valuation tables", 300, valuation_tables),
        (7, "congruence sweeps", 600, congruence_sweeps),
        (8, "oracle equivalence", 30, oracle_equivalence),
        (9, "negative control", 30, negative_control),
    ];
    // keep the lazily built polynomial tower out of individual timings
    let _ = xipoly::lambda_poly(2);

    let mut unexpected = 0;
    let mut known = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let checks = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let failing: Vec<&Check> = checks.iter().filter(|c| !c.ok).collect();
        let ok = failing.is_empty() && in_time;
        println!(
            "criterion {id} {}: {name} ({} checks, {:.2}s of {limit}s)",
            if ok { "PASS" } else { "FAIL" },
            checks.len(),
            elapsed.as_secs_f64()
        );
        if !in_time {
            println!("    over time limit");
            unexpected += 1;
        }
        for c in &failing {
            let is_known = KNOWN_FAILURES.contains(&c.label.as_str());
            println!(
                "    {}: {}{}",
                c.label,
                if c.detail.is_empty() {
                    "failed"
                } else {
                    &c.detail
                },
                if is_known { " [known]" } else { "" }
            );
            if is_known {
                known += 1;
            } else {
                unexpected += 1;
            }
        }
    }
    println!("acceptance: {unexpected} unexpected failure(s), {known} known failure(s)");
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
