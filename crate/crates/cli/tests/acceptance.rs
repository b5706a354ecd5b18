//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use critorbit::arith::{divisors, factorize, primes_up_to, FactorBudget, Residue};
use critorbit::bounds::certificate_from_list;
use critorbit::orbit::{
    cycle_multiplier, exact_iterate, exact_iterates_guarded, is_primitive_divisor,
    iterate_valuation, orbit_with_derivative, period_type_mod, point_period_type_mod,
    OrbitKind, PeriodType, RationalParam, Valuation,
};
use critorbit::{
    adjust_power, build_parameter, check_condition_star_star, classify_integer_param,
    count_primitive_primes, discriminant, empirical_density, enumerate_pcf, fpp_symmetric,
    gleason_degree, gleason_poly, hensel_lift, iterate_poly, rho_upper_bound, verify_spec,
    DivisibilitySpec, Error, IntPoly,
};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BIG_C: &str = "24351981847787737533052341852056330671894786203451391";
const CHAIN_C: &str = "1168184310110489945509811544546782641527527693907326";
const CHAIN_PRIMES: [u64; 29] = [
    4012568011, 3, 5, 13, 11, 29, 19, 31, 43, 101, 59, 47, 67, 61, 97, 89, 83, 107, 113, 149,
    137, 127, 173, 191, 197, 181, 223, 157, 229,
];
const WIDE_C: &str = "13443222075617361812453920142397689133847531746492684885069771";
const WIDE_DIVISOR: &str = "70321927694409533965768410131069970323274232658951676172460495";

type Check = std::result::Result<String, String>;

fn bu(x: u64) -> BigUint {
    BigUint::from(x)
}
fn bi(x: i64) -> BigInt {
    BigInt::from(x)
}
fn big(s: &str) -> BigInt {
    s.parse().unwrap()
}
fn ratio(a: i64, b: i64) -> BigRational {
    BigRational::new(bi(a), bi(b))
}

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn six_constraint_spec() -> DivisibilitySpec {
    DivisibilitySpec::pinned(
        2,
        &[(2, &[(2, 29), (3, 17), (7, 5)]), (3, &[(5, 8), (19, 3)]), (4, &[(13, 21)])],
    )
}

fn cli(args: &[&str]) -> (i32, serde_json::Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_critorbit"))
        .args(args)
        .output()
        .expect("binary runs");
    let v = serde_json::from_slice(&out.stdout).unwrap_or(serde_json::Value::Null);
    (out.status.code().unwrap_or(-1), v)
}

fn gleason_golden() -> Check {
    let g = gleason_poly(2, 3).map_err(|e| e.to_string())?;
    ensure(g == IntPoly::from_i64s(&[1, 1, 2, 1]), format!("G_(2,3) = {g}"))?;
    let disc = discriminant(&g).map_err(|e| e.to_string())?;
    ensure(disc == bi(-23), format!("disc = {disc}"))?;
    ensure(disc.is_multiple_of(&bi(23)), "23 does not divide disc")?;
    for d in 2u32..=6 {
        let mut coeffs = vec![0i64; d as usize];
        coeffs[0] = 1;
        coeffs[d as usize - 1] += 1;
        let g2 = gleason_poly(d, 2).map_err(|e| e.to_string())?;
        ensure(g2 == IntPoly::from_i64s(&coeffs), format!("G_({d},2) = {g2}"))?;
    }
    let d33 = gleason_degree(3, 3).map_err(|e| e.to_string())?;
    let g33 = gleason_poly(3, 3).map_err(|e| e.to_string())?;
    ensure(d33 == 8 && g33.degree() == Some(8), format!("D_(3,3) = {d33}"))?;
    Ok(format!("G_(2,3) = {g}, disc = {disc}, D_(3,3) = {d33}"))
}

fn lift_reproduction() -> Check {
    let l = hensel_lift(2, 3, &bu(5), &bi(1), 3).map_err(|e| e.to_string())?;
    ensure(l.value == bu(16) && l.modulus == bu(125), format!("{} mod {}", l.value, l.modulus))?;
    let (code, v) = cli(&["lift", "--d", "2", "--n", "3", "--p", "5", "--c0", "1", "--precision", "3"]);
    ensure(code == 0 && v["payload"]["value"] == "16", format!("cli exit {code}: {v}"))?;
    Ok("c = 16 mod 125 (library and CLI)".into())
}

fn lift_obstruction() -> Check {
    match hensel_lift(2, 5, &bu(13), &bi(3), 4) {
        Err(Error::HenselHypothesis { v_f: 1, v_df: Some(1) }) => {}
        other => return Err(format!("expected Hensel failure with v(F) = v(F') = 1, got {other:?}")),
    }
    let vf = iterate_valuation(2, &RationalParam::integer(bi(3)), 5, &bu(13), 64).map_err(|e| e.to_string())?;
    ensure(vf == Valuation::Exact(1), format!("v(F) = {vf:?}"))?;
    for k in 0..13 {
        let c = Residue::new_unchecked(&bu(13), 2, &bi(3 + 13 * k));
        let (f, _) = orbit_with_derivative(2, &c, 5);
        ensure(!f.is_zero(), format!("f^5 vanishes mod 169 at shift {k}"))?;
    }
    Ok("v(F) = v(F') = 1; f^5(0) nonzero mod 13^2 on all 13 shifts".into())
}

fn mega_example_verification() -> Check {
    let spec = six_constraint_spec();
    let report = verify_spec(2, &big(BIG_C), &spec).map_err(|e| e.to_string())?;
    let bad: Vec<String> = report
        .checks
        .iter()
        .filter(|c| !c.ok)
        .map(|c| format!("{}^{} at n={}: v={:?} primitive={}", c.p, c.k, c.n, c.valuation, c.primitive))
        .collect();
    ensure(report.all_ok, bad.join("; "))?;
    let path = std::env::temp_dir().join(format!("six-{}.json", std::process::id()));
    std::fs::write(&path, serde_json::to_string(&spec).unwrap()).map_err(|e| e.to_string())?;
    let (code, v) = cli(&["verify", "--d", "2", "--c", BIG_C, "--spec", path.to_str().unwrap()]);
    let _ = std::fs::remove_file(&path);
    ensure(code == 0 && v["status"] == "ok", format!("cli exit {code}"))?;
    Ok("all six exact powers primitive (library and CLI)".into())
}

fn constructor_round_trip() -> Check {
    let spec = six_constraint_spec();
    let report = build_parameter(&spec).map_err(|e| e.to_string())?;
    let c = BigInt::from(report.c.clone());
    let check = verify_spec(2, &c, &spec).map_err(|e| e.to_string())?;
    ensure(check.all_ok, format!("constructed c = {c} fails verification"))?;
    Ok(format!("c = {c} ({} digits)", c.to_string().len()))
}

fn pcf_census() -> Check {
    let census = enumerate_pcf(3, &bu(5)).map_err(|e| e.to_string())?;
    let periodic: Vec<(u64, PeriodType)> = census.periodic().collect();
    let pt = |n| PeriodType { tail: 0, period: n };
    let expected = vec![(0, pt(1)), (1, pt(4)), (2, pt(2)), (3, pt(2)), (4, pt(4))];
    ensure(periodic == expected, format!("{periodic:?}"))?;
    Ok("5 periodic parameters: (0,1) at 0, (0,4) at 1,4, (0,2) at 2,3".into())
}

fn star_star_census() -> Check {
    let primes = primes_up_to(229);
    let failures: Vec<u64> = primes
        .iter()
        .copied()
        .filter(|&p| !check_condition_star_star(2, &bu(p)).map(|s| s.holds).unwrap_or(false))
        .collect();
    let holding = primes.len() - failures.len();
    ensure(
        holding == 47 && failures.contains(&13),
        format!("{holding} of 50 primes satisfy (**); failures {failures:?}; expected 47 with 13 among 3 failures"),
    )?;
    Ok(format!("47 of 50; failures {failures:?}"))
}

fn density_checks() -> Check {
    let d3 = gleason_degree(2, 3).map_err(|e| e.to_string())?;
    ensure(fpp_symmetric(d3).map_err(|e| e.to_string())? == ratio(2, 3), "fpp(D_(2,3)) != 2/3")?;
    let d4 = gleason_degree(2, 4).map_err(|e| e.to_string())?;
    ensure(fpp_symmetric(d4).map_err(|e| e.to_string())? == ratio(91, 144), "fpp(D_(2,4)) != 91/144")?;
    let e3 = empirical_density(2, 3, 100_000).map_err(|e| e.to_string())?;
    let e4 = empirical_density(2, 4, 100_000).map_err(|e| e.to_string())?;
    ensure((e3.fraction - 2.0 / 3.0).abs() <= 0.05, format!("n=3 fraction {}", e3.fraction))?;
    ensure((e4.fraction - 91.0 / 144.0).abs() <= 0.05, format!("n=4 fraction {}", e4.fraction))?;
    Ok(format!("n=3: {:.4} vs 0.6667; n=4: {:.4} vs 0.6319", e3.fraction, e4.fraction))
}

fn chain_certificate() -> Check {
    let primes: Vec<BigUint> = CHAIN_PRIMES.iter().map(|&p| bu(p)).collect();
    let c = big(CHAIN_C);
    let cert = certificate_from_list(2, &c, &primes).map_err(|e| e.to_string())?;
    // where the critical orbit mod p actually returns to 0, if anywhere
    let first_zero = |p: &BigUint| {
        let (ty, _) = period_type_mod(2, &Residue::new_unchecked(p, 1, &c)).unwrap();
        if ty.is_periodic() {
            format!("p | f^j(0) first at j={}", ty.period)
        } else {
            "p divides no iterate".to_string()
        }
    };
    let bad: Vec<String> = cert
        .entries
        .iter()
        .flatten()
        .filter(|e| !(e.checks.primitive && e.v == 1))
        .map(|e| format!("i={} p={}: primitive={} v={} ({})", e.n, e.p, e.checks.primitive, e.v, first_zero(&e.p)))
        .collect();
    ensure(bad.is_empty(), bad.join("; "))?;
    Ok("each p_i exactly divides f^i(0) and is primitive".into())
}

fn wide_factor_example() -> Check {
    let c = big(WIDE_C);
    let divisor: BigUint = WIDE_DIVISOR.parse().unwrap();
    let fact = factorize(&divisor, FactorBudget { trial_limit: 1_000_000, rho_iterations: 0 });
    ensure(fact.complete, format!("trial division leaves cofactor {}", fact.cofactor))?;
    ensure(fact.factors.iter().all(|f| f.exponent == 1), "divisor is not squarefree")?;
    ensure(fact.factors.len() == 33, format!("{} prime factors", fact.factors.len()))?;
    let a3 = exact_iterate(2, &RationalParam::integer(c.clone()), 3)
        .map_err(|e| e.to_string())?
        .numerator;
    ensure(a3.is_multiple_of(&BigInt::from(divisor.clone())), "divisor does not divide a_3")?;
    let param = RationalParam::integer(c);
    for f in &fact.factors {
        let (prim, _) = is_primitive_divisor(2, &param, 3, &f.prime).map_err(|e| e.to_string())?;
        ensure(prim, format!("{} is not primitive", f.prime))?;
    }
    Ok("33 distinct primes, all primitive, product divides a_3".into())
}

fn moebius_identity() -> std::result::Result<(), String> {
    for d in 2u32..=3 {
        for n in 1u64..=8 {
            let product = divisors(n)
                .into_iter()
                .try_fold(IntPoly::one(), |acc, t| gleason_poly(d, t).map(|g| acc.mul(&g)))
                .map_err(|e| e.to_string())?;
            ensure(product == iterate_poly(d, n).map_err(|e| e.to_string())?, format!("d={d} n={n}"))?;
        }
    }
    Ok(())
}

fn primitivity_periodicity() -> std::result::Result<(), String> {
    for c in -50i64..=50 {
        let param = RationalParam::integer(bi(c));
        for p in primes_up_to(49) {
            for n in 1u64..10 {
                let prim = match is_primitive_divisor(2, &param, n, &bu(p)) {
                    Ok(x) => Some(x),
                    Err(Error::ZeroIterate { .. }) => None,
                    Err(e) => return Err(e.to_string()),
                };
                for t in 1u32..=3 {
                    let lhs = match prim {
                        Some((pr, v)) => pr && v >= t,
                        None => (c == 0 && n == 1) || (c == -1 && n == 2),
                    };
                    let r = Residue::new_unchecked(&bu(p), t, &bi(c));
                    let (ty, _) = period_type_mod(2, &r).map_err(|e| e.to_string())?;
                    ensure(lhs == (ty.tail == 0 && ty.period == n), format!("c={c} p={p} n={n} t={t}"))?;
                }
            }
        }
    }
    Ok(())
}

fn orbit_differences() -> std::result::Result<(), String> {
    let cap = 40;
    for d in 2u32..=3 {
        for c in -40i64..=40 {
            for p in primes_up_to(50).into_iter().filter(|&p| p > d as u64) {
                let (ty, _) = period_type_mod(d, &Residue::new_unchecked(&bu(p), 1, &bi(c)))
                    .map_err(|e| e.to_string())?;
                if !ty.is_periodic() {
                    continue;
                }
                let n = ty.period as usize;
                let cr = Residue::new_unchecked(&bu(p), cap, &bi(c));
                let mut xs = vec![Residue::zero(&bu(p), cap)];
                for _ in 0..4 * n {
                    let next = xs.last().unwrap().pow(d as u64).add(&cr);
                    xs.push(next);
                }
                for m in 1..=3 {
                    let vals: BTreeSet<u32> = (1..=n)
                        .map(|a| xs[m * n + a].sub(&xs[(m - 1) * n + a]).valuation().unwrap_or(cap))
                        .collect();
                    ensure(vals.len() == 1, format!("d={d} c={c} p={p} m={m}: {vals:?}"))?;
                }
            }
        }
    }
    for c in -20i64..=20 {
        let all = exact_iterates_guarded(2, &RationalParam::integer(bi(c)), 5, 1 << 20)
            .map_err(|e| e.to_string())?;
        let a = |k: usize| if k == 0 { bi(0) } else { all[k - 1].numerator.clone() };
        for n in 1..=4usize {
            for m in 1..=4 / n {
                let lhs = a(m * n) - a((m - 1) * n);
                let rhs = a(m * n + 1) - a((m - 1) * n + 1);
                let ok = if lhs == bi(0) { rhs == bi(0) } else { rhs.is_multiple_of(&lhs) };
                ensure(ok, format!("divisibility c={c} n={n} m={m}"))?;
            }
        }
    }
    Ok(())
}

fn order_mod(x: u64, p: u64) -> u64 {
    let (mut y, mut k) = (x % p, 1);
    while y != 1 {
        y = y * (x % p) % p;
        k += 1;
    }
    k
}

fn tails_and_cycles() -> std::result::Result<(), String> {
    let mut samples = 0;
    for d in 2u32..=3 {
        for p in primes_up_to(30).into_iter().filter(|&p| p % d as u64 != 0) {
            for c in -10i64..=10 {
                for r in 0..p as i64 {
                    let c1 = Residue::new_unchecked(&bu(p), 1, &bi(c));
                    let r1 = Residue::new_unchecked(&bu(p), 1, &bi(r));
                    let (base, entry) = point_period_type_mod(d, &c1, &r1).map_err(|e| e.to_string())?;
                    let lambda = cycle_multiplier(d, &c1, &entry, base.period);
                    if base.tail == 0 || lambda.is_zero() {
                        continue;
                    }
                    let s = order_mod(lambda.value().try_into().unwrap(), p);
                    for t in 2u32..=4 {
                        if p.pow(t) > 200_000 {
                            break;
                        }
                        let ct = Residue::new_unchecked(&bu(p), t, &bi(c));
                        let rt = Residue::new_unchecked(&bu(p), t, &bi(r));
                        let (lifted, _) = point_period_type_mod(d, &ct, &rt).map_err(|e| e.to_string())?;
                        ensure(lifted.tail == base.tail, format!("tail moved: d={d} p={p} c={c} r={r} t={t}"))?;
                        let (n, l) = (base.period, lifted.period);
                        let mut q = n * s;
                        while q < l {
                            q *= p;
                        }
                        ensure(l == n || l == n * s || q == l, format!("cycle length {l}: n={n} s={s} p={p}"))?;
                        samples += 1;
                    }
                }
            }
        }
    }
    ensure(samples > 1000, format!("only {samples} samples"))
}

fn rho_soundness() -> std::result::Result<(), String> {
    for d in 2u32..=3 {
        for c in -30i64..=30 {
            if classify_integer_param(d, &bi(c)).kind == OrbitKind::PcfInteger {
                continue;
            }
            let param = RationalParam::integer(bi(c));
            for n in 1u64..=4 {
                let count = count_primitive_primes(d, &param, n, FactorBudget::default()).map_err(|e| e.to_string())?;
                let bound = rho_upper_bound(d, n, &param).map_err(|e| e.to_string())?;
                ensure((count.rho as f64) <= bound.value + 1e-9, format!("d={d} c={c} n={n}"))?;
            }
        }
    }
    Ok(())
}

fn adjust_power_random() -> std::result::Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let primes = primes_up_to(100);
    let mut done = 0;
    let mut attempts = 0;
    while done < 100 {
        attempts += 1;
        ensure(attempts < 100_000, "could not draw 100 liftable cases")?;
        let d = rng.gen_range(2u32..=3);
        let n = rng.gen_range(1u64..=5);
        let p = primes[rng.gen_range(0..primes.len())];
        let r = rng.gen_range(1u32..=8);
        let c0 = rng.gen_range(0..p);
        let lift = match hensel_lift(d, n, &bu(p), &bi(c0 as i64), r + 2) {
            Ok(l) if l.v_df == 0 && l.shift_valuation.is_some() => l,
            _ => continue,
        };
        let c_r = adjust_power(&lift, r).map_err(|e| format!("d={d} n={n} p={p} c0={c0} r={r}: {e}"))?;
        let got = is_primitive_divisor(d, &RationalParam::integer(BigInt::from(c_r)), n, &bu(p))
            .map_err(|e| e.to_string())?;
        ensure(got == (true, r), format!("d={d} n={n} p={p} c0={c0} r={r}: {got:?}"))?;
        done += 1;
    }
    Ok(())
}

fn property_suites() -> Check {
    let suites: [(&str, fn() -> std::result::Result<(), String>); 6] = [
        ("moebius", moebius_identity),
        ("primitive-periodic", primitivity_periodicity),
        ("orbit-differences", orbit_differences),
        ("tails-cycles", tails_and_cycles),
        ("rho-bound", rho_soundness),
        ("adjust-power", adjust_power_random),
    ];
    for (name, f) in suites {
        f().map_err(|e| format!("{name}: {e}"))?;
    }
    Ok("moebius, primitive-periodic, orbit-differences, tails-cycles, rho-bound, adjust-power".into())
}

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Check); 11] = [
        (1, "gleason golden values", Duration::from_secs(1), gleason_golden),
        (2, "lift reproduction", Duration::from_secs(1), lift_reproduction),
        (3, "lift obstruction at 13", Duration::from_secs(1), lift_obstruction),
        (4, "52-digit parameter verification", Duration::from_secs(5), mega_example_verification),
        (5, "constructor round trip", Duration::from_secs(30), constructor_round_trip),
        (6, "cubic census mod 5", Duration::from_secs(1), pcf_census),
        (7, "condition (**) over first 50 primes", Duration::from_secs(60), star_star_census),
        (8, "density formula and scans", Duration::from_secs(120), density_checks),
        (9, "29-iterate prime chain", Duration::from_secs(10), chain_certificate),
        (10, "33-factor divisor", Duration::from_secs(60), wide_factor_example),
        (11, "property suites", Duration::from_secs(300), property_suites),
    ];
    let mut failed = 0;
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (verdict, detail) = match outcome {
            Ok(msg) if elapsed <= limit => ("PASS", msg),
            Ok(msg) => ("FAIL", format!("{msg}; took {elapsed:.2?}, limit {limit:?}")),
            Err(msg) => ("FAIL", msg),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!("{verdict} [{id:>2}] {name} ({elapsed:.2?}): {detail}");
    }
    println!("acceptance: {} passed, {failed} failed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
