use std::io::Read;

use serde_json::{json, Value};

use critorbit::arith::{factorize, FactorBudget, Residue};
use critorbit::bounds::{certificate_from_list, maximality_certificate_with, CertificateBudget};
use critorbit::constructor::{build_parameter_with_ceiling, DivisibilitySpec};
use critorbit::density::{density_report, empirical_density_rows};
use critorbit::dynatomic::{disc_feasible, gleason_disc_mod};
use critorbit::orbit::{
    classify_integer_param, cycle_multiplier, is_primitive_divisor, iterate_valuation,
    point_period_type_mod,
};
use critorbit::{
    adjust_power, check_condition_star, check_condition_star_star, correspondence_report,
    count_primitive_primes, discriminant, enumerate_pcf, gleason_degree, gleason_poly,
    hensel_lift, iterate_poly, rho_upper_bound, roots_mod_p, verify_spec, Error, Result,
};

use crate::{Command, Output, Status};

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("payload types serialize infallibly")
}

fn ok(v: Value) -> Result<Output> {
    Ok(Output::Json(Status::Ok, v))
}

fn read_spec(path: &str) -> Result<DivisibilitySpec> {
    let text = if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::InvalidInput(format!("reading spec from stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("reading spec {path}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("malformed spec: {e}")))
}

fn coefficients(p: &critorbit::IntPoly) -> Vec<String> {
    p.coeffs().iter().map(|c| c.to_string()).collect()
}

pub fn run(cmd: Command) -> Result<Output> {
    match cmd {
        Command::Orbit { d, c, p, t, r } => {
            if t == 0 {
                return Err(Error::InvalidInput("t must be at least 1".into()));
            }
            let cr = c.to_residue(&p, t)?;
            let start = Residue::new(&p, t, &r.clone().unwrap_or_default())?;
            let (ty, entry) = point_period_type_mod(d, &cr, &start)?;
            let multiplier = cycle_multiplier(d, &cr, &entry, ty.period);
            let mut out = json!({
                "d": d,
                "c": c.to_string(),
                "p": p.to_string(),
                "t": t,
                "modulus": cr.modulus().to_string(),
                "start": start.value().to_string(),
                "period_type": ty,
                "cycle_entry": entry.value().to_string(),
                "cycle_multiplier": multiplier.value().to_string(),
            });
            if c.is_integer() && r.is_none() {
                out["classification"] = to_json(&classify_integer_param(d, c.numer()));
            }
            ok(out)
        }
        Command::Valuation { d, c, n, p, cap } => {
            let v = iterate_valuation(d, &c, n, &p, cap)?;
            ok(json!({ "d": d, "c": c.to_string(), "n": n, "p": p.to_string(), "valuation": v }))
        }
        Command::Primitive { d, c, n, p } => {
            let (primitive, v) = is_primitive_divisor(d, &c, n, &p)?;
            ok(json!({
                "d": d, "c": c.to_string(), "n": n, "p": p.to_string(),
                "primitive": primitive, "valuation": v,
            }))
        }
        Command::Gleason { dn } => {
            let g = gleason_poly(dn.d, dn.n)?;
            ok(json!({
                "d": dn.d,
                "n": dn.n,
                "degree": gleason_degree(dn.d, dn.n)?,
                "coefficients": coefficients(&g),
                "polynomial": g.to_string(),
            }))
        }
        Command::Disc { dn, p, factor } => {
            let mut out = json!({ "d": dn.d, "n": dn.n });
            if let Some(p) = p {
                out["p"] = json!(p.to_string());
                out["disc_mod_p"] = json!(gleason_disc_mod(dn.d, dn.n, p)?.to_string());
            }
            if p.is_none() || factor {
                if !disc_feasible(dn.d, dn.n) {
                    return Err(Error::SizeGuard {
                        what: format!("exact disc(G_{{{},{}}})", dn.d, dn.n),
                        estimate_bits: gleason_degree(dn.d, dn.n)?,
                        limit_bits: critorbit::dynatomic::MAX_DISC_DEGREE as u64,
                    });
                }
                let disc = discriminant(&gleason_poly(dn.d, dn.n)?)?;
                out["discriminant"] = json!(disc.to_string());
                if factor {
                    out["factorization"] = to_json(&factorize(disc.magnitude(), FactorBudget::default()));
                }
            }
            ok(out)
        }
        Command::Roots { dn, p, iterate } => {
            let poly = if iterate { iterate_poly(dn.d, dn.n)? } else { gleason_poly(dn.d, dn.n)? };
            let roots: Vec<Value> = roots_mod_p(&poly, &p)?
                .into_iter()
                .map(|(r, m)| json!({ "root": r.to_string(), "multiplicity": m }))
                .collect();
            ok(json!({
                "d": dn.d, "n": dn.n, "p": p.to_string(),
                "polynomial": if iterate { "iterate" } else { "gleason" },
                "roots": roots,
            }))
        }
        Command::Lift { dn, p, c0, precision } => {
            ok(to_json(&hensel_lift(dn.d, dn.n, &p, &c0, precision)?))
        }
        Command::Adjust { dn, p, c0, r, precision } => {
            let lift = hensel_lift(dn.d, dn.n, &p, &c0, precision.unwrap_or(r + 2))?;
            let c_r = adjust_power(&lift, r)?;
            ok(json!({
                "d": dn.d, "n": dn.n, "p": p.to_string(), "r": r,
                "c": c_r.to_string(),
                "lift": to_json(&lift),
            }))
        }
        Command::Construct { spec, limit } => {
            let spec = read_spec(&spec)?;
            ok(to_json(&build_parameter_with_ceiling(&spec, limit)?))
        }
        Command::Verify { d, c, spec } => {
            let spec = read_spec(&spec)?;
            let report = verify_spec(d.unwrap_or(spec.d), &c, &spec)?;
            let status = if report.all_ok { Status::Ok } else { Status::VerificationFailed };
            Ok(Output::Json(status, to_json(&report)))
        }
        Command::Pcf { d, p } => ok(enumerate_pcf(d, &p)?.to_json()),
        Command::Condition { d, p, n } => match n {
            Some(n) => ok(to_json(&check_condition_star(d, &p, n)?)),
            None => {
                let check = check_condition_star_star(d, &p)?;
                let mut v = to_json(&check);
                v["failures"] = json!(check.failures());
                ok(v)
            }
        },
        Command::Correspond { d, p, precision } => ok(to_json(&correspondence_report(d, &p, precision)?)),
        Command::Density { dn, limit, csv } => {
            if csv {
                let x = limit.ok_or_else(|| Error::InvalidInput("--csv needs --limit".into()))?;
                let scan = empirical_density_rows(dn.d, dn.n, x, true)?;
                let mut s = String::from("p,has_root\n");
                for (p, h) in scan.rows.unwrap_or_default() {
                    s.push_str(&format!("{p},{}\n", h as u8));
                }
                return Ok(Output::Text(s));
            }
            let report = density_report(dn.d, dn.n, limit)?;
            let mut v = to_json(&report);
            v["lower_bound"] = json!(report.lower_bound.to_string());
            if let Some(e) = &report.error_bound_vs_limit {
                v["error_bound_vs_limit"] = json!(e.to_string());
            }
            ok(v)
        }
        Command::Bound { dn, c, budget } => {
            let fb = FactorBudget {
                rho_iterations: budget,
                ..FactorBudget::default()
            };
            let count = count_primitive_primes(dn.d, &c, dn.n, fb)?;
            let bound = rho_upper_bound(dn.d, dn.n, &c)?;
            let within = (count.rho as f64) <= bound.value;
            let out = json!({
                "d": dn.d, "n": dn.n, "c": c.to_string(),
                "count": to_json(&count),
                "bound": to_json(&bound),
                "within_bound": within,
            });
            if within {
                ok(out)
            } else {
                Ok(Output::Json(Status::VerificationFailed, out))
            }
        }
        Command::Rho { dn, c } => {
            let b = rho_upper_bound(dn.d, dn.n, &c)?;
            ok(json!({ "d": dn.d, "n": dn.n, "c": c.to_string(), "height": critorbit::height(&c).to_string(), "bound": to_json(&b) }))
        }
        Command::Certify { d, c, m, primes, budget } => {
            let cert = if primes.is_empty() {
                let m = m.ok_or_else(|| Error::InvalidInput("certify needs --m or --primes".into()))?;
                let b = CertificateBudget {
                    scan_primes: budget,
                    ..CertificateBudget::default()
                };
                maximality_certificate_with(d, &c, m, &b)?
            } else {
                certificate_from_list(d, &c, &primes)?
            };
            let complete = cert.gaps.is_empty();
            let mut v = to_json(&cert);
            if let Some(o) = &cert.claimed_order {
                v["claimed_order_display"] = json!(o.to_string());
            }
            Ok(Output::Json(
                if complete { Status::Ok } else { Status::VerificationFailed },
                v,
            ))
        }
    }
}
