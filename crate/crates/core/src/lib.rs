//! Critical-orbit arithmetic for the unicritical family `f(x) = x^d + c`.
//!
//! The crate covers the orbit of the critical point `0` over residue rings
//! `Z/p^t`, finite fields and exact rationals; the parameter polynomials
//! `f^n(0) ∈ Z[c]` and their Gleason (Möbius) quotients; p-adic lifting of
//! parameters whose critical point is periodic; and the CRT construction of
//! integer parameters `c` whose iterates carry chosen primitive prime
//! divisors to chosen exact powers. Around that core sit finite-field PCF
//! censuses, density statistics and iterated-Galois maximality certificates.
//!
//! All big integers cross the JSON boundary as decimal strings.

pub mod arith;
pub mod bounds;
pub mod constructor;
pub mod cycle;
pub mod decimal;
pub mod density;
pub mod dynatomic;
mod error;
pub mod lifting;
pub mod orbit;
pub mod pcf;
pub mod poly;

pub use error::{Error, Result};

pub use arith::{
    crt, factorize, is_prime, moebius, next_prime, primes_up_to, val_p, FactorBudget,
    Factorization, Residue,
};
pub use bounds::{
    count_primitive_primes, height, maximality_certificate, rho_upper_bound, CertificateEntry,
    MaximalityCertificate,
};
pub use constructor::{
    build_parameter, find_base, find_prime_for_iterate, verify_spec, ConstructionReport,
    DivisibilitySpec, PrimePowerConstraint,
};
pub use density::{density_lower_bound, empirical_density, fpp_symmetric, limit_error_bound};
pub use dynatomic::{
    discriminant, gleason_degree, gleason_poly, has_root_mod_p, is_simple_root, iterate_poly,
    roots_mod_p,
};
pub use lifting::{adjust_power, hensel_lift, LiftResult};
pub use orbit::{
    classify_integer_param, exact_iterate, is_primitive_divisor, iterate_valuation,
    orbit_with_derivative, period_type_mod, PeriodType, RationalParam,
};
pub use pcf::{
    check_condition_star, check_condition_star_star, correspondence_report, enumerate_pcf,
    PcfCensus,
};
pub use poly::IntPoly;
