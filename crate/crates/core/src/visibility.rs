//! Congruences between curves and the bookkeeping that turns a congruence
//! into a prediction: when a rank-zero curve is congruent mod p to a curve
//! of positive rank, the rank must leave a p-divisibility trace in the
//! local torsor groups of the rank-zero curve.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{factor, is_probable_prime, primes_up_to};
use crate::cohomology::coinvariants_quotient;
use crate::curve::WeierstrassCurve;
use crate::db::CurveRecord;
use crate::error::{Error, Result};
use crate::tate::{all_local_data, KodairaType};

/// Sturm bound for weight-2 forms of level M = lcm(n_a, n_b):
/// ⌈(M/6)·∏_{q | M}(1 + 1/q)⌉. Two eigenforms whose Hecke eigenvalues agree
/// mod p at all good primes up to this bound are congruent mod p.
/// Saturates at `u64::MAX` for levels beyond any scannable size.
pub fn sturm_bound(n_a: &BigInt, n_b: &BigInt) -> u64 {
    let m = n_a.lcm(n_b);
    let primes = factor(&m).expect("level factors within trial-division reach");
    let mut num = m;
    let mut den = BigInt::from(6);
    for (q, _) in &primes {
        num *= q + BigInt::one();
        den *= q;
    }
    let bound = (num + &den - BigInt::one()).div_floor(&den);
    bound.to_u64().unwrap_or(u64::MAX)
}

/// A multiple of the rational torsion order: the gcd of the reduction group
/// orders at the first ten odd good primes (torsion injects into each of
/// those reductions).
pub fn torsion_multiple_bound(curve: &WeierstrassCurve) -> Result<u64> {
    let mut bound: u64 = 0;
    let mut used = 0;
    let mut ell: u64 = 3;
    while used < 10 {
        match curve.count_points_mod(ell) {
            Ok((count, _)) => {
                bound = bound.gcd(&count);
                used += 1;
            }
            Err(Error::BadReduction(_)) => {}
            Err(e) => return Err(e),
        }
        ell += 2;
        while !is_probable_prime(&BigInt::from(ell)) {
            ell += 2;
        }
    }
    Ok(bound)
}

/// Outcome of a trace comparison over all shared good primes up to a bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CongruenceVerdict {
    Pass,
    Fail {
        ell: u64,
        a_ell_a: i64,
        a_ell_b: i64,
    },
}

/// The record of a congruence test: which primes were required to agree and
/// whether they did.
#[derive(Clone, Debug)]
pub struct CongruenceEvidence {
    pub p: u64,
    pub bound: u64,
    /// Primes ℓ ≤ bound of good reduction for both curves; the congruence
    /// a_ℓ(A) ≡ a_ℓ(B) mod p is required exactly there.
    pub checked_primes: Vec<u64>,
    pub verdict: CongruenceVerdict,
}

/// Compare Frobenius traces of two curves mod p at every shared good prime
/// ℓ ≤ bound (the bound is raised to at least 2). Stops at the first
/// disagreement.
pub fn congruence_evidence(
    a: &CurveRecord,
    b: &CurveRecord,
    p: u64,
    bound: u64,
) -> Result<CongruenceEvidence> {
    if !is_probable_prime(&BigInt::from(p)) {
        return Err(Error::NotPrime(BigInt::from(p)));
    }
    let bound = bound.max(2);
    let checked_primes: Vec<u64> = primes_up_to(bound)
        .into_iter()
        .filter(|&ell| {
            let e = BigInt::from(ell);
            !(&a.conductor % &e).is_zero() && !(&b.conductor % &e).is_zero()
        })
        .collect();
    let mut verdict = CongruenceVerdict::Pass;
    for &ell in &checked_primes {
        let (_, trace_a) = a.curve.count_points_mod(ell)?;
        let (_, trace_b) = b.curve.count_points_mod(ell)?;
        if (trace_a as i128 - trace_b as i128).rem_euclid(p as i128) != 0 {
            verdict = CongruenceVerdict::Fail {
                ell,
                a_ell_a: trace_a,
                a_ell_b: trace_b,
            };
            break;
        }
    }
    Ok(CongruenceEvidence {
        p,
        bound,
        checked_primes,
        verdict,
    })
}

/// Three-valued check outcome for hypotheses that may be undecidable from
/// the data at hand (e.g. torsion coprimality when the database does not
/// state the torsion order).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certainty {
    Pass,
    Fail,
    Inconclusive,
}

/// The quantitative half of a verified prediction: where the p-divisibility
/// shows up among the local torsor groups of the rank-zero curve.
#[derive(Clone, Debug)]
pub struct VisibilityPrediction {
    /// For each bad place v of the rank-zero curve, the exponent k_v with
    /// #TT(A/ℚ_v)[p] = p^{k_v}.
    pub local_p_exponents: Vec<(BigInt, u32)>,
    /// Σ_v k_v, the exponent of p in ∏_v #TT(A/ℚ_v)[p].
    pub total_exponent: u32,
    /// The rank of the congruent curve: the prediction is
    /// required_exponent ≤ total_exponent.
    pub required_exponent: u32,
}

/// Full report on one (rank-zero curve, positive-rank curve, prime) triple.
#[derive(Clone, Debug)]
pub struct VisibilityReport {
    pub a_label: String,
    pub b_label: String,
    pub p: u64,
    pub rank_a_zero: bool,
    pub rank_b_positive: bool,
    pub b_semistable: bool,
    pub p_odd: bool,
    pub p_coprime_to_conductors: bool,
    pub p_coprime_to_torsion_a: Certainty,
    pub p_coprime_to_tamagawa_b: bool,
    pub ramification_ok: bool,
    pub tamagawa_product_a: BigInt,
    pub tamagawa_product_b: BigInt,
    pub torsion_multiple_a: u64,
    pub torsion_db_a: Option<u64>,
    pub ramification_note: String,
    pub sha_note: String,
    pub congruence: CongruenceEvidence,
    pub prediction: Option<VisibilityPrediction>,
    pub verified: Option<bool>,
}

impl VisibilityReport {
    /// True when every hypothesis needed for the prediction holds.
    pub fn all_pass(&self) -> bool {
        self.rank_a_zero
            && self.rank_b_positive
            && self.b_semistable
            && self.p_odd
            && self.p_coprime_to_conductors
            && self.p_coprime_to_torsion_a == Certainty::Pass
            && self.p_coprime_to_tamagawa_b
            && self.ramification_ok
            && self.congruence.verdict == CongruenceVerdict::Pass
    }
}

/// Check every hypothesis of the visibility criterion for the pair (a, b)
/// at p: a of rank 0 congruent mod p to b of positive rank, b semistable,
/// p odd, coprime to both conductors, to the torsion of a, and to the
/// Tamagawa numbers of b, with the congruence tested up to
/// max(Sturm bound, 1000). No prediction is attached; see
/// [`predict_and_verify`].
pub fn check_hypotheses(a: &CurveRecord, b: &CurveRecord, p: u64) -> Result<VisibilityReport> {
    let p_big = BigInt::from(p);
    if !is_probable_prime(&p_big) {
        return Err(Error::NotPrime(p_big));
    }
    let b_local = all_local_data(&b.curve)?;
    let a_local = all_local_data(&a.curve)?;

    let b_semistable = b_local
        .iter()
        .all(|d| matches!(d.kodaira, KodairaType::In(n) if n >= 1));
    let b_conductor_squarefree = factor(&b.conductor)?.iter().all(|(_, e)| *e == 1);
    if b_semistable != b_conductor_squarefree {
        return Err(Error::Internal(
            "semistability disagrees with the conductor exponents".into(),
        ));
    }

    let tamagawa_product_a: BigInt = a_local.iter().map(|d| BigInt::from(d.c)).product();
    let tamagawa_product_b: BigInt = b_local.iter().map(|d| BigInt::from(d.c)).product();
    let torsion_multiple_a = torsion_multiple_bound(&a.curve)?;

    let p_coprime_to_torsion_a = if torsion_multiple_a % p != 0 {
        Certainty::Pass
    } else {
        match a.torsion_order {
            Some(t) if t % p != 0 => Certainty::Pass,
            Some(_) => Certainty::Fail,
            None => Certainty::Inconclusive,
        }
    };

    let bound = sturm_bound(&a.conductor, &b.conductor).max(1000);
    let congruence = congruence_evidence(a, b, p, bound)?;

    let ramification_ok = p >= 3;
    let ramification_note = if ramification_ok {
        format!(
            "absolute ramification index e = 1 is less than p - 1 = {}, so p-torsion of \
             Néron models injects under reduction",
            p - 1
        )
    } else {
        "p = 2 fails e < p - 1: reduction can kill 2-torsion, so the criterion does not apply"
            .to_string()
    };
    let sha_note = "assumption (recorded, not checked): the visible p-part of the \
                    Tate–Shafarevich group behaves as the congruence predicts; this tool \
                    verifies the local torsor divisibility, not a Sha computation"
        .to_string();

    Ok(VisibilityReport {
        a_label: a.label.clone(),
        b_label: b.label.clone(),
        p,
        rank_a_zero: a.rank == 0,
        rank_b_positive: b.rank > 0,
        b_semistable,
        p_odd: p % 2 == 1,
        p_coprime_to_conductors: !((&a.conductor * &b.conductor) % &p_big).is_zero(),
        p_coprime_to_torsion_a,
        p_coprime_to_tamagawa_b: !(&tamagawa_product_b % &p_big).is_zero(),
        ramification_ok,
        tamagawa_product_a,
        tamagawa_product_b,
        torsion_multiple_a,
        torsion_db_a: a.torsion_order,
        ramification_note,
        sha_note,
        congruence,
        prediction: None,
        verified: None,
    })
}

/// Run [`check_hypotheses`] and, when they all pass, attach the prediction
/// p^{rank(b)} | ∏_v #TT(a/ℚ_v)[p] together with its verification against
/// the computed torsor groups.
pub fn predict_and_verify(a: &CurveRecord, b: &CurveRecord, p: u64) -> Result<VisibilityReport> {
    let mut report = check_hypotheses(a, b, p)?;
    if !report.all_pass() {
        return Ok(report);
    }
    let mut local_p_exponents = Vec::new();
    let mut total_exponent = 0u32;
    for data in all_local_data(&a.curve)? {
        let torsors = coinvariants_quotient(&data.phi);
        let exponent = torsors
            .canonical_factors()
            .iter()
            .filter(|&&d| d % p == 0)
            .count() as u32;
        total_exponent += exponent;
        local_p_exponents.push((data.p.clone(), exponent));
    }
    report.verified = Some(b.rank <= total_exponent);
    report.prediction = Some(VisibilityPrediction {
        local_p_exponents,
        total_exponent,
        required_exponent: b.rank,
    });
    Ok(report)
}

/// One hit from [`scan_congruent_pairs`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanMatch {
    pub a_label: String,
    pub b_label: String,
    /// How many primes the agreement was actually tested at.
    pub primes_checked: usize,
}

/// Find all ordered pairs (a, b) with rank(a) = 0 < rank(b) whose traces
/// agree mod p at every shared good prime ℓ ≤ bound. Results are sorted by
/// label pair. Trace tables are computed once per curve, so the pair loop
/// is pure table lookup.
pub fn scan_congruent_pairs(records: &[CurveRecord], p: u64, bound: u64) -> Result<Vec<ScanMatch>> {
    if !is_probable_prime(&BigInt::from(p)) {
        return Err(Error::NotPrime(BigInt::from(p)));
    }
    let bound = bound.max(2);
    let primes = primes_up_to(bound);
    let mut tables: Vec<Vec<Option<i64>>> = Vec::with_capacity(records.len());
    for rec in records {
        let mut row = Vec::with_capacity(primes.len());
        for &ell in &primes {
            if (&rec.conductor % BigInt::from(ell)).is_zero() {
                row.push(None);
            } else {
                row.push(Some(rec.curve.count_points_mod(ell)?.1));
            }
        }
        tables.push(row);
    }
    let mut matches = Vec::new();
    for (i, a) in records.iter().enumerate() {
        if a.rank != 0 {
            continue;
        }
        for (j, b) in records.iter().enumerate() {
            if b.rank == 0 {
                continue;
            }
            let mut primes_checked = 0;
            let congruent = (0..primes.len()).all(|k| match (tables[i][k], tables[j][k]) {
                (Some(ta), Some(tb)) => {
                    primes_checked += 1;
                    (ta as i128 - tb as i128).rem_euclid(p as i128) == 0
                }
                _ => true,
            });
            if congruent {
                matches.push(ScanMatch {
                    a_label: a.label.clone(),
                    b_label: b.label.clone(),
                    primes_checked,
                });
            }
        }
    }
    matches.sort_by(|x, y| (&x.a_label, &x.b_label).cmp(&(&y.a_label, &y.b_label)));
    Ok(matches)
}
