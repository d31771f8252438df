//! Curve database rows (`label a1 a2 a3 a4 a6 rank torsion [conductor]`),
//! their validation, and the verification suite that sweeps a whole file
//! checking the structural claims about local torsor groups.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::is_probable_prime;
use crate::cohomology::{
    coinvariants_quotient, cyclic_h1, duality_check, induced_pairing_check, invariants_subgroup,
    stabilization_level,
};
use crate::curve::WeierstrassCurve;
use crate::error::{Error, Result};
use crate::tate::{bad_primes, conductor, tate_local_data};

/// One database row: a curve with its label and the arithmetic data that is
/// input rather than computed (rank, and torsion order when known).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveRecord {
    pub label: String,
    pub curve: WeierstrassCurve,
    pub conductor: BigInt,
    pub rank: u32,
    pub torsion_order: Option<u64>,
}

impl CurveRecord {
    /// Validates on construction: the stated conductor must equal the one
    /// computed from the model, and a stated torsion order must be positive.
    pub fn new(
        label: String,
        curve: WeierstrassCurve,
        conductor_stated: BigInt,
        rank: u32,
        torsion_order: Option<u64>,
    ) -> Result<Self> {
        let computed = conductor(&curve)?;
        if computed != conductor_stated {
            return Err(Error::RecordValidation {
                label,
                msg: format!(
                    "stated conductor {conductor_stated}, but the model has conductor {computed}"
                ),
            });
        }
        if torsion_order == Some(0) {
            return Err(Error::RecordValidation {
                label,
                msg: "torsion order 0 is impossible".into(),
            });
        }
        Ok(CurveRecord {
            label,
            curve,
            conductor: computed,
            rank,
            torsion_order,
        })
    }
}

/// A parsed database together with where it came from.
#[derive(Clone, Debug)]
pub struct DatabaseFile {
    pub records: Vec<CurveRecord>,
    pub source_path: PathBuf,
}

impl DatabaseFile {
    pub fn find(&self, label: &str) -> Option<&CurveRecord> {
        self.records.iter().find(|r| r.label == label)
    }

    pub fn require(&self, label: &str) -> Result<&CurveRecord> {
        self.find(label).ok_or_else(|| Error::RecordValidation {
            label: label.to_string(),
            msg: format!("not found in {}", self.source_path.display()),
        })
    }
}

/// Read and validate a database file.
pub fn parse_curve_db(path: &Path) -> Result<DatabaseFile> {
    let text = fs::read_to_string(path)?;
    Ok(DatabaseFile {
        records: parse_curve_records(&text)?,
        source_path: path.to_path_buf(),
    })
}

/// Parse database text. Blank lines and `#` comments are skipped; every row
/// must carry 8 or 9 whitespace-separated fields
/// (`label a1 a2 a3 a4 a6 rank torsion [conductor]`), `?` marks unknown
/// torsion, labels must be unique, and a stated conductor must match the
/// computed one.
pub fn parse_curve_records(text: &str) -> Result<Vec<CurveRecord>> {
    let mut records = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let row = raw.trim();
        if row.is_empty() || row.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = row.split_whitespace().collect();
        let fail = |msg: String| Error::Parse { line, msg };
        if fields.len() != 8 && fields.len() != 9 {
            return Err(fail(format!(
                "expected `label a1 a2 a3 a4 a6 rank torsion [conductor]`, found {} fields",
                fields.len()
            )));
        }
        let label = fields[0].to_string();
        if !seen.insert(label.clone()) {
            return Err(fail(format!("duplicate label {label}")));
        }
        let mut ainvs: [BigInt; 5] = Default::default();
        for (slot, field) in ainvs.iter_mut().zip(&fields[1..6]) {
            *slot = field
                .parse()
                .map_err(|_| fail(format!("bad coefficient {field}")))?;
        }
        let curve = WeierstrassCurve::new(ainvs).map_err(|e| fail(e.to_string()))?;
        let rank: u32 = fields[6]
            .parse()
            .map_err(|_| fail(format!("bad rank {}", fields[6])))?;
        let torsion = match fields[7] {
            "?" => None,
            t => Some(
                t.parse::<u64>()
                    .map_err(|_| fail(format!("bad torsion order {t}")))?,
            ),
        };
        let stated_conductor = match fields.get(8) {
            Some(f) => f.parse().map_err(|_| fail(format!("bad conductor {f}")))?,
            None => conductor(&curve).map_err(|e| fail(e.to_string()))?,
        };
        let record = CurveRecord::new(label, curve, stated_conductor, rank, torsion)
            .map_err(|e| fail(e.to_string()))?;
        records.push(record);
    }
    Ok(records)
}

/// Canonical database text: one full 9-field row per record, LF line ends.
pub fn serialize_curve_records(records: &[CurveRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let a = r.curve.ainvs();
        let torsion = r
            .torsion_order
            .map_or_else(|| "?".to_string(), |t| t.to_string());
        writeln!(
            out,
            "{} {} {} {} {} {} {} {} {}",
            r.label, a[0], a[1], a[2], a[3], a[4], r.rank, torsion, r.conductor
        )
        .expect("writing to a String cannot fail");
    }
    out
}

/// One failed check in a verification sweep. `prime` is zero for failures
/// that concern the curve as a whole rather than one place.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckFailure {
    pub label: String,
    pub prime: BigInt,
    pub check: String,
}

/// Tallies from [`run_verification_suite`]: each `_ok` counter says how many
/// (curve, prime) pairs passed that check; anything that did not pass is in
/// `failures`.
#[derive(Clone, Debug, Default)]
pub struct VerificationSummary {
    pub curves_scanned: usize,
    pub bad_primes_checked: usize,
    pub herbrand_ok: usize,
    pub tt_equals_c_ok: usize,
    pub duality_ok: usize,
    pub stabilization_ok: usize,
    pub pairing_ok: usize,
    pub pairing_applicable: usize,
    pub good_triviality_ok: usize,
    pub failures: Vec<CheckFailure>,
}

impl VerificationSummary {
    pub fn all_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Sweep every record and every bad prime, checking:
/// - Herbrand: the fixed subgroup and coinvariant quotient of Φ have equal
///   order;
/// - the coinvariant order equals the Tamagawa number;
/// - duality: fixed subgroup ≅ coinvariant quotient as groups;
/// - stabilization: the finite-level H¹ equals the coinvariants at the
///   stabilization level and at its double;
/// - for multiplicative reduction, the pairing between invariants and
///   coinvariants is well-defined and perfect;
/// - at the first good prime, the local data is trivial.
///
/// Errors from individual curves are recorded as failures, never panics, so
/// one corrupt record cannot hide results for the rest of the file.
pub fn run_verification_suite(records: &[CurveRecord]) -> VerificationSummary {
    let mut summary = VerificationSummary::default();
    for rec in records {
        summary.curves_scanned += 1;
        let bad = match bad_primes(&rec.curve) {
            Ok(b) => b,
            Err(e) => {
                push_failure(
                    &mut summary,
                    rec,
                    BigInt::zero(),
                    format!("bad-primes: {e}"),
                );
                continue;
            }
        };
        for p in &bad {
            summary.bad_primes_checked += 1;
            let data = match tate_local_data(&rec.curve, p) {
                Ok(d) => d,
                Err(e) => {
                    push_failure(&mut summary, rec, p.clone(), format!("local-data: {e}"));
                    continue;
                }
            };
            let fixed = invariants_subgroup(&data.phi);
            let torsors = coinvariants_quotient(&data.phi);

            if fixed.order() == torsors.order() {
                summary.herbrand_ok += 1;
            } else {
                push_failure(&mut summary, rec, p.clone(), "herbrand".into());
            }
            if torsors.order() == data.c {
                summary.tt_equals_c_ok += 1;
            } else {
                push_failure(&mut summary, rec, p.clone(), "tamagawa-count".into());
            }
            if duality_check(&data.phi) {
                summary.duality_ok += 1;
            } else {
                push_failure(&mut summary, rec, p.clone(), "duality".into());
            }

            let level = stabilization_level(&data.phi);
            let stable = [level, 2 * level].iter().all(|&m| {
                cyclic_h1(data.phi.group(), data.phi.frobenius(), m)
                    .map(|h| h.canonical_factors() == torsors.canonical_factors())
                    .unwrap_or(false)
            });
            if stable {
                summary.stabilization_ok += 1;
            } else {
                push_failure(&mut summary, rec, p.clone(), "stabilization".into());
            }

            if data.kodaira.is_multiplicative() {
                summary.pairing_applicable += 1;
                match induced_pairing_check(&data.phi) {
                    Ok(true) => summary.pairing_ok += 1,
                    Ok(false) => push_failure(&mut summary, rec, p.clone(), "pairing".into()),
                    Err(e) => push_failure(&mut summary, rec, p.clone(), format!("pairing: {e}")),
                }
            }
        }

        // spot check at the first good prime: everything must be trivial
        let good_p = first_good_prime(&rec.conductor);
        match tate_local_data(&rec.curve, &good_p) {
            Ok(data)
                if data.kodaira.is_good()
                    && data.f == 0
                    && data.c == 1
                    && coinvariants_quotient(&data.phi).is_trivial() =>
            {
                summary.good_triviality_ok += 1;
            }
            Ok(_) => push_failure(&mut summary, rec, good_p, "good-reduction".into()),
            Err(e) => push_failure(&mut summary, rec, good_p, format!("good-reduction: {e}")),
        }
    }
    summary
        .failures
        .sort_by(|a, b| (&a.label, &a.prime, &a.check).cmp(&(&b.label, &b.prime, &b.check)));
    summary
}

fn push_failure(
    summary: &mut VerificationSummary,
    rec: &CurveRecord,
    prime: BigInt,
    check: String,
) {
    summary.failures.push(CheckFailure {
        label: rec.label.clone(),
        prime,
        check,
    });
}

fn first_good_prime(conductor: &BigInt) -> BigInt {
    let mut q = BigInt::from(2);
    loop {
        if is_probable_prime(&q) && !(conductor % &q).is_zero() {
            return q;
        }
        q += 1;
    }
}
