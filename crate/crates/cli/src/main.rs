//! Command-line frontend: local reduction data, Tamagawa torsor groups,
//! congruence evidence, and the corpus-wide verification suite.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use tamtor::cohomology::coinvariants_quotient;
use tamtor::curve::WeierstrassCurve;
use tamtor::db::{parse_curve_db, DatabaseFile, VerificationSummary};
use tamtor::tate::{all_local_data, conductor, tate_local_data, LocalData};
use tamtor::visibility::{
    congruence_evidence, predict_and_verify, scan_congruent_pairs, sturm_bound, Certainty,
    CongruenceEvidence, CongruenceVerdict, VisibilityReport,
};

/// out! that ignores stdout write failures, so piping into `head` or a
/// closed pager terminates the stream instead of panicking.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

#[derive(Parser)]
#[command(
    name = "tamtor",
    version,
    about = "Local Néron data and Tamagawa torsors for elliptic curves over Q"
)]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Weierstrass invariants b2..b8, c4, c6, discriminant and j.
    Invariants {
        /// Coefficients a1,a2,a3,a4,a6 (comma-separated integers).
        #[arg(long, value_parser = parse_curve_arg)]
        ainvs: WeierstrassCurve,
    },
    /// Kodaira type, conductor exponent, Tamagawa number, component group.
    Localdata {
        /// Coefficients a1,a2,a3,a4,a6 (comma-separated integers).
        #[arg(long, value_parser = parse_curve_arg)]
        ainvs: WeierstrassCurve,
        /// Prime to inspect; all bad primes when omitted.
        #[arg(long, value_parser = parse_bigint_arg)]
        p: Option<BigInt>,
    },
    /// Tamagawa torsor groups TT(E/Q_p) at every bad prime.
    Torsors {
        /// Coefficients a1,a2,a3,a4,a6 (comma-separated integers).
        #[arg(long, value_parser = parse_curve_arg)]
        ainvs: WeierstrassCurve,
    },
    /// Compare Frobenius traces of two curves mod p at shared good primes.
    Congruence {
        /// Label of the first curve in the database.
        #[arg(long)]
        a: String,
        /// Label of the second curve in the database.
        #[arg(long)]
        b: String,
        /// The congruence modulus (a prime).
        #[arg(long)]
        p: u64,
        /// Largest prime to compare traces at (default: Sturm bound).
        #[arg(long)]
        bound: Option<u64>,
        /// Curve database file.
        #[arg(long)]
        db: PathBuf,
    },
    /// Check the visibility hypotheses for a pair and verify the torsor
    /// divisibility prediction.
    Visibility {
        /// Label of the rank-zero curve.
        #[arg(long)]
        a: String,
        /// Label of the positive-rank curve.
        #[arg(long)]
        b: String,
        /// The congruence prime.
        #[arg(long)]
        p: u64,
        /// Curve database file.
        #[arg(long)]
        db: PathBuf,
    },
    /// Find (rank 0, positive rank) pairs with traces congruent mod p.
    Scan {
        /// The congruence prime.
        #[arg(long)]
        p: u64,
        /// Largest prime to compare traces at (default: 100).
        #[arg(long)]
        bound: Option<u64>,
        /// Curve database file.
        #[arg(long)]
        db: PathBuf,
    },
    /// Run every identity check over a whole curve database.
    Verify {
        /// Curve database file.
        #[arg(long)]
        db: PathBuf,
    },
}

fn parse_curve_arg(s: &str) -> Result<WeierstrassCurve, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 5 {
        return Err(format!(
            "expected 5 comma-separated integers, got {}",
            parts.len()
        ));
    }
    let mut ainvs: [BigInt; 5] = Default::default();
    for (slot, part) in ainvs.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|e| format!("bad integer {:?}: {e}", part.trim()))?;
    }
    WeierstrassCurve::new(ainvs).map_err(|e| e.to_string())
}

fn parse_bigint_arg(s: &str) -> Result<BigInt, String> {
    s.trim()
        .parse()
        .map_err(|e| format!("bad integer {s:?}: {e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, String> {
    match &cli.command {
        Command::Invariants { ainvs } => cmd_invariants(ainvs, cli.json),
        Command::Localdata { ainvs, p } => cmd_localdata(ainvs, p.as_ref(), cli.json),
        Command::Torsors { ainvs } => cmd_torsors(ainvs, cli.json),
        Command::Congruence { a, b, p, bound, db } => {
            cmd_congruence(a, b, *p, *bound, db, cli.json)
        }
        Command::Visibility { a, b, p, db } => cmd_visibility(a, b, *p, db, cli.json),
        Command::Scan { p, bound, db } => cmd_scan(*p, *bound, db, cli.json),
        Command::Verify { db } => cmd_verify(db, cli.json),
    }
}

fn load_db(path: &Path) -> Result<DatabaseFile, String> {
    parse_curve_db(path).map_err(|e| format!("{}: {e}", path.display()))
}

/// Integers that fit in an i64 become JSON numbers; anything bigger becomes
/// a decimal string.
fn big_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

/// "Z/6 x Z/2" style name for a factor list; "trivial" for the trivial group.
fn group_desc(factors: &[u64]) -> String {
    if factors.is_empty() {
        "trivial".to_string()
    } else {
        factors
            .iter()
            .map(|d| format!("Z/{d}"))
            .collect::<Vec<_>>()
            .join(" x ")
    }
}

fn emit(value: &Value) {
    out!(
        "{}",
        serde_json::to_string_pretty(value).expect("JSON serialization")
    );
}

fn cmd_invariants(curve: &WeierstrassCurve, as_json: bool) -> Result<u8, String> {
    let inv = curve.invariants();
    if as_json {
        emit(&json!({
            "label": curve.to_string(),
            "ainvs": curve.ainvs().iter().map(big_json).collect::<Vec<_>>(),
            "b2": big_json(&inv.b2),
            "b4": big_json(&inv.b4),
            "b6": big_json(&inv.b6),
            "b8": big_json(&inv.b8),
            "c4": big_json(&inv.c4),
            "c6": big_json(&inv.c6),
            "disc": big_json(&inv.disc),
            "j": inv.j.to_string(),
        }));
    } else {
        out!("curve {curve}");
        out!("  b2   = {}", inv.b2);
        out!("  b4   = {}", inv.b4);
        out!("  b6   = {}", inv.b6);
        out!("  b8   = {}", inv.b8);
        out!("  c4   = {}", inv.c4);
        out!("  c6   = {}", inv.c6);
        out!("  disc = {}", inv.disc);
        out!("  j    = {}", inv.j);
    }
    Ok(0)
}

fn local_data_json(label: &str, data: &LocalData) -> Value {
    let torsors = coinvariants_quotient(&data.phi);
    json!({
        "label": label,
        "p": big_json(&data.p),
        "kodaira": data.kodaira.to_string(),
        "kind": data.kind.as_str(),
        "f": data.f,
        "c": data.c,
        "v_disc": data.v_disc,
        "phi": {
            "factors": data.phi.group().factors(),
            "frobenius": data.phi.frobenius().matrix(),
        },
        "tt_order": torsors.order(),
        "tt_factors": torsors.factors(),
    })
}

fn print_local_data(data: &LocalData) {
    let torsors = coinvariants_quotient(&data.phi);
    out!(
        "p={}: kodaira {}, {} reduction, f={}, c={}, v(disc)={}",
        data.p,
        data.kodaira,
        data.kind,
        data.f,
        data.c,
        data.v_disc
    );
    out!(
        "  phi = {} with frobenius of order {}",
        group_desc(data.phi.group().factors()),
        data.phi.frobenius().order()
    );
    out!(
        "  TT = {} (order {})",
        group_desc(torsors.factors()),
        torsors.order()
    );
}

fn cmd_localdata(
    curve: &WeierstrassCurve,
    p: Option<&BigInt>,
    as_json: bool,
) -> Result<u8, String> {
    let label = curve.to_string();
    match p {
        Some(p) => {
            let data = tate_local_data(curve, p).map_err(|e| e.to_string())?;
            if as_json {
                emit(&local_data_json(&label, &data));
            } else {
                out!("curve {label}");
                print_local_data(&data);
            }
        }
        None => {
            let all = all_local_data(curve).map_err(|e| e.to_string())?;
            if as_json {
                let rows: Vec<Value> = all.iter().map(|d| local_data_json(&label, d)).collect();
                emit(&json!(rows));
            } else {
                let n = conductor(curve).map_err(|e| e.to_string())?;
                out!("curve {label}  (conductor {n})");
                for data in &all {
                    print_local_data(data);
                }
                if all.is_empty() {
                    out!("no bad primes: the model is smooth over Z");
                }
            }
        }
    }
    Ok(0)
}

fn cmd_torsors(curve: &WeierstrassCurve, as_json: bool) -> Result<u8, String> {
    let label = curve.to_string();
    let all = all_local_data(curve).map_err(|e| e.to_string())?;
    if as_json {
        let rows: Vec<Value> = all
            .iter()
            .map(|data| {
                let torsors = coinvariants_quotient(&data.phi);
                json!({
                    "p": big_json(&data.p),
                    "kodaira": data.kodaira.to_string(),
                    "kind": data.kind.as_str(),
                    "c": data.c,
                    "tt_order": torsors.order(),
                    "tt_factors": torsors.factors(),
                })
            })
            .collect();
        emit(&json!({ "label": label, "torsors": rows }));
    } else {
        out!("curve {label}");
        if all.is_empty() {
            out!("no bad primes: every local torsor group is trivial");
        }
        for data in &all {
            let torsors = coinvariants_quotient(&data.phi);
            out!(
                "p={}: {} ({}), c={}, TT = {} (order {})",
                data.p,
                data.kodaira,
                data.kind,
                data.c,
                group_desc(torsors.factors()),
                torsors.order()
            );
        }
    }
    Ok(0)
}

fn congruence_json(a: &str, b: &str, ev: &CongruenceEvidence) -> Value {
    let mut value = json!({
        "a_label": a,
        "b_label": b,
        "p": ev.p,
        "bound": ev.bound,
        "primes_checked": ev.checked_primes.len(),
        "verdict": match ev.verdict {
            CongruenceVerdict::Pass => "pass",
            CongruenceVerdict::Fail { .. } => "fail",
        },
    });
    if let CongruenceVerdict::Fail {
        ell,
        a_ell_a,
        a_ell_b,
    } = ev.verdict
    {
        value["ell"] = json!(ell);
        value["trace_a"] = json!(a_ell_a);
        value["trace_b"] = json!(a_ell_b);
    }
    value
}

fn cmd_congruence(
    a: &str,
    b: &str,
    p: u64,
    bound: Option<u64>,
    db: &Path,
    as_json: bool,
) -> Result<u8, String> {
    let db = load_db(db)?;
    let rec_a = db.require(a).map_err(|e| e.to_string())?;
    let rec_b = db.require(b).map_err(|e| e.to_string())?;
    let bound = bound.unwrap_or_else(|| sturm_bound(&rec_a.conductor, &rec_b.conductor));
    let ev = congruence_evidence(rec_a, rec_b, p, bound).map_err(|e| e.to_string())?;
    if as_json {
        emit(&congruence_json(a, b, &ev));
    } else {
        match ev.verdict {
            CongruenceVerdict::Pass => out!(
                "congruence a={a} b={b} mod {p}: PASS ({} shared good primes <= {})",
                ev.checked_primes.len(),
                ev.bound
            ),
            CongruenceVerdict::Fail {
                ell,
                a_ell_a,
                a_ell_b,
            } => out!(
                "congruence a={a} b={b} mod {p}: FAIL at ell={ell}: trace {a_ell_a} vs {a_ell_b}"
            ),
        }
    }
    Ok(match ev.verdict {
        CongruenceVerdict::Pass => 0,
        CongruenceVerdict::Fail { .. } => 1,
    })
}

fn certainty_str(c: Certainty) -> &'static str {
    match c {
        Certainty::Pass => "pass",
        Certainty::Fail => "fail",
        Certainty::Inconclusive => "inconclusive",
    }
}

fn visibility_json(report: &VisibilityReport) -> Value {
    let pass = |b: bool| if b { "pass" } else { "fail" };
    json!({
        "a_label": report.a_label,
        "b_label": report.b_label,
        "p": report.p,
        "hypotheses": {
            "rank_a_zero": pass(report.rank_a_zero),
            "rank_b_positive": pass(report.rank_b_positive),
            "b_semistable": pass(report.b_semistable),
            "p_odd": pass(report.p_odd),
            "p_coprime_to_conductors": pass(report.p_coprime_to_conductors),
            "p_coprime_to_torsion_a": certainty_str(report.p_coprime_to_torsion_a),
            "p_coprime_to_tamagawa_b": pass(report.p_coprime_to_tamagawa_b),
            "ramification_ok": pass(report.ramification_ok),
            "congruence": pass(report.congruence.verdict == CongruenceVerdict::Pass),
        },
        "all_pass": report.all_pass(),
        "tamagawa_product_a": big_json(&report.tamagawa_product_a),
        "tamagawa_product_b": big_json(&report.tamagawa_product_b),
        "torsion_multiple_a": report.torsion_multiple_a,
        "torsion_db_a": report.torsion_db_a,
        "ramification_note": report.ramification_note,
        "sha_note": report.sha_note,
        "congruence_evidence": congruence_json(&report.a_label, &report.b_label, &report.congruence),
        "prediction": report.prediction.as_ref().map(|pred| json!({
            "local_exponents": pred.local_p_exponents.iter().map(|(q, e)| json!({
                "p": big_json(q),
                "exponent": e,
            })).collect::<Vec<_>>(),
            "total_exponent": pred.total_exponent,
            "required_exponent": pred.required_exponent,
        })),
        "verified": report.verified,
    })
}

fn print_visibility(report: &VisibilityReport) {
    let pass = |b: bool| if b { "pass" } else { "FAIL" };
    out!(
        "visibility: a={} b={} p={}",
        report.a_label,
        report.b_label,
        report.p
    );
    out!("  hypotheses:");
    out!(
        "    rank(a) = 0                 {}",
        pass(report.rank_a_zero)
    );
    out!(
        "    rank(b) > 0                 {}",
        pass(report.rank_b_positive)
    );
    out!(
        "    b semistable                {}",
        pass(report.b_semistable)
    );
    out!("    p odd                       {}", pass(report.p_odd));
    out!(
        "    p coprime to conductors     {}",
        pass(report.p_coprime_to_conductors)
    );
    out!(
        "    p coprime to torsion(a)     {} (multiple {}, database {})",
        certainty_str(report.p_coprime_to_torsion_a),
        report.torsion_multiple_a,
        report
            .torsion_db_a
            .map_or("?".to_string(), |t| t.to_string())
    );
    out!(
        "    p coprime to tamagawa(b)    {}",
        pass(report.p_coprime_to_tamagawa_b)
    );
    out!(
        "    ramification e < p-1        {}",
        pass(report.ramification_ok)
    );
    out!(
        "    traces congruent mod p      {} ({} primes <= {})",
        pass(report.congruence.verdict == CongruenceVerdict::Pass),
        report.congruence.checked_primes.len(),
        report.congruence.bound
    );
    out!("  tamagawa product of a: {}", report.tamagawa_product_a);
    out!("  tamagawa product of b: {}", report.tamagawa_product_b);
    out!("  note: {}", report.ramification_note);
    out!("  note: {}", report.sha_note);
    match &report.prediction {
        Some(pred) => {
            let locals: Vec<String> = pred
                .local_p_exponents
                .iter()
                .map(|(q, e)| format!("v={q}: {}^{e}", report.p))
                .collect();
            out!(
                "  prediction: {}^{} divides prod_v #TT(a/Q_v)[{}]  ({})",
                report.p,
                pred.required_exponent,
                report.p,
                locals.join(", ")
            );
            out!(
                "  computed exponent: {} (required {})",
                pred.total_exponent,
                pred.required_exponent
            );
            out!(
                "  verified: {}",
                report.verified.map_or("-".to_string(), |v| v.to_string())
            );
        }
        None => out!("  prediction: none (hypotheses not all satisfied)"),
    }
}

fn cmd_visibility(a: &str, b: &str, p: u64, db: &Path, as_json: bool) -> Result<u8, String> {
    let db = load_db(db)?;
    let rec_a = db.require(a).map_err(|e| e.to_string())?;
    let rec_b = db.require(b).map_err(|e| e.to_string())?;
    let report = predict_and_verify(rec_a, rec_b, p).map_err(|e| e.to_string())?;
    if as_json {
        emit(&visibility_json(&report));
    } else {
        print_visibility(&report);
    }
    Ok(if report.all_pass() && report.verified == Some(true) {
        0
    } else {
        1
    })
}

fn cmd_scan(p: u64, bound: Option<u64>, db: &Path, as_json: bool) -> Result<u8, String> {
    let db = load_db(db)?;
    let bound = bound.unwrap_or(100);
    let matches = scan_congruent_pairs(&db.records, p, bound).map_err(|e| e.to_string())?;
    if as_json {
        let rows: Vec<Value> = matches
            .iter()
            .map(|m| {
                json!({
                    "a_label": m.a_label,
                    "b_label": m.b_label,
                    "primes_checked": m.primes_checked,
                })
            })
            .collect();
        emit(&json!({ "p": p, "bound": bound, "matches": rows }));
    } else {
        out!(
            "scan mod {p} over {} curves (traces at primes <= {bound}):",
            db.records.len()
        );
        for m in &matches {
            out!(
                "  a={} b={}  ({} shared good primes agree)",
                m.a_label,
                m.b_label,
                m.primes_checked
            );
        }
        out!("{} candidate pairs", matches.len());
    }
    Ok(0)
}

fn verify_json(summary: &VerificationSummary) -> Value {
    json!({
        "curves_scanned": summary.curves_scanned,
        "bad_primes_checked": summary.bad_primes_checked,
        "herbrand_ok": summary.herbrand_ok,
        "tt_equals_c_ok": summary.tt_equals_c_ok,
        "duality_ok": summary.duality_ok,
        "stabilization_ok": summary.stabilization_ok,
        "pairing_ok": summary.pairing_ok,
        "pairing_applicable": summary.pairing_applicable,
        "good_triviality_ok": summary.good_triviality_ok,
        "failures": summary.failures.iter().map(|f| json!({
            "label": f.label,
            "prime": big_json(&f.prime),
            "check": f.check,
        })).collect::<Vec<_>>(),
        "all_ok": summary.all_ok(),
    })
}

fn cmd_verify(db: &Path, as_json: bool) -> Result<u8, String> {
    let db = load_db(db)?;
    let summary = tamtor::db::run_verification_suite(&db.records);
    if as_json {
        emit(&verify_json(&summary));
    } else {
        out!(
            "verification over {} curves, {} bad primes:",
            summary.curves_scanned,
            summary.bad_primes_checked
        );
        let total = summary.bad_primes_checked;
        out!(
            "  herbrand identity        {}/{total} ok",
            summary.herbrand_ok
        );
        out!(
            "  #TT = c_p                {}/{total} ok",
            summary.tt_equals_c_ok
        );
        out!(
            "  duality                  {}/{total} ok",
            summary.duality_ok
        );
        out!(
            "  stabilization            {}/{total} ok",
            summary.stabilization_ok
        );
        out!(
            "  pairing (multiplicative) {}/{} ok",
            summary.pairing_ok,
            summary.pairing_applicable
        );
        out!(
            "  good-prime triviality    {}/{} ok",
            summary.good_triviality_ok,
            summary.curves_scanned
        );
        if summary.failures.is_empty() {
            out!("  failures: none");
        } else {
            out!("  failures:");
            for f in &summary.failures {
                out!("    {} at {}: {}", f.label, f.prime, f.check);
            }
        }
    }
    Ok(if summary.all_ok() { 0 } else { 1 })
}
