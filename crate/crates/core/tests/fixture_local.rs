//! Cross-validation of the reduction-type machinery against a frozen table of
//! expected local data for every bad prime of every curve in the bundled
//! database. The table was produced by an independent implementation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use tamtor::db::parse_curve_records;
use tamtor::tate::{bad_primes, conductor, tate_local_data, KodairaType, ReductionKind};

struct ExpectedRow {
    label: String,
    p: BigInt,
    kodaira: KodairaType,
    f: u32,
    c: u64,
    kind: ReductionKind,
    v_disc: u32,
}

fn data_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn load_expected() -> Vec<ExpectedRow> {
    let text = fs::read_to_string(data_path("tests/data/local_expected.tsv")).unwrap();
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        assert_eq!(cols.len(), 7, "bad fixture row: {line}");
        out.push(ExpectedRow {
            label: cols[0].to_string(),
            p: cols[1].parse().unwrap(),
            kodaira: cols[2].parse().unwrap(),
            f: cols[3].parse().unwrap(),
            c: cols[4].parse().unwrap(),
            kind: match cols[5] {
                "good" => ReductionKind::Good,
                "split" => ReductionKind::SplitMultiplicative,
                "nonsplit" => ReductionKind::NonsplitMultiplicative,
                "additive" => ReductionKind::Additive,
                other => panic!("unknown kind {other}"),
            },
            v_disc: cols[6].parse().unwrap(),
        });
    }
    assert!(out.len() >= 100, "fixture table suspiciously small");
    out
}

#[test]
fn local_data_matches_fixture_table() {
    let db_text = fs::read_to_string(data_path("../../data/curves.txt")).unwrap();
    let records = parse_curve_records(&db_text).unwrap();
    assert!(records.len() >= 100, "bundled database suspiciously small");
    let by_label: BTreeMap<_, _> = records.iter().map(|r| (r.label.clone(), r)).collect();

    let expected = load_expected();
    let mut failures = String::new();
    let mut seen: BTreeMap<String, BTreeSet<BigInt>> = BTreeMap::new();

    for row in &expected {
        let rec = by_label
            .get(&row.label)
            .unwrap_or_else(|| panic!("fixture row for unknown curve {}", row.label));
        let ld = tate_local_data(&rec.curve, &row.p).unwrap();
        let got = (ld.kodaira, ld.f, ld.c, ld.kind, ld.v_disc);
        let want = (row.kodaira, row.f, row.c, row.kind, row.v_disc);
        if got != want {
            writeln!(
                failures,
                "{} at {}: got {:?}, want {:?}",
                row.label, row.p, got, want
            )
            .unwrap();
        }
        // component group consistency: c equals the number of Frobenius-fixed
        // components, and the group order matches the type
        let fixed = tamtor::cohomology::invariants_subgroup(&ld.phi).order();
        if fixed != ld.c {
            writeln!(
                failures,
                "{} at {}: c={} but {} fixed components",
                row.label, row.p, ld.c, fixed
            )
            .unwrap();
        }
        seen.entry(row.label.clone())
            .or_default()
            .insert(row.p.clone());
    }

    // every record's bad primes are exactly the fixture rows for it,
    // and the stated conductor factors as prod p^f over those rows
    for rec in &records {
        let bad: BTreeSet<BigInt> = bad_primes(&rec.curve).unwrap().into_iter().collect();
        let table = seen
            .get(&rec.label)
            .unwrap_or_else(|| panic!("no fixture rows for {}", rec.label));
        if &bad != table {
            writeln!(
                failures,
                "{}: bad primes {:?} != fixture {:?}",
                rec.label, bad, table
            )
            .unwrap();
        }
        if conductor(&rec.curve).unwrap() != rec.conductor {
            writeln!(failures, "{}: conductor mismatch", rec.label).unwrap();
        }
    }

    assert!(failures.is_empty(), "fixture mismatches:\n{failures}");
}

#[test]
fn semistable_iff_squarefree_conductor() {
    let db_text = fs::read_to_string(data_path("../../data/curves.txt")).unwrap();
    let records = parse_curve_records(&db_text).unwrap();
    for rec in &records {
        let n = conductor(&rec.curve).unwrap();
        let semistable = bad_primes(&rec.curve).unwrap().iter().all(|p| {
            matches!(
                tate_local_data(&rec.curve, p).unwrap().kodaira,
                KodairaType::In(_)
            )
        });
        let squarefree = {
            let mut m = n.clone();
            let mut ok = true;
            for p in bad_primes(&rec.curve).unwrap() {
                let mut e = 0;
                while (&m % &p).is_zero() {
                    m = &m / &p;
                    e += 1;
                }
                if e > 1 {
                    ok = false;
                }
            }
            assert!(
                m.is_one(),
                "{}: conductor has prime outside bad set",
                rec.label
            );
            ok
        };
        assert_eq!(
            semistable, squarefree,
            "{}: semistability and squarefree conductor disagree",
            rec.label
        );
    }
}
