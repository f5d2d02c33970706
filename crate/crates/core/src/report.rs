//! JSON summary and CSV tables.
//!
//! Reals in reports are rounded to 12 significant digits and then written in
//! shortest round-trip form (`0.68`, `0.254285714286`, `1e-300`). Keys and
//! columns come out in a fixed order, so output bytes depend only on inputs.

use serde::Serialize;

use crate::fdr::{FdrResult, Method, QValueVector};
use crate::geometry::Readouts;
use crate::ingest::{OrderedTests, PValueSet};
use crate::Scalar;

const REPORT_DIGITS: usize = 12;

/// Rounds to `digits` significant digits.
pub(crate) fn round_sig(v: f64, digits: usize) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{:.*e}", digits.saturating_sub(1), v)
        .parse()
        .expect("formatted float parses")
}

/// Shortest representation that reads back as `v`.
pub(crate) fn shortest(v: f64) -> String {
    let mut buf = ryu::Buffer::new();
    buf.format(v).to_string()
}

fn report_real(v: f64) -> String {
    shortest(round_sig(v, REPORT_DIGITS))
}

#[derive(Serialize)]
struct Summary {
    m: usize,
    method: Method,
    q: f64,
    k_star: usize,
    alpha_implied: Option<f64>,
    proportion_significant: f64,
    q_min: f64,
    k_at_min: usize,
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

/// Returns `(json, csv)`. The JSON object carries the run summary; the CSV
/// has one row per test in rank order with header
/// `id,p,rank,q_value,significant`.
pub fn write_report<T: Scalar>(
    result: &FdrResult<T>,
    qvals: &QValueVector<T>,
    readouts: &Readouts<T>,
    ordered: &OrderedTests<T>,
) -> (Vec<u8>, Vec<u8>) {
    let r = |v: T| round_sig(v.as_f64(), REPORT_DIGITS);
    let summary = Summary {
        m: ordered.m(),
        method: result.method,
        q: r(result.q),
        k_star: result.k_star,
        alpha_implied: result.alpha_implied.map(r),
        proportion_significant: r(result.proportion_significant),
        q_min: r(readouts.q_min),
        k_at_min: readouts.k_at_min,
    };
    let mut json = serde_json::to_vec_pretty(&summary).expect("summary serializes");
    json.push(b'\n');

    let mut table = csv_writer();
    table
        .write_record(["id", "p", "rank", "q_value", "significant"])
        .expect("in-memory write");
    for e in ordered.entries() {
        table
            .write_record([
                e.id.clone(),
                report_real(e.p.as_f64()),
                e.rank.to_string(),
                report_real(qvals.get(e.rank).as_f64()),
                result.rejected[e.rank - 1].to_string(),
            ])
            .expect("in-memory write");
    }
    (json, table.into_inner().expect("in-memory flush"))
}

/// `id,p` table in input order. p is written at full precision so a
/// re-read reproduces the set exactly.
pub fn write_pvalues_csv<T: Scalar>(set: &PValueSet<T>) -> Vec<u8> {
    let mut w = csv_writer();
    w.write_record(["id", "p"]).expect("in-memory write");
    for rec in set.records() {
        w.write_record([rec.id.clone(), shortest(rec.p.as_f64())])
            .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}
