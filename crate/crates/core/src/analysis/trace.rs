//! Per-tick run records and their CSV encoding.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lyapunov bookkeeping for one state, filled in by
/// [`annotate_lyapunov`](super::annotate_lyapunov).
///
/// `v`, `dx`, `dlam` describe state `k`; `s`, `t`, `e` describe the
/// transition out of state `k` and are absent on the final state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LyapunovTerms {
    pub v: f64,
    pub dx: f64,
    pub dlam: f64,
    pub s: Option<f64>,
    pub t: Option<f64>,
    pub e: Option<f64>,
}

/// State after `k` updates, plus what the update that produced it used.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub k: u64,
    /// Primal step used by the update into this state (`α_{k−1}`).
    pub alpha: f64,
    /// Dual step used by the update into this state (`β_{k−1}`).
    pub beta: f64,
    /// Largest realised price age read during that update.
    pub delta_max: u64,
    /// Largest realised flow age read during that update.
    pub big_delta_max: u64,
    pub sent: u64,
    pub dropped: u64,
    pub delivered: u64,
    pub cost: f64,
    pub gap: f64,
    pub violation: f64,
    pub ergodic_gap: f64,
    pub ergodic_violation: f64,
    pub lyapunov: Option<LyapunovTerms>,
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
}

impl TraceRecord {
    pub(crate) fn initial(x: Vec<f64>, lambda: Vec<f64>, cost: f64, gap: f64, violation: f64) -> Self {
        Self {
            k: 0,
            alpha: 0.0,
            beta: 0.0,
            delta_max: 0,
            big_delta_max: 0,
            sent: 0,
            dropped: 0,
            delivered: 0,
            cost,
            gap,
            violation,
            ergodic_gap: gap,
            ergodic_violation: violation,
            lyapunov: None,
            x,
            lambda,
        }
    }
}

/// Full run history. `initial` is state 0; `records[i]` is state `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub algorithm: String,
    /// Dual box radius used for the gap columns.
    pub lambda_max: f64,
    pub initial: TraceRecord,
    pub records: Vec<TraceRecord>,
}

impl RunTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// State `k` (0 is the initial state).
    pub fn state(&self, k: usize) -> &TraceRecord {
        if k == 0 {
            &self.initial
        } else {
            &self.records[k - 1]
        }
    }

    pub fn last(&self) -> &TraceRecord {
        self.records.last().unwrap_or(&self.initial)
    }

    pub fn total_sent(&self) -> u64 {
        self.records.iter().map(|r| r.sent).sum()
    }

    pub fn total_dropped(&self) -> u64 {
        self.records.iter().map(|r| r.dropped).sum()
    }

    pub fn total_delivered(&self) -> u64 {
        self.records.iter().map(|r| r.delivered).sum()
    }

    pub fn num_primal(&self) -> usize {
        self.initial.x.len()
    }

    pub fn num_dual(&self) -> usize {
        self.initial.lambda.len()
    }

    fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
        h.extend((0..self.num_primal()).map(|j| format!("x{j}")));
        h.extend((0..self.num_dual()).map(|r| format!("lambda{r}")));
        h
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        for rec in std::iter::once(&self.initial).chain(&self.records) {
            w.write_record(encode(rec))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_bytes(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(buf)
    }

    /// Parses a trace CSV. `algorithm` and `lambda_max` are not stored in the
    /// CSV and come from the run summary.
    pub fn read_csv<R: Read>(input: R, algorithm: &str, lambda_max: f64) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers()?.clone();
        let fixed = FIXED_COLUMNS.len();
        if header.len() < fixed || header.iter().take(fixed).ne(FIXED_COLUMNS.iter().copied()) {
            return Err(Error::Trace("unexpected trace header".into()));
        }
        let n = header.iter().skip(fixed).filter(|h| h.starts_with('x')).count();
        let m = header.len() - fixed - n;
        let mut rows = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            if rec.len() != header.len() {
                return Err(Error::Trace(format!("row {line} has {} fields, expected {}", rec.len(), header.len())));
            }
            rows.push(decode(&rec, n, m).map_err(|e| Error::Trace(format!("row {line}: {e}")))?);
        }
        let mut it = rows.into_iter();
        let initial = it.next().ok_or_else(|| Error::Trace("trace has no rows".into()))?;
        let records: Vec<TraceRecord> = it.collect();
        for (i, rec) in std::iter::once(&initial).chain(&records).enumerate() {
            if rec.k != i as u64 {
                return Err(Error::Trace(format!("non-monotone k at row {i}: {}", rec.k)));
            }
        }
        Ok(Self {
            algorithm: algorithm.to_string(),
            lambda_max,
            initial,
            records,
        })
    }
}

const FIXED_COLUMNS: [&str; 19] = [
    "k",
    "alpha",
    "beta",
    "delta_max",
    "Delta_max",
    "sent",
    "dropped",
    "delivered",
    "cost",
    "gap",
    "violation",
    "ergodic_gap",
    "ergodic_violation",
    "V",
    "dx",
    "dlam",
    "S",
    "T",
    "E",
];

fn f(v: f64) -> String {
    format!("{v:?}")
}

fn opt(v: Option<f64>) -> String {
    v.map(f).unwrap_or_default()
}

fn encode(rec: &TraceRecord) -> Vec<String> {
    let ly = rec.lyapunov;
    let mut row = vec![
        rec.k.to_string(),
        f(rec.alpha),
        f(rec.beta),
        rec.delta_max.to_string(),
        rec.big_delta_max.to_string(),
        rec.sent.to_string(),
        rec.dropped.to_string(),
        rec.delivered.to_string(),
        f(rec.cost),
        f(rec.gap),
        f(rec.violation),
        f(rec.ergodic_gap),
        f(rec.ergodic_violation),
        opt(ly.map(|l| l.v)),
        opt(ly.map(|l| l.dx)),
        opt(ly.map(|l| l.dlam)),
        opt(ly.and_then(|l| l.s)),
        opt(ly.and_then(|l| l.t)),
        opt(ly.and_then(|l| l.e)),
    ];
    row.extend(rec.x.iter().map(|&v| f(v)));
    row.extend(rec.lambda.iter().map(|&v| f(v)));
    row
}

fn decode(rec: &csv::StringRecord, n: usize, m: usize) -> std::result::Result<TraceRecord, String> {
    let field = |i: usize| rec.get(i).unwrap_or("");
    let num = |i: usize| -> std::result::Result<f64, String> {
        field(i).parse::<f64>().map_err(|e| format!("column {i}: {e}"))
    };
    let int = |i: usize| -> std::result::Result<u64, String> {
        field(i).parse::<u64>().map_err(|e| format!("column {i}: {e}"))
    };
    let maybe = |i: usize| -> std::result::Result<Option<f64>, String> {
        match field(i) {
            "" => Ok(None),
            s => s.parse::<f64>().map(Some).map_err(|e| format!("column {i}: {e}")),
        }
    };
    let lyapunov = match maybe(13)? {
        None => None,
        Some(v) => Some(LyapunovTerms {
            v,
            dx: num(14)?,
            dlam: num(15)?,
            s: maybe(16)?,
            t: maybe(17)?,
            e: maybe(18)?,
        }),
    };
    let fixed = FIXED_COLUMNS.len();
    Ok(TraceRecord {
        k: int(0)?,
        alpha: num(1)?,
        beta: num(2)?,
        delta_max: int(3)?,
        big_delta_max: int(4)?,
        sent: int(5)?,
        dropped: int(6)?,
        delivered: int(7)?,
        cost: num(8)?,
        gap: num(9)?,
        violation: num(10)?,
        ergodic_gap: num(11)?,
        ergodic_violation: num(12)?,
        lyapunov,
        x: (fixed..fixed + n).map(num).collect::<std::result::Result<_, _>>()?,
        lambda: (fixed + n..fixed + n + m).map(num).collect::<std::result::Result<_, _>>()?,
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn record(k: u64, x: Vec<f64>, lambda: Vec<f64>, ly: Option<LyapunovTerms>) -> TraceRecord {
        TraceRecord {
            k,
            alpha: 0.5,
            beta: 0.25,
            delta_max: 2,
            big_delta_max: 1,
            sent: 3,
            dropped: 1,
            delivered: 2,
            cost: 1.0 / 3.0,
            gap: 1e-13,
            violation: 0.0,
            ergodic_gap: 7.0,
            ergodic_violation: 0.1,
            lyapunov: ly,
            x,
            lambda,
        }
    }

    proptest! {
        #[test]
        fn csv_roundtrip_is_exact(xs in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 3), 1..6),
                                  ls in prop::collection::vec(0.0f64..1e3, 2)) {
            let initial = TraceRecord::initial(vec![0.0; 3], vec![0.0; 2], 0.0, 1.0, 1.0);
            let records = xs.iter().enumerate().map(|(i, x)| {
                let ly = (i % 2 == 0).then_some(LyapunovTerms { v: x[0], dx: 0.5, dlam: 0.25, s: Some(x[1]), t: None, e: Some(1.5) });
                record(i as u64 + 1, x.clone(), ls.clone(), ly)
            }).collect();
            let trace = RunTrace { algorithm: "t".into(), lambda_max: 4.0, initial, records };
            let bytes = trace.to_csv_bytes().unwrap();
            let back = RunTrace::read_csv(&bytes[..], "t", 4.0).unwrap();
            prop_assert_eq!(back, trace);
        }
    }

    #[test]
    fn rejects_bad_header_and_ragged_rows() {
        assert!(RunTrace::read_csv("a,b\n1,2\n".as_bytes(), "t", 1.0).is_err());
        let initial = TraceRecord::initial(vec![0.0], vec![0.0], 0.0, 1.0, 1.0);
        let trace = RunTrace {
            algorithm: "t".into(),
            lambda_max: 1.0,
            initial,
            records: vec![],
        };
        let mut text = String::from_utf8(trace.to_csv_bytes().unwrap()).unwrap();
        text.push_str("1,0.5\n");
        assert!(RunTrace::read_csv(text.as_bytes(), "t", 1.0).is_err());
    }
}
