//! JSON and CSV renderings of the analysis outputs.

use std::path::Path;

use lagmotif_core::follow::mask_runs;
use lagmotif_core::{FollowReport, FollowingMotifSet, MatrixProfile, MetricsReport, SweepRow};
use serde::Serialize;

use crate::evaluate::Evaluation;
use crate::io::{write_atomic, IoError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn finish(writer: csv::Writer<Vec<u8>>) -> String {
    let bytes = writer.into_inner().expect("in-memory writer");
    String::from_utf8(bytes).expect("csv output is utf-8")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// One `pair` row per aligned pair, then one `interval` row per maximal run
/// of each mask. Intervals are half-open.
pub fn follow_report_csv(report: &FollowReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "kind",
        "series",
        "start",
        "end",
        "leader_index",
        "follower_index",
    ])
    .unwrap();
    for &(l, f) in &report.aligned_pairs {
        w.write_record(["pair", "", "", "", &l.to_string(), &f.to_string()])
            .unwrap();
    }
    for (series, mask) in [
        ("leader", &report.leader_mask),
        ("follower", &report.follower_mask),
    ] {
        for (start, end) in mask_runs(mask) {
            w.write_record([
                "interval",
                series,
                &start.to_string(),
                &end.to_string(),
                "",
                "",
            ])
            .unwrap();
        }
    }
    finish(w)
}

pub fn motif_set_csv(set: &FollowingMotifSet) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["leader_start", "follower_start", "lag", "distance"])
        .unwrap();
    for p in &set.pairs {
        w.write_record([
            p.leader_start.to_string(),
            p.follower_start.to_string(),
            p.lag.to_string(),
            p.distance.to_string(),
        ])
        .unwrap();
    }
    finish(w)
}

pub fn matrix_profile_csv(mp: &MatrixProfile) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["index", "distance", "neighbor"]).unwrap();
    for (i, (d, j)) in mp.profile.iter().zip(&mp.indices).enumerate() {
        w.write_record([i.to_string(), d.to_string(), j.to_string()])
            .unwrap();
    }
    finish(w)
}

pub fn metrics_csv(m: &MetricsReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["precision", "recall", "f1", "accuracy"])
        .unwrap();
    w.write_record([m.precision, m.recall, m.f1, m.accuracy].map(|v| v.to_string()))
        .unwrap();
    finish(w)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "noise",
        "lead_value",
        "lead_decision",
        "precision",
        "recall",
        "f1",
        "accuracy",
    ])
    .unwrap();
    for r in rows {
        let m = r.metrics.as_ref();
        w.write_record([
            r.noise.to_string(),
            r.lead_value.to_string(),
            r.lead_decision.to_string(),
            opt(m.map(|m| m.precision)),
            opt(m.map(|m| m.recall)),
            opt(m.map(|m| m.f1)),
            opt(m.map(|m| m.accuracy)),
        ])
        .unwrap();
    }
    finish(w)
}

/// One row per family and task, with the pooled rows last.
pub fn evaluation_csv(eval: &Evaluation) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "family",
        "task",
        "method",
        "pairs",
        "tp",
        "fp",
        "fn",
        "tn",
        "precision",
        "recall",
        "f1",
        "accuracy",
    ])
    .unwrap();
    for fam in eval.families.iter().chain(std::iter::once(&eval.overall)) {
        let mut tasks = vec![("leadership", &fam.leadership)];
        if let Some(ts) = &fam.timesteps {
            tasks.push(("timesteps", ts));
        }
        if let Some(by) = &fam.timesteps_by_series {
            tasks.push(("timesteps_leader", &by.leader));
            tasks.push(("timesteps_follower", &by.follower));
        }
        for (task, score) in tasks {
            let c = &score.counts;
            let m = &score.metrics;
            w.write_record([
                fam.family.clone(),
                task.to_string(),
                eval.method.to_string(),
                fam.pairs.to_string(),
                c.tp.to_string(),
                c.fp.to_string(),
                c.fn_.to_string(),
                c.tn.to_string(),
                m.precision.to_string(),
                m.recall.to_string(),
                m.f1.to_string(),
                m.accuracy.to_string(),
            ])
            .unwrap();
        }
    }
    finish(w)
}

/// Writes `contents` atomically to `out`, or to stdout when absent.
pub fn emit(contents: &str, out: Option<&Path>) -> Result<(), IoError> {
    match out {
        Some(path) => write_atomic(path, contents.as_bytes()),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(contents.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| IoError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}
