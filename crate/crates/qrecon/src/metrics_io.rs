//! Comma-separated metrics and sweep tables.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use qrecon_core::experiments::{MetricsLog, SweepRow};

use crate::error::{Error, Result};

pub const METRICS_HEADER: &str = "epoch,loss,mse,infidelity,metric,value,test_size,seed";
pub const SWEEP_HEADER: &str = "size,mean,std,best,seeds";

fn field(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x:.16e}")
    }
}

/// One row per epoch, then a `final` row with the test metric.
///
/// Wall-clock time is deliberately left out so reruns produce identical files.
pub fn metrics_csv(log: &MetricsLog) -> String {
    let mut out = String::new();
    writeln!(out, "{METRICS_HEADER}").unwrap();
    for e in &log.epochs {
        writeln!(out, "{},{},{},{},,,,", e.epoch, field(e.loss), field(e.mse), field(e.infidelity)).unwrap();
    }
    writeln!(
        out,
        "final,,,,{},{},{},{}",
        log.final_metric.name(),
        field(log.final_metric.value()),
        log.test_size,
        log.seed
    )
    .unwrap();
    out
}

/// `seeds` is a `;`-separated list inside one field.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    writeln!(out, "{SWEEP_HEADER}").unwrap();
    for r in rows {
        let seeds: Vec<String> = r.seeds.iter().map(u64::to_string).collect();
        writeln!(
            out,
            "{},{},{},{},{}",
            r.size,
            field(r.mean),
            field(r.std),
            field(r.best),
            seeds.join(";")
        )
        .unwrap();
    }
    out
}

/// Header `x,y,z,nx,ny,nz`: clean then noisy Bloch coordinates.
pub fn cloud_csv(points: &[([f64; 3], [f64; 3])]) -> String {
    let mut out = String::from("x,y,z,nx,ny,nz\n");
    for (c, n) in points {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            c[0], c[1], c[2], n[0], n[1], n[2]
        )
        .unwrap();
    }
    out
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
