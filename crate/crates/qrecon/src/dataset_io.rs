//! Line-delimited dataset files.
//!
//! The first line is a JSON header; every following line is one JSON record.
//! Floats are written with 17 significant digits so a save/load cycle is exact.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use qrecon_core::qstate::{bloch_len, check_qubits, BlochVector};
use qrecon_core::sampling::{ClassDataset, ClassRecord, Dataset, InputMode, Record, StateKind, GENERATOR};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FORMAT: &str = "qrecon-dataset";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Header {
    pub format: String,
    pub version: u32,
    #[serde(rename = "type")]
    pub data_type: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel_spec: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel_specs: Option<Vec<String>>,
    pub records: usize,
    pub seed: u64,
    pub generator: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordLine {
    noisy: Vec<f64>,
    clean: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassLine {
    input: Vec<f64>,
    label: usize,
}

/// Either kind of dataset file.
#[derive(Debug, Clone, PartialEq)]
pub enum DataFile {
    Reconstruction(Dataset),
    Classification(ClassDataset),
}

impl DataFile {
    pub fn seed(&self) -> u64 {
        match self {
            DataFile::Reconstruction(d) => d.seed,
            DataFile::Classification(d) => d.seed,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            DataFile::Reconstruction(d) => d.len(),
            DataFile::Classification(d) => d.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn push_floats(line: &mut String, xs: &[f64]) {
    line.push('[');
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        write!(line, "{x:.16e}").unwrap();
    }
    line.push(']');
}

fn header_line(header: &Header) -> String {
    serde_json::to_string(header).expect("header serialises")
}

pub fn reconstruction_header(ds: &Dataset) -> Header {
    Header {
        format: FORMAT.into(),
        version: VERSION,
        data_type: "reconstruction".into(),
        n: ds.n,
        kind: Some(ds.kind.as_str().into()),
        mode: None,
        channel_spec: Some(ds.channel_spec.clone()),
        channel_specs: None,
        records: ds.len(),
        seed: ds.seed,
        generator: GENERATOR.into(),
    }
}

pub fn classification_header(ds: &ClassDataset) -> Header {
    Header {
        format: FORMAT.into(),
        version: VERSION,
        data_type: "classification".into(),
        n: ds.n,
        kind: None,
        mode: Some(ds.mode.as_str().into()),
        channel_spec: None,
        channel_specs: Some(ds.channel_specs.clone()),
        records: ds.len(),
        seed: ds.seed,
        generator: GENERATOR.into(),
    }
}

pub fn write_dataset<W: Write>(mut w: W, ds: &Dataset) -> std::io::Result<()> {
    writeln!(w, "{}", header_line(&reconstruction_header(ds)))?;
    let mut line = String::new();
    for rec in &ds.records {
        line.clear();
        line.push_str("{\"noisy\":");
        push_floats(&mut line, rec.noisy.components());
        line.push_str(",\"clean\":");
        push_floats(&mut line, rec.clean.components());
        line.push('}');
        writeln!(w, "{line}")?;
    }
    w.flush()
}

pub fn write_class_dataset<W: Write>(mut w: W, ds: &ClassDataset) -> std::io::Result<()> {
    writeln!(w, "{}", header_line(&classification_header(ds)))?;
    let mut line = String::new();
    for rec in &ds.records {
        line.clear();
        line.push_str("{\"input\":");
        push_floats(&mut line, &rec.input);
        write!(line, ",\"label\":{}}}", rec.label).unwrap();
        writeln!(w, "{line}")?;
    }
    w.flush()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

pub fn save_dataset(path: impl AsRef<Path>, ds: &Dataset) -> Result<()> {
    let path = path.as_ref();
    write_dataset(create(path)?, ds).map_err(|e| Error::io(path, e))
}

pub fn save_class_dataset(path: impl AsRef<Path>, ds: &ClassDataset) -> Result<()> {
    let path = path.as_ref();
    write_class_dataset(create(path)?, ds).map_err(|e| Error::io(path, e))
}

/// Parses a dataset file and checks it against its own header and channel(s).
pub fn read_data_file<R: BufRead>(reader: R, path: &Path) -> Result<DataFile> {
    let mut lines = reader.lines().enumerate();
    let (_, first) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty file"))?;
    let first = first.map_err(|e| Error::io(path, e))?;
    let header: Header =
        serde_json::from_str(&first).map_err(|e| Error::parse(path, 1, format!("bad header: {e}")))?;
    if header.format != FORMAT {
        return Err(Error::parse(path, 1, format!("not a dataset file (format {:?})", header.format)));
    }
    if header.version != VERSION {
        return Err(Error::parse(path, 1, format!("unsupported version {}", header.version)));
    }
    if header.generator != GENERATOR {
        return Err(Error::parse(path, 1, format!("unknown generator {:?}", header.generator)));
    }
    check_qubits(header.n).map_err(|e| Error::parse(path, 1, e.to_string()))?;
    let b = bloch_len(header.n);
    let missing = |field: &str| Error::parse(path, 1, format!("missing header field {field:?}"));

    let mut bodies = Vec::with_capacity(header.records);
    for (i, line) in lines {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        bodies.push((i + 1, line));
    }
    if bodies.len() != header.records {
        return Err(Error::parse(
            path,
            1,
            format!("header promises {} records, found {}", header.records, bodies.len()),
        ));
    }

    let file = match header.data_type.as_str() {
        "reconstruction" => {
            let kind = header.kind.as_deref().ok_or_else(|| missing("kind"))?;
            let kind = StateKind::parse(kind)
                .ok_or_else(|| Error::parse(path, 1, format!("unknown state kind {kind:?}")))?;
            let mut records = Vec::with_capacity(bodies.len());
            for (line_no, text) in &bodies {
                let rec: RecordLine =
                    serde_json::from_str(text).map_err(|e| Error::parse(path, *line_no, e.to_string()))?;
                if rec.noisy.len() != b || rec.clean.len() != b {
                    return Err(Error::parse(path, *line_no, format!("expected {b} components per vector")));
                }
                records.push(Record {
                    noisy: BlochVector::new(header.n, rec.noisy)?,
                    clean: BlochVector::new(header.n, rec.clean)?,
                });
            }
            let ds = Dataset {
                n: header.n,
                kind,
                channel_spec: header.channel_spec.clone().ok_or_else(|| missing("channel_spec"))?,
                seed: header.seed,
                records,
            };
            ds.verify().map_err(|e| invariant_error(path, &bodies, e))?;
            DataFile::Reconstruction(ds)
        }
        "classification" => {
            let mode = header.mode.as_deref().ok_or_else(|| missing("mode"))?;
            let mode = InputMode::parse(mode)
                .ok_or_else(|| Error::parse(path, 1, format!("unknown input mode {mode:?}")))?;
            let specs = header.channel_specs.clone().ok_or_else(|| missing("channel_specs"))?;
            let mut records = Vec::with_capacity(bodies.len());
            for (line_no, text) in &bodies {
                let rec: ClassLine =
                    serde_json::from_str(text).map_err(|e| Error::parse(path, *line_no, e.to_string()))?;
                records.push(ClassRecord {
                    input: rec.input,
                    label: rec.label,
                });
            }
            let ds = ClassDataset {
                n: header.n,
                mode,
                channel_specs: specs,
                seed: header.seed,
                records,
            };
            ds.verify().map_err(|e| invariant_error(path, &bodies, e))?;
            DataFile::Classification(ds)
        }
        other => return Err(Error::parse(path, 1, format!("unknown dataset type {other:?}"))),
    };
    Ok(file)
}

/// Points record-level invariant failures at their line.
fn invariant_error(path: &Path, bodies: &[(usize, String)], err: qrecon_core::Error) -> Error {
    match err {
        qrecon_core::Error::DatasetInvariant { index, message } => {
            let line = bodies.get(index).map_or(1, |(l, _)| *l);
            Error::parse(path, line, message)
        }
        other => other.into(),
    }
}

pub fn load_data_file(path: impl AsRef<Path>) -> Result<DataFile> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_data_file(BufReader::new(file), path)
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    match load_data_file(path)? {
        DataFile::Reconstruction(ds) => Ok(ds),
        DataFile::Classification(_) => Err(Error::parse(path, 1, "expected a reconstruction dataset")),
    }
}

pub fn load_class_dataset(path: impl AsRef<Path>) -> Result<ClassDataset> {
    let path = path.as_ref();
    match load_data_file(path)? {
        DataFile::Classification(ds) => Ok(ds),
        DataFile::Reconstruction(_) => Err(Error::parse(path, 1, "expected a classification dataset")),
    }
}
