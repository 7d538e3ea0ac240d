//! Versioned plain-text model files.
//!
//! ```text
//! qrecon-model 1
//! dims 3 128 128 3
//! head unit_norm 1.0000000000000000e0
//! meta task reconstruct
//! layer 0
//! w <fan_out values>      one line per input unit
//! b <fan_out values>
//! ...
//! end
//! ```
//!
//! Every float is written with 17 significant digits, so loading and saving
//! again reproduces the file byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use qrecon_core::nn::{HeadSpec, MlpModel, NormMode};

use crate::error::{Error, Result};

pub const MAGIC: &str = "qrecon-model";
pub const VERSION: u32 = 1;

/// Provenance stored next to the parameters.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModelMeta {
    pub task: Option<String>,
    pub loss: Option<String>,
    pub qubits: Option<usize>,
    /// `pure`/`mixed` for reconstruction, `IN`/`N` for classification.
    pub data_kind: Option<String>,
    /// One spec for reconstruction, one per class for classification.
    pub channels: Vec<String>,
    /// Seed used for initialisation and shuffling.
    pub seed: Option<u64>,
    /// Seed of the training set, used to flag evaluation on training data.
    pub train_data_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub model: MlpModel,
    pub meta: ModelMeta,
}

fn push_floats(out: &mut String, tag: &str, xs: &[f64]) {
    out.push_str(tag);
    for x in xs {
        write!(out, " {x:.16e}").unwrap();
    }
    out.push('\n');
}

fn head_line(head: &HeadSpec) -> String {
    match *head {
        HeadSpec::Linear => "head linear".into(),
        HeadSpec::UnitNorm { target_norm } => format!("head unit_norm {target_norm:.16e}"),
        HeadSpec::PurityRescale { target_purity, mode } => {
            format!("head purity_rescale {target_purity:.16e} {}", mode.as_str())
        }
        HeadSpec::Softmax => "head softmax".into(),
    }
}

pub fn to_text(file: &ModelFile) -> String {
    let model = &file.model;
    let mut out = String::new();
    writeln!(out, "{MAGIC} {VERSION}").unwrap();
    let dims: Vec<String> = model.dims().iter().map(|d| d.to_string()).collect();
    writeln!(out, "dims {}", dims.join(" ")).unwrap();
    writeln!(out, "{}", head_line(model.head())).unwrap();
    let m = &file.meta;
    let mut meta = |key: &str, value: Option<String>| {
        if let Some(v) = value {
            writeln!(out, "meta {key} {v}").unwrap();
        }
    };
    meta("task", m.task.clone());
    meta("loss", m.loss.clone());
    meta("qubits", m.qubits.map(|q| q.to_string()));
    meta("data_kind", m.data_kind.clone());
    meta("channels", (!m.channels.is_empty()).then(|| m.channels.join(";")));
    meta("seed", m.seed.map(|s| s.to_string()));
    meta("train_data_seed", m.train_data_seed.map(|s| s.to_string()));
    for k in 0..model.layers() {
        writeln!(out, "layer {k}").unwrap();
        let fan_out = model.dims()[k + 1];
        for row in model.weights(k).chunks_exact(fan_out) {
            push_floats(&mut out, "w", row);
        }
        push_floats(&mut out, "b", model.biases(k));
    }
    out.push_str("end\n");
    out
}

struct Lines<'a> {
    path: &'a Path,
    inner: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<(usize, &'a str)> {
        self.inner
            .next()
            .map(|(i, l)| (i + 1, l))
            .ok_or_else(|| Error::parse(self.path, 0, "unexpected end of file"))
    }

    fn peek_tag(&mut self) -> Option<&'a str> {
        self.inner.peek().and_then(|(_, l)| l.split_whitespace().next())
    }

    /// Next line, which must start with `tag`; returns the remainder.
    fn expect(&mut self, tag: &str) -> Result<(usize, &'a str)> {
        let (no, line) = self.next()?;
        match line.strip_prefix(tag) {
            Some(rest) if rest.is_empty() || rest.starts_with(' ') => Ok((no, rest.trim_start())),
            _ => Err(Error::parse(self.path, no, format!("expected `{tag}`"))),
        }
    }
}

fn parse_floats(path: &Path, line: usize, text: &str, expected: usize) -> Result<Vec<f64>> {
    let values = text
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|e| Error::parse(path, line, format!("{t:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    if values.len() != expected {
        return Err(Error::parse(
            path,
            line,
            format!("expected {expected} values, found {}", values.len()),
        ));
    }
    Ok(values)
}

fn parse_head(path: &Path, line: usize, text: &str) -> Result<HeadSpec> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    let float = |t: &str| {
        t.parse::<f64>()
            .map_err(|e| Error::parse(path, line, format!("{t:?}: {e}")))
    };
    match parts.as_slice() {
        ["linear"] => Ok(HeadSpec::Linear),
        ["softmax"] => Ok(HeadSpec::Softmax),
        ["unit_norm", c] => Ok(HeadSpec::UnitNorm { target_norm: float(c)? }),
        ["purity_rescale", p, mode] => Ok(HeadSpec::PurityRescale {
            target_purity: float(p)?,
            mode: NormMode::parse(mode)
                .ok_or_else(|| Error::parse(path, line, format!("unknown norm mode {mode:?}")))?,
        }),
        _ => Err(Error::parse(path, line, format!("unknown head {text:?}"))),
    }
}

/// Parses a model file; `path` only labels errors.
pub fn from_text(text: &str, path: &Path) -> Result<ModelFile> {
    let mut lines = Lines {
        path,
        inner: text.lines().enumerate().peekable(),
    };
    let (no, version) = lines.expect(MAGIC)?;
    if version != VERSION.to_string() {
        return Err(Error::parse(path, no, format!("unsupported model version {version:?}")));
    }
    let (no, dims_text) = lines.expect("dims")?;
    let dims = dims_text
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|e| Error::parse(path, no, format!("{t:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    if dims.len() < 2 {
        return Err(Error::parse(path, no, "need at least two layer widths"));
    }
    let (no, head_text) = lines.expect("head")?;
    let head = parse_head(path, no, head_text)?;

    let mut meta = ModelMeta::default();
    while lines.peek_tag() == Some("meta") {
        let (no, rest) = lines.expect("meta")?;
        let (key, value) = rest
            .split_once(' ')
            .ok_or_else(|| Error::parse(path, no, "meta line needs a key and a value"))?;
        let int = |v: &str| {
            v.parse::<u64>()
                .map_err(|e| Error::parse(path, no, format!("{key}: {e}")))
        };
        match key {
            "task" => meta.task = Some(value.into()),
            "loss" => meta.loss = Some(value.into()),
            "qubits" => meta.qubits = Some(int(value)? as usize),
            "data_kind" => meta.data_kind = Some(value.into()),
            "channels" => meta.channels = value.split(';').map(String::from).collect(),
            "seed" => meta.seed = Some(int(value)?),
            "train_data_seed" => meta.train_data_seed = Some(int(value)?),
            other => return Err(Error::parse(path, no, format!("unknown meta key {other:?}"))),
        }
    }

    let mut theta = Vec::with_capacity(qrecon_core::nn::parameter_count(&dims));
    for k in 0..dims.len() - 1 {
        let (no, idx) = lines.expect("layer")?;
        if idx != k.to_string() {
            return Err(Error::parse(path, no, format!("expected layer {k}")));
        }
        for _ in 0..dims[k] {
            let (no, row) = lines.expect("w")?;
            theta.extend(parse_floats(path, no, row, dims[k + 1])?);
        }
        let (no, row) = lines.expect("b")?;
        theta.extend(parse_floats(path, no, row, dims[k + 1])?);
    }
    let (no, rest) = lines.expect("end")?;
    if !rest.is_empty() {
        return Err(Error::parse(path, no, "trailing text after `end`"));
    }
    if let Ok((no, _)) = lines.next() {
        return Err(Error::parse(path, no, "content after `end`"));
    }
    let model = MlpModel::from_parts(dims, head, theta).map_err(|e| Error::parse(path, 2, e.to_string()))?;
    Ok(ModelFile { model, meta })
}

pub fn save_model(path: impl AsRef<Path>, file: &ModelFile) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_text(file)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelFile> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_text(&text, path)
}
