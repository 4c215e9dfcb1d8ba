//! On-disk JSON formats.
//!
//! Matrices are arrays of rows of `[re, im]` pairs; a bare real number is
//! also accepted on input. Floats are written with 17 significant digits so every
//! value reads back bit-identically.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::channel::{CqChannel, Word, WordDistribution};
use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::idcode::SimQidCode;
use crate::linalg::{c, CMatrix};
use crate::quantum::{OutcomeLabel, Pom};
use crate::transmission::QCode;

/// Arbitrary-precision integers written as decimal strings.
pub mod decimal {
    use num_bigint::BigUint;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        BigUint::parse_bytes(text.as_bytes(), 10)
            .ok_or_else(|| D::Error::custom(format!("not a decimal integer: {text:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

pub type MatrixJson = Vec<Vec<Entry>>;

pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| {
                    let z = m[(i, j)];
                    Entry::Complex([z.re, z.im])
                })
                .collect()
        })
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<CMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    if let Some(bad) = rows.iter().find(|r| r.len() != m) {
        return Err(Error::Format(format!(
            "ragged matrix: rows of length {m} and {}",
            bad.len()
        )));
    }
    Ok(CMatrix::from_fn(n, m, |i, j| match rows[i][j] {
        Entry::Real(x) => c(x, 0.0),
        Entry::Complex([re, im]) => c(re, im),
    }))
}

/// Who built a file and from what.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub builder: String,
    pub seed: Option<u64>,
    pub settings_hash: String,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    /// Optional; checked against the signals when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet_size: Option<usize>,
    /// Optional; checked against the signals when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub signals: Vec<MatrixJson>,
}

impl ChannelFile {
    pub fn from_channel(ch: &CqChannel) -> Self {
        ChannelFile {
            alphabet_size: Some(ch.alphabet_size()),
            dim: Some(ch.dim()),
            signals: ch.signals().iter().map(|s| matrix_to_json(s.matrix())).collect(),
        }
    }

    pub fn to_channel(&self) -> Result<CqChannel> {
        let matrices = self
            .signals
            .iter()
            .map(matrix_from_json)
            .collect::<Result<Vec<_>>>()?;
        let ch = CqChannel::from_matrices(matrices)?;
        if let Some(a) = self.alphabet_size {
            if a != ch.alphabet_size() {
                return Err(Error::SizeMismatch(format!(
                    "alphabet_size is {a} but {} signals are listed",
                    ch.alphabet_size()
                )));
            }
        }
        if let Some(d) = self.dim {
            if d != ch.dim() {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: ch.dim(),
                });
            }
        }
        Ok(ch)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PomFile {
    pub effects: Vec<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<OutcomeLabel>>,
}

impl PomFile {
    pub fn from_pom(pom: &Pom) -> Self {
        PomFile {
            effects: pom.effects().iter().map(matrix_to_json).collect(),
            labels: Some(pom.labels().to_vec()),
        }
    }

    pub fn to_pom(&self) -> Result<Pom> {
        let effects = self
            .effects
            .iter()
            .map(matrix_from_json)
            .collect::<Result<Vec<_>>>()?;
        match &self.labels {
            Some(l) => Pom::with_labels(effects, l.clone()),
            None => Pom::new(effects),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeFile {
    pub n: usize,
    pub codewords: Vec<Word>,
    pub decoder: PomFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl CodeFile {
    pub fn from_code(code: &QCode, provenance: Option<Provenance>) -> Self {
        CodeFile {
            n: code.n,
            codewords: code.codewords.clone(),
            decoder: PomFile::from_pom(&code.decoder),
            provenance,
        }
    }

    pub fn to_code(&self) -> Result<QCode> {
        QCode::new(self.n, self.codewords.clone(), self.decoder.to_pom()?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub family: SetFamily,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdCodeFile {
    pub n: usize,
    pub base_pom: PomFile,
    /// 0-based outcome indices into `base_pom`.
    pub subsets: Vec<Vec<usize>>,
    pub inputs: Vec<WordDistribution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl IdCodeFile {
    pub fn from_code(code: &SimQidCode, provenance: Option<Provenance>) -> Self {
        IdCodeFile {
            n: code.n,
            base_pom: PomFile::from_pom(&code.base_pom),
            subsets: code.subsets.clone(),
            inputs: code.inputs.clone(),
            provenance,
        }
    }

    pub fn to_code(&self) -> Result<SimQidCode> {
        SimQidCode::new(
            self.n,
            self.base_pom.to_pom()?,
            self.subsets.clone(),
            self.inputs.clone(),
        )
    }
}

/// Pretty printing with every float in `{:.16e}` form.
pub struct RoundTripFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl Default for RoundTripFormatter<'_> {
    fn default() -> Self {
        RoundTripFormatter {
            inner: PrettyFormatter::with_indent(b"  "),
        }
    }
}

impl Formatter for RoundTripFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Serialise with [`RoundTripFormatter`].
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, RoundTripFormatter::default());
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Format(e.to_string()))?;
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

/// Parse JSON, reporting line and column on failure.
pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        Error::Format(format!("{} at line {}, column {}", e, e.line(), e.column()))
    })
}
