use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use entangle_core::tensor::{Tensor2, Tensor3};
use entangle_core::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: malformed JSON: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{}: format error: {reason}", path.display())]
    Format { path: PathBuf, reason: String },
}

/// On-disk tensor: `dims` plus `[re, im]` amplitudes in row-major order, the
/// last index fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorFile {
    pub dims: Vec<usize>,
    pub amps: Vec<[f64; 2]>,
}

/// A validated input state. Two-entry `dims` hold bipartite states.
#[derive(Clone, Debug)]
pub enum State {
    Two(Tensor2),
    Three(Tensor3),
}

impl State {
    pub fn dims(&self) -> Vec<usize> {
        match self {
            State::Two(t) => t.dims().to_vec(),
            State::Three(t) => t.dims().to_vec(),
        }
    }
}

impl TensorFile {
    pub fn from_amps(dims: &[usize], amps: &[Complex64]) -> Self {
        Self {
            dims: dims.to_vec(),
            amps: amps.iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn from_state(state: &State) -> Self {
        match state {
            State::Two(t) => Self::from_amps(&t.dims(), t.amps()),
            State::Three(t) => Self::from_amps(&t.dims(), t.amps()),
        }
    }

    pub fn to_state(&self) -> Result<State, String> {
        if !matches!(self.dims.len(), 2 | 3) {
            return Err(format!("dims must have 2 or 3 entries, got {}", self.dims.len()));
        }
        if self.dims.contains(&0) {
            return Err(format!("dims must be positive, got {:?}", self.dims));
        }
        let want: usize = self.dims.iter().product();
        if self.amps.len() != want {
            return Err(format!("dims {:?} need {want} amplitudes, got {}", self.dims, self.amps.len()));
        }
        if let Some(i) = self.amps.iter().position(|[re, im]| !re.is_finite() || !im.is_finite()) {
            return Err(format!("amplitude {i} is not finite"));
        }
        let amps: Vec<Complex64> = self.amps.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        let state = match *self.dims.as_slice() {
            [a, b] => State::Two(Tensor2::new([a, b], amps).map_err(|e| e.to_string())?),
            [a, b, c] => State::Three(Tensor3::new([a, b, c], amps).map_err(|e| e.to_string())?),
            _ => unreachable!(),
        };
        Ok(state)
    }

    /// One amplitude per line. Floats print in shortest round-trip form, so
    /// parsing and re-emitting reproduces the bytes.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n  \"dims\": ");
        out.push_str(&serde_json::to_string(&self.dims).expect("integers serialize"));
        out.push_str(",\n  \"amps\": [");
        for (i, pair) in self.amps.iter().enumerate() {
            let sep = if i == 0 { "" } else { "," };
            let pair = serde_json::to_string(pair).expect("finite floats serialize");
            write!(out, "{sep}\n    {pair}").unwrap();
        }
        out.push_str("\n  ]\n}\n");
        out
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self, FileError> {
        serde_json::from_str(text).map_err(|source| FileError::Json { path: path.into(), source })
    }
}

impl FileError {
    /// The message without the leading path.
    pub fn detail(&self) -> String {
        match self {
            FileError::Io { source, .. } => source.to_string(),
            FileError::Json { source, .. } => format!("malformed JSON: {source}"),
            FileError::Format { reason, .. } => format!("format error: {reason}"),
        }
    }
}

pub fn read_state(path: &Path) -> Result<State, FileError> {
    let text = fs::read_to_string(path).map_err(|source| FileError::Io { path: path.into(), source })?;
    TensorFile::parse(&text, path)?
        .to_state()
        .map_err(|reason| FileError::Format { path: path.into(), reason })
}

pub fn write_file(path: &Path, file: &TensorFile) -> Result<(), FileError> {
    fs::write(path, file.to_json()).map_err(|source| FileError::Io { path: path.into(), source })
}

/// Catalog names contain `|`, `>`, `(` and the like.
pub fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.') { c } else { '_' })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_length() {
        let f = TensorFile { dims: vec![3, 3, 3], amps: vec![[0.0, 0.0]; 26] };
        assert!(f.to_state().unwrap_err().contains("need 27"));
    }

    #[test]
    fn emit_parse_emit_is_stable() {
        let amps = [Complex64::new(0.1, -1.0 / 3.0), Complex64::new(1e-300, 2.5e17)];
        let f = TensorFile::from_amps(&[1, 2], &amps);
        let text = f.to_json();
        let again = TensorFile::parse(&text, Path::new("x")).unwrap();
        assert_eq!(again, f);
        assert_eq!(again.to_json(), text);
    }

    #[test]
    fn stems_are_portable() {
        assert_eq!(file_stem("GHZ3_2+|012>"), "GHZ3_2__012_");
        assert_eq!(file_stem("XCurve(0.1)"), "XCurve_0.1_");
    }
}
