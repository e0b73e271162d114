//! State files and output formatting.
//!
//! Pure states are stored as `{"n_qubits": n, "amplitudes": [[re, im], ...]}`
//! and density matrices as `{"n_qubits": n, "matrix": [[[re, im], ...], ...]}`
//! in row-major order.

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{DensityMatrix, PureState, C64};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateJson {
    n_qubits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<[f64; 2]>>>,
}

/// Contents of a state file.
#[derive(Debug, Clone)]
pub enum StateInput {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl StateInput {
    pub fn n_qubits(&self) -> usize {
        match self {
            Self::Pure(p) => p.n_qubits(),
            Self::Mixed(r) => r.n_qubits(),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            Self::Pure(p) => p.projector(),
            Self::Mixed(r) => r.clone(),
        }
    }

    /// The pure state, also for a rank-1 density matrix.
    pub fn to_pure(&self) -> Result<PureState> {
        match self {
            Self::Pure(p) => Ok(p.clone()),
            Self::Mixed(r) => {
                let rank = r.numerical_rank();
                if rank != 1 {
                    return Err(Error::Rank {
                        rank,
                        expected: "1",
                    });
                }
                let (_, vectors) = r.eigen();
                PureState::new(vectors.into_iter().next().expect("nonempty"))
            }
        }
    }
}

fn complex(pair: [f64; 2]) -> C64 {
    C64::new(pair[0], pair[1])
}

/// Parses a state from its JSON text.
pub fn parse_state(text: &str) -> Result<StateInput> {
    let raw: StateJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let dim = 1usize
        .checked_shl(raw.n_qubits as u32)
        .filter(|_| raw.n_qubits < 32)
        .ok_or_else(|| Error::Parse(format!("n_qubits {} is too large", raw.n_qubits)))?;
    match (raw.amplitudes, raw.matrix) {
        (Some(a), None) => {
            if a.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: a.len(),
                });
            }
            Ok(StateInput::Pure(PureState::new(
                a.into_iter().map(complex).collect(),
            )?))
        }
        (None, Some(rows)) => {
            if rows.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: rows.len(),
                });
            }
            if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
                return Err(Error::Dimension {
                    expected: dim,
                    got: bad.len(),
                });
            }
            let m = DMatrix::from_fn(dim, dim, |i, j| complex(rows[i][j]));
            Ok(StateInput::Mixed(DensityMatrix::new(m)?))
        }
        _ => Err(Error::Parse(
            "state needs exactly one of `amplitudes` or `matrix`".into(),
        )),
    }
}

pub fn read_state(path: &Path) -> Result<StateInput> {
    let text = std::fs::read_to_string(path)?;
    parse_state(&text)
}

pub fn pure_to_json(psi: &PureState) -> serde_json::Value {
    serde_json::to_value(StateJson {
        n_qubits: psi.n_qubits(),
        amplitudes: Some(psi.amplitudes().iter().map(|z| [z.re, z.im]).collect()),
        matrix: None,
    })
    .expect("plain data")
}

pub fn density_to_json(rho: &DensityMatrix) -> serde_json::Value {
    let m = rho.matrix();
    serde_json::to_value(StateJson {
        n_qubits: rho.n_qubits(),
        amplitudes: None,
        matrix: Some(
            (0..m.nrows())
                .map(|i| {
                    (0..m.ncols())
                        .map(|j| [m[(i, j)].re, m[(i, j)].im])
                        .collect()
                })
                .collect(),
        ),
    })
    .expect("plain data")
}

/// A float with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// JSON formatter writing every float with 17 significant digits.
struct Digits17<'a>(serde_json::ser::PrettyFormatter<'a>);

impl serde_json::ser::Formatter for Digits17<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> std::io::Result<()> {
        w.write_all(fmt17(v).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> std::io::Result<()> {
        self.write_f64(w, v as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> std::io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> std::io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with 17-digit floats. Non-finite floats become `null`.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let fmt = Digits17(serde_json::ser::PrettyFormatter::new());
    let mut ser = serde_json::Serializer::with_formatter(&mut out, fmt);
    value.serialize(&mut ser).expect("serializable value");
    String::from_utf8(out).expect("JSON is UTF-8")
}
