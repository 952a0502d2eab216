//! JSON descriptions of channels and matrices.
//!
//! A channel file is an object tagged by `kind`:
//!
//! ```json
//! {"kind": "depolarizing", "dim": 2, "p": 0.5}
//! {"kind": "kraus", "dim_in": 2, "dim_out": 2, "ops": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}
//! {"kind": "compose", "outer": {"kind": "erasure", "eps": 0.2},
//!  "inner": {"kind": "amplitude_damping", "gamma": 0.3}}
//! ```
//!
//! Matrices are arrays of rows whose entries are real numbers or `[re, im]` pairs.

use std::path::Path;

use qsdpi::channels::{build_channel, compose, tensor, ChannelFamily, QuantumChannel};
use qsdpi::contraction::ChannelExpr;
use qsdpi::weyl::{additive_channel, PmfZnZn};
use qsdpi::{c64, CMat};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

/// Row-major matrix as nested arrays.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(transparent)]
pub struct MatrixFile(pub Vec<Vec<Entry>>);

impl MatrixFile {
    pub fn to_matrix(&self) -> Result<CMat, CliError> {
        let rows = self.0.len();
        let cols = self.0.first().map_or(0, |r| r.len());
        if rows == 0 || self.0.iter().any(|r| r.len() != cols) {
            return Err(CliError::Parse("matrix rows must be nonempty and of equal length".into()));
        }
        Ok(CMat::from_fn(rows, cols, |i, j| match self.0[i][j] {
            Entry::Real(x) => c64(x, 0.0),
            Entry::Complex([re, im]) => c64(re, im),
        }))
    }

    pub fn from_matrix(m: &CMat) -> Self {
        Self(
            (0..m.rows())
                .map(|i| {
                    (0..m.cols())
                        .map(|j| {
                            let z = m[(i, j)];
                            if z.im == 0.0 {
                                Entry::Real(z.re)
                            } else {
                                Entry::Complex([z.re, z.im])
                            }
                        })
                        .collect()
                })
                .collect(),
        )
    }
}

fn two() -> usize {
    2
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelFile {
    Identity {
        dim: usize,
    },
    Depolarizing {
        #[serde(default = "two")]
        dim: usize,
        p: f64,
    },
    Dephasing {
        p: f64,
    },
    Bitflip {
        p: f64,
    },
    Erasure {
        #[serde(default = "two")]
        dim: usize,
        eps: f64,
    },
    Dephrasure {
        eps: f64,
        p: f64,
    },
    AmplitudeDamping {
        gamma: f64,
    },
    Replacer {
        dim_in: usize,
        tau: MatrixFile,
    },
    Isometry {
        v: MatrixFile,
    },
    /// Weyl-covariant channel from a pmf table, row-major in (a, b).
    Weyl {
        n: usize,
        pmf: Vec<f64>,
    },
    /// W_{a,b} ∘ M_δ.
    WeylDelta {
        n: usize,
        delta: f64,
        #[serde(default)]
        shift: [usize; 2],
    },
    Kraus {
        dim_in: usize,
        dim_out: usize,
        ops: Vec<MatrixFile>,
    },
    Compose {
        outer: Box<ChannelFile>,
        inner: Box<ChannelFile>,
    },
    Tensor {
        factors: Vec<ChannelFile>,
    },
}

impl ChannelFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = read_file(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    }

    /// Library family for leaves that have one.
    pub fn family(&self) -> Result<Option<ChannelFamily>, CliError> {
        Ok(Some(match self {
            Self::Identity { dim } => ChannelFamily::Identity { dim: *dim },
            Self::Depolarizing { dim, p } => ChannelFamily::Depolarizing { dim: *dim, p: *p },
            Self::Dephasing { p } => ChannelFamily::DephasingZ { p: *p },
            Self::Bitflip { p } => ChannelFamily::BitflipX { p: *p },
            Self::Erasure { dim, eps } => ChannelFamily::Erasure { dim: *dim, eps: *eps },
            Self::Dephrasure { eps, p } => ChannelFamily::Dephrasure { eps: *eps, p: *p },
            Self::AmplitudeDamping { gamma } => ChannelFamily::AmplitudeDamping { gamma: *gamma },
            Self::Replacer { dim_in, tau } => ChannelFamily::Replacer {
                dim_in: *dim_in,
                tau: tau.to_matrix()?,
            },
            Self::Isometry { v } => ChannelFamily::Isometry { v: v.to_matrix()? },
            Self::Weyl { n, pmf } => ChannelFamily::WeylAdditive { n: *n, pmf: pmf.clone() },
            Self::WeylDelta { n, delta, shift } => ChannelFamily::WeylAdditive {
                n: *n,
                pmf: PmfZnZn::omega_delta(*n, *delta)?
                    .shifted(shift[0], shift[1])
                    .table()
                    .to_vec(),
            },
            Self::Kraus { .. } | Self::Compose { .. } | Self::Tensor { .. } => return Ok(None),
        }))
    }

    /// Expression for the bound calculus; None when a raw Kraus leaf appears.
    pub fn expr(&self) -> Result<Option<ChannelExpr>, CliError> {
        Ok(match self {
            Self::Kraus { .. } => None,
            Self::Compose { outer, inner } => match (outer.expr()?, inner.expr()?) {
                (Some(a), Some(b)) => Some(ChannelExpr::compose(a, b)),
                _ => None,
            },
            Self::Tensor { factors } => {
                let mut it = factors.iter();
                let first = it
                    .next()
                    .ok_or_else(|| CliError::Parse("tensor needs at least one factor".into()))?;
                let mut acc = first.expr()?;
                for f in it {
                    acc = match (acc, f.expr()?) {
                        (Some(a), Some(b)) => Some(ChannelExpr::tensor(a, b)),
                        _ => None,
                    };
                }
                acc
            }
            leaf => leaf.family()?.map(ChannelExpr::leaf),
        })
    }

    pub fn build(&self) -> Result<QuantumChannel, CliError> {
        Ok(match self {
            Self::Weyl { n, pmf } => additive_channel(&PmfZnZn::new(*n, pmf.clone())?)?,
            Self::Kraus { dim_in, dim_out, ops } => {
                let ops = ops.iter().map(|k| k.to_matrix()).collect::<Result<Vec<_>, _>>()?;
                if ops.iter().any(|k| k.rows() != *dim_out || k.cols() != *dim_in) {
                    return Err(CliError::Parse(format!(
                        "kraus operators must be {dim_out} x {dim_in}"
                    )));
                }
                QuantumChannel::from_kraus(ops)?
            }
            Self::Compose { outer, inner } => compose(&outer.build()?, &inner.build()?)?,
            Self::Tensor { factors } => {
                let mut it = factors.iter();
                let first = it
                    .next()
                    .ok_or_else(|| CliError::Parse("tensor needs at least one factor".into()))?;
                let mut acc = first.build()?;
                for f in it {
                    acc = tensor(&acc, &f.build()?)?;
                }
                acc
            }
            leaf => build_channel(&leaf.family()?.expect("leaf families are known"))?,
        })
    }
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CliError::FileNotFound(path.to_path_buf()),
        _ => CliError::Io(format!("{}: {e}", path.display())),
    })
}

pub fn load_matrix(path: &Path) -> Result<CMat, CliError> {
    let text = read_file(path)?;
    let m: MatrixFile =
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    m.to_matrix()
}
