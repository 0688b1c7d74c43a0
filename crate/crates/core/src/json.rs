//! JSON interchange for matrices, states, channels and roof results.
//!
//! Square matrices serialise as `{"dim", "re", "im"}` with row-major nested
//! arrays; rectangular ones (non-square Kraus operators) use `"rows"` and
//! `"cols"` instead of `"dim"`. Floats round-trip exactly.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::channels::Channel;
use crate::quantum::{DensityMatrix, PureState};
use crate::roof::{Ensemble, RoofResult};
use crate::{CMatrix, CVector, Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix<f64>) -> Self {
        let (r, c) = m.shape();
        let re = (0..r)
            .map(|i| (0..c).map(|j| m[(i, j)].re).collect())
            .collect();
        let im = (0..r)
            .map(|i| (0..c).map(|j| m[(i, j)].im).collect())
            .collect();
        let square = r == c;
        Self {
            dim: square.then_some(r),
            rows: (!square).then_some(r),
            cols: (!square).then_some(c),
            re,
            im,
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix<f64>> {
        let (rows, cols) = match (self.dim, self.rows, self.cols) {
            (Some(d), None, None) => (d, d),
            (None, Some(r), Some(c)) => (r, c),
            _ => {
                return Err(Error::Parameter(
                    "matrix needs either \"dim\" or both \"rows\" and \"cols\"".into(),
                ))
            }
        };
        let shape_ok =
            |parts: &Vec<Vec<f64>>| parts.len() == rows && parts.iter().all(|r| r.len() == cols);
        if !shape_ok(&self.re) || !shape_ok(&self.im) {
            return Err(Error::Dimension(format!(
                "matrix entries do not match the declared {rows}x{cols} shape"
            )));
        }
        Ok(CMatrix::from_fn(rows, cols, |i, j| {
            Complex::new(self.re[i][j], self.im[i][j])
        }))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorJson {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl VectorJson {
    pub fn from_vector(v: &CVector<f64>) -> Self {
        Self {
            re: v.iter().map(|c| c.re).collect(),
            im: v.iter().map(|c| c.im).collect(),
        }
    }

    pub fn to_vector(&self) -> Result<CVector<f64>> {
        if self.re.len() != self.im.len() || self.re.is_empty() {
            return Err(Error::Dimension(
                "vector re/im lengths differ or are empty".into(),
            ));
        }
        Ok(CVector::from_iterator(
            self.re.len(),
            self.re
                .iter()
                .zip(&self.im)
                .map(|(&a, &b)| Complex::new(a, b)),
        ))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelJson {
    pub label: String,
    pub in_dim: usize,
    pub out_dim: usize,
    pub kraus: Vec<MatrixJson>,
}

impl ChannelJson {
    pub fn from_channel(c: &Channel<f64>) -> Self {
        Self {
            label: c.label().to_string(),
            in_dim: c.in_dim(),
            out_dim: c.out_dim(),
            kraus: c.kraus().iter().map(MatrixJson::from_matrix).collect(),
        }
    }

    pub fn to_channel(&self) -> Result<Channel<f64>> {
        let kraus = self
            .kraus
            .iter()
            .map(MatrixJson::to_matrix)
            .collect::<Result<Vec<_>>>()?;
        let ch = Channel::new(kraus, self.label.clone())?;
        if ch.in_dim() != self.in_dim || ch.out_dim() != self.out_dim {
            return Err(Error::Dimension(format!(
                "channel '{}' declares {}->{} but its Kraus operators are {}->{}",
                self.label,
                self.in_dim,
                self.out_dim,
                ch.in_dim(),
                ch.out_dim()
            )));
        }
        Ok(ch)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleJson {
    pub weights: Vec<f64>,
    pub states: Vec<VectorJson>,
}

impl EnsembleJson {
    pub fn from_ensemble(e: &Ensemble<f64>) -> Self {
        Self {
            weights: e.weights().to_vec(),
            states: e
                .states()
                .iter()
                .map(|s| VectorJson::from_vector(s.amplitudes()))
                .collect(),
        }
    }

    pub fn to_ensemble(&self) -> Result<Ensemble<f64>> {
        let states = self
            .states
            .iter()
            .map(|v| PureState::new(v.to_vector()?))
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(self.weights.clone(), states)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoofResultJson {
    pub value_nats: f64,
    pub upper_bound: bool,
    pub ensemble: EnsembleJson,
    pub restarts_used: usize,
    pub best_restart_index: usize,
    pub gradient_norm_at_exit: f64,
    pub converged: bool,
}

impl RoofResultJson {
    pub fn from_result(r: &RoofResult<f64>) -> Self {
        Self {
            value_nats: r.value,
            upper_bound: true,
            ensemble: EnsembleJson::from_ensemble(&r.ensemble),
            restarts_used: r.restarts_used,
            best_restart_index: r.best_restart_index,
            gradient_norm_at_exit: r.gradient_norm_at_exit,
            converged: r.converged,
        }
    }
}

pub fn density_to_json(rho: &DensityMatrix<f64>) -> MatrixJson {
    MatrixJson::from_matrix(rho.matrix())
}

pub fn density_from_json(m: &MatrixJson) -> Result<DensityMatrix<f64>> {
    DensityMatrix::new(m.to_matrix()?)
}

/// A state file holds either a density matrix or a pure state vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateJson {
    Density(MatrixJson),
    Pure(VectorJson),
}

impl StateJson {
    pub fn to_density(&self) -> Result<DensityMatrix<f64>> {
        match self {
            Self::Density(m) => density_from_json(m),
            Self::Pure(v) => Ok(PureState::new(v.to_vector()?)?.to_density()),
        }
    }
}

pub fn parse_state(text: &str) -> Result<DensityMatrix<f64>> {
    serde_json::from_str::<StateJson>(text)?.to_density()
}

pub fn parse_channel(text: &str) -> Result<Channel<f64>> {
    serde_json::from_str::<ChannelJson>(text)?.to_channel()
}

pub fn parse_matrix(text: &str) -> Result<CMatrix<f64>> {
    serde_json::from_str::<MatrixJson>(text)?.to_matrix()
}
