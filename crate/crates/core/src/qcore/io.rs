//! JSON exchange formats.
//!
//! * matrix: `{"dim": n, "re": [[...]], "im": [[...]]}` (`dim` is omitted for
//!   rectangular matrices and checked when present)
//! * Hamiltonian: `{"eigenvalues": [...], "projections": [matrix, ...]}`
//! * channel: `{"dim_in": n, "dim_out": m, "kraus": [matrix, ...]}`

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::channel::KrausChannel;
use super::hamiltonian::HamiltonianSpec;
use super::linalg::{c, CMatrix};
use super::state::DensityMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let rows = |f: fn(&num_complex::Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows()).map(|r| (0..m.ncols()).map(|k| f(&m[(r, k)])).collect()).collect()
        };
        Self { dim: m.is_square().then_some(m.nrows()), re: rows(|z| z.re), im: rows(|z| z.im) }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let nrows = self.re.len();
        let ncols = self.re.first().map_or(0, Vec::len);
        let bad = |msg: &str| Error::InvalidArgument(format!("malformed matrix: {msg}"));
        if nrows == 0 || ncols == 0 {
            return Err(bad("empty"));
        }
        if self.im.len() != nrows || self.re.iter().chain(&self.im).any(|r| r.len() != ncols) {
            return Err(bad("ragged or mismatched re/im rows"));
        }
        if let Some(d) = self.dim {
            if d != nrows || d != ncols {
                return Err(bad(&format!("dim {d} does not match {nrows}x{ncols}")));
            }
        }
        Ok(CMatrix::from_fn(nrows, ncols, |r, k| c(self.re[r][k], self.im[r][k])))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HamiltonianJson {
    pub eigenvalues: Vec<f64>,
    pub projections: Vec<MatrixJson>,
}

impl HamiltonianJson {
    pub fn from_spec(h: &HamiltonianSpec) -> Self {
        Self {
            eigenvalues: h.eigenvalues().to_vec(),
            projections: h.projections().iter().map(MatrixJson::from_matrix).collect(),
        }
    }

    pub fn to_spec(&self) -> Result<HamiltonianSpec> {
        let projections = self.projections.iter().map(MatrixJson::to_matrix).collect::<Result<Vec<_>>>()?;
        HamiltonianSpec::new(self.eigenvalues.clone(), projections)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelJson {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<MatrixJson>,
}

impl ChannelJson {
    pub fn from_channel(g: &KrausChannel) -> Self {
        Self { dim_in: g.dim_in(), dim_out: g.dim_out(), kraus: g.kraus().iter().map(MatrixJson::from_matrix).collect() }
    }

    pub fn to_channel(&self) -> Result<KrausChannel> {
        let kraus = self.kraus.iter().map(MatrixJson::to_matrix).collect::<Result<Vec<_>>>()?;
        let g = KrausChannel::new(kraus)?;
        if g.dim_in() != self.dim_in || g.dim_out() != self.dim_out {
            return Err(Error::InvalidChannel(format!(
                "declared {}→{} but Kraus operators are {}→{}",
                self.dim_in,
                self.dim_out,
                g.dim_in(),
                g.dim_out()
            )));
        }
        Ok(g)
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn read_density_matrix(path: &Path) -> Result<DensityMatrix> {
    DensityMatrix::new(read_json::<MatrixJson>(path)?.to_matrix()?)
}

pub fn read_hamiltonian(path: &Path) -> Result<HamiltonianSpec> {
    read_json::<HamiltonianJson>(path)?.to_spec()
}

pub fn read_channel(path: &Path) -> Result<KrausChannel> {
    read_json::<ChannelJson>(path)?.to_channel()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg;
    use proptest::prelude::*;

    #[test]
    fn hamiltonian_round_trip() {
        let h = HamiltonianSpec::from_diagonal(&[0.0, 1.0, 1.0, 3.0]).unwrap();
        let back = HamiltonianJson::from_spec(&h).to_spec().unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn channel_declared_dims_checked() {
        let mut j = ChannelJson::from_channel(&KrausChannel::amplitude_damping(0.2).unwrap());
        assert!(j.to_channel().is_ok());
        j.dim_in = 3;
        assert!(j.to_channel().is_err());
    }

    #[test]
    fn malformed_matrix_rejected() {
        let j: MatrixJson = serde_json::from_str(r#"{"dim": 2, "re": [[1, 0]], "im": [[0, 0]]}"#).unwrap();
        assert!(j.to_matrix().is_err());
        let j: MatrixJson = serde_json::from_str(r#"{"re": [[1, 0], [0]], "im": [[0, 0], [0, 0]]}"#).unwrap();
        assert!(j.to_matrix().is_err());
    }

    proptest! {
        #[test]
        fn matrix_json_round_trip(rows in 1usize..4, cols in 1usize..4, vals in proptest::collection::vec(-1e3f64..1e3, 32)) {
            let m = CMatrix::from_fn(rows, cols, |r, k| c(vals[r * 4 + k], vals[16 + r * 4 + k]));
            let text = serde_json::to_string(&MatrixJson::from_matrix(&m)).unwrap();
            let back = serde_json::from_str::<MatrixJson>(&text).unwrap().to_matrix().unwrap();
            prop_assert!(linalg::max_abs_diff(&m, &back) == 0.0);
        }
    }
}
