//! JSON file schemas: algebras and products as sparse coefficient triples,
//! metrics and forms as dense matrices, linear representations as matrix
//! lists.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra::{BilinearProduct, LieAlgebra};
use crate::connection::{MetricTensor, SymplecticForm};
use crate::error::{Error, Result};
use crate::projective::LinearRep;
use crate::tensor::Tensor3;

/// `{ "dim": n, "bracket": [[i,j,k,value],...], "product": [[i,j,k,value],...] }`
/// with 0-based indices; both coefficient lists are optional. The triples are
/// raw tensor entries, so a bracket file lists both orientations
/// (`[0,1,1,1.0]` and `[1,0,1,-1.0]`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bracket: Option<Vec<(usize, usize, usize, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product: Option<Vec<(usize, usize, usize, f64)>>,
}

impl AlgebraFile {
    pub fn algebra(&self) -> Result<Option<LieAlgebra>> {
        let Some(entries) = &self.bracket else {
            return Ok(None);
        };
        self.check_indices(entries)?;
        Ok(Some(LieAlgebra::new(Tensor3::from_triples(
            self.dim, entries,
        ))?))
    }

    pub fn product(&self) -> Result<Option<BilinearProduct>> {
        let Some(entries) = &self.product else {
            return Ok(None);
        };
        self.check_indices(entries)?;
        Ok(Some(BilinearProduct::new(Tensor3::from_triples(
            self.dim, entries,
        ))))
    }

    fn check_indices(&self, entries: &[(usize, usize, usize, f64)]) -> Result<()> {
        for &(i, j, k, _) in entries {
            if i >= self.dim || j >= self.dim || k >= self.dim {
                return Err(Error::InvalidParameter(format!(
                    "index ({i},{j},{k}) out of range for dim {}",
                    self.dim
                )));
            }
        }
        Ok(())
    }

    pub fn from_product(p: &BilinearProduct, bracket: Option<&LieAlgebra>) -> Self {
        Self {
            dim: p.dim(),
            bracket: bracket.map(|a| a.constants().triples()),
            product: Some(p.coefficients().triples()),
        }
    }
}

/// Dense row-major matrix, for metrics and forms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn to_dmatrix(&self) -> Result<DMatrix<f64>> {
        let n = self.rows.len();
        for r in &self.rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
        }
        Ok(DMatrix::from_fn(n, n, |i, j| self.rows[i][j]))
    }

    pub fn metric(&self) -> Result<MetricTensor> {
        MetricTensor::new(self.to_dmatrix()?)
    }

    pub fn symplectic(&self) -> Result<SymplecticForm> {
        SymplecticForm::new(self.to_dmatrix()?)
    }
}

/// Linear representation: one square matrix per source basis vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearRepFile {
    pub matrices: Vec<Vec<Vec<f64>>>,
}

impl LinearRepFile {
    pub fn to_rep(&self) -> Result<LinearRep> {
        let mats = self
            .matrices
            .iter()
            .map(|m| {
                let n = m.len();
                for r in m {
                    if r.len() != n {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            got: r.len(),
                        });
                    }
                }
                Ok(DMatrix::from_fn(n, n, |i, j| m[i][j]))
            })
            .collect::<Result<Vec<_>>>()?;
        LinearRep::new(mats)
    }
}
