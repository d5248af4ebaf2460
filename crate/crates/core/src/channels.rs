//! States, Kraus maps and their Choi representation.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, ZERO};
use crate::tol;

/// Hermitian, unit-trace, positive-semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates at the structural tolerance.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, tol::STRUCTURAL)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        let herm = matrix.hermiticity_residual();
        if herm > tol {
            return Err(Error::InvalidState(format!(
                "not Hermitian (residual {herm:.3e})"
            )));
        }
        let tr = matrix.trace();
        if (tr - 1.0).norm() > tol {
            return Err(Error::InvalidState(format!(
                "trace is {:.17} {:+.3e}i, expected 1",
                tr.re, tr.im
            )));
        }
        let min = hermitian_eig(&matrix, tol)?.min_eigenvalue();
        if min < -tol {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { matrix })
    }

    /// `|psi><psi|` for a normalized vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        Self::new(ComplexMatrix::outer(psi, psi)?)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

impl AsRef<ComplexMatrix> for DensityMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// Ordered Kraus operators of a CP map `rho -> sum_k K_k rho K_k^†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausMap {
    dim: usize,
    operators: Vec<ComplexMatrix>,
    trace_preserving: bool,
}

impl KrausMap {
    /// Builds a map without asserting trace preservation.
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or(Error::Empty("Kraus operator list"))?;
        let dim = first.dim();
        if let Some(bad) = operators.iter().find(|k| k.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self {
            dim,
            operators,
            trace_preserving: false,
        })
    }

    /// Builds a map and asserts the completeness condition at the model tolerance.
    pub fn trace_preserving(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let mut map = Self::new(operators)?;
        let defect = completeness_defect(&map);
        if defect > tol::MODEL {
            return Err(Error::CompletenessViolated {
                defect,
                tol: tol::MODEL,
            });
        }
        map.trace_preserving = true;
        Ok(map)
    }

    pub fn identity(dim: usize) -> Self {
        Self::unitary(ComplexMatrix::identity(dim))
    }

    /// Single-operator channel `rho -> U rho U^†`; `u` is assumed unitary.
    pub fn unitary(u: ComplexMatrix) -> Self {
        Self {
            dim: u.dim(),
            operators: vec![u],
            trace_preserving: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn into_operators(self) -> Vec<ComplexMatrix> {
        self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    /// `sum_k K_k m K_k^†` on an arbitrary operator.
    pub fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: m.dim(),
            });
        }
        let mut out = ComplexMatrix::zeros(self.dim);
        for k in &self.operators {
            out = &out + &(&(k * m) * &k.adjoint());
        }
        Ok(out)
    }

    /// Operators of both maps in sequence. The result is not flagged trace-preserving.
    pub fn union(&self, other: &KrausMap) -> Result<KrausMap> {
        let mut ops = self.operators.clone();
        ops.extend(other.operators.iter().cloned());
        KrausMap::new(ops)
    }

    /// `K'_k = sum_l u[l, k] K_l` for a square mixing matrix `u`; unitary `u`
    /// leaves the induced superoperator unchanged.
    pub fn mix(&self, u: &ComplexMatrix) -> Result<KrausMap> {
        if u.dim() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: u.dim(),
            });
        }
        let ops = (0..self.len())
            .map(|k| {
                let mut acc = ComplexMatrix::zeros(self.dim);
                for (l, kl) in self.operators.iter().enumerate() {
                    acc = &acc + &kl.scale(u[(l, k)]);
                }
                acc
            })
            .collect();
        Ok(KrausMap {
            dim: self.dim,
            operators: ops,
            trace_preserving: self.trace_preserving,
        })
    }

    /// Left-multiplies every operator by `u`. Completeness is unchanged for unitary `u`.
    pub fn left_multiply(&self, u: &ComplexMatrix) -> Result<KrausMap> {
        if u.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: u.dim(),
            });
        }
        Ok(KrausMap {
            dim: self.dim,
            operators: self.operators.iter().map(|k| u * k).collect(),
            trace_preserving: self.trace_preserving,
        })
    }
}

/// Applies a map to a state; the result is validated at the model tolerance,
/// so a map that is not trace-preserving is reported as an invalid output state.
pub fn apply_map(map: &KrausMap, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let out = map.apply(rho.matrix())?;
    DensityMatrix::with_tolerance(out, tol::MODEL)
}

/// `|| sum_k K_k^† K_k - I ||_max`.
pub fn completeness_defect(map: &KrausMap) -> f64 {
    let mut s = ComplexMatrix::zeros(map.dim);
    for k in &map.operators {
        s = &s + &(&k.adjoint() * k);
    }
    s.max_abs_diff(&ComplexMatrix::identity(map.dim))
}

/// Unnormalized Choi matrix `sum_{a,b} |a><b| ⊗ Phi(|a><b|)`, trace `dim` for a
/// trace-preserving map.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    matrix: ComplexMatrix,
    dim: usize,
}

impl ChoiMatrix {
    /// Wraps an explicit `dim^2 x dim^2` Hermitian matrix, e.g. the Choi matrix of a non-CP map.
    pub fn new(matrix: ComplexMatrix, dim: usize) -> Result<Self> {
        if matrix.dim() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: matrix.dim(),
            });
        }
        let residual = matrix.hermiticity_residual();
        if residual > tol::STRUCTURAL {
            return Err(Error::NotHermitian {
                residual,
                tol: tol::STRUCTURAL,
            });
        }
        Ok(Self { matrix, dim })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

pub fn choi_matrix(map: &KrausMap) -> ChoiMatrix {
    let d = map.dim;
    let n = d * d;
    let mut c = ComplexMatrix::zeros(n);
    for k in &map.operators {
        // vec index a*d + i holds K[i, a]
        let v: Vec<C64> = (0..n).map(|idx| k[(idx % d, idx / d)]).collect();
        for r in 0..n {
            if v[r] == ZERO {
                continue;
            }
            for s in 0..n {
                c[(r, s)] += v[r] * v[s].conj();
            }
        }
    }
    ChoiMatrix { matrix: c, dim: d }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpVerdict {
    pub is_cp: bool,
    pub min_eigenvalue: f64,
}

pub fn cp_verdict(choi: &ChoiMatrix, tol: f64) -> Result<CpVerdict> {
    let min_eigenvalue = hermitian_eig(&choi.matrix, 1e-10)?.min_eigenvalue();
    Ok(CpVerdict {
        is_cp: min_eigenvalue >= -tol,
        min_eigenvalue,
    })
}

/// Frobenius distance between Choi matrices; zero iff the maps agree as superoperators.
pub fn channel_distance(a: &KrausMap, b: &KrausMap) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        });
    }
    Ok((choi_matrix(a).matrix() - choi_matrix(b).matrix()).frobenius_norm())
}
