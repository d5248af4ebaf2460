//! Orthonormal Hermitian operator bases (generalized Gell-Mann).

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{tensor_product, ComplexMatrix, I, ONE, ZERO};

/// `d^2` Hermitian operators with `tr(g_i g_j) = delta_ij` and `g_0 = I / sqrt(d)`.
///
/// Ordering after the identity: symmetric off-diagonal elements for pairs
/// `(j, k)`, `j < k`, in lexicographic order; antisymmetric elements for the
/// same pairs; then the traceless diagonal elements. At `d = 2` this is
/// `(I, X, Y, Z) / sqrt(2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorBasis {
    dim: usize,
    elements: Vec<ComplexMatrix>,
}

impl OperatorBasis {
    /// Accepts any `dim^2` Hermitian operators that are orthonormal to 1e-12.
    pub fn from_elements(dim: usize, elements: Vec<ComplexMatrix>) -> Result<Self> {
        if elements.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: elements.len(),
            });
        }
        if let Some(bad) = elements.iter().find(|g| g.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        if let Some(g) = elements
            .iter()
            .find(|g| !g.is_hermitian(crate::tol::STRUCTURAL))
        {
            return Err(Error::NotHermitian {
                residual: g.hermiticity_residual(),
                tol: crate::tol::STRUCTURAL,
            });
        }
        let r = gram_residual(&elements);
        if r > crate::tol::STRUCTURAL {
            return Err(Error::InvalidParameter(format!(
                "basis is not orthonormal (Gram residual {r:.3e})"
            )));
        }
        Ok(Self { dim, elements })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &ComplexMatrix {
        &self.elements[i]
    }

    /// `G_ij = tr(g_i g_j)`.
    pub fn gram(&self) -> Vec<Vec<C64>> {
        self.elements
            .iter()
            .map(|a| self.elements.iter().map(|b| a.trace_product(b)).collect())
            .collect()
    }

    /// Max-entry deviation of the Gram matrix from the identity.
    pub fn gram_residual(&self) -> f64 {
        gram_residual(&self.elements)
    }

    /// `{g_i ⊗ h_j}` ordered with `i` major.
    pub fn product(&self, other: &OperatorBasis) -> Vec<ComplexMatrix> {
        let mut out = Vec::with_capacity(self.len() * other.len());
        for g in &self.elements {
            for h in &other.elements {
                out.push(tensor_product(g, h));
            }
        }
        out
    }
}

pub(crate) fn gram_residual(elements: &[ComplexMatrix]) -> f64 {
    let mut r: f64 = 0.0;
    for (i, a) in elements.iter().enumerate() {
        for (j, b) in elements.iter().enumerate() {
            let want = if i == j { ONE } else { ZERO };
            r = r.max((a.trace_product(b) - want).norm());
        }
    }
    r
}

pub fn build_hermitian_basis(d: usize) -> Result<OperatorBasis> {
    if d == 0 {
        return Err(Error::InvalidParameter(
            "basis dimension must be >= 1".into(),
        ));
    }
    let mut elements = Vec::with_capacity(d * d);
    elements.push(ComplexMatrix::identity(d).scale_real(1.0 / (d as f64).sqrt()));

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let pairs: Vec<(usize, usize)> = (0..d)
        .flat_map(|j| ((j + 1)..d).map(move |k| (j, k)))
        .collect();
    for &(j, k) in &pairs {
        let mut m = ComplexMatrix::zeros(d);
        m[(j, k)] = C64::new(h, 0.0);
        m[(k, j)] = C64::new(h, 0.0);
        elements.push(m);
    }
    for &(j, k) in &pairs {
        let mut m = ComplexMatrix::zeros(d);
        m[(j, k)] = -I * h;
        m[(k, j)] = I * h;
        elements.push(m);
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut diag = vec![0.0; d];
        for x in diag.iter_mut().take(l) {
            *x = norm;
        }
        diag[l] = -(l as f64) * norm;
        elements.push(ComplexMatrix::diag_real(&diag));
    }
    Ok(OperatorBasis { dim: d, elements })
}

/// Coefficients `c_i = tr(m g_i)`.
pub fn expand(m: &ComplexMatrix, basis: &OperatorBasis) -> Result<Vec<C64>> {
    if m.dim() != basis.dim {
        return Err(Error::DimensionMismatch {
            expected: basis.dim,
            found: m.dim(),
        });
    }
    Ok(basis.elements.iter().map(|g| m.trace_product(g)).collect())
}

/// `sum_i c_i g_i`.
pub fn reconstruct(coefficients: &[C64], basis: &OperatorBasis) -> Result<ComplexMatrix> {
    if coefficients.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            found: coefficients.len(),
        });
    }
    let mut out = ComplexMatrix::zeros(basis.dim);
    for (c, g) in coefficients.iter().zip(&basis.elements) {
        if *c != ZERO {
            out = &out + &g.scale(*c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;
    use crate::random;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn qubit_basis_is_scaled_pauli() {
        let b = build_hermitian_basis(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for (g, p) in b.elements().iter().zip(pauli::all()) {
            assert!(g.max_abs_diff(&p.scale_real(s)) < 1e-15);
        }
    }

    #[test]
    fn gram_identity_brute_force() {
        for d in [2, 3, 4, 5] {
            let b = build_hermitian_basis(d).unwrap();
            assert_eq!(b.len(), d * d);
            // direct sum over matrix entries, not trace_product
            for (i, gi) in b.elements().iter().enumerate() {
                assert!(gi.is_hermitian(1e-15));
                for (j, gj) in b.elements().iter().enumerate() {
                    let mut t = ZERO;
                    for r in 0..d {
                        for c in 0..d {
                            t += gi[(r, c)] * gj[(c, r)];
                        }
                    }
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((t - want).norm() < 1e-13, "d={d} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn first_element_is_scaled_identity() {
        for d in 1..6 {
            let b = build_hermitian_basis(d).unwrap();
            assert_abs_diff_eq!(b.get(0).trace().re, (d as f64).sqrt(), epsilon = 1e-14);
        }
        let one = build_hermitian_basis(1).unwrap();
        assert_eq!(one.elements(), &[ComplexMatrix::identity(1)]);
    }

    #[test]
    fn expand_landmarks() {
        let b = build_hermitian_basis(2).unwrap();
        let r2 = std::f64::consts::SQRT_2;
        let cx = expand(&pauli::x(), &b).unwrap();
        let want = [0.0, r2, 0.0, 0.0];
        for (c, w) in cx.iter().zip(want) {
            assert_abs_diff_eq!(c.re, w, epsilon = 1e-15);
            assert_abs_diff_eq!(c.im, 0.0, epsilon = 1e-15);
        }
        let ci = expand(&ComplexMatrix::identity(2), &b).unwrap();
        assert_abs_diff_eq!(ci[0].re, r2, epsilon = 1e-15);
        assert!(ci[1..].iter().all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = build_hermitian_basis(3).unwrap();
        let m = random::complex_matrix(&mut rng, 3);
        let back = reconstruct(&expand(&m, &b).unwrap(), &b).unwrap();
        assert!(back.max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let b = build_hermitian_basis(2).unwrap();
        assert!(expand(&ComplexMatrix::identity(3), &b).is_err());
        assert!(reconstruct(&[ONE; 3], &b).is_err());
    }

    #[test]
    fn product_basis_is_orthonormal() {
        let b2 = build_hermitian_basis(2).unwrap();
        let b3 = build_hermitian_basis(3).unwrap();
        assert!(gram_residual(&b2.product(&b3)) < 1e-12);
    }
}
