//! Dense complex matrix primitives.
//!
//! Storage is row-major. For bipartite operators the composite index is
//! `i * d2 + k`, with subsystem 1 as the major index, so that `|01>` is index 1
//! and `|11>` is index 3 for a pair of qubits.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::tol;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Selects one factor of a bipartition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    First,
    Second,
}

impl Subsystem {
    pub fn other(self) -> Self {
        match self {
            Subsystem::First => Subsystem::Second,
            Subsystem::Second => Subsystem::First,
        }
    }
}

impl TryFrom<u8> for Subsystem {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Subsystem::First),
            2 => Ok(Subsystem::Second),
            _ => Err(Error::InvalidParameter(format!(
                "subsystem selector must be 1 or 2, got {v}"
            ))),
        }
    }
}

/// Dense square complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "matrix dimension must be >= 1".into(),
            ));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be >= 1");
        Self {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(dim >= 1, "matrix dimension must be >= 1");
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self { dim, entries }
    }

    /// Builds a matrix from its rows; every row must have as many entries as there are rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        Self::new(dim, rows.iter().flatten().copied().collect())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diag(values: &[C64]) -> Self {
        Self::from_fn(values.len(), |i, j| if i == j { values[i] } else { ZERO })
    }

    pub fn diag_real(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    /// `|u><v|` for two vectors of equal length.
    pub fn outer(u: &[C64], v: &[C64]) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: u.len(),
                found: v.len(),
            });
        }
        Ok(Self::from_fn(u.len(), |i, j| u[i] * v[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<C64> {
        self.entries
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&x| x * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|x| x.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Max-entry distance to `other`. Panics on a dimension mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |m_ij - conj(m_ji)|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                r = r.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        r
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    /// `tr(self^† other)`.
    pub fn hs_inner(&self, other: &Self) -> C64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.entries[i * n + k] * other.entries[k * n + i];
            }
        }
        acc
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len(), "dimension mismatch");
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for x in self.row(i) {
                write!(f, "{:+.6}{:+.6}i  ", x.re, x.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == ZERO {
                    continue;
                }
                let rrow = &rhs.entries[k * n..(k + 1) * n];
                for (o, b) in out[i * n..(i + 1) * n].iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        ComplexMatrix {
            dim: n,
            entries: out,
        }
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

/// Pauli matrices and related single-qubit constants.
pub mod pauli {
    use super::*;

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_fn(2, |i, j| if i != j { ONE } else { ZERO })
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 1) => -I,
            (1, 0) => I,
            _ => ZERO,
        })
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::diag_real(&[1.0, -1.0])
    }

    /// `[I, X, Y, Z]`.
    pub fn all() -> [ComplexMatrix; 4] {
        [identity(), x(), y(), z()]
    }
}

/// Kronecker product; entry `(i*db + k, j*db + l)` is `a[i,j] * b[k,l]`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim, b.dim);
    let n = da * db;
    let mut entries = vec![ZERO; n * n];
    for i in 0..da {
        for j in 0..da {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    entries[(i * db + k) * n + (j * db + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    ComplexMatrix { dim: n, entries }
}

/// Traces out one factor of a `d1 * d2` operator and returns the `keep` factor.
pub fn partial_trace(
    m: &ComplexMatrix,
    d1: usize,
    d2: usize,
    keep: Subsystem,
) -> Result<ComplexMatrix> {
    if d1 == 0 || d2 == 0 || d1 * d2 != m.dim {
        return Err(Error::DimensionMismatch {
            expected: d1 * d2,
            found: m.dim,
        });
    }
    let out = match keep {
        Subsystem::First => ComplexMatrix::from_fn(d1, |i, ip| {
            (0..d2).map(|k| m[(i * d2 + k, ip * d2 + k)]).sum()
        }),
        Subsystem::Second => ComplexMatrix::from_fn(d2, |k, kp| {
            (0..d1).map(|i| m[(i * d2 + k, i * d2 + kp)]).sum()
        }),
    };
    Ok(out)
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors matching `eigenvalues`.
    pub unitary: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn eigenvector(&self, p: usize) -> Vec<C64> {
        (0..self.unitary.dim)
            .map(|i| self.unitary[(i, p)])
            .collect()
    }

    /// `U diag(f(lambda)) U^†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.unitary.dim;
        let phases: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|p| self.unitary[(i, p)] * phases[p] * self.unitary[(j, p)].conj())
                .sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|l| C64::new(l, 0.0))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_REL_THRESHOLD: f64 = 1e-14;

/// Unitary that zeroes the `(p, q)` entry of the Hermitian block `[[a, h], [h*, b]]`.
///
/// Returned as `(c, s, phase)` with `G = [[c, s], [-s*phase, c*phase]]`, `phase = e^{-i arg h}`.
fn jacobi_rotation(a: f64, b: f64, h: C64) -> (f64, f64, C64) {
    let habs = h.norm();
    let phase = (h / habs).conj();
    let zeta = (b - a) / (2.0 * habs);
    let t = if zeta >= 0.0 {
        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
    } else {
        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c, phase)
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic complex Jacobi eigensolver.
///
/// Rotations visit `(p, q)` pairs in row order; iteration stops once the
/// off-diagonal Frobenius norm falls below `1e-14 * ||h||_F`. Each eigenvector
/// is rotated so its largest-magnitude component is real and positive, and
/// degenerate eigenvalues are ordered by their eigenvectors' first differing
/// component (larger first).
pub fn hermitian_eig(h: &ComplexMatrix, tol: f64) -> Result<EigenDecomposition> {
    let residual = h.hermiticity_residual();
    if residual > tol {
        return Err(Error::NotHermitian { residual, tol });
    }
    let n = h.dim;
    let mut a = ComplexMatrix::from_fn(n, |i, j| 0.5 * (h[(i, j)] + h[(j, i)].conj()));
    let mut v = ComplexMatrix::identity(n);
    let norm = a.frobenius_norm();
    let threshold = JACOBI_REL_THRESHOLD * norm;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= threshold || norm == 0.0 {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let hpq = a[(p, q)];
                if hpq.norm() <= f64::MIN_POSITIVE {
                    continue;
                }
                let (c, s, phase) = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, hpq);
                // A <- A G
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * c - akq * s * phase;
                    a[(k, q)] = akp * s + akq * c * phase;
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * c - vkq * s * phase;
                    v[(k, q)] = vkp * s + vkq * c * phase;
                }
                // A <- G^† A
                let pc = phase.conj();
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = apk * c - aqk * s * pc;
                    a[(q, k)] = apk * s + aqk * c * pc;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
            }
        }
    }

    let mut pairs: Vec<(f64, Vec<C64>)> = (0..n)
        .map(|p| {
            let mut col: Vec<C64> = (0..n).map(|i| v[(i, p)]).collect();
            fix_phase(&mut col);
            (a[(p, p)].re, col)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(Ordering::Equal));

    let degeneracy = 1e-12 * norm;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && pairs[end].0 - pairs[end - 1].0 <= degeneracy {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by(|x, y| compare_vectors(&x.1, &y.1));
        }
        start = end;
    }

    let eigenvalues = pairs.iter().map(|p| p.0).collect();
    let unitary = ComplexMatrix::from_fn(n, |i, p| pairs[p].1[i]);
    Ok(EigenDecomposition {
        eigenvalues,
        unitary,
    })
}

fn fix_phase(col: &mut [C64]) {
    let max = col.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = col
        .iter()
        .position(|x| x.norm() >= max * (1.0 - 1e-12))
        .expect("nonempty column");
    let phase = (col[pivot] / col[pivot].norm()).conj();
    for x in col.iter_mut() {
        *x *= phase;
    }
}

fn compare_vectors(x: &[C64], y: &[C64]) -> Ordering {
    const EPS: f64 = 1e-12;
    for (a, b) in x.iter().zip(y) {
        if (a.re - b.re).abs() > EPS {
            return b.re.partial_cmp(&a.re).unwrap_or(Ordering::Equal);
        }
        if (a.im - b.im).abs() > EPS {
            return b.im.partial_cmp(&a.im).unwrap_or(Ordering::Equal);
        }
    }
    Ordering::Equal
}

/// `exp(-i h t)` for Hermitian `h`.
pub fn evolution_unitary(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h, tol::STRUCTURAL)?;
    Ok(eig.map_spectrum(|l| C64::from_polar(1.0, -l * t)))
}

/// Singular values of a `rows x cols` row-major matrix, descending.
///
/// One-sided (Hestenes) Jacobi: small singular values come out with absolute
/// accuracy near machine epsilon times the largest one.
pub fn singular_values(rows: usize, cols: usize, data: &[C64]) -> Vec<f64> {
    assert_eq!(data.len(), rows * cols, "dimension mismatch");
    let mut columns: Vec<Vec<C64>> = (0..cols)
        .map(|j| (0..rows).map(|i| data[i * cols + j]).collect())
        .collect();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let alpha: f64 = columns[p].iter().map(|x| x.norm_sqr()).sum();
                let beta: f64 = columns[q].iter().map(|x| x.norm_sqr()).sum();
                let gamma: C64 = columns[p]
                    .iter()
                    .zip(&columns[q])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                if gamma.norm() <= 1e-15 * (alpha * beta).sqrt() || gamma.norm() == 0.0 {
                    continue;
                }
                rotated = true;
                let (c, s, phase) = jacobi_rotation(alpha, beta, gamma);
                for i in 0..rows {
                    let (x, y) = (columns[p][i], columns[q][i]);
                    columns[p][i] = x * c - y * s * phase;
                    columns[q][i] = x * s + y * c * phase;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = columns
        .iter()
        .map(|c| c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    sv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_tensor_identity() {
        let id = tensor_product(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert_eq!(id, ComplexMatrix::identity(4));
    }

    #[test]
    fn zz_is_diagonal() {
        let zz = tensor_product(&pauli::z(), &pauli::z());
        assert_eq!(zz, ComplexMatrix::diag_real(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn mixed_product_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random::complex_matrix(&mut rng, 2);
        let b = random::complex_matrix(&mut rng, 2);
        let c = random::complex_matrix(&mut rng, 2);
        let d = random::complex_matrix(&mut rng, 2);
        let lhs = &tensor_product(&a, &b) * &tensor_product(&c, &d);
        let rhs = tensor_product(&(&a * &c), &(&b * &d));
        assert!(lhs.max_abs_diff(&rhs) < 1e-13);
    }

    #[test]
    fn bell_state_marginal() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let phi = [C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)];
        let rho = ComplexMatrix::outer(&phi, &phi).unwrap();
        for keep in [Subsystem::First, Subsystem::Second] {
            let m = partial_trace(&rho, 2, 2, keep).unwrap();
            assert!(m.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
        }
    }

    #[test]
    fn partial_trace_of_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let r1 = random::density_matrix(&mut rng, 2);
        let r2 = random::density_matrix(&mut rng, 3);
        let m = tensor_product(r1.matrix(), r2.matrix());
        let a = partial_trace(&m, 2, 3, Subsystem::First).unwrap();
        let b = partial_trace(&m, 2, 3, Subsystem::Second).unwrap();
        assert!(a.max_abs_diff(r1.matrix()) < 1e-13);
        assert!(b.max_abs_diff(r2.matrix()) < 1e-13);
    }

    #[test]
    fn partial_trace_preserves_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random::complex_matrix(&mut rng, 4);
        // elementwise oracle: sum the diagonal directly
        let mut direct = ZERO;
        for i in 0..4 {
            direct += m.entries()[i * 4 + i];
        }
        for keep in [Subsystem::First, Subsystem::Second] {
            let r = partial_trace(&m, 2, 2, keep).unwrap();
            assert!((r.trace() - direct).norm() < 1e-13);
        }
    }

    #[test]
    fn partial_trace_rejects_bad_split() {
        let m = ComplexMatrix::identity(4);
        assert!(matches!(
            partial_trace(&m, 3, 2, Subsystem::First),
            Err(Error::DimensionMismatch {
                expected: 6,
                found: 4
            })
        ));
    }

    #[test]
    fn pauli_spectra() {
        let ez = hermitian_eig(&pauli::z(), 1e-12).unwrap();
        assert_eq!(ez.eigenvalues, vec![-1.0, 1.0]);
        let ex = hermitian_eig(&pauli::x(), 1e-12).unwrap();
        assert_abs_diff_eq!(ex.eigenvalues[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ex.eigenvalues[1], 1.0, epsilon = 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = ex.eigenvector(0);
        let v1 = ex.eigenvector(1);
        // fixed phase: the first maximal component is real positive
        assert_abs_diff_eq!(v0[0].re, h, epsilon = 1e-14);
        assert_abs_diff_eq!(v0[1].re, -h, epsilon = 1e-14);
        assert_abs_diff_eq!(v1[0].re, h, epsilon = 1e-14);
        assert_abs_diff_eq!(v1[1].re, h, epsilon = 1e-14);
    }

    #[test]
    fn random_hermitian_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let h = random::hermitian(&mut rng, 9);
        let e = hermitian_eig(&h, 1e-12).unwrap();
        let u = &e.unitary;
        let unitarity = (&u.adjoint() * u).max_abs_diff(&ComplexMatrix::identity(9));
        assert!(unitarity < 1e-12, "{unitarity}");
        assert!(e.reconstruct().max_abs_diff(&h) < 1e-12);
        assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eig_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random::hermitian(&mut rng, 6);
        let a = hermitian_eig(&h, 1e-12).unwrap();
        let b = hermitian_eig(&h.clone(), 1e-12).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(a.unitary, b.unitary);
    }

    #[test]
    fn degenerate_spectrum() {
        let e = hermitian_eig(&ComplexMatrix::identity(3).scale_real(2.0), 1e-12).unwrap();
        assert_eq!(e.eigenvalues, vec![2.0; 3]);
        assert_eq!(e.unitary, ComplexMatrix::identity(3));
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(
            hermitian_eig(&m, 1e-12),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn evolution_landmarks() {
        let zero = evolution_unitary(&ComplexMatrix::zeros(3), 1.7).unwrap();
        assert!(zero.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);

        let u = evolution_unitary(&pauli::z(), std::f64::consts::FRAC_PI_2).unwrap();
        let expected = ComplexMatrix::diag(&[-I, I]);
        assert!(u.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn evolution_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let h = random::hermitian(&mut rng, 4);
        let fwd = evolution_unitary(&h, 0.8).unwrap();
        let back = evolution_unitary(&h, -0.8).unwrap();
        assert!((&fwd * &back).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn singular_values_of_rank_one() {
        let u = [C64::new(1.0, 0.5), C64::new(-0.3, 0.0), I];
        let v = [C64::new(0.2, -1.0), C64::new(2.0, 0.0), ZERO, ONE];
        let data: Vec<C64> = u
            .iter()
            .flat_map(|a| v.iter().map(move |b| a * b))
            .collect();
        let sv = singular_values(3, 4, &data);
        let nu: f64 = u.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let nv: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        assert_abs_diff_eq!(sv[0], nu * nv, epsilon = 1e-13);
        assert!(sv[1] < 1e-14 * sv[0]);
    }

    #[test]
    fn singular_values_match_spectrum_of_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let h = random::hermitian(&mut rng, 5);
        let mut abs_eigs: Vec<f64> = hermitian_eig(&h, 1e-12)
            .unwrap()
            .eigenvalues
            .iter()
            .map(|x| x.abs())
            .collect();
        abs_eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let sv = singular_values(5, 5, h.entries());
        for (a, b) in abs_eigs.iter().zip(&sv) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }
}
