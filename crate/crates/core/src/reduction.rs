//! Subsystem Kraus representations of a composite map.
//!
//! For a composite map `{K_k}` on `H_1 ⊗ H_2` and a product initial state
//! `rho_1 ⊗ rho_2`, the reduced dynamics of subsystem 1 is
//! `rho_1 -> sum_{i,i'} b_ii' g_i rho_1 g_i'^†` with
//!
//! ```text
//! c^k_ij  = tr(K_k (g_i ⊗ h_j))
//! D^k_i   = sum_j c^k_ij h_j
//! b_ii'   = sum_k tr(D^k_i rho_2 D^k_i'^†)
//! ```
//!
//! `B = (b_ii')` is Hermitian and positive semidefinite; diagonalizing it as
//! `B = U diag(b_p) U^†` gives the subsystem Kraus operators
//! `K_p = sqrt(b_p) sum_i u_ip g_i`.

use num_complex::Complex64 as C64;

use crate::basis::{build_hermitian_basis, OperatorBasis};
use crate::channels::{channel_distance, DensityMatrix, KrausMap};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, partial_trace, singular_values, tensor_product, ComplexMatrix, Subsystem, ZERO,
};
use crate::parallel::Execution;
use crate::tol;

/// Split of a composite system of dimension `d1 * d2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bipartition {
    pub d1: usize,
    pub d2: usize,
}

impl Bipartition {
    pub fn new(d1: usize, d2: usize) -> Result<Self> {
        if d1 == 0 || d2 == 0 {
            return Err(Error::InvalidParameter(
                "bipartition factors must be >= 1".into(),
            ));
        }
        Ok(Self { d1, d2 })
    }

    pub fn qubits() -> Self {
        Self { d1: 2, d2: 2 }
    }

    pub fn composite_dim(&self) -> usize {
        self.d1 * self.d2
    }

    pub fn factor_dim(&self, s: Subsystem) -> usize {
        match s {
            Subsystem::First => self.d1,
            Subsystem::Second => self.d2,
        }
    }

    fn check_map(&self, map: &KrausMap) -> Result<()> {
        if map.dim() != self.composite_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.composite_dim(),
                found: map.dim(),
            });
        }
        Ok(())
    }
}

/// `c^k_ij`, stored `[k][i][j]` with `i` over the first basis and `j` over the second.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTensor {
    operators: usize,
    rows: usize,
    cols: usize,
    values: Vec<C64>,
}

impl CoefficientTensor {
    pub fn operators(&self) -> usize {
        self.operators
    }

    /// Length of the `i` index.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Length of the `j` index.
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> C64 {
        self.values[(k * self.rows + i) * self.cols + j]
    }

    /// Row-major `rows x cols` coefficient matrix of operator `k`.
    pub fn operator_block(&self, k: usize) -> &[C64] {
        let n = self.rows * self.cols;
        &self.values[k * n..(k + 1) * n]
    }

    /// Exchanges the roles of the two subsystems: `c'[k][j][i] = c[k][i][j]`.
    pub fn swapped(&self) -> CoefficientTensor {
        let mut values = Vec::with_capacity(self.values.len());
        for k in 0..self.operators {
            for j in 0..self.cols {
                for i in 0..self.rows {
                    values.push(self.get(k, i, j));
                }
            }
        }
        CoefficientTensor {
            operators: self.operators,
            rows: self.cols,
            cols: self.rows,
            values,
        }
    }

    /// `sum_ij c^k_ij g_i ⊗ h_j`.
    pub fn reconstruct(
        &self,
        k: usize,
        basis1: &OperatorBasis,
        basis2: &OperatorBasis,
    ) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(basis1.dim() * basis2.dim());
        for (i, g) in basis1.elements().iter().enumerate() {
            for (j, h) in basis2.elements().iter().enumerate() {
                let c = self.get(k, i, j);
                if c != ZERO {
                    out = &out + &tensor_product(g, h).scale(c);
                }
            }
        }
        out
    }
}

pub fn c_coefficients(
    map: &KrausMap,
    split: Bipartition,
    basis1: &OperatorBasis,
    basis2: &OperatorBasis,
) -> Result<CoefficientTensor> {
    split.check_map(map)?;
    for (basis, d) in [(basis1, split.d1), (basis2, split.d2)] {
        if basis.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: basis.dim(),
            });
        }
    }
    let products = basis1.product(basis2);
    let mut values = Vec::with_capacity(map.len() * products.len());
    for k in map.operators() {
        values.extend(products.iter().map(|gh| k.trace_product(gh)));
    }
    Ok(CoefficientTensor {
        operators: map.len(),
        rows: basis1.len(),
        cols: basis2.len(),
        values,
    })
}

/// The Hermitian positive-semidefinite matrix `(b_ii')`.
#[derive(Debug, Clone, PartialEq)]
pub struct BMatrix {
    pub values: ComplexMatrix,
    pub time: Option<f64>,
}

impl BMatrix {
    pub fn hermiticity_residual(&self) -> f64 {
        self.values.hermiticity_residual()
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(hermitian_eig(&self.values, 1e-10)?.min_eigenvalue())
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.values.dim();
        let mut m: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m = m.max(self.values[(i, j)].norm());
                }
            }
        }
        m
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.values.dim())
            .map(|i| self.values[(i, i)].re)
            .collect()
    }

    /// `|| sum_{i,i'} b_ii' g_i'^† g_i - I ||_max`; zero for a trace-preserving parent.
    pub fn trace_identity_residual(&self, kept_basis: &OperatorBasis) -> f64 {
        let d = kept_basis.dim();
        let mut s = ComplexMatrix::zeros(d);
        for (i, gi) in kept_basis.elements().iter().enumerate() {
            for (ip, gip) in kept_basis.elements().iter().enumerate() {
                let b = self.values[(i, ip)];
                if b != ZERO {
                    s = &s + &(&gip.adjoint() * gi).scale(b);
                }
            }
        }
        s.max_abs_diff(&ComplexMatrix::identity(d))
    }
}

/// Builds `B` from the coefficient tensor and the state of the traced-out factor,
/// whose basis indexes the `j` axis of `c`.
pub fn b_matrix(
    c: &CoefficientTensor,
    rho_traced: &DensityMatrix,
    traced_basis: &OperatorBasis,
) -> Result<BMatrix> {
    if traced_basis.len() != c.cols {
        return Err(Error::DimensionMismatch {
            expected: c.cols,
            found: traced_basis.len(),
        });
    }
    if rho_traced.dim() != traced_basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: traced_basis.dim(),
            found: rho_traced.dim(),
        });
    }
    let n = c.rows;
    let dt = traced_basis.dim();
    let mut b = ComplexMatrix::zeros(n);
    for k in 0..c.operators {
        // D^k_i = sum_j c^k_ij h_j
        let d: Vec<ComplexMatrix> = (0..n)
            .map(|i| {
                let mut acc = ComplexMatrix::zeros(dt);
                for (j, h) in traced_basis.elements().iter().enumerate() {
                    let cij = c.get(k, i, j);
                    if cij != ZERO {
                        acc = &acc + &h.scale(cij);
                    }
                }
                acc
            })
            .collect();
        let d_rho: Vec<ComplexMatrix> = d.iter().map(|di| di * rho_traced.matrix()).collect();
        for i in 0..n {
            for ip in 0..n {
                // tr(D_i rho D_i'^†) = sum_ab (D_i rho)_ab conj(D_i'_ab)
                b[(i, ip)] += d_rho[i].hs_inner(&d[ip]).conj();
            }
        }
    }
    Ok(BMatrix {
        values: b,
        time: None,
    })
}

#[derive(Debug, Clone)]
pub struct ReductionResult {
    pub kept: Subsystem,
    pub coefficients: CoefficientTensor,
    pub b: BMatrix,
    /// All eigenvalues of `B`, descending.
    pub eigenvalues: Vec<f64>,
    /// Columns are eigenvectors of `B` in the order of `eigenvalues`.
    pub mixing: ComplexMatrix,
    /// Operators for the leading `subsystem_map.len()` eigenvalues.
    pub subsystem_map: KrausMap,
}

impl ReductionResult {
    pub fn truncated(&self) -> usize {
        self.eigenvalues.len() - self.subsystem_map.len()
    }

    /// Max-entry mismatch between the stored operators and
    /// `sqrt(b_p) sum_i u_ip g_i` recomputed from `eigenvalues` and `mixing`.
    pub fn kraus_residual(&self, kept_basis: &OperatorBasis) -> f64 {
        self.subsystem_map
            .operators()
            .iter()
            .enumerate()
            .map(|(p, k)| {
                let want = assemble_operator(self.eigenvalues[p], &self.mixing, p, kept_basis);
                k.max_abs_diff(&want)
            })
            .fold(0.0, f64::max)
    }
}

fn assemble_operator(
    eigenvalue: f64,
    mixing: &ComplexMatrix,
    p: usize,
    basis: &OperatorBasis,
) -> ComplexMatrix {
    let w = eigenvalue.max(0.0).sqrt();
    let mut acc = ComplexMatrix::zeros(basis.dim());
    for (i, g) in basis.elements().iter().enumerate() {
        let u = mixing[(i, p)];
        if u != ZERO {
            acc = &acc + &g.scale(u * w);
        }
    }
    acc
}

/// Runs coefficients, `B`, diagonalization and operator assembly for the `keep` factor.
///
/// `rho_other` is the initial state of the traced-out factor. Eigenvalues below
/// `truncation * max(b_p)` are dropped.
pub fn reduce_subsystem(
    map: &KrausMap,
    split: Bipartition,
    rho_other: &DensityMatrix,
    keep: Subsystem,
    truncation: f64,
) -> Result<ReductionResult> {
    split.check_map(map)?;
    let traced_dim = split.factor_dim(keep.other());
    if rho_other.dim() != traced_dim {
        return Err(Error::DimensionMismatch {
            expected: traced_dim,
            found: rho_other.dim(),
        });
    }
    let basis1 = build_hermitian_basis(split.d1)?;
    let basis2 = build_hermitian_basis(split.d2)?;
    let c = c_coefficients(map, split, &basis1, &basis2)?;
    let (c, kept_basis, traced_basis) = match keep {
        Subsystem::First => (c, basis1, basis2),
        Subsystem::Second => (c.swapped(), basis2, basis1),
    };
    let b = b_matrix(&c, rho_other, &traced_basis)?;
    let eig = hermitian_eig(&b.values, 1e-10)?;
    let min = eig.min_eigenvalue();
    if min < tol::NEGATIVE_B {
        return Err(Error::NegativeBEigenvalue { eigenvalue: min });
    }

    let n = eig.eigenvalues.len();
    let order: Vec<usize> = (0..n).rev().collect();
    let eigenvalues: Vec<f64> = order.iter().map(|&p| eig.eigenvalues[p]).collect();
    let mixing = ComplexMatrix::from_fn(n, |i, q| eig.unitary[(i, order[q])]);

    let cutoff = truncation * eigenvalues[0].max(0.0);
    let ops: Vec<ComplexMatrix> = eigenvalues
        .iter()
        .enumerate()
        .take_while(|(_, &l)| l > cutoff && l > 0.0)
        .map(|(p, &l)| assemble_operator(l, &mixing, p, &kept_basis))
        .collect();
    if ops.is_empty() {
        return Err(Error::Empty("subsystem map (B matrix vanishes)"));
    }
    let subsystem_map = if map.is_trace_preserving() {
        KrausMap::trace_preserving(ops)?
    } else {
        KrausMap::new(ops)?
    };
    Ok(ReductionResult {
        kept: keep,
        coefficients: c,
        b,
        eigenvalues,
        mixing,
        subsystem_map,
    })
}

/// Brute-force reduced evolution `tr_other(Phi(rho_1 ⊗ rho_2))`.
pub fn reduced_evolution(
    map: &KrausMap,
    split: Bipartition,
    initial: &ComplexMatrix,
    keep: Subsystem,
) -> Result<ComplexMatrix> {
    split.check_map(map)?;
    partial_trace(&map.apply(initial)?, split.d1, split.d2, keep)
}

/// `rho_S(0) = sum_m p_m sigma_1m ⊗ sigma_2m`.
#[derive(Debug, Clone)]
pub struct SeparableEnsemble {
    weights: Vec<f64>,
    pairs: Vec<(DensityMatrix, DensityMatrix)>,
}

impl SeparableEnsemble {
    pub fn new(weights: Vec<f64>, pairs: Vec<(DensityMatrix, DensityMatrix)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Empty("separable ensemble"));
        }
        if weights.len() != pairs.len() {
            return Err(Error::DimensionMismatch {
                expected: pairs.len(),
                found: weights.len(),
            });
        }
        if let Some(p) = weights.iter().find(|p| !(**p >= 0.0)) {
            return Err(Error::InvalidParameter(format!("negative weight {p}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > tol::STRUCTURAL {
            return Err(Error::InvalidParameter(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        let (d1, d2) = (pairs[0].0.dim(), pairs[0].1.dim());
        if let Some((a, b)) = pairs.iter().find(|(a, b)| a.dim() != d1 || b.dim() != d2) {
            return Err(Error::DimensionMismatch {
                expected: d1 * d2,
                found: a.dim() * b.dim(),
            });
        }
        Ok(Self { weights, pairs })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn pairs(&self) -> &[(DensityMatrix, DensityMatrix)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Same pairs, new weights.
    pub fn reweighted(&self, weights: Vec<f64>) -> Result<Self> {
        Self::new(weights, self.pairs.clone())
    }

    pub fn composite_state(&self) -> ComplexMatrix {
        let (a, b) = &self.pairs[0];
        let mut acc = ComplexMatrix::zeros(a.dim() * b.dim());
        for (p, (s1, s2)) in self.weights.iter().zip(&self.pairs) {
            acc = &acc + &tensor_product(s1.matrix(), s2.matrix()).scale_real(*p);
        }
        acc
    }

    /// `tr_2 rho_S(0) = sum_m p_m sigma_1m`.
    pub fn first_marginal(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.pairs[0].0.dim());
        for (p, (s1, _)) in self.weights.iter().zip(&self.pairs) {
            acc = &acc + &s1.matrix().scale_real(*p);
        }
        acc
    }
}

/// One reduction of subsystem 1 per ensemble term, with `sigma_2m` as the traced state.
/// Branches are evaluated independently and returned in ensemble order.
pub fn reduce_separable_ensemble(
    map: &KrausMap,
    split: Bipartition,
    ensemble: &SeparableEnsemble,
    truncation: f64,
) -> Result<Vec<ReductionResult>> {
    Execution::default()
        .map(ensemble.pairs(), |(_, sigma2)| {
            reduce_subsystem(map, split, sigma2, Subsystem::First, truncation)
        })
        .into_iter()
        .collect()
}

/// `sum_m p_m Phi_m(sigma_1m)` for branch maps `Phi_m`.
pub fn branch_mixture(
    branches: &[ReductionResult],
    ensemble: &SeparableEnsemble,
) -> Result<ComplexMatrix> {
    if branches.len() != ensemble.len() {
        return Err(Error::DimensionMismatch {
            expected: ensemble.len(),
            found: branches.len(),
        });
    }
    let mut acc = ComplexMatrix::zeros(ensemble.pairs()[0].0.dim());
    for ((p, (s1, _)), br) in ensemble
        .weights()
        .iter()
        .zip(ensemble.pairs())
        .zip(branches)
    {
        acc = &acc + &br.subsystem_map.apply(s1.matrix())?.scale_real(*p);
    }
    Ok(acc)
}

#[derive(Debug, Clone)]
pub struct DomainVerdict {
    /// All branch maps agree as superoperators within the tolerance.
    pub uniform: bool,
    pub max_pairwise_distance: f64,
    /// Branch 0's map when `uniform`.
    pub common_map: Option<KrausMap>,
}

/// Checks whether all branch maps coincide, in which case the ensemble dynamics
/// has a single Kraus form on the span of the `sigma_1m`.
pub fn reduced_domain_verdict(branches: &[ReductionResult], tol: f64) -> Result<DomainVerdict> {
    let first = branches.first().ok_or(Error::Empty("branch list"))?;
    let d = first.subsystem_map.dim();
    if let Some(bad) = branches.iter().find(|b| b.subsystem_map.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: bad.subsystem_map.dim(),
        });
    }
    let mut max: f64 = 0.0;
    for (m, a) in branches.iter().enumerate() {
        for b in &branches[m + 1..] {
            max = max.max(channel_distance(&a.subsystem_map, &b.subsystem_map)?);
        }
    }
    let uniform = max <= tol;
    Ok(DomainVerdict {
        uniform,
        max_pairwise_distance: max,
        common_map: uniform.then(|| first.subsystem_map.clone()),
    })
}

/// Max-entry distance between the evolved subsystem-1 marginals of two
/// composite states that share the same initial marginal. A positive value
/// rules out any state-independent subsystem map on a domain containing both.
pub fn correlated_probe(
    map: &KrausMap,
    split: Bipartition,
    state_a: &DensityMatrix,
    state_b: &DensityMatrix,
) -> Result<f64> {
    split.check_map(map)?;
    for s in [state_a, state_b] {
        if s.dim() != split.composite_dim() {
            return Err(Error::DimensionMismatch {
                expected: split.composite_dim(),
                found: s.dim(),
            });
        }
    }
    let ma = partial_trace(state_a.matrix(), split.d1, split.d2, Subsystem::First)?;
    let mb = partial_trace(state_b.matrix(), split.d1, split.d2, Subsystem::First)?;
    let gap = ma.max_abs_diff(&mb);
    if gap >= tol::STRUCTURAL {
        return Err(Error::InvalidState(format!(
            "probe states have different subsystem-1 marginals (gap {gap:.3e})"
        )));
    }
    let ea = reduced_evolution(map, split, state_a.matrix(), Subsystem::First)?;
    let eb = reduced_evolution(map, split, state_b.matrix(), Subsystem::First)?;
    Ok(ea.max_abs_diff(&eb))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorizationVerdict {
    /// Coefficient matrix has rank one, i.e. `K_k = A ⊗ B`.
    pub factorizable: bool,
    pub zero_operator: bool,
    /// Second singular value over the first; zero for a zero operator.
    pub singular_ratio: f64,
}

/// Rank-one test of each operator's `c^k` matrix: `sigma_2 <= tol * sigma_1`.
pub fn factorization_check(c: &CoefficientTensor, tol: f64) -> Vec<FactorizationVerdict> {
    (0..c.operators)
        .map(|k| {
            let sv = singular_values(c.rows, c.cols, c.operator_block(k));
            let first = sv.first().copied().unwrap_or(0.0);
            if first == 0.0 {
                return FactorizationVerdict {
                    factorizable: true,
                    zero_operator: true,
                    singular_ratio: 0.0,
                };
            }
            let ratio = sv.get(1).copied().unwrap_or(0.0) / first;
            FactorizationVerdict {
                factorizable: ratio <= tol,
                zero_operator: false,
                singular_ratio: ratio,
            }
        })
        .collect()
}
