//! Seedable random generators for states, operators and channels.
//!
//! Used by the verification suite, the benches and the tests; all draws come
//! from a caller-supplied RNG so runs are reproducible.

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::channels::{DensityMatrix, KrausMap};
use crate::linalg::{evolution_unitary, hermitian_eig, ComplexMatrix};

pub fn complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn complex_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| complex(rng))
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let m = complex_matrix(rng, dim);
    ComplexMatrix::from_fn(dim, |i, j| 0.5 * (m[(i, j)] + m[(j, i)].conj()))
}

pub fn unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let h = hermitian(rng, dim).scale_real(3.0);
    evolution_unitary(&h, 1.0).expect("random Hermitian input")
}

/// Full-rank mixed state `M M^† / tr(M M^†)`.
pub fn density_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let m = complex_matrix(rng, dim);
    let p = &m * &m.adjoint();
    let t = p.trace().re;
    DensityMatrix::new(p.scale_real(1.0 / t)).expect("Gram matrix is a valid state")
}

pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let v: Vec<C64> = (0..dim).map(|_| complex(rng)).collect();
    let n: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let v: Vec<C64> = v.iter().map(|x| x / n).collect();
    DensityMatrix::new(ComplexMatrix::outer(&v, &v).expect("equal lengths"))
        .expect("projector is a valid state")
}

/// Random trace-preserving map with `count` Kraus operators: `K_k = G_k S^{-1/2}`
/// where `S = sum_k G_k^† G_k`.
pub fn kraus_map<R: Rng + ?Sized>(rng: &mut R, dim: usize, count: usize) -> KrausMap {
    let gs: Vec<ComplexMatrix> = (0..count).map(|_| complex_matrix(rng, dim)).collect();
    let mut s = ComplexMatrix::zeros(dim);
    for g in &gs {
        s = &s + &(&g.adjoint() * g);
    }
    let eig = hermitian_eig(&s, 1e-10).expect("Gram sum is Hermitian");
    let inv_sqrt = eig.map_spectrum(|l| C64::new(1.0 / l.sqrt(), 0.0));
    let ops = gs.iter().map(|g| g * &inv_sqrt).collect();
    KrausMap::trace_preserving(ops).expect("normalized by construction")
}

/// Product of an arbitrary `count`-operator map on each factor, composed into one map.
pub fn product_kraus_map<R: Rng + ?Sized>(
    rng: &mut R,
    d1: usize,
    d2: usize,
    count: usize,
) -> KrausMap {
    let a = kraus_map(rng, d1, count);
    let b = kraus_map(rng, d2, count);
    let mut ops = Vec::new();
    for ka in a.operators() {
        for kb in b.operators() {
            ops.push(crate::linalg::tensor_product(ka, kb));
        }
    }
    KrausMap::trace_preserving(ops).expect("product of trace-preserving maps")
}
