//! Self-check suite behind `subkraus verify`.
//!
//! Every check draws from a fixed ChaCha8 seed, so a report is reproducible.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::basis::build_hermitian_basis;
use crate::casestudy::{
    closed_form_b, composite_kraus, sweep, DampingRates, InitialQubitParameter, SweepConfig,
};
use crate::channels::{choi_matrix, completeness_defect, cp_verdict, ChoiMatrix, KrausMap};
use crate::error::Result;
use crate::io::{sweep_csv, MapFile};
use crate::linalg::{
    hermitian_eig, partial_trace, tensor_product, ComplexMatrix, Subsystem, ONE, ZERO,
};
use crate::parallel::Execution;
use crate::random;
use crate::reduction::{reduce_subsystem, reduced_evolution, Bipartition};
use crate::tol;

const SEED: u64 = 0x5eed_c0ffee;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    Structural,
    Model,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    pub bound: Bound,
}

impl Check {
    fn at_most(name: &'static str, measured: f64, tol: f64) -> Self {
        Self {
            name,
            measured,
            bound: Bound::AtMost(tol),
        }
    }

    pub fn passed(&self) -> bool {
        match self.bound {
            Bound::AtMost(t) => self.measured <= t,
            Bound::AtLeast(t) => self.measured >= t,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (op, t) = match self.bound {
            Bound::AtMost(t) => ("<=", t),
            Bound::AtLeast(t) => (">=", t),
        };
        let mark = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "[{mark}] {:<44} {:>12.3e} {op} {t:.1e}",
            self.name, self.measured
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed()).count();
        write!(f, "{} checks, {failed} failed", self.checks.len())
    }
}

pub fn run_verify(scope: Scope) -> Report {
    let mut checks = Vec::new();
    if matches!(scope, Scope::Structural | Scope::All) {
        checks.extend(structural());
    }
    if matches!(scope, Scope::Model | Scope::All) {
        checks.extend(model());
    }
    Report { checks }
}

/// Internal failures count as an infinitely bad measurement.
fn measured(r: Result<f64>) -> f64 {
    r.unwrap_or(f64::INFINITY)
}

fn structural() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut out = Vec::new();

    let (mut recon, mut unit) = (0.0f64, 0.0f64);
    for n in 0..100 {
        let d = 1 + n % 9;
        let h = random::hermitian(&mut rng, d);
        match hermitian_eig(&h, tol::STRUCTURAL) {
            Ok(e) => {
                recon = recon.max(e.reconstruct().max_abs_diff(&h));
                let vv = &e.unitary.adjoint() * &e.unitary;
                unit = unit.max(vv.max_abs_diff(&ComplexMatrix::identity(d)));
            }
            Err(_) => recon = f64::INFINITY,
        }
    }
    out.push(Check::at_most(
        "eigensolver reconstruction",
        recon,
        tol::STRUCTURAL,
    ));
    out.push(Check::at_most(
        "eigensolver unitarity",
        unit,
        tol::STRUCTURAL,
    ));

    let gram = (2..=4)
        .map(|d| build_hermitian_basis(d).map(|b| b.gram_residual()))
        .try_fold(0.0f64, |m, r| r.map(|g| m.max(g)));
    out.push(Check::at_most(
        "basis Gram identity, d = 2..4",
        measured(gram),
        tol::STRUCTURAL,
    ));

    let a = random::density_matrix(&mut rng, 3);
    let b = random::density_matrix(&mut rng, 2);
    let ab = tensor_product(a.matrix(), b.matrix());
    let pt = partial_trace(&ab, 3, 2, Subsystem::First).map(|m| m.max_abs_diff(a.matrix()));
    out.push(Check::at_most(
        "partial trace of a product",
        measured(pt),
        tol::STRUCTURAL,
    ));

    let transpose = transpose_choi(3);
    let min = cp_verdict(&transpose, tol::STRUCTURAL).map(|v| (v.min_eigenvalue + 1.0).abs());
    out.push(Check::at_most(
        "transpose-map Choi eigenvalue + 1",
        measured(min),
        tol::STRUCTURAL,
    ));

    let map = random::kraus_map(&mut rng, 4, 3);
    let file = MapFile::new(map.clone(), Some("verify".into()));
    let round = file.to_canonical_json().and_then(|text| {
        let again = MapFile::parse(&text)?.to_canonical_json()?;
        Ok(if again == text { 0.0 } else { 1.0 })
    });
    out.push(Check::at_most(
        "MapFile byte round trip",
        measured(round),
        0.0,
    ));

    let split = Bipartition::qubits();
    let mut theorem = 0.0f64;
    for keep in [Subsystem::First, Subsystem::Second] {
        let rho_keep = random::density_matrix(&mut rng, 2);
        let rho_other = random::density_matrix(&mut rng, 2);
        let initial = match keep {
            Subsystem::First => tensor_product(rho_keep.matrix(), rho_other.matrix()),
            Subsystem::Second => tensor_product(rho_other.matrix(), rho_keep.matrix()),
        };
        let diff = reduce_subsystem(&map, split, &rho_other, keep, tol::TRUNCATION).and_then(|r| {
            let direct = reduced_evolution(&map, split, &initial, keep)?;
            Ok(r.subsystem_map
                .apply(rho_keep.matrix())?
                .max_abs_diff(&direct))
        });
        theorem = theorem.max(measured(diff));
    }
    out.push(Check::at_most(
        "reduced map vs partial trace (random map)",
        theorem,
        1e-10,
    ));
    out
}

fn transpose_choi(d: usize) -> ChoiMatrix {
    let swap = ComplexMatrix::from_fn(d * d, |r, c| {
        if r / d == c % d && r % d == c / d {
            ONE
        } else {
            ZERO
        }
    });
    ChoiMatrix::new(swap, d).expect("SWAP is Hermitian")
}

fn model() -> Vec<Check> {
    let rates = DampingRates {
        gamma1: 0.3,
        gamma2: 1.0,
    };
    let times: Vec<f64> = (0..50).map(|n| n as f64 / 49.0 / 1.3).collect();
    let split = Bipartition::qubits();
    let mut out = Vec::new();

    let completeness = times
        .iter()
        .map(|&t| composite_kraus(t, &rates).map(|m| completeness_defect(&m)))
        .try_fold(0.0f64, |m, r| r.map(|d| m.max(d)));
    out.push(Check::at_most(
        "composite completeness defect",
        measured(completeness),
        tol::MODEL,
    ));

    let (mut closed, mut offdiag, mut trace, mut min_eig) = (0.0f64, 0.0f64, 0.0f64, f64::INFINITY);
    for a in [0.0, 0.3, 1.0] {
        let a = InitialQubitParameter::new(a).expect("in range");
        for &t in &times {
            let step = composite_kraus(t, &rates).and_then(|m| {
                reduce_subsystem(&m, split, &a.state(), Subsystem::First, tol::TRUNCATION)
            });
            let Ok(r) = step else {
                closed = f64::INFINITY;
                continue;
            };
            let want = closed_form_b(t, &rates, a);
            let got = r.b.diagonal();
            for (g, w) in got.iter().zip(want) {
                closed = closed.max((g - w).abs());
            }
            offdiag = offdiag.max(r.b.max_off_diagonal());
            trace = trace.max((0.5 * got.iter().sum::<f64>() - 1.0).abs());
            let v = cp_verdict(&choi_matrix(&r.subsystem_map), tol::STRUCTURAL);
            min_eig = min_eig.min(v.map(|v| v.min_eigenvalue).unwrap_or(f64::NEG_INFINITY));
        }
    }
    out.push(Check::at_most("B diagonal vs closed form", closed, 1e-10));
    out.push(Check::at_most(
        "B off-diagonal magnitude",
        offdiag,
        tol::STRUCTURAL,
    ));
    out.push(Check::at_most("reduced trace condition", trace, 1e-10));
    out.push(Check {
        name: "reduced Choi min eigenvalue",
        measured: min_eig,
        bound: Bound::AtLeast(-1e-10),
    });

    let identity = composite_kraus(0.0, &rates)
        .and_then(|m| crate::channels::channel_distance(&m, &KrausMap::identity(4)));
    out.push(Check::at_most(
        "t = 0 composite map is the identity",
        measured(identity),
        1e-10,
    ));

    let det = SweepConfig::new(0.3, 1.0, 0.3, 0.7, 21).and_then(|cfg| {
        let seq = sweep_csv(&sweep(&cfg, Execution::Sequential)?)?;
        let par = sweep_csv(&sweep(&cfg, Execution::Parallel)?)?;
        Ok(if seq == par { 0.0 } else { 1.0 })
    });
    out.push(Check::at_most(
        "sweep output independent of execution",
        measured(det),
        0.0,
    ));
    out
}
