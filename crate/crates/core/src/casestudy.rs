//! Two qubits, only qubit 1 coupled to an Ohmic thermal bath.
//!
//! The composite dynamics is given by eight Hermitian Kraus operators in the
//! interaction picture. Operators 1..6 are single-sector transition and
//! dephasing terms; operators 7 and 8 are diagonal, `I ⊗ diag(x, y)`, and
//! carry the remaining weight. All time dependence enters through the damping
//! rates `gamma1`, `gamma2` (qubit 2 in `|0>` or `|1>` respectively).

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::channels::{choi_matrix, completeness_defect, cp_verdict, DensityMatrix, KrausMap};
use crate::error::{Error, Result};
use crate::linalg::{evolution_unitary, pauli, tensor_product, ComplexMatrix, Subsystem, I, ZERO};
use crate::parallel::Execution;
use crate::reduction::{reduce_subsystem, Bipartition};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub omega: f64,
    pub beta: f64,
    pub temperature: f64,
    pub alpha: f64,
    pub nu_c: f64,
    /// Upper limit of the bath mode integral. Not used by the rate formulas.
    pub nu_max: f64,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "temperature must be > 0, got {}",
                self.temperature
            )));
        }
        if !(self.nu_c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "spectral cutoff must be > 0, got {}",
                self.nu_c
            )));
        }
        for nu in self.transition_frequencies() {
            if !(nu > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "transition frequency omega ± beta/2 = {nu} must be > 0"
                )));
            }
        }
        Ok(())
    }

    /// `(omega + beta/2, omega - beta/2)`.
    pub fn transition_frequencies(&self) -> [f64; 2] {
        [self.omega + 0.5 * self.beta, self.omega - 0.5 * self.beta]
    }
}

/// Sign convention of the thermal occupation number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoseConvention {
    /// `1 / (exp(nu/T) - 1)`.
    #[default]
    Standard,
    /// `1 / (exp(-nu/T) - 1)`, negative for positive `nu`, `T`.
    Inverted,
}

pub fn bose_occupation(nu: f64, temperature: f64, convention: BoseConvention) -> f64 {
    match convention {
        BoseConvention::Standard => 1.0 / (nu / temperature).exp_m1(),
        BoseConvention::Inverted => 1.0 / (-nu / temperature).exp_m1(),
    }
}

/// `J(nu) = alpha nu exp(-nu / nu_c)`.
pub fn ohmic_density(nu: f64, alpha: f64, nu_c: f64) -> f64 {
    alpha * nu * (-nu / nu_c).exp()
}

/// `4 pi J(nu) n(nu)` at `omega ± beta/2`, without the sign check.
pub fn raw_damping_rates(params: &ModelParams, convention: BoseConvention) -> Result<[f64; 2]> {
    params.validate()?;
    Ok(params.transition_frequencies().map(|nu| {
        4.0 * PI
            * ohmic_density(nu, params.alpha, params.nu_c)
            * bose_occupation(nu, params.temperature, convention)
    }))
}

pub fn damping_rates(params: &ModelParams, convention: BoseConvention) -> Result<DampingRates> {
    let [g1, g2] = raw_damping_rates(params, convention)?;
    DampingRates::new(g1, g2).map_err(|_| {
        Error::InvalidParameter(format!(
            "{convention:?} occupation gives negative rates ({g1}, {g2})"
        ))
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingRates {
    pub gamma1: f64,
    pub gamma2: f64,
}

impl DampingRates {
    pub fn new(gamma1: f64, gamma2: f64) -> Result<Self> {
        for g in [gamma1, gamma2] {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "damping rates must be finite and >= 0, got {g}"
                )));
            }
        }
        Ok(Self { gamma1, gamma2 })
    }

    /// `tau = (gamma1 + gamma2) t`.
    pub fn tau(&self, t: f64) -> f64 {
        (self.gamma1 + self.gamma2) * t
    }

    /// `W = (gamma1 - gamma2) / (gamma1 + gamma2)`; `None` when both rates vanish.
    pub fn asymmetry(&self) -> Option<f64> {
        let s = self.gamma1 + self.gamma2;
        (s > 0.0).then(|| (self.gamma1 - self.gamma2) / s)
    }

    pub fn swapped(&self) -> Self {
        Self {
            gamma1: self.gamma2,
            gamma2: self.gamma1,
        }
    }
}

/// Qubit 2 prepared in `sqrt(a)|0> + sqrt(1-a)|1>`, with `|0>` the `sigma_z = +1` state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialQubitParameter(f64);

impl InitialQubitParameter {
    pub fn new(a: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::InvalidParameter(format!(
                "a must lie in [0, 1], got {a}"
            )));
        }
        Ok(Self(a))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    pub fn state(&self) -> DensityMatrix {
        let psi = [
            C64::new(self.0.sqrt(), 0.0),
            C64::new((1.0 - self.0).sqrt(), 0.0),
        ];
        DensityMatrix::pure(&psi).expect("normalized by construction")
    }
}

/// How `B^2` in the diagonal operators is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BSquaredForm {
    /// Last term `8 e^{56 tau} cosh(24 W tau)`; makes `B^2 = 64 e^{64 tau} + q^2` and
    /// the two diagonal operators complete.
    #[default]
    Consistent,
    /// Last term `8 e^{280 tau} cosh(120 W tau)`, evaluated naively. Kept only to
    /// measure its completeness defect; `A` may come out imaginary.
    Alternate,
}

/// Nonzero entries of the diagonal operators: `K7 = I ⊗ diag(k7[0], k7[1])`, same for `K8`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalEntries {
    pub k7: [C64; 2],
    pub k8: [C64; 2],
}

fn inconsistency(t: f64, rates: &DampingRates, detail: String) -> Error {
    Error::ModelInconsistency {
        t,
        gamma1: rates.gamma1,
        gamma2: rates.gamma2,
        detail,
    }
}

/// Clamps values within `1e-6 * scale` below zero, rejects the rest.
fn clamp_nonnegative(
    value: f64,
    scale: f64,
    what: &str,
    t: f64,
    rates: &DampingRates,
) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -1e-6 * scale {
        Ok(0.0)
    } else {
        Err(inconsistency(
            t,
            rates,
            format!("{what} = {value:.6e} is negative"),
        ))
    }
}

/// Terms of `B^2 e^{-64 tau}`; the sum is `64 + q_hat^2` for the consistent form.
fn b_squared_scaled_terms(tau: f64, w: f64) -> [f64; 5] {
    let e8 = (-8.0 * tau).exp();
    let e16 = (-16.0 * tau).exp();
    [
        56.0 - 2.0 * e16,
        2.0 * e16 * (32.0 * w * tau).cosh(),
        -8.0 * e8 * (8.0 * w * tau).cosh(),
        8.0 * (16.0 * w * tau).cosh(),
        8.0 * e8 * (24.0 * w * tau).cosh(),
    ]
}

/// Entries of `K7`, `K8` at time `t`.
///
/// The consistent form divides every quantity by the dominant `e^{32 tau}`
/// before combining, so it stays finite for any `tau`; the alternate form is
/// evaluated literally and overflows near `tau ≈ 2.5`.
pub fn diagonal_entries(
    t: f64,
    rates: &DampingRates,
    form: BSquaredForm,
) -> Result<DiagonalEntries> {
    let Some(w) = rates.asymmetry() else {
        return Ok(frozen_diagonal());
    };
    let tau = rates.tau(t);
    if tau == 0.0 {
        return Ok(frozen_diagonal());
    }
    match form {
        BSquaredForm::Consistent => consistent_diagonal(t, tau, w, rates),
        BSquaredForm::Alternate => alternate_diagonal(t, tau, w, rates),
    }
}

fn frozen_diagonal() -> DiagonalEntries {
    DiagonalEntries {
        k7: [ZERO; 2],
        k8: [C64::new(-1.0, 0.0); 2],
    }
}

fn consistent_diagonal(t: f64, tau: f64, w: f64, rates: &DampingRates) -> Result<DiagonalEntries> {
    let e8 = (-8.0 * tau).exp();
    let e16 = (-16.0 * tau).exp();
    // q / e^{32 tau}, with q = 2e^{24 tau} sinh(16 W tau) + 4e^{32 tau} sinh(8 W tau)
    let q = 2.0 * e8 * (16.0 * w * tau).sinh() + 4.0 * (8.0 * w * tau).sinh();
    let terms = b_squared_scaled_terms(tau, w);
    let scale: f64 = terms.iter().map(|x| x.abs()).sum();
    let b_sq = clamp_nonnegative(terms.iter().sum(), scale, "B^2", t, rates)?;
    let b = b_sq.sqrt();

    // e^{16 tau} times the numerators of A^2 and A'^2
    let base = 2.0 + 2.0 * e16 * (16.0 * w * tau).cosh() + 4.0 * e8 * (8.0 * w * tau).cosh();
    let lam7 = clamp_nonnegative(base - e8 * b, base, "A^2 numerator", t, rates)?;
    let lam8 = base + e8 * b;

    // (B - 8) = q^2 / (B + 8) on the consistent branch; r avoids the 0/0 at q = 0
    let r = q / (b + 8.0);
    let m7 = (lam7 / (16.0 * (1.0 + r * r))).sqrt() * if q < 0.0 { -1.0 } else { 1.0 };
    let a8 = (lam8 / (16.0 * (q * q + (b + 8.0) * (b + 8.0)))).sqrt();

    Ok(DiagonalEntries {
        k7: [C64::new(m7 * (1.0 + r), 0.0), C64::new(m7 * (r - 1.0), 0.0)],
        k8: [
            C64::new(-a8 * (b + 8.0 - q), 0.0),
            C64::new(-a8 * (b + 8.0 + q), 0.0),
        ],
    })
}

fn alternate_diagonal(t: f64, tau: f64, w: f64, rates: &DampingRates) -> Result<DiagonalEntries> {
    let ex = |k: f64| (k * tau).exp();
    let terms = [
        2.0 * ex(48.0) * (28.0 * ex(16.0) - 1.0),
        2.0 * ex(48.0) * (32.0 * w * tau).cosh(),
        -8.0 * ex(56.0) * (8.0 * w * tau).cosh(),
        8.0 * ex(64.0) * (16.0 * w * tau).cosh(),
        8.0 * ex(280.0) * (120.0 * w * tau).cosh(),
    ];
    let scale: f64 = terms.iter().map(|x| x.abs()).sum();
    if !scale.is_finite() {
        return Err(inconsistency(t, rates, "B^2 overflows double range".into()));
    }
    let b = clamp_nonnegative(terms.iter().sum(), scale, "B^2", t, rates)?.sqrt();
    let e32 = ex(32.0);
    let s = 2.0 * ex(16.0) * (16.0 * w * tau).sinh() + 4.0 * ex(24.0) * (8.0 * w * tau).sinh();
    let num = 2.0 * ex(-16.0)
        + 2.0 * ex(-32.0) * (16.0 * w * tau).cosh()
        + 4.0 * ex(-24.0) * (8.0 * w * tau).cosh();
    let den7 = 16.0 * s * s + 16.0 * ex(-16.0) * (b - 8.0 * e32).powi(2);
    let den8 = 16.0 * s * s + 16.0 * ex(-16.0) * (b + 8.0 * e32).powi(2);
    let a7 = C64::new((num - ex(-56.0) * b) / den7, 0.0).sqrt();
    let a8 = C64::new((num + ex(-56.0) * b) / den8, 0.0).sqrt();
    let q = 2.0 * ex(24.0) * (16.0 * w * tau).sinh() + 4.0 * e32 * (8.0 * w * tau).sinh();
    let out = DiagonalEntries {
        k7: [a7 * (-8.0 * e32 + q + b), a7 * (-8.0 * e32 - q + b)],
        k8: [-a8 * (8.0 * e32 - q + b), -a8 * (8.0 * e32 + q + b)],
    };
    if out.k7.iter().chain(&out.k8).any(|x| !x.is_finite()) {
        return Err(inconsistency(
            t,
            rates,
            "non-finite diagonal entries".into(),
        ));
    }
    Ok(out)
}

fn sparse(entries: &[(usize, usize, C64)]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4);
    for &(i, j, v) in entries {
        m[(i, j)] = v;
    }
    m
}

/// The eight composite Kraus operators at time `t` (interaction picture, consistent form).
pub fn composite_kraus(t: f64, rates: &DampingRates) -> Result<KrausMap> {
    composite_kraus_with(t, rates, BSquaredForm::Consistent)
}

/// As [`composite_kraus`]; the alternate form is not asserted trace-preserving.
pub fn composite_kraus_with(t: f64, rates: &DampingRates, form: BSquaredForm) -> Result<KrausMap> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "t must be finite and >= 0, got {t}"
        )));
    }
    let (g1, g2) = (rates.gamma1, rates.gamma2);
    // 1 - e^{-x} without cancellation
    let decay = |x: f64| -(-x).exp_m1();
    let s2 = C64::new(0.5 * decay(32.0 * t * g2).sqrt(), 0.0);
    let s1 = C64::new(0.5 * decay(32.0 * t * g1).sqrt(), 0.0);
    let d2 = C64::new(0.5 * decay(16.0 * t * g2), 0.0);
    let d1 = C64::new(0.5 * decay(16.0 * t * g1), 0.0);
    let diag = diagonal_entries(t, rates, form)?;

    let ops = vec![
        sparse(&[(1, 3, s2 * I), (3, 1, -s2 * I)]),
        sparse(&[(1, 3, -s2), (3, 1, -s2)]),
        sparse(&[(0, 2, s1), (2, 0, s1)]),
        sparse(&[(0, 2, -s1 * I), (2, 0, s1 * I)]),
        sparse(&[(1, 1, -d2), (3, 3, d2)]),
        sparse(&[(0, 0, d1), (2, 2, -d1)]),
        tensor_product(&ComplexMatrix::identity(2), &ComplexMatrix::diag(&diag.k7)),
        tensor_product(&ComplexMatrix::identity(2), &ComplexMatrix::diag(&diag.k8)),
    ];
    match form {
        BSquaredForm::Consistent => KrausMap::trace_preserving(ops).map_err(|e| match e {
            Error::CompletenessViolated { defect, .. } => inconsistency(
                t,
                rates,
                format!("composite completeness defect {defect:.3e}"),
            ),
            other => other,
        }),
        BSquaredForm::Alternate => KrausMap::new(ops),
    }
}

/// Closed-form diagonal of `B` for qubit 1 with qubit 2 in the pure state `a`.
pub fn closed_form_b(t: f64, rates: &DampingRates, a: InitialQubitParameter) -> [f64; 4] {
    let a = a.value();
    let (g1, g2) = (rates.gamma1, rates.gamma2);
    let e = |k: f64, g: f64| (-k * g * t).exp();
    let b0 = 0.5
        + 0.5 * (1.0 - a) * e(32.0, g2)
        + 0.5 * a * e(32.0, g1)
        + (1.0 - a) * e(16.0, g2)
        + a * e(16.0, g1);
    let b1 = 0.5 - 0.5 * (1.0 - a) * e(32.0, g2) - 0.5 * a * e(32.0, g1);
    let b3 = 0.5 * (1.0 - a) * (1.0 - e(16.0, g2)).powi(2) + 0.5 * a * (1.0 - e(16.0, g1)).powi(2);
    [b0, b1, b1, b3]
}

/// Pauli channel `{sqrt(b_i/2) sigma_i}` built from [`closed_form_b`].
pub fn closed_form_subsystem_map(
    t: f64,
    rates: &DampingRates,
    a: InitialQubitParameter,
) -> Result<KrausMap> {
    let b = closed_form_b(t, rates, a);
    let ops = pauli::all()
        .iter()
        .zip(b)
        .map(|(p, bi)| p.scale_real((bi.max(0.0) / 2.0).sqrt()))
        .collect();
    KrausMap::trace_preserving(ops)
}

/// Which free evolution to factor back in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Picture {
    /// `exp(-i H t)` with `H = omega/2 (Z⊗I + I⊗Z) + beta/4 Z⊗Z`.
    Composite,
    /// `exp(-i omega/2 Z t)`; only meaningful for non-interacting qubits.
    Qubit1,
}

/// Two-qubit free Hamiltonian without the bath term.
pub fn free_hamiltonian(omega: f64, beta: f64) -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    let z = pauli::z();
    let zi = tensor_product(&z, &id);
    let iz = tensor_product(&id, &z);
    let zz = tensor_product(&z, &z);
    &(&zi + &iz).scale_real(0.5 * omega) + &zz.scale_real(0.25 * beta)
}

/// Left-multiplies the interaction-picture operators by the free evolution.
pub fn to_schrodinger(
    map: &KrausMap,
    t: f64,
    omega: f64,
    beta: f64,
    picture: Picture,
) -> Result<KrausMap> {
    let h = match picture {
        Picture::Composite => free_hamiltonian(omega, beta),
        Picture::Qubit1 => {
            if beta != 0.0 {
                return Err(Error::InvalidParameter(
                    "single-qubit Schrodinger transform requires beta = 0".into(),
                ));
            }
            pauli::z().scale_real(0.5 * omega)
        }
    };
    let u = evolution_unitary(&h, t)?;
    map.left_multiply(&u)
}

/// Parameters of a uniform time sweep, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub rates: DampingRates,
    pub a: InitialQubitParameter,
    pub t_max: f64,
    pub steps: usize,
}

impl SweepConfig {
    pub fn new(gamma1: f64, gamma2: f64, a: f64, t_max: f64, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(Error::InvalidParameter(format!(
                "steps must be >= 2, got {steps}"
            )));
        }
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "t-max must be > 0, got {t_max}"
            )));
        }
        Ok(Self {
            rates: DampingRates::new(gamma1, gamma2)?,
            a: InitialQubitParameter::new(a)?,
            t_max,
            steps,
        })
    }

    pub fn times(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.t_max
                } else {
                    self.t_max * i as f64 / last
                }
            })
            .collect()
    }
}

/// One grid point: algorithm-derived `B` diagonal and diagnostics of the reduced map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub t: f64,
    pub b: [f64; 4],
    /// Completeness defect of the reduced map.
    pub trace_defect: f64,
    pub choi_min_eig: f64,
    pub offdiag_b_max: f64,
}

pub fn sweep_row(t: f64, rates: &DampingRates, a: InitialQubitParameter) -> Result<SweepRow> {
    let map = composite_kraus(t, rates)?;
    let r = reduce_subsystem(
        &map,
        Bipartition::qubits(),
        &a.state(),
        Subsystem::First,
        tol::TRUNCATION,
    )?;
    let diag = r.b.diagonal();
    Ok(SweepRow {
        t,
        b: [diag[0], diag[1], diag[2], diag[3]],
        trace_defect: completeness_defect(&r.subsystem_map),
        choi_min_eig: cp_verdict(&choi_matrix(&r.subsystem_map), tol::STRUCTURAL)?.min_eigenvalue,
        offdiag_b_max: r.b.max_off_diagonal(),
    })
}

/// Rows in grid order; `exec` only changes how they are computed.
pub fn sweep(config: &SweepConfig, exec: Execution) -> Result<Vec<SweepRow>> {
    exec.map(&config.times(), |&t| sweep_row(t, &config.rates, config.a))
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::channel_distance;
    use approx::assert_abs_diff_eq;

    fn rates(g1: f64, g2: f64) -> DampingRates {
        DampingRates::new(g1, g2).unwrap()
    }

    #[test]
    fn equal_frequencies_give_equal_rates() {
        let p = ModelParams {
            omega: 1.0,
            beta: 0.0,
            temperature: 3.0,
            alpha: 0.02,
            nu_c: 4.0,
            nu_max: 50.0,
        };
        let r = damping_rates(&p, BoseConvention::Standard).unwrap();
        assert_eq!(r.gamma1, r.gamma2);
    }

    #[test]
    fn rate_regression() {
        // independent high-precision evaluation of 4 pi alpha nu e^{-nu/nu_c} / (e^{nu/T} - 1)
        let p = ModelParams {
            omega: 1.0,
            beta: 0.2,
            temperature: 10.0,
            alpha: 0.01,
            nu_c: 5.0,
            nu_max: 100.0,
        };
        let r = damping_rates(&p, BoseConvention::Standard).unwrap();
        assert_abs_diff_eq!(r.gamma1, 0.954_025_420_307_346, epsilon = 1e-14);
        assert_abs_diff_eq!(r.gamma2, 1.003_106_491_929_994_9, epsilon = 1e-14);
        let raw = raw_damping_rates(&p, BoseConvention::Inverted).unwrap();
        assert_abs_diff_eq!(raw[0], -1.064_957_655_349_398, epsilon = 1e-14);
        assert_abs_diff_eq!(raw[1], -1.097_573_327_287_548_5, epsilon = 1e-14);
        assert!(damping_rates(&p, BoseConvention::Inverted).is_err());
    }

    #[test]
    fn cold_bath_freezes_rates() {
        let p = ModelParams {
            omega: 1.0,
            beta: 0.2,
            temperature: 1e-4,
            alpha: 0.01,
            nu_c: 5.0,
            nu_max: 100.0,
        };
        let r = damping_rates(&p, BoseConvention::Standard).unwrap();
        assert!(r.gamma1 < 1e-300 && r.gamma2 < 1e-300);
    }

    #[test]
    fn invalid_params_rejected() {
        let mut p = ModelParams {
            omega: 1.0,
            beta: 0.2,
            temperature: 1.0,
            alpha: 0.01,
            nu_c: 5.0,
            nu_max: 100.0,
        };
        p.beta = 2.5;
        assert!(damping_rates(&p, BoseConvention::Standard).is_err());
        p.beta = 0.2;
        p.temperature = 0.0;
        assert!(damping_rates(&p, BoseConvention::Standard).is_err());
        assert!(InitialQubitParameter::new(1.2).is_err());
        assert!(DampingRates::new(-0.1, 1.0).is_err());
    }

    #[test]
    fn frozen_at_t_zero() {
        let map = composite_kraus(0.0, &rates(0.4, 1.1)).unwrap();
        for k in &map.operators()[..7] {
            assert_eq!(k.max_abs(), 0.0);
        }
        assert_eq!(
            map.operators()[7],
            ComplexMatrix::identity(4).scale_real(-1.0)
        );
    }

    #[test]
    fn single_sector_entries() {
        let (t, r) = (0.05, rates(0.7, 0.3));
        let map = composite_kraus(t, &r).unwrap();
        let k = map.operators();
        let k5_22 = -(1.0 - (-16.0 * t * r.gamma2).exp()) / 2.0;
        assert_abs_diff_eq!(k[4][(1, 1)].re, k5_22, epsilon = 1e-15);
        let k1_24 = 0.5 * (1.0 - (-32.0 * t * r.gamma2).exp()).sqrt();
        assert_abs_diff_eq!(k[0][(1, 3)].im, k1_24, epsilon = 1e-15);
        assert_eq!(k[0][(3, 1)], k[0][(1, 3)].conj());
        for op in k {
            assert!(op.is_hermitian(1e-15));
        }
    }

    #[test]
    fn diagonal_blocks_complete_for_every_sector() {
        // K7_xx^2 + K8_xx^2 = (1 + e^{-16 t gamma})^2 / 4 in each qubit-2 sector
        for (g1, g2, t) in [
            (1.0, 1.0, 0.01),
            (0.3, 1.0, 0.04),
            (2.0, 0.1, 0.3),
            (0.1, 2.0, 1.0),
            (1.0, 0.0, 3.0),
        ] {
            let r = rates(g1, g2);
            let d = diagonal_entries(t, &r, BSquaredForm::Consistent).unwrap();
            for (s, g) in [(0, g1), (1, g2)] {
                let want = 0.25 * (1.0 + (-16.0 * t * g).exp()).powi(2);
                let got = d.k7[s].norm_sqr() + d.k8[s].norm_sqr();
                assert_abs_diff_eq!(got, want, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn consistent_b_squared_identity() {
        for (tau, w) in [(0.1, 0.3), (0.7, -0.9), (1.0, 1.0), (0.0, 0.5)] {
            let terms = b_squared_scaled_terms(tau, w);
            let mut x: f64 = 0.0;
            for t in terms {
                x += t;
            }
            let e8 = (-8.0f64 * tau).exp();
            let q = 2.0 * e8 * (16.0 * w * tau).sinh() + 4.0 * (8.0 * w * tau).sinh();
            assert!((x - (64.0 + q * q)).abs() < 1e-12 * (64.0 + q * q));
        }
    }

    #[test]
    fn alternate_form_is_incomplete() {
        let r = rates(0.3, 1.0);
        let map = composite_kraus_with(0.05, &r, BSquaredForm::Alternate).unwrap();
        assert!(completeness_defect(&map) > 1e-3);
        assert!(matches!(
            composite_kraus_with(3.0, &r, BSquaredForm::Alternate),
            Err(Error::ModelInconsistency { .. })
        ));
    }

    #[test]
    fn closed_form_landmarks() {
        let r = rates(0.4, 0.9);
        let a = InitialQubitParameter::new(0.3).unwrap();
        for (b, want) in closed_form_b(0.0, &r, a).iter().zip([2.0, 0.0, 0.0, 0.0]) {
            assert_abs_diff_eq!(*b, want, epsilon = 1e-15);
        }
        let late = closed_form_b(1e3, &r, a);
        for b in late {
            assert_abs_diff_eq!(b, 0.5, epsilon = 1e-15);
        }
        for t in [0.0, 0.01, 0.1, 0.5, 2.0] {
            let b = closed_form_b(t, &r, a);
            assert_abs_diff_eq!(b.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
            assert_eq!(b[1], b[2]);
        }
    }

    #[test]
    fn unital_closed_form_map() {
        let r = rates(0.4, 0.9);
        let a = InitialQubitParameter::new(0.6).unwrap();
        let map = closed_form_subsystem_map(0.2, &r, a).unwrap();
        assert!(completeness_defect(&map) < 1e-12);
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(map.apply(&half).unwrap().max_abs_diff(&half) < 1e-15);
    }

    #[test]
    fn ground_population_from_pauli_weights() {
        let r = rates(0.4, 0.9);
        let a = InitialQubitParameter::new(0.6).unwrap();
        let t = 0.07;
        let b = closed_form_b(t, &r, a);
        let out = closed_form_subsystem_map(t, &r, a)
            .unwrap()
            .apply(&ComplexMatrix::diag_real(&[1.0, 0.0]))
            .unwrap();
        let want = ComplexMatrix::diag_real(&[(b[0] + b[3]) / 2.0, b[1]]);
        assert!(out.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn swapping_roles_of_a_and_rates() {
        let r = rates(0.25, 1.4);
        for t in [0.01, 0.1, 0.4] {
            let one =
                closed_form_subsystem_map(t, &r, InitialQubitParameter::new(1.0).unwrap()).unwrap();
            let zero = closed_form_subsystem_map(
                t,
                &r.swapped(),
                InitialQubitParameter::new(0.0).unwrap(),
            )
            .unwrap();
            assert!(channel_distance(&one, &zero).unwrap() < 1e-14);
        }
    }

    #[test]
    fn schrodinger_transforms() {
        let r = rates(0.5, 0.8);
        let map = composite_kraus(0.1, &r).unwrap();
        let same = to_schrodinger(&map, 0.1, 0.0, 0.0, Picture::Composite).unwrap();
        assert!(channel_distance(&map, &same).unwrap() < 1e-14);

        let rotated = to_schrodinger(&map, 0.37, 1.3, 0.4, Picture::Composite).unwrap();
        assert_abs_diff_eq!(
            completeness_defect(&rotated),
            completeness_defect(&map),
            epsilon = 1e-14
        );

        let (omega, beta, t) = (1.3, 0.4, 0.37);
        let u = evolution_unitary(&free_hamiltonian(omega, beta), t).unwrap();
        let phases = [
            omega + beta / 4.0,
            -beta / 4.0,
            -beta / 4.0,
            -omega + beta / 4.0,
        ];
        let want = ComplexMatrix::diag(&phases.map(|e| C64::from_polar(1.0, -e * t)));
        assert!(u.max_abs_diff(&want) < 1e-14);

        let q =
            closed_form_subsystem_map(0.1, &r, InitialQubitParameter::new(0.5).unwrap()).unwrap();
        assert!(to_schrodinger(&q, 0.1, 1.0, 0.2, Picture::Qubit1).is_err());
        let qs = to_schrodinger(&q, 0.1, 1.0, 0.0, Picture::Qubit1).unwrap();
        assert!(completeness_defect(&qs) < 1e-12);
    }

    #[test]
    fn sweep_grid_includes_endpoints() {
        let cfg = SweepConfig::new(0.3, 1.0, 0.5, 0.8, 5).unwrap();
        let ts = cfg.times();
        assert_eq!(ts.first(), Some(&0.0));
        assert_eq!(ts.last(), Some(&0.8));
        assert!(SweepConfig::new(0.3, 1.0, 0.5, 0.8, 1).is_err());
        assert!(SweepConfig::new(0.3, 1.0, 0.5, 0.0, 4).is_err());
        assert!(SweepConfig::new(0.3, 1.0, 1.5, 1.0, 4).is_err());
    }
}
