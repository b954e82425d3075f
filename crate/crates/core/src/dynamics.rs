//! Master-equation dynamics of the emitter pair in the frame rotating at
//! the laser frequency (`hbar = 1`, rates and energies in units of the
//! reference decay rate).

use std::f64::consts::TAU;

use nalgebra::{SMatrix, SVector};
use serde::Deserialize;

use crate::couplings::{self, EmitterGeometry};
use crate::error::{Error, Result};
use crate::integrator::{DormandPrince, Tolerances};
use crate::state::{
    kron2, pauli, validate_state, DensityMatrix, Mat2, Mat4, PureState, C64, I, ONE, ZERO,
};

pub type Liouvillian = SMatrix<C64, 16, 16>;
pub type StateVector = SVector<C64, 16>;

const GAMMA_BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    /// Coherent dipole-dipole coupling.
    #[serde(rename = "V", default)]
    pub v: f64,
    /// Collective decay rate.
    #[serde(default)]
    pub gamma: f64,
    #[serde(rename = "Gamma1", default = "unit_rate")]
    pub gamma1: f64,
    #[serde(rename = "Gamma2", default = "unit_rate")]
    pub gamma2: f64,
    /// `nu1 - nu2`.
    #[serde(default)]
    pub delta_minus: f64,
    /// `(nu1 + nu2)/2 - nu_L`.
    #[serde(default)]
    pub delta_plus: f64,
    #[serde(default)]
    pub ell1: f64,
    #[serde(default)]
    pub ell2: f64,
}

fn unit_rate() -> f64 {
    1.0
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            v: 0.0,
            gamma: 0.0,
            gamma1: 1.0,
            gamma2: 1.0,
            delta_minus: 0.0,
            delta_plus: 0.0,
            ell1: 0.0,
            ell2: 0.0,
        }
    }
}

impl SystemParams {
    /// Identical undriven emitters with unit spontaneous rate.
    pub fn identical(v: f64, gamma: f64) -> Self {
        SystemParams {
            v,
            gamma,
            ..Default::default()
        }
    }

    /// Identical emitters with the same resonant drive on both.
    pub fn driven(v: f64, gamma: f64, ell: f64) -> Self {
        SystemParams {
            ell1: ell,
            ell2: ell,
            ..Self::identical(v, gamma)
        }
    }

    /// Takes `V`, `gamma` and the spontaneous rates from the geometry;
    /// detunings and drive come from `self`.
    pub fn with_geometry(self, g: &EmitterGeometry) -> Result<Self> {
        let c = couplings::couplings(g)?;
        Ok(SystemParams {
            v: c.v,
            gamma: c.gamma,
            gamma1: g.gamma1,
            gamma2: g.gamma2,
            ..self
        })
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.v,
            self.gamma,
            self.gamma1,
            self.gamma2,
            self.delta_minus,
            self.delta_plus,
            self.ell1,
            self.ell2,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        if !(self.gamma1 > 0.0 && self.gamma2 > 0.0) {
            return Err(Error::InvalidParams(format!(
                "spontaneous rates must be positive (got {}, {})",
                self.gamma1, self.gamma2
            )));
        }
        let bound = (self.gamma1 * self.gamma2).sqrt();
        if self.gamma.abs() > bound + GAMMA_BOUND_SLACK {
            return Err(Error::InvalidParams(format!(
                "|gamma| = {} exceeds sqrt(Gamma1 Gamma2) = {bound}",
                self.gamma.abs()
            )));
        }
        Ok(())
    }
}

/// Initial state `sqrt(alpha)|01> + e^{i phi} sqrt(1 - alpha)|10>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaState {
    pub alpha: f64,
    pub phi: f64,
}

impl AlphaState {
    pub fn new(alpha: f64, phi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidProbability(alpha));
        }
        if !phi.is_finite() {
            return Err(Error::Scenario(format!("phase must be finite (got {phi})")));
        }
        Ok(AlphaState {
            alpha,
            phi: phi.rem_euclid(TAU),
        })
    }

    pub fn symmetric() -> Self {
        AlphaState {
            alpha: 0.5,
            phi: 0.0,
        }
    }

    pub fn antisymmetric() -> Self {
        AlphaState {
            alpha: 0.5,
            phi: std::f64::consts::PI,
        }
    }

    pub fn pure_state(&self) -> PureState {
        let amplitudes = SVector::<C64, 4>::new(
            ZERO,
            C64::from(self.alpha.sqrt()),
            C64::from_polar((1.0 - self.alpha).sqrt(), self.phi),
            ZERO,
        );
        PureState::normalized(amplitudes).expect("alpha state has unit norm")
    }

    pub fn density_matrix(&self) -> DensityMatrix {
        self.pure_state().to_density_matrix()
    }
}

/// Single-emitter operators lifted to the pair.
struct Operators {
    lower1: Mat4,
    lower2: Mat4,
    raise1: Mat4,
    raise2: Mat4,
}

impl Operators {
    fn new() -> Self {
        let id = Mat2::identity();
        Operators {
            lower1: kron2(&pauli::lowering(), &id),
            lower2: kron2(&id, &pauli::lowering()),
            raise1: kron2(&pauli::raising(), &id),
            raise2: kron2(&id, &pauli::raising()),
        }
    }
}

/// Rotating-frame Hamiltonian.
///
/// Emitter `i` sits at detuning `delta_i = Delta_+ +/- Delta_-/2` from the
/// laser and contributes `-(delta_i / 2) sigma_z` (ground state at
/// `-delta_i / 2`). The exchange term is `V (s1+ s2- + s1- s2+)` and the drive
/// `ell_i (s_i+ + s_i-)`.
pub fn build_hamiltonian(p: &SystemParams) -> Mat4 {
    let id = Mat2::identity();
    let ops = Operators::new();
    let delta1 = p.delta_plus + 0.5 * p.delta_minus;
    let delta2 = p.delta_plus - 0.5 * p.delta_minus;
    let sz1 = kron2(&pauli::z(), &id);
    let sz2 = kron2(&id, &pauli::z());
    let sx1 = kron2(&pauli::x(), &id);
    let sx2 = kron2(&id, &pauli::x());
    let exchange = ops.raise1 * ops.lower2 + ops.lower1 * ops.raise2;

    sz1 * C64::from(-0.5 * delta1)
        + sz2 * C64::from(-0.5 * delta2)
        + exchange * C64::from(p.v)
        + sx1 * C64::from(p.ell1)
        + sx2 * C64::from(p.ell2)
}

struct Generator {
    hamiltonian: Mat4,
    ops: Operators,
    params: SystemParams,
}

impl Generator {
    fn new(p: &SystemParams) -> Self {
        Generator {
            hamiltonian: build_hamiltonian(p),
            ops: Operators::new(),
            params: *p,
        }
    }

    /// `-(rate/2) (rho a b + a b rho - 2 c rho d)`
    fn term(rate: f64, rho: &Mat4, a: &Mat4, b: &Mat4, c: &Mat4, d: &Mat4) -> Mat4 {
        let ab = a * b;
        (rho * ab + ab * rho - c * rho * d * C64::from(2.0)) * C64::from(-0.5 * rate)
    }

    fn apply(&self, rho: &Mat4) -> Mat4 {
        let o = &self.ops;
        let p = &self.params;
        let h = &self.hamiltonian;
        let coherent = (h * rho - rho * h) * (-I);
        coherent
            + Self::term(p.gamma1, rho, &o.raise1, &o.lower1, &o.lower1, &o.raise1)
            + Self::term(p.gamma2, rho, &o.raise2, &o.lower2, &o.lower2, &o.raise2)
            + Self::term(p.gamma, rho, &o.raise1, &o.lower2, &o.lower1, &o.raise2)
            + Self::term(p.gamma, rho, &o.raise2, &o.lower1, &o.lower2, &o.raise1)
    }
}

/// `d rho / dt = -i [H, rho] + L(rho)` with the individual (`Gamma1`,
/// `Gamma2`) and collective (`gamma`) dissipators.
pub fn lindblad_rhs(rho: &DensityMatrix, p: &SystemParams) -> Mat4 {
    lindblad_rhs_matrix(rho.matrix(), p)
}

/// Generator applied to an arbitrary matrix (the map is linear).
pub fn lindblad_rhs_matrix(rho: &Mat4, p: &SystemParams) -> Mat4 {
    Generator::new(p).apply(rho)
}

pub fn vectorize(m: &Mat4) -> StateVector {
    StateVector::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &StateVector) -> Mat4 {
    Mat4::from_column_slice(v.as_slice())
}

/// Matrix of the generator acting on column-stacked density matrices.
pub fn liouvillian(p: &SystemParams) -> Liouvillian {
    let generator = Generator::new(p);
    let mut l = Liouvillian::zeros();
    for k in 0..16 {
        let mut basis = Mat4::zeros();
        basis.as_mut_slice()[k] = ONE;
        l.set_column(k, &vectorize(&generator.apply(&basis)));
    }
    l
}

/// Null vector of the Liouvillian normalized to unit trace.
///
/// The first row of `L vec(rho) = 0` is replaced by the trace condition;
/// a singular system means the stationary state is not unique.
pub fn stationary_state(p: &SystemParams) -> Result<DensityMatrix> {
    p.validate()?;
    let mut a = liouvillian(p);
    let mut b = StateVector::zeros();
    for k in 0..16 {
        a[(0, k)] = if k % 4 == k / 4 { ONE } else { ZERO };
    }
    b[0] = ONE;
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::NumericalFailure("stationary state is not unique".into()))?;
    let m = unvectorize(&x);
    let m = (m + m.adjoint()) * C64::from(0.5);
    let report = validate_state(&m);
    if !report.passed() {
        return Err(Error::InvalidState(report));
    }
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PropagateOptions {
    pub tolerances: Tolerances,
    /// Replace each sample by `(rho + rho^dagger)/2` before validation.
    pub project: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

impl EvolutionResult {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &DensityMatrix)> {
        self.times.iter().copied().zip(self.states.iter())
    }

    pub fn last(&self) -> Option<(f64, &DensityMatrix)> {
        Some((*self.times.last()?, self.states.last()?))
    }
}

/// `sample_count` equally spaced instants covering `[0, t_final]`.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn sample_times(t_final: f64, sample_count: usize) -> Result<Vec<f64>> {
    if !(t_final > 0.0) || !t_final.is_finite() {
        return Err(Error::InvalidParams(format!(
            "t_final must be positive (got {t_final})"
        )));
    }
    if sample_count < 2 {
        return Err(Error::InvalidParams(format!(
            "need at least 2 samples (got {sample_count})"
        )));
    }
    let last = (sample_count - 1) as f64;
    Ok((0..sample_count)
        .map(|i| {
            if i + 1 == sample_count {
                t_final
            } else {
                t_final * i as f64 / last
            }
        })
        .collect())
}

pub fn propagate(
    rho0: &DensityMatrix,
    p: &SystemParams,
    t_final: f64,
    sample_count: usize,
) -> Result<EvolutionResult> {
    propagate_with(rho0, p, t_final, sample_count, PropagateOptions::default())
}

pub fn propagate_with(
    rho0: &DensityMatrix,
    p: &SystemParams,
    t_final: f64,
    sample_count: usize,
    options: PropagateOptions,
) -> Result<EvolutionResult> {
    p.validate()?;
    let times = sample_times(t_final, sample_count)?;
    let l = liouvillian(p);
    let mut solver = DormandPrince::new(|y: &StateVector| l * y, options.tolerances);
    let mut y = vectorize(rho0.matrix());
    let mut states = Vec::with_capacity(times.len());
    let mut t_prev = 0.0;
    for (index, &t) in times.iter().enumerate() {
        solver.advance(&mut y, t_prev, t)?;
        t_prev = t;
        let mut m = unvectorize(&y);
        if options.project {
            m = (m + m.adjoint()) * C64::from(0.5);
            y = vectorize(&m);
        }
        let report = validate_state(&m);
        if !report.passed() {
            return Err(Error::PropagationDiverged { index, t, report });
        }
        states.push(DensityMatrix::from_matrix_unchecked(m));
    }
    Ok(EvolutionResult { times, states })
}

/// Propagation by exponentiating the Liouvillian; reference route for the
/// stepping integrator.
pub fn propagate_exact(
    rho0: &DensityMatrix,
    p: &SystemParams,
    t_final: f64,
    sample_count: usize,
) -> Result<EvolutionResult> {
    p.validate()?;
    let times = sample_times(t_final, sample_count)?;
    let l = liouvillian(p);
    let y0 = vectorize(rho0.matrix());
    let mut states = Vec::with_capacity(times.len());
    for (index, &t) in times.iter().enumerate() {
        let m = unvectorize(&((l * C64::from(t)).exp() * y0));
        let report = validate_state(&m);
        if !report.passed() {
            return Err(Error::PropagationDiverged { index, t, report });
        }
        states.push(DensityMatrix::from_matrix_unchecked(m));
    }
    Ok(EvolutionResult { times, states })
}

/// Closed-form evolution of an [`AlphaState`] for identical undriven
/// emitters. The result keeps the X structure with an empty `|11>`
/// population.
pub fn analytic_evolution(s: &AlphaState, p: &SystemParams, t: f64) -> Result<DensityMatrix> {
    if p.ell1 != 0.0 || p.ell2 != 0.0 {
        return Err(Error::AnalyticUnavailable("requires no laser drive"));
    }
    if p.delta_minus != 0.0 {
        return Err(Error::AnalyticUnavailable(
            "requires identical transition frequencies",
        ));
    }
    if p.gamma1 != p.gamma2 {
        return Err(Error::AnalyticUnavailable(
            "requires equal spontaneous rates",
        ));
    }
    p.validate()?;
    let (alpha, phi) = (s.alpha, s.phi);
    let rate = p.gamma1;
    let f = (alpha * (1.0 - alpha)).sqrt();
    let theta = 2.0 * p.v * t;
    let (sin_phi, cos_phi) = phi.sin_cos();
    let (sin_theta, cos_theta) = theta.sin_cos();

    // e^{-(G+g)t} and e^{-(G-g)t}; the printed e^{2 g t} factors are folded in
    // so nothing overflows at late times.
    let fast = (-(rate + p.gamma) * t).exp();
    let slow = (-(rate - p.gamma) * t).exp();
    let bare = (-rate * t).exp();

    let ground = 1.0 - f * cos_phi * (fast - slow) - 0.5 * (fast + slow);
    let common = fast + slow + 2.0 * f * cos_phi * (fast - slow);
    let exchange = bare * ((2.0 - 4.0 * alpha) * cos_theta - 4.0 * f * sin_phi * sin_theta);
    let p01 = 0.25 * (common - exchange);
    let p10 = 0.25 * (common + exchange);
    let coherence = C64::new(
        0.25 * (fast - slow + 2.0 * f * cos_phi * (fast + slow)),
        -0.5 * bare * (2.0 * f * sin_phi * cos_theta + (1.0 - 2.0 * alpha) * sin_theta),
    );

    let mut m = Mat4::zeros();
    m[(0, 0)] = C64::from(ground);
    m[(1, 1)] = C64::from(p01);
    m[(2, 2)] = C64::from(p10);
    m[(1, 2)] = coherence;
    m[(2, 1)] = coherence.conj();
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// `(1/4)(I + h1 sx sx + h2 sy sy + h3 sz sz)`.
pub fn build_bell_diagonal(h1: f64, h2: f64, h3: f64) -> Result<DensityMatrix> {
    let m = (Mat4::identity()
        + kron2(&pauli::x(), &pauli::x()) * C64::from(h1)
        + kron2(&pauli::y(), &pauli::y()) * C64::from(h2)
        + kron2(&pauli::z(), &pauli::z()) * C64::from(h3))
        * C64::from(0.25);
    let report = validate_state(&m);
    if report.passed() {
        Ok(DensityMatrix::from_matrix_unchecked(m))
    } else {
        Err(Error::InvalidBellDiagonal {
            h1,
            h2,
            h3,
            min_eigenvalue: report.min_eigenvalue,
        })
    }
}
