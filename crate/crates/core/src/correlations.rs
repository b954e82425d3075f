//! Total, classical and quantum correlations of a two-qubit state.
//!
//! Classical correlations and discord are defined through rank-one
//! projective measurements on emitter B, parametrized by
//! `|a> = cos(theta)|0> + e^{i phi} sin(theta)|1>` and its orthogonal
//! complement. The measurement that minimizes the conditional entropy is
//! located by a coarse grid search followed by a compass pattern search.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::{Matrix4, Vector2};
use rayon::prelude::*;

use crate::dynamics::EvolutionResult;
use crate::error::{Error, Result};
use crate::state::{
    binary_entropy, entropy_from_eigenvalues, hermitian_eigenvalues_2x2, kron2, pauli, xlog2x,
    DensityMatrix, Mat2, Mat4, ReducedState, Subsystem, C64, POSITIVITY_TOL,
};

/// Outcomes below this probability carry no conditional state.
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-14;
/// Allowed magnitude of `rho` entries that must vanish for an X state.
pub const X_STRUCTURE_TOL: f64 = 1e-10;
/// Imaginary part of an eigenvalue of `rho rho~` treated as a numerical failure.
pub const CONCURRENCE_IMAG_FAILURE: f64 = 1e-6;

const GRID_THETA: usize = 64;
const GRID_PHI: usize = 64;
const POLISH_STARTS: usize = 4;
const MIN_STEP: f64 = 1e-8;
const MIN_IMPROVEMENT: f64 = 1e-12;

/// Projective measurement `{|a><a|, |b><b|}` on one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementBasis {
    theta_m: f64,
    phi_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Projection onto `|a>`.
    First,
    /// Projection onto `|b>`.
    Second,
}

impl MeasurementBasis {
    /// Any real angles; mapped onto `theta in [0, pi/2]`, `phi in [0, 2 pi)`
    /// describing the same pair of projectors.
    pub fn new(theta: f64, phi: f64) -> Self {
        // (-t, p) ~ (t, p + pi) and (pi - t, p) ~ (t, p + pi) up to relabelling
        let mut theta = theta.rem_euclid(PI);
        let mut phi = phi;
        if theta > FRAC_PI_2 {
            theta = PI - theta;
            phi += PI;
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        MeasurementBasis {
            theta_m: theta,
            phi_m: phi,
        }
    }

    /// Eigenbasis of `sigma_z`.
    pub fn computational() -> Self {
        MeasurementBasis {
            theta_m: 0.0,
            phi_m: 0.0,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta_m
    }

    pub fn phi(&self) -> f64 {
        self.phi_m
    }

    pub fn vectors(&self) -> (Vector2<C64>, Vector2<C64>) {
        basis_vectors(self.theta_m, self.phi_m)
    }

    pub fn vector(&self, outcome: Outcome) -> Vector2<C64> {
        let (a, b) = self.vectors();
        match outcome {
            Outcome::First => a,
            Outcome::Second => b,
        }
    }

    pub fn projector(&self, outcome: Outcome) -> Mat2 {
        let v = self.vector(outcome);
        v * v.adjoint()
    }
}

fn basis_vectors(theta: f64, phi: f64) -> (Vector2<C64>, Vector2<C64>) {
    let (s, c) = theta.sin_cos();
    let a = Vector2::new(C64::from(c), C64::from_polar(s, phi));
    let b = Vector2::new(C64::from_polar(s, -phi), C64::from(-c));
    (a, b)
}

/// `<v|_B rho |v>_B`: the unnormalized state of A after B is found in `|v>`.
fn project_b(m: &Mat4, v: &Vector2<C64>) -> Mat2 {
    Mat2::from_fn(|i, k| {
        let mut acc = C64::from(0.0);
        for j in 0..2 {
            for l in 0..2 {
                acc += v[j].conj() * m[(2 * i + j, 2 * k + l)] * v[l];
            }
        }
        acc
    })
}

/// `p S(M / p)` for an unnormalized conditional state `M` with `p = tr M`.
fn weighted_entropy(block: &Mat2) -> f64 {
    let p = block[(0, 0)].re + block[(1, 1)].re;
    if p <= MIN_OUTCOME_PROBABILITY {
        return 0.0;
    }
    let (lo, hi) = hermitian_eigenvalues_2x2(block);
    (-xlog2x(lo) - xlog2x(hi) + xlog2x(p)).max(0.0)
}

fn conditional_entropy_at(m: &Mat4, theta: f64, phi: f64) -> f64 {
    let (a, b) = basis_vectors(theta, phi);
    weighted_entropy(&project_b(m, &a)) + weighted_entropy(&project_b(m, &b))
}

/// State of A conditioned on `outcome` of measuring B, with its probability.
pub fn post_measurement_state(
    rho: &DensityMatrix,
    basis: &MeasurementBasis,
    outcome: Outcome,
) -> Result<(ReducedState, f64)> {
    let block = project_b(rho.matrix(), &basis.vector(outcome));
    let probability = block.trace().re;
    if probability <= MIN_OUTCOME_PROBABILITY {
        return Err(Error::ConditionalUndefined { probability });
    }
    let state = ReducedState::new(block / C64::from(probability), Subsystem::A)?;
    Ok((state, probability))
}

/// Average entropy of A after measuring B in `basis`.
pub fn conditional_entropy(rho: &DensityMatrix, basis: &MeasurementBasis) -> Result<f64> {
    let mut total = 0.0;
    for outcome in [Outcome::First, Outcome::Second] {
        match post_measurement_state(rho, basis, outcome) {
            Ok((state, p)) => total += p * state.entropy()?,
            Err(Error::ConditionalUndefined { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalMinimum {
    pub entropy: f64,
    pub basis: MeasurementBasis,
}

/// Minimum over projective measurements on B of the conditional entropy.
pub fn minimize_conditional_entropy(rho: &DensityMatrix) -> ConditionalMinimum {
    minimize_on_matrix(rho.matrix())
}

fn minimize_on_matrix(m: &Mat4) -> ConditionalMinimum {
    let d_theta = FRAC_PI_2 / (GRID_THETA - 1) as f64;
    let d_phi = TAU / GRID_PHI as f64;
    let mut grid = vec![0.0; GRID_THETA * GRID_PHI];
    for i in 0..GRID_THETA {
        for j in 0..GRID_PHI {
            grid[i * GRID_PHI + j] =
                conditional_entropy_at(m, i as f64 * d_theta, j as f64 * d_phi);
        }
    }

    // local minima of the grid (theta clamped, phi periodic), best first
    let mut starts: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..GRID_THETA {
        // theta = 0 is a single measurement whatever phi is
        let phis = if i == 0 { 1 } else { GRID_PHI };
        for j in 0..phis {
            let value = grid[i * GRID_PHI + j];
            let is_min = [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)]
                .iter()
                .all(|&(di, dj)| {
                    let ni = i as i64 + di;
                    if ni < 0 || ni >= GRID_THETA as i64 {
                        return true;
                    }
                    let nj = (j as i64 + dj).rem_euclid(GRID_PHI as i64) as usize;
                    value <= grid[ni as usize * GRID_PHI + nj]
                });
            if is_min {
                starts.push((value, i, j));
            }
        }
    }
    starts.sort_by(|a, b| a.0.total_cmp(&b.0));
    starts.truncate(POLISH_STARTS);

    let mut best = ConditionalMinimum {
        entropy: f64::INFINITY,
        basis: MeasurementBasis::computational(),
    };
    for &(value, i, j) in &starts {
        let (entropy, theta, phi) =
            pattern_search(m, i as f64 * d_theta, j as f64 * d_phi, value, d_theta);
        if entropy < best.entropy {
            best = ConditionalMinimum {
                entropy,
                basis: MeasurementBasis::new(theta, phi),
            };
        }
    }
    best
}

/// Compass search over the periodic extension of the angles.
fn pattern_search(
    m: &Mat4,
    mut theta: f64,
    mut phi: f64,
    mut value: f64,
    initial_step: f64,
) -> (f64, f64, f64) {
    let mut step = initial_step;
    while step >= MIN_STEP {
        let mut best_move = None;
        let mut best_value = value;
        for (dt, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let trial = conditional_entropy_at(m, theta + dt, phi + dp);
            if trial < best_value {
                best_value = trial;
                best_move = Some((dt, dp));
            }
        }
        match best_move {
            Some((dt, dp)) => {
                let improvement = value - best_value;
                theta += dt;
                phi += dp;
                value = best_value;
                if improvement < MIN_IMPROVEMENT {
                    break;
                }
            }
            None => step *= 0.5,
        }
    }
    (value, theta, phi)
}

/// `I = S(rho_A) + S(rho_B) - S(rho_AB)`.
pub fn mutual_information(rho: &DensityMatrix) -> Result<f64> {
    let sa = rho.partial_trace(Subsystem::A).entropy()?;
    let sb = rho.partial_trace(Subsystem::B).entropy()?;
    Ok((sa + sb - rho.entropy()?).max(0.0))
}

/// Maximum classical information about A extractable by measuring B, and
/// the measurement achieving it.
pub fn classical_correlations(rho: &DensityMatrix) -> Result<(f64, MeasurementBasis)> {
    let sa = rho.partial_trace(Subsystem::A).entropy()?;
    let min = minimize_conditional_entropy(rho);
    Ok(((sa - min.entropy).max(0.0), min.basis))
}

/// `D = S(rho_B) - S(rho_AB) + min S(A | measured B)`.
pub fn quantum_discord(rho: &DensityMatrix) -> Result<f64> {
    let sb = rho.partial_trace(Subsystem::B).entropy()?;
    let min = minimize_conditional_entropy(rho);
    Ok(sb - rho.entropy()? + min.entropy)
}

/// Exchanges the roles of the two emitters.
pub fn swap_parties(rho: &DensityMatrix) -> DensityMatrix {
    let perm = [0usize, 2, 1, 3];
    let m = rho.matrix();
    DensityMatrix::from_matrix_unchecked(Mat4::from_fn(|i, j| m[(perm[i], perm[j])]))
}

/// Classical correlations with the measurement on `measured` instead of B.
pub fn classical_correlations_measuring(
    rho: &DensityMatrix,
    measured: Subsystem,
) -> Result<(f64, MeasurementBasis)> {
    match measured {
        Subsystem::B => classical_correlations(rho),
        Subsystem::A => classical_correlations(&swap_parties(rho)),
    }
}

pub fn quantum_discord_measuring(rho: &DensityMatrix, measured: Subsystem) -> Result<f64> {
    match measured {
        Subsystem::B => quantum_discord(rho),
        Subsystem::A => quantum_discord(&swap_parties(rho)),
    }
}

/// `(sigma_y x sigma_y) conj(rho) (sigma_y x sigma_y)`.
pub fn spin_flip(m: &Mat4) -> Mat4 {
    let yy = kron2(&pauli::y(), &pauli::y());
    yy * m.map(|z| z.conj()) * yy
}

/// Wootters concurrence from the eigenvalues of the non-Hermitian `rho rho~`.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    let eig = rho.eigen_decomposition();
    // rho = W W^dagger with W = U sqrt(diag(p)); the lambdas are the singular
    // values of W^T (sigma_y x sigma_y) W, which avoids squaring them
    let mut w = eig.eigenvectors;
    for (k, &p) in eig.eigenvalues.iter().enumerate() {
        if p < -POSITIVITY_TOL {
            return Err(Error::NonPhysicalState { min_eigenvalue: p });
        }
        w.column_mut(k).scale_mut(p.max(0.0).sqrt());
    }
    let yy = kron2(&pauli::y(), &pauli::y());
    let tau = w.transpose() * yy * w;
    let mut lambdas: [f64; 4] = tau.singular_values().into();
    Ok(wootters_combination(&mut lambdas))
}

fn wootters_combination(lambdas: &mut [f64; 4]) -> f64 {
    lambdas.sort_by(|a, b| b.total_cmp(a));
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0)
}

/// Concurrence from the square roots of the eigenvalues of the
/// non-Hermitian `rho rho~`.
///
/// Zero eigenvalues come out at roundoff level and their square roots at
/// about `1e-8`, so this route is less accurate than [`concurrence`] for
/// rank-deficient states.
pub fn concurrence_from_spin_flip_spectrum(rho: &DensityMatrix) -> Result<f64> {
    let m = rho.matrix();
    let r: Matrix4<C64> = m * spin_flip(m);
    let eigenvalues = r.schur().eigenvalues().ok_or_else(|| {
        Error::NumericalFailure("Schur decomposition of rho rho~ did not converge".into())
    })?;
    let mut lambdas = [0.0; 4];
    for (k, mu) in eigenvalues.iter().enumerate() {
        if mu.im.abs() > CONCURRENCE_IMAG_FAILURE {
            return Err(Error::NumericalFailure(format!(
                "eigenvalue {mu} of rho rho~ has a large imaginary part"
            )));
        }
        lambdas[k] = mu.re.max(0.0).sqrt();
    }
    Ok(wootters_combination(&mut lambdas))
}

/// `E(C) = h((1 + sqrt(1 - C^2)) / 2)`.
pub fn eof_from_concurrence(c: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::InvalidProbability(c));
    }
    binary_entropy(0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt()))
}

/// Entanglement of formation.
pub fn eof(rho: &DensityMatrix) -> Result<f64> {
    eof_from_concurrence(concurrence(rho)?)
}

/// Largest modulus among the entries that vanish in the X structure with
/// an empty doubly excited level.
pub fn x_structure_defect(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let mut worst = m[(3, 3)].norm();
    for i in 0..4 {
        for j in 0..4 {
            let inner = (i == 1 || i == 2) && (j == 1 || j == 2);
            if i != j && !inner {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    worst
}

fn require_x_structure(rho: &DensityMatrix) -> Result<()> {
    let defect = x_structure_defect(rho);
    if defect > X_STRUCTURE_TOL {
        return Err(Error::NotXState { defect });
    }
    Ok(())
}

/// The two candidate conditional entropies of an X state: `S1` from the
/// `sigma_z` measurement on B and `S2` from the optimal equatorial one.
pub fn xstate_conditional_entropy_branches(rho: &DensityMatrix) -> Result<(f64, f64)> {
    require_x_structure(rho)?;
    let ground = rho.get(0, 0).re;
    let excited_a = rho.get(2, 2).re;
    let coherence = rho.get(1, 2).norm();

    let p0 = ground + excited_a;
    let s1 = if p0 > 0.0 {
        -xlog2x(ground) - xlog2x(excited_a) + xlog2x(p0)
    } else {
        0.0
    };
    let xi = ((1.0 - 2.0 * excited_a).powi(2) + 4.0 * coherence * coherence)
        .sqrt()
        .min(1.0);
    let s2 = binary_entropy(0.5 * (1.0 - xi))?;
    Ok((s1.max(0.0), s2))
}

/// `C = 2 |rho_{01,10}|` for X states with an empty doubly excited level.
pub fn xstate_concurrence(rho: &DensityMatrix) -> Result<f64> {
    require_x_structure(rho)?;
    Ok((2.0 * rho.get(1, 2).norm()).min(1.0))
}

/// `S(rho_B) + 2 min S(A|B) - S(rho_A) - S(rho_AB)`, which equals `D - CC`.
pub fn entropy_bound_check(rho: &DensityMatrix) -> Result<f64> {
    let sa = rho.partial_trace(Subsystem::A).entropy()?;
    let sb = rho.partial_trace(Subsystem::B).entropy()?;
    let min = minimize_conditional_entropy(rho);
    Ok(sb + 2.0 * min.entropy - sa - rho.entropy()?)
}

/// All correlation measures of one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationRecord {
    pub t: f64,
    pub mutual_information: f64,
    pub classical: f64,
    pub discord: f64,
    pub concurrence: f64,
    pub eof: f64,
    pub argmax_basis: MeasurementBasis,
}

impl CorrelationRecord {
    /// `D - CC`, the entropy bound.
    pub fn bound(&self) -> f64 {
        self.discord - self.classical
    }
}

pub fn correlation_record(rho: &DensityMatrix, t: f64) -> Result<CorrelationRecord> {
    let sa = rho.partial_trace(Subsystem::A).entropy()?;
    let sb = rho.partial_trace(Subsystem::B).entropy()?;
    let sab = entropy_from_eigenvalues(&rho.eigenvalues())?;
    let min = minimize_conditional_entropy(rho);
    let c = concurrence(rho)?;
    // CC and D share the minimizer, so MI = D + CC holds by construction
    Ok(CorrelationRecord {
        t,
        mutual_information: sa + sb - sab,
        classical: sa - min.entropy,
        discord: sb - sab + min.entropy,
        concurrence: c,
        eof: eof_from_concurrence(c)?,
        argmax_basis: min.basis,
    })
}

/// Records for every sample of a trajectory, evaluated in parallel and
/// returned in time order.
pub fn trajectory_records(evolution: &EvolutionResult) -> Result<Vec<CorrelationRecord>> {
    evolution
        .times
        .par_iter()
        .zip(evolution.states.par_iter())
        .map(|(&t, rho)| correlation_record(rho, t))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{analytic_evolution, build_bell_diagonal, AlphaState, SystemParams};
    use crate::state::PureState;
    use approx::assert_abs_diff_eq;
    use nalgebra::Vector4;

    fn bell() -> DensityMatrix {
        AlphaState::symmetric().density_matrix()
    }

    fn product() -> DensityMatrix {
        let a = ReducedState::new(
            Mat2::new(
                C64::from(0.7),
                C64::new(0.2, 0.1),
                C64::new(0.2, -0.1),
                C64::from(0.3),
            ),
            Subsystem::A,
        )
        .unwrap();
        let b = ReducedState::new(
            Mat2::new(
                C64::from(0.4),
                C64::new(0.0, -0.2),
                C64::new(0.0, 0.2),
                C64::from(0.6),
            ),
            Subsystem::B,
        )
        .unwrap();
        DensityMatrix::product(&a, &b)
    }

    #[test]
    fn basis_is_orthonormal() {
        for &(t, p) in &[(0.0, 0.0), (0.3, 1.0), (FRAC_PI_2, 5.0), (2.5, -1.0)] {
            let b = MeasurementBasis::new(t, p);
            assert!((0.0..=FRAC_PI_2).contains(&b.theta()));
            assert!((0.0..TAU).contains(&b.phi()));
            let (u, v) = b.vectors();
            assert!(u.dotc(&v).norm() < 1e-12);
            let sum = b.projector(Outcome::First) + b.projector(Outcome::Second);
            assert!((sum - Mat2::identity()).norm() < 1e-12);
        }
    }

    #[test]
    fn normalized_angles_describe_same_measurement() {
        let rho = build_bell_diagonal(0.3, -0.2, 0.5).unwrap();
        let rho =
            DensityMatrix::new(rho.matrix() * C64::from(0.5) + product().matrix() * C64::from(0.5))
                .unwrap();
        for &(t, p) in &[(2.0, 0.4), (-0.7, 1.1), (4.0, -3.0)] {
            let raw = conditional_entropy_at(rho.matrix(), t, p);
            let b = MeasurementBasis::new(t, p);
            assert_abs_diff_eq!(raw, conditional_entropy(&rho, &b).unwrap(), epsilon = 1e-12);
        }
    }

    #[test]
    fn bell_measured_in_computational_basis() {
        let (state, p) =
            post_measurement_state(&bell(), &MeasurementBasis::computational(), Outcome::First)
                .unwrap();
        assert_abs_diff_eq!(p, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(state.matrix()[(1, 1)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(state.entropy().unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn product_state_conditionals_equal_marginal() {
        let rho = product();
        let marginal = rho.partial_trace(Subsystem::A);
        let b = MeasurementBasis::new(0.4, 2.0);
        let mut total = 0.0;
        for outcome in [Outcome::First, Outcome::Second] {
            let (s, p) = post_measurement_state(&rho, &b, outcome).unwrap();
            assert!((s.matrix() - marginal.matrix()).norm() < 1e-12);
            total += p;
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_probability_branch() {
        let rho = DensityMatrix::ground();
        let r = post_measurement_state(&rho, &MeasurementBasis::computational(), Outcome::Second);
        assert!(matches!(r, Err(Error::ConditionalUndefined { .. })));
        assert_eq!(
            conditional_entropy(&rho, &MeasurementBasis::computational()).unwrap(),
            0.0
        );
    }

    #[test]
    fn conditional_entropy_examples() {
        let pure_product = PureState::basis(1, 0).to_density_matrix();
        let b = MeasurementBasis::new(0.9, 0.2);
        assert_abs_diff_eq!(
            conditional_entropy(&pure_product, &b).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            conditional_entropy(&bell(), &b).unwrap(),
            0.0,
            epsilon = 1e-7
        );
        let incoherent = build_bell_diagonal(0.0, 0.0, 0.6).unwrap();
        let s = conditional_entropy(&incoherent, &MeasurementBasis::computational()).unwrap();
        // h(0.2) = 1 - CC with CC = 0.278
        assert_abs_diff_eq!(s, 0.721_928_094_887_362_3, epsilon = 1e-12);
        assert_abs_diff_eq!(1.0 - s, 0.278, epsilon = 5e-4);
    }

    #[test]
    fn bell_state_measures() {
        let r = correlation_record(&bell(), 0.0).unwrap();
        assert_abs_diff_eq!(r.mutual_information, 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.classical, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.discord, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.concurrence, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.eof, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn ground_state_has_no_correlations() {
        let r = correlation_record(&DensityMatrix::ground(), 0.0).unwrap();
        for v in [
            r.mutual_information,
            r.classical,
            r.discord,
            r.concurrence,
            r.eof,
        ] {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn bell_diagonal_values() {
        let m = build_bell_diagonal(0.8, 0.8, -0.6).unwrap();
        assert_abs_diff_eq!(mutual_information(&m).unwrap(), 1.078, epsilon = 5e-4);
        assert_abs_diff_eq!(classical_correlations(&m).unwrap().0, 0.531, epsilon = 5e-4);
        assert_abs_diff_eq!(quantum_discord(&m).unwrap(), 0.547, epsilon = 5e-4);
        assert_abs_diff_eq!(entropy_bound_check(&m).unwrap(), 0.016, epsilon = 1e-3);

        let incoherent = build_bell_diagonal(0.0, 0.0, 0.6).unwrap();
        let (cc, _) = classical_correlations(&incoherent).unwrap();
        assert_abs_diff_eq!(cc, 0.278, epsilon = 5e-4);
        assert_abs_diff_eq!(mutual_information(&incoherent).unwrap(), cc, epsilon = 1e-9);
        assert_abs_diff_eq!(quantum_discord(&incoherent).unwrap(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn product_state_bound_vanishes() {
        assert_abs_diff_eq!(
            entropy_bound_check(&product()).unwrap(),
            0.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn pure_state_discord_equals_marginal_entropy() {
        let psi = PureState::normalized(Vector4::new(
            C64::new(0.3, 0.1),
            C64::new(-0.5, 0.2),
            C64::new(0.1, 0.7),
            C64::new(0.2, -0.1),
        ))
        .unwrap()
        .to_density_matrix();
        let sb = psi.partial_trace(Subsystem::B).entropy().unwrap();
        assert_abs_diff_eq!(quantum_discord(&psi).unwrap(), sb, epsilon = 1e-6);
    }

    #[test]
    fn concurrence_examples() {
        assert_abs_diff_eq!(concurrence(&bell()).unwrap(), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(
            concurrence(&PureState::basis(0, 1).to_density_matrix()).unwrap(),
            0.0,
            epsilon = 1e-9
        );
        let alpha = AlphaState::new(0.25, 0.7).unwrap().density_matrix();
        assert_abs_diff_eq!(
            concurrence(&alpha).unwrap(),
            3.0_f64.sqrt() / 2.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn eof_examples() {
        assert_abs_diff_eq!(eof_from_concurrence(1.0).unwrap(), 1.0);
        assert_eq!(eof_from_concurrence(0.0).unwrap(), 0.0);
        // h((1 + sqrt(0.99)) / 2) evaluated independently
        assert_abs_diff_eq!(
            eof_from_concurrence(0.1).unwrap(),
            0.025_266_127_727_120_308,
            epsilon = 1e-14
        );
        assert!(eof_from_concurrence(1.5).is_err());
    }

    #[test]
    fn eof_strictly_increasing() {
        let mut prev = -1.0;
        for k in 0..=10_000 {
            let e = eof_from_concurrence(k as f64 / 10_000.0).unwrap();
            assert!(e > prev, "not increasing at C = {}", k as f64 / 10_000.0);
            prev = e;
        }
    }

    #[test]
    fn xstate_branches_examples() {
        let (s1, s2) = xstate_conditional_entropy_branches(&bell()).unwrap();
        assert_abs_diff_eq!(s1, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s2, 0.0, epsilon = 1e-15);

        let p = SystemParams::identical(2.03, 0.91);
        for k in 0..=50 {
            let rho = analytic_evolution(&AlphaState::symmetric(), &p, 0.1 * k as f64).unwrap();
            let (s1, s2) = xstate_conditional_entropy_branches(&rho).unwrap();
            assert!(
                s2 <= s1 + 1e-12,
                "t = {}: S2 = {s2} > S1 = {s1}",
                0.1 * k as f64
            );
        }
        assert!(matches!(
            xstate_conditional_entropy_branches(&product()),
            Err(Error::NotXState { .. })
        ));
    }

    #[test]
    fn xstate_branches_match_measurements() {
        let rho = analytic_evolution(
            &AlphaState::new(0.3, 1.2).unwrap(),
            &SystemParams::identical(2.0, 0.5),
            0.7,
        )
        .unwrap();
        let (s1, s2) = xstate_conditional_entropy_branches(&rho).unwrap();
        assert_abs_diff_eq!(
            s1,
            conditional_entropy(&rho, &MeasurementBasis::computational()).unwrap(),
            epsilon = 1e-12
        );
        // equatorial measurement phase-matched to rho_{01,10}
        let phase = rho.get(1, 2).arg();
        let equatorial = (0..720)
            .map(|k| {
                conditional_entropy(
                    &rho,
                    &MeasurementBasis::new(PI / 4.0, k as f64 * TAU / 720.0),
                )
                .unwrap()
            })
            .fold(f64::INFINITY, f64::min);
        let matched = conditional_entropy(&rho, &MeasurementBasis::new(PI / 4.0, -phase))
            .unwrap()
            .min(conditional_entropy(&rho, &MeasurementBasis::new(PI / 4.0, phase)).unwrap());
        assert_abs_diff_eq!(s2, matched, epsilon = 1e-12);
        assert!(s2 <= equatorial + 1e-12);
        let optimum = minimize_conditional_entropy(&rho).entropy;
        assert_abs_diff_eq!(s1.min(s2), optimum, epsilon = 1e-6);
    }

    #[test]
    fn xstate_concurrence_examples() {
        assert_abs_diff_eq!(xstate_concurrence(&bell()).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(
            xstate_concurrence(&PureState::basis(0, 1).to_density_matrix()).unwrap(),
            0.0
        );
        let rho = analytic_evolution(
            &AlphaState::new(0.0, 0.0).unwrap(),
            &SystemParams::identical(2.0, 0.0),
            1.0,
        )
        .unwrap();
        assert_abs_diff_eq!(
            xstate_concurrence(&rho).unwrap(),
            concurrence(&rho).unwrap(),
            epsilon = 1e-9
        );
        assert!(xstate_concurrence(&DensityMatrix::doubly_excited()).is_err());
    }

    #[test]
    fn swap_parties_exchanges_marginals() {
        let rho = product();
        let swapped = swap_parties(&rho);
        let a = rho.partial_trace(Subsystem::A);
        let b_of_swapped = swapped.partial_trace(Subsystem::B);
        assert!((a.matrix() - b_of_swapped.matrix()).norm() < 1e-15);
        let (cc_a, _) = classical_correlations_measuring(&rho, Subsystem::A).unwrap();
        assert_abs_diff_eq!(cc_a, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(
            quantum_discord_measuring(&rho, Subsystem::A).unwrap(),
            0.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn spin_flip_of_bell_state_is_itself() {
        let b = bell();
        assert!((spin_flip(b.matrix()) - b.matrix()).norm() < 1e-15);
    }
}
