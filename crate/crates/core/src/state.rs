//! Two-qubit states and the linear-algebra primitives used on them.
//!
//! Basis ordering is `{|00>, |01>, |10>, |11>}` with qubit A the left factor,
//! so the index of `|a b>` is `2a + b`. Entropies are in bits.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;

/// Allowed Hermiticity defect `max |rho_ij - conj(rho_ji)|`.
pub const HERMITICITY_TOL: f64 = 1e-9;
/// Allowed `|tr(rho) - 1|`.
pub const TRACE_TOL: f64 = 1e-9;
/// Eigenvalues in `[-POSITIVITY_TOL, 0)` are roundoff and clamped to zero.
pub const POSITIVITY_TOL: f64 = 1e-8;
/// Allowed `| ||psi|| - 1 |` for pure states.
pub const NORM_TOL: f64 = 1e-12;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

impl FromStr for Subsystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Subsystem::A),
            "B" | "b" => Ok(Subsystem::B),
            other => Err(Error::InvalidSubsystem(other.to_string())),
        }
    }
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subsystem::A => f.write_str("A"),
            Subsystem::B => f.write_str("B"),
        }
    }
}

/// Normalized pure state of the emitter pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState(Vector4<C64>);

impl PureState {
    pub fn new(amplitudes: Vector4<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(PureState(amplitudes))
    }

    /// Normalizes `amplitudes`; fails on the zero vector.
    pub fn normalized(amplitudes: Vector4<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Ok(PureState(amplitudes / C64::from(norm)))
    }

    /// Computational basis state `|a b>`.
    pub fn basis(a: u8, b: u8) -> Self {
        let mut v = Vector4::zeros();
        v[(2 * (a & 1) + (b & 1)) as usize] = ONE;
        PureState(v)
    }

    pub fn amplitudes(&self) -> &Vector4<C64> {
        &self.0
    }

    pub fn to_density_matrix(&self) -> DensityMatrix {
        DensityMatrix(self.0 * self.0.adjoint())
    }
}

/// Diagnostic report of the density-matrix invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateReport {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
}

impl StateReport {
    pub fn hermitian(&self) -> bool {
        self.hermiticity_defect <= HERMITICITY_TOL
    }

    pub fn unit_trace(&self) -> bool {
        self.trace_defect <= TRACE_TOL
    }

    pub fn positive(&self) -> bool {
        self.min_eigenvalue >= -POSITIVITY_TOL
    }

    pub fn passed(&self) -> bool {
        self.hermitian() && self.unit_trace() && self.positive()
    }
}

impl fmt::Display for StateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut failures = Vec::new();
        if !self.hermitian() {
            failures.push(format!("hermiticity defect {:e}", self.hermiticity_defect));
        }
        if !self.unit_trace() {
            failures.push(format!("trace defect {:e}", self.trace_defect));
        }
        if !self.positive() {
            failures.push(format!("negativity {:e}", self.min_eigenvalue));
        }
        if failures.is_empty() {
            write!(
                f,
                "pass (hermiticity {:e}, trace {:e}, min eigenvalue {:e})",
                self.hermiticity_defect, self.trace_defect, self.min_eigenvalue
            )
        } else {
            write!(f, "fail: {}", failures.join(", "))
        }
    }
}

fn hermiticity_defect<const N: usize>(m: &nalgebra::SMatrix<C64, N, N>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..N {
        for j in 0..N {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn hermitian_part<const N: usize>(
    m: &nalgebra::SMatrix<C64, N, N>,
) -> nalgebra::SMatrix<C64, N, N> {
    (m + m.adjoint()) * C64::from(0.5)
}

/// Checks Hermiticity, unit trace and positivity of a 4x4 matrix.
///
/// The minimum eigenvalue is taken from the Hermitian part so the report is
/// meaningful even when the Hermiticity check fails.
pub fn validate_state(m: &Mat4) -> StateReport {
    let eigenvalues = nalgebra::SymmetricEigen::new(hermitian_part(m)).eigenvalues;
    StateReport {
        hermiticity_defect: hermiticity_defect(m),
        trace_defect: (m.trace() - ONE).norm(),
        min_eigenvalue: eigenvalues.min(),
    }
}

pub fn validate_reduced(m: &Mat2) -> StateReport {
    let h = hermitian_part(m);
    let (lo, _) = hermitian_eigenvalues_2x2(&h);
    StateReport {
        hermiticity_defect: hermiticity_defect(m),
        trace_defect: (m.trace() - ONE).norm(),
        min_eigenvalue: lo,
    }
}

/// Closed-form eigenvalues `(low, high)` of a 2x2 Hermitian matrix.
pub fn hermitian_eigenvalues_2x2(m: &Mat2) -> (f64, f64) {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    let mean = 0.5 * (a + d);
    let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    (mean - half_gap, mean + half_gap)
}

/// Density matrix of the emitter pair satisfying the state invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(Mat4);

impl DensityMatrix {
    pub fn new(m: Mat4) -> Result<Self> {
        let report = validate_state(&m);
        if report.passed() {
            Ok(DensityMatrix(m))
        } else {
            Err(Error::InvalidState(report))
        }
    }

    /// Builds from real and imaginary parts in row-major order.
    pub fn from_parts(re: [[f64; 4]; 4], im: [[f64; 4]; 4]) -> Result<Self> {
        Self::new(Mat4::from_fn(|i, j| C64::new(re[i][j], im[i][j])))
    }

    pub(crate) fn from_matrix_unchecked(m: Mat4) -> Self {
        DensityMatrix(m)
    }

    pub fn product(a: &ReducedState, b: &ReducedState) -> Self {
        DensityMatrix(kron2(&a.matrix, &b.matrix))
    }

    pub fn basis(a: u8, b: u8) -> Self {
        PureState::basis(a, b).to_density_matrix()
    }

    pub fn ground() -> Self {
        Self::basis(0, 0)
    }

    pub fn doubly_excited() -> Self {
        Self::basis(1, 1)
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(Mat4::identity() * C64::from(0.25))
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn into_matrix(self) -> Mat4 {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn report(&self) -> StateReport {
        validate_state(&self.0)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut ev: [f64; 4] = nalgebra::SymmetricEigen::new(hermitian_part(&self.0))
            .eigenvalues
            .into();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn eigen_decomposition(&self) -> nalgebra::SymmetricEigen<C64, nalgebra::U4> {
        nalgebra::SymmetricEigen::new(hermitian_part(&self.0))
    }

    pub fn entropy(&self) -> Result<f64> {
        entropy_from_eigenvalues(&self.eigenvalues())
    }

    pub fn partial_trace(&self, keep: Subsystem) -> ReducedState {
        partial_trace(self, keep)
    }

    /// Largest elementwise modulus of the difference to `other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (self.0 - other.0)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// 2x2 state of one emitter, tagged with the subsystem it describes.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedState {
    matrix: Mat2,
    subsystem: Subsystem,
}

impl ReducedState {
    pub fn new(matrix: Mat2, subsystem: Subsystem) -> Result<Self> {
        let report = validate_reduced(&matrix);
        if report.passed() {
            Ok(ReducedState { matrix, subsystem })
        } else {
            Err(Error::InvalidState(report))
        }
    }

    pub(crate) fn from_matrix_unchecked(matrix: Mat2, subsystem: Subsystem) -> Self {
        ReducedState { matrix, subsystem }
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    pub fn subsystem(&self) -> Subsystem {
        self.subsystem
    }

    pub fn eigenvalues(&self) -> [f64; 2] {
        let (lo, hi) = hermitian_eigenvalues_2x2(&self.matrix);
        [lo, hi]
    }

    pub fn entropy(&self) -> Result<f64> {
        entropy_from_eigenvalues(&self.eigenvalues())
    }
}

/// States with a Hermitian spectrum.
pub trait Spectrum {
    fn spectrum(&self) -> Vec<f64>;
}

impl Spectrum for DensityMatrix {
    fn spectrum(&self) -> Vec<f64> {
        self.eigenvalues().to_vec()
    }
}

impl Spectrum for ReducedState {
    fn spectrum(&self) -> Vec<f64> {
        self.eigenvalues().to_vec()
    }
}

/// `S(rho) = -tr(rho log2 rho)`.
pub fn von_neumann_entropy<S: Spectrum + ?Sized>(state: &S) -> Result<f64> {
    entropy_from_eigenvalues(&state.spectrum())
}

/// `-sum lambda log2 lambda` with `0 log 0 = 0` and roundoff negativity clamped.
pub fn entropy_from_eigenvalues(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &lambda in eigenvalues {
        if lambda < -POSITIVITY_TOL {
            return Err(Error::NonPhysicalState {
                min_eigenvalue: lambda,
            });
        }
        s -= xlog2x(lambda);
    }
    Ok(s.max(0.0))
}

/// `x log2 x`, zero for `x <= 0`.
#[inline]
pub(crate) fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// Binary entropy `h(x) = -x log2 x - (1-x) log2 (1-x)`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    const SLACK: f64 = 1e-12;
    if !(-SLACK..=1.0 + SLACK).contains(&x) || x.is_nan() {
        return Err(Error::InvalidProbability(x));
    }
    let x = x.clamp(0.0, 1.0);
    Ok((-xlog2x(x) - xlog2x(1.0 - x)).max(0.0))
}

pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> ReducedState {
    ReducedState::from_matrix_unchecked(partial_trace_matrix(rho.matrix(), keep), keep)
}

/// Partial trace on a raw matrix; linear, so no validity is assumed.
pub fn partial_trace_matrix(m: &Mat4, keep: Subsystem) -> Mat2 {
    Mat2::from_fn(|i, j| match keep {
        // (rho_A)_{ij} = sum_b rho_{(i b),(j b)}
        Subsystem::A => m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)],
        // (rho_B)_{ij} = sum_a rho_{(a i),(a j)}
        Subsystem::B => m[(i, j)] + m[(2 + i, 2 + j)],
    })
}

pub fn kron2(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

pub mod pauli {
    use super::{Mat2, C64, I, ONE, ZERO};

    pub fn identity() -> Mat2 {
        Mat2::identity()
    }

    pub fn x() -> Mat2 {
        Mat2::new(ZERO, ONE, ONE, ZERO)
    }

    pub fn y() -> Mat2 {
        Mat2::new(ZERO, -I, I, ZERO)
    }

    /// `diag(1, -1)`: `+1` on the ground state `|0>`.
    pub fn z() -> Mat2 {
        Mat2::new(ONE, ZERO, ZERO, -ONE)
    }

    /// Lowering operator `|0><1|`.
    pub fn lowering() -> Mat2 {
        Mat2::new(ZERO, ONE, ZERO, ZERO)
    }

    /// Raising operator `|1><0|`.
    pub fn raising() -> Mat2 {
        Mat2::new(ZERO, ZERO, ONE, ZERO)
    }

    pub fn excited_projector() -> Mat2 {
        Mat2::new(ZERO, ZERO, ZERO, C64::from(1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bell_plus_odd() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(Vector4::new(ZERO, C64::from(s), C64::from(s), ZERO))
            .unwrap()
            .to_density_matrix()
    }

    #[test]
    fn trace_of_product_basis_state() {
        let rho = DensityMatrix::ground();
        let a = rho.partial_trace(Subsystem::A);
        assert_eq!(a.subsystem(), Subsystem::A);
        assert_abs_diff_eq!(a.matrix()[(0, 0)].re, 1.0);
        assert_abs_diff_eq!(a.matrix()[(1, 1)].re, 0.0);
        assert_abs_diff_eq!(a.matrix()[(0, 1)].norm(), 0.0);
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let b = bell_plus_odd().partial_trace(Subsystem::B);
        let half = Mat2::identity() * C64::from(0.5);
        assert!((b.matrix() - half).norm() < 1e-15);
    }

    #[test]
    fn partial_trace_recovers_product_factors() {
        let ra = Mat2::new(
            C64::from(0.7),
            C64::new(0.1, 0.2),
            C64::new(0.1, -0.2),
            C64::from(0.3),
        );
        let rb = Mat2::new(
            C64::from(0.4),
            C64::new(0.0, 0.3),
            C64::new(0.0, -0.3),
            C64::from(0.6),
        );
        let a = ReducedState::new(ra, Subsystem::A).unwrap();
        let b = ReducedState::new(rb, Subsystem::B).unwrap();
        let rho = DensityMatrix::product(&a, &b);
        assert!((rho.partial_trace(Subsystem::A).matrix() - ra).norm() < 1e-15);
        assert!((rho.partial_trace(Subsystem::B).matrix() - rb).norm() < 1e-15);
    }

    #[test]
    fn subsystem_labels_parse() {
        assert_eq!("A".parse::<Subsystem>().unwrap(), Subsystem::A);
        assert_eq!("b".parse::<Subsystem>().unwrap(), Subsystem::B);
        assert!(matches!(
            "C".parse::<Subsystem>(),
            Err(Error::InvalidSubsystem(_))
        ));
    }

    #[test]
    fn entropy_examples() {
        assert_abs_diff_eq!(bell_plus_odd().entropy().unwrap(), 0.0, epsilon = 1e-12);
        let half = ReducedState::new(Mat2::identity() * C64::from(0.5), Subsystem::A).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&half).unwrap(), 1.0, epsilon = 1e-15);
        // -0.8 log2 0.8 - 0.2 log2 0.2 evaluated independently
        let expected = 0.721_928_094_887_362_3;
        let d = ReducedState::new(
            Mat2::new(C64::from(0.8), ZERO, ZERO, C64::from(0.2)),
            Subsystem::B,
        )
        .unwrap();
        assert_abs_diff_eq!(d.entropy().unwrap(), expected, epsilon = 1e-15);
    }

    #[test]
    fn entropy_rejects_large_negativity() {
        assert!(matches!(
            entropy_from_eigenvalues(&[1.05, -0.05]),
            Err(Error::NonPhysicalState { .. })
        ));
        assert_abs_diff_eq!(
            entropy_from_eigenvalues(&[1.0 + 5e-9, -5e-9]).unwrap(),
            0.0,
            epsilon = 1e-7
        );
    }

    #[test]
    fn binary_entropy_examples() {
        assert_abs_diff_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            binary_entropy(0.11).unwrap(),
            0.499_915_958_164_528_7,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            binary_entropy(0.3).unwrap(),
            binary_entropy(0.7).unwrap(),
            epsilon = 1e-15
        );
        assert!(binary_entropy(1.0 + 1e-13).is_ok());
        assert!(matches!(
            binary_entropy(1.1),
            Err(Error::InvalidProbability(_))
        ));
        assert!(binary_entropy(-1e-6).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn validation_reports() {
        assert!(bell_plus_odd().report().passed());

        let mut m = *DensityMatrix::ground().matrix();
        m[(3, 3)] = C64::from(0.1);
        let report = validate_state(&m);
        assert!(!report.passed());
        assert!(!report.unit_trace());
        assert_abs_diff_eq!(report.trace_defect, 0.1, epsilon = 1e-15);
        assert!(report.to_string().contains("trace defect"));

        let neg = Mat4::from_diagonal(&Vector4::new(
            C64::from(0.6),
            C64::from(0.3),
            C64::from(0.15),
            C64::from(-0.05),
        ));
        let report = validate_state(&neg);
        assert!(report.hermitian() && report.unit_trace());
        assert!(!report.positive());
        assert_abs_diff_eq!(report.min_eigenvalue, -0.05, epsilon = 1e-14);
        assert!(report.to_string().contains("negativity"));
        assert!(DensityMatrix::new(neg).is_err());
    }

    #[test]
    fn pure_state_norm_checked() {
        let v = Vector4::new(ONE, ONE, ZERO, ZERO);
        assert!(matches!(
            PureState::new(v),
            Err(Error::NotNormalized { .. })
        ));
        let p = PureState::normalized(v).unwrap();
        assert_abs_diff_eq!(p.amplitudes().norm(), 1.0, epsilon = 1e-15);
        assert!(PureState::normalized(Vector4::zeros()).is_err());
    }
}
