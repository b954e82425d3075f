//! Independent reference computations for the measurement optimization.
//!
//! Nothing here shares code with [`crate::correlations`]: measurements use
//! the full Bloch-sphere parametrization `theta in [0, pi]`, outcomes are
//! formed as `(I x P) rho (I x P)` with explicit 4x4 products, entropies come
//! from a general Hermitian eigensolver, and the local refinement is a
//! shrinking-stencil search rather than a pattern search.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::state::DensityMatrix;

/// Points per angle of the brute-force grid.
pub const BRUTE_GRID: usize = 512;
const STENCIL: i32 = 2;
const FINAL_STEP: f64 = 1e-10;

fn entropy_of(m: &Matrix2<Complex64>) -> f64 {
    SymmetricEigen::new(*m)
        .eigenvalues
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum()
}

fn entropy4(m: &Matrix4<Complex64>) -> f64 {
    SymmetricEigen::new(*m)
        .eigenvalues
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum()
}

fn trace_out_b(m: &Matrix4<Complex64>) -> Matrix2<Complex64> {
    Matrix2::from_fn(|a, c| m[(2 * a, 2 * c)] + m[(2 * a + 1, 2 * c + 1)])
}

fn trace_out_a(m: &Matrix4<Complex64>) -> Matrix2<Complex64> {
    Matrix2::from_fn(|b, d| m[(b, d)] + m[(2 + b, 2 + d)])
}

fn one_on_a(p: &Matrix2<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|r, c| {
        if r / 2 == c / 2 {
            p[(r % 2, c % 2)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `S(A | {P_n})` for a projective measurement of B along the Bloch
/// direction `(theta, phi)`.
pub fn conditional_entropy(rho: &DensityMatrix, theta: f64, phi: f64) -> f64 {
    let (s, c) = (0.5 * theta).sin_cos();
    let e = Complex64::from_polar(1.0, phi);
    let up = Vector2::new(Complex64::from(c), e * s);
    let down = Vector2::new(-e.conj() * s, Complex64::from(c));
    let mut total = 0.0;
    for v in [up, down] {
        let full = one_on_a(&(v * v.adjoint()));
        let post = full * rho.matrix() * full;
        let p = post.trace().re;
        if p > 1e-14 {
            total += p * entropy_of(&(trace_out_b(&post) / Complex64::from(p)));
        }
    }
    total
}

/// Minimum conditional entropy from a `BRUTE_GRID x BRUTE_GRID` scan of the
/// sphere followed by a shrinking-stencil refinement of the best point.
pub fn min_conditional_entropy(rho: &DensityMatrix) -> f64 {
    let n = BRUTE_GRID;
    let d_theta = PI / (n - 1) as f64;
    let d_phi = TAU / n as f64;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let (theta, phi) = (i as f64 * d_theta, j as f64 * d_phi);
            let f = conditional_entropy(rho, theta, phi);
            if f < best.0 {
                best = (f, theta, phi);
            }
        }
    }
    let (mut f, mut theta, mut phi) = best;
    let (mut h_theta, mut h_phi) = (d_theta, d_phi);
    while h_theta > FINAL_STEP {
        let mut moved = false;
        for i in -STENCIL..=STENCIL {
            for j in -STENCIL..=STENCIL {
                if i == 0 && j == 0 {
                    continue;
                }
                let (t, p) = (theta + i as f64 * h_theta, phi + j as f64 * h_phi);
                let g = conditional_entropy(rho, t, p);
                if g < f {
                    (f, theta, phi, moved) = (g, t, p, true);
                }
            }
        }
        if !moved {
            h_theta *= 0.5;
            h_phi *= 0.5;
        }
    }
    f
}

/// Reference `(MI, CC, QD)` for a measurement on B.
pub fn correlations(rho: &DensityMatrix) -> (f64, f64, f64) {
    let m = rho.matrix();
    let sa = entropy_of(&trace_out_b(m));
    let sb = entropy_of(&trace_out_a(m));
    let sab = entropy4(m);
    let min = min_conditional_entropy(rho);
    (sa + sb - sab, sa - min, sb - sab + min)
}

/// Random state of the given rank (1 to 4) from the induced Ginibre measure.
pub fn random_state<R: Rng>(rng: &mut R, rank: usize) -> DensityMatrix {
    assert!((1..=4).contains(&rank), "rank must be between 1 and 4");
    let mut g = Matrix4::<Complex64>::zeros();
    for r in 0..4 {
        for c in 0..rank {
            g[(r, c)] = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
    }
    let m = g * g.adjoint();
    let m = (m + m.adjoint()) / (m.trace() + m.trace().conj());
    DensityMatrix::new(m).expect("a normalized Gram matrix is a density matrix")
}

/// `count` seeded random states cycling through ranks 1 to 4.
pub fn random_states(seed: u64, count: usize) -> Vec<DensityMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| random_state(&mut rng, 1 + k % 4))
        .collect()
}
