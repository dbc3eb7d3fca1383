//! Test-side oracle: brute-force matrix-exponential propagation,
//! independent of the library's eigendecomposition path.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

fn one_norm(a: &DMatrix<Complex64>) -> f64 {
    let mut max = 0.0f64;
    for j in 0..a.ncols() {
        let sum: f64 = a.column(j).iter().map(|z| z.norm()).sum();
        max = max.max(sum);
    }
    max
}

/// exp(A) by scaling-and-squaring with a Taylor series on the scaled
/// matrix.
pub fn expm(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let dim = a.nrows();
    assert_eq!(dim, a.ncols());
    let norm = one_norm(a);
    let s = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let scale = Complex64::new(1.0 / 2f64.powi(s as i32), 0.0);
    let b = a * scale;

    let mut sum = DMatrix::<Complex64>::identity(dim, dim);
    let mut term = DMatrix::<Complex64>::identity(dim, dim);
    for k in 1..=60u32 {
        term = (&term * &b) / Complex64::new(k as f64, 0.0);
        sum += &term;
        if one_norm(&term) < 1e-20 * one_norm(&sum) {
            break;
        }
    }
    let mut result = sum;
    for _ in 0..s {
        result = &result * &result;
    }
    result
}

/// exp(-i H t) psi0.
pub fn evolve_brute(
    h: &DMatrix<Complex64>,
    psi0: &DVector<Complex64>,
    t: f64,
) -> DVector<Complex64> {
    let a = h * Complex64::new(0.0, -t);
    expm(&a) * psi0
}

/// <I_k^z> from bit convention (site 1 = most significant bit, bit 0 = up).
pub fn polarization_brute(psi: &DVector<Complex64>, n: usize, site: usize) -> f64 {
    let bit = n - site;
    let mut p = 0.0;
    for (index, amp) in psi.iter().enumerate() {
        let sign = if (index >> bit) & 1 == 0 { 0.5 } else { -0.5 };
        p += sign * amp.norm_sqr();
    }
    p
}

#[cfg(test)]
mod self_checks {
    use super::*;

    #[test]
    fn expm_zero_is_identity() {
        let z = DMatrix::<Complex64>::zeros(4, 4);
        let e = expm(&z);
        let id = DMatrix::<Complex64>::identity(4, 4);
        assert!(one_norm(&(e - id)) < 1e-15);
    }

    #[test]
    fn expm_pauli_x_rotation() {
        // exp(-i theta sigma_x / 2): cos/sin entries
        let theta = 1.3f64;
        let mut sx = DMatrix::<Complex64>::zeros(2, 2);
        sx[(0, 1)] = Complex64::new(1.0, 0.0);
        sx[(1, 0)] = Complex64::new(1.0, 0.0);
        let a = sx * Complex64::new(0.0, -theta / 2.0);
        let u = expm(&a);
        assert!((u[(0, 0)] - Complex64::new((theta / 2.0).cos(), 0.0)).norm() < 1e-14);
        assert!((u[(0, 1)] - Complex64::new(0.0, -(theta / 2.0).sin())).norm() < 1e-14);
    }

    #[test]
    fn expm_large_argument_unitary() {
        // strong scaling branch: exp(-i H t) stays unitary
        let mut h = DMatrix::<Complex64>::zeros(4, 4);
        for i in 0..4 {
            h[(i, i)] = Complex64::new(50.0 * (i as f64 - 1.5), 0.0);
        }
        h[(0, 1)] = Complex64::new(3.0, 1.0);
        h[(1, 0)] = Complex64::new(3.0, -1.0);
        let u = expm(&(h * Complex64::new(0.0, -7.0)));
        let id = DMatrix::<Complex64>::identity(4, 4);
        assert!(one_norm(&(&u * u.adjoint() - id)) < 1e-10);
    }
}
