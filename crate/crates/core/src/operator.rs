//! Spin-1/2 operator algebra on the full 2^N-dimensional product space.
//!
//! Single-site spin operators I^a = sigma^a / 2 are embedded by tensor
//! products under a fixed ordering convention: spin 1 occupies the most
//! significant position, and for basis index `i` the state of site `k`
//! (1-based) is read off bit `n - k`, with bit 0 meaning "up"
//! (I^z eigenvalue +1/2) and bit 1 meaning "down" (-1/2).

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on the spin count; the dense representation is 2^N x 2^N.
pub const MAX_SPINS: usize = 12;

/// Every public constructor returns matrices Hermitian to this tolerance.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// State vectors must be normalized to this tolerance.
pub const NORM_TOL: f64 = 1e-10;

/// Cartesian axis of a spin operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpinAxis {
    X,
    Y,
    Z,
}

impl SpinAxis {
    pub const ALL: [SpinAxis; 3] = [SpinAxis::X, SpinAxis::Y, SpinAxis::Z];
}

/// The standard 2x2 Pauli matrix for `axis`.
pub fn pauli_matrix(axis: SpinAxis) -> DMatrix<Complex64> {
    let (a, b, c, d) = match axis {
        SpinAxis::X => (
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ),
        SpinAxis::Y => (
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ),
        SpinAxis::Z => (
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-1.0, 0.0),
        ),
    };
    DMatrix::from_row_slice(2, 2, &[a, b, c, d])
}

fn spin_half_matrix(axis: SpinAxis) -> DMatrix<Complex64> {
    pauli_matrix(axis) * Complex64::new(0.5, 0.0)
}

fn check_spin_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_SPINS {
        return Err(Error::SpinCount(n));
    }
    Ok(())
}

fn check_site(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::SiteOutOfRange { site: k, n });
    }
    Ok(())
}

/// Bit position of site `k` (1-based) in a basis index for `n` spins.
#[inline]
pub(crate) fn site_bit(n: usize, k: usize) -> usize {
    n - k
}

/// True if site `k` is "up" in basis state `index`.
#[inline]
pub(crate) fn site_is_up(index: usize, n: usize, k: usize) -> bool {
    (index >> site_bit(n, k)) & 1 == 0
}

/// Dense Hermitian operator on the 2^N spin Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    matrix: DMatrix<Complex64>,
}

impl Operator {
    /// Wrap a matrix, validating squareness, power-of-two dimension and
    /// Hermiticity.
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = matrix.nrows();
        if dim != matrix.ncols() || !dim.is_power_of_two() || dim > (1 << MAX_SPINS) {
            return Err(Error::SpinCount(dim.max(1).ilog2() as usize));
        }
        let op = Operator { matrix };
        let dev = op.hermiticity_deviation();
        if dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian { dev });
        }
        Ok(op)
    }

    /// Zero operator on `n` spins.
    pub fn zero(n: usize) -> Result<Self> {
        check_spin_count(n)?;
        Ok(Operator {
            matrix: DMatrix::zeros(1 << n, 1 << n),
        })
    }

    pub(crate) fn from_hermitian_unchecked(matrix: DMatrix<Complex64>) -> Self {
        debug_assert!(matrix.is_square());
        Operator { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_spins(&self) -> usize {
        self.dim().ilog2() as usize
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Largest entrywise deviation from the adjoint.
    pub fn hermiticity_deviation(&self) -> f64 {
        let dim = self.dim();
        let mut dev = 0.0f64;
        for i in 0..dim {
            for j in i..dim {
                dev = dev.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// <psi| self |psi>.
    pub fn expectation(&self, psi: &StateVector) -> Result<Complex64> {
        if self.dim() != psi.dim() {
            return Err(Error::DimensionMismatch {
                op: self.dim(),
                state: psi.dim(),
            });
        }
        Ok(psi.amplitudes().dotc(&(&self.matrix * psi.amplitudes())))
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Operator {
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Operator {
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        Operator {
            matrix: &self.matrix * Complex64::new(rhs, 0.0),
        }
    }
}

/// The embedded single-site spin operator I_k^axis on `n` spins.
pub fn site_operator(n: usize, k: usize, axis: SpinAxis) -> Result<Operator> {
    check_spin_count(n)?;
    check_site(n, k)?;
    product_operator(n, &[(k, axis)], 1.0)
}

/// coefficient x product of embedded single-site operators on distinct
/// sites. An empty factor list yields coefficient x identity.
pub fn product_operator(
    n: usize,
    factors: &[(usize, SpinAxis)],
    coefficient: f64,
) -> Result<Operator> {
    check_spin_count(n)?;
    let mut per_site: Vec<Option<SpinAxis>> = vec![None; n + 1];
    for &(site, axis) in factors {
        check_site(n, site)?;
        if per_site[site].is_some() {
            return Err(Error::RepeatedSite(site));
        }
        per_site[site] = Some(axis);
    }

    let id2 = DMatrix::<Complex64>::identity(2, 2);
    let mut matrix = DMatrix::<Complex64>::identity(1, 1);
    for site in 1..=n {
        let factor = match per_site[site] {
            Some(axis) => spin_half_matrix(axis),
            None => id2.clone(),
        };
        matrix = matrix.kronecker(&factor);
    }
    matrix *= Complex64::new(coefficient, 0.0);
    Ok(Operator::from_hermitian_unchecked(matrix))
}

/// Normalized pure state on the 2^N spin Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: DVector<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if !dim.is_power_of_two() || dim > (1 << MAX_SPINS) {
            return Err(Error::SpinCount(dim.max(1).ilog2() as usize));
        }
        let drift = (amplitudes.norm() - 1.0).abs();
        if drift > NORM_TOL {
            return Err(Error::NormDrift {
                drift,
                tol: NORM_TOL,
            });
        }
        Ok(StateVector { amplitudes })
    }

    /// Computational basis state |index> on `n` spins.
    pub fn basis_state(n: usize, index: usize) -> Result<Self> {
        check_spin_count(n)?;
        let dim = 1 << n;
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut amplitudes = DVector::zeros(dim);
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn n_spins(&self) -> usize {
        self.dim().ilog2() as usize
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }
}
