//! Exact time evolution of pure states and extraction of polarization
//! observables.
//!
//! Static Hamiltonians are evolved through one Hermitian eigendecomposition
//! (phases applied per sample time); time-dependent sources use
//! second-order midpoint stepping with an exact exponential of the
//! Hermitian midpoint matrix, so unitarity is preserved per step.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{site_is_up, Operator, StateVector, HERMITICITY_TOL, NORM_TOL};
use crate::system::{ModelSpec, SystemSpec};

/// Tolerance on energy conservation under a static Hamiltonian.
pub const ENERGY_TOL: f64 = 1e-9;

/// The system/model pair a trajectory was generated from.
#[derive(Clone, Debug)]
pub struct RunMetadata {
    pub system: SystemSpec,
    pub model: ModelSpec,
    /// Initially flipped site; `None` means the all-up state.
    pub flipped_site: Option<usize>,
    /// Step size used by the time-dependent propagator, when applicable.
    pub dt: Option<f64>,
}

/// Numerical health indicators recorded while evolving.
#[derive(Clone, Copy, Debug, Default)]
pub struct EvolveDiagnostics {
    /// max_t | ||psi(t)|| - 1 |
    pub max_norm_deviation: f64,
    /// max_t | <H>(t) - <H>(0) | (static evolution only)
    pub max_energy_drift: f64,
}

/// Sampled per-spin polarizations P_k(t) and their total P(t).
#[derive(Clone, Debug)]
pub struct Trajectory {
    times: Vec<f64>,
    /// n_samples x n_sites
    per_spin: DMatrix<f64>,
    total: Vec<f64>,
    metadata: Option<RunMetadata>,
    diagnostics: EvolveDiagnostics,
}

impl Trajectory {
    /// Build a trajectory from raw samples, validating monotone times and
    /// the polarization bounds |P_k| <= 1/2 and total = row sum.
    pub fn from_parts(times: Vec<f64>, per_spin_rows: Vec<Vec<f64>>) -> Result<Self> {
        if times.is_empty() || times.len() != per_spin_rows.len() {
            return Err(Error::Invalid(
                "trajectory needs one polarization row per sample time".into(),
            ));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid(
                "trajectory times must be strictly increasing".into(),
            ));
        }
        let n_sites = per_spin_rows[0].len();
        if n_sites == 0 || per_spin_rows.iter().any(|r| r.len() != n_sites) {
            return Err(Error::Invalid(
                "trajectory rows must all have the same nonzero length".into(),
            ));
        }
        let mut per_spin = DMatrix::zeros(times.len(), n_sites);
        let mut total = Vec::with_capacity(times.len());
        for (i, row) in per_spin_rows.iter().enumerate() {
            let mut sum = 0.0;
            for (k, &p) in row.iter().enumerate() {
                if p.abs() > 0.5 + 1e-9 {
                    return Err(Error::Invalid(format!(
                        "polarization {p} at sample {i}, site {} out of [-1/2, 1/2]",
                        k + 1
                    )));
                }
                per_spin[(i, k)] = p;
                sum += p;
            }
            total.push(sum);
        }
        Ok(Trajectory {
            times,
            per_spin,
            total,
            metadata: None,
            diagnostics: EvolveDiagnostics::default(),
        })
    }

    pub fn with_metadata(mut self, metadata: RunMetadata) -> Self {
        self.metadata = Some(metadata);
        self
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn n_samples(&self) -> usize {
        self.times.len()
    }

    pub fn n_sites(&self) -> usize {
        self.per_spin.ncols()
    }

    /// P_k at a sample index (site is 1-based).
    pub fn polarization(&self, sample: usize, site: usize) -> f64 {
        self.per_spin[(sample, site - 1)]
    }

    /// Time series of one site's polarization (site is 1-based).
    pub fn site_series(&self, site: usize) -> Vec<f64> {
        self.per_spin.column(site - 1).iter().copied().collect()
    }

    pub fn total(&self) -> &[f64] {
        &self.total
    }

    pub fn metadata(&self) -> Option<&RunMetadata> {
        self.metadata.as_ref()
    }

    pub fn diagnostics(&self) -> EvolveDiagnostics {
        self.diagnostics
    }
}

/// Summary of wavefront propagation and amplification.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveMetrics {
    /// Per site: first time the polarization crosses below zero (linear
    /// interpolation between samples), or `None` if it never does.
    pub arrival_times: Vec<Option<f64>>,
    /// Minimum of the total polarization over the sampled window.
    pub min_total: f64,
    /// P(0) - min_t P(t).
    pub amplification: f64,
}

/// Product state with `flipped_site` down and every other spin up.
pub fn initial_state_first_flipped(n: usize, flipped_site: usize) -> Result<StateVector> {
    if flipped_site == 0 || flipped_site > n {
        return Err(Error::SiteOutOfRange {
            site: flipped_site,
            n,
        });
    }
    StateVector::basis_state(n, 1 << (n - flipped_site))
}

/// The fully polarized |up...up> state.
pub fn all_up_state(n: usize) -> Result<StateVector> {
    StateVector::basis_state(n, 0)
}

/// Per-site polarizations P_k = <psi| I_k^z |psi> and their sum.
///
/// I_k^z is diagonal in the computational basis, so the expectation
/// reduces to a signed sum of |amplitude|^2 over basis states.
pub fn polarizations(psi: &StateVector, n: usize) -> Result<(Vec<f64>, f64)> {
    if psi.dim() != (1usize << n) {
        return Err(Error::DimensionMismatch {
            op: 1 << n,
            state: psi.dim(),
        });
    }
    Ok(polarizations_raw(psi.amplitudes(), n))
}

fn polarizations_raw(amplitudes: &DVector<Complex64>, n: usize) -> (Vec<f64>, f64) {
    let mut per_site = vec![0.0f64; n];
    for (index, amp) in amplitudes.iter().enumerate() {
        let w = amp.norm_sqr();
        if w == 0.0 {
            continue;
        }
        for (k, p) in per_site.iter_mut().enumerate() {
            if site_is_up(index, n, k + 1) {
                *p += 0.5 * w;
            } else {
                *p -= 0.5 * w;
            }
        }
    }
    let total = per_site.iter().sum();
    (per_site, total)
}

fn check_dims(h: &Operator, psi0: &StateVector) -> Result<()> {
    if h.dim() != psi0.dim() {
        return Err(Error::DimensionMismatch {
            op: h.dim(),
            state: psi0.dim(),
        });
    }
    Ok(())
}

fn check_hermitian(h: &Operator) -> Result<()> {
    let dev = h.hermiticity_deviation();
    if dev > HERMITICITY_TOL {
        return Err(Error::NotHermitian { dev });
    }
    Ok(())
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::Invalid("at least one sample time is required".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid(
            "sample times must be strictly increasing".into(),
        ));
    }
    Ok(())
}

struct Eigh {
    values: DVector<f64>,
    vectors: DMatrix<Complex64>,
}

fn eigh(h: &Operator) -> Eigh {
    let se = h.matrix().clone().symmetric_eigen();
    Eigh {
        values: se.eigenvalues,
        vectors: se.eigenvectors,
    }
}

/// psi(t) = exp(-i H t) psi0 sampled at `times`, via one Hermitian
/// eigendecomposition. Norm and energy conservation are enforced at every
/// sample.
pub fn evolve_static(h: &Operator, psi0: &StateVector, times: &[f64]) -> Result<Trajectory> {
    check_dims(h, psi0)?;
    check_hermitian(h)?;
    check_times(times)?;
    let n = h.n_spins();

    let eig = eigh(h);
    let weights = eig.vectors.adjoint() * psi0.amplitudes();
    let e0 = psi0
        .amplitudes()
        .dotc(&(h.matrix() * psi0.amplitudes()))
        .re;

    let mut diagnostics = EvolveDiagnostics::default();
    let mut rows = Vec::with_capacity(times.len());
    let mut phased = weights.clone();
    for &t in times {
        for j in 0..phased.len() {
            let phase = Complex64::from_polar(1.0, -eig.values[j] * t);
            phased[j] = weights[j] * phase;
        }
        let psi_t = &eig.vectors * &phased;

        let norm_dev = (psi_t.norm() - 1.0).abs();
        diagnostics.max_norm_deviation = diagnostics.max_norm_deviation.max(norm_dev);
        if norm_dev > NORM_TOL {
            return Err(Error::NormDrift {
                drift: norm_dev,
                tol: NORM_TOL,
            });
        }
        let energy = psi_t.dotc(&(h.matrix() * &psi_t)).re;
        let energy_drift = (energy - e0).abs();
        diagnostics.max_energy_drift = diagnostics.max_energy_drift.max(energy_drift);
        if energy_drift > ENERGY_TOL {
            return Err(Error::EnergyDrift {
                drift: energy_drift,
                tol: ENERGY_TOL,
            });
        }

        let (per_site, _) = polarizations_raw(&psi_t, n);
        rows.push(per_site);
    }

    let mut traj = Trajectory::from_parts(times.to_vec(), rows)?;
    traj.diagnostics = diagnostics;
    Ok(traj)
}

/// Second-order midpoint propagation of a time-dependent Hamiltonian
/// source over [0, t_max]: each step applies exp(-i H(t + dt/2) dt)
/// exactly (Hermitian eigendecomposition of the midpoint matrix), so each
/// step is unitary. Samples are taken at the step boundary nearest each
/// requested time.
pub fn evolve_time_dependent<F>(
    h_of_t: F,
    psi0: &StateVector,
    t_max: f64,
    dt: f64,
    sample_times: &[f64],
) -> Result<Trajectory>
where
    F: Fn(f64) -> Result<Operator>,
{
    if !(dt > 0.0) {
        return Err(Error::Invalid(format!("dt must be positive, got {dt}")));
    }
    if !(t_max > 0.0) {
        return Err(Error::Invalid(format!("t_max must be positive, got {t_max}")));
    }
    check_times(sample_times)?;
    if sample_times[0] < 0.0 || *sample_times.last().unwrap() > t_max * (1.0 + 1e-12) {
        return Err(Error::Invalid(
            "sample times must lie within [0, t_max]".into(),
        ));
    }

    let n_steps = (t_max / dt).ceil().max(1.0) as usize;
    let dt_eff = t_max / n_steps as f64;
    let n = psi0.n_spins();

    // map each requested sample to its nearest step boundary
    let targets: Vec<usize> = sample_times
        .iter()
        .map(|&s| ((s / dt_eff).round() as usize).min(n_steps))
        .collect();

    let mut diagnostics = EvolveDiagnostics::default();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(sample_times.len());
    let mut next_sample = 0usize;
    let mut psi: DVector<Complex64> = psi0.amplitudes().clone();

    let mut record = |boundary: usize,
                      psi: &DVector<Complex64>,
                      next_sample: &mut usize,
                      diagnostics: &mut EvolveDiagnostics|
     -> Result<()> {
        while *next_sample < targets.len() && targets[*next_sample] == boundary {
            let norm_dev = (psi.norm() - 1.0).abs();
            diagnostics.max_norm_deviation = diagnostics.max_norm_deviation.max(norm_dev);
            if norm_dev > NORM_TOL {
                return Err(Error::NormDrift {
                    drift: norm_dev,
                    tol: NORM_TOL,
                });
            }
            let (per_site, _) = polarizations_raw(psi, n);
            rows.push(per_site);
            *next_sample += 1;
        }
        Ok(())
    };

    record(0, &psi, &mut next_sample, &mut diagnostics)?;
    for step in 0..n_steps {
        if next_sample >= targets.len() {
            break;
        }
        let t_mid = (step as f64 + 0.5) * dt_eff;
        let h = h_of_t(t_mid)?;
        if h.dim() != psi.len() {
            return Err(Error::DimensionMismatch {
                op: h.dim(),
                state: psi.len(),
            });
        }
        check_hermitian(&h)?;
        let eig = eigh(&h);
        let mut w = eig.vectors.adjoint() * &psi;
        for j in 0..w.len() {
            w[j] *= Complex64::from_polar(1.0, -eig.values[j] * dt_eff);
        }
        psi = &eig.vectors * &w;
        record(step + 1, &psi, &mut next_sample, &mut diagnostics)?;
    }

    let mut traj = Trajectory::from_parts(sample_times.to_vec(), rows)?;
    traj.diagnostics = diagnostics;
    Ok(traj)
}

/// Wavefront arrival times (first zero crossing of each P_k, linearly
/// interpolated), minimum total polarization and amplification.
pub fn trajectory_metrics(traj: &Trajectory) -> WaveMetrics {
    let times = traj.times();
    let mut arrival_times = Vec::with_capacity(traj.n_sites());
    for site in 1..=traj.n_sites() {
        let series = traj.site_series(site);
        let mut arrival = None;
        for (i, &p) in series.iter().enumerate() {
            if p < 0.0 {
                arrival = Some(if i == 0 {
                    times[0]
                } else {
                    let (p0, p1) = (series[i - 1], p);
                    times[i - 1] + (times[i] - times[i - 1]) * p0 / (p0 - p1)
                });
                break;
            }
        }
        arrival_times.push(arrival);
    }
    let total0 = traj.total()[0];
    let min_total = traj.total().iter().copied().fold(f64::INFINITY, f64::min);
    WaveMetrics {
        arrival_times,
        min_total,
        amplification: total0 - min_total,
    }
}
