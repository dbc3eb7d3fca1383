//! System and model specifications: geometry, species, Hamiltonian
//! parameters, and the dipolar coupling tables they induce.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::MAX_SPINS;

/// Lattice geometry of the spin system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Chain,
    Ring,
}

impl Geometry {
    pub fn label(self) -> &'static str {
        match self {
            Geometry::Chain => "chain",
            Geometry::Ring => "ring",
        }
    }
}

/// Hamiltonian model selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Driven Ising chain in the lab frame (time-dependent).
    LabFrame,
    /// Rotating-frame transverse field + truncated ZZ couplings up to the
    /// M-th neighbor.
    RotatingZz,
    /// Three-spin effective Hamiltonian of the nearest-neighbor chain.
    EffectiveNn,
    /// Effective chain Hamiltonian with end corrections, M in {1, 2}.
    EffectiveChain,
    /// Effective ring Hamiltonian with cyclic conditions.
    EffectiveRing,
    /// Secular dipole-dipole interaction (ZZ + flip-flop), all pairs.
    SecularDipolar,
    /// Alternating two-species chain/ring under two-frequency irradiation:
    /// unlike pairs truncated to ZZ, like pairs keep the full secular form.
    AlternatingHetero,
}

impl Model {
    pub fn tag(self) -> &'static str {
        match self {
            Model::LabFrame => "lab_frame",
            Model::RotatingZz => "rotating_zz",
            Model::EffectiveNn => "effective_nn",
            Model::EffectiveChain => "effective_chain",
            Model::EffectiveRing => "effective_ring",
            Model::SecularDipolar => "secular_dipolar",
            Model::AlternatingHetero => "alternating_hetero",
        }
    }

    pub fn is_time_dependent(self) -> bool {
        matches!(self, Model::LabFrame)
    }
}

/// Correction handling for the effective chain/ring Hamiltonians.
///
/// `AsPrinted` keeps the uncorrected coefficient conventions, under which
/// some projector factors do not vanish on aligned neighbor pairs (the
/// all-up state then spuriously evolves). `Normalized` (default) repairs
/// them so every projector factor annihilates aligned neighbors and the
/// ring form matches the interior of the chain form.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    #[default]
    Normalized,
    AsPrinted,
}

impl Variant {
    pub fn tag(self) -> &'static str {
        match self {
            Variant::Normalized => "normalized",
            Variant::AsPrinted => "as_printed",
        }
    }
}

/// Geometry, species pattern and gyromagnetic ratios of a spin system.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec {
    n: usize,
    geometry: Geometry,
    species: Vec<char>,
    gammas: BTreeMap<char, f64>,
}

impl SystemSpec {
    pub fn new(
        n: usize,
        geometry: Geometry,
        species: Vec<char>,
        gammas: BTreeMap<char, f64>,
    ) -> Result<Self> {
        if n < 2 || n > MAX_SPINS {
            return Err(Error::SpinCount(n));
        }
        if species.len() != n {
            return Err(Error::Invalid(format!(
                "species pattern has length {} but n_spins = {n}",
                species.len()
            )));
        }
        for &label in &species {
            if !gammas.contains_key(&label) {
                return Err(Error::MissingGamma(label));
            }
        }
        Ok(SystemSpec {
            n,
            geometry,
            species,
            gammas,
        })
    }

    /// Single-species system with unit gyromagnetic ratio.
    pub fn homonuclear(n: usize, geometry: Geometry) -> Result<Self> {
        let mut gammas = BTreeMap::new();
        gammas.insert('A', 1.0);
        SystemSpec::new(n, geometry, vec!['A'; n], gammas)
    }

    /// Tile `pattern` (e.g. "HF") to length `n`.
    pub fn with_pattern(
        n: usize,
        geometry: Geometry,
        pattern: &str,
        gammas: BTreeMap<char, f64>,
    ) -> Result<Self> {
        let labels: Vec<char> = pattern.chars().collect();
        if labels.is_empty() {
            return Err(Error::Invalid("species pattern must not be empty".into()));
        }
        let species = (0..n).map(|i| labels[i % labels.len()]).collect();
        SystemSpec::new(n, geometry, species, gammas)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn species(&self) -> &[char] {
        &self.species
    }

    pub fn gammas(&self) -> &BTreeMap<char, f64> {
        &self.gammas
    }

    pub fn gamma(&self, label: char) -> Result<f64> {
        self.gammas
            .get(&label)
            .copied()
            .ok_or(Error::MissingGamma(label))
    }

    /// Gyromagnetic ratio of the spin at 1-based `site`.
    pub fn gamma_at(&self, site: usize) -> Result<f64> {
        self.gamma(self.species[site - 1])
    }

    pub fn is_single_species(&self) -> bool {
        self.species.windows(2).all(|w| w[0] == w[1])
    }

    /// Pair separation: linear distance for chains, circular distance for
    /// rings (1-based sites).
    pub fn separation(&self, a: usize, b: usize) -> usize {
        let d = a.abs_diff(b);
        match self.geometry {
            Geometry::Chain => d,
            Geometry::Ring => d.min(self.n - d),
        }
    }

    /// Largest meaningful neighbor order M for this geometry.
    pub fn max_m_neighbors(&self) -> usize {
        match self.geometry {
            Geometry::Chain => self.n - 1,
            Geometry::Ring => self.n / 2,
        }
    }

    /// True if two adjacent sites carry the same species label (for a
    /// ring, adjacency wraps around). An odd-length alternating ring
    /// necessarily has one such defect pair.
    pub fn has_adjacent_like_pair(&self) -> bool {
        let chain_pair = self.species.windows(2).any(|w| w[0] == w[1]);
        match self.geometry {
            Geometry::Chain => chain_pair,
            Geometry::Ring => chain_pair || self.species[self.n - 1] == self.species[0],
        }
    }
}

/// Hamiltonian-model parameters. Energies are in units of `d1`; only the
/// fields relevant to the selected model are consulted.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub model: Model,
    /// Transverse-field amplitude, in units of d1.
    pub omega1: f64,
    /// Nearest-neighbor coupling; the energy unit (default 1).
    pub d1: f64,
    /// Neighbor truncation order M.
    pub m_neighbors: usize,
    /// Zeeman frequency (lab_frame only).
    pub omega0: Option<f64>,
    /// Nearest-neighbor Ising constant J (lab_frame only).
    pub j_coupling: Option<f64>,
    pub variant: Variant,
}

/// Operating point for the stimulated wave used throughout the catalog.
pub const DEFAULT_OMEGA1: f64 = 0.15;

impl ModelSpec {
    pub fn new(model: Model) -> Self {
        ModelSpec {
            model,
            omega1: DEFAULT_OMEGA1,
            d1: 1.0,
            m_neighbors: 1,
            omega0: None,
            j_coupling: None,
            variant: Variant::default(),
        }
    }

    pub fn with_omega1(mut self, omega1: f64) -> Self {
        self.omega1 = omega1;
        self
    }

    pub fn with_d1(mut self, d1: f64) -> Self {
        self.d1 = d1;
        self
    }

    pub fn with_m_neighbors(mut self, m: usize) -> Self {
        self.m_neighbors = m;
        self
    }

    pub fn with_omega0(mut self, omega0: f64) -> Self {
        self.omega0 = Some(omega0);
        self
    }

    pub fn with_j_coupling(mut self, j: f64) -> Self {
        self.j_coupling = Some(j);
        self
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    /// Check the parameter set against a system specification.
    pub fn validate(&self, sys: &SystemSpec) -> Result<()> {
        if self.omega1 < 0.0 {
            return Err(Error::Invalid(format!(
                "omega1 must be >= 0, got {}",
                self.omega1
            )));
        }
        let require_chain = |model: &'static str| -> Result<()> {
            if sys.geometry() != Geometry::Chain {
                return Err(Error::GeometryMismatch {
                    model,
                    geometry: "chain",
                });
            }
            Ok(())
        };
        let check_m = || -> Result<()> {
            let max = sys.max_m_neighbors();
            if self.m_neighbors == 0 || self.m_neighbors > max {
                return Err(Error::NeighborsOutOfRange {
                    m: self.m_neighbors,
                    max,
                    geometry: sys.geometry().label(),
                    n: sys.n(),
                });
            }
            Ok(())
        };
        match self.model {
            Model::LabFrame => {
                require_chain("lab_frame")?;
                match self.omega0 {
                    None => {
                        return Err(Error::Invalid(
                            "omega0 is required for model=lab_frame".into(),
                        ))
                    }
                    Some(w0) if w0 <= 0.0 => {
                        return Err(Error::Invalid(format!(
                            "omega0 must be > 0 for model=lab_frame, got {w0}"
                        )))
                    }
                    Some(_) => {}
                }
                if self.j_coupling.is_none() {
                    return Err(Error::Invalid(
                        "j_coupling is required for model=lab_frame".into(),
                    ));
                }
            }
            Model::RotatingZz => check_m()?,
            Model::EffectiveNn => require_chain("effective_nn")?,
            Model::EffectiveChain => {
                require_chain("effective_chain")?;
                if !(self.m_neighbors == 1 || self.m_neighbors == 2) {
                    return Err(Error::Invalid(format!(
                        "m_neighbors must be 1 or 2 for model=effective_chain, got {}",
                        self.m_neighbors
                    )));
                }
                if sys.n() < 2 * self.m_neighbors {
                    return Err(Error::Invalid(format!(
                        "effective_chain with m_neighbors={} needs at least {} spins, got {}",
                        self.m_neighbors,
                        2 * self.m_neighbors,
                        sys.n()
                    )));
                }
            }
            Model::EffectiveRing => {
                if sys.geometry() != Geometry::Ring {
                    return Err(Error::GeometryMismatch {
                        model: "effective_ring",
                        geometry: "ring",
                    });
                }
                check_m()?;
            }
            Model::SecularDipolar => {
                if !sys.is_single_species() {
                    return Err(Error::Invalid(
                        "secular_dipolar requires a single spin species".into(),
                    ));
                }
            }
            Model::AlternatingHetero => {
                if sys.is_single_species() {
                    return Err(Error::Invalid(
                        "alternating_hetero requires at least two spin species".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Symmetric table of pair couplings D_mn keyed by (low site, high site).
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingTable {
    d: BTreeMap<(usize, usize), f64>,
}

impl CouplingTable {
    pub fn get(&self, m: usize, n: usize) -> Option<f64> {
        let key = (m.min(n), m.max(n));
        self.d.get(&key).copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.d.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }
}

/// Truncated dipolar coupling table: all pairs with (circular) separation
/// q <= M. Chain: d1/q^3; ring: d1 [sin(pi/n)/sin(pi q/n)]^3.
pub fn coupling_profile(
    geometry: Geometry,
    n: usize,
    d1: f64,
    m_neighbors: usize,
) -> Result<CouplingTable> {
    if n < 2 || n > MAX_SPINS {
        return Err(Error::SpinCount(n));
    }
    let max = match geometry {
        Geometry::Chain => n - 1,
        Geometry::Ring => n / 2,
    };
    if m_neighbors == 0 || m_neighbors > max {
        return Err(Error::NeighborsOutOfRange {
            m: m_neighbors,
            max,
            geometry: geometry.label(),
            n,
        });
    }
    let mut d = BTreeMap::new();
    for a in 1..n {
        for b in (a + 1)..=n {
            let sep = a.abs_diff(b);
            let q = match geometry {
                Geometry::Chain => sep,
                Geometry::Ring => sep.min(n - sep),
            };
            if q > m_neighbors {
                continue;
            }
            let value = match geometry {
                Geometry::Chain => d1 / (q as f64).powi(3),
                Geometry::Ring => {
                    let ratio = (PI / n as f64).sin() / (PI * q as f64 / n as f64).sin();
                    d1 * ratio.powi(3)
                }
            };
            d.insert((a, b), value);
        }
    }
    Ok(CouplingTable { d })
}

/// Relative position of a spin pair: distance and angle to the field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DipoleGeometry {
    pub r: f64,
    pub theta: f64,
}

/// Dipolar coupling constant gamma_m gamma_n (1 - 3 cos^2 theta) / (2 r^3).
pub fn dipolar_coupling(gamma_m: f64, gamma_n: f64, geom: DipoleGeometry) -> Result<f64> {
    if geom.r <= 0.0 {
        return Err(Error::NonPositiveDistance(geom.r));
    }
    let cos = geom.theta.cos();
    Ok(gamma_m * gamma_n * (1.0 - 3.0 * cos * cos) / (2.0 * geom.r.powi(3)))
}
