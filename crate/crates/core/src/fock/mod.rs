//! Truncated Fock spaces, ladder and su(1,1) generator matrices, and the
//! matrix exponentials used to build unitary operators on them.
//!
//! Basis indices are 0-based. Two-mode spaces pair `(n1, n2)` row-major as
//! `n1 * per_mode_cutoff + n2`. Truncated ladder operators break the
//! canonical relations at the last retained index, so operator identities
//! are only compared on a [`SafeSector`].

mod expm;
mod ladder;
mod matrix;

use std::fmt;

pub use expm::{exp_antihermitian, exp_general, UnitaryResult, UNITARITY_TOL};
pub(crate) use ladder::ladder_of_dim;
pub use ladder::{build_ladder, build_spin_k, tensor_product, Ladder, SpinGenerators};
pub use matrix::{block_op_norm, ComplexMatrix, OP_NORM_DIM_LIMIT};

use crate::error::{Error, Result};

/// Default number of retained states for single-mode and spin-K spaces.
pub const DEFAULT_CUTOFF: usize = 256;
/// Default per-mode cutoff for two-mode spaces.
pub const DEFAULT_PER_MODE_CUTOFF: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    SingleMode,
    SpinK,
    TwoMode,
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpaceKind::SingleMode => "single-mode",
            SpaceKind::SpinK => "spin-K",
            SpaceKind::TwoMode => "two-mode",
        })
    }
}

/// The weight 2K > 0 labelling a discrete-series su(1,1) representation.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SpinWeight(f64);

impl SpinWeight {
    pub fn new(two_k: f64) -> Result<Self> {
        if !(two_k > 0.0) || !two_k.is_finite() {
            return Err(Error::NonPositiveSpin(two_k));
        }
        Ok(Self(two_k))
    }

    /// The value 2K.
    pub fn two_k(self) -> f64 {
        self.0
    }

    /// The value K.
    pub fn k(self) -> f64 {
        self.0 / 2.0
    }

    /// Closed forms for V(z) need 2K >= 1.
    pub fn require_at_least_one(self) -> Result<Self> {
        if self.0 < 1.0 {
            return Err(Error::SpinOutOfRange {
                two_k: self.0,
                requirement: "2K >= 1",
            });
        }
        Ok(self)
    }

    /// Hyperbolic-measure integrals need 2K > 1 (the weight 2K - 1 vanishes at 1).
    pub fn require_above_one(self) -> Result<Self> {
        if self.0 <= 1.0 {
            return Err(Error::SpinOutOfRange {
                two_k: self.0,
                requirement: "2K > 1",
            });
        }
        Ok(self)
    }
}

/// A finite orthonormal basis standing in for an infinite Fock space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedSpace {
    cutoff: usize,
    kind: SpaceKind,
    spin: Option<SpinWeight>,
    per_mode_cutoff: Option<usize>,
}

impl TruncatedSpace {
    pub fn single_mode(cutoff: usize) -> Result<Self> {
        make_space(SpaceKind::SingleMode, cutoff, None, None)
    }

    pub fn spin_k(cutoff: usize, two_k: f64) -> Result<Self> {
        make_space(SpaceKind::SpinK, cutoff, Some(two_k), None)
    }

    pub fn two_mode(per_mode_cutoff: usize) -> Result<Self> {
        make_space(
            SpaceKind::TwoMode,
            per_mode_cutoff * per_mode_cutoff,
            None,
            Some(per_mode_cutoff),
        )
    }

    /// Total dimension N.
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn spin(&self) -> Option<SpinWeight> {
        self.spin
    }

    pub fn per_mode_cutoff(&self) -> Option<usize> {
        self.per_mode_cutoff
    }

    pub(crate) fn expect_kind(&self, expected: SpaceKind) -> Result<()> {
        if self.kind != expected {
            return Err(Error::WrongSpaceKind {
                expected,
                found: self.kind,
            });
        }
        Ok(())
    }

    /// Two-mode basis index of `|n1, n2>`.
    pub fn pair_index(&self, n1: usize, n2: usize) -> usize {
        let m = self
            .per_mode_cutoff
            .expect("pair_index on a two-mode space");
        n1 * m + n2
    }

    /// Two-mode occupation numbers of a basis index.
    pub fn pair_of(&self, index: usize) -> (usize, usize) {
        let m = self.per_mode_cutoff.expect("pair_of on a two-mode space");
        (index / m, index % m)
    }

    /// Basis indices of a two-mode space with `n1 + n2 <= max_quanta`, in index order.
    pub fn total_quanta_sector(&self, max_quanta: usize) -> Vec<usize> {
        let m = self
            .per_mode_cutoff
            .expect("total_quanta_sector on a two-mode space");
        (0..self.cutoff)
            .filter(|&i| i / m + i % m <= max_quanta)
            .collect()
    }
}

/// Validating constructor for [`TruncatedSpace`].
pub fn make_space(
    kind: SpaceKind,
    cutoff: usize,
    spin: Option<f64>,
    per_mode_cutoff: Option<usize>,
) -> Result<TruncatedSpace> {
    if cutoff < 4 {
        return Err(Error::InvalidCutoff(cutoff));
    }
    let spin = match (kind, spin) {
        (SpaceKind::SpinK, None) => return Err(Error::MissingSpin),
        (SpaceKind::SpinK, Some(s)) => Some(SpinWeight::new(s)?),
        (_, Some(_)) => {
            return Err(Error::GridMismatch(format!(
                "a spin weight only applies to spin-K spaces, not {kind}"
            )))
        }
        (_, None) => None,
    };
    let per_mode_cutoff = match (kind, per_mode_cutoff) {
        (SpaceKind::TwoMode, Some(m)) if m * m == cutoff => Some(m),
        (SpaceKind::TwoMode, Some(m)) => {
            return Err(Error::DimensionMismatch {
                expected: m * m,
                found: cutoff,
            })
        }
        (SpaceKind::TwoMode, None) => {
            let m = (cutoff as f64).sqrt().round() as usize;
            if m * m != cutoff {
                return Err(Error::InvalidCutoff(cutoff));
            }
            Some(m)
        }
        (_, _) => None,
    };
    Ok(TruncatedSpace {
        cutoff,
        kind,
        spin,
        per_mode_cutoff,
    })
}

/// Projector onto the leading basis states `0..rank`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SafeSector {
    rank: usize,
}

impl SafeSector {
    /// Sector of the given rank; requires `rank <= cutoff / 2`.
    pub fn new(rank: usize, space: &TruncatedSpace) -> Result<Self> {
        let limit = space.cutoff() / 2;
        if rank == 0 || rank > limit {
            return Err(Error::SectorTooLarge { rank, limit });
        }
        Ok(Self { rank })
    }

    /// The default rank `N / 4`.
    pub fn default_for(space: &TruncatedSpace) -> Self {
        Self {
            rank: (space.cutoff() / 4).max(1),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

/// Leading `rank x rank` block of `m`.
pub fn project_safe(m: &ComplexMatrix, sector: SafeSector) -> Result<ComplexMatrix> {
    if sector.rank() > m.dim() {
        return Err(Error::SectorTooLarge {
            rank: sector.rank(),
            limit: m.dim(),
        });
    }
    Ok(m.leading_block(sector.rank()))
}
