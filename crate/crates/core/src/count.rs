//! Scalar operation tallies.
//!
//! Kernels are generic over [`Tally`]; passing [`NoCount`] compiles every
//! increment away, so the uncounted hot path is the same code minus the adds.
//! Additions and subtractions are never tallied.

use std::ops::AddAssign;

/// Multiplications-plus-divisions and square roots performed by one run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct OpCounter {
    pub muldiv: u64,
    pub sqrt: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }
}

impl AddAssign for OpCounter {
    fn add_assign(&mut self, rhs: Self) {
        self.muldiv += rhs.muldiv;
        self.sqrt += rhs.sqrt;
    }
}

/// Sink for counted scalar operations.
pub trait Tally {
    /// Record `k` multiplications or divisions.
    fn muldiv(&mut self, k: usize);
    /// Record one square root.
    fn sqrt(&mut self);
}

impl Tally for OpCounter {
    #[inline(always)]
    fn muldiv(&mut self, k: usize) {
        self.muldiv += k as u64;
    }

    #[inline(always)]
    fn sqrt(&mut self) {
        self.sqrt += 1;
    }
}

/// Discards everything.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoCount;

impl Tally for NoCount {
    #[inline(always)]
    fn muldiv(&mut self, _k: usize) {}

    #[inline(always)]
    fn sqrt(&mut self) {}
}
