//! Rational time-frequency lattices `(a, b)` with `ab = p/q`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::samples_in;

/// How `ab` compares to the critical density 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Density {
    /// `ab < 1`: frames are possible.
    Redundant,
    /// `ab = 1`: Balian-Low regime.
    Critical,
    /// `ab > 1`: no frame exists.
    Sparse,
}

/// Lattice with time shift `a = p·u` and frequency shift `b = 1/(q·u)`.
///
/// Built from the integers and the base unit `u`, so `ab = p/q` holds exactly
/// and the adjoint lattice `(1/b, 1/a) = (q·u, 1/(p·u))` needs no rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaborLattice {
    p: u32,
    q: u32,
    unit: f64,
}

/// Lattice steps measured on a concrete sample grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeSteps {
    /// `a` in samples.
    pub a: i64,
    /// `1/b` in samples.
    pub inv_b: i64,
}

pub(crate) fn gcd(mut x: u64, mut y: u64) -> u64 {
    while y != 0 {
        let r = x % y;
        x = y;
        y = r;
    }
    x
}

impl GaborLattice {
    pub fn new(p: u32, q: u32, unit: f64) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::Lattice(format!("p and q must be positive, got p={p}, q={q}")));
        }
        if gcd(p as u64, q as u64) != 1 {
            return Err(Error::Lattice(format!("p={p} and q={q} are not coprime")));
        }
        if !(unit > 0.0 && unit.is_finite()) {
            return Err(Error::Lattice(format!("base unit must be positive, got {unit}")));
        }
        Ok(Self { p, q, unit })
    }

    /// Lattice whose base unit is `unit_samples` samples of spacing `dt`.
    pub fn on_grid(p: u32, q: u32, unit_samples: u32, dt: f64) -> Result<Self> {
        if unit_samples == 0 {
            return Err(Error::Lattice("unit must span at least one sample".into()));
        }
        Self::new(p, q, unit_samples as f64 * dt)
    }

    /// Unit chosen so that `a ≈ b`.
    pub fn balanced(p: u32, q: u32, dt: f64) -> Result<Self> {
        let ideal = 1.0 / ((p as f64 * q as f64).sqrt() * dt);
        let unit_samples = ideal.round().max(1.0) as u32;
        Self::on_grid(p, q, unit_samples, dt)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn unit(&self) -> f64 {
        self.unit
    }

    pub fn a(&self) -> f64 {
        self.p as f64 * self.unit
    }

    pub fn b(&self) -> f64 {
        1.0 / (self.q as f64 * self.unit)
    }

    /// `1/b`, the adjoint time shift.
    pub fn inv_b(&self) -> f64 {
        self.q as f64 * self.unit
    }

    /// `1/a`, the adjoint frequency shift.
    pub fn inv_a(&self) -> f64 {
        1.0 / (self.p as f64 * self.unit)
    }

    pub fn ab(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// `TF = 1/(ab)` of the OFDM system built on the adjoint lattice.
    pub fn tf(&self) -> f64 {
        self.q as f64 / self.p as f64
    }

    pub fn density(&self) -> Density {
        match self.p.cmp(&self.q) {
            std::cmp::Ordering::Less => Density::Redundant,
            std::cmp::Ordering::Equal => Density::Critical,
            std::cmp::Ordering::Greater => Density::Sparse,
        }
    }

    /// `a` and `1/b` as sample counts on spacing `dt`.
    pub fn steps(&self, dt: f64) -> Result<LatticeSteps> {
        Ok(LatticeSteps { a: samples_in(self.a(), dt, "time shift a")?, inv_b: samples_in(self.inv_b(), dt, "adjoint shift 1/b")? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn benchmark_lattice() {
        let lat = GaborLattice::new(1, 2, 1.0).unwrap();
        assert_eq!(lat.a(), 1.0);
        assert_eq!(lat.b(), 0.5);
        assert_eq!(lat.ab(), 0.5);
        assert_eq!(lat.density(), Density::Redundant);
        assert_eq!(lat.steps(1.0 / 32.0).unwrap(), LatticeSteps { a: 32, inv_b: 64 });
    }

    #[test]
    fn rejects_non_coprime() {
        assert!(matches!(GaborLattice::new(2, 4, 1.0), Err(Error::Lattice(_))));
        assert!(matches!(GaborLattice::new(0, 4, 1.0), Err(Error::Lattice(_))));
    }

    #[test]
    fn density_classes() {
        assert_eq!(GaborLattice::new(1, 1, 1.0).unwrap().density(), Density::Critical);
        assert_eq!(GaborLattice::new(3, 2, 1.0).unwrap().density(), Density::Sparse);
    }

    #[test]
    fn balanced_tf13_is_commensurate() {
        let dt = 1.0 / 96.0;
        let lat = GaborLattice::balanced(10, 13, dt).unwrap();
        let st = lat.steps(dt).unwrap();
        assert_eq!(st, LatticeSteps { a: 80, inv_b: 104 });
        assert!((lat.tf() - 1.3).abs() < 1e-15);
    }

    #[test]
    fn incommensurate_steps() {
        let lat = GaborLattice::new(1, 2, 0.3).unwrap();
        assert!(matches!(lat.steps(0.25), Err(Error::Commensurability { .. })));
    }
}
