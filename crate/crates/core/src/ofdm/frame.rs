use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constellation {
    Qpsk,
    Qam16,
    Arbitrary,
}

/// Gray-coded QPSK: `00 → (1+i)/√2`, `01 → (-1+i)/√2`, `11 → (-1-i)/√2`, `10 → (1-i)/√2`.
pub fn qpsk_map(b0: bool, b1: bool) -> Complex64 {
    let re = if b1 { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
    let im = if b0 { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
    Complex64::new(re, im)
}

/// Hard decision inverse of [`qpsk_map`].
pub fn qpsk_demap(z: Complex64) -> (bool, bool) {
    (z.im < 0.0, z.re < 0.0)
}

/// Data symbols `c_{kl}`, `k < symbols`, `l < carriers`, stored with `k` outer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolFrame {
    pub symbols: usize,
    pub carriers: usize,
    pub data: Vec<Complex64>,
    pub constellation: Constellation,
}

impl SymbolFrame {
    pub fn new(symbols: usize, carriers: usize, data: Vec<Complex64>, constellation: Constellation) -> Result<Self> {
        if data.len() != symbols * carriers {
            return Err(Error::InvalidParameter(format!(
                "frame holds {} symbols, expected {symbols}×{carriers}",
                data.len()
            )));
        }
        let f = Self { symbols, carriers, data, constellation };
        if constellation == Constellation::Qpsk {
            let bad = f.data.iter().any(|z| (z.re.abs() - FRAC_1_SQRT_2).abs() > 1e-12 || (z.im.abs() - FRAC_1_SQRT_2).abs() > 1e-12);
            if bad {
                return Err(Error::InvalidParameter("QPSK frame has an entry outside {±1±i}/√2".into()));
            }
        }
        Ok(f)
    }

    pub fn zeros(symbols: usize, carriers: usize) -> Self {
        Self { symbols, carriers, data: vec![Complex64::new(0.0, 0.0); symbols * carriers], constellation: Constellation::Arbitrary }
    }

    pub fn get(&self, k: usize, l: usize) -> Complex64 {
        self.data[k * self.carriers + l]
    }

    pub fn set(&mut self, k: usize, l: usize, v: Complex64) {
        self.data[k * self.carriers + l] = v;
    }

    /// QPSK frame from `2·symbols·carriers` bits, two per symbol.
    pub fn from_bits(symbols: usize, carriers: usize, bits: &[bool]) -> Result<Self> {
        if bits.len() != 2 * symbols * carriers {
            return Err(Error::InvalidParameter(format!("need {} bits, got {}", 2 * symbols * carriers, bits.len())));
        }
        let data = bits.chunks(2).map(|b| qpsk_map(b[0], b[1])).collect();
        Ok(Self { symbols, carriers, data, constellation: Constellation::Qpsk })
    }

    /// Uniformly random QPSK frame and its bits.
    pub fn random_qpsk<R: Rng + ?Sized>(symbols: usize, carriers: usize, rng: &mut R) -> (Self, Vec<bool>) {
        let bits: Vec<bool> = (0..2 * symbols * carriers).map(|_| rng.random::<bool>()).collect();
        let frame = Self::from_bits(symbols, carriers, &bits).expect("bit count matches");
        (frame, bits)
    }

    /// Hard-decision bits of every symbol.
    pub fn to_bits(&self) -> Vec<bool> {
        self.data.iter().flat_map(|&z| {
            let (b0, b1) = qpsk_demap(z);
            [b0, b1]
        }).collect()
    }

    /// `max |c̃ - c|` against another frame of the same shape.
    pub fn max_error(&self, other: &SymbolFrame) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn sum_sq_error(&self, other: &SymbolFrame) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm_sqr()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_map_and_inverse() {
        assert_eq!(qpsk_map(false, false), Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2));
        assert_eq!(qpsk_map(false, true), Complex64::new(-FRAC_1_SQRT_2, FRAC_1_SQRT_2));
        assert_eq!(qpsk_map(true, true), Complex64::new(-FRAC_1_SQRT_2, -FRAC_1_SQRT_2));
        assert_eq!(qpsk_map(true, false), Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2));
        for b0 in [false, true] {
            for b1 in [false, true] {
                assert_eq!(qpsk_demap(qpsk_map(b0, b1)), (b0, b1));
            }
        }
        // neighbours differ in one bit
        let order = [(false, false), (false, true), (true, true), (true, false)];
        for w in 0..4 {
            let (a, b) = (order[w], order[(w + 1) % 4]);
            assert_eq!((a.0 != b.0) as u8 + (a.1 != b.1) as u8, 1);
        }
    }

    #[test]
    fn frame_roundtrip_and_validation() {
        let mut rng = crate::rng::stream(1, crate::rng::Purpose::OfdmFrame, 0);
        let (f, bits) = SymbolFrame::random_qpsk(3, 4, &mut rng);
        assert_eq!(f.to_bits(), bits);
        assert!(SymbolFrame::new(3, 4, f.data.clone(), Constellation::Qpsk).is_ok());
        assert!(SymbolFrame::new(3, 4, vec![Complex64::new(1.0, 0.0); 12], Constellation::Qpsk).is_err());
        assert!(SymbolFrame::new(2, 4, f.data.clone(), Constellation::Qpsk).is_err());
    }
}
