use crate::error::{Error, Result};

/// Significand precision used by extended-precision arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionContext {
    bits: u32,
}

impl PrecisionContext {
    pub const ORACLE_DEFAULT_BITS: u32 = 256;

    pub fn new(bits: u32) -> Result<Self> {
        if bits < 53 {
            return Err(Error::InvalidArgument(format!(
                "precision must be at least 53 bits, got {bits}"
            )));
        }
        Ok(PrecisionContext { bits })
    }

    pub fn oracle() -> Self {
        PrecisionContext {
            bits: Self::ORACLE_DEFAULT_BITS,
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Decimal digits carried, rounded down.
    pub fn digits(&self) -> u32 {
        (self.bits as f64 * std::f64::consts::LOG10_2).floor() as u32
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext { bits: 53 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_precision() {
        assert!(PrecisionContext::new(52).is_err());
        assert_eq!(PrecisionContext::new(53).unwrap().bits(), 53);
        assert_eq!(PrecisionContext::default().bits(), 53);
        assert_eq!(PrecisionContext::oracle().bits(), 256);
        assert_eq!(PrecisionContext::oracle().digits(), 77);
    }
}
