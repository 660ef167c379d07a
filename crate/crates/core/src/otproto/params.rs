use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid protocol parameters: {0}")]
pub struct ParamError(pub String);

/// Sizes for the OT protocols: `m` qubits sent, `n` kept after the test on
/// `m - n` positions, `ell`-bit output strings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub n: usize,
    pub m: usize,
    pub ell: usize,
}

impl ProtocolParams {
    /// Explicit sizes. Requires `m > n >= 1` and `ell >= 1`.
    pub fn new(n: usize, m: usize, ell: usize) -> Result<Self, ParamError> {
        if n == 0 {
            return Err(ParamError("n must be at least 1".into()));
        }
        if m <= n {
            return Err(ParamError(format!("m = {m} must exceed n = {n}")));
        }
        if ell == 0 {
            return Err(ParamError("ell must be at least 1".into()));
        }
        Ok(ProtocolParams { n, m, ell })
    }

    /// `m = ceil(n / (1 - alpha))`, `ell = floor(lambda * n)`, with
    /// `0 < alpha < 1` and `0 < lambda < 1/4`.
    pub fn from_regime(n: usize, alpha: f64, lambda: f64) -> Result<Self, ParamError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(ParamError(format!("alpha = {alpha} outside (0, 1)")));
        }
        if !(lambda > 0.0 && lambda < 0.25) {
            return Err(ParamError(format!("lambda = {lambda} outside (0, 1/4)")));
        }
        let m = (n as f64 / (1.0 - alpha) - 1e-9).ceil() as usize;
        let ell = (lambda * n as f64 + 1e-9).floor() as usize;
        ProtocolParams::new(n, m, ell)
    }

    /// Number of tested positions, `m - n`.
    pub fn tested(&self) -> usize {
        self.m - self.n
    }

    /// Fraction of positions tested, `1 - n/m`.
    pub fn alpha(&self) -> f64 {
        1.0 - self.n as f64 / self.m as f64
    }

    pub fn lambda(&self) -> f64 {
        self.ell as f64 / self.n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_formulas() {
        let p = ProtocolParams::from_regime(8, 0.5, 0.125).unwrap();
        assert_eq!((p.n, p.m, p.ell), (8, 16, 1));
        let p = ProtocolParams::from_regime(12, 0.25, 0.2).unwrap();
        assert_eq!((p.n, p.m, p.ell), (12, 16, 2));
        assert!(ProtocolParams::from_regime(2, 0.5, 0.2).is_err()); // ell = 0
        assert!(ProtocolParams::from_regime(8, 0.5, 0.25).is_err());
        assert!(ProtocolParams::from_regime(8, 1.0, 0.1).is_err());
    }

    #[test]
    fn explicit_sizes() {
        assert!(ProtocolParams::new(2, 3, 1).is_ok());
        assert!(ProtocolParams::new(3, 3, 1).is_err());
        assert!(ProtocolParams::new(0, 3, 1).is_err());
        assert!(ProtocolParams::new(2, 3, 0).is_err());
        assert_eq!(ProtocolParams::new(8, 12, 2).unwrap().tested(), 4);
    }
}
