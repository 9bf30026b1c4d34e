use super::InflationError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// `k ∈ 16ℕ`, `k ≥ 16`, shells `l ∈ 4ℕ`.
    Theorem,
    /// Any `k ≥ 4`, shells all integers in `[k/4, k/2]`.
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstructionParams {
    pub n: usize,
    pub k: i32,
    pub eps: f64,
    pub q: f64,
    /// `t = η·2^{-2k}`.
    pub eta: f64,
    pub delta: f64,
    pub mode: Mode,
}

impl ConstructionParams {
    /// Theorem-mode parameters with `η = ε²`.
    pub fn theorem(n: usize, k: i32, eps: f64, q: f64) -> Self {
        Self {
            n,
            k,
            eps,
            q,
            eta: eps * eps,
            delta: 1e-2,
            mode: Mode::Theorem,
        }
    }

    pub fn oracle(n: usize, k: i32, eps: f64, q: f64) -> Self {
        Self {
            mode: Mode::Oracle,
            ..Self::theorem(n, k, eps, q)
        }
    }

    pub fn t(&self) -> f64 {
        self.eta * 2f64.powi(-2 * self.k)
    }

    pub fn validate(&self) -> Result<(), InflationError> {
        let bad = |m: String| Err(InflationError::InvalidParams(m));
        if !(self.n == 2 || self.n == 3) {
            return bad(format!("dimension {} not supported (2 or 3)", self.n));
        }
        match self.mode {
            Mode::Theorem => {
                if self.k < 16 || self.k % 16 != 0 {
                    return bad(format!(
                        "theorem mode needs k in 16N, k >= 16 (got {})",
                        self.k
                    ));
                }
            }
            Mode::Oracle => {
                if self.k < 4 {
                    return bad(format!("oracle mode needs k >= 4 (got {})", self.k));
                }
            }
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad(format!("eps = {} outside (0, 1)", self.eps));
        }
        if self.n >= 3 && 5.0 * self.eps * self.eps >= 1.0 {
            return bad(format!("5 eps^2 must be below 1 (eps = {})", self.eps));
        }
        if !(self.q >= 1.0) {
            return bad(format!("q = {} must be at least 1", self.q));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return bad(format!("eta = {} must be positive", self.eta));
        }
        if !self.delta.is_finite() {
            return bad("delta must be finite".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theorem_mode_rejects_off_lattice_k() {
        assert!(ConstructionParams::theorem(3, 32, 0.02, 1.0)
            .validate()
            .is_ok());
        assert!(ConstructionParams::theorem(3, 24, 0.02, 1.0)
            .validate()
            .is_err());
        assert!(ConstructionParams::theorem(3, 0, 0.02, 1.0)
            .validate()
            .is_err());
        assert!(ConstructionParams::oracle(2, 6, 0.1, 1.0)
            .validate()
            .is_ok());
        assert!(ConstructionParams::theorem(3, 32, 0.5, 1.0)
            .validate()
            .is_err());
        assert!(ConstructionParams::theorem(2, 32, 0.5, 1.0)
            .validate()
            .is_ok());
    }

    #[test]
    fn default_time_scale() {
        let p = ConstructionParams::theorem(3, 16, 0.02, 2.0);
        assert_eq!(p.t(), 0.0004 * 2f64.powi(-32));
    }
}
