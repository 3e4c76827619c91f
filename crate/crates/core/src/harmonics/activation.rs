/// Positively homogeneous activation `sigma(x) = a (x)_+^alpha + b (-x)_+^alpha`.
///
/// `(x)_+^0` is the step function `1[x > 0]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActivationSpec {
    pub alpha: u32,
    pub a: f64,
    pub b: f64,
}

impl ActivationSpec {
    pub fn new(alpha: u32, a: f64, b: f64) -> Self {
        ActivationSpec { alpha, a, b }
    }

    pub fn relu() -> Self {
        Self::relu_power(1)
    }

    /// `(x)_+^alpha`.
    pub fn relu_power(alpha: u32) -> Self {
        ActivationSpec { alpha, a: 1.0, b: 0.0 }
    }

    pub fn is_relu_family(&self) -> bool {
        self.a == 1.0 && self.b == 0.0
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        if x > 0.0 {
            self.a * powi_nonneg(x, self.alpha)
        } else if x < 0.0 {
            self.b * powi_nonneg(-x, self.alpha)
        } else {
            0.0
        }
    }

    /// Right derivative, used as the subgradient at the kink.
    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        match self.alpha {
            0 => 0.0,
            1 => {
                if x >= 0.0 {
                    self.a
                } else {
                    -self.b
                }
            }
            m => {
                let mf = m as f64;
                if x >= 0.0 {
                    self.a * mf * powi_nonneg(x, m - 1)
                } else {
                    -self.b * mf * powi_nonneg(-x, m - 1)
                }
            }
        }
    }

    /// `a + (-1)^k b`: the Funk–Hecke coefficient of `sigma` for degree `k`
    /// is this factor times the one of `(x)_+^alpha`.
    pub fn parity_factor(&self, k: u32) -> f64 {
        if k.is_multiple_of(2) {
            self.a + self.b
        } else {
            self.a - self.b
        }
    }

    /// `|a + (-1)^{k+1} b|`, the prefactor of the Stein discrepancy bounds.
    pub fn stein_factor(&self, k: u32) -> f64 {
        self.parity_factor(k + 1).abs()
    }

    /// `sup |sigma|` on `[-1, 1]`.
    pub fn sup_on_unit_interval(&self) -> f64 {
        self.a.abs().max(self.b.abs())
    }
}

/// Integer power by repeated multiplication. `f64::powi` may round
/// differently depending on whether the exponent is known at compile time,
/// which would make results depend on inlining decisions.
#[inline]
pub(crate) fn powi_nonneg(x: f64, m: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..m {
        acc *= x;
    }
    acc
}

impl Default for ActivationSpec {
    fn default() -> Self {
        Self::relu()
    }
}
