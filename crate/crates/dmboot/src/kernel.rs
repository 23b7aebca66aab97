//! Symmetric order-2 kernels.
//!
//! The built-in kernels target classical functionals: half squared
//! difference (variance), absolute difference (Gini's mean difference) and
//! the componentwise concordance indicator (the pair-probability behind the
//! multivariate extension of Kendall's tau).

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A user-supplied symmetric kernel of two `d`-vectors.
pub type KernelFn = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;

#[derive(Clone)]
pub enum Kernel {
    /// `e(x, y) = (x - y)^2 / 2` on scalars; the U-statistic estimates the
    /// variance.
    Variance,
    /// `f(x, y) = |x - y|` on scalars; estimates Gini's mean difference.
    GiniMeanDifference,
    /// `g(x, y) = 1(x < y) + 1(y < x)` with strict componentwise
    /// comparisons; estimates the concordance probability. Ties in any
    /// component break concordance, so the value is 0 for tied pairs.
    Kendall,
    /// User-supplied symmetric kernel. `required_d` of `None` accepts any
    /// dimension. Symmetry is the caller's responsibility (the test suite
    /// spot-checks it on random pairs for the built-ins).
    Custom {
        name: String,
        required_d: Option<usize>,
        f: Arc<KernelFn>,
    },
}

impl Kernel {
    /// Kernel value for a pair of observations. Dimensions are the caller's
    /// responsibility here; use [`Kernel::try_eval`] for a checked variant.
    #[inline]
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), y.len());
        match self {
            Kernel::Variance => {
                let diff = x[0] - y[0];
                0.5 * diff * diff
            }
            Kernel::GiniMeanDifference => (x[0] - y[0]).abs(),
            Kernel::Kendall => {
                let mut below = true;
                let mut above = true;
                for (a, b) in x.iter().zip(y.iter()) {
                    below &= a < b;
                    above &= b < a;
                }
                u8::from(below) as f64 + u8::from(above) as f64
            }
            Kernel::Custom { f, .. } => f(x, y),
        }
    }

    /// Checked evaluation: validates dimensions first.
    pub fn try_eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::invalid(format!(
                "kernel arguments have mismatched dimensions {} and {}",
                x.len(),
                y.len()
            )));
        }
        self.check_dim(x.len())?;
        Ok(self.eval(x, y))
    }

    /// Verifies the kernel accepts observations of dimension `d`.
    pub fn check_dim(&self, d: usize) -> Result<()> {
        let ok = match self {
            Kernel::Variance | Kernel::GiniMeanDifference => d == 1,
            Kernel::Kendall => d >= 1,
            Kernel::Custom { required_d, .. } => required_d.is_none_or(|r| r == d),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                kernel: self.name().to_owned(),
                requirement: self.dim_requirement(),
                got: d,
            })
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Kernel::Variance => "variance",
            Kernel::GiniMeanDifference => "gini",
            Kernel::Kendall => "kendall",
            Kernel::Custom { name, .. } => name,
        }
    }

    fn dim_requirement(&self) -> String {
        match self {
            Kernel::Variance | Kernel::GiniMeanDifference => "d = 1".to_owned(),
            Kernel::Kendall => "d >= 1".to_owned(),
            Kernel::Custom { required_d, .. } => match required_d {
                Some(r) => format!("d = {r}"),
                None => "any d".to_owned(),
            },
        }
    }
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Kernel::{}", self.name())
    }
}

/// Checked kernel evaluation as a free function.
pub fn kernel_eval(kernel: &Kernel, x: &[f64], y: &[f64]) -> Result<f64> {
    kernel.try_eval(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn variance_kernel_values() {
        assert_eq!(Kernel::Variance.eval(&[1.0], &[3.0]), 2.0);
        assert_eq!(Kernel::Variance.eval(&[2.5], &[2.5]), 0.0);
    }

    #[test]
    fn gini_kernel_values() {
        assert_eq!(Kernel::GiniMeanDifference.eval(&[1.0], &[4.0]), 3.0);
        assert_eq!(Kernel::GiniMeanDifference.eval(&[-1.0], &[-1.0]), 0.0);
    }

    #[test]
    fn kendall_kernel_strict_componentwise_order() {
        let g = Kernel::Kendall;
        assert_eq!(g.eval(&[0.0, 0.0], &[1.0, 1.0]), 1.0);
        assert_eq!(g.eval(&[0.0, 1.0], &[1.0, 0.0]), 0.0);
        assert_eq!(g.eval(&[1.0, 1.0], &[0.0, 0.0]), 1.0);
        // ties break concordance
        assert_eq!(g.eval(&[0.0, 0.5], &[0.0, 1.0]), 0.0);
    }

    #[test]
    fn dimension_checks() {
        assert!(Kernel::Variance.check_dim(1).is_ok());
        assert!(Kernel::Variance.check_dim(2).is_err());
        assert!(Kernel::Kendall.check_dim(1).is_ok());
        assert!(Kernel::Kendall.check_dim(3).is_ok());
        let custom = Kernel::Custom {
            name: "prod".into(),
            required_d: Some(2),
            f: Arc::new(|x, y| x[0] * y[0] + x[1] * y[1]),
        };
        assert!(custom.check_dim(2).is_ok());
        assert!(custom.check_dim(1).is_err());
    }

    #[test]
    fn try_eval_rejects_mismatched_args() {
        assert!(Kernel::Kendall.try_eval(&[1.0, 2.0], &[1.0]).is_err());
    }

    proptest! {
        #[test]
        fn builtin_kernels_are_symmetric(
            x in proptest::collection::vec(-1e3f64..1e3, 1..4),
            y in proptest::collection::vec(-1e3f64..1e3, 1..4),
        ) {
            let d = x.len().min(y.len());
            let (x, y) = (&x[..d], &y[..d]);
            prop_assert_eq!(Kernel::Kendall.eval(x, y), Kernel::Kendall.eval(y, x));
            if d == 1 {
                for kernel in [Kernel::Variance, Kernel::GiniMeanDifference] {
                    prop_assert_eq!(kernel.eval(x, y), kernel.eval(y, x));
                }
            }
        }
    }
}
