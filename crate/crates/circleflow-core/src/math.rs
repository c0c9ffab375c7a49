//! Scalar math dispatch and compensated accumulation.
//!
//! Every transcendental the crate touches goes through this module so the
//! same code builds against `std` intrinsics or `libm`.

macro_rules! unary {
    ($($name:ident => $libm:ident),* $(,)?) => {
        $(
            #[cfg(feature = "std")]
            #[inline]
            pub(crate) fn $name(x: f64) -> f64 {
                f64::$name(x)
            }
            #[cfg(not(feature = "std"))]
            #[inline]
            pub(crate) fn $name(x: f64) -> f64 {
                libm::$libm(x)
            }
        )*
    };
}

unary! {
    sqrt => sqrt,
    exp => exp,
    exp_m1 => expm1,
    ln => log,
    ln_1p => log1p,
    sin => sin,
    cos => cos,
    sinh => sinh,
    cosh => cosh,
    tanh => tanh,
    abs => fabs,
}

#[cfg(feature = "std")]
#[inline]
pub(crate) fn atan2(y: f64, x: f64) -> f64 {
    f64::atan2(y, x)
}
#[cfg(not(feature = "std"))]
#[inline]
pub(crate) fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

#[cfg(feature = "std")]
#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    f64::powf(x, y)
}
#[cfg(not(feature = "std"))]
#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

/// Neumaier's variant of Kahan summation.
///
/// Angle sums feed the Gauss-Bonnet residual, which is a headline
/// diagnostic; naive accumulation would pollute it on large complexes.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if abs(self.sum) >= abs(x) {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub(crate) fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Compensated sum of a slice.
pub(crate) fn sum_compensated(values: &[f64]) -> f64 {
    let mut acc = NeumaierSum::new();
    for &v in values {
        acc.add(v);
    }
    acc.total()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelling_sum() {
        // 1 + 1e100 + 1 - 1e100 = 2; naive f64 gives 0.
        let mut s = NeumaierSum::new();
        for &x in &[1.0, 1e100, 1.0, -1e100] {
            s.add(x);
        }
        assert_eq!(s.total(), 2.0);
    }

    #[test]
    fn compensated_slice_sum_matches_exact() {
        let xs: alloc::vec::Vec<f64> = (0..1000).map(|i| 0.1 + (i as f64) * 1e-3).collect();
        let exact: f64 = 0.1 * 1000.0 + 1e-3 * (999.0 * 1000.0 / 2.0);
        assert!((sum_compensated(&xs) - exact).abs() < 1e-12);
    }
}
