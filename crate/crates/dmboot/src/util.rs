//! Small numeric helpers shared across modules.

/// Neumaier-compensated accumulator. The pairwise kernel tables sum O(n^2)
/// terms of mixed sign; plain summation would lose digits there.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of an iterator.
pub(crate) fn comp_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// `k choose 2` as a float.
pub(crate) fn binom2(k: usize) -> f64 {
    (k as f64) * (k as f64 - 1.0) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let mut acc = CompensatedSum::default();
        acc.add(1.0);
        acc.add(1e100);
        acc.add(1.0);
        acc.add(-1e100);
        assert_eq!(acc.value(), 2.0);
    }

    #[test]
    fn binom2_small_values() {
        assert_eq!(binom2(0), 0.0);
        assert_eq!(binom2(1), 0.0);
        assert_eq!(binom2(2), 1.0);
        assert_eq!(binom2(5), 10.0);
    }
}
