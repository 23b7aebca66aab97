//! Time-ordered observation matrices.

use crate::error::{Error, Result};

/// An `n x d` matrix of real observations, rows ordered by time.
///
/// All entries are guaranteed finite after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    data: Vec<f64>,
    n: usize,
    d: usize,
}

impl Sample {
    /// Builds a sample from row-major data of width `d`.
    pub fn new(data: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("dimension d must be >= 1"));
        }
        if data.is_empty() {
            return Err(Error::invalid("sample must contain at least one row"));
        }
        if !data.len().is_multiple_of(d) {
            return Err(Error::invalid(format!(
                "data length {} is not a multiple of d = {d}",
                data.len()
            )));
        }
        for (idx, v) in data.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteData {
                    row: idx / d,
                    col: idx % d,
                });
            }
        }
        let n = data.len() / d;
        Ok(Sample { data, n, d })
    }

    /// Convenience constructor for univariate series.
    pub fn univariate(values: Vec<f64>) -> Result<Self> {
        Sample::new(values, 1)
    }

    /// Builds a sample from equally sized rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::invalid("rows have unequal widths"));
        }
        Sample::new(rows.concat(), d.max(1))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.d)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_is_derived_from_width() {
        let s = Sample::new(vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0], 2).unwrap();
        assert_eq!(s.n(), 3);
        assert_eq!(s.dim(), 2);
        assert_eq!(s.row(1), &[3.0, 4.0]);
    }

    #[test]
    fn rejects_non_finite_entries() {
        let err = Sample::new(vec![1.0, f64::NAN, 3.0], 1).unwrap_err();
        match err {
            Error::NonFiniteData { row, col } => {
                assert_eq!((row, col), (1, 0));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_ragged_and_empty_input() {
        assert!(Sample::new(vec![], 1).is_err());
        assert!(Sample::new(vec![1.0, 2.0, 3.0], 2).is_err());
        assert!(Sample::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }
}
