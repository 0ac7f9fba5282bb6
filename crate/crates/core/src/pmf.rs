//! Probability mass functions on an integer interval.

use std::io::Write;

use crate::error::Result;
use crate::scalar::Real;

/// `values[i]` is the mass at the integer `offset + i`.
///
/// Indices outside the stored window carry zero mass, so `(offset, values)`
/// determines the function once exact zeros at the ends are trimmed.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf<T> {
    offset: i64,
    values: Vec<T>,
}

impl<T: Real> Pmf<T> {
    pub fn new(offset: i64, values: Vec<T>) -> Self {
        Self { offset, values }
    }

    /// Unit mass at `at`.
    pub fn delta(at: i64) -> Self {
        Self {
            offset: at,
            values: vec![T::one()],
        }
    }

    /// The zero measure.
    pub fn zero() -> Self {
        Self {
            offset: 0,
            values: Vec::new(),
        }
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// One past the last stored index.
    pub fn end(&self) -> i64 {
        self.offset + self.values.len() as i64
    }

    /// Mass at `index`, zero outside the stored window.
    #[inline]
    pub fn get(&self, index: i64) -> T {
        let i = index - self.offset;
        if i < 0 || i >= self.values.len() as i64 {
            T::zero()
        } else {
            self.values[i as usize]
        }
    }

    pub(crate) fn slot_mut(&mut self, index: i64) -> Option<&mut T> {
        let i = index - self.offset;
        if i < 0 {
            return None;
        }
        self.values.get_mut(i as usize)
    }

    pub fn mass(&self) -> T {
        self.values.iter().copied().sum()
    }

    /// `(index, mass)` pairs over the stored window, zeros included.
    pub fn iter(&self) -> impl Iterator<Item = (i64, T)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.offset + i as i64, v))
    }

    /// Drops exact zeros at both ends.
    pub fn trimmed(mut self) -> Self {
        let Some(last) = self.values.iter().rposition(|v| !v.is_zero()) else {
            return Self::zero();
        };
        self.values.truncate(last + 1);
        let first = self.values.iter().position(|v| !v.is_zero()).unwrap_or(0);
        if first > 0 {
            self.values.drain(..first);
            self.offset += first as i64;
        }
        self
    }

    /// Restriction to the closed index window `[lo, hi]`.
    pub fn restricted(&self, lo: i64, hi: i64) -> Self {
        let lo = lo.max(self.offset);
        let hi = hi.min(self.end() - 1);
        if hi < lo {
            return Self::zero();
        }
        let a = (lo - self.offset) as usize;
        let b = (hi - self.offset) as usize;
        Self {
            offset: lo,
            values: self.values[a..=b].to_vec(),
        }
    }

    /// Drops all mass at indices above `max_index`.
    pub fn truncate_above(&mut self, max_index: i64) {
        let keep = (max_index - self.offset + 1).clamp(0, self.values.len() as i64);
        self.values.truncate(keep as usize);
    }

    /// `Σ_j self(j) · other(at − j)`, the convolution evaluated at one index.
    pub fn convolve_at(&self, other: &Pmf<T>, at: i64) -> T {
        // j ranges over self's window intersected with at − other's window.
        let lo = self.offset.max(at - (other.end() - 1));
        let hi = (self.end() - 1).min(at - other.offset);
        let mut acc = T::zero();
        let mut j = lo;
        while j <= hi {
            acc = acc + self.get(j) * other.get(at - j);
            j += 1;
        }
        acc
    }

    /// CSV with header `index,probability` over the stored window, 17
    /// significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "probability"])?;
        for (i, v) in self.iter() {
            w.write_record([i.to_string(), fmt_sig17(v.as_f64())])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Decimal rendering with 17 significant digits.
pub fn fmt_sig17(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn get_outside_window_is_zero() {
        let p = Pmf::new(-1, vec![0.25, 0.5, 0.25]);
        assert_eq!(p.get(-2), 0.0);
        assert_eq!(p.get(0), 0.5);
        assert_eq!(p.get(2), 0.0);
        assert_eq!(p.end(), 2);
    }

    #[test]
    fn trimming_removes_end_zeros_only() {
        let p = Pmf::new(3, vec![0.0, 0.0, 0.5, 0.0, 0.5, 0.0]).trimmed();
        assert_eq!(p.offset(), 5);
        assert_eq!(p.values(), &[0.5, 0.0, 0.5]);
        assert!(Pmf::<f64>::new(2, vec![0.0; 4]).trimmed().is_empty());
    }

    #[test]
    fn restriction_and_truncation() {
        let p = Pmf::new(0, vec![0.1, 0.2, 0.3, 0.4]);
        assert_eq!(p.restricted(1, 2).values(), &[0.2, 0.3]);
        assert!(p.restricted(5, 9).is_empty());
        let mut q = p.clone();
        q.truncate_above(1);
        assert_eq!(q.values(), &[0.1, 0.2]);
        q.truncate_above(-3);
        assert!(q.is_empty());
    }

    #[test]
    fn convolve_at_matches_hand_sum() {
        let p = Pmf::new(1, vec![0.5f64, 0.5]);
        let q = Pmf::new(-1, vec![0.25, 0.5, 0.25]);
        // index 1: p(1)q(0) + p(2)q(-1)
        assert!((p.convolve_at(&q, 1) - (0.25 + 0.125)).abs() < 1e-15);
        assert_eq!(p.convolve_at(&q, 10), 0.0);
    }

    #[test]
    fn csv_uses_absolute_indices() {
        let mut buf = Vec::new();
        Pmf::new(-1, vec![0.5, 0.5]).write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines[0], "index,probability");
        assert_eq!(lines[1], "-1,5.0000000000000000e-1");
        assert_eq!(lines.len(), 3);
    }
}
