use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use super::RepError;

/// A partition with at most `d` nonzero rows, stored without trailing zeros.
///
/// Equality and hashing are on the stored rows, so `(2,1,0)` and `(2,1)` are
/// the same diagram. SU(d) equivalence (stripping full columns) is explicit via
/// [`YoungDiagram::su_reduced`].
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct YoungDiagram {
    rows: Vec<u32>,
}

impl YoungDiagram {
    pub fn new(rows: &[u32]) -> Result<Self, RepError> {
        if rows.windows(2).any(|w| w[0] < w[1]) {
            return Err(RepError::InvalidDiagram(rows.to_vec()));
        }
        let mut rows = rows.to_vec();
        while rows.last() == Some(&0) {
            rows.pop();
        }
        Ok(Self { rows })
    }

    /// Builds from signed rows, failing if any row is negative or rows increase.
    pub fn from_signed(rows: &[i64]) -> Option<Self> {
        if rows.iter().any(|&r| r < 0) || rows.windows(2).any(|w| w[0] < w[1]) {
            return None;
        }
        let rows: Vec<u32> = rows.iter().map(|&r| r as u32).collect();
        Self::new(&rows).ok()
    }

    pub fn empty() -> Self {
        Self { rows: Vec::new() }
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    /// Row `i` (0-based), zero past the last stored row.
    pub fn row(&self, i: usize) -> u32 {
        self.rows.get(i).copied().unwrap_or(0)
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn boxes(&self) -> u32 {
        self.rows.iter().sum()
    }

    pub fn padded(&self, d: usize) -> Vec<i64> {
        (0..d).map(|i| self.row(i) as i64).collect()
    }

    pub fn check_rows(&self, d: usize) -> Result<(), RepError> {
        if d == 0 {
            return Err(RepError::InvalidDimension(d));
        }
        if self.rows.len() > d {
            return Err(RepError::TooManyRows { rows: self.rows.len(), d });
        }
        Ok(())
    }

    /// Removes full columns of height `d` (the SU(d) representative).
    pub fn su_reduced(&self, d: usize) -> Self {
        if self.rows.len() < d {
            return self.clone();
        }
        let k = self.rows[d - 1];
        let rows: Vec<u32> = self.rows.iter().map(|&r| r - k).collect();
        Self::new(&rows).expect("shifted rows stay ordered")
    }

    /// Conjugate (transposed) diagram.
    pub fn conjugate(&self) -> Self {
        let w = self.row(0) as usize;
        let rows: Vec<u32> = (0..w)
            .map(|c| self.rows.iter().filter(|&&r| r as usize > c).count() as u32)
            .collect();
        Self { rows }
    }
}

impl fmt::Debug for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Lexicographic on rows; `enumerate_diagrams` lists in decreasing order.
impl Ord for YoungDiagram {
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.rows.len().max(other.rows.len());
        for i in 0..n {
            match self.row(i).cmp(&other.row(i)) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for YoungDiagram {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All partitions of `n` with at most `d` rows, lexicographically decreasing.
pub fn enumerate_diagrams(n: u32, d: usize) -> Result<Vec<YoungDiagram>, RepError> {
    if d == 0 {
        return Err(RepError::InvalidDimension(d));
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(d);
    fill(n, n, d, &mut cur, &mut out);
    Ok(out)
}

fn fill(rest: u32, cap: u32, rows_left: usize, cur: &mut Vec<u32>, out: &mut Vec<YoungDiagram>) {
    if rest == 0 {
        out.push(YoungDiagram { rows: cur.clone() });
        return;
    }
    if rows_left == 0 {
        return;
    }
    let hi = rest.min(cap);
    // the remaining rows can hold at most rows_left * part boxes
    let lo = rest.div_ceil(rows_left as u32);
    for part in (lo..=hi).rev() {
        cur.push(part);
        fill(rest - part, part, rows_left - 1, cur, out);
        cur.pop();
    }
}

/// Dimension of the SU(d) irrep, exact.
pub fn weyl_dimension(lambda: &YoungDiagram, d: usize) -> Result<BigUint, RepError> {
    lambda.check_rows(d)?;
    let l = lambda.padded(d);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..d {
        for j in (i + 1)..d {
            num *= BigUint::from((l[i] - l[j] + (j - i) as i64) as u64);
            den *= BigUint::from((j - i) as u64);
        }
    }
    Ok(num / den)
}

/// Dimension as `f64` (products taken in floating point).
pub fn dimension_f64(lambda: &YoungDiagram, d: usize) -> f64 {
    let l = lambda.padded(d);
    let mut v = 1.0;
    for i in 0..d {
        for j in (i + 1)..d {
            v *= (l[i] - l[j] + (j - i) as i64) as f64 / (j - i) as f64;
        }
    }
    v
}

/// Dimension as `u64`, panicking on overflow. Fine for the sizes used in loops.
pub fn dimension_u64(lambda: &YoungDiagram, d: usize) -> u64 {
    weyl_dimension(lambda, d)
        .expect("diagram fits in d rows")
        .to_u64()
        .expect("dimension overflows u64")
}

/// Diagram of the dual irrep: rows `(l1-ld, l1-l(d-1), ..., l1-l2, 0)`.
pub fn dualize(lambda: &YoungDiagram, d: usize) -> Result<YoungDiagram, RepError> {
    lambda.check_rows(d)?;
    let l = lambda.padded(d);
    let rows: Vec<u32> = (0..d).map(|i| (l[0] - l[d - 1 - i]) as u32).collect();
    YoungDiagram::new(&rows)
}

/// Half the l1 distance between row vectors.
pub fn young_distance(lambda: &YoungDiagram, mu: &YoungDiagram) -> f64 {
    let n = lambda.num_rows().max(mu.num_rows());
    let s: i64 = (0..n)
        .map(|i| (lambda.row(i) as i64 - mu.row(i) as i64).abs())
        .sum();
    s as f64 / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn yd(r: &[u32]) -> YoungDiagram {
        YoungDiagram::new(r).unwrap()
    }

    // hook-content formula, independent of the Weyl product
    fn hook_content_dim(lambda: &YoungDiagram, d: usize) -> f64 {
        let conj = lambda.conjugate();
        let mut v = 1.0;
        for (i, &r) in lambda.rows().iter().enumerate() {
            for j in 0..r as usize {
                let hook = (r as usize - j - 1) + (conj.row(j) as usize - i - 1) + 1;
                let content = d as i64 + j as i64 - i as i64;
                v *= content as f64 / hook as f64;
            }
        }
        v
    }

    #[test]
    fn enumerate_small_cases() {
        let y = enumerate_diagrams(3, 2).unwrap();
        assert_eq!(y, vec![yd(&[3]), yd(&[2, 1])]);
        assert_eq!(enumerate_diagrams(4, 3).unwrap().len(), 4);
        assert_eq!(enumerate_diagrams(0, 3).unwrap(), vec![YoungDiagram::empty()]);
        assert!(enumerate_diagrams(3, 0).is_err());
    }

    #[test]
    fn enumerate_is_strictly_decreasing_and_complete() {
        for d in 1..5 {
            for n in 0..12 {
                let y = enumerate_diagrams(n, d).unwrap();
                assert!(y.windows(2).all(|w| w[0] > w[1]));
                assert!(y.iter().all(|l| l.boxes() == n && l.num_rows() <= d));
            }
        }
        // partitions of 10 into at most 3 parts
        assert_eq!(enumerate_diagrams(10, 3).unwrap().len(), 14);
    }

    #[test]
    fn dimension_values() {
        assert_eq!(weyl_dimension(&yd(&[2, 1]), 3).unwrap(), BigUint::from(8u32));
        assert_eq!(weyl_dimension(&yd(&[3]), 2).unwrap(), BigUint::from(4u32));
        assert_eq!(weyl_dimension(&YoungDiagram::empty(), 5).unwrap(), BigUint::one());
        assert!(matches!(
            weyl_dimension(&yd(&[1, 1, 1]), 2),
            Err(RepError::TooManyRows { rows: 3, d: 2 })
        ));
    }

    #[test]
    fn dimension_matches_hook_content() {
        for d in 1..6 {
            for n in 0..9 {
                for l in enumerate_diagrams(n, d).unwrap() {
                    let w = dimension_u64(&l, d) as f64;
                    assert!((w - hook_content_dim(&l, d)).abs() < 1e-6 * w.max(1.0), "{l:?} d={d}");
                    assert!((w - dimension_f64(&l, d)).abs() < 1e-9 * w);
                }
            }
        }
    }

    #[test]
    fn dual_examples() {
        assert_eq!(dualize(&yd(&[1]), 3).unwrap(), yd(&[1, 1]));
        assert_eq!(dualize(&yd(&[2, 1]), 3).unwrap(), yd(&[2, 1]));
        assert_eq!(dualize(&yd(&[1]), 2).unwrap(), yd(&[1]));
        for d in 2..5 {
            for l in enumerate_diagrams(5, d).unwrap() {
                let dl = dualize(&l, d).unwrap();
                assert_eq!(dualize(&dl, d).unwrap(), l.su_reduced(d));
                assert_eq!(dimension_u64(&dl, d), dimension_u64(&l, d));
            }
        }
    }

    #[test]
    fn distance_examples() {
        assert_eq!(young_distance(&yd(&[3, 1]), &yd(&[2, 2])), 1.0);
        assert_eq!(young_distance(&yd(&[4]), &yd(&[2, 1, 1])), 2.0);
    }

    #[test]
    fn trailing_zeros_are_ignored() {
        assert_eq!(yd(&[2, 1, 0]), yd(&[2, 1]));
        assert!(YoungDiagram::new(&[1, 2]).is_err());
        assert_eq!(yd(&[3, 1, 1]).su_reduced(3), yd(&[2]));
        assert_eq!(yd(&[3, 1]).conjugate(), yd(&[2, 1, 1]));
    }
}
