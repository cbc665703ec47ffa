//! Weak-model reference family: a lattice of diagrams around a flat core,
//! weighted by products of sine-squared weights.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use crate::rep::YoungDiagram;

use super::{RefFrameError, RefFrameSpec};

/// `g_k = 2/(M+1) sin^2(pi (2k+1) / (2(M+1)))` for `k` in `0..=M`.
pub fn g_weight(k: u64, lattice: u64) -> Result<f64, RefFrameError> {
    if lattice == 0 || k > lattice {
        return Err(RefFrameError::IndexOutOfRange { k, max: lattice });
    }
    Ok(signed_amplitude(k as i64, lattice).powi(2))
}

/// `sqrt(2/(M+1)) sin(pi (2k+1) / (2(M+1)))`, the signed square root of the
/// weight, defined for every integer `k`.
pub fn signed_amplitude(k: i64, lattice: u64) -> f64 {
    let mp1 = (lattice + 1) as f64;
    (2.0 / mp1).sqrt() * (PI * (2 * k + 1) as f64 / (2.0 * mp1)).sin()
}

/// Parameters of the weak-model reference state on `m` pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakModelLayout {
    pub d: usize,
    /// Pairs per reference copy.
    pub m: u32,
    pub n_p: u32,
    /// Lattice size `M`; each free coordinate ranges over `0..=M`.
    pub lattice: u32,
    /// Boxes left over for the flat core.
    pub m0: u32,
    pub core: YoungDiagram,
}

impl WeakModelLayout {
    /// Boxes of every irrep appearing in `U*_L (x) U_P^{(x) n_P}`.
    pub fn n_prime(&self) -> u32 {
        self.n_p + self.d as u32 - 1
    }

    /// Reference qudits for `n_e + 1` copies.
    pub fn n_r(&self, n_e: u32) -> u32 {
        2 * self.m * (n_e + 1)
    }

    pub fn n_total(&self, n_e: u32) -> u32 {
        self.n_p + self.n_r(n_e)
    }

    /// Offset of row `i` before the free coordinate is added.
    fn base_row(&self, i: usize) -> i64 {
        let d = self.d as i64;
        let i1 = i as i64 + 1;
        let mm = self.lattice as i64;
        if i + 1 < self.d {
            (2 * d - i1 - 1) * mm + d - i1
        } else {
            (d - 1) * mm
        }
    }

    /// Diagram for free coordinates `t` (length `d - 1`, entries in `0..=M`).
    pub fn diagram(&self, t: &[u32]) -> YoungDiagram {
        assert_eq!(t.len(), self.d - 1);
        let mut rows: Vec<i64> = (0..self.d).map(|i| self.core.row(i) as i64 + self.base_row(i)).collect();
        for (i, &ti) in t.iter().enumerate() {
            rows[i] += ti as i64;
            rows[self.d - 1] -= ti as i64;
        }
        YoungDiagram::from_signed(&rows).expect("lattice rows stay strictly decreasing")
    }

    /// Inverse of [`Self::diagram`] on the support.
    pub fn coordinates(&self, lambda: &YoungDiagram) -> Option<Vec<u32>> {
        let t: Vec<i64> = (0..self.d - 1)
            .map(|i| lambda.row(i) as i64 - self.core.row(i) as i64 - self.base_row(i))
            .collect();
        if t.iter().any(|&v| v < 0 || v > self.lattice as i64) {
            return None;
        }
        let t: Vec<u32> = t.into_iter().map(|v| v as u32).collect();
        (self.diagram(&t) == *lambda).then_some(t)
    }
}

fn min_pairs(d: usize) -> u32 {
    2 * (d * (d - 1)) as u32
}

/// Layout and spec for `d`, `m` pairs per copy and `n_p` physical qudits.
pub fn weak_spec(d: usize, m: u32, n_p: u32) -> Result<(WeakModelLayout, RefFrameSpec), RefFrameError> {
    if d < 2 {
        return Err(RefFrameError::Unsupported(format!("d = {d}")));
    }
    let dd = (d * (d - 1)) as u32;
    if m < min_pairs(d) {
        return Err(RefFrameError::TooFewPairs { d, m, min_m: min_pairs(d) });
    }
    let lattice = (2 * m - dd) / (3 * dd);
    let m0 = m - dd * (3 * lattice + 1) / 2;
    let base = m0 / d as u32;
    let extra = (m0 % d as u32) as usize;
    let core_rows: Vec<u32> = (0..d).map(|i| base + u32::from(i < extra)).collect();
    let layout = WeakModelLayout { d, m, n_p, lattice, m0, core: YoungDiagram::new(&core_rows)? };

    let g: Vec<f64> = (0..=lattice as u64).map(|k| g_weight(k, lattice as u64)).collect::<Result<_, _>>()?;
    let mut weights = BTreeMap::new();
    let mut t = vec![0u32; d - 1];
    loop {
        let w: f64 = t.iter().map(|&k| g[k as usize]).product();
        weights.insert(layout.diagram(&t), w);
        // odometer over {0..=M}^(d-1)
        let mut i = 0;
        while i < t.len() && t[i] == lattice {
            t[i] = 0;
            i += 1;
        }
        if i == t.len() {
            break;
        }
        t[i] += 1;
    }
    let total: f64 = weights.values().sum();
    for w in weights.values_mut() {
        *w /= total;
    }
    let spec = RefFrameSpec::new(d, m, weights)?;
    Ok((layout, spec))
}

/// Weak layout for a total of `n` qudits, `n_p` physical and `n_e + 1` copies.
pub fn weak_layout_for_total(
    d: usize,
    n: u32,
    n_p: u32,
    n_e: u32,
) -> Result<(WeakModelLayout, RefFrameSpec), RefFrameError> {
    let n_r = n.checked_sub(n_p).ok_or_else(|| RefFrameError::Layout(format!("n = {n} < n_P = {n_p}")))?;
    let per = 2 * (n_e + 1);
    if n_r % per != 0 {
        return Err(RefFrameError::Layout(format!("n_R = {n_r} is not a multiple of 2(n_e+1) = {per}")));
    }
    weak_spec(d, n_r / per, n_p)
}

/// Support diagrams whose rows are pairwise at least `4 n'` apart.
pub fn interior_set(spec: &RefFrameSpec, n_prime: u32) -> BTreeSet<YoungDiagram> {
    let d = spec.d();
    let gap = 4 * n_prime as i64;
    spec.support()
        .filter(|l| {
            let r = l.padded(d);
            (0..d).all(|i| ((i + 1)..d).all(|j| (r[i] - r[j]).abs() >= gap))
        })
        .cloned()
        .collect()
}

/// All integer shifts with entries in `[-n', n']` summing to zero.
pub fn shifts(d: usize, n_prime: u32) -> Vec<Vec<i64>> {
    let b = n_prime as i64;
    let mut out = Vec::new();
    let mut cur = vec![-b; d];
    loop {
        if cur.iter().sum::<i64>() == 0 {
            out.push(cur.clone());
        }
        let mut i = 0;
        while i < d && cur[i] == b {
            cur[i] = -b;
            i += 1;
        }
        if i == d {
            break;
        }
        cur[i] += 1;
    }
    out
}

/// Worst shifted overlap `min_D sum_{interior l} sqrt(q_l q_{l+D})`; shifted
/// diagrams that are not partitions, or lie off the support, contribute zero.
pub fn min_overlap(spec: &RefFrameSpec, n_prime: u32) -> f64 {
    let d = spec.d();
    let inner = interior_set(spec, n_prime);
    shifts(d, n_prime)
        .iter()
        .map(|delta| {
            inner
                .iter()
                .map(|l| {
                    let rows: Vec<i64> = l.padded(d).iter().zip(delta).map(|(a, b)| a + b).collect();
                    let q2 = YoungDiagram::from_signed(&rows).map_or(0.0, |s| spec.weight(&s));
                    (spec.weight(l) * q2).sqrt()
                })
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

/// `sum_{k=lo}^{M-lo} s_k s_{k+delta}` with the signed amplitudes `s_k`; equals
/// `sum sqrt(g_k g_{k+delta})` while `k + delta <= M`.
pub fn appendix_e_sum(lattice: u64, delta: u64, lo: u64) -> f64 {
    if 2 * lo > lattice {
        return 0.0;
    }
    (lo..=lattice - lo)
        .map(|k| signed_amplitude(k as i64, lattice) * signed_amplitude((k + delta) as i64, lattice))
        .sum()
}

/// Closed form of [`appendix_e_sum`]:
/// `(M - 2 lo + 1 + sin(2 lo x) / sin x) cos(delta x) / (M + 1)`, `x = pi/(M+1)`.
pub fn appendix_e_closed_form(lattice: u64, delta: u64, lo: u64) -> f64 {
    if 2 * lo > lattice {
        return 0.0;
    }
    let mp1 = (lattice + 1) as f64;
    let x = PI / mp1;
    let kernel = if lo == 0 { 0.0 } else { (2.0 * lo as f64 * x).sin() / x.sin() };
    (lattice as f64 - 2.0 * lo as f64 + 1.0 + kernel) * (delta as f64 * x).cos() / mp1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn yd(r: &[u32]) -> YoungDiagram {
        YoungDiagram::new(r).unwrap()
    }

    #[test]
    fn g_examples_and_normalization() {
        assert!((g_weight(1, 2).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((g_weight(0, 2).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        let s: f64 = (0..=50).map(|k| g_weight(k, 50).unwrap()).sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!(g_weight(3, 2).is_err());
    }

    #[test]
    fn weak_spec_examples() {
        let (l, s) = weak_spec(2, 10, 5).unwrap();
        assert_eq!((l.lattice, l.m0), (3, 0));
        assert_eq!(s.len(), 4);
        let (l, s) = weak_spec(2, 4, 5).unwrap();
        assert_eq!((l.lattice, l.m0, s.len()), (1, 0, 2));
        assert!(matches!(weak_spec(2, 1, 5), Err(RefFrameError::TooFewPairs { min_m: 4, .. })));
        assert_eq!(l.n_prime(), 6);
    }

    #[test]
    fn weak_spec_support_decodes() {
        for (d, m) in [(2, 10), (2, 23), (3, 13), (3, 40)] {
            let (l, s) = weak_spec(d, m, 2).unwrap();
            assert_eq!(s.len(), (l.lattice as usize + 1).pow(d as u32 - 1));
            assert!((s.weights().values().sum::<f64>() - 1.0).abs() < 1e-12);
            for (lam, &w) in s.weights() {
                assert_eq!(lam.boxes(), m);
                let t = l.coordinates(lam).unwrap();
                let want: f64 = t.iter().map(|&k| g_weight(k as u64, l.lattice as u64).unwrap()).product();
                assert!((w - want).abs() < 1e-14);
            }
            assert_eq!(l.core.boxes(), l.m0);
        }
    }

    #[test]
    fn interior_examples() {
        let s = RefFrameSpec::point(2, yd(&[10])).unwrap();
        assert_eq!(interior_set(&s, 2), BTreeSet::from([yd(&[10])]));
        assert!(interior_set(&s, 3).is_empty());
        // rows (27 + t, 13 - t) are 4n' = 24 apart exactly when t >= 5
        let (l, w) = weak_spec(2, 40, 5).unwrap();
        let want: BTreeSet<_> = (5..=l.lattice).map(|t| l.diagram(&[t])).collect();
        assert_eq!(interior_set(&w, 6), want);
    }

    #[test]
    fn overlap_examples() {
        let s = RefFrameSpec::point(2, yd(&[40])).unwrap();
        assert_eq!(min_overlap(&s, 3), 0.0);
        let (_, w) = weak_spec(2, 100, 5).unwrap();
        let inner: f64 = interior_set(&w, 6).iter().map(|l| w.weight(l)).sum();
        let m = min_overlap(&w, 6);
        assert!(m <= inner + 1e-15 && inner <= 1.0);
        let mut prev = 1.0;
        for np in 1..8 {
            let v = min_overlap(&w, np);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn shift_counts() {
        // d = 2: D = (a, -a); d = 3, n' = 1: 7 vectors
        assert_eq!(shifts(2, 3).len(), 7);
        assert_eq!(shifts(3, 1).len(), 7);
    }

    #[test]
    fn appendix_e_examples() {
        assert!((appendix_e_sum(100, 0, 0) - 1.0).abs() < 1e-12);
        let direct3: f64 = (0..=97).map(|k| (g_weight(k, 100).unwrap() * g_weight(k + 3, 100).unwrap()).sqrt()).sum();
        let tail = signed_amplitude(98, 100) * signed_amplitude(101, 100)
            + signed_amplitude(99, 100) * signed_amplitude(102, 100)
            + signed_amplitude(100, 100) * signed_amplitude(103, 100);
        assert!((appendix_e_sum(100, 3, 0) - (direct3 + tail)).abs() < 1e-12);
        assert!((appendix_e_closed_form(100, 3, 0) - (3.0 * PI / 101.0).cos()).abs() < 1e-12);
        assert!((appendix_e_sum(20, 1, 5) - appendix_e_closed_form(20, 1, 5)).abs() < 1e-12);
    }
}
