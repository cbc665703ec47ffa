use std::collections::{BTreeMap, BTreeSet};

use crate::rep::YoungDiagram;

use super::{strong_combined_spec, RefFrameError};

/// Normalization tolerance on the weights.
pub const WEIGHT_TOL: f64 = 1e-12;

/// A reference state on `m` qudit pairs, fixed by its weights on Young
/// diagrams with `m` boxes and at most `d` rows.
#[derive(Clone, Debug, PartialEq)]
pub struct RefFrameSpec {
    d: usize,
    m: u32,
    weights: BTreeMap<YoungDiagram, f64>,
}

impl RefFrameSpec {
    /// Zero weights are dropped from the support.
    pub fn new(d: usize, m: u32, weights: BTreeMap<YoungDiagram, f64>) -> Result<Self, RefFrameError> {
        let mut total = 0.0;
        for (lam, &w) in &weights {
            lam.check_rows(d)?;
            if lam.boxes() != m {
                return Err(RefFrameError::WrongBoxCount { diagram: lam.clone(), boxes: m });
            }
            if w < 0.0 || !w.is_finite() {
                return Err(RefFrameError::NegativeWeight { diagram: lam.clone(), weight: w });
            }
            total += w;
        }
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(RefFrameError::NotNormalized(total));
        }
        let weights = weights.into_iter().filter(|(_, w)| *w > 0.0).collect();
        Ok(Self { d, m, weights })
    }

    /// Single diagram with all the weight.
    pub fn point(d: usize, lambda: YoungDiagram) -> Result<Self, RefFrameError> {
        let m = lambda.boxes();
        Self::new(d, m, BTreeMap::from([(lambda, 1.0)]))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn pairs(&self) -> u32 {
        self.m
    }

    pub fn weights(&self) -> &BTreeMap<YoungDiagram, f64> {
        &self.weights
    }

    /// Weight of `lambda`, zero off the support.
    pub fn weight(&self, lambda: &YoungDiagram) -> f64 {
        self.weights.get(lambda).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> impl Iterator<Item = &YoungDiagram> {
        self.weights.keys()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Largest spin `l1 - l2` in the support (d = 2 only meaningful).
    pub fn max_row_gap(&self) -> u32 {
        self.weights.keys().map(|l| l.row(0) - l.row(self.d - 1)).max().unwrap_or(0)
    }
}

/// `copies` identical reference states, each on `m` pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct RefFrameEnsemble {
    pub spec: RefFrameSpec,
    pub copies: usize,
}

impl RefFrameEnsemble {
    pub fn new(spec: RefFrameSpec, copies: usize) -> Self {
        Self { spec, copies }
    }

    /// Reference qudits used, `2 m s_R`.
    pub fn qudits(&self) -> usize {
        2 * self.spec.pairs() as usize * self.copies
    }

    /// Spec seen by the error-tolerant measurement once `erased` copies are
    /// discarded. Single-pair copies are measured jointly; larger copies are
    /// redundant backups and one intact copy is used as is.
    pub fn survivor_spec(&self, erased: &BTreeSet<usize>) -> Result<RefFrameSpec, RefFrameError> {
        if let Some(&bad) = erased.iter().find(|&&i| i >= self.copies) {
            return Err(RefFrameError::BadCopyIndex { index: bad, copies: self.copies });
        }
        let left = self.copies - erased.len();
        if left == 0 {
            return Err(RefFrameError::AllCopiesErased { copies: self.copies });
        }
        if self.spec.pairs() == 1 {
            Ok(strong_combined_spec(self.spec.d(), left as u32)?)
        } else {
            Ok(self.spec.clone())
        }
    }
}
