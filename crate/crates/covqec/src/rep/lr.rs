//! Littlewood-Richardson coefficients by enumerating LR skew tableaux.
//!
//! Letters `1..=len(mu)` are added as successive horizontal strips; the
//! reverse reading word must be a lattice word.

use std::collections::BTreeMap;

use super::young::YoungDiagram;
use super::RepError;

/// Decomposition of `lambda (x) mu` for GL(d): pairs `(nu, c^nu_{lambda mu})` with
/// `|nu| = |lambda| + |mu|`, sorted lexicographically decreasing.
pub fn tensor_decompose(
    lambda: &YoungDiagram,
    mu: &YoungDiagram,
    d: usize,
) -> Result<Vec<(YoungDiagram, u64)>, RepError> {
    lambda.check_rows(d)?;
    mu.check_rows(d)?;
    let mut acc: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
    let shape: Vec<u32> = (0..d).map(|i| lambda.row(i)).collect();
    let letters: Vec<u32> = mu.rows().to_vec();
    add_letter(0, &letters, &shape, &vec![0; d], &mut acc);
    let mut out: Vec<(YoungDiagram, u64)> = acc
        .into_iter()
        .map(|(rows, c)| (YoungDiagram::new(&rows).expect("strips keep shapes valid"), c))
        .collect();
    out.sort_by(|a, b| b.0.cmp(&a.0));
    Ok(out)
}

fn add_letter(
    k: usize,
    letters: &[u32],
    shape: &[u32],
    prev: &[u32],
    acc: &mut BTreeMap<Vec<u32>, u64>,
) {
    if k == letters.len() {
        *acc.entry(shape.to_vec()).or_insert(0) += 1;
        return;
    }
    let d = shape.len();
    let mut strip = vec![0u32; d];
    strip_rows(0, letters[k], k > 0, shape, prev, &mut strip, 0, 0, &mut |strip| {
        let next: Vec<u32> = shape.iter().zip(strip).map(|(a, b)| a + b).collect();
        add_letter(k + 1, letters, &next, strip, acc);
    });
}

/// Distributes `left` boxes over rows `r..` as a horizontal strip on `shape`,
/// enforcing the lattice condition against the previous letter's strip.
#[allow(clippy::too_many_arguments)]
fn strip_rows(
    r: usize,
    left: u32,
    lattice: bool,
    shape: &[u32],
    prev: &[u32],
    strip: &mut Vec<u32>,
    cum_strip: u32,
    cum_prev_before: u32,
    emit: &mut dyn FnMut(&[u32]),
) {
    if left == 0 {
        for s in strip.iter_mut().skip(r) {
            *s = 0;
        }
        emit(strip);
        return;
    }
    if r == shape.len() {
        return;
    }
    let room = if r == 0 { left } else { shape[r - 1] - shape[r] };
    let mut hi = room.min(left);
    if lattice {
        // letters k+1 in rows <= r may not outnumber letters k in rows < r
        hi = hi.min(cum_prev_before.saturating_sub(cum_strip));
        if cum_strip > cum_prev_before {
            return;
        }
    }
    for t in (0..=hi).rev() {
        strip[r] = t;
        strip_rows(
            r + 1,
            left - t,
            lattice,
            shape,
            prev,
            strip,
            cum_strip + t,
            cum_prev_before + prev[r],
            emit,
        );
    }
    strip[r] = 0;
}

/// Single coefficient `c^nu_{lambda mu}` (zero unless box counts add up).
pub fn lr_coefficient(
    lambda: &YoungDiagram,
    mu: &YoungDiagram,
    nu: &YoungDiagram,
    d: usize,
) -> Result<u64, RepError> {
    if lambda.boxes() + mu.boxes() != nu.boxes() || nu.num_rows() > d {
        return Ok(0);
    }
    Ok(tensor_decompose(lambda, mu, d)?
        .into_iter()
        .find(|(n, _)| n == nu)
        .map_or(0, |(_, c)| c))
}

/// `sum_nu c^nu_{lambda mu} c^nu_{lambda2 mu2}`: the number of shared irreps of
/// `lambda (x) mu` and `lambda2 (x) mu2`, counted with multiplicity.
pub fn correlation_count(
    lambda: &YoungDiagram,
    lambda2: &YoungDiagram,
    mu: &YoungDiagram,
    mu2: &YoungDiagram,
    d: usize,
) -> Result<u64, RepError> {
    if lambda.boxes() + mu.boxes() != lambda2.boxes() + mu2.boxes() {
        return Ok(0);
    }
    let a = tensor_decompose(lambda, mu, d)?;
    let b: BTreeMap<YoungDiagram, u64> = tensor_decompose(lambda2, mu2, d)?.into_iter().collect();
    Ok(a.iter().map(|(nu, c)| c * b.get(nu).copied().unwrap_or(0)).sum())
}
