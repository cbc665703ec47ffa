use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::young::{enumerate_diagrams, YoungDiagram};
use super::RepError;

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Probability of outcome `lambda` when measuring the Schur-Weyl irrep label of
/// `s` copies of a maximally entangled qudit pair, exact.
///
/// With shifted rows `t_j = l_j + d - j`, the weight is
/// `s! / prod(t_j!) * d^-s * prod_{i<j} (t_i - t_j)^2 / prod_{j<d} j!`.
pub fn schur_weyl_probability(lambda: &YoungDiagram, s: u32, d: usize) -> Result<BigRational, RepError> {
    lambda.check_rows(d)?;
    if lambda.boxes() != s {
        return Err(RepError::BoxMismatch { expected: s, got: lambda.boxes() });
    }
    let t: Vec<u64> = (0..d).map(|j| lambda.row(j) as u64 + (d - 1 - j) as u64).collect();
    let mut num = factorial(s as u64);
    let mut den = BigUint::one();
    for &tj in &t {
        den *= factorial(tj);
    }
    for j in 1..d as u64 {
        den *= factorial(j);
    }
    den *= BigUint::from(d as u64).pow(s);
    for i in 0..d {
        for j in (i + 1)..d {
            let g = BigUint::from(t[i] - t[j]);
            num *= &g * &g;
        }
    }
    Ok(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// Full outcome distribution over `Y_s` with at most `d` rows.
pub fn schur_weyl_distribution(s: u32, d: usize) -> Result<Vec<(YoungDiagram, BigRational)>, RepError> {
    enumerate_diagrams(s, d)?
        .into_iter()
        .map(|l| {
            let p = schur_weyl_probability(&l, s, d)?;
            Ok((l, p))
        })
        .collect()
}

pub fn to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    r.to_f64().unwrap_or_else(|| {
        // both parts may overflow f64 individually
        let shift = r.denom().bits().max(r.numer().bits()) as i64 - 1000;
        let (n, dn) = if shift > 0 {
            (r.numer() >> shift as usize, r.denom() >> shift as usize)
        } else {
            (r.numer().clone(), r.denom().clone())
        };
        n.to_f64().unwrap() / dn.to_f64().unwrap()
    })
}
