//! Divisors, the gcd colouring rule and triangulation counts.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{invalid, GmlError, Result};

/// Divisors of `m` together with their complementary pairing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisorProfile {
    pub m: u64,
    pub divisors: Vec<u64>,
    /// Number of divisors other than 1 and m.
    pub nontrivial: usize,
    /// `(d, m / d)` with `d <= m / d`; a square's root appears as `(r, r)`.
    pub pairs: Vec<(u64, u64)>,
}

pub fn divisors(m: u64) -> Result<DivisorProfile> {
    if m < 2 {
        return Err(invalid(format!("divisors need m >= 2, got {m}")));
    }
    let mut low = Vec::new();
    let mut high = Vec::new();
    let mut d = 1u64;
    while d * d <= m {
        if m % d == 0 {
            low.push(d);
            if d * d != m {
                high.push(m / d);
            }
        }
        d += 1;
    }
    let pairs = low.iter().map(|&d| (d, m / d)).collect();
    let mut divisors = low;
    divisors.extend(high.into_iter().rev());
    let nontrivial = divisors.len() - 2;
    Ok(DivisorProfile {
        m,
        divisors,
        nontrivial,
        pairs,
    })
}

/// Twist class of `n` modulo `m`, always in `0..m`.
pub fn kappa(m: u64, n: i64) -> u64 {
    n.rem_euclid(m as i64) as u64
}

/// Number of distinct surface colours of a twisted prism with `m` sides and
/// twist `n`: `gcd(m, n mod m)`, or `m` when the twist is a multiple of `m`.
pub fn coloring_count(m: u64, n: i64) -> Result<u64> {
    if m < 2 {
        return Err(invalid(format!("coloring needs m >= 2, got {m}")));
    }
    let k = kappa(m, n);
    Ok(if k == 0 { m } else { m.gcd(&k) })
}

/// Triangulation count from the closed product form
/// `2 * 6 * 10 * ... * (4m - 10) / (m - 1)!`.
pub fn catalan_euler(m: u32) -> Result<BigUint> {
    if m < 3 {
        return Err(invalid(format!("catalan_euler needs m >= 3, got {m}")));
    }
    let mut num = BigUint::one();
    for i in 1..=(m as u64 - 2) {
        num *= 4 * i - 2;
    }
    let mut den = BigUint::one();
    for i in 2..=(m as u64 - 1) {
        den *= i;
    }
    let (q, r) = num.div_rem(&den);
    if !r.is_zero() {
        return Err(GmlError::Internal(format!(
            "product form for m={m} did not reduce to an integer"
        )));
    }
    Ok(q)
}

/// Triangulation count from the convolution recurrence with `E_2 = 1`.
pub fn catalan_segner(m: u32) -> Result<BigUint> {
    if m < 2 {
        return Err(invalid(format!("catalan_segner needs m >= 2, got {m}")));
    }
    let m = m as usize;
    // e[i] holds E_i; E_0 and E_1 are unused.
    let mut e: Vec<BigUint> = vec![BigUint::zero(); m + 1];
    e[2] = BigUint::one();
    for cur in 3..=m {
        let mut acc = BigUint::zero();
        for r in 2..cur {
            acc += &e[r] * &e[cur + 1 - r];
        }
        e[cur] = acc;
    }
    Ok(e[m].clone())
}

/// Largest polygon the exhaustive triangulation search accepts.
pub const BRUTEFORCE_MAX_M: u32 = 12;

/// Counts triangulations by enumerating sets of `m - 3` pairwise
/// non-crossing diagonals. Crossing is decided on vertex indices only.
pub fn count_triangulations_bruteforce(m: u32) -> Result<u64> {
    if m < 3 {
        return Err(invalid(format!("need m >= 3, got {m}")));
    }
    if m > BRUTEFORCE_MAX_M {
        return Err(GmlError::Budget(format!(
            "exhaustive triangulation search is limited to m <= {BRUTEFORCE_MAX_M}, got {m}"
        )));
    }
    let m = m as usize;
    let mut diagonals = Vec::new();
    for a in 0..m {
        for b in a + 2..m {
            if a == 0 && b == m - 1 {
                continue;
            }
            diagonals.push((a, b));
        }
    }
    let mut chosen = Vec::with_capacity(m);
    Ok(extend(&diagonals, 0, m - 3, &mut chosen))
}

fn crosses(p: (usize, usize), q: (usize, usize)) -> bool {
    let (a, b) = p;
    let (c, d) = q;
    (a < c && c < b && b < d) || (c < a && a < d && d < b)
}

fn extend(
    diagonals: &[(usize, usize)],
    start: usize,
    need: usize,
    chosen: &mut Vec<(usize, usize)>,
) -> u64 {
    if chosen.len() == need {
        return 1;
    }
    let mut total = 0;
    for idx in start..diagonals.len() {
        // Not enough candidates left to reach `need`.
        if diagonals.len() - idx < need - chosen.len() {
            break;
        }
        let d = diagonals[idx];
        if chosen.iter().all(|&c| !crosses(c, d)) {
            chosen.push(d);
            total += extend(diagonals, idx + 1, need, chosen);
            chosen.pop();
        }
    }
    total
}
