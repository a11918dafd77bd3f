//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use ptolemy_core::{LaurentPoly, Quiver, Seed, SeedError};
use rand::RngExt;

/// Largest estimated numerator size, in terms, that a guarded mutation may build.
pub const TERM_BUDGET: f64 = 1e6;

/// Random skew-symmetric quiver with `1..=max_n` vertices and |b_ij| <= bmax.
pub fn random_quiver<R: RngExt>(rng: &mut R, max_n: usize, bmax: i64) -> Quiver {
    let n = rng.random_range(1..=max_n);
    let mut b = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = rng.random_range(-bmax..=bmax);
            b[i][j] = w;
            b[j][i] = -w;
        }
    }
    Quiver::from_matrix(&b, &[]).expect("skew-symmetric")
}

/// Mutation written straight from the matrix formula, no shared code.
pub fn mutate_oracle(b: &[Vec<i64>], k: usize) -> Vec<Vec<i64>> {
    let n = b.len();
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = if i == k || j == k {
                -b[i][j]
            } else {
                b[i][j] + (b[i][k].abs() * b[k][j] + b[i][k] * b[k][j].abs()) / 2
            };
        }
    }
    out
}

fn ln_multiset_bound(terms: usize, e: u32) -> f64 {
    // ln C(t + e - 1, e): monomials in a t-term polynomial raised to e
    (0..e as usize).map(|i| ((terms + i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// Upper bound on the term count of the exchange numerator at `k`.
pub fn numerator_estimate(s: &Seed, k: usize) -> f64 {
    let q = s.quiver();
    let mut ln_in = 0.0;
    let mut ln_out = 0.0;
    for i in 0..q.n() {
        let terms = s.var(i).num_terms();
        if q.b(i, k) > 0 {
            ln_in += ln_multiset_bound(terms, q.b(i, k) as u32);
        }
        if q.b(k, i) > 0 {
            ln_out += ln_multiset_bound(terms, q.b(k, i) as u32);
        }
    }
    ln_in.exp() + ln_out.exp()
}

/// Outcome of a mutation sequence run under the term budget.
pub enum Guarded {
    Done(Vec<Seed>),
    OverBudget,
    Failed(SeedError),
}

/// Mutates along `seq`, keeping every intermediate seed, and stops with
/// `OverBudget` before any step whose estimate exceeds the budget.
pub fn run_guarded(start: &Seed, seq: &[usize]) -> Guarded {
    let mut trail = vec![start.clone()];
    for &k in seq {
        let cur = trail.last().unwrap();
        if numerator_estimate(cur, k) > TERM_BUDGET {
            return Guarded::OverBudget;
        }
        match cur.mutate(k) {
            Ok(next) => trail.push(next),
            Err(e) => return Guarded::Failed(e),
        }
    }
    Guarded::Done(trail)
}

/// Exchange numerator built from the quiver independently of the seed code.
pub fn exchange_numerator(s: &Seed, k: usize) -> LaurentPoly {
    let q = s.quiver();
    let n = q.n();
    let mut plus = LaurentPoly::one(n);
    let mut minus = LaurentPoly::one(n);
    for i in 0..n {
        let w = q.b(i, k);
        if w > 0 {
            plus = &plus * &s.var(i).pow(w as u32);
        } else if w < 0 {
            minus = &minus * &s.var(i).pow((-w) as u32);
        }
    }
    &plus + &minus
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Catalan number C(k) = binom(2k, k) / (k + 1).
pub fn catalan(k: u64) -> u64 {
    let mut c: u64 = 1;
    for i in 0..k {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c
}

/// Triangulation count of the m-gon by brute force over diagonal subsets,
/// with its own crossing test.
pub fn brute_force_triangulation_count(m: usize) -> usize {
    let mut diags = Vec::new();
    for i in 1..=m {
        for j in i + 2..=m {
            if !(i == 1 && j == m) {
                diags.push((i, j));
            }
        }
    }
    let cross = |(a, b): (usize, usize), (c, d): (usize, usize)| (a < c && c < b && b < d) || (c < a && a < d && d < b);
    let need = m - 3;
    let mut count = 0;
    for mask in 0u64..(1u64 << diags.len()) {
        if mask.count_ones() as usize != need {
            continue;
        }
        let chosen: Vec<_> = (0..diags.len()).filter(|i| mask >> i & 1 == 1).map(|i| diags[i]).collect();
        if chosen.iter().enumerate().all(|(i, &a)| chosen[i + 1..].iter().all(|&b| !cross(a, b))) {
            count += 1;
        }
    }
    count
}
