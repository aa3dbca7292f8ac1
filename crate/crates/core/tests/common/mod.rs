#![allow(dead_code)]

use num_traits::ToPrimitive;
use qp_conformal::linalg::Matrix;
use qp_conformal::sampling::Sampler;
use qp_conformal::{diagonalize, hilbert_symbol, psi, Padic, Qp, QuadSpace, Result};

pub const PRIMES: [u64; 4] = [2, 3, 5, 7];

pub fn class_reps(qp: &Qp) -> Vec<i64> {
    qp.square_classes()
        .iter()
        .map(|c| c.representative(qp).to_i64().expect("small representative"))
        .collect()
}

fn valuation(p: i128, mut n: i128) -> u32 {
    if n == 0 {
        return u32::MAX;
    }
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Brute-force isotropy of `<coeffs>` for coefficients of valuation at most 1.
///
/// Searches primitive `x mod p^N` with `Q(x) = 0 mod p^N` and some partial
/// derivative `2 a_j x_j` of valuation below `N/2`; Hensel lifts such an `x`
/// to a true zero. Conversely a true primitive zero has a unit coordinate,
/// whose partial has valuation at most `v(2) + 1`, so `N = 2 v(2) + 3` is
/// enough. Only the first unit coordinate is normalised to 1.
pub fn brute_isotropic(p: u64, coeffs: &[i64]) -> bool {
    let p = p as i128;
    let n_digits: u32 = if p == 2 { 5 } else { 3 };
    let m = p.pow(n_digits);
    let a: Vec<i128> = coeffs.iter().map(|&c| c as i128).collect();
    let n = a.len();
    let mut x = vec![0i128; n];
    for lead in 0..n {
        // coordinates before `lead` are non-units, `x[lead] = 1`, the rest free
        let ranges: Vec<i128> = (0..n)
            .map(|j| match j.cmp(&lead) {
                std::cmp::Ordering::Less => m / p,
                std::cmp::Ordering::Equal => 1,
                std::cmp::Ordering::Greater => m,
            })
            .collect();
        let mut idx = vec![0i128; n];
        loop {
            for j in 0..n {
                x[j] = match j.cmp(&lead) {
                    std::cmp::Ordering::Less => idx[j] * p,
                    std::cmp::Ordering::Equal => 1,
                    std::cmp::Ordering::Greater => idx[j],
                };
            }
            let q: i128 = (0..n).map(|j| a[j] * x[j] * x[j]).sum();
            if q.rem_euclid(m) == 0 && (0..n).any(|j| valuation(p, 2 * a[j] * x[j]).saturating_mul(2) < n_digits) {
                return true;
            }
            let mut j = 0;
            while j < n {
                idx[j] += 1;
                if idx[j] < ranges[j] {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == n {
                break;
            }
        }
    }
    false
}

/// `(a, b) = 1` iff `a x^2 + b y^2 - z^2` has a nonzero zero.
pub fn brute_hilbert(p: u64, a: i64, b: i64) -> i8 {
    if brute_isotropic(p, &[a, b, -1]) {
        1
    } else {
        -1
    }
}

pub fn multisets(items: &[i64], k: usize) -> Vec<Vec<i64>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in multisets(&items[i..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

/// Census dimensions; dim 4 is skipped at `p = 7` where `7^9` points per form is too slow.
pub fn census_dims(p: u64) -> Vec<usize> {
    if p == 7 {
        vec![2, 3]
    } else {
        vec![2, 3, 4]
    }
}

pub fn hilbert_mismatches(qp: &Qp) -> Result<Vec<String>> {
    let reps = class_reps(qp);
    let mut bad = Vec::new();
    for &a in &reps {
        for &b in &reps {
            let got = hilbert_symbol(&qp.int(a), &qp.int(b))?;
            let want = brute_hilbert(qp.prime(), a, b);
            if got != want {
                bad.push(format!("p={} ({a},{b}): got {got}, brute force {want}", qp.prime()));
            }
        }
    }
    Ok(bad)
}

pub fn isotropy_mismatches(qp: &Qp) -> Result<Vec<String>> {
    let reps = class_reps(qp);
    let mut bad = Vec::new();
    for dim in census_dims(qp.prime()) {
        for coeffs in multisets(&reps, dim) {
            let got = QuadSpace::from_ints(qp, &coeffs)?.is_isotropic();
            let want = brute_isotropic(qp.prime(), &coeffs);
            if got != want {
                bad.push(format!("p={} {coeffs:?}: got {got}, brute force {want}", qp.prime()));
            }
        }
    }
    Ok(bad)
}

/// Field axioms, character and symbol identities on `n` seeded samples.
/// Returns the names of the identities that failed at least once.
pub fn field_failures(qp: &Qp, seed: u64, n: usize) -> Vec<String> {
    let mut sampler = Sampler::new(qp, seed);
    let mut bad = Vec::new();
    let mut note = |name: &str, r: Result<bool>| {
        if !matches!(r, Ok(true)) && !bad.iter().any(|b| b == name) {
            bad.push(name.to_string());
        }
    };
    for _ in 0..n {
        let a = sampler.nonzero_scalar();
        let b = sampler.nonzero_scalar();
        let c = sampler.nonzero_scalar();
        note("add_assoc", (|| Ok(a.add(&b)?.add(&c)? == a.add(&b.add(&c)?)?))());
        note("add_comm", (|| Ok(a.add(&b)? == b.add(&a)?))());
        note("mul_assoc", (|| Ok(a.mul(&b)?.mul(&c)? == a.mul(&b.mul(&c)?)?))());
        note("mul_comm", (|| Ok(a.mul(&b)? == b.mul(&a)?))());
        note("distributive", (|| Ok(a.mul(&b.add(&c)?)? == a.mul(&b)?.add(&a.mul(&c)?)?))());
        note("additive_inverse", (|| Ok(a.add(&a.neg())?.is_zero()))());
        note("multiplicative_inverse", (|| Ok(a.mul(&a.inv()?)? == qp.one()))());
        note("square_class_mul", (|| Ok(a.mul(&b)?.square_class()? == a.square_class()?.mul(&b.square_class()?)))());
        note(
            "sqrt_of_square",
            (|| Ok(matches!(a.square()?.sqrt()?, Some(r) if r.square()? == a.square()?)))(),
        );
        note("psi_additive", (|| Ok(psi(&a.add(&b)?)? == psi(&a)?.add(&psi(&b)?)))());
        note("hilbert_symmetric", (|| Ok(hilbert_symbol(&a, &b)? == hilbert_symbol(&b, &a)?))());
        note(
            "hilbert_bimultiplicative",
            (|| Ok(hilbert_symbol(&a.mul(&c)?, &b)? == hilbert_symbol(&a, &b)? * hilbert_symbol(&c, &b)?))(),
        );
        note("hilbert_a_minus_a", (|| Ok(hilbert_symbol(&a, &a.neg())? == 1))());
    }
    bad
}

fn random_symmetric(sampler: &mut Sampler, n: usize) -> Matrix {
    let qp = *sampler.field();
    let mut m = Matrix::zeros(&qp, n, n);
    for i in 0..n {
        for j in i..n {
            // sparse off-diagonal entries and some zero diagonals exercise the pivot swaps
            let x = if sampler.coin(1, 3) { qp.zero() } else { sampler.scalar() };
            m.set(i, j, x.clone());
            m.set(j, i, x);
        }
    }
    m
}

/// `H^r + kernel` as a Gram matrix.
fn witt_gram(qp: &Qp, index: usize, kernel: &QuadSpace) -> Matrix {
    let n = 2 * index + kernel.dim();
    let mut g = Matrix::zeros(qp, n, n);
    for i in 0..index {
        g.set(2 * i, 2 * i + 1, qp.one());
        g.set(2 * i + 1, 2 * i, qp.one());
    }
    for (k, a) in kernel.diag().iter().enumerate() {
        g.set(2 * index + k, 2 * index + k, a.clone());
    }
    g
}

/// Diagonalization congruence and Witt self-certification on `n` samples,
/// plus the fixed Witt-equivalence example.
pub fn quadspace_failures(qp: &Qp, seed: u64, n: usize) -> Vec<String> {
    let mut sampler = Sampler::new(qp, seed);
    let mut bad = Vec::new();
    let mut note = |name: &str, r: Result<bool>| {
        if !matches!(r, Ok(true)) && !bad.iter().any(|b| b == name) {
            bad.push(name.to_string());
        }
    };
    for i in 0..n {
        let dim = 1 + i % 6;
        let g = random_symmetric(&mut sampler, dim);
        note(
            "diagonalize_congruence",
            (|| {
                if g.det()?.is_zero() {
                    return Ok(true);
                }
                let (d, b) = diagonalize(&g)?;
                Ok(b.transpose().mul(&g)?.mul(&b)? == d.gram() && !b.det()?.is_zero())
            })(),
        );
        let diag: Vec<Padic> = (0..1 + i % 8).map(|_| sampler.nonzero_scalar()).collect();
        note(
            "witt_self_certification",
            (|| {
                let space = QuadSpace::new(qp, diag)?;
                let w = space.witt_decompose()?;
                let b = &w.basis_change;
                let congruent = b.transpose().mul(&space.gram())?.mul(b)? == witt_gram(qp, w.index, &w.kernel);
                Ok(congruent && w.index == space.witt_index() && !w.kernel.is_isotropic())
            })(),
        );
    }
    note(
        "witt_equivalent_hyperbolic",
        (|| QuadSpace::from_ints(qp, &[1, -1])?.witt_equivalent(&QuadSpace::from_ints(qp, &[1, -1, 1, -1])?))(),
    );
    bad
}
