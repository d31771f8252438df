//! Exact integer utilities: valuations, modular arithmetic, primality
//! testing, factorization by trial division, and root counting of small
//! polynomials over prime fields.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Trial-division ceiling: factors above this must be certified prime or the
/// factorization is rejected.
pub(crate) const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

/// p-adic valuation of a nonzero integer.
pub(crate) fn valuation(x: &BigInt, p: &BigInt) -> u32 {
    debug_assert!(!x.is_zero(), "valuation of zero is undefined");
    let mut x = x.clone();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}

/// True when x = 0 or v_p(x) >= k (zero counts as infinite valuation).
pub(crate) fn val_at_least(x: &BigInt, p: &BigInt, k: u32) -> bool {
    if x.is_zero() {
        return true;
    }
    let mut x = x.clone();
    for _ in 0..k {
        let (q, r) = x.div_rem(p);
        if !r.is_zero() {
            return false;
        }
        x = q;
    }
    true
}

/// Least nonnegative residue of x mod m (m > 0).
pub(crate) fn umod(x: &BigInt, m: &BigInt) -> BigInt {
    let r = x % m;
    if r.is_negative() {
        r + m
    } else {
        r
    }
}

pub(crate) fn divides(d: &BigInt, x: &BigInt) -> bool {
    (x % d).is_zero()
}

/// Exact division; any remainder indicates a broken loop invariant upstream.
pub(crate) fn exact_div(x: &BigInt, d: &BigInt) -> Result<BigInt> {
    let (q, r) = x.div_rem(d);
    if r.is_zero() {
        Ok(q)
    } else {
        Err(Error::Internal(format!("{d} does not divide {x} exactly")))
    }
}

/// Inverse of a modulo m when gcd(a, m) = 1.
pub(crate) fn inv_mod(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(umod(&e.x, m))
    } else {
        None
    }
}

/// Deterministic Miller–Rabin for n below 3.3·10^24; a strong probable-prime
/// test with the same witness set beyond that.
pub(crate) fn is_probable_prime(n: &BigInt) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if *n < BigInt::from(2) {
        return false;
    }
    for &q in &WITNESSES {
        let q = BigInt::from(q);
        if *n == q {
            return true;
        }
        if divides(&q, n) {
            return false;
        }
    }
    let one = BigInt::one();
    let two = BigInt::from(2);
    let n_minus_1 = n - &one;
    let s = valuation(&n_minus_1, &two);
    let d = &n_minus_1 >> s;
    'witness: for &a in &WITNESSES {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Factor |n| (n nonzero) into (prime, exponent) pairs with ascending primes.
/// Trial division up to 10^6 plus a primality certificate on the cofactor;
/// composite cofactors with no small factor are reported as an error rather
/// than silently mis-factored.
pub(crate) fn factor(n: &BigInt) -> Result<Vec<(BigInt, u32)>> {
    if n.is_zero() {
        return Err(Error::Internal("factorization of zero requested".into()));
    }
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    let m = n.abs();
    if m.is_one() {
        return Ok(out);
    }
    if let Some(m64) = m.to_u64() {
        factor_u64(m64, &mut out)?;
        return Ok(out);
    }

    let mut m = m;
    let mut d: u64 = 2;
    while d <= TRIAL_DIVISION_BOUND {
        if is_probable_prime(&m) {
            out.push((m, 1));
            return Ok(out);
        }
        let db = BigInt::from(d);
        if &db * &db > m {
            break;
        }
        if divides(&db, &m) {
            let mut e = 0;
            while divides(&db, &m) {
                m = exact_div(&m, &db)?;
                e += 1;
            }
            out.push((db, e));
            if m.is_one() {
                return Ok(out);
            }
            // the quotient may now fit in machine words
            if let Some(m64) = m.to_u64() {
                factor_u64(m64, &mut out)?;
                return Ok(out);
            }
        }
        d = if d == 2 { 3 } else { d + 2 };
    }
    if m.is_one() {
        Ok(out)
    } else if is_probable_prime(&m) {
        out.push((m, 1));
        Ok(out)
    } else {
        Err(Error::FactorizationFailed(m))
    }
}

fn factor_u64(mut m: u64, out: &mut Vec<(BigInt, u32)>) -> Result<()> {
    let mut d: u64 = 2;
    while d <= TRIAL_DIVISION_BOUND && (d as u128) * (d as u128) <= m as u128 {
        if m.is_multiple_of(d) {
            let mut e = 0;
            while m.is_multiple_of(d) {
                m /= d;
                e += 1;
            }
            out.push((BigInt::from(d), e));
        }
        d = if d == 2 { 3 } else { d + 2 };
    }
    if m > 1 {
        if (d as u128) * (d as u128) > m as u128 || is_probable_prime(&BigInt::from(m)) {
            out.push((BigInt::from(m), 1));
        } else {
            return Err(Error::FactorizationFailed(BigInt::from(m)));
        }
    }
    Ok(())
}

/// Primes up to and including `bound`, by sieve.
pub(crate) fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&i| sieve[i]).map(|i| i as u64).collect()
}

/// Number of roots of A·y² + B·y + C over F_p, counted without multiplicity.
/// For odd p the leading coefficient must be a p-unit.
pub(crate) fn quad_roots_count(a: &BigInt, b: &BigInt, c: &BigInt, p: &BigInt) -> u32 {
    let two = BigInt::from(2);
    if *p == two {
        let mut count = 0;
        for y in 0..2u32 {
            let y = BigInt::from(y);
            let val = a * &y * &y + b * &y + c;
            if divides(&two, &val) {
                count += 1;
            }
        }
        return count;
    }
    debug_assert!(!divides(p, a), "leading coefficient must be invertible");
    let disc = b * b - BigInt::from(4) * a * c;
    let disc = umod(&disc, p);
    if disc.is_zero() {
        1
    } else {
        // Euler's criterion
        let exp = (p - BigInt::one()) >> 1;
        if disc.modpow(&exp, p).is_one() {
            2
        } else {
            0
        }
    }
}

/// Number of distinct roots of T³ + b·T² + c·T + d over F_p. Small p by
/// enumeration; otherwise as deg gcd(T^p − T, f) over F_p[T].
pub(crate) fn cubic_roots_count(b: &BigInt, c: &BigInt, d: &BigInt, p: &BigInt) -> u32 {
    if let Some(ps) = p.to_u64() {
        if ps < 600 {
            let mut count = 0;
            for t in 0..ps {
                let t = BigInt::from(t);
                let val = (&t * &t * &t) + b * &t * &t + c * &t + d;
                if divides(p, &val) {
                    count += 1;
                }
            }
            return count;
        }
    }
    let f = vec![umod(d, p), umod(c, p), umod(b, p), BigInt::one()];
    // T^p mod f by square-and-multiply over the bits of p
    let mut acc = vec![BigInt::one()]; // 1
    let mut base = vec![BigInt::zero(), BigInt::one()]; // T
    let bits = p.bits();
    for i in (0..bits).rev() {
        acc = poly_mulmod(&acc, &acc, &f, p);
        if p.bit(i) {
            acc = poly_mulmod(&acc, &base, &f, p);
        }
    }
    // T^p − T
    while acc.len() < 2 {
        acc.push(BigInt::zero());
    }
    acc[1] = umod(&(&acc[1] - BigInt::one()), p);
    trim(&mut acc);
    base = f.clone();
    let g = poly_gcd(acc, base, p);
    (g.len().max(1) - 1) as u32
}

fn trim(a: &mut Vec<BigInt>) {
    while a.last().is_some_and(|x| x.is_zero()) {
        a.pop();
    }
}

/// (a · b) mod f over F_p, f monic.
fn poly_mulmod(a: &[BigInt], b: &[BigInt], f: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            prod[i + j] = umod(&(&prod[i + j] + ai * bj), p);
        }
    }
    // reduce by monic f
    let deg_f = f.len() - 1;
    while prod.len() > deg_f {
        let lead = prod.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let k = prod.len() - deg_f; // subtract lead · T^k · f
        for (i, fi) in f.iter().take(deg_f).enumerate() {
            prod[k + i] = umod(&(&prod[k + i] - &lead * fi), p);
        }
    }
    trim(&mut prod);
    prod
}

/// gcd over F_p[T]; returned monic (or empty for gcd of zeros).
fn poly_gcd(mut a: Vec<BigInt>, mut b: Vec<BigInt>, p: &BigInt) -> Vec<BigInt> {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(lead) = a.last().cloned() {
        if !lead.is_one() {
            let inv = inv_mod(&lead, p).expect("leading coefficient invertible mod prime");
            for x in &mut a {
                *x = umod(&(&*x * &inv), p);
            }
        }
    }
    a
}

fn poly_rem(a: &[BigInt], b: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    let mut r = a.to_vec();
    trim(&mut r);
    let deg_b = b.len() - 1;
    let inv_lead = inv_mod(b.last().unwrap(), p).expect("leading coefficient invertible mod prime");
    while r.len() > deg_b {
        let lead = umod(&(r.last().unwrap() * &inv_lead), p);
        let k = r.len() - 1 - deg_b;
        if !lead.is_zero() {
            for (i, bi) in b.iter().enumerate() {
                r[k + i] = umod(&(&r[k + i] - &lead * bi), p);
            }
        }
        r.pop();
        trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    r
}
