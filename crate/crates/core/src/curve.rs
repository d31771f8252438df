//! Integral Weierstrass models y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6
//! over the rationals: exact invariants, coordinate changes, local minimal
//! models, and point counts over small prime fields.

use std::fmt;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{divides, exact_div, inv_mod, is_probable_prime, umod, val_at_least, valuation};
use crate::error::{Error, Result};

pub type Rational = Ratio<BigInt>;

/// Largest prime accepted by [`WeierstrassCurve::count_points_mod`]; the
/// counting loop is O(ℓ) so huge moduli are refused rather than hang.
pub const MAX_POINT_COUNT_PRIME: u64 = 1 << 24;

/// A nonsingular integral Weierstrass model; the coefficient array is
/// `[a1, a2, a3, a4, a6]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WeierstrassCurve {
    a: [BigInt; 5],
}

/// The standard quantities attached to a Weierstrass model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariants {
    pub b2: BigInt,
    pub b4: BigInt,
    pub b6: BigInt,
    pub b8: BigInt,
    pub c4: BigInt,
    pub c6: BigInt,
    pub disc: BigInt,
    pub j: Rational,
}

/// Change-of-coordinates data (u, r, s, t): x = u²x' + r,
/// y = u³y' + u²s·x' + t.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsomorphismData {
    u: Rational,
    r: Rational,
    s: Rational,
    t: Rational,
}

impl fmt::Display for WeierstrassCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{},{},{},{},{}]",
            self.a[0], self.a[1], self.a[2], self.a[3], self.a[4]
        )
    }
}

impl fmt::Debug for WeierstrassCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeierstrassCurve{self}")
    }
}

impl WeierstrassCurve {
    pub fn new(ainvs: [BigInt; 5]) -> Result<Self> {
        let curve = WeierstrassCurve { a: ainvs };
        if curve.disc().is_zero() {
            return Err(Error::SingularModel);
        }
        Ok(curve)
    }

    pub fn from_i64(ainvs: [i64; 5]) -> Result<Self> {
        Self::new(ainvs.map(BigInt::from))
    }

    pub fn ainvs(&self) -> &[BigInt; 5] {
        &self.a
    }

    pub fn a1(&self) -> &BigInt {
        &self.a[0]
    }
    pub fn a2(&self) -> &BigInt {
        &self.a[1]
    }
    pub fn a3(&self) -> &BigInt {
        &self.a[2]
    }
    pub fn a4(&self) -> &BigInt {
        &self.a[3]
    }
    pub fn a6(&self) -> &BigInt {
        &self.a[4]
    }

    fn b_invariants(&self) -> (BigInt, BigInt, BigInt, BigInt) {
        let [a1, a2, a3, a4, a6] = &self.a;
        let b2 = a1 * a1 + BigInt::from(4) * a2;
        let b4 = BigInt::from(2) * a4 + a1 * a3;
        let b6 = a3 * a3 + BigInt::from(4) * a6;
        let b8 = a1 * a1 * a6 + BigInt::from(4) * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        (b2, b4, b6, b8)
    }

    fn disc(&self) -> BigInt {
        let (b2, b4, b6, b8) = self.b_invariants();
        -&b2 * &b2 * &b8 - BigInt::from(8) * &b4 * &b4 * &b4 - BigInt::from(27) * &b6 * &b6
            + BigInt::from(9) * &b2 * &b4 * &b6
    }

    pub fn invariants(&self) -> Invariants {
        let (b2, b4, b6, b8) = self.b_invariants();
        let c4 = &b2 * &b2 - BigInt::from(24) * &b4;
        let c6 = -&b2 * &b2 * &b2 + BigInt::from(36) * &b2 * &b4 - BigInt::from(216) * &b6;
        let disc = self.disc();
        let j = Ratio::new(&c4 * &c4 * &c4, disc.clone());
        Invariants {
            b2,
            b4,
            b6,
            b8,
            c4,
            c6,
            disc,
            j,
        }
    }

    /// Apply a coordinate change. Fails if any resulting coefficient is not
    /// an integer; the model stays nonsingular automatically.
    pub fn transform(&self, iso: &IsomorphismData) -> Result<Self> {
        let [a1, a2, a3, a4, a6] = self.a.clone().map(Ratio::from_integer);
        let (u, r, s, t) = (&iso.u, &iso.r, &iso.s, &iso.t);
        let two = Ratio::from_integer(BigInt::from(2));
        let three = Ratio::from_integer(BigInt::from(3));

        let na1 = (&a1 + &two * s) / u;
        let u2 = u * u;
        let na2 = (&a2 - s * &a1 + &three * r - s * s) / &u2;
        let u3 = &u2 * u;
        let na3 = (&a3 + r * &a1 + &two * t) / &u3;
        let u4 = &u2 * &u2;
        let na4 = (&a4 - s * &a3 + &two * (r * &a2) - (t + r * s) * &a1 + &three * (r * r)
            - &two * (s * t))
            / &u4;
        let u6 = &u3 * &u3;
        let na6 = (&a6 + r * &a4 + r * r * &a2 + r * r * r - t * &a3 - t * t - r * t * &a1) / &u6;

        let coeffs = [na1, na2, na3, na4, na6];
        if coeffs.iter().any(|c| !c.is_integer()) {
            return Err(Error::NonIntegralModel);
        }
        WeierstrassCurve::new(coeffs.map(|c| c.to_integer()))
    }

    /// Integral shift (u = 1): never fails, never changes the discriminant.
    pub(crate) fn shift(&self, r: &BigInt, s: &BigInt, t: &BigInt) -> Self {
        let [a1, a2, a3, a4, a6] = &self.a;
        let na1 = a1 + BigInt::from(2) * s;
        let na2 = a2 - s * a1 + BigInt::from(3) * r - s * s;
        let na3 = a3 + r * a1 + BigInt::from(2) * t;
        let na4 = a4 - s * a3 + BigInt::from(2) * r * a2 - (t + r * s) * a1
            + BigInt::from(3) * r * r
            - BigInt::from(2) * s * t;
        let na6 = a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1;
        WeierstrassCurve {
            a: [na1, na2, na3, na4, na6],
        }
    }

    /// Scale down by u = p: each aᵢ must be divisible by pⁱ.
    pub(crate) fn scale_down(&self, p: &BigInt) -> Result<Self> {
        let powers = [1u32, 2, 3, 4, 6];
        let mut out = self.a.clone();
        for (ai, k) in out.iter_mut().zip(powers) {
            *ai = exact_div(ai, &p.pow(k)).map_err(|_| Error::NonIntegralModel)?;
        }
        Ok(WeierstrassCurve { a: out })
    }

    /// A p-minimal model of this curve together with the coordinate change
    /// that produces it (identity when the input is already minimal).
    pub fn minimal_model_at(&self, p: &BigInt) -> Result<(Self, IsomorphismData)> {
        if !is_probable_prime(p) {
            return Err(Error::NotPrime(p.clone()));
        }
        let mut cur = self.clone();
        let mut iso = IsomorphismData::identity();
        loop {
            match try_reduce_once(&cur, p)? {
                Some((next, step)) => {
                    iso = iso.compose(&step);
                    cur = next;
                }
                None => return Ok((cur, iso)),
            }
        }
    }

    /// Point count of the reduction mod ℓ (good reduction required), plus
    /// the trace of Frobenius a_ℓ = ℓ + 1 − count.
    pub fn count_points_mod(&self, ell: u64) -> Result<(u64, i64)> {
        let ell_big = BigInt::from(ell);
        if !is_probable_prime(&ell_big) {
            return Err(Error::NotPrime(ell_big));
        }
        if ell > MAX_POINT_COUNT_PRIME {
            return Err(Error::ModulusTooLarge(ell));
        }
        let (min, _) = self.minimal_model_at(&ell_big)?;
        if divides(&ell_big, &min.disc()) {
            return Err(Error::BadReduction(ell));
        }
        let count = if ell == 2 {
            let a: Vec<u64> = min
                .a
                .iter()
                .map(|x| umod(x, &ell_big).to_u64().unwrap())
                .collect();
            let mut affine = 0;
            for x in 0..2u64 {
                for y in 0..2u64 {
                    let lhs = y * y + a[0] * x * y + a[2] * y;
                    let rhs = x * x * x + a[1] * x * x + a[3] * x + a[4];
                    if (lhs + rhs).is_multiple_of(2) {
                        affine += 1;
                    }
                }
            }
            1 + affine
        } else {
            let (b2, b4, b6, _) = min.b_invariants();
            let b2 = umod(&b2, &ell_big).to_u64().unwrap();
            let b4 = umod(&b4, &ell_big).to_u64().unwrap();
            let b6 = umod(&b6, &ell_big).to_u64().unwrap();
            let mut is_square = vec![false; ell as usize];
            for y in 0..ell {
                is_square[((y * y) % ell) as usize] = true;
            }
            // complete the square: (2y + a1·x + a3)² = 4x³ + b2·x² + 2b4·x + b6
            let mut count = 1u64;
            for x in 0..ell {
                let g = (((4 * x + b2) % ell * x + 2 * b4) % ell * x + b6) % ell;
                if g == 0 {
                    count += 1;
                } else if is_square[g as usize] {
                    count += 2;
                }
            }
            count
        };
        let a_ell = ell as i64 + 1 - count as i64;
        Ok((count, a_ell))
    }
}

impl IsomorphismData {
    pub fn new(u: Rational, r: Rational, s: Rational, t: Rational) -> Result<Self> {
        if u.is_zero() {
            return Err(Error::ZeroScale);
        }
        Ok(IsomorphismData { u, r, s, t })
    }

    pub fn from_integers(u: i64, r: i64, s: i64, t: i64) -> Result<Self> {
        let q = |n: i64| Ratio::from_integer(BigInt::from(n));
        Self::new(q(u), q(r), q(s), q(t))
    }

    pub fn identity() -> Self {
        Self::from_integers(1, 0, 0, 0).unwrap()
    }

    pub(crate) fn rescale(u: &BigInt) -> Self {
        IsomorphismData {
            u: Ratio::from_integer(u.clone()),
            r: Ratio::zero(),
            s: Ratio::zero(),
            t: Ratio::zero(),
        }
    }

    pub(crate) fn from_shift(r: &BigInt, s: &BigInt, t: &BigInt) -> Self {
        IsomorphismData {
            u: Ratio::one(),
            r: Ratio::from_integer(r.clone()),
            s: Ratio::from_integer(s.clone()),
            t: Ratio::from_integer(t.clone()),
        }
    }

    pub fn u(&self) -> &Rational {
        &self.u
    }
    pub fn r(&self) -> &Rational {
        &self.r
    }
    pub fn s(&self) -> &Rational {
        &self.s
    }
    pub fn t(&self) -> &Rational {
        &self.t
    }

    /// The change equivalent to applying `self` first, then `next`.
    pub fn compose(&self, next: &IsomorphismData) -> Self {
        let (u1, r1, s1, t1) = (&self.u, &self.r, &self.s, &self.t);
        let (u2, r2, s2, t2) = (&next.u, &next.r, &next.s, &next.t);
        let u1sq = u1 * u1;
        IsomorphismData {
            u: u1 * u2,
            r: r1 + &u1sq * r2,
            s: s1 + u1 * s2,
            t: t1 + &u1sq * s1 * r2 + &u1sq * u1 * t2,
        }
    }

    pub fn inverse(&self) -> Self {
        let (u, r, s, t) = (&self.u, &self.r, &self.s, &self.t);
        let u2 = u * u;
        IsomorphismData {
            u: Ratio::one() / u,
            r: -(r / &u2),
            s: -(s / u),
            t: (r * s - t) / (&u2 * u),
        }
    }
}

/// One reduction step at p, or None if the model is p-minimal.
fn try_reduce_once(
    e: &WeierstrassCurve,
    p: &BigInt,
) -> Result<Option<(WeierstrassCurve, IsomorphismData)>> {
    let inv = e.invariants();
    // necessary conditions at every p: u = p scales c4, c6, Δ down by
    // p⁴, p⁶, p¹²
    if !val_at_least(&inv.disc, p, 12)
        || !val_at_least(&inv.c4, p, 4)
        || !val_at_least(&inv.c6, p, 6)
    {
        return Ok(None);
    }
    if *p >= BigInt::from(5) {
        // the valuation conditions are sufficient for p ≥ 5: clear a1, a2, a3
        // modulo a high power of p, then scale
        let n = p.pow(6);
        let inv2 = inv_mod(&BigInt::from(2), &n).expect("2 invertible");
        let inv12 = inv_mod(&BigInt::from(12), &n).expect("12 invertible");

        let s = umod(&(-e.a1() * &inv2), &n);
        let mut cur = e.shift(&BigInt::zero(), &s, &BigInt::zero());
        let (b2, ..) = cur.b_invariants();
        let r = umod(&(-&b2 * &inv12), &n);
        cur = cur.shift(&r, &BigInt::zero(), &BigInt::zero());
        let t = umod(&(-cur.a3() * &inv2), &n);
        cur = cur.shift(&BigInt::zero(), &BigInt::zero(), &t);

        let scaled = cur.scale_down(p).map_err(|_| {
            Error::Internal("valuation conditions promised a reducible model".into())
        })?;
        let step = IsomorphismData::from_shift(&BigInt::zero(), &s, &BigInt::zero())
            .compose(&IsomorphismData::from_shift(
                &r,
                &BigInt::zero(),
                &BigInt::zero(),
            ))
            .compose(&IsomorphismData::from_shift(
                &BigInt::zero(),
                &BigInt::zero(),
                &t,
            ))
            .compose(&IsomorphismData::rescale(p));
        return Ok(Some((scaled, step)));
    }
    // p = 2, 3: the valuation conditions are necessary but not sufficient;
    // search integral shifts. (r, s, t) can be normalized into
    // r, t ∈ [0, p³), s ∈ [0, p) without loss of generality.
    let ps = p.to_u64().unwrap();
    let cube = ps * ps * ps;
    for s in 0..ps {
        let s = BigInt::from(s);
        for r in 0..cube {
            let r = BigInt::from(r);
            for t in 0..cube {
                let t = BigInt::from(t);
                let cand = e.shift(&r, &s, &t);
                if let Ok(scaled) = cand.scale_down(p) {
                    let step = IsomorphismData::from_shift(&r, &s, &t)
                        .compose(&IsomorphismData::rescale(p));
                    return Ok(Some((scaled, step)));
                }
            }
        }
    }
    Ok(None)
}

/// p-adic valuation helpers shared with the reduction-type machinery.
pub(crate) fn curve_disc_valuation(e: &WeierstrassCurve, p: &BigInt) -> u32 {
    let d = e.disc();
    if divides(p, &d) {
        valuation(&d, p)
    } else {
        0
    }
}
