//! Local reduction data of elliptic curves over ℚ: Kodaira symbol, conductor
//! exponent, Tamagawa number, and the component group of the special fiber
//! with its Frobenius action, by Tate's algorithm on a minimal model.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{
    cubic_roots_count, divides, exact_div, factor, inv_mod, is_probable_prime, quad_roots_count,
    umod, val_at_least,
};
use crate::curve::{curve_disc_valuation, WeierstrassCurve};
use crate::error::{Error, Result};
use crate::group::{ComponentGroupModel, FiniteAbelianGroup, GroupAutomorphism};

/// Kodaira symbol of the special fiber. `In(0)` is good reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KodairaType {
    In(u32),
    II,
    III,
    IV,
    IStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl KodairaType {
    pub fn is_good(&self) -> bool {
        matches!(self, KodairaType::In(0))
    }

    pub fn is_multiplicative(&self) -> bool {
        matches!(self, KodairaType::In(n) if *n > 0)
    }
}

impl fmt::Display for KodairaType {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KodairaType::In(n) => write!(out, "I{n}"),
            KodairaType::II => write!(out, "II"),
            KodairaType::III => write!(out, "III"),
            KodairaType::IV => write!(out, "IV"),
            KodairaType::IStar(n) => write!(out, "I{n}*"),
            KodairaType::IVStar => write!(out, "IV*"),
            KodairaType::IIIStar => write!(out, "III*"),
            KodairaType::IIStar => write!(out, "II*"),
        }
    }
}

impl FromStr for KodairaType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadKodairaSymbol(s.to_string());
        if let Some(body) = s.strip_suffix('*') {
            return match body {
                "II" => Ok(KodairaType::IIStar),
                "III" => Ok(KodairaType::IIIStar),
                "IV" => Ok(KodairaType::IVStar),
                _ => {
                    let digits = body.strip_prefix('I').ok_or_else(bad)?;
                    Ok(KodairaType::IStar(digits.parse().map_err(|_| bad())?))
                }
            };
        }
        match s {
            "II" => Ok(KodairaType::II),
            "III" => Ok(KodairaType::III),
            "IV" => Ok(KodairaType::IV),
            _ => {
                let digits = s.strip_prefix('I').ok_or_else(bad)?;
                Ok(KodairaType::In(digits.parse().map_err(|_| bad())?))
            }
        }
    }
}

/// Reduction type of the special fiber; multiplicative reduction is split
/// when the two tangent directions at the node are rational.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReductionKind {
    Good,
    SplitMultiplicative,
    NonsplitMultiplicative,
    Additive,
}

impl ReductionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ReductionKind::Good => "good",
            ReductionKind::SplitMultiplicative => "split",
            ReductionKind::NonsplitMultiplicative => "nonsplit",
            ReductionKind::Additive => "additive",
        }
    }
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.write_str(self.as_str())
    }
}

/// Everything this crate knows about a curve at one prime, computed on a
/// p-minimal model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalData {
    pub p: BigInt,
    pub kodaira: KodairaType,
    pub kind: ReductionKind,
    /// Conductor exponent f_p.
    pub f: u32,
    /// Tamagawa number c_p, the number of Frobenius-fixed components.
    pub c: u64,
    /// Valuation of the minimal discriminant.
    pub v_disc: u32,
    /// Component group Φ of the special fiber with its Frobenius action.
    pub phi: ComponentGroupModel,
}

/// Run Tate's algorithm for `curve` at the prime `p`.
pub fn tate_local_data(curve: &WeierstrassCurve, p: &BigInt) -> Result<LocalData> {
    if !is_probable_prime(p) {
        return Err(Error::NotPrime(p.clone()));
    }
    let (mut model, _) = curve.minimal_model_at(p)?;
    loop {
        match classify_step(&model, p)? {
            StepResult::Done(data) => return Ok(data),
            // classical fallback for a non-minimal model; unreachable after
            // the minimalization above, but keeps the loop well-founded
            StepResult::ScaleDown(smaller) => model = smaller,
        }
    }
}

/// Reduction type at `p` (the kind field of the full local data).
pub fn reduction_kind(curve: &WeierstrassCurve, p: &BigInt) -> Result<ReductionKind> {
    Ok(tate_local_data(curve, p)?.kind)
}

/// Primes of bad reduction, ascending. Determined by the minimal
/// discriminant, so non-minimal input models are fine.
pub fn bad_primes(curve: &WeierstrassCurve) -> Result<Vec<BigInt>> {
    let disc = curve.invariants().disc;
    let mut out = Vec::new();
    for (p, _) in factor(&disc)? {
        let (minimal, _) = curve.minimal_model_at(&p)?;
        if curve_disc_valuation(&minimal, &p) > 0 {
            out.push(p);
        }
    }
    Ok(out)
}

/// Local data at every bad prime, ascending by prime.
pub fn all_local_data(curve: &WeierstrassCurve) -> Result<Vec<LocalData>> {
    bad_primes(curve)?
        .iter()
        .map(|p| tate_local_data(curve, p))
        .collect()
}

/// The conductor N = ∏ p^{f_p}.
pub fn conductor(curve: &WeierstrassCurve) -> Result<BigInt> {
    let mut n = BigInt::one();
    for data in all_local_data(curve)? {
        n *= data.p.pow(data.f);
    }
    Ok(n)
}

enum StepResult {
    Done(LocalData),
    ScaleDown(WeierstrassCurve),
}

/// One pass of Tate's algorithm over a model assumed p-minimal. Shifts the
/// model step by step (singular point to the origin, then deeper
/// normalizations) and classifies as soon as a test discriminates.
fn classify_step(start: &WeierstrassCurve, p: &BigInt) -> Result<StepResult> {
    let n = curve_disc_valuation(start, p);
    if n == 0 {
        return Ok(StepResult::Done(LocalData {
            p: p.clone(),
            kodaira: KodairaType::In(0),
            kind: ReductionKind::Good,
            f: 0,
            c: 1,
            v_disc: 0,
            phi: ComponentGroupModel::trivial(),
        }));
    }
    let done = |kodaira, kind, f, c, phi| {
        Ok(StepResult::Done(LocalData {
            p: p.clone(),
            kodaira,
            kind,
            f,
            c,
            v_disc: n,
            phi,
        }))
    };
    let one = BigInt::one();
    let zero = BigInt::zero();

    // move the singular point of the reduction to (0, 0)
    let (x0, y0) = singular_point(start, p)?;
    let e = start.shift(&x0, &zero, &y0);
    let inv = e.invariants();

    if !divides(p, &inv.b2) {
        // Type I_n, multiplicative. The tangent cone at the node is
        // y² + a1·xy − a2·x², split when T² + a1·T − a2 has roots in F_p.
        let split = quad_roots_count(&one, e.a1(), &(-e.a2()), p) > 0;
        let (kind, c) = if split {
            (ReductionKind::SplitMultiplicative, n as u64)
        } else {
            (
                ReductionKind::NonsplitMultiplicative,
                if n.is_multiple_of(2) { 2 } else { 1 },
            )
        };
        return done(
            KodairaType::In(n),
            kind,
            1,
            c,
            cyclic_phi(n as u64, !split)?,
        );
    }

    // additive reduction from here on
    if !val_at_least(e.a6(), p, 2) {
        return done(
            KodairaType::II,
            ReductionKind::Additive,
            n,
            1,
            ComponentGroupModel::trivial(),
        );
    }
    if !val_at_least(&inv.b8, p, 3) {
        return done(
            KodairaType::III,
            ReductionKind::Additive,
            sub_f(n, 1)?,
            2,
            cyclic_phi(2, false)?,
        );
    }
    if !val_at_least(&inv.b6, p, 3) {
        // Type IV: count roots of Y² + (a3/p)·Y − a6/p²
        let a3p = exact_div(e.a3(), p)?;
        let a6p2 = exact_div(e.a6(), &(p * p))?;
        let roots = quad_roots_count(&one, &a3p, &(-a6p2), p);
        let c = if roots == 2 { 3 } else { 1 };
        return done(
            KodairaType::IV,
            ReductionKind::Additive,
            sub_f(n, 2)?,
            c,
            cyclic_phi(3, c == 1)?,
        );
    }

    // normalize to p | a1, a2; p² | a3, a4; p³ | a6
    let e = kill_low_coefficients(&e, p)?;
    let b = exact_div(e.a2(), p)?;
    let c2 = exact_div(e.a4(), &p.pow(2))?;
    let d3 = exact_div(e.a6(), &p.pow(3))?;
    // discriminant and depressed-quadratic invariant of T³ + b·T² + c2·T + d3
    let w = BigInt::from(27) * &d3 * &d3 - &b * &b * &c2 * &c2
        + BigInt::from(4) * &b * &b * &b * &d3
        - BigInt::from(18) * &b * &c2 * &d3
        + BigInt::from(4) * &c2 * &c2 * &c2;
    let x = BigInt::from(3) * &c2 - &b * &b;

    if !divides(p, &w) {
        // Type I0*: the cubic is separable mod p
        let roots = cubic_roots_count(&b, &c2, &d3, p);
        let c = 1 + roots as u64;
        let phi = match roots {
            3 => klein_phi([[1, 0], [0, 1]])?,
            1 => klein_phi([[0, 1], [1, 0]])?,
            0 => klein_phi([[0, 1], [1, 1]])?,
            _ => return Err(Error::Internal("separable cubic with two roots".into())),
        };
        return done(
            KodairaType::IStar(0),
            ReductionKind::Additive,
            sub_f(n, 4)?,
            c,
            phi,
        );
    }

    if !divides(p, &x) {
        // double root of the cubic: move it to the origin
        let r1 = if *p == BigInt::from(2) {
            umod(&c2, p)
        } else if *p == BigInt::from(3) {
            let inv2b = invert_unit(&(BigInt::from(2) * &b), p)?;
            umod(&(-&c2 * inv2b), p)
        } else {
            let inv2x = invert_unit(&(BigInt::from(2) * &x), p)?;
            umod(&((&b * &c2 - BigInt::from(9) * &d3) * inv2x), p)
        };
        let mut e = e.shift(&(p * &r1), &zero, &zero);
        if !(val_at_least(e.a2(), p, 1)
            && !val_at_least(e.a2(), p, 2)
            && val_at_least(e.a3(), p, 2)
            && val_at_least(e.a4(), p, 3)
            && val_at_least(e.a6(), p, 4))
        {
            return Err(Error::Internal(
                "double-root translation missed its target valuations".into(),
            ));
        }

        // Type I_ν*: peel y- and x-translations alternately until one of
        // the two residual quadratics becomes separable
        let mut ix = 3u32;
        let mut iy = 3u32;
        let mut mx = p.pow(2);
        let mut my = p.pow(2);
        let (nu, c) = loop {
            if ix + iy > n + 5 {
                return Err(Error::Internal("runaway subloop for type I_nu*".into()));
            }
            let a3t = exact_div(e.a3(), &my)?;
            let a6t = exact_div(e.a6(), &(&mx * &my))?;
            if !divides(p, &(&a3t * &a3t + BigInt::from(4) * &a6t)) {
                let roots = quad_roots_count(&one, &a3t, &(-&a6t), p);
                break (ix + iy - 5, if roots == 2 { 4u64 } else { 2 });
            }
            let t1 = if *p == BigInt::from(2) {
                umod(&a6t, p)
            } else {
                umod(&(-&a3t * invert_unit(&BigInt::from(2), p)?), p)
            };
            e = e.shift(&zero, &zero, &(&my * &t1));
            iy += 1;
            my *= p;

            let a2t = exact_div(e.a2(), p)?;
            let a4t = exact_div(e.a4(), &(p * &mx))?;
            let a6t = exact_div(e.a6(), &(&mx * &my))?;
            if !divides(p, &(&a4t * &a4t - BigInt::from(4) * &a2t * &a6t)) {
                let roots = quad_roots_count(&a2t, &a4t, &a6t, p);
                break (ix + iy - 5, if roots == 2 { 4u64 } else { 2 });
            }
            let r1 = if *p == BigInt::from(2) {
                umod(&(&a6t * &a2t), p)
            } else {
                umod(&(-&a4t * invert_unit(&(BigInt::from(2) * &a2t), p)?), p)
            };
            e = e.shift(&(&mx * &r1), &zero, &zero);
            ix += 1;
            mx *= p;
        };
        let phi = if nu % 2 == 1 {
            cyclic_phi(4, c == 2)?
        } else if c == 4 {
            klein_phi([[1, 0], [0, 1]])?
        } else {
            klein_phi([[0, 1], [1, 0]])?
        };
        return done(
            KodairaType::IStar(nu),
            ReductionKind::Additive,
            sub_f(n, nu + 4)?,
            c,
            phi,
        );
    }

    // triple root of the cubic: move it to the origin
    let r1 = if *p == BigInt::from(2) {
        umod(&d3, p)
    } else if *p == BigInt::from(3) {
        umod(&(-&d3), p)
    } else {
        umod(&(-&b * invert_unit(&BigInt::from(3), p)?), p)
    };
    let e = e.shift(&(p * &r1), &zero, &zero);

    // Type IV*: count roots of Y² + (a3/p²)·Y − a6/p⁴
    let a3t = exact_div(e.a3(), &p.pow(2))?;
    let a6t = exact_div(e.a6(), &p.pow(4))?;
    if !divides(p, &(&a3t * &a3t + BigInt::from(4) * &a6t)) {
        let roots = quad_roots_count(&one, &a3t, &(-&a6t), p);
        let c = if roots == 2 { 3 } else { 1 };
        return done(
            KodairaType::IVStar,
            ReductionKind::Additive,
            sub_f(n, 6)?,
            c,
            cyclic_phi(3, c == 1)?,
        );
    }
    let t1 = if *p == BigInt::from(2) {
        umod(&a6t, p)
    } else {
        umod(&(-&a3t * invert_unit(&BigInt::from(2), p)?), p)
    };
    let e = e.shift(&zero, &zero, &(p.pow(2) * &t1));

    if !val_at_least(e.a4(), p, 4) {
        return done(
            KodairaType::IIIStar,
            ReductionKind::Additive,
            sub_f(n, 7)?,
            2,
            cyclic_phi(2, false)?,
        );
    }
    if !val_at_least(e.a6(), p, 6) {
        return done(
            KodairaType::IIStar,
            ReductionKind::Additive,
            sub_f(n, 8)?,
            1,
            ComponentGroupModel::trivial(),
        );
    }
    Ok(StepResult::ScaleDown(e.scale_down(p)?))
}

/// A point (x0, y0) where the reduction mod p is singular. Exists whenever
/// p divides the discriminant of a p-minimal model.
fn singular_point(e: &WeierstrassCurve, p: &BigInt) -> Result<(BigInt, BigInt)> {
    if let Some(ps) = p.to_u64().filter(|&ps| ps < 5) {
        // p = 2, 3: enumerate residues and test all three partials
        let [a1, a2, a3, a4, a6] = e.ainvs();
        for x in 0..ps {
            for y in 0..ps {
                let (xb, yb) = (BigInt::from(x), BigInt::from(y));
                let fval = &yb * &yb + a1 * &xb * &yb + a3 * &yb
                    - &xb * &xb * &xb
                    - a2 * &xb * &xb
                    - a4 * &xb
                    - a6;
                let fx = a1 * &yb - BigInt::from(3) * &xb * &xb - BigInt::from(2) * a2 * &xb - a4;
                let fy = BigInt::from(2) * &yb + a1 * &xb + a3;
                if divides(p, &fval) && divides(p, &fx) && divides(p, &fy) {
                    return Ok((xb, yb));
                }
            }
        }
        return Err(Error::Internal(
            "singular reduction exposes no singular point".into(),
        ));
    }
    // p ≥ 5: the singular x is the multiple root of the right-hand cubic
    // 4x³ + b2·x² + 2b4·x + b6, triple exactly when p | c4
    let inv = e.invariants();
    let x0 = if divides(p, &inv.c4) {
        umod(&(-&inv.b2 * invert_unit(&BigInt::from(12), p)?), p)
    } else {
        let num = BigInt::from(18) * &inv.b6 - &inv.b2 * &inv.b4;
        umod(&(num * invert_unit(&inv.c4, p)?), p)
    };
    let y0 = umod(
        &(-(e.a1() * &x0 + e.a3()) * invert_unit(&BigInt::from(2), p)?),
        p,
    );
    Ok((x0, y0))
}

/// Shift so that p | a1, a2, p² | a3, a4 and p³ | a6; assumes additive
/// reduction with singular point at the origin and types II–IV ruled out.
fn kill_low_coefficients(e: &WeierstrassCurve, p: &BigInt) -> Result<WeierstrassCurve> {
    let zero = BigInt::zero();
    let shifted = if let Some(ps) = p.to_u64().filter(|&ps| ps < 5) {
        let mut found = None;
        'search: for s in 0..ps {
            for t in 0..ps.pow(3) {
                let cand = e.shift(&zero, &BigInt::from(s), &BigInt::from(t));
                if coefficients_normalized(&cand, p) {
                    found = Some(cand);
                    break 'search;
                }
            }
        }
        found
    } else {
        let s = umod(&(-e.a1() * invert_unit(&BigInt::from(2), p)?), p);
        let e = e.shift(&zero, &s, &zero);
        let p2 = p * p;
        let t = umod(&(-e.a3() * invert_unit(&BigInt::from(2), &p2)?), &p2);
        let e = e.shift(&zero, &zero, &t);
        coefficients_normalized(&e, p).then_some(e)
    };
    shifted.ok_or_else(|| Error::Internal("coefficient normalization failed".into()))
}

fn coefficients_normalized(e: &WeierstrassCurve, p: &BigInt) -> bool {
    val_at_least(e.a1(), p, 1)
        && val_at_least(e.a2(), p, 1)
        && val_at_least(e.a3(), p, 2)
        && val_at_least(e.a4(), p, 2)
        && val_at_least(e.a6(), p, 3)
}

/// Inverse of a p-unit mod the (prime-power) modulus m; non-units indicate a
/// broken branch condition upstream.
fn invert_unit(a: &BigInt, m: &BigInt) -> Result<BigInt> {
    inv_mod(a, m).ok_or_else(|| Error::Internal(format!("{a} is not invertible mod {m}")))
}

/// Conductor exponents are differences of the discriminant valuation and a
/// type-dependent drop; a negative difference means a classification bug.
fn sub_f(n: u32, drop: u32) -> Result<u32> {
    n.checked_sub(drop)
        .ok_or_else(|| Error::Internal(format!("conductor exponent {n} - {drop} underflows")))
}

/// ℤ/n with Frobenius acting as ±1 (n ≤ 1 collapses to the trivial model).
fn cyclic_phi(n: u64, negate: bool) -> Result<ComponentGroupModel> {
    let group = FiniteAbelianGroup::new(vec![n.max(1)])?;
    let matrix = if group.is_trivial() {
        Vec::new()
    } else {
        vec![vec![if negate { -1 } else { 1 }]]
    };
    let frobenius = GroupAutomorphism::new(&group, matrix)?;
    ComponentGroupModel::new(group, frobenius)
}

/// (ℤ/2)² with the given Frobenius matrix.
fn klein_phi(matrix: [[i64; 2]; 2]) -> Result<ComponentGroupModel> {
    let group = FiniteAbelianGroup::new(vec![2, 2])?;
    let frobenius =
        GroupAutomorphism::new(&group, matrix.iter().map(|row| row.to_vec()).collect())?;
    ComponentGroupModel::new(group, frobenius)
}
