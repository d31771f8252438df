//! Galois cohomology of a component group with its Frobenius action:
//! fixed points, coinvariants, the finite-level H¹ along the unramified
//! tower, and the pairing linking invariants to coinvariants.
//!
//! Everything is small enough to enumerate, so subquotient structures are
//! read off from torsion counts rather than from coset representatives.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;

use crate::curve::WeierstrassCurve;
use crate::error::{Error, Result};
use crate::group::{
    canonical_from_orders, ComponentGroupModel, FiniteAbelianGroup, GroupAutomorphism,
};
use crate::tate::tate_local_data;

/// The subgroup of Frobenius-fixed elements, Φ^σ, in invariant-factor form.
pub fn invariants_subgroup(model: &ComponentGroupModel) -> FiniteAbelianGroup {
    let group = model.group();
    let sigma = model.frobenius();
    let fixed: HashSet<u64> = group
        .elements()
        .filter(|x| sigma.apply(x) == *x)
        .map(|x| group.encode(&x))
        .collect();
    let zero: HashSet<u64> = [0u64].into_iter().collect();
    section_structure(group, Some(&fixed), &zero)
}

/// The quotient of Φ by the image of σ − 1 (the Frobenius coinvariants),
/// in invariant-factor form.
pub fn coinvariants_quotient(model: &ComponentGroupModel) -> FiniteAbelianGroup {
    let group = model.group();
    let image = difference_image(group, model.frobenius());
    section_structure(group, None, &image)
}

/// H¹ of the cyclic group of order m acting through σ (which must satisfy
/// σ^m = 1): ker(1 + σ + … + σ^{m−1}) / im(σ − 1).
pub fn cyclic_h1(
    group: &FiniteAbelianGroup,
    sigma: &GroupAutomorphism,
    m: u64,
) -> Result<FiniteAbelianGroup> {
    if sigma.moduli() != group.factors() {
        return Err(Error::GroupMismatch);
    }
    if m == 0 {
        return Err(Error::SigmaOrderMismatch);
    }
    if group.is_trivial() {
        return Ok(FiniteAbelianGroup::trivial());
    }
    let moduli = group.factors();
    let (norm, power) = norm_and_power(sigma.matrix(), m, moduli);
    if !endo_is_identity(&power, moduli) {
        return Err(Error::SigmaOrderMismatch);
    }
    let kernel: HashSet<u64> = group
        .elements()
        .filter(|x| endo_apply(&norm, x, moduli).iter().all(|&v| v == 0))
        .map(|x| group.encode(&x))
        .collect();
    let image = difference_image(group, sigma);
    // im(σ − 1) ⊆ ker(norm) because norm·(σ − 1) = σ^m − 1 = 0
    debug_assert!(image.iter().all(|i| kernel.contains(i)));
    Ok(section_structure(group, Some(&kernel), &image))
}

/// The smallest level m₀ such that the finite-level H¹ equals the
/// coinvariants exactly at the levels m with m₀ | m. Writing d for the
/// order of σ and N_d for the norm at level d, every admissible level is
/// m = d·k with norm k·N_d, so the kernel is all of Φ exactly when the
/// additive exponent e of N_d divides k; hence m₀ = d·e.
pub fn stabilization_level(model: &ComponentGroupModel) -> u64 {
    let group = model.group();
    if group.is_trivial() {
        return 1;
    }
    let moduli = group.factors();
    let d = model.frobenius().order();
    let (norm, _) = norm_and_power(model.frobenius().matrix(), d, moduli);
    let mut e = 1u64;
    for (row, &di) in norm.iter().zip(moduli) {
        for &entry in row {
            let additive_order = di / di.gcd(&entry);
            e = e.lcm(&additive_order);
        }
    }
    d * e
}

/// The group of locally trivialized torsors at p: the Frobenius
/// coinvariants of the component group. Its order is the Tamagawa number,
/// and a mismatch is reported as an internal error rather than returned.
pub fn tamagawa_torsor_group(curve: &WeierstrassCurve, p: &BigInt) -> Result<FiniteAbelianGroup> {
    let data = tate_local_data(curve, p)?;
    let torsors = coinvariants_quotient(&data.phi);
    if torsors.order() != data.c {
        return Err(Error::Internal(format!(
            "torsor count {} disagrees with Tamagawa number {} at {}",
            torsors.order(),
            data.c,
            data.p
        )));
    }
    Ok(torsors)
}

/// Local duality at the level of component groups: the fixed subgroup and
/// the coinvariant quotient must be isomorphic (not merely of equal order).
pub fn duality_check(model: &ComponentGroupModel) -> bool {
    invariants_subgroup(model).canonical_factors()
        == coinvariants_quotient(model).canonical_factors()
}

/// The pairing value ⟨a, b⟩ = a·b/n ∈ ℚ/ℤ on ℤ/n, returned as a reduced
/// fraction in [0, 1).
pub fn grothendieck_pairing_in(n: u64, a: u64, b: u64) -> Ratio<u64> {
    debug_assert!(n >= 1);
    let prod = ((a % n) as u128 * (b % n) as u128 % n as u128) as u64;
    Ratio::new(prod, n)
}

/// Check that ⟨a, b⟩ = a·b/n descends to a perfect pairing between the
/// fixed subgroup Φ^σ and the coinvariants Φ_σ. Supported for cyclic Φ with
/// σ = ±1 (every multiplicative-reduction component group); other models
/// are refused rather than silently mis-checked.
pub fn induced_pairing_check(model: &ComponentGroupModel) -> Result<bool> {
    let group = model.group();
    if group.is_trivial() {
        return Ok(true);
    }
    if group.factors().len() != 1 {
        return Err(Error::UnsupportedModel);
    }
    let n = group.factors()[0];
    let entry = model.frobenius().matrix()[0][0];
    if entry != 1 % n && entry != (n - 1) % n {
        return Err(Error::UnsupportedModel);
    }
    let mulmod = |a: u64, b: u64| (a as u128 * b as u128 % n as u128) as u64;
    let fixed: Vec<u64> = (0..n).filter(|&x| mulmod(entry, x) == x).collect();
    let image: HashSet<u64> = (0..n).map(|x| (mulmod(entry, x) + n - x) % n).collect();
    // well-defined on Φ^σ × Φ/im(σ−1): the fixed subgroup annihilates the image
    let well_defined = fixed
        .iter()
        .all(|&a| image.iter().all(|&i| mulmod(a, i) == 0));
    // left kernel trivial: only 0 pairs to zero with the whole group
    let left_ok = fixed
        .iter()
        .all(|&a| a == 0 || (0..n).any(|b| mulmod(a, b) != 0));
    // right kernel no bigger than the image: anything orthogonal to all of
    // Φ^σ must already die in the coinvariants
    let right_ok = (0..n)
        .filter(|&b| fixed.iter().all(|&a| mulmod(a, b) == 0))
        .all(|b| image.contains(&b));
    Ok(well_defined && left_ok && right_ok)
}

/// The image of σ − 1 as a set of encoded elements.
fn difference_image(group: &FiniteAbelianGroup, sigma: &GroupAutomorphism) -> HashSet<u64> {
    group
        .elements()
        .map(|x| {
            let sx = sigma.apply(&x);
            let diff: Vec<u64> = sx
                .iter()
                .zip(&x)
                .zip(group.factors())
                .map(|((&s, &xi), &d)| (s + d - xi) % d)
                .collect();
            group.encode(&diff)
        })
        .collect()
}

/// Structure of Num/Den for subgroups Den ⊆ Num of `group` (`num = None`
/// means the whole group). For each prime q, the count
/// t_k = #{x ∈ Num : q^k·x ∈ Den} / #Den is the q^k-torsion of the
/// quotient, so the multiset of cyclic q-parts falls out of the successive
/// ratios t_k/t_{k−1} = q^{#parts of exponent ≥ k}.
fn section_structure(
    group: &FiniteAbelianGroup,
    num: Option<&HashSet<u64>>,
    den: &HashSet<u64>,
) -> FiniteAbelianGroup {
    let den_size = den.len() as u64;
    let num_size = num.map_or(group.order(), |s| s.len() as u64);
    debug_assert!(den_size > 0 && num_size.is_multiple_of(den_size));
    if num_size == den_size {
        return FiniteAbelianGroup::trivial();
    }
    let mut parts: Vec<u64> = Vec::new();
    for q in prime_divisors(num_size / den_size) {
        let mut torsion_growth: Vec<u64> = Vec::new(); // n_k = #parts with exponent ≥ k
        let mut prev = 1u64;
        loop {
            let k = torsion_growth.len() as u32 + 1;
            let t_k = count_scaled_into(group, num, den, q, k) / den_size;
            if t_k == prev {
                break;
            }
            debug_assert!(t_k.is_multiple_of(prev));
            torsion_growth.push(exact_log(t_k / prev, q));
            prev = t_k;
        }
        let width = torsion_growth.first().copied().unwrap_or(0);
        for j in 1..=width {
            let exponent = torsion_growth.iter().filter(|&&nk| nk >= j).count() as u32;
            parts.push(q.pow(exponent));
        }
    }
    FiniteAbelianGroup::new(canonical_from_orders(&parts))
        .expect("subquotient order is bounded by the ambient group")
}

/// #{x ∈ Num : q^k·x ∈ Den}.
fn count_scaled_into(
    group: &FiniteAbelianGroup,
    num: Option<&HashSet<u64>>,
    den: &HashSet<u64>,
    q: u64,
    k: u32,
) -> u64 {
    let multipliers: Vec<u64> = group.factors().iter().map(|&d| pow_mod(q, k, d)).collect();
    let lands_in_den = |index: u64| {
        let x = group.decode(index);
        let scaled: Vec<u64> = x
            .iter()
            .zip(&multipliers)
            .zip(group.factors())
            .map(|((&xi, &m), &d)| xi * m % d)
            .collect();
        den.contains(&group.encode(&scaled))
    };
    match num {
        None => (0..group.order()).filter(|&i| lands_in_den(i)).count() as u64,
        Some(set) => set.iter().filter(|&&i| lands_in_den(i)).count() as u64,
    }
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2u64;
    while q * q <= n {
        if n.is_multiple_of(q) {
            out.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn exact_log(x: u64, q: u64) -> u64 {
    let e = x.ilog(q);
    debug_assert_eq!(q.pow(e), x, "torsion ratio must be a power of {q}");
    e as u64
}

fn pow_mod(base: u64, exp: u32, modulus: u64) -> u64 {
    let mut acc: u128 = 1 % modulus as u128;
    let b = (base % modulus) as u128;
    for _ in 0..exp {
        acc = acc * b % modulus as u128;
    }
    acc as u64
}

// ---- endomorphism matrices (norms are generally not invertible) ----

type Endo = Vec<Vec<u64>>;

fn endo_identity(moduli: &[u64]) -> Endo {
    let k = moduli.len();
    let mut out = vec![vec![0u64; k]; k];
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = 1 % moduli[i];
    }
    out
}

fn endo_add(a: &[Vec<u64>], b: &[Vec<u64>], moduli: &[u64]) -> Endo {
    a.iter()
        .zip(b)
        .zip(moduli)
        .map(|((ra, rb), &d)| ra.iter().zip(rb).map(|(&x, &y)| (x + y) % d).collect())
        .collect()
}

fn endo_mul(a: &[Vec<u64>], b: &[Vec<u64>], moduli: &[u64]) -> Endo {
    let k = moduli.len();
    let mut out = vec![vec![0u64; k]; k];
    for i in 0..k {
        for j in 0..k {
            let mut sum = 0u128;
            for (l, row_b) in b.iter().enumerate() {
                sum += a[i][l] as u128 * row_b[j] as u128;
            }
            out[i][j] = (sum % moduli[i] as u128) as u64;
        }
    }
    out
}

fn endo_is_identity(m: &Endo, moduli: &[u64]) -> bool {
    m.iter().enumerate().all(|(i, row)| {
        row.iter()
            .enumerate()
            .all(|(j, &x)| if i == j { x == 1 % moduli[i] } else { x == 0 })
    })
}

fn endo_apply(m: &Endo, x: &[u64], moduli: &[u64]) -> Vec<u64> {
    m.iter()
        .zip(moduli)
        .map(|(row, &d)| {
            let sum: u128 = row
                .iter()
                .zip(x)
                .map(|(&a, &b)| a as u128 * b as u128)
                .sum();
            (sum % d as u128) as u64
        })
        .collect()
}

/// (N_k, σ^k) with N_k = 1 + σ + … + σ^{k−1}, by halving:
/// N_{2k} = N_k + σ^k·N_k and N_{2k+1} = N_{2k} + σ^{2k}.
fn norm_and_power(sigma: &[Vec<u64>], k: u64, moduli: &[u64]) -> (Endo, Endo) {
    debug_assert!(k >= 1);
    if k == 1 {
        return (endo_identity(moduli), sigma.to_vec());
    }
    if k.is_multiple_of(2) {
        let (n, s) = norm_and_power(sigma, k / 2, moduli);
        (
            endo_add(&n, &endo_mul(&s, &n, moduli), moduli),
            endo_mul(&s, &s, moduli),
        )
    } else {
        let (n, s) = norm_and_power(sigma, k - 1, moduli);
        (endo_add(&n, &s, moduli), endo_mul(&s, sigma, moduli))
    }
}
