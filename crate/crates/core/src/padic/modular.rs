//! Modular helpers over `Z/p^k`: cached prime powers, Hensel inverses and
//! Hensel square roots.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

thread_local! {
    static POWERS: RefCell<HashMap<u64, Vec<Rc<BigUint>>>> = RefCell::new(HashMap::new());
}

/// `p^k`, memoized per thread.
pub(crate) fn pow_p(p: u64, k: u32) -> Rc<BigUint> {
    POWERS.with(|cell| {
        let mut map = cell.borrow_mut();
        let table = map.entry(p).or_insert_with(|| vec![Rc::new(BigUint::one())]);
        while table.len() <= k as usize {
            let next = table.last().unwrap().as_ref() * p;
            table.push(Rc::new(next));
        }
        Rc::clone(&table[k as usize])
    })
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo the prime `p`; `a` must not be divisible by `p`.
pub(crate) fn inv_mod_prime(a: u64, p: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128 % p as i128, p as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(p as i128) as u64
}

/// Residue of `x` modulo the small prime `p`.
pub(crate) fn residue(x: &BigUint, p: u64) -> u64 {
    (x % p).to_u64().expect("residue below p")
}

/// Inverse of a unit modulo `p^k`, lifted from its inverse mod `p` by Newton steps
/// `y <- y (2 - u y)`, each of which doubles the number of correct digits.
pub(crate) fn inv_unit(u: &BigUint, p: u64, k: u32) -> BigUint {
    let r0 = residue(u, p);
    let mut y = BigUint::from(inv_mod_prime(r0, p));
    let mut known = 1u32;
    while known < k {
        known = (known * 2).min(k);
        let m = pow_p(p, known);
        let uy = (u * &y) % m.as_ref();
        // 2 - u*y mod m
        let two = BigUint::from(2u32) % m.as_ref();
        let corr = (two + m.as_ref() - uy) % m.as_ref();
        y = (y * corr) % m.as_ref();
    }
    y % pow_p(p, k).as_ref()
}

/// Legendre-style test for odd `p`: is the nonzero residue `a` a square mod `p`.
pub(crate) fn is_qr_mod_prime(a: u64, p: u64) -> bool {
    debug_assert!(p % 2 == 1);
    pow_mod(a % p, (p - 1) / 2, p) == 1
}

/// Tonelli–Shanks square root of a quadratic residue mod an odd prime.
pub(crate) fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if !is_qr_mod_prime(a, p) {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2u64;
    while is_qr_mod_prime(z, p) {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Square root of an odd-`p` unit `u` known mod `p^k`. The branch is fixed by the
/// smaller of the two residues mod `p`; each lift solves `(r + δ)^2 ≡ u` to the
/// next doubled precision.
pub(crate) fn sqrt_unit_odd(u: &BigUint, p: u64, k: u32) -> Option<BigUint> {
    let r0 = sqrt_mod_prime(residue(u, p), p)?;
    let r0 = r0.min(p - r0);
    let mut r = BigUint::from(r0);
    let mut known = 1u32;
    while known < k {
        known = (known * 2).min(k);
        let m = pow_p(p, known);
        let m = m.as_ref();
        // r <- r - (r^2 - u) / (2r)
        let r2 = (&r * &r) % m;
        let u_m = u % m;
        let diff = (r2 + m - u_m) % m;
        let two_r = (&r * 2u32) % m;
        let inv = inv_unit(&two_r, p, known);
        let delta = (diff * inv) % m;
        r = (r + m - delta) % m;
    }
    Some(r)
}

/// Square root of a 2-adic unit `u ≡ 1 (mod 8)` known mod `2^k` (k ≥ 3).
/// The root is determined mod `2^(k-1)`, lifted one bit at a time; the branch
/// is the one whose residue mod 8 is the smaller of the pair `±r`.
pub(crate) fn sqrt_unit_two(u: &BigUint, k: u32) -> Option<BigUint> {
    debug_assert!(k >= 3);
    if residue(&(u % 8u32), 8) != 1 {
        return None;
    }
    // Invariant: r^2 ≡ u (mod 2^(j+1)).
    let mut r = BigUint::one();
    let mut j = 2u32;
    while j + 1 < k {
        let m = pow_p(2, j + 2);
        let r2 = (&r * &r) % m.as_ref();
        let target = u % m.as_ref();
        if r2 != target {
            r += pow_p(2, j).as_ref();
        }
        j += 1;
    }
    let modulus = pow_p(2, k - 1);
    let r = r % modulus.as_ref();
    let neg = (modulus.as_ref() - &r) % modulus.as_ref();
    let low = |x: &BigUint| residue(&(x % 8u32), 8);
    let window = if k > 3 { 8 } else { 1u64 << (k - 1) };
    let (lr, ln) = (low(&r) % window, low(&neg) % window);
    Some(if ln < lr { neg } else { r })
}

/// Number of times `p` divides a nonzero `x`, and the cofactor.
pub(crate) fn strip_p(x: BigUint, p: u64) -> (u32, BigUint) {
    debug_assert!(!x.is_zero());
    let mut k = 0u32;
    let mut cur = x;
    loop {
        let (q, r) = cur.div_rem(&BigUint::from(p));
        if !r.is_zero() {
            return (k, cur);
        }
        cur = q;
        k += 1;
    }
}
