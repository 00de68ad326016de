//! Cantor pairing and the derived sequence coding used everywhere codes are
//! exchanged: order elements, tree nodes, machine-code indices, traces.
//!
//! `pair(a, b) = (a+b)(a+b+1)/2 + b`; sequences are coded by `nil = 0`,
//! `cons(x, rest) = pair(x, rest) + 1`, so every natural number decodes.

use num_bigint::BigUint;
use num_traits::Zero;

/// Arbitrary-precision natural number; machine-code indices and oracle values
/// grow past u64 as soon as codes nest a few levels deep.
pub type Nat = BigUint;

pub fn nat(n: u64) -> Nat {
    BigUint::from(n)
}

/// Cantor pairing on big naturals.
pub fn bpair(a: &Nat, b: &Nat) -> Nat {
    let s = a + b;
    (&s * (&s + 1u32)) / 2u32 + b
}

/// Inverse of [`bpair`].
pub fn bunpair(n: &Nat) -> (Nat, Nat) {
    // Largest s with s(s+1)/2 <= n.
    let mut s = (n * 2u32).sqrt();
    while (&s * (&s + 1u32)) / 2u32 > *n {
        s -= 1u32;
    }
    let b = n - (&s * (&s + 1u32)) / 2u32;
    (s - &b, b)
}

pub fn bseq_encode(items: &[Nat]) -> Nat {
    let mut code = Nat::zero();
    for x in items.iter().rev() {
        code = bpair(x, &code) + 1u32;
    }
    code
}

pub fn bseq_decode(code: &Nat) -> Vec<Nat> {
    let mut code = code.clone();
    let mut out = Vec::new();
    while !code.is_zero() {
        let (x, rest) = bunpair(&(code - 1u32));
        out.push(x);
        code = rest;
    }
    out
}

/// `n` as u64 if it fits.
pub fn nat_to_u64(n: &Nat) -> Option<u64> {
    u64::try_from(n).ok()
}

/// Cantor pairing. Saturates instead of wrapping on overflow; codes that large
/// are outside every bounded universe this crate works with.
pub fn pair(a: u64, b: u64) -> u64 {
    let s = a.saturating_add(b);
    let tri = s
        .checked_mul(s.saturating_add(1))
        .map(|x| x / 2)
        .unwrap_or(u64::MAX);
    tri.saturating_add(b)
}

/// Inverse of [`pair`]. Total on all of u64 (wide arithmetic internally).
pub fn unpair(n: u64) -> (u64, u64) {
    let n = n as u128;
    // Largest s with s(s+1)/2 <= n.
    let mut s = (((n as f64) * 2.0).sqrt() as u128).saturating_add(2);
    while s * (s + 1) / 2 > n {
        s -= 1;
    }
    let b = n - s * (s + 1) / 2;
    ((s - b) as u64, b as u64)
}

/// Code of a finite sequence of naturals.
pub fn seq_encode(items: &[u64]) -> u64 {
    let mut code = 0u64;
    for &x in items.iter().rev() {
        code = pair(x, code).saturating_add(1);
    }
    code
}

/// Every natural number is the code of exactly one finite sequence.
pub fn seq_decode(mut code: u64) -> Vec<u64> {
    let mut out = Vec::new();
    while code > 0 {
        let (x, rest) = unpair(code - 1);
        out.push(x);
        code = rest;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_round_trips() {
        for n in 0..5_000u64 {
            let (a, b) = unpair(n);
            assert_eq!(pair(a, b), n);
        }
        assert_eq!(pair(0, 0), 0);
        assert_eq!(pair(1, 0), 1);
        assert_eq!(pair(0, 1), 2);
    }

    #[test]
    fn seq_round_trips() {
        for n in 0..2_000u64 {
            assert_eq!(seq_encode(&seq_decode(n)), n);
        }
        assert_eq!(seq_encode(&[]), 0);
        assert_eq!(seq_decode(seq_encode(&[3, 1, 4, 1, 5])), vec![3, 1, 4, 1, 5]);
    }

    #[test]
    fn seq_code_bounds_length() {
        // The hull/search code relies on codes growing at least as fast as length.
        for n in 1..2_000u64 {
            assert!(seq_decode(n).len() as u64 <= n);
        }
    }

    #[test]
    fn big_pairing_round_trips() {
        for n in 0..500u64 {
            let bn = nat(n);
            let (a, b) = bunpair(&bn);
            assert_eq!(bpair(&a, &b), bn);
            assert_eq!(nat_to_u64(&bpair(&a, &b)), Some(n));
        }
        // agreement with the u64 pairing
        for a in 0..40u64 {
            for b in 0..40u64 {
                assert_eq!(nat_to_u64(&bpair(&nat(a), &nat(b))), Some(pair(a, b)));
            }
        }
        // something genuinely big
        let big = nat(u64::MAX) * nat(u64::MAX);
        let p = bpair(&big, &nat(7));
        let (x, y) = bunpair(&p);
        assert_eq!((x, y), (big, nat(7)));
        assert_eq!(bseq_decode(&bseq_encode(&[nat(5), p.clone()])), vec![nat(5), p]);
    }
}
