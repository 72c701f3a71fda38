//! Integer helpers: factorization at desk scale and modular arithmetic.

use alloc::vec::Vec;

fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, n: u64) -> u64 {
    let mut r = 1u64 % n;
    a %= n;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, n);
        }
        a = mul_mod(a, a, n);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin, valid for all n < 2^64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Pollard rho (Brent variant) for a nontrivial factor of composite n.
fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = (mul_mod(x, x, n) + c) % n;
            y = (mul_mod(y, y, n) + c) % n;
            y = (mul_mod(y, y, n) + c) % n;
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization via trial division with a Pollard rho fallback.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let push = |factors: &mut Vec<(u64, u32)>, p: u64, e: u32| {
        if let Some(entry) = factors.iter_mut().find(|(q, _)| *q == p) {
            entry.1 += e;
        } else {
            factors.push((p, e));
        }
    };
    for p in 2..1000u64 {
        if p * p > n {
            break;
        }
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            push(&mut factors, p, e);
        }
    }
    let mut stack: Vec<u64> = Vec::new();
    if n > 1 {
        stack.push(n);
    }
    while let Some(v) = stack.pop() {
        if v == 1 {
            continue;
        }
        if is_prime(v) {
            push(&mut factors, v, 1);
        } else {
            let d = pollard_rho(v);
            stack.push(d);
            stack.push(v / d);
        }
    }
    factors.sort_unstable();
    factors
}

/// Merge two prime factorizations (multiplying the underlying integers).
pub fn merge_factorizations(a: &[(u64, u32)], b: &[(u64, u32)]) -> Vec<(u64, u32)> {
    let mut out = a.to_vec();
    for &(p, e) in b {
        if let Some(entry) = out.iter_mut().find(|(q, _)| *q == p) {
            entry.1 += e;
        } else {
            out.push((p, e));
        }
    }
    out.sort_unstable();
    out
}

/// Euler totient from a factorization.
pub fn totient(factors: &[(u64, u32)]) -> u64 {
    let mut t = 1u64;
    for &(p, e) in factors {
        t *= p.pow(e - 1) * (p - 1);
    }
    t
}

/// All divisors of n, given its factorization. Desk scale only.
pub fn divisors(factors: &[(u64, u32)]) -> Vec<u64> {
    let mut divs = alloc::vec![1u64];
    for &(p, e) in factors {
        let prev = divs.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for d in &prev {
                divs.push(d * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_small() {
        assert_eq!(factorize(1), alloc::vec![]);
        assert_eq!(factorize(26), alloc::vec![(2, 1), (13, 1)]);
        assert_eq!(factorize(19683), alloc::vec![(3, 9)]);
    }

    #[test]
    fn factorize_q_cubed_plus_one_parts() {
        // q = 3^13: the two q^3 + 1 cofactors are in range for Pollard rho.
        let q: u64 = 3u64.pow(13);
        let f1 = factorize(q + 1);
        let f2 = factorize(q * q - q + 1);
        let check = |fs: &[(u64, u32)], n: u64| {
            let mut prod = 1u64;
            for &(p, e) in fs {
                assert!(is_prime(p));
                prod *= p.pow(e);
            }
            assert_eq!(prod, n);
        };
        check(&f1, q + 1);
        check(&f2, q * q - q + 1);
    }

    #[test]
    fn totient_of_26() {
        assert_eq!(totient(&factorize(26)), 12);
    }

    #[test]
    fn divisors_of_12() {
        assert_eq!(divisors(&factorize(12)), alloc::vec![1, 2, 3, 4, 6, 12]);
    }
}
