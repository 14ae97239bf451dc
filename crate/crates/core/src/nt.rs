//! Shared integer-arithmetic helpers: sieves, primality, multiplicative functions.

/// Greatest common divisor.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// All primes `<= n` as a sorted vector.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    PrimeBitmap::up_to(n).iter_primes().collect()
}

/// Bit-packed primality table on `[0, n]`.
pub struct PrimeBitmap {
    n: u64,
    words: Vec<u64>,
}

impl PrimeBitmap {
    pub fn up_to(n: u64) -> Self {
        let len = (n as usize + 1 + 63) / 64;
        let mut words = vec![u64::MAX; len];
        let mut bm = PrimeBitmap { n, words: Vec::new() };
        // temporarily treat words as "is prime" flags over 0..=n
        let clear = |w: &mut Vec<u64>, i: usize| w[i / 64] &= !(1u64 << (i % 64));
        clear(&mut words, 0);
        if n >= 1 {
            clear(&mut words, 1);
        }
        let mut p = 2usize;
        while (p as u64) * (p as u64) <= n {
            if words[p / 64] >> (p % 64) & 1 == 1 {
                let mut m = p * p;
                while m as u64 <= n {
                    clear(&mut words, m);
                    m += p;
                }
            }
            p += 1;
        }
        bm.words = words;
        bm
    }

    #[inline]
    pub fn is_prime(&self, m: u64) -> bool {
        m <= self.n && (self.words[(m / 64) as usize] >> (m % 64)) & 1 == 1
    }

    pub fn limit(&self) -> u64 {
        self.n
    }

    pub fn iter_primes(&self) -> impl Iterator<Item = u64> + '_ {
        (2..=self.n).filter(move |&m| self.is_prime(m))
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, valid for all `n < 3.317e24` with this witness set.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization by trial division; adequate for desk-scale arguments.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0u32;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Moebius function.
pub fn mobius(n: u64) -> i32 {
    if n == 0 {
        return 0;
    }
    let mut mu = 1i32;
    for (_, e) in factorize(n) {
        if e > 1 {
            return 0;
        }
        mu = -mu;
    }
    mu
}

/// Euler totient.
pub fn euler_phi(n: u64) -> u64 {
    let mut out = n;
    for (p, _) in factorize(n) {
        out = out / p * (p - 1);
    }
    out
}

/// 10^e as u64; panics if it overflows (e > 19).
pub fn pow10(e: u32) -> u64 {
    10u64.pow(e)
}

/// Exact reduced fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    pub num: u64,
    pub den: u64,
}

impl Rational {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den != 0);
        let g = gcd(num, den);
        Rational { num: num / g, den: den / g }
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitmap_matches_miller_rabin() {
        let bm = PrimeBitmap::up_to(10_000);
        for n in 0..=10_000u64 {
            assert_eq!(bm.is_prime(n), is_prime(n), "n = {n}");
        }
    }

    #[test]
    fn mobius_phi_small() {
        // classic values
        assert_eq!(mobius(1), 1);
        assert_eq!(mobius(6), 1);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(12), 0);
        assert_eq!(euler_phi(10), 4);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(97), 96);
    }

    #[test]
    fn factorize_roundtrip() {
        for n in 1..2000u64 {
            let f = factorize(n);
            let back: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(back, n);
        }
    }

    #[test]
    fn rational_reduces() {
        let r = Rational::new(30, 36);
        assert_eq!((r.num, r.den), (5, 6));
    }
}
