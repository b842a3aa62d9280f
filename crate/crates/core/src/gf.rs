//! Small finite fields GF(p^m) with full addition and multiplication tables.
//!
//! An element is encoded as the integer whose base-`p` digits are the
//! coefficients of its polynomial representative, so `0` and `1` are the
//! field's zero and one.

use crate::error::{Error, Result};

/// Returns `(p, m)` with `q = p^m`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut rest = q;
    let mut m = 0;
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p, m))
}

/// Prime-power factorization `n = Π p_i^e_i`, returned as the list of `p_i^e_i`.
pub fn prime_power_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut q = 1;
            while n % p == 0 {
                n /= p;
                q *= p;
            }
            out.push(q);
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[derive(Debug, Clone)]
pub struct Gf {
    q: u32,
    add: Vec<u32>,
    mul: Vec<u32>,
}

// Polynomials over GF(p) as coefficient vectors, lowest degree first.
fn poly_mod(mut a: Vec<u32>, m: &[u32], p: u32) -> Vec<u32> {
    let dm = m.len() - 1;
    let lead_inv = mod_inv(m[dm], p);
    while a.len() > dm {
        let top = a.pop().unwrap();
        if top == 0 {
            continue;
        }
        let f = top * lead_inv % p;
        let shift = a.len() - dm;
        for i in 0..dm {
            a[shift + i] = (a[shift + i] + p * p - f * m[i] % p) % p;
        }
    }
    a
}

fn mod_inv(a: u32, p: u32) -> u32 {
    (1..p).find(|x| a * x % p == 1).unwrap_or(0)
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    // any factor has degree <= deg/2; try all monic candidates
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for code in 0..count {
            let mut g = digits(code, p, d);
            g.push(1);
            let r = poly_mod(f.to_vec(), &g, p);
            if r.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn digits(mut x: u32, p: u32, len: usize) -> Vec<u32> {
    (0..len)
        .map(|_| {
            let d = x % p;
            x /= p;
            d
        })
        .collect()
}

fn undigits(ds: &[u32], p: u32) -> u32 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

impl Gf {
    /// Builds GF(q); the modulus is the first monic irreducible polynomial of
    /// degree `m` in digit order.
    pub fn new(q: u32) -> Result<Self> {
        let (p, m) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        if q > 1 << 12 {
            return Err(Error::BadParams(format!("field order {q} too large for tables")));
        }
        let m = m as usize;
        let modulus = (0..p.pow(m as u32))
            .map(|c| {
                let mut f = digits(c, p, m);
                f.push(1);
                f
            })
            .find(|f| m == 1 || is_irreducible(f, p))
            .expect("an irreducible polynomial exists for every degree");
        let n = q as usize;
        let mut add = vec![0; n * n];
        let mut mul = vec![0; n * n];
        for a in 0..q {
            let da = digits(a, p, m);
            for b in 0..q {
                let db = digits(b, p, m);
                let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = undigits(&sum, p);
                let mut prod = vec![0; 2 * m - 1];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let r = poly_mod(prod, &modulus, p);
                mul[(a * q + b) as usize] = undigits(&r, p);
            }
        }
        Ok(Gf { q, add, mul })
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a * self.q + b) as usize]
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a * self.q + b) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(16), Some((2, 4)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
        assert_eq!(prime_power_factors(12), vec![4, 3]);
        assert_eq!(prime_power_factors(360), vec![8, 9, 5]);
    }

    #[test]
    fn field_axioms() {
        for q in [2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32] {
            let f = Gf::new(q).unwrap();
            for a in 0..q {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                if a != 0 {
                    assert_eq!((0..q).filter(|&b| f.mul(a, b) == 1).count(), 1, "q={q} a={a}");
                }
                for b in 0..q {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in [0, 1, q - 1] {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }
}
