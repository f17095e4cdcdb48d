//! Finite abelian groups Z_{d₁} × … × Z_{dₙ} with flat mixed-radix element
//! encoding, plus the little number theory needed for prime-dimension bases.

use crate::error::{Error, Result};

/// Product of cyclic groups. Elements are flat indices 0..order with the first
/// factor most significant, matching the tensor-product ordering of the
/// Hilbert space basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAbelianGroup {
    factors: Vec<usize>,
    order: usize,
}

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidGroup("no cyclic factors given".into()));
        }
        if let Some(&bad) = factors.iter().find(|&&f| f < 2) {
            return Err(Error::InvalidGroup(format!("factor {bad} is below 2")));
        }
        let order = factors.iter().product();
        Ok(FiniteAbelianGroup { factors, order })
    }

    /// The cyclic group Z_d.
    pub fn cyclic(d: usize) -> Result<Self> {
        Self::new(vec![d])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn is_element(&self, x: usize) -> bool {
        x < self.order
    }

    pub fn check_element(&self, x: usize) -> Result<()> {
        if self.is_element(x) {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange(format!(
                "{x} is not an element of a group of order {}",
                self.order
            )))
        }
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    /// Flat index -> residues, first factor most significant.
    pub fn decode(&self, mut x: usize) -> Vec<usize> {
        debug_assert!(x < self.order);
        let mut out = vec![0; self.factors.len()];
        for (i, &f) in self.factors.iter().enumerate().rev() {
            out[i] = x % f;
            x /= f;
        }
        out
    }

    /// Residues -> flat index.
    pub fn encode(&self, residues: &[usize]) -> Result<usize> {
        if residues.len() != self.factors.len() {
            return Err(Error::IndexOutOfRange(format!(
                "{} residues for {} factors",
                residues.len(),
                self.factors.len()
            )));
        }
        let mut x = 0;
        for (&r, &f) in residues.iter().zip(&self.factors) {
            if r >= f {
                return Err(Error::IndexOutOfRange(format!(
                    "residue {r} exceeds factor {f}"
                )));
            }
            x = x * f + r;
        }
        Ok(x)
    }

    /// Componentwise addition modulo each factor.
    pub fn add(&self, a: usize, b: usize) -> usize {
        let (ra, rb) = (self.decode(a), self.decode(b));
        let sum: Vec<usize> = ra
            .iter()
            .zip(&rb)
            .zip(&self.factors)
            .map(|((&x, &y), &f)| (x + y) % f)
            .collect();
        self.encode(&sum).expect("componentwise sum stays in range")
    }

    /// Componentwise negation.
    pub fn neg(&self, a: usize) -> usize {
        let r: Vec<usize> = self
            .decode(a)
            .iter()
            .zip(&self.factors)
            .map(|(&x, &f)| (f - x) % f)
            .collect();
        self.encode(&r).expect("negation stays in range")
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    /// G × G, used as the outcome space of joint observables. The pair (j, k)
    /// gets the flat index j·order + k.
    pub fn product_with_self(&self) -> Self {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&self.factors);
        FiniteAbelianGroup {
            factors,
            order: self.order * self.order,
        }
    }
}

/// Deterministic primality check, adequate for desk-scale inputs.
pub fn is_odd_prime(p: usize) -> bool {
    if p < 3 || p.is_multiple_of(2) {
        return false;
    }
    let mut k = 3;
    while k * k <= p {
        if p.is_multiple_of(k) {
            return false;
        }
        k += 2;
    }
    true
}

fn pow_mod(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1u64;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

/// Legendre symbol (a|p) for odd prime p, by Euler's criterion.
pub fn legendre_symbol(a: usize, p: usize) -> i32 {
    debug_assert!(is_odd_prime(p));
    let a = (a % p) as u64;
    if a == 0 {
        return 0;
    }
    let r = pow_mod(a, (p as u64 - 1) / 2, p as u64);
    if r == 1 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_factors() {
        assert!(FiniteAbelianGroup::new(vec![]).is_err());
        assert!(FiniteAbelianGroup::new(vec![3, 1]).is_err());
        assert!(FiniteAbelianGroup::new(vec![0]).is_err());
        assert!(FiniteAbelianGroup::cyclic(2).is_ok());
    }

    #[test]
    fn encode_decode_roundtrip() {
        let g = FiniteAbelianGroup::new(vec![2, 3, 4]).unwrap();
        assert_eq!(g.order(), 24);
        for x in g.elements() {
            assert_eq!(g.encode(&g.decode(x)).unwrap(), x);
        }
        // first factor most significant
        assert_eq!(g.decode(23), vec![1, 2, 3]);
        assert_eq!(g.encode(&[1, 0, 0]).unwrap(), 12);
    }

    #[test]
    fn arithmetic_is_componentwise() {
        let g = FiniteAbelianGroup::new(vec![2, 3]).unwrap();
        let a = g.encode(&[1, 2]).unwrap();
        let b = g.encode(&[1, 2]).unwrap();
        assert_eq!(g.decode(g.add(a, b)), vec![0, 1]);
        assert_eq!(g.decode(g.neg(a)), vec![1, 1]);
        for x in g.elements() {
            assert_eq!(g.add(x, g.neg(x)), 0);
            assert_eq!(g.sub(x, x), 0);
        }
    }

    #[test]
    fn product_group_pairs() {
        let g = FiniteAbelianGroup::cyclic(3).unwrap();
        let gg = g.product_with_self();
        assert_eq!(gg.order(), 9);
        assert_eq!(gg.factors(), &[3, 3]);
        assert_eq!(gg.encode(&[1, 2]).unwrap(), 3 + 2);
    }

    #[test]
    fn primality_and_legendre() {
        assert!(is_odd_prime(3));
        assert!(is_odd_prime(31));
        assert!(!is_odd_prime(2));
        assert!(!is_odd_prime(9));
        assert!(!is_odd_prime(1));
        // quadratic residues mod 7: 1, 2, 4
        assert_eq!(legendre_symbol(1, 7), 1);
        assert_eq!(legendre_symbol(2, 7), 1);
        assert_eq!(legendre_symbol(3, 7), -1);
        assert_eq!(legendre_symbol(4, 7), 1);
        assert_eq!(legendre_symbol(5, 7), -1);
        assert_eq!(legendre_symbol(6, 7), -1);
        assert_eq!(legendre_symbol(7, 7), 0);
    }
}
