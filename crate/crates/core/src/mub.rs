//! Full families of mutually unbiased bases in odd prime dimension.

use crate::error::{Error, Result};
use crate::group::{is_odd_prime, legendre_symbol};
use crate::linalg::Vector;
use crate::scalar::Scalar;
use crate::weyl::root_of_unity;

/// The p+1 mutually unbiased bases of an odd-prime-dimensional space: the
/// reference basis {φ_j} followed by the quadratic-phase bases
/// ψ^a_k = (1/√p) Σ_x ω^{ax²+kx} φ_x for a = 0..p−1. Pairwise unbiasedness of
/// the quadratic bases reduces to normalized quadratic exponential sums.
#[derive(Debug, Clone)]
pub struct MubFamily<T: Scalar> {
    p: usize,
    bases: Vec<Vec<Vector<T>>>,
    legendre: Vec<i32>,
}

impl<T: Scalar> MubFamily<T> {
    pub fn prime(p: usize) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::InvalidParameter {
                name: "p",
                message: format!("{p} is not an odd prime"),
            });
        }
        if p > 31 {
            return Err(Error::InvalidParameter {
                name: "p",
                message: format!("{p} exceeds the supported desk scale (31)"),
            });
        }
        let inv_sqrt_p = T::one() / T::of_usize(p).sqrt();
        let mut bases = Vec::with_capacity(p + 1);
        bases.push((0..p).map(|j| Vector::basis(p, j)).collect::<Vec<_>>());
        for a in 0..p {
            let basis = (0..p)
                .map(|k| {
                    Vector::from_entries(
                        (0..p)
                            .map(|x| {
                                root_of_unity::<T>(p, (a * x * x + k * x) as i64).scale(inv_sqrt_p)
                            })
                            .collect(),
                    )
                })
                .collect();
            bases.push(basis);
        }
        let legendre = (0..p).map(|a| legendre_symbol(a, p)).collect();
        Ok(MubFamily { p, bases, legendre })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Number of bases, always p + 1.
    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Basis 0 is the reference basis; basis 1+a is the quadratic basis with
    /// curvature a.
    pub fn basis(&self, i: usize) -> &[Vector<T>] {
        &self.bases[i]
    }

    pub fn bases(&self) -> &[Vec<Vector<T>>] {
        &self.bases
    }

    /// Cached Legendre symbol table (a|p) for a = 0..p−1.
    pub fn legendre_table(&self) -> &[i32] {
        &self.legendre
    }

    /// Largest deviation of ||⟨u|v⟩|² − 1/p| over all cross-basis vector pairs,
    /// and of |⟨u|v⟩ − δ| within each basis.
    pub fn max_unbiasedness_deviation(&self) -> T {
        let inv_p = T::one() / T::of_usize(self.p);
        let mut worst = T::zero();
        for (i, bi) in self.bases.iter().enumerate() {
            for (j, bj) in self.bases.iter().enumerate() {
                for (r, u) in bi.iter().enumerate() {
                    for (s, v) in bj.iter().enumerate() {
                        let ip = u.inner(v).norm_sqr();
                        let target = if i == j {
                            if r == s {
                                T::one()
                            } else {
                                T::zero()
                            }
                        } else {
                            inv_p
                        };
                        worst = worst.max((ip - target).abs());
                    }
                }
            }
        }
        worst
    }
}

/// Construct the full MUB family in odd prime dimension p ≤ 31.
pub fn mub_family_prime<T: Scalar>(p: usize) -> Result<MubFamily<T>> {
    MubFamily::prime(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::WeylSystem;

    #[test]
    fn rejects_non_prime_and_large_inputs() {
        assert!(mub_family_prime::<f64>(2).is_err());
        assert!(mub_family_prime::<f64>(9).is_err());
        assert!(mub_family_prime::<f64>(37).is_err());
    }

    #[test]
    fn family_sizes() {
        assert_eq!(mub_family_prime::<f64>(3).unwrap().len(), 4);
        assert_eq!(mub_family_prime::<f64>(5).unwrap().len(), 6);
    }

    #[test]
    fn all_pairs_unbiased_p3() {
        let fam = mub_family_prime::<f64>(3).unwrap();
        assert!(fam.max_unbiasedness_deviation() < 1e-10);
    }

    #[test]
    fn zero_curvature_basis_is_the_conjugate_basis() {
        let fam = mub_family_prime::<f64>(5).unwrap();
        let ws = WeylSystem::<f64>::cyclic(5).unwrap();
        for k in 0..5 {
            let overlap = fam.basis(1)[k].inner(&ws.conjugate_basis_vector(k)).norm();
            assert!((overlap - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn legendre_table_is_cached() {
        let fam = mub_family_prime::<f64>(7).unwrap();
        assert_eq!(fam.legendre_table(), &[0, 1, 1, -1, 1, -1, -1]);
    }
}
