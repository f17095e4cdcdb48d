//! Weyl shift/phase representations of a finite abelian group, the group
//! Fourier transform, and the closed forms built directly on them.

use crate::error::{Error, Result};
use crate::group::{is_odd_prime, legendre_symbol, FiniteAbelianGroup};
use crate::linalg::{Operator, Vector};
use crate::scalar::Scalar;
use num_complex::Complex;

/// e^{2πik/d} with k reduced mod d first. Quarter turns (k/d multiples of 1/4)
/// are returned exactly so that small-dimension phases like ±1 and ±i carry no
/// rounding dust.
pub fn root_of_unity<T: Scalar>(d: usize, k: i64) -> Complex<T> {
    let k = k.rem_euclid(d as i64) as usize;
    let quad = 4 * k;
    if quad.is_multiple_of(d) {
        return match (quad / d) % 4 {
            0 => Complex::new(T::one(), T::zero()),
            1 => Complex::new(T::zero(), T::one()),
            2 => Complex::new(-T::one(), T::zero()),
            _ => Complex::new(T::zero(), -T::one()),
        };
    }
    let angle = std::f64::consts::TAU * (k as f64) / (d as f64);
    Complex::new(T::of(angle.cos()), T::of(angle.sin()))
}

/// Shift representation U, phase representation V and the Fourier transform of
/// a finite abelian group, acting on the Hilbert space whose reference basis
/// {φ_k} is indexed by group elements.
///
/// U_x φ_k = φ_{k+x} and V_y φ_k = χ(y,k) φ_k, where χ is the product of the
/// per-factor roots of unity. For products of cyclic groups both
/// representations and the Fourier transform factorize over the tensor
/// decomposition of the space.
#[derive(Debug, Clone)]
pub struct WeylSystem<T: Scalar> {
    group: FiniteAbelianGroup,
    dim: usize,
    fourier: Operator<T>,
}

impl<T: Scalar> WeylSystem<T> {
    pub fn new(group: FiniteAbelianGroup) -> Self {
        let dim = group.order();
        let inv_sqrt_d = T::one() / T::of_usize(dim).sqrt();
        let fourier = Operator::from_fn(dim, |h, k| {
            char_value_in(&group, h, k).conj().scale(inv_sqrt_d)
        });
        WeylSystem {
            group,
            dim,
            fourier,
        }
    }

    /// Build over the cyclic group Z_d.
    pub fn cyclic(d: usize) -> Result<Self> {
        Ok(Self::new(FiniteAbelianGroup::cyclic(d)?))
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Primitive root of unity per cyclic factor.
    pub fn primitive_roots(&self) -> Vec<Complex<T>> {
        self.group
            .factors()
            .iter()
            .map(|&f| root_of_unity::<T>(f, 1))
            .collect()
    }

    /// χ(a, b) = Π_i ω_i^{a_i b_i}; the bicharacter pairing group elements.
    pub fn char_value(&self, a: usize, b: usize) -> Complex<T> {
        char_value_in(&self.group, a, b)
    }

    /// Reference basis vector φ_k.
    pub fn basis_vector(&self, k: usize) -> Vector<T> {
        Vector::basis(self.dim, k)
    }

    /// Fourier-conjugate basis vector ψ_k, the k-th column of the adjoint
    /// Fourier transform: the h-th entry of ψ_k is χ(h,k)/√d.
    pub fn conjugate_basis_vector(&self, k: usize) -> Vector<T> {
        let inv_sqrt_d = T::one() / T::of_usize(self.dim).sqrt();
        Vector::from_entries(
            (0..self.dim)
                .map(|h| self.char_value(h, k).scale(inv_sqrt_d))
                .collect(),
        )
    }

    /// Shift operator U_x.
    pub fn shift(&self, x: usize) -> Result<Operator<T>> {
        self.group.check_element(x)?;
        let mut m = Operator::zeros(self.dim);
        for k in 0..self.dim {
            m.set(self.group.add(k, x), k, Complex::new(T::one(), T::zero()));
        }
        Ok(m)
    }

    /// Phase operator V_y.
    pub fn phase_op(&self, y: usize) -> Result<Operator<T>> {
        self.group.check_element(y)?;
        let mut m = Operator::zeros(self.dim);
        for k in 0..self.dim {
            m.set(k, k, self.char_value(y, k));
        }
        Ok(m)
    }

    /// Product U_x V_y, assembled entrywise: column k carries χ(y,k) at row k+x.
    pub fn weyl(&self, x: usize, y: usize) -> Result<Operator<T>> {
        self.group.check_element(x)?;
        self.group.check_element(y)?;
        let mut m = Operator::zeros(self.dim);
        for k in 0..self.dim {
            m.set(self.group.add(k, x), k, self.char_value(y, k));
        }
        Ok(m)
    }

    pub fn fourier(&self) -> &Operator<T> {
        &self.fourier
    }

    pub fn fourier_adjoint(&self) -> Operator<T> {
        self.fourier.adjoint()
    }

    /// tr(a · U_x V_y) in O(d), using that U_x V_y has one entry per column.
    pub fn weyl_trace(&self, a: &Operator<T>, x: usize, y: usize) -> Complex<T> {
        debug_assert_eq!(a.dim(), self.dim);
        let mut acc = Complex::new(T::zero(), T::zero());
        for k in 0..self.dim {
            acc = acc + a.get(k, self.group.add(k, x)) * self.char_value(y, k);
        }
        acc
    }

    /// Expansion coefficient tr(a · V_y† U_x†) in O(d).
    pub fn weyl_coefficient(&self, a: &Operator<T>, x: usize, y: usize) -> Complex<T> {
        debug_assert_eq!(a.dim(), self.dim);
        let mut acc = Complex::new(T::zero(), T::zero());
        for k in 0..self.dim {
            acc = acc + a.get(self.group.add(k, x), k) * self.char_value(y, k).conj();
        }
        acc
    }
}

/// Construct the Weyl system for a group; fails on invalid factor lists.
pub fn build_weyl_system<T: Scalar>(factors: Vec<usize>) -> Result<WeylSystem<T>> {
    Ok(WeylSystem::new(FiniteAbelianGroup::new(factors)?))
}

fn char_value_in<T: Scalar>(group: &FiniteAbelianGroup, a: usize, b: usize) -> Complex<T> {
    let (ra, rb) = (group.decode(a), group.decode(b));
    let mut acc = Complex::new(T::one(), T::zero());
    for ((&x, &y), &f) in ra.iter().zip(&rb).zip(group.factors()) {
        acc = acc * root_of_unity::<T>(f, (x * y) as i64);
    }
    acc
}

/// Normalized quadratic exponential sum (1/√p) Σ_x ω^{ax²} over Z_p.
///
/// For odd prime p and a ≢ 0 its value is the Legendre symbol (a|p) times 1
/// when p ≡ 1 (mod 4) and times i when p ≡ 3 (mod 4).
pub fn gauss_sum<T: Scalar>(p: usize, a: usize) -> Result<Complex<T>> {
    if !is_odd_prime(p) {
        return Err(Error::InvalidParameter {
            name: "p",
            message: format!("{p} is not an odd prime"),
        });
    }
    if a.is_multiple_of(p) {
        return Err(Error::InvalidParameter {
            name: "a",
            message: format!("{a} vanishes mod {p}"),
        });
    }
    let mut acc = Complex::new(T::zero(), T::zero());
    for x in 0..p {
        acc = acc + root_of_unity::<T>(p, (a * x * x) as i64);
    }
    Ok(acc.scale(T::one() / T::of_usize(p).sqrt()))
}

/// Closed form of the Legendre evaluation of [`gauss_sum`], for cross-checks.
pub fn gauss_sum_closed_form<T: Scalar>(p: usize, a: usize) -> Result<Complex<T>> {
    if !is_odd_prime(p) || a.is_multiple_of(p) {
        return Err(Error::InvalidParameter {
            name: "p,a",
            message: "requires odd prime p and a nonzero mod p".into(),
        });
    }
    let sign = T::of(legendre_symbol(a, p) as f64);
    Ok(if p % 4 == 1 {
        Complex::new(sign, T::zero())
    } else {
        Complex::new(T::zero(), sign)
    })
}

/// Amplitude pair (α, β) of the minimal-noise generator vector αφ₀ + βψ₀ at
/// unsharpness λ in dimension d: α = (√((d−1)λ+1) − √(1−λ))/√d, β = √(1−λ).
pub fn smearing_amplitudes<T: Scalar>(lambda: T, d: usize) -> Result<(T, T)> {
    check_unsharpness(lambda, "lambda")?;
    let df = T::of_usize(d);
    let alpha =
        (((df - T::one()) * lambda + T::one()).sqrt() - (T::one() - lambda).sqrt()) / df.sqrt();
    let beta = (T::one() - lambda).sqrt();
    Ok((alpha, beta))
}

/// Square root of the depolarized effect λ|φ_j⟩⟨φ_j| + (1−λ)𝟙/d in closed
/// form: (β/√d)·𝟙 + α·|φ_j⟩⟨φ_j| with (α, β) the smearing amplitudes.
pub fn smeared_effect_sqrt<T: Scalar>(
    ws: &WeylSystem<T>,
    lambda: T,
    j: usize,
) -> Result<Operator<T>> {
    ws.group().check_element(j)?;
    let (alpha, beta) = smearing_amplitudes(lambda, ws.dim())?;
    let mut m = Operator::identity(ws.dim()).scaled_re(beta / T::of_usize(ws.dim()).sqrt());
    m.add_assign_scaled(
        &Operator::projector(&ws.basis_vector(j)),
        Complex::new(alpha, T::zero()),
    );
    Ok(m)
}

pub(crate) fn check_unsharpness<T: Scalar>(x: T, name: &'static str) -> Result<()> {
    if x < T::zero() || x > T::one() || !x.is_finite() {
        return Err(Error::InvalidParameter {
            name,
            message: format!("{x} is outside [0, 1]"),
        });
    }
    Ok(())
}
