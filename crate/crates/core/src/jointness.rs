//! Covariant phase-space observables and the exact joint-measurability
//! boundary for depolarized conjugate observables.

use crate::error::{Error, Result};
use crate::linalg::{DensityOperator, Operator, Vector};
use crate::povm::{marginals, Outcomes, Povm, ProbDist};
use crate::scalar::{Scalar, Tolerances};
use crate::weyl::{check_unsharpness, smearing_amplitudes, WeylSystem};
use num_complex::Complex;

/// Point on the boundary curve λ ↦ γ_max(λ): the largest second noise
/// parameter still jointly measurable with the first, together with the
/// amplitudes (α, β) of the unique minimal-noise generator vector
/// χ = αφ₀ + βψ₀.
#[derive(Debug, Clone)]
pub struct BoundaryPoint<T: Scalar> {
    pub lambda: T,
    pub gamma_max: T,
    pub alpha: T,
    pub beta: T,
    /// χ as a coordinate vector over Z_d: entry 0 is α + β/√d, the rest β/√d.
    pub chi: Vector<T>,
}

/// γ_max(λ) = [(d−2)(1−λ) + 2√((1−λ)(1+(d−1)λ))] / d, the exact boundary of
/// joint measurability for the depolarized conjugate pair in dimension d.
pub fn gamma_max<T: Scalar>(lambda: T, d: usize) -> Result<BoundaryPoint<T>> {
    check_unsharpness(lambda, "lambda")?;
    if d < 2 {
        return Err(Error::InvalidParameter {
            name: "d",
            message: format!("dimension {d} is below 2"),
        });
    }
    let df = T::of_usize(d);
    let one = T::one();
    let two = T::of(2.0);
    let radicand = (one - lambda) * ((df - one) * lambda + one);
    let g = ((df - two) * (one - lambda) + two * radicand.sqrt()) / df;
    let (alpha, beta) = smearing_amplitudes(lambda, d)?;
    let inv_sqrt_d = one / df.sqrt();
    let mut chi = Vector::from_entries(vec![Complex::new(beta * inv_sqrt_d, T::zero()); d]);
    chi.set(0, Complex::new(alpha + beta * inv_sqrt_d, T::zero()));
    Ok(BoundaryPoint {
        lambda,
        gamma_max: g,
        alpha,
        beta,
        chi,
    })
}

/// Quadratic form of the noise region: γ² + λ² + (2(d−2)/d)(1−γ)(1−λ). Values
/// at most 1 put (λ, γ) inside the elliptical clause of the region.
pub fn ellipse_form<T: Scalar>(lambda: T, gamma: T, d: usize) -> T {
    let c = T::of(2.0) * T::of_usize(d - 2) / T::of_usize(d);
    gamma * gamma + lambda * lambda + c * (T::one() - gamma) * (T::one() - lambda)
}

/// The two linear, symmetric criteria bracketing the exact region:
/// γ + λ ≤ 1 is sufficient for joint measurability, and
/// γ + λ ≤ 1 + (√d−1)/(d−1) is necessary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinearCriteria {
    pub sufficient: bool,
    pub necessary: bool,
}

pub fn linear_criteria<T: Scalar>(lambda: T, gamma: T, d: usize) -> LinearCriteria {
    let sum = lambda + gamma;
    let df = T::of_usize(d);
    let bound = T::one() + (df.sqrt() - T::one()) / (df - T::one());
    LinearCriteria {
        sufficient: sum <= T::one(),
        necessary: sum <= bound,
    }
}

/// Verdict of the joint-measurability test, with a certificate generator when
/// the pair is measurable.
#[derive(Debug, Clone)]
pub struct JointDecision<T: Scalar> {
    pub jointly_measurable: bool,
    pub gamma_max: T,
    /// Generator state whose covariant observable has the requested marginals.
    pub certificate: Option<DensityOperator<T>>,
}

/// Decide joint measurability of the depolarized pair at (λ, γ): true iff
/// γ + λ ≤ 1 or the ellipse form is at most 1. Points within the boundary
/// margin (measured in γ) also count as measurable, since the region is
/// closed. On success a certificate generator over Z_d is attached.
pub fn is_jointly_measurable<T: Scalar>(
    lambda: T,
    gamma: T,
    d: usize,
    tol: &Tolerances<T>,
) -> Result<JointDecision<T>> {
    check_unsharpness(lambda, "lambda")?;
    check_unsharpness(gamma, "gamma")?;
    let bp = gamma_max(lambda, d)?;
    let inside_line = gamma + lambda <= T::one();
    let inside_ellipse = ellipse_form(lambda, gamma, d) <= T::one();
    let within_margin = gamma <= bp.gamma_max + tol.boundary;
    let jm = inside_line || inside_ellipse || within_margin;
    let certificate = if jm {
        Some(certificate_generator(lambda, gamma, d)?)
    } else {
        None
    };
    Ok(JointDecision {
        jointly_measurable: jm,
        gamma_max: bp.gamma_max,
        certificate,
    })
}

/// Scale t₀ ≥ 1 at which the ray through (γ, λ) leaves the noise region, i.e.
/// t₀·(γ, λ) sits on the boundary curve. Solves the ellipse quadratic in the
/// ray parameter and takes the larger root; for points at or slightly past
/// the boundary the scale is clamped to 1.
pub fn ray_boundary_scale<T: Scalar>(lambda: T, gamma: T, d: usize) -> Result<T> {
    let zero = T::zero();
    if lambda < zero || gamma < zero {
        return Err(Error::InvalidParameter {
            name: "lambda,gamma",
            message: "ray needs nonnegative coordinates".into(),
        });
    }
    if lambda.is_zero() && gamma.is_zero() {
        return Err(Error::InvalidParameter {
            name: "lambda,gamma",
            message: "ray through the origin is undefined".into(),
        });
    }
    let c = T::of(2.0) * T::of_usize(d - 2) / T::of_usize(d);
    let a = gamma * gamma + lambda * lambda + c * gamma * lambda;
    let b = -c * (gamma + lambda);
    let e = c - T::one();
    let disc = (b * b - T::of(4.0) * a * e).max(zero);
    let t = (-b + disc.sqrt()) / (T::of(2.0) * a);
    Ok(t.max(T::one()))
}

/// Generator state certifying joint measurability of the depolarized pair at
/// an interior or boundary point: the ray through (γ, λ) is pushed to the
/// boundary, the rank-one minimal-noise generator is taken there, and mixed
/// back with 𝟙/d so the marginals come out at exactly (λ, γ).
pub fn certificate_generator<T: Scalar>(
    lambda: T,
    gamma: T,
    d: usize,
) -> Result<DensityOperator<T>> {
    let df = T::of_usize(d);
    // axis targets: the ray lands on a corner of the region, where the
    // general formula is square-root sensitive; use the closed forms instead
    if gamma.is_zero() {
        let mut op = Operator::projector(&Vector::basis(d, 0)).scaled_re(lambda);
        op.add_assign_scaled(
            &Operator::identity(d),
            Complex::new((T::one() - lambda) / df, T::zero()),
        );
        return Ok(DensityOperator::new(op));
    }
    if lambda.is_zero() {
        // projector onto the flat conjugate basis vector: all entries 1/d
        let flat = Operator::from_fn(d, |_, _| Complex::new(T::one() / df, T::zero()));
        let mut op = flat.scaled_re(gamma);
        op.add_assign_scaled(
            &Operator::identity(d),
            Complex::new((T::one() - gamma) / df, T::zero()),
        );
        return Ok(DensityOperator::new(op));
    }
    let t0 = ray_boundary_scale(lambda, gamma, d)?;
    let lambda0 = (t0 * lambda).min(T::one());
    let tau = T::one() - T::one() / t0;
    let bp = gamma_max(lambda0, d)?;
    let mut op = Operator::projector(&bp.chi).scaled_re(T::one() - tau);
    op.add_assign_scaled(
        &Operator::identity(d),
        Complex::new(tau / T::of_usize(d), T::zero()),
    );
    Ok(DensityOperator::new(op))
}

/// Covariant phase-space observable: the d² effects (1/d)·W T W† with W
/// ranging over the Weyl operators, determined one-to-one by the generator
/// state T.
#[derive(Debug, Clone)]
pub struct PhaseSpaceObservable<T: Scalar> {
    ws: WeylSystem<T>,
    generator: DensityOperator<T>,
    povm: Povm<T>,
}

impl<T: Scalar> PhaseSpaceObservable<T> {
    fn build(generator: DensityOperator<T>, ws: &WeylSystem<T>) -> Result<Self> {
        let d = ws.dim();
        if generator.dim() != d {
            return Err(Error::ShapeMismatch(format!(
                "generator of dimension {} over a Weyl system of dimension {d}",
                generator.dim()
            )));
        }
        let scale = T::one() / T::of_usize(d);
        let mut effects = Vec::with_capacity(d * d);
        for j in 0..d {
            for k in 0..d {
                let w = ws.weyl(j, k)?;
                effects.push(generator.op().conjugate_by(&w).scaled_re(scale));
            }
        }
        let povm = Povm::new(Outcomes::Pair(ws.group().clone()), effects)?;
        Ok(PhaseSpaceObservable {
            ws: ws.clone(),
            generator,
            povm,
        })
    }

    pub fn weyl_system(&self) -> &WeylSystem<T> {
        &self.ws
    }

    pub fn generator(&self) -> &DensityOperator<T> {
        &self.generator
    }

    pub fn povm(&self) -> &Povm<T> {
        &self.povm
    }

    pub fn into_povm(self) -> Povm<T> {
        self.povm
    }

    pub fn effect(&self, j: usize, k: usize) -> Result<&Operator<T>> {
        self.povm.effect_at(j, k)
    }

    /// Largest deviation from phase-space covariance over all translations.
    pub fn covariance_deviation(&self) -> Result<T> {
        let d = self.ws.dim();
        let g = self.ws.group();
        let mut worst = T::zero();
        for x in 0..d {
            for y in 0..d {
                let w = self.ws.weyl(x, y)?;
                for j in 0..d {
                    for k in 0..d {
                        let moved = self.povm.effect_at(j, k)?.conjugate_by(&w);
                        let target = self.povm.effect_at(g.add(j, x), g.add(k, y))?;
                        worst = worst.max(moved.max_abs_diff(target));
                    }
                }
            }
        }
        Ok(worst)
    }
}

/// Build the covariant phase-space observable generated by a state. The state
/// is validated first.
pub fn covariant_observable<T: Scalar>(
    generator: &DensityOperator<T>,
    ws: &WeylSystem<T>,
    tol: &Tolerances<T>,
) -> Result<PhaseSpaceObservable<T>> {
    generator.validate(tol.eq, tol.psd)?;
    PhaseSpaceObservable::build(generator.clone(), ws)
}

/// Noise profiles (Λ, Γ) of the marginals of the covariant observable with
/// generator T: Λ(j) = tr(A(−j) T) and Γ(k) = tr(B(−k) T).
pub fn generator_marginal_dists<T: Scalar>(
    generator: &DensityOperator<T>,
    ws: &WeylSystem<T>,
) -> (ProbDist<T>, ProbDist<T>) {
    let g = ws.group();
    let d = ws.dim();
    let lam: Vec<T> = (0..d)
        .map(|j| {
            let phi = ws.basis_vector(g.neg(j));
            phi.inner(&generator.op().apply(&phi)).re.max(T::zero())
        })
        .collect();
    let gam: Vec<T> = (0..d)
        .map(|k| {
            let psi = ws.conjugate_basis_vector(g.neg(k));
            psi.inner(&generator.op().apply(&psi)).re.max(T::zero())
        })
        .collect();
    (
        ProbDist::new(g.clone(), lam).expect("marginal profile has group length"),
        ProbDist::new(g.clone(), gam).expect("marginal profile has group length"),
    )
}

/// Noise profiles read off a purification vector φ in H ⊗ H:
/// Λ(j) = ⟨φ|(A(−j)⊗𝟙)φ⟩ and Γ(k) = ⟨φ|(B(−k)⊗𝟙)φ⟩. Equals
/// [`generator_marginal_dists`] of the partial trace of |φ⟩⟨φ| over the
/// second factor.
pub fn marginals_from_purification<T: Scalar>(
    phi: &Vector<T>,
    ws: &WeylSystem<T>,
) -> Result<(ProbDist<T>, ProbDist<T>)> {
    let d = ws.dim();
    if phi.dim() != d * d {
        return Err(Error::ShapeMismatch(format!(
            "purification lives in dimension {}, expected {}",
            phi.dim(),
            d * d
        )));
    }
    let norm = phi.norm();
    if (norm - T::one()).abs() > T::of(1e-12).max(T::epsilon() * T::of(100.0)) {
        return Err(Error::InvalidState(format!(
            "purification has norm {norm}, expected a unit vector"
        )));
    }
    let g = ws.group();
    let lam: Vec<T> = (0..d)
        .map(|j| {
            let row = g.neg(j);
            (0..d)
                .map(|m| phi.get(row * d + m).norm_sqr())
                .fold(T::zero(), |a, b| a + b)
        })
        .collect();
    let gam: Vec<T> = (0..d)
        .map(|k| {
            let psi = ws.conjugate_basis_vector(g.neg(k));
            (0..d)
                .map(|m| {
                    let amp = (0..d)
                        .map(|i| psi.get(i).conj() * phi.get(i * d + m))
                        .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b);
                    amp.norm_sqr()
                })
                .fold(T::zero(), |a, b| a + b)
        })
        .collect();
    Ok((
        ProbDist::new(g.clone(), lam)?,
        ProbDist::new(g.clone(), gam)?,
    ))
}

/// Partial trace over the second tensor factor of |φ⟩⟨φ|.
pub fn partial_trace_second<T: Scalar>(phi: &Vector<T>, d: usize) -> DensityOperator<T> {
    debug_assert_eq!(phi.dim(), d * d);
    let op = Operator::from_fn(d, |a, b| {
        (0..d)
            .map(|m| phi.get(a * d + m) * phi.get(b * d + m).conj())
            .fold(Complex::new(T::zero(), T::zero()), |x, y| x + y)
    });
    DensityOperator::new(op)
}

/// Average a joint observable over all phase-space translations:
/// C̃(j,k) = (1/d²) Σ_{x,y} W_{x,y}† C(j+x, k+y) W_{x,y}. The result is
/// covariant with the same depolarized marginals; bias terms in the marginals
/// are flattened to uniform.
pub fn covariantize<T: Scalar>(
    joint: &Povm<T>,
    ws: &WeylSystem<T>,
) -> Result<PhaseSpaceObservable<T>> {
    let g = match joint.outcomes() {
        Outcomes::Pair(g) => g.clone(),
        Outcomes::Single(_) => {
            return Err(Error::ShapeMismatch(
                "covariantization needs a joint observable on G × G".into(),
            ))
        }
    };
    if &g != ws.group() || joint.dim() != ws.dim() {
        return Err(Error::ShapeMismatch(
            "joint observable and Weyl system live over different groups".into(),
        ));
    }
    let d = ws.dim();
    let scale = Complex::new(T::one() / T::of_usize(d * d), T::zero());
    // averaged effect at the origin determines the generator
    let mut at_origin = Operator::zeros(d);
    for x in 0..d {
        for y in 0..d {
            let w = ws.weyl(x, y)?;
            let moved = joint.effect(x * d + y).conjugate_by(&w.adjoint());
            at_origin.add_assign_scaled(&moved, scale);
        }
    }
    let generator = DensityOperator::new(at_origin.scaled_re(T::of_usize(d)));
    PhaseSpaceObservable::build(generator, ws)
}

/// The unique minimal-noise joint observable at unsharpness λ over Z_d: the
/// covariant observable generated by the rank-one projector onto χ_λ. Its
/// marginals are the depolarized pair at (λ, γ_max(λ)).
pub fn extremal_joint_observable<T: Scalar>(
    lambda: T,
    d: usize,
) -> Result<PhaseSpaceObservable<T>> {
    let ws = WeylSystem::cyclic(d)?;
    let generator = boundary_generator(lambda, &ws)?;
    PhaseSpaceObservable::build(generator, &ws)
}

/// Rank-one generator |χ_λ⟩⟨χ_λ| over an arbitrary Weyl system, with
/// χ_λ = α_λ φ₀ + β_λ ψ₀.
pub fn boundary_generator<T: Scalar>(lambda: T, ws: &WeylSystem<T>) -> Result<DensityOperator<T>> {
    let (alpha, beta) = smearing_amplitudes(lambda, ws.dim())?;
    let chi = ws
        .basis_vector(0)
        .scaled(Complex::new(alpha, T::zero()))
        .add(
            &ws.conjugate_basis_vector(0)
                .scaled(Complex::new(beta, T::zero())),
        );
    Ok(DensityOperator::pure(&chi))
}

/// Marginal noise profiles of a covariant observable as distributions, read
/// off the observable itself (sums of effects, then diagonal weights).
pub fn depolarizing_parameters_of_marginals<T: Scalar>(
    obs: &PhaseSpaceObservable<T>,
) -> Result<(T, T)> {
    let (ma, mb) = marginals(obs.povm())?;
    let d = T::of_usize(obs.weyl_system().dim());
    // For a depolarized marginal λA + (1−λ)𝟙/d, entry (0,0) of effect 0 is
    // λ + (1−λ)/d.
    let a00 = ma.effect(0).get(0, 0).re;
    let lambda = (a00 * d - T::one()) / (d - T::one());
    let psi0 = obs.weyl_system().conjugate_basis_vector(0);
    let b00 = psi0.inner(&mb.effect(0).apply(&psi0)).re;
    let gamma = (b00 * d - T::one()) / (d - T::one());
    Ok((lambda, gamma))
}
