//! Informational completeness: span and coefficient criteria, the Weyl
//! expansion and its inversion, linear-inversion tomography, and the
//! construction of informationally complete joint observables strictly inside
//! the noise region.

use crate::error::{Error, Result};
use crate::jointness::{covariant_observable, gamma_max, ray_boundary_scale, PhaseSpaceObservable};
use crate::linalg::{span_rank, span_singular_values, DensityOperator, Operator, Vector};
use crate::povm::{marginals, Outcomes, Povm};
use crate::scalar::{Scalar, Tolerances};
use crate::weyl::WeylSystem;
use num_complex::Complex;
use std::collections::BTreeMap;

/// Span-side informational completeness report: the numerical rank of the
/// effect span against the full operator-space dimension d².
#[derive(Debug, Clone)]
pub struct SpanIc<T: Scalar> {
    pub span_rank: usize,
    pub is_ic_by_span: bool,
    pub singular_values: Vec<T>,
}

/// Rank of the linear span of the effects, with singular values thresholded
/// relative to the largest.
pub fn ic_by_span<T: Scalar>(povm: &Povm<T>, tol: &Tolerances<T>) -> SpanIc<T> {
    let singular_values = span_singular_values(povm.effects());
    let rank = match singular_values.first() {
        None => 0,
        Some(&top) if top.is_zero() => 0,
        Some(&top) => singular_values
            .iter()
            .filter(|&&s| s > tol.rank * top)
            .count(),
    };
    let d = povm.dim();
    SpanIc {
        span_rank: rank,
        is_ic_by_span: rank == d * d,
        singular_values,
    }
}

/// Coefficient-side informational completeness report for a covariant
/// observable with generator T: all d² values tr(T·U_x V_y), their smallest
/// modulus, and the verdict min > τ_ic.
#[derive(Debug, Clone)]
pub struct CoefficientIc<T: Scalar> {
    pub weyl_coefficients: BTreeMap<(usize, usize), Complex<T>>,
    pub min_abs_coefficient: T,
    /// Pair realizing the minimum modulus.
    pub argmin: (usize, usize),
    pub is_ic_by_criterion: bool,
}

pub fn ic_by_criterion<T: Scalar>(
    generator: &DensityOperator<T>,
    ws: &WeylSystem<T>,
    tol: &Tolerances<T>,
) -> CoefficientIc<T> {
    let d = ws.dim();
    let mut coeffs = BTreeMap::new();
    let mut min = T::infinity();
    let mut argmin = (0, 0);
    for x in 0..d {
        for y in 0..d {
            let c = ws.weyl_trace(generator.op(), x, y);
            if c.norm() < min {
                min = c.norm();
                argmin = (x, y);
            }
            coeffs.insert((x, y), c);
        }
    }
    CoefficientIc {
        weyl_coefficients: coeffs,
        min_abs_coefficient: min,
        argmin,
        is_ic_by_criterion: min > tol.ic,
    }
}

/// Expansion coefficients c(x,y) = tr(A·V_y†U_x†) of an arbitrary operator in
/// the Weyl basis.
pub fn weyl_coefficients<T: Scalar>(
    a: &Operator<T>,
    ws: &WeylSystem<T>,
) -> BTreeMap<(usize, usize), Complex<T>> {
    let d = ws.dim();
    let mut out = BTreeMap::new();
    for x in 0..d {
        for y in 0..d {
            out.insert((x, y), ws.weyl_coefficient(a, x, y));
        }
    }
    out
}

/// Inverse of [`weyl_coefficients`]: A = (1/d) Σ_{x,y} c(x,y)·U_x V_y.
pub fn reconstruct_from_coefficients<T: Scalar>(
    coeffs: &BTreeMap<(usize, usize), Complex<T>>,
    ws: &WeylSystem<T>,
) -> Operator<T> {
    let d = ws.dim();
    let g = ws.group();
    let inv_d = T::one() / T::of_usize(d);
    let mut a = Operator::zeros(d);
    for (&(x, y), &c) in coeffs {
        let w = c.scale(inv_d);
        for col in 0..d {
            let row = g.add(col, x);
            let v = a.get(row, col) + w * ws.char_value(y, col);
            a.set(row, col, v);
        }
    }
    a
}

/// Linear-inversion tomography engine for a covariant observable.
///
/// The forward map sends a state to its d² outcome probabilities. It
/// factorizes as a chain of elementary linear maps on the coefficient space:
/// pack the Weyl coefficients, multiply by the generator coefficients, rotate
/// by the doubled Fourier transform, reindex. Inversion runs the chain
/// backwards, which is possible exactly when no generator coefficient
/// vanishes.
#[derive(Debug, Clone)]
pub struct TomographyPipeline<T: Scalar> {
    observable: PhaseSpaceObservable<T>,
    coeffs: Vec<Complex<T>>,
}

impl<T: Scalar> TomographyPipeline<T> {
    pub fn new(
        generator: &DensityOperator<T>,
        ws: &WeylSystem<T>,
        tol: &Tolerances<T>,
    ) -> Result<Self> {
        let observable = covariant_observable(generator, ws, tol)?;
        let d = ws.dim();
        let mut coeffs = Vec::with_capacity(d * d);
        for x in 0..d {
            for y in 0..d {
                coeffs.push(ws.weyl_trace(generator.op(), x, y));
            }
        }
        Ok(TomographyPipeline { observable, coeffs })
    }

    pub fn observable(&self) -> &PhaseSpaceObservable<T> {
        &self.observable
    }

    /// tr(T·U_x V_y) for the flat index x·d + y.
    pub fn generator_coefficients(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn min_abs_coefficient(&self) -> T {
        self.coeffs
            .iter()
            .map(|c| c.norm())
            .fold(T::infinity(), |a, b| a.min(b))
    }

    /// Outcome probabilities of a state, flat index (j, k) = j·d + k.
    pub fn forward(&self, rho: &Operator<T>) -> Vec<T> {
        self.observable.povm().probabilities(rho)
    }

    /// Matrix of the forward map on the coefficient space: row (h·d+k) is the
    /// functional A ↦ tr(C(h,k)·A) against row-major vec(A).
    pub fn forward_matrix_direct(&self) -> Operator<T> {
        let d = self.observable.weyl_system().dim();
        Operator::from_fn(d * d, |row, col| {
            let e = self.observable.povm().effect(row);
            let (a, b) = (col / d, col % d);
            e.get(b, a)
        })
    }

    /// Coefficient-packing map: row (x·d+y) is the functional
    /// A ↦ (1/d)·tr(A V_y† U_x†) against row-major vec(A).
    pub fn packing_matrix(&self) -> Operator<T> {
        let ws = self.observable.weyl_system();
        let d = ws.dim();
        let inv_d = T::one() / T::of_usize(d);
        let g = ws.group();
        let mut pack = Operator::zeros(d * d);
        for x in 0..d {
            for y in 0..d {
                let row = x * d + y;
                // tr(A V_y†U_x†) = Σ_c A[c+x, c] · conj(χ(y, c))
                for c in 0..d {
                    pack.set(
                        row,
                        g.add(c, x) * d + c,
                        ws.char_value(y, c).conj().scale(inv_d),
                    );
                }
            }
        }
        pack
    }

    /// Diagonal multiplication by the generator coefficients tr(T·U_x V_y).
    pub fn multiplication_matrix(&self) -> Operator<T> {
        let n = self.coeffs.len();
        let mut mult = Operator::zeros(n);
        for (i, c) in self.coeffs.iter().enumerate() {
            mult.set(i, i, *c);
        }
        mult
    }

    /// The doubled rotation F ⊗ F† on the coefficient space.
    pub fn fourier_pair_matrix(&self) -> Operator<T> {
        let ws = self.observable.weyl_system();
        ws.fourier().kron(&ws.fourier_adjoint())
    }

    /// Index swap: output slot (x, y) reads tensor coordinate (y, x).
    pub fn reindexing_matrix(&self) -> Operator<T> {
        let d = self.observable.weyl_system().dim();
        let mut reindex = Operator::zeros(d * d);
        for x in 0..d {
            for y in 0..d {
                reindex.set(x * d + y, y * d + x, Complex::new(T::one(), T::zero()));
            }
        }
        reindex
    }

    /// The same forward map assembled from the factor chain
    /// reindex ∘ (F ⊗ F†) ∘ (coefficient multiplication) ∘ (coefficient packing).
    pub fn forward_matrix_factored(&self) -> Operator<T> {
        self.reindexing_matrix()
            .matmul(&self.fourier_pair_matrix())
            .matmul(&self.multiplication_matrix())
            .matmul(&self.packing_matrix())
    }

    /// Recover the unique operator with the given outcome distribution.
    ///
    /// The output is symmetrized and trace-rescaled to 1, but deliberately not
    /// projected to the positive cone: the inversion stays a linear map.
    pub fn reconstruct(&self, probs: &[T], tol: &Tolerances<T>) -> Result<Operator<T>> {
        let ws = self.observable.weyl_system();
        let d = ws.dim();
        if probs.len() != d * d {
            return Err(Error::ShapeMismatch(format!(
                "{} probabilities for {} outcomes",
                probs.len(),
                d * d
            )));
        }
        let total: T = probs.iter().copied().sum();
        if (total - T::one()).abs() > T::of(1e-9) {
            return Err(Error::InvalidInput(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        if let Some(i) = (0..d * d).find(|&i| self.coeffs[i].norm() <= tol.ic) {
            return Err(Error::NotInformationallyComplete { x: i / d, y: i % d });
        }
        // undo the reindexing: tensor coordinate (a, b) holds probs(b, a)
        let mut vec_in = Vector::zeros(d * d);
        for a in 0..d {
            for b in 0..d {
                vec_in.set(a * d + b, Complex::new(probs[b * d + a], T::zero()));
            }
        }
        // undo the doubled Fourier rotation
        let fpair_adj = ws.fourier_adjoint().kron(ws.fourier());
        let rotated = fpair_adj.apply(&vec_in);
        // undo the coefficient multiplication and unpack
        let mut coeffs = BTreeMap::new();
        for x in 0..d {
            for y in 0..d {
                let i = x * d + y;
                coeffs.insert((x, y), rotated.get(i) / self.coeffs[i]);
            }
        }
        // unpacking differs from reconstruct_from_coefficients by the 1/d that
        // the packing row already carried
        let raw = reconstruct_from_coefficients(&coeffs, ws).scaled_re(T::of_usize(d));
        let herm = Operator::from_fn(d, |r, c| {
            (raw.get(r, c) + raw.get(c, r).conj()).scale(T::of(0.5))
        });
        let tr = herm.trace().re;
        Ok(herm.scaled_re(T::one() / tr))
    }
}

/// One-call linear inversion: see [`TomographyPipeline::reconstruct`].
pub fn tomography_reconstruct<T: Scalar>(
    probs: &[T],
    generator: &DensityOperator<T>,
    ws: &WeylSystem<T>,
    tol: &Tolerances<T>,
) -> Result<Operator<T>> {
    TomographyPipeline::new(generator, ws, tol)?.reconstruct(probs, tol)
}

/// Which branch the interior IC construction took.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Odd,
    Even,
}

/// Informationally complete covariant joint observable strictly inside the
/// noise region, with the full construction data.
#[derive(Debug, Clone)]
pub struct IcConstruction<T: Scalar> {
    pub lambda: T,
    pub gamma: T,
    /// Ray scale carrying (γ, λ) to the boundary point (γ₀, λ₀).
    pub t0: T,
    /// Mixing weight 1 − 1/t₀ toward the flattening term.
    pub tau: T,
    pub branch: Branch,
    /// Even branch only: perturbation weight, set to half its admissible bound.
    pub kappa: Option<T>,
    /// Even branch only: min/max of |ω^k + 1| over the admissible exponents.
    pub epsilon: Option<T>,
    pub delta_max: Option<T>,
    /// Even branch only: the antisymmetric kernels, their sum, and the
    /// perturbed flat state 𝟙/d + κX.
    pub x_parts: Option<Vec<Operator<T>>>,
    pub x_total: Option<Operator<T>>,
    pub s_kappa: Option<Operator<T>>,
    pub generator: DensityOperator<T>,
    pub observable: PhaseSpaceObservable<T>,
}

/// Build an informationally complete covariant joint observable with
/// depolarized marginals at exactly (λ, γ), for 0 < γ < γ_max(λ) and
/// λ ∉ {0, 1}.
///
/// Odd d mixes the boundary generator with 𝟙/d. Even d needs a perturbed
/// mixing term 𝟙/d + κX whose Weyl coefficients fill in the zeros that the
/// plain mixture would inherit on the half-period pairs.
pub fn construct_ic_joint<T: Scalar>(
    lambda: T,
    gamma: T,
    d: usize,
    tol: &Tolerances<T>,
) -> Result<IcConstruction<T>> {
    if lambda <= T::zero() || lambda >= T::one() {
        return Err(Error::IcImpossible(format!(
            "first marginal at unsharpness {lambda} is sharp or trivial"
        )));
    }
    if gamma <= T::zero() {
        return Err(Error::IcImpossible(
            "second marginal is trivial at gamma = 0".into(),
        ));
    }
    let bp = gamma_max(lambda, d)?;
    if gamma >= bp.gamma_max {
        return Err(Error::OutOfInterior(format!(
            "gamma {gamma} is not strictly below the boundary value {}",
            bp.gamma_max
        )));
    }
    let ws = WeylSystem::cyclic(d)?;
    let t0 = ray_boundary_scale(lambda, gamma, d)?;
    let tau = T::one() - T::one() / t0;
    if tau <= T::zero() {
        return Err(Error::OutOfInterior(
            "target sits numerically on the boundary, leaving no mixing room".into(),
        ));
    }
    let lambda0 = (t0 * lambda).min(T::one());
    let bp0 = gamma_max(lambda0, d)?;
    let chi_proj = Operator::projector(&bp0.chi);

    if d % 2 == 1 {
        let mut op = chi_proj.scaled_re(T::one() - tau);
        op.add_assign_scaled(
            &Operator::identity(d),
            Complex::new(tau / T::of_usize(d), T::zero()),
        );
        let generator = DensityOperator::new(op);
        let observable = covariant_observable(&generator, &ws, tol)?;
        return Ok(IcConstruction {
            lambda,
            gamma,
            t0,
            tau,
            branch: Branch::Odd,
            kappa: None,
            epsilon: None,
            delta_max: None,
            x_parts: None,
            x_total: None,
            s_kappa: None,
            generator,
            observable,
        });
    }

    // even dimension: antisymmetric kernels coupling φ₀ to φ_{±k}
    let g = ws.group().clone();
    let half_i = Complex::new(T::zero(), T::of(0.5));
    let x_parts: Vec<Operator<T>> = (0..d)
        .map(|k| {
            let phi0 = ws.basis_vector(0);
            let phik = ws.basis_vector(k);
            let phimk = ws.basis_vector(g.neg(k));
            let mut m = Operator::zeros(d);
            m.add_assign_scaled(&Operator::outer(&phimk, &phi0), half_i);
            m.add_assign_scaled(&Operator::outer(&phi0, &phimk), -half_i);
            m.add_assign_scaled(&Operator::outer(&phik, &phi0), half_i);
            m.add_assign_scaled(&Operator::outer(&phi0, &phik), -half_i);
            m
        })
        .collect();
    let mut x_total = Operator::zeros(d);
    let one = Complex::new(T::one(), T::zero());
    for xk in &x_parts {
        x_total.add_assign_scaled(xk, one);
    }
    let n = d / 2;
    let mut epsilon = T::infinity();
    let mut delta_max = T::zero();
    // |ω^k + 1| = 2|cos(πk/d)|
    for k in 0..d {
        let angle = std::f64::consts::PI * (k as f64) / (d as f64);
        let v = T::of(2.0 * angle.cos().abs());
        delta_max = delta_max.max(v);
        if k != n {
            epsilon = epsilon.min(v);
        }
    }
    let x_norm = x_total.hermitian_norm()?;
    let bound_psd = T::one() / (T::of_usize(d) * x_norm);
    let bound_coeff = bp0.alpha * bp0.beta * (T::one() - tau) * epsilon
        / (tau * delta_max * T::of_usize(d).sqrt());
    let kappa = T::of(0.5) * bound_psd.min(bound_coeff);
    let mut s_kappa = Operator::identity(d).scaled_re(T::one() / T::of_usize(d));
    s_kappa.add_assign_scaled(&x_total, Complex::new(kappa, T::zero()));
    let mut op = chi_proj.scaled_re(T::one() - tau);
    op.add_assign_scaled(&s_kappa, Complex::new(tau, T::zero()));
    let generator = DensityOperator::new(op);
    let observable = covariant_observable(&generator, &ws, tol)?;
    Ok(IcConstruction {
        lambda,
        gamma,
        t0,
        tau,
        branch: Branch::Even,
        kappa: Some(kappa),
        epsilon: Some(epsilon),
        delta_max: Some(delta_max),
        x_parts: Some(x_parts),
        x_total: Some(x_total),
        s_kappa: Some(s_kappa),
        generator,
        observable,
    })
}

/// Side of a joint observable whose marginal is the trivial observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginalSide {
    First,
    Second,
}

/// Rank-bound check for joint observables with a trivial marginal: the effect
/// span can never exceed 1 + d(d−1), so such observables are never
/// informationally complete.
#[derive(Debug, Clone)]
pub struct RankBoundCheck {
    pub span_rank: usize,
    pub bound: usize,
    pub holds: bool,
    pub trivial_marginal: MarginalSide,
}

pub fn trivial_marginal_rank_bound<T: Scalar>(
    joint: &Povm<T>,
    tol: &Tolerances<T>,
) -> Result<RankBoundCheck> {
    if !matches!(joint.outcomes(), Outcomes::Pair(_)) {
        return Err(Error::ShapeMismatch(
            "rank bound applies to joint observables on G × G".into(),
        ));
    }
    let d = joint.dim();
    let trivial = Operator::identity(d).scaled_re(T::one() / T::of_usize(d));
    let (ma, mb) = marginals(joint)?;
    let first_trivial = ma.effects().iter().all(|e| e.approx_eq(&trivial, tol.eq));
    let second_trivial = mb.effects().iter().all(|e| e.approx_eq(&trivial, tol.eq));
    let side = if first_trivial {
        MarginalSide::First
    } else if second_trivial {
        MarginalSide::Second
    } else {
        return Err(Error::InvalidPovm(
            "neither marginal is the trivial observable".into(),
        ));
    };
    let rank = span_rank(joint.effects(), tol.rank);
    let bound = 1 + d * (d - 1);
    Ok(RankBoundCheck {
        span_rank: rank,
        bound,
        holds: rank <= bound,
        trivial_marginal: side,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jointness::{extremal_joint_observable, generator_marginal_dists};
    use crate::povm::{conjugate_pair, ProbDist};
    use crate::random::{random_operator, random_state, rng_from_seed};

    fn tol() -> Tolerances<f64> {
        Default::default()
    }

    #[test]
    fn sharp_observable_spans_only_diagonals() {
        let ws = WeylSystem::<f64>::cyclic(3).unwrap();
        let (a, _) = conjugate_pair(&ws);
        let r = ic_by_span(&a, &tol());
        assert_eq!(r.span_rank, 3);
        assert!(!r.is_ic_by_span);
    }

    #[test]
    fn criterion_flat_generator_not_ic() {
        let ws = WeylSystem::<f64>::cyclic(3).unwrap();
        let r = ic_by_criterion(&DensityOperator::maximally_mixed(3), &ws, &tol());
        assert!(!r.is_ic_by_criterion);
        assert!((r.weyl_coefficients[&(0, 0)].re - 1.0).abs() < 1e-14);
        for (&(x, y), c) in &r.weyl_coefficients {
            if (x, y) != (0, 0) {
                assert!(c.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn criterion_boundary_generator_parity() {
        let t = tol();
        // even: the half-period pair kills the coefficient
        let ws2 = WeylSystem::<f64>::cyclic(2).unwrap();
        let g2 = crate::jointness::boundary_generator(0.5, &ws2).unwrap();
        let r2 = ic_by_criterion(&g2, &ws2, &t);
        assert!(!r2.is_ic_by_criterion);
        assert!(r2.weyl_coefficients[&(1, 1)].norm() < 1e-14);
        // odd: all coefficients survive
        let ws3 = WeylSystem::<f64>::cyclic(3).unwrap();
        let g3 = crate::jointness::boundary_generator(0.5, &ws3).unwrap();
        let r3 = ic_by_criterion(&g3, &ws3, &t);
        assert!(r3.is_ic_by_criterion);
        assert_eq!(r3.weyl_coefficients.len(), 9);
    }

    #[test]
    fn weyl_coefficient_examples_and_roundtrip() {
        let ws = WeylSystem::<f64>::cyclic(4).unwrap();
        let id = Operator::<f64>::identity(4);
        let c = weyl_coefficients(&id, &ws);
        assert!((c[&(0, 0)].re - 4.0).abs() < 1e-14);
        for (&(x, y), v) in &c {
            if (x, y) != (0, 0) {
                assert!(v.norm() < 1e-14);
            }
        }
        let u1 = ws.shift(1).unwrap();
        let c = weyl_coefficients(&u1, &ws);
        assert!((c[&(1, 0)].re - 4.0).abs() < 1e-14);
        for (&(x, y), v) in &c {
            if (x, y) != (1, 0) {
                assert!(v.norm() < 1e-13);
            }
        }
        let mut rng = rng_from_seed(31);
        let a = random_operator::<f64, _>(5, &mut rng);
        let ws5 = WeylSystem::<f64>::cyclic(5).unwrap();
        let rec = reconstruct_from_coefficients(&weyl_coefficients(&a, &ws5), &ws5);
        assert!(rec.approx_eq(&a, 1e-12));
    }

    #[test]
    fn pipeline_factorization_matches_direct_map() {
        let mut rng = rng_from_seed(41);
        for d in 2..=4usize {
            let ws = WeylSystem::<f64>::cyclic(d).unwrap();
            let t = random_state::<f64, _>(d, &mut rng);
            let pipe = TomographyPipeline::new(&t, &ws, &tol()).unwrap();
            let direct = pipe.forward_matrix_direct();
            let factored = pipe.forward_matrix_factored();
            assert!(
                direct.approx_eq(&factored, 1e-12),
                "factorization mismatch at d={d}: {}",
                direct.max_abs_diff(&factored)
            );
        }
    }

    #[test]
    fn tomography_uniform_probabilities_give_flat_state() {
        let ws = WeylSystem::<f64>::cyclic(3).unwrap();
        let gen = crate::jointness::boundary_generator(0.5, &ws).unwrap();
        let probs = vec![1.0 / 9.0; 9];
        let rho = tomography_reconstruct(&probs, &gen, &ws, &tol()).unwrap();
        assert!(rho.approx_eq(&Operator::identity(3).scaled_re(1.0 / 3.0), 1e-12));
    }

    #[test]
    fn tomography_round_trip_pure_state() {
        let ws = WeylSystem::<f64>::cyclic(3).unwrap();
        let gen = crate::jointness::boundary_generator(0.5, &ws).unwrap();
        let pipe = TomographyPipeline::new(&gen, &ws, &tol()).unwrap();
        let rho = DensityOperator::pure(&ws.basis_vector(0));
        let probs = pipe.forward(rho.op());
        let rec = pipe.reconstruct(&probs, &tol()).unwrap();
        assert!(rec.approx_eq(rho.op(), 1e-10));
    }

    #[test]
    fn tomography_rejects_non_ic_generator_naming_the_pair() {
        let ws = WeylSystem::<f64>::cyclic(2).unwrap();
        let gen = crate::jointness::boundary_generator(0.5, &ws).unwrap();
        let probs = vec![0.25; 4];
        match tomography_reconstruct(&probs, &gen, &ws, &tol()) {
            Err(Error::NotInformationallyComplete { x: 1, y: 1 }) => {}
            other => panic!("expected vanishing coefficient at (1,1), got {other:?}"),
        }
    }

    #[test]
    fn tomography_rejects_unnormalized_input() {
        let ws = WeylSystem::<f64>::cyclic(3).unwrap();
        let gen = crate::jointness::boundary_generator(0.5, &ws).unwrap();
        let probs = vec![0.5; 9];
        assert!(matches!(
            tomography_reconstruct(&probs, &gen, &ws, &tol()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn ic_construction_odd_branch() {
        let t = tol();
        let bp = gamma_max::<f64>(0.5, 3).unwrap();
        let ic = construct_ic_joint(0.5, 0.5 * bp.gamma_max, 3, &t).unwrap();
        assert_eq!(ic.branch, Branch::Odd);
        assert!(ic.kappa.is_none());
        ic.generator.validate(t.eq, t.psd).unwrap();
        let r = ic_by_criterion(&ic.generator, ic.observable.weyl_system(), &t);
        assert!(r.is_ic_by_criterion);
        let s = ic_by_span(ic.observable.povm(), &t);
        assert!(s.is_ic_by_span);
        // marginals at exactly the requested noise
        let ws = ic.observable.weyl_system().clone();
        let (lam, gam) = generator_marginal_dists(&ic.generator, &ws);
        let dep_l = ProbDist::depolarizing(0.5, ws.group().clone()).unwrap();
        let dep_g = ProbDist::depolarizing(0.5 * bp.gamma_max, ws.group().clone()).unwrap();
        assert!(lam.max_abs_diff(&dep_l) < 1e-12);
        assert!(gam.max_abs_diff(&dep_g) < 1e-12);
    }

    #[test]
    fn ic_construction_even_branch() {
        let t = tol();
        let bp = gamma_max::<f64>(0.4, 4).unwrap();
        let ic = construct_ic_joint(0.4, 0.5 * bp.gamma_max, 4, &t).unwrap();
        assert_eq!(ic.branch, Branch::Even);
        let kappa = ic.kappa.unwrap();
        assert!(kappa > 0.0);
        ic.generator.validate(t.eq, t.psd).unwrap();
        // the flattening term is itself a state with trivial marginal profiles
        let s = DensityOperator::new(ic.s_kappa.clone().unwrap());
        s.validate(t.eq, t.psd).unwrap();
        let ws = ic.observable.weyl_system().clone();
        let (lam, gam) = generator_marginal_dists(&s, &ws);
        let uni = ProbDist::uniform(ws.group().clone());
        assert!(lam.max_abs_diff(&uni) < 1e-13);
        assert!(gam.max_abs_diff(&uni) < 1e-13);
        // all 16 coefficients nonzero
        let r = ic_by_criterion(&ic.generator, &ws, &t);
        assert!(r.is_ic_by_criterion);
        assert_eq!(r.weyl_coefficients.len(), 16);
        assert!(ic_by_span(ic.observable.povm(), &t).is_ic_by_span);
    }

    #[test]
    fn even_branch_kernels_have_vanishing_translation_averages() {
        // Σ_x W_{x,y} X_k W_{x,y}† = 0 and Σ_y W_{x,y} X_k W_{x,y}† = 0, the
        // property that keeps the flattening term out of both marginals
        let t = tol();
        let ic = construct_ic_joint(0.4, 0.3, 4, &t).unwrap();
        let ws = ic.observable.weyl_system().clone();
        for xk in ic.x_parts.as_ref().unwrap() {
            assert!(xk.is_hermitian(1e-15));
            assert!(xk.trace().norm() < 1e-15);
            for fixed in 0..4 {
                let mut sum_over_x = Operator::<f64>::zeros(4);
                let mut sum_over_y = Operator::<f64>::zeros(4);
                for moving in 0..4 {
                    let wx = ws.weyl(moving, fixed).unwrap();
                    sum_over_x.add_assign_scaled(&xk.conjugate_by(&wx), Complex::new(1.0, 0.0));
                    let wy = ws.weyl(fixed, moving).unwrap();
                    sum_over_y.add_assign_scaled(&xk.conjugate_by(&wy), Complex::new(1.0, 0.0));
                }
                assert!(sum_over_x.max_abs() < 1e-13);
                assert!(sum_over_y.max_abs() < 1e-13);
            }
        }
    }

    #[test]
    fn even_branch_coefficients_match_closed_forms() {
        let t = tol();
        let (lambda, gamma, d) = (0.4, 0.3, 4usize);
        let ic = construct_ic_joint(lambda, gamma, d, &t).unwrap();
        let ws = ic.observable.weyl_system().clone();
        let kappa = ic.kappa.unwrap();
        let tau = ic.tau;
        // flattening term: tr(S_κ·U_xV_y) = δ_{x,0}δ_{y,0} + iκ(ω^{−xy} − 1)
        let s = DensityOperator::new(ic.s_kappa.clone().unwrap());
        for x in 0..d {
            for y in 0..d {
                let got = ws.weyl_trace(s.op(), x, y);
                let omega = crate::weyl::root_of_unity::<f64>(d, -((x * y) as i64));
                let mut want = (omega - Complex::new(1.0, 0.0)) * Complex::new(0.0, kappa);
                if x == 0 && y == 0 {
                    want += Complex::new(1.0, 0.0);
                }
                assert!(
                    (got - want).norm() < 1e-14,
                    "flattening term off at ({x}, {y})"
                );
            }
        }
        // full generator: the boundary part contributes
        // (1−τ)[α²δ_{x,0} + β²δ_{y,0} + (αβ/√d)(ω^{−xy} + 1)] on top of τ times
        // the flattening coefficients
        let t0_lambda = gamma_max::<f64>(ic.t0 * lambda, d).unwrap();
        let (alpha, beta) = (t0_lambda.alpha, t0_lambda.beta);
        for x in 0..d {
            for y in 0..d {
                let got = ws.weyl_trace(ic.generator.op(), x, y);
                let omega = crate::weyl::root_of_unity::<f64>(d, -((x * y) as i64));
                let mut want = (omega + Complex::new(1.0, 0.0))
                    .scale(alpha * beta / (d as f64).sqrt() * (1.0 - tau));
                if x == 0 {
                    want += Complex::new((1.0 - tau) * alpha * alpha, 0.0);
                }
                if y == 0 {
                    want += Complex::new((1.0 - tau) * beta * beta, 0.0);
                }
                want += (ws.weyl_trace(s.op(), x, y)).scale(tau);
                assert!(
                    (got - want).norm() < 1e-13,
                    "generator coefficient off at ({x}, {y})"
                );
            }
        }
    }

    #[test]
    fn ic_construction_even_branch_smallest_dimension() {
        let t = tol();
        let ic = construct_ic_joint(0.5, 0.3, 2, &t).unwrap();
        assert_eq!(ic.branch, Branch::Even);
        ic.generator.validate(t.eq, t.psd).unwrap();
        let ws = ic.observable.weyl_system().clone();
        assert!(ic_by_criterion(&ic.generator, &ws, &t).is_ic_by_criterion);
        assert!(ic_by_span(ic.observable.povm(), &t).is_ic_by_span);
    }

    #[test]
    fn ic_construction_rejects_boundary_and_trivial_targets() {
        let t = tol();
        let bp = gamma_max::<f64>(0.5, 2).unwrap();
        assert!(matches!(
            construct_ic_joint(0.5, bp.gamma_max, 2, &t),
            Err(Error::OutOfInterior(_))
        ));
        assert!(matches!(
            construct_ic_joint(0.0, 0.5, 3, &t),
            Err(Error::IcImpossible(_))
        ));
        assert!(matches!(
            construct_ic_joint(1.0, 0.5, 3, &t),
            Err(Error::IcImpossible(_))
        ));
        assert!(matches!(
            construct_ic_joint(0.5, 0.0, 3, &t),
            Err(Error::IcImpossible(_))
        ));
    }

    #[test]
    fn rank_bound_examples() {
        let t = tol();
        // flat scalar joint observable at d = 2: rank 1 ≤ 3
        let g2 = crate::group::FiniteAbelianGroup::cyclic(2).unwrap();
        let e = Operator::<f64>::identity(2).scaled_re(0.25);
        let flat = Povm::new(Outcomes::Pair(g2), vec![e; 4]).unwrap();
        let r = trivial_marginal_rank_bound(&flat, &t).unwrap();
        assert_eq!(r.span_rank, 1);
        assert_eq!(r.bound, 3);
        assert!(r.holds);
        // covariant observable from the conjugate-basis projector at d = 3:
        // first marginal trivial, rank stays under 7
        let obs = extremal_joint_observable::<f64>(0.0, 3).unwrap();
        let r = trivial_marginal_rank_bound(obs.povm(), &t).unwrap();
        assert_eq!(r.trivial_marginal, MarginalSide::First);
        assert!(r.holds);
        assert!(r.span_rank <= 7);
        // a generic extremal observable has no trivial marginal
        let obs = extremal_joint_observable::<f64>(0.5, 3).unwrap();
        assert!(trivial_marginal_rank_bound(obs.povm(), &t).is_err());
    }
}
