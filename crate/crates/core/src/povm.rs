//! POVMs over group-indexed outcome sets, the canonically conjugate pair, and
//! smearing/covariance machinery.

use crate::error::{Error, Result};
use crate::group::FiniteAbelianGroup;
use crate::linalg::Operator;
use crate::scalar::Scalar;
use crate::weyl::{check_unsharpness, WeylSystem};
use num_complex::Complex;

/// Probability distribution on a finite abelian group.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbDist<T: Scalar> {
    group: FiniteAbelianGroup,
    weights: Vec<T>,
}

impl<T: Scalar> ProbDist<T> {
    pub fn new(group: FiniteAbelianGroup, weights: Vec<T>) -> Result<Self> {
        if weights.len() != group.order() {
            return Err(Error::ShapeMismatch(format!(
                "{} weights for a group of order {}",
                weights.len(),
                group.order()
            )));
        }
        Ok(ProbDist { group, weights })
    }

    /// Point distribution at 0.
    pub fn point_mass(group: FiniteAbelianGroup) -> Self {
        let mut weights = vec![T::zero(); group.order()];
        weights[0] = T::one();
        ProbDist { group, weights }
    }

    /// Uniform distribution.
    pub fn uniform(group: FiniteAbelianGroup) -> Self {
        let w = T::one() / T::of_usize(group.order());
        let weights = vec![w; group.order()];
        ProbDist { group, weights }
    }

    /// λ·(point mass) + (1−λ)·(uniform); the depolarizing noise profile.
    pub fn depolarizing(lambda: T, group: FiniteAbelianGroup) -> Result<Self> {
        check_unsharpness(lambda, "lambda")?;
        let d = T::of_usize(group.order());
        let base = (T::one() - lambda) / d;
        let mut weights = vec![base; group.order()];
        weights[0] += lambda;
        Ok(ProbDist { group, weights })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn weight(&self, x: usize) -> T {
        self.weights[x]
    }

    /// Nonnegativity and normalization within `prob_tol`.
    pub fn validate(&self, prob_tol: T) -> Result<()> {
        if let Some(w) = self.weights.iter().find(|&&w| w < -prob_tol) {
            return Err(Error::InvalidInput(format!("negative weight {w}")));
        }
        let total: T = self.weights.iter().copied().sum();
        if (total - T::one()).abs() > prob_tol {
            return Err(Error::InvalidInput(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(())
    }

    /// Convex combination t·self + (1−t)·other on the same group.
    pub fn mix(&self, other: &Self, t: T) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::ShapeMismatch("mixing over different groups".into()));
        }
        let weights = self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(&a, &b)| t * a + (T::one() - t) * b)
            .collect();
        Ok(ProbDist {
            group: self.group.clone(),
            weights,
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), |x, y| x.max(y))
    }
}

/// Outcome index set of a POVM: the group itself, or pairs from G × G for
/// joint observables. Pairs (j, k) are flattened as j·|G| + k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcomes {
    Single(FiniteAbelianGroup),
    Pair(FiniteAbelianGroup),
}

impl Outcomes {
    pub fn count(&self) -> usize {
        match self {
            Outcomes::Single(g) => g.order(),
            Outcomes::Pair(g) => g.order() * g.order(),
        }
    }

    /// The group indexing a single axis of the outcome set.
    pub fn base_group(&self) -> &FiniteAbelianGroup {
        match self {
            Outcomes::Single(g) | Outcomes::Pair(g) => g,
        }
    }

    /// The full index group (doubled factors for pairs).
    pub fn index_group(&self) -> FiniteAbelianGroup {
        match self {
            Outcomes::Single(g) => g.clone(),
            Outcomes::Pair(g) => g.product_with_self(),
        }
    }

    pub fn is_pair(&self) -> bool {
        matches!(self, Outcomes::Pair(_))
    }
}

/// Positive operator valued measure: one effect per outcome, summing to 𝟙.
/// Construction does not validate positivity or completeness; call
/// [`Povm::validate`] explicitly so that deliberately broken inputs can be
/// exercised in tests.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm<T: Scalar> {
    outcomes: Outcomes,
    effects: Vec<Operator<T>>,
}

/// Outcome of an explicit POVM validation.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmValidation<T> {
    pub min_eigenvalue: T,
    pub completeness_error: T,
    pub positive: bool,
    pub complete: bool,
}

impl<T> PovmValidation<T> {
    pub fn is_valid(&self) -> bool {
        self.positive && self.complete
    }
}

impl<T: Scalar> Povm<T> {
    pub fn new(outcomes: Outcomes, effects: Vec<Operator<T>>) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::InvalidPovm("empty effect list".into()));
        }
        if effects.len() != outcomes.count() {
            return Err(Error::ShapeMismatch(format!(
                "{} effects for {} outcomes",
                effects.len(),
                outcomes.count()
            )));
        }
        let dim = effects[0].dim();
        if effects.iter().any(|e| e.dim() != dim) {
            return Err(Error::ShapeMismatch("effects of mixed dimension".into()));
        }
        Ok(Povm { outcomes, effects })
    }

    /// The d-outcome trivial observable: every effect 𝟙/d.
    pub fn trivial(group: FiniteAbelianGroup, dim: usize) -> Self {
        let n = group.order();
        let e = Operator::identity(dim).scaled_re(T::one() / T::of_usize(n));
        Povm {
            outcomes: Outcomes::Single(group),
            effects: vec![e; n],
        }
    }

    pub fn outcomes(&self) -> &Outcomes {
        &self.outcomes
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn effects(&self) -> &[Operator<T>] {
        &self.effects
    }

    pub fn effect(&self, i: usize) -> &Operator<T> {
        &self.effects[i]
    }

    /// Effect at a pair outcome (j, k); requires a pair outcome set.
    pub fn effect_at(&self, j: usize, k: usize) -> Result<&Operator<T>> {
        match &self.outcomes {
            Outcomes::Pair(g) => {
                g.check_element(j)?;
                g.check_element(k)?;
                Ok(&self.effects[j * g.order() + k])
            }
            Outcomes::Single(_) => Err(Error::ShapeMismatch(
                "effect_at needs a pair outcome set".into(),
            )),
        }
    }

    pub fn sum_of_effects(&self) -> Operator<T> {
        let mut acc = Operator::zeros(self.dim());
        let one = Complex::new(T::one(), T::zero());
        for e in &self.effects {
            acc.add_assign_scaled(e, one);
        }
        acc
    }

    /// Positivity of every effect (floor `psd`) and completeness (slack `eq`).
    pub fn validate(&self, eq: T, psd: T) -> Result<PovmValidation<T>> {
        let mut min_eig = T::infinity();
        for e in &self.effects {
            min_eig = min_eig.min(e.min_eigenvalue()?);
        }
        let completeness_error = self
            .sum_of_effects()
            .max_abs_diff(&Operator::identity(self.dim()));
        Ok(PovmValidation {
            min_eigenvalue: min_eig,
            completeness_error,
            positive: min_eig >= -psd,
            complete: completeness_error < eq,
        })
    }

    /// Outcome probabilities tr(ρ E_i) for a state ρ.
    pub fn probabilities(&self, rho: &Operator<T>) -> Vec<T> {
        self.effects
            .iter()
            .map(|e| rho.trace_product(e).re)
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.effects
            .iter()
            .zip(&other.effects)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(T::zero(), |x, y| x.max(y))
    }
}

/// The canonically conjugate pair: A projects onto the reference basis, B onto
/// the Fourier-conjugate basis. A is shift-covariant and phase-invariant, B
/// the other way around.
pub fn conjugate_pair<T: Scalar>(ws: &WeylSystem<T>) -> (Povm<T>, Povm<T>) {
    let g = ws.group().clone();
    let a = (0..ws.dim())
        .map(|j| Operator::projector(&ws.basis_vector(j)))
        .collect();
    let b = (0..ws.dim())
        .map(|k| Operator::projector(&ws.conjugate_basis_vector(k)))
        .collect();
    (
        Povm {
            outcomes: Outcomes::Single(g.clone()),
            effects: a,
        },
        Povm {
            outcomes: Outcomes::Single(g),
            effects: b,
        },
    )
}

/// Convolution smearing: effect j of the result is Σ_i dist(j−i)·base(i).
/// The point mass reproduces `base`; the uniform distribution gives the
/// trivial observable.
pub fn smear<T: Scalar>(base: &Povm<T>, dist: &ProbDist<T>) -> Result<Povm<T>> {
    let group = match base.outcomes() {
        Outcomes::Single(g) => g,
        Outcomes::Pair(_) => {
            return Err(Error::ShapeMismatch(
                "smearing needs group-indexed outcomes".into(),
            ))
        }
    };
    if group != dist.group() {
        return Err(Error::ShapeMismatch(
            "distribution group differs from outcome group".into(),
        ));
    }
    let effects = group
        .elements()
        .map(|j| {
            let mut acc = Operator::zeros(base.dim());
            for i in group.elements() {
                let w = dist.weight(group.sub(j, i));
                acc.add_assign_scaled(base.effect(i), Complex::new(w, T::zero()));
            }
            acc
        })
        .collect();
    Ok(Povm {
        outcomes: base.outcomes().clone(),
        effects,
    })
}

/// Depolarizing noise profile λδ + (1−λ)μ on the group.
pub fn depolarizing_dist<T: Scalar>(lambda: T, group: FiniteAbelianGroup) -> Result<ProbDist<T>> {
    ProbDist::depolarizing(lambda, group)
}

/// Bias-smeared observable: effect j is λ·base(j) + (1−λ)·bias(j)·𝟙. It keeps
/// the shift covariance of `base` only when the bias is uniform.
pub fn biased_smear<T: Scalar>(base: &Povm<T>, lambda: T, bias: &ProbDist<T>) -> Result<Povm<T>> {
    check_unsharpness(lambda, "lambda")?;
    let group = match base.outcomes() {
        Outcomes::Single(g) => g,
        Outcomes::Pair(_) => {
            return Err(Error::ShapeMismatch(
                "bias smearing needs group-indexed outcomes".into(),
            ))
        }
    };
    if group != bias.group() {
        return Err(Error::ShapeMismatch(
            "bias group differs from outcome group".into(),
        ));
    }
    let id = Operator::identity(base.dim());
    let effects = group
        .elements()
        .map(|j| {
            let mut e = base.effect(j).scaled_re(lambda);
            e.add_assign_scaled(
                &id,
                Complex::new((T::one() - lambda) * bias.weight(j), T::zero()),
            );
            e
        })
        .collect();
    Ok(Povm {
        outcomes: base.outcomes().clone(),
        effects,
    })
}

/// Which of the four shift/phase transformation laws a POVM satisfies.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceReport<T> {
    pub u_covariant: bool,
    pub v_invariant: bool,
    pub u_invariant: bool,
    pub v_covariant: bool,
    pub max_dev_u_covariant: T,
    pub max_dev_v_invariant: T,
    pub max_dev_u_invariant: T,
    pub max_dev_v_covariant: T,
}

/// Check U_x E(j) U_x† = E(j+x), V_y E(j) V_y† = E(j), and the transposed
/// pair, each within `eq`.
pub fn check_covariance<T: Scalar>(
    povm: &Povm<T>,
    ws: &WeylSystem<T>,
    eq: T,
) -> Result<CovarianceReport<T>> {
    let group = match povm.outcomes() {
        Outcomes::Single(g) => g.clone(),
        Outcomes::Pair(_) => {
            return Err(Error::ShapeMismatch(
                "covariance report needs group-indexed outcomes".into(),
            ))
        }
    };
    if &group != ws.group() || povm.dim() != ws.dim() {
        return Err(Error::ShapeMismatch(
            "POVM and Weyl system live over different groups".into(),
        ));
    }
    let mut dev = [T::zero(); 4];
    for x in group.elements() {
        let u = ws.shift(x)?;
        let v = ws.phase_op(x)?;
        for j in group.elements() {
            let e = povm.effect(j);
            let ue = e.conjugate_by(&u);
            let ve = e.conjugate_by(&v);
            dev[0] = dev[0].max(ue.max_abs_diff(povm.effect(group.add(j, x))));
            dev[1] = dev[1].max(ve.max_abs_diff(e));
            dev[2] = dev[2].max(ue.max_abs_diff(e));
            dev[3] = dev[3].max(ve.max_abs_diff(povm.effect(group.add(j, x))));
        }
    }
    Ok(CovarianceReport {
        u_covariant: dev[0] < eq,
        v_invariant: dev[1] < eq,
        u_invariant: dev[2] < eq,
        v_covariant: dev[3] < eq,
        max_dev_u_covariant: dev[0],
        max_dev_v_invariant: dev[1],
        max_dev_u_invariant: dev[2],
        max_dev_v_covariant: dev[3],
    })
}

/// Marginals of a joint observable on G × G: first sums over the second index,
/// second over the first.
#[allow(clippy::needless_range_loop)] // j and k address both the flat effect index and the accumulators
pub fn marginals<T: Scalar>(joint: &Povm<T>) -> Result<(Povm<T>, Povm<T>)> {
    let group = match joint.outcomes() {
        Outcomes::Pair(g) => g.clone(),
        Outcomes::Single(_) => {
            return Err(Error::ShapeMismatch(
                "marginals need a pair outcome set".into(),
            ))
        }
    };
    let d = group.order();
    let one = Complex::new(T::one(), T::zero());
    let mut first = vec![Operator::zeros(joint.dim()); d];
    let mut second = vec![Operator::zeros(joint.dim()); d];
    for j in 0..d {
        for k in 0..d {
            let e = joint.effect(j * d + k);
            first[j].add_assign_scaled(e, one);
            second[k].add_assign_scaled(e, one);
        }
    }
    Ok((
        Povm {
            outcomes: Outcomes::Single(group.clone()),
            effects: first,
        },
        Povm {
            outcomes: Outcomes::Single(group),
            effects: second,
        },
    ))
}
