//! Instruments in Kraus form, sequential composition of measurements, and the
//! rotated qubit construction producing a symmetric informationally complete
//! observable.

use crate::error::{Error, Result};
use crate::group::FiniteAbelianGroup;
use crate::linalg::{DensityOperator, Operator, Vector};
use crate::povm::{Outcomes, Povm};
use crate::scalar::Scalar;
use crate::weyl::{check_unsharpness, WeylSystem};
use num_complex::Complex;

/// Outcome-indexed completely positive maps in Kraus form, summing to a
/// trace-preserving channel.
#[derive(Debug, Clone)]
pub struct Instrument<T: Scalar> {
    group: FiniteAbelianGroup,
    kraus: Vec<Vec<Operator<T>>>,
}

impl<T: Scalar> Instrument<T> {
    pub fn new(group: FiniteAbelianGroup, kraus: Vec<Vec<Operator<T>>>) -> Result<Self> {
        if kraus.len() != group.order() {
            return Err(Error::ShapeMismatch(format!(
                "{} Kraus lists for a group of order {}",
                kraus.len(),
                group.order()
            )));
        }
        let dim = kraus
            .iter()
            .flat_map(|ks| ks.first())
            .map(|k| k.dim())
            .next()
            .ok_or_else(|| Error::InvalidInput("instrument with no Kraus operators".into()))?;
        if kraus.iter().flatten().any(|k| k.dim() != dim) {
            return Err(Error::ShapeMismatch(
                "Kraus operators of mixed dimension".into(),
            ));
        }
        Ok(Instrument { group, kraus })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.kraus
            .iter()
            .flatten()
            .next()
            .map(|k| k.dim())
            .unwrap_or(0)
    }

    pub fn kraus_for(&self, j: usize) -> &[Operator<T>] {
        &self.kraus[j]
    }

    /// Output state (unnormalized) for outcome j: Σ_i K ρ K†.
    pub fn apply(&self, j: usize, rho: &Operator<T>) -> Operator<T> {
        let mut out = Operator::zeros(self.dim());
        let one = Complex::new(T::one(), T::zero());
        for k in &self.kraus[j] {
            out.add_assign_scaled(&k.matmul(rho).matmul(&k.adjoint()), one);
        }
        out
    }

    /// Heisenberg-picture action on an effect: Σ_i K† S K.
    pub fn apply_adjoint(&self, j: usize, s: &Operator<T>) -> Operator<T> {
        let mut out = Operator::zeros(self.dim());
        let one = Complex::new(T::one(), T::zero());
        for k in &self.kraus[j] {
            out.add_assign_scaled(&k.adjoint().matmul(s).matmul(k), one);
        }
        out
    }

    /// Effect Σ_i K†K measured by outcome j.
    pub fn induced_effect(&self, j: usize) -> Operator<T> {
        self.apply_adjoint(j, &Operator::identity(self.dim()))
    }

    /// The observable the instrument measures.
    pub fn induced_povm(&self) -> Result<Povm<T>> {
        let effects = (0..self.group.order())
            .map(|j| self.induced_effect(j))
            .collect();
        Povm::new(Outcomes::Single(self.group.clone()), effects)
    }

    /// Deviation of Σ_j Σ_i K†K from the identity.
    pub fn trace_preservation_error(&self) -> T {
        let mut acc = Operator::zeros(self.dim());
        let one = Complex::new(T::one(), T::zero());
        for j in 0..self.kraus.len() {
            acc.add_assign_scaled(&self.induced_effect(j), one);
        }
        acc.max_abs_diff(&Operator::identity(self.dim()))
    }
}

/// Instrument with a single Kraus operator √E(j) per outcome.
pub fn lueders_instrument<T: Scalar>(povm: &Povm<T>, psd_floor: T) -> Result<Instrument<T>> {
    let group = match povm.outcomes() {
        Outcomes::Single(g) => g.clone(),
        Outcomes::Pair(_) => {
            return Err(Error::ShapeMismatch(
                "instruments are indexed by group outcomes".into(),
            ))
        }
    };
    let kraus = povm
        .effects()
        .iter()
        .map(|e| Ok(vec![e.sqrt_psd(psd_floor)?]))
        .collect::<Result<Vec<_>>>()?;
    Instrument::new(group, kraus)
}

/// Observable of the two-step measurement: first the instrument, then the
/// second observable on the output state. C(j,k) = Σ_i K_{j,i}† E₂(k) K_{j,i};
/// the first marginal is always the instrument's induced observable.
pub fn sequential_observable<T: Scalar>(
    first: &Instrument<T>,
    second: &Povm<T>,
) -> Result<Povm<T>> {
    if second.dim() != first.dim() {
        return Err(Error::ShapeMismatch(format!(
            "instrument dimension {} against observable dimension {}",
            first.dim(),
            second.dim()
        )));
    }
    let g = first.group().clone();
    let g2 = match second.outcomes() {
        Outcomes::Single(h) => h.clone(),
        Outcomes::Pair(_) => {
            return Err(Error::ShapeMismatch(
                "second observable must be group-indexed".into(),
            ))
        }
    };
    if g != g2 {
        return Err(Error::ShapeMismatch(
            "both measurement steps must share the outcome group".into(),
        ));
    }
    let d = g.order();
    let mut effects = Vec::with_capacity(d * d);
    for j in 0..d {
        for k in 0..d {
            effects.push(first.apply_adjoint(j, second.effect(k)));
        }
    }
    Povm::new(Outcomes::Pair(g), effects)
}

/// Measure-and-prepare instrument realizing a given joint observable as a
/// sequential measurement: outcome j reprepares the basis states of the sharp
/// preparation observable with weights tr(ρ C(j,k)). Following it with that
/// same sharp observable reproduces the joint observable exactly.
pub fn instrument_from_joint<T: Scalar>(
    joint: &Povm<T>,
    prep: &Povm<T>,
    psd_floor: T,
    eq: T,
) -> Result<Instrument<T>> {
    let g = match joint.outcomes() {
        Outcomes::Pair(g) => g.clone(),
        Outcomes::Single(_) => {
            return Err(Error::ShapeMismatch(
                "sequential realization needs a joint observable on G × G".into(),
            ))
        }
    };
    let d = g.order();
    if prep.dim() != joint.dim() || prep.effects().len() != d {
        return Err(Error::ShapeMismatch(
            "preparation observable does not match the joint observable".into(),
        ));
    }
    // the preparation observable must be sharp: rank-one projections
    let mut prep_vectors = Vec::with_capacity(d);
    for e in prep.effects() {
        let tr = e.trace();
        if (tr.re - T::one()).abs() > eq || tr.im.abs() > eq || !e.matmul(e).approx_eq(e, eq) {
            return Err(Error::NotSharp(
                "effects must be rank-one projections".into(),
            ));
        }
        let eig = e.hermitian_eigen()?;
        prep_vectors.push(eig.eigenvector(e.dim() - 1));
    }
    let mut kraus = Vec::with_capacity(d);
    for j in 0..d {
        let mut ops = Vec::with_capacity(d * d);
        for (k, psi) in prep_vectors.iter().enumerate() {
            let root = joint.effect(j * d + k).sqrt_psd(psd_floor)?;
            for m in 0..joint.dim() {
                let phi_m = Vector::basis(joint.dim(), m);
                // |ψ_k⟩⟨φ_m|·√C(j,k)
                ops.push(Operator::outer(psi, &phi_m).matmul(&root));
            }
        }
        kraus.push(ops);
    }
    Instrument::new(g, kraus)
}

/// Phase-space covariance of an instrument: conjugating input and output by a
/// Weyl operator shifts the outcome index by the shift part. Checked on the
/// spanning set of matrix units.
pub fn check_instrument_covariance<T: Scalar>(
    ins: &Instrument<T>,
    ws: &WeylSystem<T>,
    eq: T,
) -> Result<bool> {
    if ins.group() != ws.group() || ins.dim() != ws.dim() {
        return Err(Error::ShapeMismatch(
            "instrument and Weyl system live over different groups".into(),
        ));
    }
    let d = ws.dim();
    let g = ws.group();
    for x in 0..d {
        for y in 0..d {
            let w = ws.weyl(x, y)?;
            let wa = w.adjoint();
            for a in 0..d {
                for b in 0..d {
                    let unit = Operator::outer(&Vector::basis(d, a), &Vector::basis(d, b));
                    let moved_in = wa.matmul(&unit).matmul(&w);
                    for j in 0..d {
                        let lhs = ins.apply(j, &moved_in).conjugate_by(&w);
                        let rhs = ins.apply(g.add(j, x), &unit);
                        if lhs.max_abs_diff(&rhs) > eq {
                            return Ok(false);
                        }
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Joint observable of measuring the sharp first observable on a random
/// λ-fraction of the ensemble (repreparing ξ_j on outcome j) and the
/// conjugate observable afterwards:
/// C(j,k) = λ·tr(ξ_j B(k))·A(j) + ((1−λ)/d)·B(k). Its effects stay inside the
/// span of the two marginal bases, so it is never informationally complete.
#[allow(clippy::needless_range_loop)] // j pairs the repreparation state with the effect index
pub fn partial_ensemble_sequential<T: Scalar>(
    lambda: T,
    xi_states: &[DensityOperator<T>],
    ws: &WeylSystem<T>,
) -> Result<Povm<T>> {
    check_unsharpness(lambda, "lambda")?;
    let d = ws.dim();
    if xi_states.len() != d {
        return Err(Error::ShapeMismatch(format!(
            "{} repreparation states for {} outcomes",
            xi_states.len(),
            d
        )));
    }
    if xi_states.iter().any(|s| s.dim() != d) {
        return Err(Error::ShapeMismatch(
            "repreparation states of wrong dimension".into(),
        ));
    }
    let (a, b) = crate::povm::conjugate_pair(ws);
    let rest = (T::one() - lambda) / T::of_usize(d);
    let mut effects = Vec::with_capacity(d * d);
    for j in 0..d {
        for k in 0..d {
            let w = lambda * xi_states[j].op().trace_product(b.effect(k)).re;
            let mut e = a.effect(j).scaled_re(w);
            e.add_assign_scaled(b.effect(k), Complex::new(rest, T::zero()));
            effects.push(e);
        }
    }
    Povm::new(Outcomes::Pair(ws.group().clone()), effects)
}

/// Configuration of the rotated two-step qubit measurement: a weak first
/// measurement along x with unsharpness λ, unitary kicks
/// L_± = cos(θ/2)𝟙 ± i·sin(θ/2)σ_x between the steps, then a sharp
/// y-measurement. Outcome 0 stands for +1 and outcome 1 for −1. The kick sign
/// is fixed so that the resulting joint observable is
/// ¼(𝟙 + jλσ_x + k·cosθ√(1−λ²)σ_y + jk·sinθ√(1−λ²)σ_z).
#[derive(Debug, Clone, Copy)]
pub struct QubitSequentialConfig<T: Scalar> {
    pub lambda: T,
    pub theta: T,
}

impl<T: Scalar> QubitSequentialConfig<T> {
    pub fn new(lambda: T, theta: T) -> Result<Self> {
        check_unsharpness(lambda, "lambda")?;
        let half_pi = T::of(std::f64::consts::FRAC_PI_2);
        if theta < T::zero() || theta >= half_pi {
            return Err(Error::InvalidParameter {
                name: "theta",
                message: format!("{theta} is outside [0, π/2)"),
            });
        }
        Ok(QubitSequentialConfig { lambda, theta })
    }

    /// The kick unitaries (L for outcome +1, L for outcome −1).
    pub fn rotation_unitaries(&self) -> (Operator<T>, Operator<T>) {
        let c = Complex::new((self.theta * T::of(0.5)).cos(), T::zero());
        let s = (self.theta * T::of(0.5)).sin();
        let sx = pauli_x();
        let mut plus = Operator::identity(2).scaled(c);
        plus.add_assign_scaled(&sx, Complex::new(T::zero(), s));
        let mut minus = Operator::identity(2).scaled(c);
        minus.add_assign_scaled(&sx, Complex::new(T::zero(), -s));
        (plus, minus)
    }

    /// Kraus instrument of the first step: L_j · √(A'_λ(j)) with A' the
    /// unsharp x-axis observable.
    pub fn instrument(&self) -> Result<Instrument<T>> {
        let g = FiniteAbelianGroup::cyclic(2)?;
        let (lp, lm) = self.rotation_unitaries();
        let a = unsharp_axis_povm(self.lambda, &pauli_x());
        let k0 = lp.matmul(&a[0].sqrt_psd(T::of(1e-9))?);
        let k1 = lm.matmul(&a[1].sqrt_psd(T::of(1e-9))?);
        Instrument::new(g, vec![vec![k0], vec![k1]])
    }

    /// The four-outcome observable of the full two-step measurement, indexed
    /// by Z₂ × Z₂ in the x/y axis convention.
    pub fn joint_observable(&self) -> Result<Povm<T>> {
        let ins = self.instrument()?;
        let g = FiniteAbelianGroup::cyclic(2)?;
        let b = Povm::new(
            Outcomes::Single(g),
            unsharp_axis_povm(T::one(), &pauli_y()).to_vec(),
        )?;
        sequential_observable(&ins, &b)
    }
}

/// Unitary carrying the reference-basis picture to the x/y axis picture of
/// the two-step qubit measurement: columns are the +1/−1 eigenvectors of σ_x
/// with phases fixed so that the conjugate basis lands on the σ_y eigenbasis.
/// Conjugating the canonical pair by it gives the x- and y-axis observables.
pub fn axis_change_unitary<T: Scalar>() -> Operator<T> {
    let s = T::one() / T::of(2.0).sqrt();
    let mut w = Operator::zeros(2);
    w.set(0, 0, Complex::new(s, T::zero()));
    w.set(1, 0, Complex::new(s, T::zero()));
    w.set(0, 1, Complex::new(T::zero(), -s));
    w.set(1, 1, Complex::new(T::zero(), s));
    w
}

fn pauli_x<T: Scalar>() -> Operator<T> {
    let mut m = Operator::zeros(2);
    m.set(0, 1, Complex::new(T::one(), T::zero()));
    m.set(1, 0, Complex::new(T::one(), T::zero()));
    m
}

fn pauli_y<T: Scalar>() -> Operator<T> {
    let mut m = Operator::zeros(2);
    m.set(0, 1, Complex::new(T::zero(), -T::one()));
    m.set(1, 0, Complex::new(T::zero(), T::one()));
    m
}

/// Effects (𝟙 ± λσ)/2 for a Pauli axis, outcome 0 carrying the + sign.
fn unsharp_axis_povm<T: Scalar>(lambda: T, sigma: &Operator<T>) -> [Operator<T>; 2] {
    let half = T::of(0.5);
    let mut plus = Operator::identity(2).scaled_re(half);
    plus.add_assign_scaled(sigma, Complex::new(half * lambda, T::zero()));
    let mut minus = Operator::identity(2).scaled_re(half);
    minus.add_assign_scaled(sigma, Complex::new(-half * lambda, T::zero()));
    [plus, minus]
}
