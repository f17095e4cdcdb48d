//! Acceptance suite: one test per release criterion, each printing a single
//! PASS/FAIL line. Run with `cargo test --test acceptance -- --nocapture` to
//! see every line.

#![allow(clippy::needless_range_loop)]

use num_complex::Complex;
use qjoint::infocomplete::{
    construct_ic_joint, ic_by_criterion, ic_by_span, reconstruct_from_coefficients,
    trivial_marginal_rank_bound, weyl_coefficients, Branch, TomographyPipeline,
};
use qjoint::jointness::{
    boundary_generator, covariant_observable, covariantize, ellipse_form, gamma_max,
};
use qjoint::linalg::{DensityOperator, Operator};
use qjoint::povm::{conjugate_pair, marginals, smear, Outcomes, Povm, ProbDist};
use qjoint::random::{random_operator, random_state, rng_from_seed};
use qjoint::sequential::{lueders_instrument, sequential_observable, QubitSequentialConfig};
use qjoint::weyl::{build_weyl_system, gauss_sum, gauss_sum_closed_form, WeylSystem};
use qjoint::Tolerances;

fn tol() -> Tolerances<f64> {
    Default::default()
}

fn report(name: &str, failures: Vec<String>) {
    if failures.is_empty() {
        println!("acceptance {name}: PASS");
    } else {
        println!("acceptance {name}: FAIL ({} issue(s))", failures.len());
        panic!("{name} failed:\n{}", failures.join("\n"));
    }
}

#[test]
fn criterion_01_boundary_formula() {
    let mut failures = Vec::new();
    for d in 2..=8usize {
        let g0 = gamma_max::<f64>(0.0, d).unwrap().gamma_max;
        if g0 != 1.0 {
            failures.push(format!("d={d}: boundary at 0 is {g0}, not exactly 1"));
        }
        let g1 = gamma_max::<f64>(1.0, d).unwrap().gamma_max;
        if g1 != 0.0 {
            failures.push(format!("d={d}: boundary at 1 is {g1}, not exactly 0"));
        }
        for i in 0..=100 {
            let lambda = i as f64 / 100.0;
            let g = gamma_max::<f64>(lambda, d).unwrap().gamma_max;
            // independent route: the boundary point solves the region equation
            let e = ellipse_form(lambda, g, d);
            if (e - 1.0).abs() > 1e-12 {
                failures.push(format!(
                    "d={d}, λ={lambda}: boundary point misses the region equation by {:.2e}",
                    (e - 1.0).abs()
                ));
            }
            if d == 2 {
                let expected = (1.0 - lambda * lambda).sqrt();
                if (g - expected).abs() > 1e-12 {
                    failures.push(format!(
                        "d=2, λ={lambda}: {g} differs from √(1−λ²) = {expected}"
                    ));
                }
            }
        }
    }
    report("01 boundary-formula", failures);
}

#[test]
fn criterion_02_equal_unsharpness_fixed_point() {
    let mut failures = Vec::new();
    let exact: [(usize, Option<f64>); 4] =
        [(2, None), (3, None), (4, Some(2.0 / 3.0)), (9, Some(0.625))];
    for (d, rational) in exact {
        let df = d as f64;
        let star = (df + df.sqrt() - 2.0) / (2.0 * (df - 1.0));
        let g = gamma_max::<f64>(star, d).unwrap().gamma_max;
        if (g - star).abs() > 1e-12 {
            failures.push(format!(
                "d={d}: boundary at the fixed point differs: {g} vs {star}"
            ));
        }
        if let Some(r) = rational {
            if (g - r).abs() > 1e-12 {
                failures.push(format!(
                    "d={d}: fixed point {g} differs from the exact rational {r}"
                ));
            }
        }
    }
    report("02 equal-unsharpness-fixed-point", failures);
}

#[test]
fn criterion_03_criterion_equivalence() {
    let mut failures = Vec::new();
    let t = tol();
    assert_eq!(t.rank, 1e-8);
    assert_eq!(t.ic, 1e-8);
    let mut rng = rng_from_seed(1003);
    for d in 2..=6usize {
        let ws = WeylSystem::<f64>::cyclic(d).unwrap();
        for trial in 0..30 {
            let gen = random_state::<f64, _>(d, &mut rng);
            let obs = covariant_observable(&gen, &ws, &t).unwrap();
            let by_span = ic_by_span(obs.povm(), &t).is_ic_by_span;
            let by_coeff = ic_by_criterion(&gen, &ws, &t).is_ic_by_criterion;
            if by_span != by_coeff {
                failures.push(format!(
                    "d={d}, trial {trial}: span says {by_span}, coefficients say {by_coeff}"
                ));
            }
        }
    }
    report("03 criterion-equivalence", failures);
}

#[test]
fn criterion_04_parity_dichotomy() {
    let mut failures = Vec::new();
    let t = tol();
    for d in 2..=9usize {
        let ws = WeylSystem::<f64>::cyclic(d).unwrap();
        for i in 1..=9 {
            let lambda = i as f64 / 10.0;
            let gen = boundary_generator(lambda, &ws).unwrap();
            let r = ic_by_criterion(&gen, &ws, &t);
            let expected = d % 2 == 1;
            if r.is_ic_by_criterion != expected {
                failures.push(format!(
                    "d={d}, λ={lambda}: criterion verdict {} (expected {expected})",
                    r.is_ic_by_criterion
                ));
            }
            if d % 2 == 0 {
                let zeros: Vec<(usize, usize)> = r
                    .weyl_coefficients
                    .iter()
                    .filter(|(_, c)| c.norm() <= t.ic)
                    .map(|(&p, _)| p)
                    .collect();
                let predicted: Vec<(usize, usize)> = (0..d)
                    .flat_map(|x| (0..d).map(move |y| (x, y)))
                    .filter(|&(x, y)| (2 * x * y) % (2 * d) == d)
                    .collect();
                if zeros != predicted {
                    failures.push(format!(
                        "d={d}, λ={lambda}: vanishing pairs {zeros:?} differ from predicted {predicted:?}"
                    ));
                }
            }
        }
    }
    report("04 parity-dichotomy", failures);
}

#[test]
fn criterion_05_interior_ic_construction() {
    let mut failures = Vec::new();
    let t = tol();
    for d in 3..=6usize {
        let ws = WeylSystem::<f64>::cyclic(d).unwrap();
        let (a, b) = conjugate_pair(&ws);
        for lambda in [0.3, 0.6] {
            let boundary = gamma_max::<f64>(lambda, d).unwrap().gamma_max;
            for frac in [0.5, 0.9] {
                let gamma = frac * boundary;
                let ic = match construct_ic_joint(lambda, gamma, d, &t) {
                    Ok(ic) => ic,
                    Err(e) => {
                        failures.push(format!("d={d}, λ={lambda}, γ={gamma}: {e}"));
                        continue;
                    }
                };
                let (ma, mb) = marginals(ic.observable.povm()).unwrap();
                let want_a = smear(
                    &a,
                    &ProbDist::depolarizing(lambda, ws.group().clone()).unwrap(),
                )
                .unwrap();
                let want_b = smear(
                    &b,
                    &ProbDist::depolarizing(gamma, ws.group().clone()).unwrap(),
                )
                .unwrap();
                let da = ma.max_abs_diff(&want_a);
                let db = mb.max_abs_diff(&want_b);
                if da > 1e-10 || db > 1e-10 {
                    failures.push(format!(
                        "d={d}, λ={lambda}, γ/γmax={frac}: marginal errors {da:.2e}, {db:.2e}"
                    ));
                }
                let r = ic_by_criterion(&ic.generator, &ws, &t);
                let margin = match ic.branch {
                    Branch::Even => 1e-6 * ic.kappa.unwrap(),
                    Branch::Odd => 1e-6 * ic.tau,
                };
                if r.min_abs_coefficient <= margin {
                    failures.push(format!(
                        "d={d}, λ={lambda}, γ/γmax={frac}: min |coefficient| {:.3e} below margin {margin:.3e}",
                        r.min_abs_coefficient
                    ));
                }
                if !ic_by_span(ic.observable.povm(), &t).is_ic_by_span {
                    failures.push(format!(
                        "d={d}, λ={lambda}, γ/γmax={frac}: span rank deficient"
                    ));
                }
            }
        }
    }
    report("05 interior-ic-construction", failures);
}

#[test]
fn criterion_06_reconstruction_and_tomography() {
    let mut failures = Vec::new();
    let t = tol();
    let mut rng = rng_from_seed(1006);
    for d in 2..=7usize {
        let ws = WeylSystem::<f64>::cyclic(d).unwrap();
        for trial in 0..50 {
            let a = random_operator::<f64, _>(d, &mut rng);
            let rec = reconstruct_from_coefficients(&weyl_coefficients(&a, &ws), &ws);
            let err = rec.max_abs_diff(&a);
            if err > 1e-12 {
                failures.push(format!(
                    "d={d}, trial {trial}: expansion round trip off by {err:.2e}"
                ));
            }
        }
    }
    // tomography round trips through informationally complete generators:
    // minimal-noise generators in odd dimension, interior constructions in even
    let mut generators: Vec<(String, usize, DensityOperator<f64>)> = Vec::new();
    for d in [3usize, 5, 7] {
        let ws = WeylSystem::<f64>::cyclic(d).unwrap();
        generators.push((
            format!("boundary d={d}"),
            d,
            boundary_generator(0.5, &ws).unwrap(),
        ));
    }
    for d in [4usize, 6] {
        let boundary = gamma_max::<f64>(0.4, d).unwrap().gamma_max;
        let ic = construct_ic_joint(0.4, 0.5 * boundary, d, &t).unwrap();
        generators.push((format!("interior d={d}"), d, ic.generator.clone()));
    }
    for (name, d, gen) in generators {
        let ws = WeylSystem::<f64>::cyclic(d).unwrap();
        let pipe = TomographyPipeline::new(&gen, &ws, &t).unwrap();
        for trial in 0..20 {
            let rho = random_state::<f64, _>(d, &mut rng);
            let probs = pipe.forward(rho.op());
            match pipe.reconstruct(&probs, &t) {
                Ok(rec) => {
                    let err = rec.max_abs_diff(rho.op());
                    if err > 1e-10 {
                        failures.push(format!(
                            "{name}, trial {trial}: tomography round trip off by {err:.2e}"
                        ));
                    }
                }
                Err(e) => failures.push(format!("{name}, trial {trial}: {e}")),
            }
        }
    }
    report("06 reconstruction-and-tomography", failures);
}

#[test]
fn criterion_07_sequential_equals_extremal() {
    let mut failures = Vec::new();
    let t = tol();
    for d in 2..=6usize {
        let ws = WeylSystem::<f64>::cyclic(d).unwrap();
        let (a, b) = conjugate_pair(&ws);
        for lambda in [0.2, 0.5, 0.8] {
            let a_l = smear(
                &a,
                &ProbDist::depolarizing(lambda, ws.group().clone()).unwrap(),
            )
            .unwrap();
            let ins = lueders_instrument(&a_l, t.psd).unwrap();
            let seq = sequential_observable(&ins, &b).unwrap();
            let ext = qjoint::jointness::extremal_joint_observable::<f64>(lambda, d).unwrap();
            let err = seq.max_abs_diff(ext.povm());
            if err > 1e-12 {
                failures.push(format!("d={d}, λ={lambda}: effectwise gap {err:.2e}"));
            }
        }
    }
    report("07 sequential-equals-extremal", failures);
}

#[test]
fn criterion_08_qubit_sic() {
    let mut failures = Vec::new();
    let t = tol();
    let lambda = 1.0 / 3.0f64.sqrt();
    let theta = std::f64::consts::FRAC_PI_4;
    let c = QubitSequentialConfig::new(lambda, theta)
        .unwrap()
        .joint_observable()
        .unwrap();
    let effects = c.effects();
    for i in 0..4 {
        let self_overlap = effects[i].trace_product(&effects[i]).re;
        if (self_overlap - 0.25).abs() > 1e-12 {
            failures.push(format!(
                "effect {i}: self overlap {self_overlap} differs from 1/4"
            ));
        }
        for j in 0..4 {
            if i == j {
                continue;
            }
            let overlap = effects[i].trace_product(&effects[j]).re;
            if (overlap - 1.0 / 12.0).abs() > 1e-12 {
                failures.push(format!(
                    "effects ({i}, {j}): overlap {overlap} differs from 1/12"
                ));
            }
        }
    }
    if !ic_by_span(&c, &t).is_ic_by_span {
        failures.push("four-outcome observable does not span the operator space".into());
    }
    report("08 qubit-sic", failures);
}

#[test]
fn criterion_09_covariantization() {
    let mut failures = Vec::new();
    let t = tol();
    // flat scalar joint observable with a sine bias at d = 4 averages to the
    // fully flat covariant observable
    let ws4 = WeylSystem::<f64>::cyclic(4).unwrap();
    let effects: Vec<Operator<f64>> = (0..16)
        .map(|x| {
            let (i, j) = (x / 4, x % 4);
            let p = (1.0 - (std::f64::consts::TAU * (i * j) as f64 / 4.0).sin()) / 16.0;
            Operator::identity(4).scaled_re(p)
        })
        .collect();
    let biased = Povm::new(Outcomes::Pair(ws4.group().clone()), effects).unwrap();
    let averaged = covariantize(&biased, &ws4).unwrap();
    for (i, e) in averaged.povm().effects().iter().enumerate() {
        let err = e.max_abs_diff(&Operator::identity(4).scaled_re(1.0 / 16.0));
        if err > 1e-12 {
            failures.push(format!(
                "sine-biased effect {i} off by {err:.2e} after averaging"
            ));
        }
    }
    // a bias-smeared joint observable at d = 3 loses its bias
    let ws3 = WeylSystem::<f64>::cyclic(3).unwrap();
    let (a, b) = conjugate_pair(&ws3);
    let (lambda, gamma) = (0.5, 0.3);
    let bias = [1.0, 0.0, 0.0];
    // joint observable of the biased first observable and the uniformly
    // smeared second one: λ·A(j)·μ(k) + (1−λ)·p(j)·B'(k) with
    // B' = smear of B at γ/(1−λ); valid because λ + γ ≤ 1 here
    let inner = smear(
        &b,
        &ProbDist::depolarizing(gamma / (1.0 - lambda), ws3.group().clone()).unwrap(),
    )
    .unwrap();
    let mut effects = Vec::new();
    for j in 0..3 {
        for k in 0..3 {
            let mut e = a.effect(j).scaled_re(lambda / 3.0);
            e.add_assign_scaled(inner.effect(k), Complex::new((1.0 - lambda) * bias[j], 0.0));
            effects.push(e);
        }
    }
    let joint = Povm::new(Outcomes::Pair(ws3.group().clone()), effects).unwrap();
    if !joint.validate(t.eq, t.psd).unwrap().is_valid() {
        failures.push("biased input joint observable is not a valid observable".into());
    }
    // its first marginal carries the bias
    let (ma, mb) = marginals(&joint).unwrap();
    let mut biased_a = a.effect(0).scaled_re(lambda);
    biased_a.add_assign_scaled(&Operator::identity(3), Complex::new(1.0 - lambda, 0.0));
    if ma.effect(0).max_abs_diff(&biased_a) > 1e-12 {
        failures.push("input first marginal is not the biased observable".into());
    }
    let want_b = smear(
        &b,
        &ProbDist::depolarizing(gamma, ws3.group().clone()).unwrap(),
    )
    .unwrap();
    if mb.max_abs_diff(&want_b) > 1e-12 {
        failures.push("input second marginal is not the uniformly smeared observable".into());
    }
    // after averaging, the marginals are the unbiased depolarized pair
    let averaged = covariantize(&joint, &ws3).unwrap();
    let (ma, mb) = marginals(averaged.povm()).unwrap();
    let want_a = smear(
        &a,
        &ProbDist::depolarizing(lambda, ws3.group().clone()).unwrap(),
    )
    .unwrap();
    let da = ma.max_abs_diff(&want_a);
    let db = mb.max_abs_diff(&want_b);
    if da > 1e-10 {
        failures.push(format!("averaged first marginal keeps bias: {da:.2e}"));
    }
    if db > 1e-10 {
        failures.push(format!("averaged second marginal off: {db:.2e}"));
    }
    report("09 covariantization", failures);
}

#[test]
fn criterion_10_trivial_marginal_rank_bound() {
    let mut failures = Vec::new();
    let t = tol();
    for d in 2..=4usize {
        let ws = WeylSystem::<f64>::cyclic(d).unwrap();
        let mut cases: Vec<(String, Povm<f64>)> = Vec::new();
        cases.push((
            "flat generator".into(),
            covariant_observable(&DensityOperator::maximally_mixed(d), &ws, &t)
                .unwrap()
                .into_povm(),
        ));
        cases.push((
            "conjugate-basis generator".into(),
            covariant_observable(
                &DensityOperator::pure(&ws.conjugate_basis_vector(0)),
                &ws,
                &t,
            )
            .unwrap()
            .into_povm(),
        ));
        cases.push((
            "reference-basis generator".into(),
            covariant_observable(&DensityOperator::pure(&ws.basis_vector(0)), &ws, &t)
                .unwrap()
                .into_povm(),
        ));
        if d == 4 {
            let effects: Vec<Operator<f64>> = (0..16)
                .map(|x| {
                    let (i, j) = (x / 4, x % 4);
                    let p = (1.0 - (std::f64::consts::TAU * (i * j) as f64 / 4.0).sin()) / 16.0;
                    Operator::identity(4).scaled_re(p)
                })
                .collect();
            cases.push((
                "sine-biased scalar".into(),
                Povm::new(Outcomes::Pair(ws.group().clone()), effects).unwrap(),
            ));
        }
        for (name, joint) in cases {
            match trivial_marginal_rank_bound(&joint, &t) {
                Ok(check) => {
                    if !check.holds {
                        failures.push(format!(
                            "d={d}, {name}: rank {} exceeds bound {}",
                            check.span_rank, check.bound
                        ));
                    }
                }
                Err(e) => failures.push(format!("d={d}, {name}: {e}")),
            }
        }
    }
    report("10 trivial-marginal-rank-bound", failures);
}

#[test]
fn criterion_11_gauss_sums_and_product_fourier() {
    let mut failures = Vec::new();
    for p in [3usize, 5, 7, 11] {
        for a in 1..p {
            let brute = gauss_sum::<f64>(p, a).unwrap();
            let closed = gauss_sum_closed_form::<f64>(p, a).unwrap();
            let err = (brute - closed).norm();
            if err > 1e-10 {
                failures.push(format!(
                    "p={p}, a={a}: sum differs from closed form by {err:.2e}"
                ));
            }
        }
    }
    let ws = build_weyl_system::<f64>(vec![2, 2]).unwrap();
    let expected: [[f64; 4]; 4] = [
        [1.0, 1.0, 1.0, 1.0],
        [1.0, -1.0, 1.0, -1.0],
        [1.0, 1.0, -1.0, -1.0],
        [1.0, -1.0, -1.0, 1.0],
    ];
    for r in 0..4 {
        for c in 0..4 {
            let got = ws.fourier().get(r, c);
            if got != Complex::new(expected[r][c] / 2.0, 0.0) {
                failures.push(format!(
                    "product Fourier entry ({r}, {c}) = {got} is not exactly {}",
                    expected[r][c] / 2.0
                ));
            }
        }
    }
    report("11 gauss-sums-and-product-fourier", failures);
}
