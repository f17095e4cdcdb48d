//! JSON schemas for states and POVMs, shared by the library and the CLI.
//!
//! A POVM file carries the Hilbert dimension, the cyclic factors of the
//! outcome index group (doubled for joint observables on G × G), and one
//! effect per outcome with separate real and imaginary parts:
//!
//! ```json
//! {"dim": 2, "factors": [2], "effects": [{"outcome": [0], "re": [[..]], "im": [[..]]}]}
//! ```
//!
//! States use the same matrix layout without the outcome wrapper. The schemas
//! are fixed to `f64`.

use crate::error::{Error, Result};
use crate::group::FiniteAbelianGroup;
use crate::linalg::Operator;
use crate::povm::{Outcomes, Povm};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EffectJson {
    pub outcome: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PovmJson {
    pub dim: usize,
    pub factors: Vec<usize>,
    pub effects: Vec<EffectJson>,
}

fn matrix_parts(op: &Operator<f64>) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let d = op.dim();
    let re = (0..d)
        .map(|r| (0..d).map(|c| op.get(r, c).re).collect())
        .collect();
    let im = (0..d)
        .map(|r| (0..d).map(|c| op.get(r, c).im).collect())
        .collect();
    (re, im)
}

fn matrix_from_parts(dim: usize, re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Operator<f64>> {
    if re.len() != dim
        || im.len() != dim
        || re.iter().any(|row| row.len() != dim)
        || im.iter().any(|row| row.len() != dim)
    {
        return Err(Error::ShapeMismatch(format!(
            "matrix parts do not form a {dim}×{dim} matrix"
        )));
    }
    Ok(Operator::from_fn(dim, |r, c| {
        Complex::new(re[r][c], im[r][c])
    }))
}

pub fn state_to_json(op: &Operator<f64>) -> StateJson {
    let (re, im) = matrix_parts(op);
    StateJson {
        dim: op.dim(),
        re,
        im,
    }
}

pub fn state_from_json(s: &StateJson) -> Result<Operator<f64>> {
    matrix_from_parts(s.dim, &s.re, &s.im)
}

pub fn povm_to_json(povm: &Povm<f64>) -> PovmJson {
    let index_group = povm.outcomes().index_group();
    let effects = povm
        .effects()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let (re, im) = matrix_parts(e);
            EffectJson {
                outcome: index_group.decode(i),
                re,
                im,
            }
        })
        .collect();
    PovmJson {
        dim: povm.dim(),
        factors: index_group.factors().to_vec(),
        effects,
    }
}

/// Rebuild a POVM from its JSON form. When the factor list splits into two
/// identical halves whose product equals `dim`, the outcome set is read as the
/// pair set G × G; otherwise as the group given by the factors.
pub fn povm_from_json(p: &PovmJson) -> Result<Povm<f64>> {
    let index_group = FiniteAbelianGroup::new(p.factors.clone())?;
    let half = p.factors.len() / 2;
    let outcomes = if !p.factors.is_empty()
        && p.factors.len().is_multiple_of(2)
        && p.factors[..half] == p.factors[half..]
        && p.factors[..half].iter().product::<usize>() == p.dim
    {
        Outcomes::Pair(FiniteAbelianGroup::new(p.factors[..half].to_vec())?)
    } else {
        Outcomes::Single(index_group.clone())
    };
    if p.effects.len() != index_group.order() {
        return Err(Error::ShapeMismatch(format!(
            "{} effects for an outcome set of size {}",
            p.effects.len(),
            index_group.order()
        )));
    }
    let mut effects = vec![None; index_group.order()];
    for e in &p.effects {
        let i = index_group.encode(&e.outcome)?;
        if effects[i].is_some() {
            return Err(Error::InvalidInput(format!(
                "outcome {:?} appears twice",
                e.outcome
            )));
        }
        effects[i] = Some(matrix_from_parts(p.dim, &e.re, &e.im)?);
    }
    let effects = effects
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::InvalidInput("missing outcomes in effect list".into()))?;
    Povm::new(outcomes, effects)
}
