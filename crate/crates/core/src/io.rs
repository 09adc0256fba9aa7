//! JSON encodings of algebra elements and problem files.
//!
//! An element is written either as a bare list of reals (a diagonal), as
//! `{"diag": [...]}`, or as `{"blocks": [M₁, …]}` with each `M_i` a list of
//! rows whose entries are reals or `[re, im]` pairs.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{AlgebraSpec, CMat, HermElem, State, C64};
use crate::error::{Error, Result};
use crate::expfam::ExpFamilySpec;
use crate::families;
use crate::spectral::Projection;

pub const SCHEMA: &str = "entgeo/1";

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn value(&self) -> C64 {
        match self {
            Entry::Real(x) => C64::new(*x, 0.0),
            Entry::Complex([re, im]) => C64::new(*re, *im),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(untagged)]
pub enum ElemJson {
    Diagonal(Vec<f64>),
    Diag { diag: Vec<f64> },
    Blocks { blocks: Vec<Vec<Vec<Entry>>> },
}

impl ElemJson {
    pub fn to_elem(&self, spec: &AlgebraSpec) -> Result<HermElem> {
        match self {
            ElemJson::Diagonal(d) | ElemJson::Diag { diag: d } => HermElem::diagonal(spec, d),
            ElemJson::Blocks { blocks } => {
                let mats = blocks
                    .iter()
                    .map(|rows| {
                        let k = rows.len();
                        if rows.iter().any(|r| r.len() != k) {
                            return Err(Error::Parse(format!("block with {k} rows is not square")));
                        }
                        Ok(CMat::from_fn(k, k, |r, c| rows[r][c].value()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                HermElem::new(spec.clone(), mats)
            }
        }
    }
}

/// `{"blocks": [[[re, im], …], …]}`.
pub fn elem_to_json(a: &HermElem) -> Value {
    let blocks: Vec<Value> = a
        .blocks()
        .iter()
        .map(|b| {
            let rows: Vec<Value> = (0..b.nrows())
                .map(|r| Value::Array((0..b.ncols()).map(|c| json!([b[(r, c)].re, b[(r, c)].im])).collect()))
                .collect();
            Value::Array(rows)
        })
        .collect();
    json!({ "blocks": blocks })
}

pub fn projection_to_json(p: &Projection) -> Value {
    json!({ "rank_profile": p.rank_profile(), "matrix": elem_to_json(p.elem()) })
}

/// A problem file: an algebra with a family and optional query data.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemInput {
    #[serde(default)]
    pub schema: Option<String>,
    /// Name of a built-in family; replaces `blocks`, `theta0` and `u`.
    #[serde(default)]
    pub family: Option<String>,
    #[serde(default)]
    pub blocks: Option<Vec<usize>>,
    #[serde(default)]
    pub theta0: Option<ElemJson>,
    #[serde(default)]
    pub u: Option<Vec<ElemJson>>,
    #[serde(default)]
    pub xi: Option<Vec<f64>>,
    #[serde(default)]
    pub state: Option<ElemJson>,
    #[serde(default)]
    pub states: Option<Vec<ElemJson>>,
    /// Direction for geodesic queries.
    #[serde(default)]
    pub direction: Option<ElemJson>,
    #[serde(default)]
    pub t: Option<Vec<f64>>,
}

impl ProblemInput {
    pub fn parse(text: &str) -> Result<Self> {
        let p: ProblemInput = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if let Some(s) = &p.schema {
            if s != SCHEMA {
                return Err(Error::Parse(format!("unsupported schema {s:?}, expected {SCHEMA:?}")));
            }
        }
        Ok(p)
    }

    pub fn family(&self) -> Result<ExpFamilySpec> {
        if let Some(name) = &self.family {
            if self.blocks.is_some() || self.u.is_some() {
                return Err(Error::Parse("give either a family name or blocks and u, not both".into()));
            }
            return families::by_name(name).ok_or_else(|| Error::Parse(format!("unknown family {name:?}")));
        }
        let blocks = self.blocks.clone().ok_or_else(|| Error::Parse("missing \"blocks\"".into()))?;
        let spec = AlgebraSpec::new(blocks)?;
        let u = self.u.as_ref().ok_or_else(|| Error::Parse("missing \"u\"".into()))?;
        let dirs = u.iter().map(|e| e.to_elem(&spec)).collect::<Result<Vec<_>>>()?;
        let theta0 = match &self.theta0 {
            Some(t) => t.to_elem(&spec)?,
            None => HermElem::zeros(&spec),
        };
        ExpFamilySpec::new(theta0, dirs)
    }

    /// `state` and `states`, in that order.
    pub fn states(&self, spec: &AlgebraSpec) -> Result<Vec<State>> {
        let mut out = Vec::new();
        for e in self.state.iter().chain(self.states.iter().flatten()) {
            out.push(State::new(e.to_elem(spec)?)?);
        }
        Ok(out)
    }
}
