//! Group presentations as read from JSON, and the model they realize.

use serde::{Deserialize, Serialize};

use crate::circle::{parse_matrix, CircleModel, Mobius};
use crate::error::{Error, Result};
use crate::symbolic::SymbolicModel;
use crate::word::Alphabet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelTag {
    #[serde(rename = "mobius")]
    Mobius,
    #[serde(rename = "symbolic")]
    Symbolic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "free-group")]
    FreeGroup,
    #[serde(rename = "free-product")]
    FreeProductFiniteCyclics,
    #[serde(rename = "raw-matrix-group")]
    RawMatrixGroup,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Text(String),
    Rows(Vec<Vec<i64>>),
}

impl MatrixSpec {
    fn to_mobius(&self) -> Result<Mobius> {
        match self {
            Self::Text(s) => parse_matrix(s),
            Self::Rows(r) => match r.as_slice() {
                [x, y] if x.len() == 2 && y.len() == 2 => Mobius::from_i64(x[0], x[1], y[0], y[1]),
                _ => Err(Error::Parse("matrix must be 2×2".into())),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixSpec>,
    /// 0 or absent means infinite order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupPresentation {
    pub model: ModelTag,
    pub family: Family,
    pub generators: Vec<GeneratorSpec>,
}

pub enum Realized {
    Circle(CircleModel),
    Symbolic(SymbolicModel),
}

fn letter_name(i: usize) -> String {
    ((b'a' + i as u8) as char).to_string()
}

impl GroupPresentation {
    pub fn from_json(s: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(s)?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("presentation serializes")
    }

    pub fn free_group(rank: usize) -> Self {
        Self {
            model: ModelTag::Symbolic,
            family: Family::FreeGroup,
            generators: (0..rank).map(|i| GeneratorSpec { name: letter_name(i), matrix: None, order: None }).collect(),
        }
    }

    pub fn f2() -> Self {
        Self::free_group(2)
    }

    /// Free product of cyclic groups in the symbolic model.
    pub fn free_product(names: &[&str], orders: &[u32]) -> Self {
        Self {
            model: ModelTag::Symbolic,
            family: Family::FreeProductFiniteCyclics,
            generators: names
                .iter()
                .zip(orders)
                .map(|(n, &o)| GeneratorSpec { name: n.to_string(), matrix: None, order: Some(o) })
                .collect(),
        }
    }

    /// `ℤ/2 ∗ ℤ/3` realized as PSL(2,ℤ).
    pub fn psl2z() -> Self {
        let g = |name: &str, m: &str, o| GeneratorSpec {
            name: name.into(),
            matrix: Some(MatrixSpec::Text(m.into())),
            order: Some(o),
        };
        Self {
            model: ModelTag::Mobius,
            family: Family::FreeProductFiniteCyclics,
            generators: vec![g("s", "[[0,-1],[1,0]]", 2), g("t", "[[0,-1],[1,-1]]", 3)],
        }
    }

    /// F₂ realized by the Sanov matrices.
    pub fn sanov() -> Self {
        let g = |name: &str, m: &str| GeneratorSpec { name: name.into(), matrix: Some(MatrixSpec::Text(m.into())), order: None };
        Self {
            model: ModelTag::Mobius,
            family: Family::FreeGroup,
            generators: vec![g("a", "[[1,2],[0,1]]"), g("b", "[[1,0],[2,1]]")],
        }
    }

    fn matrices(&self) -> Result<Vec<Mobius>> {
        self.generators
            .iter()
            .map(|g| {
                g.matrix
                    .as_ref()
                    .ok_or_else(|| Error::InvalidPresentation(format!("generator {} has no matrix", g.name)))?
                    .to_mobius()
            })
            .collect()
    }

    fn orders(&self) -> Result<Vec<u32>> {
        match self.model {
            ModelTag::Symbolic => Ok(self.generators.iter().map(|g| g.order.unwrap_or(0)).collect()),
            ModelTag::Mobius => self
                .matrices()?
                .iter()
                .zip(&self.generators)
                .map(|(m, g)| {
                    let inferred = matrix_order(m);
                    match g.order {
                        Some(o) if o != inferred => Err(Error::InvalidPresentation(format!(
                            "generator {} has order {inferred}, declared {o}",
                            g.name
                        ))),
                        _ => Ok(inferred),
                    }
                })
                .collect(),
        }
    }

    pub fn alphabet(&self) -> Result<Alphabet> {
        Alphabet::new(self.generators.iter().map(|g| g.name.clone()).collect(), self.orders()?)
    }

    pub fn validate(&self) -> Result<()> {
        let orders = self.orders()?;
        match self.family {
            Family::FreeGroup if orders.iter().any(|&o| o != 0) => {
                return Err(Error::InvalidPresentation("free group generators must have infinite order".into()))
            }
            Family::RawMatrixGroup if self.model != ModelTag::Mobius => {
                return Err(Error::InvalidPresentation("raw matrix groups need the mobius model".into()))
            }
            _ => {}
        }
        if self.model == ModelTag::Symbolic && self.generators.iter().any(|g| g.matrix.is_some()) {
            return Err(Error::InvalidPresentation("symbolic generators take orders, not matrices".into()));
        }
        if orders.contains(&1) {
            return Err(Error::InvalidPresentation("trivial generator".into()));
        }
        self.alphabet().map(|_| ())
    }

    /// Free products of at most two factors with no loxodromic element.
    pub fn is_elementary(&self) -> Result<bool> {
        if self.family == Family::RawMatrixGroup {
            return Ok(false);
        }
        Ok(match self.orders()?.as_slice() {
            [] | [_] => true,
            [2, 2] => true,
            _ => false,
        })
    }

    pub fn realize(&self) -> Result<Realized> {
        let al = self.alphabet()?;
        Ok(match self.model {
            ModelTag::Mobius => Realized::Circle(CircleModel::new(al, self.matrices()?)?),
            ModelTag::Symbolic => Realized::Symbolic(SymbolicModel::new(al)?),
        })
    }
}

/// Projective order of an integer matrix; 0 for infinite order.
pub fn matrix_order(m: &Mobius) -> u32 {
    let mut p = m.clone();
    for n in 1..=6 {
        if p.is_identity() {
            return n;
        }
        p = p.mul(m);
    }
    0
}
