use serde::{Deserialize, Serialize};

use super::body::Body;
use super::vector::Vector;
use crate::error::{Error, Result};

/// Text form of a body: `{"type":"vpolytope","vertices":[[...],...]}` or
/// `{"type":"ball","center":[...],"radius":r}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum BodyLiteral {
    VPolytope { vertices: Vec<Vector> },
    Ball { center: Vector, radius: f64 },
}

impl BodyLiteral {
    pub fn to_body(&self) -> Result<Body> {
        match self {
            BodyLiteral::VPolytope { vertices } => Body::polytope(vertices),
            BodyLiteral::Ball { center, radius } => Body::ball(*center, *radius),
        }
    }

    /// Literal for a polytope or ball; support tables have no literal form.
    pub fn from_body(body: &Body) -> Result<Self> {
        match body {
            Body::VPolytope(p) => Ok(BodyLiteral::VPolytope {
                vertices: p.vertices().to_vec(),
            }),
            Body::Ball { center, radius } => Ok(BodyLiteral::Ball {
                center: *center,
                radius: *radius,
            }),
            Body::SupportTable(_) => Err(Error::Unsupported("support table literal".into())),
        }
    }
}

pub fn parse_body(text: &str) -> Result<Body> {
    let lit: BodyLiteral =
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("body literal: {e}")))?;
    lit.to_body()
}
