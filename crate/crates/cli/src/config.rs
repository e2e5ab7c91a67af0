//! JSON run configuration. Unknown keys are rejected.

use serde::Deserialize;

use koszul_core::sections::{
    degree_points, polytope_system, product_system, projective_system, twist_family, Point,
    TwistFamily,
};
use koszul_core::{Error, MonomialSystem, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub system: SystemSpec,
    #[serde(default)]
    pub field: FieldConfig,
    #[serde(default)]
    pub betti: RangeConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub duality: RangeConfig,
    pub family: Option<FamilySpec>,
    pub sweep: Option<SweepConfig>,
    pub fit: Option<FitConfig>,
    pub equivariant: Option<EquivariantConfig>,
    pub threads: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SystemSpec {
    Projective {
        n: usize,
        b_degrees: Vec<i64>,
        l_degree: i64,
    },
    Product {
        factor_dims: Vec<usize>,
        l_degrees: Vec<i64>,
        b_degrees: Vec<Vec<i64>>,
    },
    Polytope {
        l_points: Vec<Point>,
        b_points: Vec<Vec<Point>>,
        variety_dim: usize,
    },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub prime: Option<u64>,
    #[serde(default)]
    pub rationals: bool,
    #[serde(default)]
    pub certify: bool,
}

/// `p` from 0 to `p_max`, `q` from `q_min` to `q_max`; absent bounds default
/// to `h0(L)` and `0..=dim X + 1`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeConfig {
    pub p_max: Option<usize>,
    pub q_min: Option<i64>,
    pub q_max: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub p_max: Option<usize>,
    pub degree_bound: Option<i64>,
}

/// `L_d = P + dA`. Degree lists for projective/product systems (one entry
/// per factor), explicit points for polytopes.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub a_degrees: Option<Vec<i64>>,
    pub p_degrees: Option<Vec<i64>>,
    pub a_points: Option<Vec<Point>>,
    pub p_points: Option<Vec<Point>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub p: usize,
    pub q: i64,
    pub d_from: u64,
    pub d_to: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub train: [u64; 2],
    pub holdout: [u64; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivariantConfig {
    pub n: usize,
    pub cap: Option<usize>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    pub fn build_system(&self) -> Result<MonomialSystem> {
        match &self.system {
            SystemSpec::Projective {
                n,
                b_degrees,
                l_degree,
            } => projective_system(*n, b_degrees, *l_degree),
            SystemSpec::Product {
                factor_dims,
                l_degrees,
                b_degrees,
            } => product_system(factor_dims, l_degrees, b_degrees),
            SystemSpec::Polytope {
                l_points,
                b_points,
                variety_dim,
            } => polytope_system(l_points, b_points, *variety_dim),
        }
    }

    pub fn build_family(&self) -> Result<TwistFamily> {
        let fam = self
            .family
            .as_ref()
            .ok_or_else(|| Error::Config("missing \"family\" section".into()))?;
        let base = self.build_system()?;
        let dims: Option<Vec<usize>> = match &self.system {
            SystemSpec::Projective { n, .. } => Some(vec![*n]),
            SystemSpec::Product { factor_dims, .. } => Some(factor_dims.clone()),
            SystemSpec::Polytope { .. } => None,
        };
        let (a, p) = match (fam, dims) {
            (
                FamilySpec {
                    a_degrees: Some(a),
                    p_degrees: Some(p),
                    a_points: None,
                    p_points: None,
                },
                Some(dims),
            ) => {
                if a.len() != dims.len() || p.len() != dims.len() {
                    return Err(Error::Config("family needs one degree per factor".into()));
                }
                (degree_points(&dims, a), degree_points(&dims, p))
            }
            (
                FamilySpec {
                    a_degrees: None,
                    p_degrees: None,
                    a_points: Some(a),
                    p_points: Some(p),
                },
                None,
            ) => (a.clone(), p.clone()),
            _ => {
                return Err(Error::Config(
                    "family: give a_degrees/p_degrees for projective or product systems, \
                     a_points/p_points for polytopes"
                        .into(),
                ))
            }
        };
        twist_family(&base, &a, &p)
    }
}
