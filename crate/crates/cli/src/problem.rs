//! Problem documents: a field, a quaternion algebra, an involution, a sign
//! and a diagonal form, with elements in Laurent syntax.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use larmour_core::base_fields::ResidueField;
use larmour_core::hermitian::HermitianForm;
use larmour_core::quaternion::{AlgebraIso, QuatAlgebra, QuatElem};
use larmour_core::valued_field::{Laurent, ValuedField, DEFAULT_PRECISION};

use crate::error::CliError;

/// `p` as a prime or the string `"Q"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Characteristic {
    Prime(u64),
    Name(String),
}

impl Characteristic {
    /// Parse a command-line value: a prime or `Q`.
    pub fn from_arg(s: &str) -> Result<Self, CliError> {
        if s == "Q" {
            return Ok(Characteristic::Name("Q".into()));
        }
        s.parse()
            .map(Characteristic::Prime)
            .map_err(|_| CliError::Input(format!("--p expects a prime or Q, got {s:?}")))
    }
}

/// An element given as an integer or a Laurent string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Element {
    Int(i64),
    Text(String),
}

impl Element {
    fn parse(&self, k: &ValuedField, path: &str) -> Result<Laurent, CliError> {
        match self {
            Element::Int(n) => Ok(k.int(*n)),
            Element::Text(s) => k.parse(s).map_err(|source| CliError::Element {
                path: path.into(),
                source,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: Characteristic,
    #[serde(default = "default_precision")]
    pub precision: i64,
}

fn default_precision() -> i64 {
    DEFAULT_PRECISION
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub a: Element,
    pub b: Element,
    /// Required over `Q` unless the algebra visibly splits.
    #[serde(default, skip_serializing_if = "is_false")]
    pub assume_division: bool,
}

fn is_false(b: &bool) -> bool {
    !b
}

/// `"tau"`, `"tau_x"`, `"tau_y"`, `"tau_z"` or `{"tau_zeta": [d, a, b, c]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InvolutionSpec {
    Named(String),
    Zeta { tau_zeta: [Element; 4] },
}

impl Default for InvolutionSpec {
    fn default() -> Self {
        InvolutionSpec::Named("tau".into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProblemSpec {
    pub field: FieldSpec,
    pub algebra: AlgebraSpec,
    pub involution: InvolutionSpec,
    pub eps: i8,
    pub form: Vec<[Element; 4]>,
}

/// Accepts both the nested layout and flat `p`, `precision`, `a`, `b` keys.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    field: Option<FieldSpec>,
    p: Option<Characteristic>,
    precision: Option<i64>,
    algebra: Option<AlgebraSpec>,
    a: Option<Element>,
    b: Option<Element>,
    assume_division: Option<bool>,
    #[serde(default)]
    involution: InvolutionSpec,
    eps: i8,
    #[serde(default)]
    form: Vec<[Element; 4]>,
}

impl TryFrom<RawSpec> for ProblemSpec {
    type Error = CliError;

    fn try_from(r: RawSpec) -> Result<Self, CliError> {
        let field = match (r.field, r.p) {
            (Some(_), Some(_)) => {
                return Err(CliError::Input("give either field or p, not both".into()))
            }
            (Some(mut f), None) => {
                if let Some(prec) = r.precision {
                    f.precision = prec;
                }
                f
            }
            (None, Some(p)) => FieldSpec {
                p,
                precision: r.precision.unwrap_or(DEFAULT_PRECISION),
            },
            (None, None) => return Err(CliError::Input("missing field (or p)".into())),
        };
        let algebra = match (r.algebra, r.a, r.b) {
            (Some(mut alg), None, None) => {
                alg.assume_division |= r.assume_division.unwrap_or(false);
                alg
            }
            (None, Some(a), Some(b)) => AlgebraSpec {
                a,
                b,
                assume_division: r.assume_division.unwrap_or(false),
            },
            _ => {
                return Err(CliError::Input(
                    "give either algebra or both a and b".into(),
                ))
            }
        };
        Ok(ProblemSpec {
            field,
            algebra,
            involution: r.involution,
            eps: r.eps,
            form: r.form,
        })
    }
}

impl ProblemSpec {
    pub fn from_value(v: Value) -> Result<Self, CliError> {
        let raw: RawSpec = serde_json::from_value(v)
            .map_err(|e| CliError::Input(format!("problem document: {e}")))?;
        raw.try_into()
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let v: Value = serde_json::from_str(text).map_err(CliError::from_json)?;
        ProblemSpec::from_value(v)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem specs always serialize")
    }

    /// Apply `--p` and `--precision` overrides.
    pub fn with_overrides(mut self, p: Option<&Characteristic>, precision: Option<i64>) -> Self {
        if let Some(p) = p {
            self.field.p = p.clone();
        }
        if let Some(prec) = precision {
            self.field.precision = prec;
        }
        self
    }

    pub fn valued_field(&self) -> Result<ValuedField, CliError> {
        let residue = match &self.field.p {
            Characteristic::Prime(p) => ResidueField::prime(*p)?,
            Characteristic::Name(s) if s == "Q" => ResidueField::Rationals,
            Characteristic::Name(s) => {
                return Err(CliError::Input(format!(
                    "field.p must be a prime or \"Q\", got {s:?}"
                )))
            }
        };
        Ok(ValuedField::new(residue, self.field.precision)?)
    }

    /// Normalize algebra and involution and validate the form.
    pub fn build(&self) -> Result<Problem, CliError> {
        let k = self.valued_field()?;
        let a = self.algebra.a.parse(&k, "algebra.a")?;
        let b = self.algebra.b.parse(&k, "algebra.b")?;
        let raw = QuatAlgebra::presentation(a.clone(), b.clone())?;
        let quat = |c: &[Element; 4], path: &str| -> Result<QuatElem, CliError> {
            let mut out = Vec::with_capacity(4);
            for (i, e) in c.iter().enumerate() {
                out.push(e.parse(&k, &format!("{path}[{i}]"))?);
            }
            let [d, x, y, z]: [Laurent; 4] = out.try_into().expect("four coordinates");
            Ok(raw.elem(d, x, y, z))
        };
        let zeta = match &self.involution {
            InvolutionSpec::Named(n) => match n.as_str() {
                "tau" => None,
                "tau_x" => Some(raw.x()),
                "tau_y" => Some(raw.y()),
                "tau_z" => Some(raw.z()),
                other => return Err(CliError::Input(format!("unknown involution {other:?}"))),
            },
            InvolutionSpec::Zeta { tau_zeta } => Some(quat(tau_zeta, "involution.tau_zeta")?),
        };
        let entries = self
            .form
            .iter()
            .enumerate()
            .map(|(i, c)| quat(c, &format!("form[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let (form, iso) = HermitianForm::from_presentation(
            &a,
            &b,
            self.algebra.assume_division,
            zeta.as_ref(),
            self.eps,
            &entries,
        )?;
        Ok(Problem { form, iso })
    }
}

/// A validated problem in the normalized presentation.
#[derive(Debug, Clone)]
pub struct Problem {
    pub form: HermitianForm,
    /// From the user presentation to the normalized one.
    pub iso: AlgebraIso,
}
