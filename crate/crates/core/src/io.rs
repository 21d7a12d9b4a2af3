//! JSON document forms shared by the command line and the Python module.
//!
//! ```text
//! vector:         {"field": "real", "mode": "exact", "data": [1, "-1/2", 0]}
//! operator:       {"m": 2, "n": 2, "p": 1, "field": "complex", "data": [[[1, 0], [0, 1]], [0, 2]]}
//! super-operator: {"m": 2, "n": 1, "p": "inf", "field": "real", "vec": "col-major", "matrix": [[-3, 1], [0, 0]]}
//! ```
//!
//! `field`, `mode` and `p` are optional in files; a value given both on the
//! command line and in a file must agree. Operators are told apart from
//! vectors by the presence of `m` or `n`.

use serde_json::Value;

use crate::error::{Error, Result};
use crate::operator::OperatorMatrix;
use crate::preserver::PreserverMap;
use crate::scalar::{Field, Mode, Scalar, ScalarConfig};
use crate::vector::{PNorm, Vector};

/// The optional `field` / `mode` / `p` settings of one source.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Header {
    pub field: Option<Field>,
    pub mode: Option<Mode>,
    pub p: Option<PNorm>,
}

fn merge<T: PartialEq + Copy + std::fmt::Debug>(a: Option<T>, b: Option<T>, what: &str) -> Result<Option<T>> {
    match (a, b) {
        (Some(x), Some(y)) if x != y => Err(Error::ConfigMismatch(format!("conflicting {what}: {x:?} and {y:?}"))),
        (x, y) => Ok(x.or(y)),
    }
}

impl Header {
    pub fn merge(self, other: Header) -> Result<Header> {
        Ok(Header {
            field: merge(self.field, other.field, "field")?,
            mode: merge(self.mode, other.mode, "mode")?,
            p: merge(self.p, other.p, "p")?,
        })
    }

    /// Real exact unless the field is complex, which defaults to float.
    pub fn config(&self, norm_tol: Option<f64>, phase_tol: Option<f64>) -> Result<ScalarConfig> {
        let field = self.field.unwrap_or(Field::Real);
        let mode = self.mode.unwrap_or(match field {
            Field::Real => Mode::ExactRational,
            Field::Complex => Mode::Float,
        });
        let mut cfg = ScalarConfig::default_for(field, mode)?;
        if mode == Mode::Float {
            cfg.norm_tol = norm_tol.unwrap_or(cfg.norm_tol);
            cfg.phase_tol = phase_tol.unwrap_or(cfg.phase_tol);
            cfg.validate()?;
        }
        Ok(cfg)
    }

    pub fn p_or_default(&self) -> PNorm {
        self.p.unwrap_or(PNorm::One)
    }
}

/// Parses document text, reporting the line and column of syntax errors.
pub fn parse_document(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("malformed JSON at line {} column {}: {e}", e.line(), e.column())))
}

fn get_str<'a>(v: &'a Value, key: &str) -> Result<Option<&'a str>> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(other) => Err(Error::Parse(format!("\"{key}\" must be a string, got {other}"))),
    }
}

fn get_usize(v: &Value, key: &str) -> Result<Option<usize>> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(x) => x
            .as_u64()
            .map(|n| Some(n as usize))
            .ok_or_else(|| Error::Parse(format!("\"{key}\" must be a nonnegative integer, got {x}"))),
    }
}

pub fn parse_p(v: &Value) -> Result<PNorm> {
    match v {
        Value::Number(n) if n.as_u64() == Some(1) => Ok(PNorm::One),
        Value::String(s) => s.parse(),
        other => Err(Error::Parse(format!("\"p\" must be 1 or \"inf\", got {other}"))),
    }
}

/// The header fields present in a document.
pub fn header(v: &Value) -> Result<Header> {
    if !v.is_object() {
        return Ok(Header::default());
    }
    Ok(Header {
        field: get_str(v, "field")?.map(str::parse).transpose()?,
        mode: get_str(v, "mode")?.map(str::parse).transpose()?,
        p: v.get("p").filter(|x| !x.is_null()).map(parse_p).transpose()?,
    })
}

pub fn is_operator(v: &Value) -> bool {
    v.get("m").is_some() || v.get("n").is_some()
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Parse(format!("{what} must be an array, got {v}")))
}

fn entries<S: Scalar>(v: &Value, what: &str) -> Result<Vec<S>> {
    array(v, what)?
        .iter()
        .map(|x| S::from_json(x).map_err(|e| Error::Parse(format!("{what}: {e}"))))
        .collect()
}

fn rows<S: Scalar>(v: &Value, key: &str) -> Result<Vec<Vec<S>>> {
    let data = v.get(key).ok_or_else(|| Error::Parse(format!("missing \"{key}\"")))?;
    array(data, key)?
        .iter()
        .enumerate()
        .map(|(i, r)| entries(r, &format!("{key} row {i}")))
        .collect()
}

/// A vector document, or a bare array of entries.
pub fn vector_from_json<S: Scalar>(v: &Value, config: ScalarConfig) -> Result<Vector<S>> {
    let data = if v.is_array() {
        v
    } else {
        v.get("data").ok_or_else(|| Error::Parse("missing \"data\"".into()))?
    };
    Vector::new(entries(data, "data")?, config)
}

/// An operator document; `p` is the resolved exponent.
pub fn operator_from_json<S: Scalar>(v: &Value, p: PNorm, config: ScalarConfig) -> Result<OperatorMatrix<S>> {
    let rows = rows::<S>(v, "data")?;
    let op = OperatorMatrix::from_rows(rows, p, config)?;
    for (key, got) in [("m", op.rows()), ("n", op.cols())] {
        if let Some(want) = get_usize(v, key)? {
            if want != got {
                return Err(Error::DimensionMismatch(format!("\"{key}\" is {want} but the data has {got}")));
            }
        }
    }
    Ok(op)
}

/// A super-operator document; `m` and `n` are required.
pub fn map_from_json<S: Scalar>(v: &Value, p: PNorm, config: ScalarConfig) -> Result<PreserverMap<S>> {
    if let Some(layout) = get_str(v, "vec")? {
        if layout != "col-major" {
            return Err(Error::Parse(format!("unsupported vectorization {layout:?}, expected \"col-major\"")));
        }
    }
    let m = get_usize(v, "m")?.ok_or_else(|| Error::Parse("missing \"m\"".into()))?;
    let n = get_usize(v, "n")?.ok_or_else(|| Error::Parse("missing \"n\"".into()))?;
    PreserverMap::from_rows(m, n, p, config, rows::<S>(v, "matrix")?)
}

/// Runs `$body` with `$S` bound to the scalar type selected by a
/// [`ScalarConfig`].
#[macro_export]
macro_rules! with_scalar {
    ($cfg:expr, $S:ident => $body:expr) => {
        match ($cfg.field, $cfg.mode) {
            ($crate::Field::Real, $crate::Mode::ExactRational) => {
                type $S = $crate::Rational;
                $body
            }
            ($crate::Field::Real, $crate::Mode::Float) => {
                type $S = f64;
                $body
            }
            ($crate::Field::Complex, _) => {
                type $S = $crate::Complex64;
                $body
            }
        }
    };
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Complex64, Rational};
    use serde_json::json;

    #[test]
    fn header_merging() {
        let file = header(&json!({"field": "real", "p": "inf"})).unwrap();
        let cli = Header { mode: Some(Mode::Float), ..Default::default() };
        let h = cli.merge(file).unwrap();
        assert_eq!(h, Header { field: Some(Field::Real), mode: Some(Mode::Float), p: Some(PNorm::Inf) });
        let clash = Header { p: Some(PNorm::One), ..Default::default() };
        assert!(matches!(clash.merge(file), Err(Error::ConfigMismatch(_))));
        assert_eq!(Header::default().config(None, None).unwrap(), ScalarConfig::exact());
        let complex = Header { field: Some(Field::Complex), ..Default::default() };
        assert_eq!(complex.config(None, None).unwrap(), ScalarConfig::complex_float());
        let bad = Header { field: Some(Field::Complex), mode: Some(Mode::ExactRational), p: None };
        assert!(bad.config(None, None).is_err());
    }

    #[test]
    fn operator_documents() {
        let v = json!({"m": 2, "n": 2, "p": 1, "field": "real", "data": [[1, "1/2"], [0, -3]]});
        let a: OperatorMatrix<Rational> = operator_from_json(&v, PNorm::One, ScalarConfig::exact()).unwrap();
        assert_eq!(*a.get(0, 1), Rational::new(1.into(), 2.into()));
        assert_eq!(operator_from_json::<Rational>(&a.to_json(), PNorm::One, ScalarConfig::exact()).unwrap(), a);
        let wrong = json!({"m": 3, "data": [[1]]});
        assert!(matches!(
            operator_from_json::<Rational>(&wrong, PNorm::One, ScalarConfig::exact()),
            Err(Error::DimensionMismatch(_))
        ));
        let c = json!({"m": 1, "n": 2, "data": [[[0, 1], 2.5]]});
        let z: OperatorMatrix<Complex64> = operator_from_json(&c, PNorm::Inf, ScalarConfig::complex_float()).unwrap();
        assert_eq!(*z.get(0, 0), Complex64::new(0.0, 1.0));
        assert!(is_operator(&c) && !is_operator(&json!({"data": [1]})));
    }

    #[test]
    fn vector_and_map_documents() {
        let x: Vector<Rational> = vector_from_json(&json!([0, 1]), ScalarConfig::exact()).unwrap();
        assert_eq!(x.len(), 2);
        let t = map_from_json::<Rational>(
            &json!({"m": 2, "n": 1, "vec": "col-major", "matrix": [[-3, 1], [0, 0]]}),
            PNorm::One,
            ScalarConfig::exact(),
        )
        .unwrap();
        assert_eq!(t.rank(), 1);
        assert!(map_from_json::<Rational>(&json!({"m": 2, "n": 1, "vec": "row-major", "matrix": []}), PNorm::One, ScalarConfig::exact()).is_err());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse_document("{\"m\": 2,\n  oops}").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
    }
}
