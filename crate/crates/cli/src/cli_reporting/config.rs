//! Job configuration parsed from JSON, with JSON-pointer error paths.

use std::fmt;

use ahg_core::monodromy_engine::{Orientation, ParameterVector, PointConfiguration, Scalar};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputError {
    /// RFC 6901 pointer into the input document; empty for the root.
    pub pointer: String,
    pub message: String,
}

impl InputError {
    fn at(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        InputError {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pointer.is_empty() {
            write!(f, "input: {}", self.message)
        } else {
            write!(f, "input {}: {}", self.pointer, self.message)
        }
    }
}

impl std::error::Error for InputError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum J0Selection {
    All,
    Indices(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyRequest {
    /// Catalog id; inferred from `A` when absent.
    pub catalog: Option<String>,
    pub frozen: Option<Vec<Complex64>>,
    pub radius: Option<f64>,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobConfig {
    pub a: PointConfiguration,
    pub c: ParameterVector,
    pub j0: J0Selection,
    pub orientation: Orientation,
    pub format: OutputFormat,
    pub z: Option<ParameterVector>,
    pub verify: Option<VerifyRequest>,
}

impl JobConfig {
    /// 1-based indices requested, validated against `N`.
    pub fn indices(&self) -> Result<Vec<usize>, InputError> {
        let n = self.a.len();
        match &self.j0 {
            J0Selection::All => Ok((1..=n).collect()),
            J0Selection::Indices(list) => {
                for (k, &j) in list.iter().enumerate() {
                    if j == 0 || j > n {
                        let pointer = if list.len() == 1 { "/j0".to_string() } else { format!("/j0/{k}") };
                        return Err(InputError::at(pointer, format!("j0 = {j} is out of range 1..={n}")));
                    }
                }
                Ok(list.clone())
            }
        }
    }
}

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

fn describe(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

fn integer(v: &Value, at: &str) -> Result<BigInt, InputError> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| InputError::at(at, format!("expected an integer, found {n}"))),
        other => Err(InputError::at(at, format!("expected an integer, found {}", describe(other)))),
    }
}

fn array<'a>(v: &'a Value, at: &str, what: &str) -> Result<&'a Vec<Value>, InputError> {
    v.as_array()
        .ok_or_else(|| InputError::at(at, format!("expected {what}, found {}", describe(v))))
}

fn parse_points(v: &Value) -> Result<PointConfiguration, InputError> {
    let rows = array(v, "/A", "a list of integer points")?;
    if rows.is_empty() {
        return Err(InputError::at("/A", "A must contain at least one point"));
    }
    let mut points = Vec::with_capacity(rows.len());
    let mut dim = None;
    for (i, row) in rows.iter().enumerate() {
        let at = format!("/A/{i}");
        let coords = array(row, &at, "a list of integers")?;
        if coords.is_empty() {
            return Err(InputError::at(at, "points need at least one coordinate"));
        }
        match dim {
            None => dim = Some(coords.len()),
            Some(d) if d != coords.len() => {
                return Err(InputError::at(
                    at,
                    format!("point has {} coordinates, expected {d}", coords.len()),
                ))
            }
            Some(_) => {}
        }
        let point = coords
            .iter()
            .enumerate()
            .map(|(k, x)| integer(x, &format!("{at}/{k}")))
            .collect::<Result<Vec<_>, _>>()?;
        points.push(point);
    }
    PointConfiguration::new(points).map_err(|e| InputError::at("/A", e.to_string()))
}

/// `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    (!den.is_zero()).then(|| BigRational::new(num, den))
}

fn float_field(obj: &Map<String, Value>, key: &str, at: &str) -> Result<f64, InputError> {
    match obj.get(key) {
        Some(Value::Number(n)) => n
            .as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| InputError::at(format!("{at}/{key}"), "expected a finite number")),
        Some(other) => Err(InputError::at(
            format!("{at}/{key}"),
            format!("expected a number, found {}", describe(other)),
        )),
        None if key == "im" => Ok(0.0),
        None => Err(InputError::at(at, format!("missing field \"{key}\""))),
    }
}

fn complex_object(obj: &Map<String, Value>, at: &str) -> Result<Complex64, InputError> {
    if let Some(extra) = obj.keys().find(|k| *k != "re" && *k != "im") {
        return Err(InputError::at(
            format!("{at}/{}", escape(extra)),
            "unknown field; complex entries are {\"re\": .., \"im\": ..}",
        ));
    }
    Ok(Complex64::new(float_field(obj, "re", at)?, float_field(obj, "im", at)?))
}

/// Parameter entries: rational strings or `{re, im}` objects; bare numbers
/// are accepted as floats only when `numbers_allowed`.
fn parse_scalars(v: &Value, at: &str, numbers_allowed: bool) -> Result<ParameterVector, InputError> {
    let entries = array(v, at, "a list of parameters")?;
    let mut scalars = Vec::with_capacity(entries.len());
    for (k, e) in entries.iter().enumerate() {
        let here = format!("{at}/{k}");
        let s = match e {
            Value::String(s) => Scalar::Exact(parse_rational(s).ok_or_else(|| {
                InputError::at(&here, format!("\"{s}\" is not a rational of the form \"p/q\""))
            })?),
            Value::Object(obj) => Scalar::Float(complex_object(obj, &here)?),
            Value::Number(n) if numbers_allowed => Scalar::Float(Complex64::new(
                n.as_f64().ok_or_else(|| InputError::at(&here, "number out of range"))?,
                0.0,
            )),
            Value::Number(_) => {
                return Err(InputError::at(
                    here,
                    "write rational entries as strings \"p/q\" or complex ones as {\"re\", \"im\"}",
                ))
            }
            other => {
                return Err(InputError::at(
                    here,
                    format!("expected a rational string or {{re, im}} object, found {}", describe(other)),
                ))
            }
        };
        scalars.push(s);
    }
    ParameterVector::from_scalars(scalars)
        .map_err(|_| InputError::at(at, "entries mix exact rationals and floating-point values"))
}

fn parse_j0(v: Option<&Value>) -> Result<J0Selection, InputError> {
    let index = |v: &Value, at: &str| -> Result<usize, InputError> {
        v.as_u64()
            .map(|x| x as usize)
            .ok_or_else(|| InputError::at(at, format!("expected a positive integer, found {}", describe(v))))
    };
    match v {
        None => Ok(J0Selection::All),
        Some(Value::String(s)) if s == "all" => Ok(J0Selection::All),
        Some(Value::Array(list)) => {
            if list.is_empty() {
                return Err(InputError::at("/j0", "empty index list"));
            }
            list.iter()
                .enumerate()
                .map(|(k, x)| index(x, &format!("/j0/{k}")))
                .collect::<Result<_, _>>()
                .map(J0Selection::Indices)
        }
        Some(Value::String(s)) => Err(InputError::at("/j0", format!("expected an index, a list or \"all\", found \"{s}\""))),
        Some(x) => index(x, "/j0").map(|j| J0Selection::Indices(vec![j])),
    }
}

pub fn parse_orientation(s: &str) -> Option<Orientation> {
    match s {
        "ccw" => Some(Orientation::Ccw),
        "cw" => Some(Orientation::Cw),
        _ => None,
    }
}

fn parse_verify(v: Option<&Value>) -> Result<Option<VerifyRequest>, InputError> {
    let blank = VerifyRequest {
        catalog: None,
        frozen: None,
        radius: None,
        tol: None,
    };
    let obj = match v {
        None | Some(Value::Bool(false)) | Some(Value::Null) => return Ok(None),
        Some(Value::Bool(true)) => return Ok(Some(blank)),
        Some(Value::Object(obj)) => obj,
        Some(other) => {
            return Err(InputError::at(
                "/verify",
                format!("expected a boolean or an object, found {}", describe(other)),
            ))
        }
    };
    let mut req = blank;
    for (key, value) in obj {
        let at = format!("/verify/{}", escape(key));
        match key.as_str() {
            "catalog" => {
                req.catalog = Some(
                    value
                        .as_str()
                        .ok_or_else(|| InputError::at(&at, "expected a catalog id string"))?
                        .to_string(),
                )
            }
            "frozen" => {
                let list = array(value, &at, "a list of complex numbers")?;
                req.frozen = Some(
                    list.iter()
                        .enumerate()
                        .map(|(k, x)| match x {
                            Value::Number(n) => Ok(Complex64::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
                            Value::Object(obj) => complex_object(obj, &format!("{at}/{k}")),
                            other => Err(InputError::at(
                                format!("{at}/{k}"),
                                format!("expected a number or {{re, im}} object, found {}", describe(other)),
                            )),
                        })
                        .collect::<Result<_, _>>()?,
                )
            }
            "radius" | "tol" => {
                let x = value
                    .as_f64()
                    .filter(|x| *x > 0.0 && x.is_finite())
                    .ok_or_else(|| InputError::at(&at, "expected a positive number"))?;
                if key == "radius" {
                    req.radius = Some(x);
                } else {
                    req.tol = Some(x);
                }
            }
            _ => return Err(InputError::at(at, "unknown field")),
        }
    }
    Ok(Some(req))
}

pub fn parse_config(text: &str) -> Result<JobConfig, InputError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| InputError::at("", format!("invalid JSON: {e}")))?;
    parse_config_value(&doc)
}

pub fn parse_config_value(doc: &Value) -> Result<JobConfig, InputError> {
    let obj = doc
        .as_object()
        .ok_or_else(|| InputError::at("", format!("expected an object, found {}", describe(doc))))?;
    const KNOWN: [&str; 7] = ["A", "c", "j0", "z", "orientation", "format", "verify"];
    if let Some(extra) = obj.keys().find(|k| !KNOWN.contains(&k.as_str())) {
        return Err(InputError::at(format!("/{}", escape(extra)), "unknown field"));
    }
    let a = parse_points(obj.get("A").ok_or_else(|| InputError::at("", "missing field \"A\""))?)?;
    let c = parse_scalars(obj.get("c").ok_or_else(|| InputError::at("", "missing field \"c\""))?, "/c", false)?;
    if c.len() != a.n() {
        return Err(InputError::at(
            "/c",
            format!("expected {} entries (one per coordinate), found {}", a.n(), c.len()),
        ));
    }
    let z = obj.get("z").map(|v| parse_scalars(v, "/z", true)).transpose()?;
    if let Some(z) = &z {
        if z.len() != a.len() {
            return Err(InputError::at(
                "/z",
                format!("expected {} entries (one per point), found {}", a.len(), z.len()),
            ));
        }
    }
    let orientation = match obj.get("orientation") {
        None => Orientation::Ccw,
        Some(Value::String(s)) => parse_orientation(s)
            .ok_or_else(|| InputError::at("/orientation", format!("expected \"ccw\" or \"cw\", found \"{s}\"")))?,
        Some(other) => {
            return Err(InputError::at(
                "/orientation",
                format!("expected \"ccw\" or \"cw\", found {}", describe(other)),
            ))
        }
    };
    let format = match obj.get("format").map(|v| v.as_str()) {
        None => OutputFormat::Json,
        Some(Some("json")) => OutputFormat::Json,
        Some(Some("text")) => OutputFormat::Text,
        Some(_) => return Err(InputError::at("/format", "expected \"json\" or \"text\"")),
    };
    Ok(JobConfig {
        a,
        c,
        j0: parse_j0(obj.get("j0"))?,
        orientation,
        format,
        z,
        verify: parse_verify(obj.get("verify"))?,
    })
}
