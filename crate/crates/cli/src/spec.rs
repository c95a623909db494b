//! ConeSpec ingestion: strict JSON parsing with field-level error context.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::Value;

use lcs_toric::lattice::IntVector;

#[derive(Debug, Clone)]
pub enum CliError {
    MalformedJson(String),
    MissingField(String),
    BadFieldType(String),
    ValidationFailed(String),
    BadArgument(String),
    Io(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::MalformedJson(_) => "MalformedJson",
            CliError::MissingField(_) => "MissingField",
            CliError::BadFieldType(_) => "BadFieldType",
            CliError::ValidationFailed(_) => "ValidationFailed",
            CliError::BadArgument(_) => "BadArgument",
            CliError::Io(_) => "Io",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::MalformedJson(m)
            | CliError::MissingField(m)
            | CliError::BadFieldType(m)
            | CliError::ValidationFailed(m)
            | CliError::BadArgument(m)
            | CliError::Io(m) => m,
        }
    }
}

/// A parsed, field-validated cone specification. Cone-level validation
/// (primitivity, redundancy, pointedness) happens in the build step.
#[derive(Debug, Clone)]
pub struct ConeSpec {
    pub dim: usize,
    pub normals: Vec<IntVector>,
    pub normalize: bool,
    /// The period as given (opaque label) and as an exact rational.
    pub a: Option<(String, BigRational)>,
    pub lambda: Option<BigRational>,
    pub lee_vector: Option<IntVector>,
}

pub fn parse_cone_file(bytes: &[u8]) -> Result<ConeSpec, CliError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| CliError::MalformedJson(format!("input is not UTF-8: {e}")))?;
    let v: Value = serde_json::from_str(text)
        .map_err(|e| CliError::MalformedJson(e.to_string()))?;
    let obj = v
        .as_object()
        .ok_or_else(|| CliError::BadFieldType("top level must be a JSON object".into()))?;

    let dim = match obj.get("dim") {
        None => return Err(CliError::MissingField("dim".into())),
        Some(d) => d
            .as_u64()
            .filter(|&d| d >= 1)
            .ok_or_else(|| CliError::BadFieldType("dim must be a positive integer".into()))?
            as usize,
    };

    let normals_v = obj
        .get("normals")
        .ok_or_else(|| CliError::MissingField("normals".into()))?;
    let normals = parse_int_vectors(normals_v, "normals")?;

    let normalize = match obj.get("normalize") {
        None => false,
        Some(b) => b
            .as_bool()
            .ok_or_else(|| CliError::BadFieldType("normalize must be a boolean".into()))?,
    };

    let a = match obj.get("a") {
        None => None,
        Some(Value::String(s)) => Some((s.clone(), parse_decimal(s)?)),
        Some(Value::Number(n)) => {
            let s = n.to_string();
            Some((s.clone(), parse_decimal(&s)?))
        }
        Some(_) => {
            return Err(CliError::BadFieldType(
                "a must be a decimal string or number".into(),
            ))
        }
    };
    if let Some((_, r)) = &a {
        if !r.is_positive() {
            return Err(CliError::ValidationFailed("a must be positive".into()));
        }
    }

    let lambda = match obj.get("lambda") {
        None => None,
        Some(Value::String(s)) => Some(parse_rational(s)?),
        Some(_) => {
            return Err(CliError::BadFieldType(
                "lambda must be a rational string \"p/q\"".into(),
            ))
        }
    };

    let lee_vector = match obj.get("lee_vector") {
        None => None,
        Some(l) => {
            let rows = parse_int_vectors(&Value::Array(vec![l.clone()]), "lee_vector")?;
            Some(rows.into_iter().next().unwrap())
        }
    };

    Ok(ConeSpec {
        dim,
        normals,
        normalize,
        a,
        lambda,
        lee_vector,
    })
}

fn parse_int_vectors(v: &Value, field: &str) -> Result<Vec<IntVector>, CliError> {
    let outer = v
        .as_array()
        .ok_or_else(|| CliError::BadFieldType(format!("{field} must be an array")))?;
    let mut out = Vec::with_capacity(outer.len());
    for (i, row) in outer.iter().enumerate() {
        let inner = row.as_array().ok_or_else(|| {
            CliError::BadFieldType(format!("{field}[{i}] must be an array of integers"))
        })?;
        let mut entries = Vec::with_capacity(inner.len());
        for (j, e) in inner.iter().enumerate() {
            let n = e.as_i64().ok_or_else(|| {
                CliError::BadFieldType(format!("{field}[{i}][{j}] must be an integer"))
            })?;
            entries.push(BigInt::from(n));
        }
        out.push(IntVector::new(entries));
    }
    Ok(out)
}

/// Parse "p/q" or "p" into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, CliError> {
    let bad = || CliError::BadFieldType(format!("bad rational \"{s}\": expected \"p/q\""));
    let (num_s, den_s) = match s.split_once('/') {
        Some((a, b)) => (a, b),
        None => (s, "1"),
    };
    let num: BigInt = num_s.trim().parse().map_err(|_| bad())?;
    let den: BigInt = den_s.trim().parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(CliError::BadFieldType(format!(
            "bad rational \"{s}\": zero denominator"
        )));
    }
    Ok(BigRational::new(num, den))
}

/// Parse a plain decimal like "1", "-2.5" into an exact rational.
pub fn parse_decimal(s: &str) -> Result<BigRational, CliError> {
    let bad = || CliError::BadFieldType(format!("bad decimal \"{s}\""));
    let t = s.trim();
    let (sign, t) = match t.strip_prefix('-') {
        Some(rest) => (-BigInt::one(), rest),
        None => (BigInt::one(), t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = match t.split_once('.') {
        Some((a, b)) => (a, b),
        None => (t, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let den = BigInt::from(10u32).pow(frac_part.len() as u32);
    Ok(BigRational::new(sign * num, den))
}

/// Canonical JSON for a parsed spec; reparsing it reproduces the spec.
pub fn canonical_spec_json(spec: &ConeSpec) -> String {
    let mut obj = serde_json::Map::new();
    obj.insert("dim".into(), Value::from(spec.dim as u64));
    obj.insert(
        "normals".into(),
        Value::Array(
            spec.normals
                .iter()
                .map(|v| {
                    Value::Array(
                        v.entries()
                            .iter()
                            .map(|e| Value::from(i64::try_from(e).unwrap()))
                            .collect(),
                    )
                })
                .collect(),
        ),
    );
    if spec.normalize {
        obj.insert("normalize".into(), Value::Bool(true));
    }
    if let Some((label, _)) = &spec.a {
        obj.insert("a".into(), Value::String(label.clone()));
    }
    if let Some(l) = &spec.lambda {
        obj.insert(
            "lambda".into(),
            Value::String(format!("{}/{}", l.numer(), l.denom())),
        );
    }
    if let Some(v) = &spec.lee_vector {
        obj.insert(
            "lee_vector".into(),
            Value::Array(
                v.entries()
                    .iter()
                    .map(|e| Value::from(i64::try_from(e).unwrap()))
                    .collect(),
            ),
        );
    }
    serde_json::to_string(&Value::Object(obj)).unwrap()
}
