//! The JSON input document shared by every command.

use l2alex::laurent::SerializedTerm;
use l2alex::twist::SerializedClass;
use l2alex::{CohomClass, LaurentMatrix, LaurentPoly};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum InputError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("invalid document at line {line}, column {column}: {message}")]
    Schema { line: usize, column: usize, message: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("index_divisor must be a positive integer, got {0}")]
    IndexDivisor(String),
    #[error("invalid class: {0}")]
    Class(String),
    #[error("missing field: {0}")]
    Missing(&'static str),
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

impl InputError {
    /// Stable identifier printed with every input error.
    pub fn code(&self) -> &'static str {
        match self {
            InputError::Json { .. } => "E101",
            InputError::Schema { .. } => "E102",
            InputError::Dimension(_) => "E103",
            InputError::IndexDivisor(_) => "E104",
            InputError::Class(_) => "E105",
            InputError::Missing(_) => "E106",
            InputError::Usage(_) => "E107",
            InputError::Io { .. } => "E108",
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    variables: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<Vec<SerializedTerm>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    poly: Option<Vec<SerializedTerm>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    class: Option<SerializedClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pairs: Option<Vec<(f64, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    index_divisor: Option<serde_json::Number>,
}

/// How the polynomial data was given.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Body {
    Matrix,
    Poly,
}

/// A validated input document. A `"poly"` body is held as a 1x1 matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct InputDocument {
    pub variables: Vec<String>,
    pub matrix: LaurentMatrix,
    pub body: Body,
    pub class: Option<CohomClass>,
    pub pairs: Option<Vec<(f64, f64)>>,
    pub index_divisor: Option<u32>,
}

impl InputDocument {
    pub fn class(&self) -> Result<&CohomClass, InputError> {
        self.class.as_ref().ok_or(InputError::Missing("class"))
    }

    pub fn index_divisor(&self) -> u32 {
        self.index_divisor.unwrap_or(1)
    }

    /// The polynomial of a `"poly"` document, or the determinant of the matrix.
    pub fn polynomial(&self) -> LaurentPoly {
        match self.body {
            Body::Poly => self.matrix.get(0, 0).clone(),
            Body::Matrix => self.matrix.determinant(),
        }
    }

    pub fn to_json(&self) -> String {
        let (matrix, poly) = match self.body {
            Body::Matrix => (Some(self.matrix.to_serialized()), None),
            Body::Poly => (None, Some(self.matrix.get(0, 0).to_serialized())),
        };
        let raw = RawDocument {
            variables: self.variables.clone(),
            matrix,
            poly,
            class: self.class.as_ref().map(CohomClass::to_serialized),
            pairs: self.pairs.clone(),
            index_divisor: self.index_divisor.map(serde_json::Number::from),
        };
        serde_json::to_string(&raw).expect("document serializes")
    }
}

fn json_error(e: serde_json::Error) -> InputError {
    let (line, column, message) = (e.line(), e.column(), e.to_string());
    match e.classify() {
        serde_json::error::Category::Data => InputError::Schema { line, column, message },
        _ => InputError::Json { line, column, message },
    }
}

fn check_terms(terms: &[SerializedTerm], nvars: usize, at: &str) -> Result<(), InputError> {
    for t in terms {
        if t.exp.len() != nvars {
            return Err(InputError::Dimension(format!(
                "{at}: exponent {:?} has length {}, expected {nvars}",
                t.exp,
                t.exp.len()
            )));
        }
        if !(t.re.is_finite() && t.im.is_finite()) {
            return Err(InputError::Schema {
                line: 0,
                column: 0,
                message: format!("{at}: non-finite coefficient"),
            });
        }
    }
    Ok(())
}

/// Parses and validates a document; every invariant is checked here.
pub fn parse_input(text: &str) -> Result<InputDocument, InputError> {
    let raw: RawDocument = serde_json::from_str(text).map_err(json_error)?;
    let nvars = raw.variables.len();

    let index_divisor = match &raw.index_divisor {
        None => None,
        Some(n) => match n.as_u64() {
            Some(k) if k >= 1 && k <= u32::MAX as u64 => Some(k as u32),
            _ => return Err(InputError::IndexDivisor(n.to_string())),
        },
    };

    let (matrix, body) = match (&raw.matrix, &raw.poly) {
        (Some(_), Some(_)) => {
            return Err(InputError::Usage("give either \"matrix\" or \"poly\", not both".into()))
        }
        (None, None) => return Err(InputError::Missing("matrix")),
        (Some(rows), None) => {
            let p = rows.len();
            for (i, row) in rows.iter().enumerate() {
                if row.len() != p {
                    return Err(InputError::Dimension(format!(
                        "matrix row {i} has {} entries, expected {p}",
                        row.len()
                    )));
                }
                for (j, entry) in row.iter().enumerate() {
                    check_terms(entry, nvars, &format!("matrix[{i}][{j}]"))?;
                }
            }
            let m = LaurentMatrix::from_serialized(nvars, rows).map_err(|e| InputError::Dimension(e.to_string()))?;
            (m, Body::Matrix)
        }
        (None, Some(terms)) => {
            check_terms(terms, nvars, "poly")?;
            let p = LaurentPoly::from_serialized(nvars, terms).map_err(|e| InputError::Dimension(e.to_string()))?;
            let m = LaurentMatrix::from_rows(nvars, vec![vec![p]]).map_err(|e| InputError::Dimension(e.to_string()))?;
            (m, Body::Poly)
        }
    };

    let class = match &raw.class {
        None => None,
        Some(c) => {
            if c.sigma.len() != nvars {
                return Err(InputError::Dimension(format!(
                    "class has {} entries for {nvars} variables",
                    c.sigma.len()
                )));
            }
            if let Some(phi) = &c.phi {
                if let Some(row) = phi.iter().find(|row| row.len() != nvars) {
                    return Err(InputError::Dimension(format!(
                        "phi row has {} entries for {nvars} variables",
                        row.len()
                    )));
                }
            }
            Some(CohomClass::from_serialized(c).map_err(|e| InputError::Class(e.to_string()))?)
        }
    };

    if let Some(pairs) = &raw.pairs {
        if pairs.iter().any(|(a, b)| !(a.is_finite() && b.is_finite())) {
            return Err(InputError::Schema {
                line: 0,
                column: 0,
                message: "pairs must be finite".into(),
            });
        }
    }

    Ok(InputDocument {
        variables: raw.variables,
        matrix,
        body,
        class,
        pairs: raw.pairs,
        index_divisor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"variables":["z"],"matrix":[[[{"exp":[1],"re":1,"im":0}]]],"class":{"sigma":[1]}}"#;

    #[test]
    fn minimal_document() {
        let doc = parse_input(MINIMAL).unwrap();
        assert_eq!(doc.matrix.size(), 1);
        assert_eq!(doc.class().unwrap().sigma(), &[1.0]);
        assert_eq!(doc.index_divisor(), 1);
    }

    #[test]
    fn sigma_length_mismatch() {
        let text = MINIMAL.replace(r#""sigma":[1]"#, r#""sigma":[1,2]"#);
        assert!(matches!(parse_input(&text), Err(InputError::Dimension(_))));
    }

    #[test]
    fn decomposition_is_kept() {
        let text = MINIMAL.replace(r#"{"sigma":[1]}"#, r#"{"sigma":[1],"r":[1],"phi":[[1]]}"#);
        let doc = parse_input(&text).unwrap();
        assert!(doc.class().unwrap().decomposition().is_some());
    }

    #[test]
    fn distinct_error_codes() {
        let bad_json = parse_input("{\"variables\": [\"z\"],\n  \"matrix\": [[[ }").unwrap_err();
        match &bad_json {
            InputError::Json { line, .. } => assert_eq!(*line, 2),
            other => panic!("{other:?}"),
        }
        let bad_div = parse_input(&MINIMAL.replace("}}", r#"},"index_divisor":0}"#)).unwrap_err();
        let bad_neg = parse_input(&MINIMAL.replace("}}", r#"},"index_divisor":-2}"#)).unwrap_err();
        let bad_dim = parse_input(&MINIMAL.replace("[1],\"re\"", "[1,0],\"re\"")).unwrap_err();
        let bad_shape = parse_input(r#"{"variables":["z"],"matrix":[[[]],[[]]]}"#).unwrap_err();
        assert_eq!(bad_div.code(), "E104");
        assert_eq!(bad_neg.code(), "E104");
        assert_eq!(bad_dim.code(), "E103");
        assert_eq!(bad_shape.code(), "E103");
        let codes = [bad_json.code(), bad_div.code(), bad_dim.code()];
        assert!(codes[0] != codes[1] && codes[1] != codes[2] && codes[0] != codes[2]);
    }

    #[test]
    fn poly_body() {
        let doc = parse_input(r#"{"variables":["a","b"],"poly":[{"exp":[0,0],"re":1},{"exp":[1,0],"re":1},{"exp":[0,1],"re":1}]}"#)
            .unwrap();
        assert_eq!(doc.body, Body::Poly);
        assert_eq!(doc.polynomial().num_terms(), 3);
        assert_eq!(parse_input(&doc.to_json()).unwrap(), doc);
    }
}
