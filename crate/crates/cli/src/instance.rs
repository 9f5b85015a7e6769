use std::fmt;
use std::path::Path;

use serde::Deserialize;
use simplexcomp::model::PartialMatrix;
use simplexcomp::numeric::{parse_rational, to_f64, Rational};

/// Problem with the input, reported with exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<simplexcomp::Error> for InputError {
    fn from(e: simplexcomp::Error) -> Self {
        Self(e.to_string())
    }
}

/// A value spelled as `"p/q"`, a decimal string, or a bare JSON number.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Text(String),
    Number(serde_json::Number),
}

impl Value {
    pub fn to_rational(&self) -> Result<Rational, simplexcomp::Error> {
        match self {
            Value::Text(s) => parse_rational(s),
            Value::Number(n) => parse_rational(&n.to_string()),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub row: usize,
    pub col: usize,
    pub value: Value,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Entry>,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        serde_json::from_str(text).map_err(|e| InputError(format!("malformed instance: {e}")))
    }

    pub fn to_matrix(&self) -> Result<PartialMatrix, InputError> {
        let mut values = Vec::with_capacity(self.entries.len());
        for (k, e) in self.entries.iter().enumerate() {
            let v = e
                .value
                .to_rational()
                .map_err(|err| InputError(format!("entry {k} at ({}, {}): {err}", e.row, e.col)))?;
            values.push((e.row, e.col, v));
        }
        Ok(PartialMatrix::new(self.rows, self.cols, values)?)
    }
}

fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

pub fn load_matrix(path: &Path) -> Result<PartialMatrix, InputError> {
    let text = read(path)?;
    InstanceFile::parse(&text)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))?
        .to_matrix()
}

/// Full target matrix given as a JSON array of rows.
pub fn load_target(path: &Path, rows: usize, cols: usize) -> Result<Vec<Vec<f64>>, InputError> {
    let text = read(path)?;
    let raw: Vec<Vec<Value>> = serde_json::from_str(&text)
        .map_err(|e| InputError(format!("{}: malformed target: {e}", path.display())))?;
    if raw.len() != rows || raw.iter().any(|r| r.len() != cols) {
        return Err(InputError(format!("target must be a {rows}x{cols} matrix")));
    }
    raw.iter()
        .map(|row| row.iter().map(|v| Ok(to_f64(&v.to_rational()?))).collect())
        .collect()
}

/// Comma-separated list of rationals, as in `1/27,1/27,0.5`.
pub fn parse_list(text: &str) -> Result<Vec<Rational>, InputError> {
    text.split(',')
        .map(|s| parse_rational(s).map_err(InputError::from))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use simplexcomp::numeric::rat;

    #[test]
    fn decimals_and_fractions_agree() {
        let a = InstanceFile::parse(r#"{"rows":1,"cols":2,"entries":[{"row":0,"col":0,"value":"0.16"},{"row":0,"col":1,"value":0.25}]}"#)
            .unwrap()
            .to_matrix()
            .unwrap();
        let b = InstanceFile::parse(r#"{"rows":1,"cols":2,"entries":[{"row":0,"col":0,"value":"4/25"},{"row":0,"col":1,"value":"1/4"}]}"#)
            .unwrap()
            .to_matrix()
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.get(0, 0), Some(&rat(4, 25)));
    }

    #[test]
    fn bad_value_names_the_entry() {
        let err =
            InstanceFile::parse(r#"{"rows":1,"cols":1,"entries":[{"row":0,"col":0,"value":"x"}]}"#)
                .unwrap()
                .to_matrix()
                .unwrap_err();
        assert!(err.0.contains("entry 0 at (0, 0)"));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = InstanceFile::parse("{\"rows\": 1,\n \"cols\": }").unwrap_err();
        assert!(err.0.contains("line 2"));
    }

    #[test]
    fn list_parsing() {
        assert_eq!(
            parse_list("1/27, 0.5").unwrap(),
            vec![rat(1, 27), rat(1, 2)]
        );
        assert!(parse_list("1/0").is_err());
    }
}
