//! JSON channel files.
//!
//! ```json
//! {
//!   "groups": [[2], [2]],
//!   "output_size": 3,
//!   "output_labels": ["0", "1", "2"],
//!   "probabilities": [[1, 0, 0], ["0", "1", "0"], [0, 1, 0], [0, 0, "1/1"]],
//!   "metadata": { "name": "binary adder", "seed": null, "notes": "" }
//! }
//! ```
//!
//! Rows follow the lexicographic order of `(x_1, ..., x_m)`. Entries are JSON
//! numbers or strings holding a decimal or an exact fraction `"p/q"`. A row
//! written entirely as fractions must sum to exactly 1.

use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::abelian::GroupSpec;
use crate::channel::Mac;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub groups: Vec<Vec<u64>>,
    pub output_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_labels: Option<Vec<String>>,
    pub probabilities: Vec<Vec<Entry>>,
    #[serde(default)]
    pub metadata: Metadata,
}

enum Value {
    Exact(BigRational),
    Float(f64),
}

fn parse_entry(e: &Entry, row: usize, col: usize) -> Result<Value> {
    let bad = |why: String| Error::Parse(format!("probabilities[{row}][{col}]: {why}"));
    match e {
        Entry::Number(v) => Ok(Value::Float(*v)),
        Entry::Text(s) => {
            let s = s.trim();
            if let Some((p, q)) = s.split_once('/') {
                let p: BigInt = p.trim().parse().map_err(|_| bad(format!("bad numerator in {s:?}")))?;
                let q: BigInt = q.trim().parse().map_err(|_| bad(format!("bad denominator in {s:?}")))?;
                if q.is_zero() {
                    return Err(bad(format!("zero denominator in {s:?}")));
                }
                Ok(Value::Exact(BigRational::new(p, q)))
            } else if let Ok(n) = s.parse::<BigInt>() {
                Ok(Value::Exact(BigRational::from_integer(n)))
            } else {
                s.parse::<f64>().map(Value::Float).map_err(|_| bad(format!("cannot parse {s:?}")))
            }
        }
    }
}

impl ChannelFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Converts to a validated channel. Fully exact rows are checked for an
    /// exact unit sum before the one conversion to floating point.
    pub fn to_mac(&self) -> Result<Mac> {
        let groups = self
            .groups
            .iter()
            .map(|o| GroupSpec::new(o.clone()))
            .collect::<Result<Vec<_>>>()?;
        let rows = GroupSpec::product_of(&groups)?.cardinality();
        if self.probabilities.len() != rows {
            return Err(Error::Parse(format!(
                "probabilities: expected {rows} rows for groups {:?}, found {}",
                self.groups,
                self.probabilities.len()
            )));
        }
        let mut table = Vec::with_capacity(rows * self.output_size);
        for (r, row) in self.probabilities.iter().enumerate() {
            if row.len() != self.output_size {
                return Err(Error::Parse(format!(
                    "probabilities[{r}]: expected {} entries, found {}",
                    self.output_size,
                    row.len()
                )));
            }
            let values =
                row.iter().enumerate().map(|(c, e)| parse_entry(e, r, c)).collect::<Result<Vec<_>>>()?;
            if values.iter().all(|v| matches!(v, Value::Exact(_))) {
                let sum: BigRational = values
                    .iter()
                    .map(|v| match v {
                        Value::Exact(q) => q.clone(),
                        Value::Float(_) => unreachable!(),
                    })
                    .sum();
                if !sum.is_one() {
                    return Err(Error::InvalidChannel(vec![format!(
                        "row {r} sums to {sum}, not exactly 1"
                    )]));
                }
            }
            for (c, v) in values.into_iter().enumerate() {
                let f = match v {
                    Value::Float(f) => f,
                    Value::Exact(q) => q.to_f64().ok_or_else(|| {
                        Error::Parse(format!("probabilities[{r}][{c}]: {q} is not representable"))
                    })?,
                };
                table.push(f);
            }
        }
        let mac = Mac::new(groups, self.output_size, table)?;
        match &self.output_labels {
            Some(labels) => mac.with_labels(labels.clone()),
            None => Ok(mac),
        }
    }

    /// Decimal form with enough digits to round-trip every entry.
    pub fn from_mac(mac: &Mac, metadata: Metadata) -> Self {
        let probabilities = (0..mac.input_count())
            .map(|x| mac.row(x).iter().map(|&p| Entry::Number(p)).collect())
            .collect();
        Self {
            groups: mac.groups().iter().map(|g| g.orders().to_vec()).collect(),
            output_size: mac.output_size(),
            output_labels: mac.labels().map(<[String]>::to_vec),
            probabilities,
            metadata,
        }
    }
}

pub fn load(path: impl AsRef<Path>) -> Result<Mac> {
    load_file(path)?.to_mac()
}

pub fn load_file(path: impl AsRef<Path>) -> Result<ChannelFile> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    ChannelFile::from_json(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn save(mac: &Mac, metadata: Metadata, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, ChannelFile::from_mac(mac, metadata).to_json() + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::UserSet;
    use crate::testing::*;

    #[test]
    fn rationals_load_exactly() {
        let text = r#"{"groups": [[3]], "output_size": 2,
            "probabilities": [["1/3", "2/3"], ["1", "0"], [0.5, "0.5"]]}"#;
        let w = ChannelFile::from_json(text).unwrap().to_mac().unwrap();
        assert_eq!(w.prob(0, 0), 1.0 / 3.0);
        assert_eq!(w.prob(2, 1), 0.5);
    }

    #[test]
    fn inexact_rational_row_is_rejected() {
        let text = r#"{"groups": [[2]], "output_size": 2,
            "probabilities": [["1/3", "1/3"], ["1", "0"]]}"#;
        let err = ChannelFile::from_json(text).unwrap().to_mac().unwrap_err();
        assert!(err.to_string().contains("row 0"), "{err}");
    }

    #[test]
    fn bad_row_sum_names_the_row() {
        let text = r#"{"groups": [[2]], "output_size": 2,
            "probabilities": [[0.5, 0.5], [0.6, 0.3]]}"#;
        let err = ChannelFile::from_json(text).unwrap().to_mac().unwrap_err();
        assert!(err.to_string().contains("row 1"), "{err}");
    }

    #[test]
    fn shape_and_syntax_errors() {
        let short = r#"{"groups": [[2],[2]], "output_size": 2, "probabilities": [[1, 0]]}"#;
        assert!(ChannelFile::from_json(short).unwrap().to_mac().is_err());
        let broken = "{\"groups\": [[2]],\n \"output_size\": }";
        let err = ChannelFile::from_json(broken).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let junk = r#"{"groups": [[2]], "output_size": 1, "probabilities": [["x"], [1]]}"#;
        let err = ChannelFile::from_json(junk).unwrap().to_mac().unwrap_err();
        assert!(err.to_string().contains("probabilities[0][0]"), "{err}");
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for (i, w) in [bac(), random_mac(&[&[2], &[3]], 3, 4), random_mac(&[&[2], &[2], &[2]], 2, 5)]
            .into_iter()
            .enumerate()
        {
            let path = dir.path().join(format!("{i}.json"));
            save(&w, Metadata { seed: Some(4), ..Default::default() }, &path).unwrap();
            let back = load(&path).unwrap();
            for s in UserSet::all_nonempty(w.users()) {
                let d = (back.mutual_info(s).unwrap() - w.mutual_info(s).unwrap()).abs();
                assert!(d < 1e-12);
            }
            assert_eq!(back.table(), w.table());
        }
    }
}
