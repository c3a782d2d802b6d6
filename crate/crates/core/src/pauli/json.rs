//! JSON form `{"n": N, "terms": [{"p": "XZ", "re": r, "im": i}, ...]}`.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{PauliString, PauliSum};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct TermJson {
    p: String,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct SumJson {
    n: usize,
    terms: Vec<TermJson>,
}

impl PauliSum {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<PauliSum> {
        Ok(serde_json::from_str(s)?)
    }
}

impl TryFrom<SumJson> for PauliSum {
    type Error = Error;

    fn try_from(j: SumJson) -> Result<Self> {
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in j.terms {
            let (n, p) = PauliString::parse(&t.p)?;
            if n != j.n {
                return Err(Error::SizeMismatch { left: j.n, right: n });
            }
            terms.push((p, Complex64::new(t.re, t.im)));
        }
        PauliSum::from_terms(j.n, terms)
    }
}

impl Serialize for PauliSum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SumJson {
            n: self.nqubits(),
            terms: self
                .sorted_labels()
                .into_iter()
                .map(|(p, c)| TermJson { p, re: c.re, im: c.im })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PauliSum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SumJson::deserialize(d)?;
        PauliSum::try_from(j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_and_exact() {
        let h = PauliSum::from_labels([("ZX", 0.1), ("XZ", -2.5)]).unwrap();
        let s = h.to_json().unwrap();
        assert_eq!(
            s,
            r#"{"n":2,"terms":[{"p":"XZ","re":-2.5,"im":0.0},{"p":"ZX","re":0.1,"im":0.0}]}"#
        );
        assert_eq!(PauliSum::from_json(&s).unwrap(), h);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(PauliSum::from_json(r#"{"n":2,"terms":[{"p":"XQ","re":1,"im":0}]}"#).is_err());
        assert!(PauliSum::from_json(r#"{"n":3,"terms":[{"p":"XZ","re":1,"im":0}]}"#).is_err());
    }
}
