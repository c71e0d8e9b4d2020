//! The JSON interchange format `{"dim": d, "points": [[x1, ..., xd], ...]}`.
//!
//! Rows are written sorted and deduplicated; on input any order is accepted.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::Config;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Wire {
    dim: usize,
    points: Vec<Vec<i32>>,
}

impl Serialize for Config {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Wire { dim: self.dim(), points: self.to_points() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Config {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = Wire::deserialize(d)?;
        Config::new(w.dim, &w.points).map_err(D::Error::custom)
    }
}

pub fn from_json(text: &str) -> Result<Config> {
    serde_json::from_str(text).map_err(|e| Error::arg(format!("bad point-set JSON: {e}")))
}

pub fn to_json(c: &Config) -> String {
    serde_json::to_string(c).expect("configurations always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_sorts_and_dedups() {
        let c = from_json(r#"{"dim":2,"points":[[2,1],[1,1],[2,1]]}"#).unwrap();
        assert_eq!(to_json(&c), r#"{"dim":2,"points":[[1,1],[2,1]]}"#);
        assert_eq!(from_json(&to_json(&c)).unwrap(), c);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(from_json(r#"{"dim":2,"points":[[1]]}"#).is_err());
        assert!(from_json(r#"{"dim":0,"points":[]}"#).is_err());
        assert!(from_json(r#"{"points":[]}"#).is_err());
        assert!(from_json("[1,2]").is_err());
    }
}
