//! Float wrapper that serializes as a JSON number with exactly three decimals.

use serde::de::Deserializer;
use serde::ser::{Error as _, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Fixed3(pub f64);

pub(crate) fn format3(v: f64) -> String {
    let s = format!("{v:.3}");
    // "-0.000" and friends
    if s.trim_start_matches('-').bytes().all(|b| b == b'0' || b == b'.') {
        "0.000".to_string()
    } else {
        s
    }
}

impl Serialize for Fixed3 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(S::Error::custom("non-finite float"));
        }
        let raw = RawValue::from_string(format3(self.0)).map_err(S::Error::custom)?;
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Fixed3 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        f64::deserialize(deserializer).map(Fixed3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        assert_eq!(format3(10.75), "10.750");
        assert_eq!(format3(-0.0001), "0.000");
        assert_eq!(format3(-1.5), "-1.500");
        assert_eq!(serde_json::to_string(&[Fixed3(1.0), Fixed3(2.25)]).unwrap(), "[1.000,2.250]");
    }
}
