//! Exact rationals and their `"p/q"` string form.

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};

pub type Q = Ratio<i64>;

pub fn q(numer: i64, denom: i64) -> Q {
    Q::new(numer, denom)
}

pub fn from_count(numer: usize, denom: usize) -> Q {
    if denom == 0 {
        return Q::zero();
    }
    Q::new(numer as i64, denom as i64)
}

/// `"p/q"` in lowest terms; integers still carry the `/1`.
pub fn to_string(value: &Q) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

pub fn parse(text: &str) -> Option<Q> {
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().ok()?;
            let q: i64 = q.trim().parse().ok()?;
            (q != 0).then(|| Q::new(p, q))
        }
        None => text.parse::<i64>().ok().map(Q::from_integer),
    }
}

pub fn to_f64(value: &Q) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

pub fn serialize<S: Serializer>(value: &Q, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.serialize_str(&to_string(value))
}

pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Q, D::Error> {
    let text = String::deserialize(deserializer)?;
    parse(&text).ok_or_else(|| serde::de::Error::custom(format!("bad rational `{text}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_form() {
        assert_eq!(to_string(&q(2, 10)), "1/5");
        assert_eq!(to_string(&q(4, 2)), "2/1");
        assert_eq!(parse("1/5"), Some(q(1, 5)));
        assert_eq!(parse("3"), Some(q(3, 1)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(from_count(3, 0), Q::zero());
    }
}
