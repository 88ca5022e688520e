//! Serde helpers rendering `Natural` values as decimal strings, so JSON
//! and CSV reports stay human-readable and byte-stable.

pub mod natstr {
    use crate::numtheory::Natural;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &Natural, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Natural, D::Error> {
        let s = String::deserialize(d)?;
        s.parse()
            .map_err(|e| D::Error::custom(format!("bad natural: {e}")))
    }
}

pub mod natstr_opt {
    use crate::numtheory::Natural;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &Option<Natural>, s: S) -> Result<S::Ok, S::Error> {
        match n {
            Some(v) => s.serialize_some(&v.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Natural>, D::Error> {
        let s: Option<String> = Option::deserialize(d)?;
        match s {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| D::Error::custom(format!("bad natural: {e}"))),
        }
    }
}
