use std::path::Path;

use ggs_core::{Error, Params};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    p: u64,
    m: Vec<u32>,
    e: Vec<i64>,
    default_depth: Option<usize>,
}

#[derive(Debug)]
pub struct Config {
    pub params: Params,
    pub default_depth: usize,
}

impl Config {
    /// The zero-sum configuration used when no file is given.
    pub fn builtin() -> Config {
        let params = Params::new(3, vec![1, 2, 3, 4], vec![1, -1]).expect("valid built-in configuration");
        Config { params, default_depth: 3 }
    }

    pub fn load(path: &Path) -> Result<Config, Error> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        Config::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Config, Error> {
        let raw: ConfigFile = serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let params = Params::new(raw.p, raw.m, raw.e)?;
        let default_depth = raw.default_depth.unwrap_or_else(|| params.levels().min(3));
        params.check_range(0, default_depth)?;
        Ok(Config { params, default_depth })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_keys() {
        let err = Config::parse(r#"{"p":3,"m":[1,2],"e":[1,1],"q":1}"#).unwrap_err();
        assert_eq!(err.code(), "INVALID_CONFIG");
    }

    #[test]
    fn validates_params() {
        assert_eq!(Config::parse(r#"{"p":4,"m":[1,2],"e":[1,1]}"#).unwrap_err().code(), "NOT_PRIME");
        let c = Config::parse(r#"{"p":3,"m":[1,2,3],"e":[1,1],"default_depth":2}"#).unwrap();
        assert_eq!(c.default_depth, 2);
        assert_eq!(
            Config::parse(r#"{"p":3,"m":[1,2],"e":[1,1],"default_depth":5}"#).unwrap_err().code(),
            "OUT_OF_PREFIX"
        );
    }
}
