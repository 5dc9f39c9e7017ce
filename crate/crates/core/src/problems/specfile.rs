//! `key = value` problem files.
//!
//! ```text
//! # 1-D total variation with explicit data
//! problem = tv1d
//! d = 0, 4
//! lambda = 1
//! ```
//!
//! Recognised problems and keys:
//!
//! * `tv1d`: `d` or (`n`, `seed`); `lambda`.
//! * `box-qp`: `n`, `m`, `seed`, `sigma`, `regularizer = l1|box`, `lambda`
//!   or `lo`/`hi`.
//! * `intersection`: `d`; one `set` line per set, either
//!   `box <lo,...> ; <hi,...>` or `halfspace <normal,...> ; <offset>`.
//! * `resource`: (`n`, `m`, `seed`) or explicit `lo`, `hi`, `alpha`, `beta`,
//!   `coupling` (row-major) and `budget`.
//!
//! `builtin = <name>` (with an optional `seed`) selects a gallery instance.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::functions::ConvexSet;

use super::{
    builtin, IntersectionProjSpec, ProblemSpec, QpRegularizer, RandomBoxQpSpec, ResourceAllocSpec,
    Tv1dSpec, DEFAULT_SEED,
};

/// Ordered entries with their 1-based line numbers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: Vec<(usize, String, String)>,
}

pub fn parse_key_values(text: &str) -> Result<KeyValues> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected `key = value`, got `{line}`"),
            });
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Parse {
                line: i + 1,
                message: "empty key".into(),
            });
        }
        entries.push((i + 1, key.to_string(), value.trim().to_string()));
    }
    Ok(KeyValues { entries })
}

impl KeyValues {
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries
            .iter()
            .map(|(_, k, v)| (k.as_str(), v.as_str()))
    }

    fn find(&self, key: &str) -> Option<&(usize, String, String)> {
        self.entries.iter().rev().find(|(_, k, _)| k == key)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.find(key).map(|(_, _, v)| v.as_str())
    }

    pub fn get_all(&self, key: &str) -> Vec<(usize, &str)> {
        self.entries
            .iter()
            .filter(|(_, k, _)| k == key)
            .map(|(l, _, v)| (*l, v.as_str()))
            .collect()
    }

    pub fn scalar<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.find(key) {
            None => Ok(None),
            Some((line, _, v)) => v.parse().map(Some).map_err(|_| Error::Parse {
                line: *line,
                message: format!("cannot parse `{key}` from `{v}`"),
            }),
        }
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.scalar(key)?
            .ok_or_else(|| Error::InvalidArgument(format!("missing key `{key}`")))
    }

    pub fn vector(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.find(key) {
            None => Ok(None),
            Some((line, _, v)) => parse_vector(v, *line).map(Some),
        }
    }

    fn require_vector(&self, key: &str) -> Result<Vec<f64>> {
        self.vector(key)?
            .ok_or_else(|| Error::InvalidArgument(format!("missing key `{key}`")))
    }
}

pub(crate) fn parse_vector(text: &str, line: usize) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("`{s}` is not a number"),
            })
        })
        .collect()
}

fn parse_set(text: &str, line: usize) -> Result<ConvexSet> {
    let text = text.trim();
    let (kind, rest) = text
        .split_once(char::is_whitespace)
        .ok_or_else(|| Error::Parse {
            line,
            message: format!("expected `box ...` or `halfspace ...`, got `{text}`"),
        })?;
    let (first, second) = rest.split_once(';').ok_or_else(|| Error::Parse {
        line,
        message: "set needs two `;`-separated parts".into(),
    })?;
    let first = parse_vector(first, line)?;
    let second = parse_vector(second, line)?;
    match kind {
        "box" => {
            if first.len() != second.len() {
                return Err(Error::Parse {
                    line,
                    message: "box bounds differ in length".into(),
                });
            }
            Ok(ConvexSet::Box {
                lo: first,
                hi: second,
            })
        }
        "halfspace" => match second.as_slice() {
            [offset] => Ok(ConvexSet::Halfspace {
                normal: first,
                offset: *offset,
            }),
            _ => Err(Error::Parse {
                line,
                message: "halfspace offset must be a single number".into(),
            }),
        },
        other => Err(Error::Parse {
            line,
            message: format!("unknown set kind `{other}`"),
        }),
    }
}

impl ProblemSpec {
    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        let seed = kv.scalar::<u64>("seed")?;
        if let Some(name) = kv.get("builtin") {
            return builtin(name, seed);
        }
        let seed = seed.unwrap_or(DEFAULT_SEED);
        let problem = kv.get("problem").ok_or_else(|| {
            Error::InvalidArgument("spec needs a `problem` or `builtin` key".into())
        })?;
        match problem {
            "tv1d" => {
                let lambda = kv.require("lambda")?;
                Ok(ProblemSpec::Tv1d(match kv.vector("d")? {
                    Some(d) => Tv1dSpec { d, lambda },
                    None => Tv1dSpec::seeded(kv.require("n")?, lambda, seed),
                }))
            }
            "box-qp" => {
                let defaults = RandomBoxQpSpec::default();
                let regularizer = match kv.get("regularizer").unwrap_or("l1") {
                    "l1" => QpRegularizer::L1 {
                        lambda: kv.scalar("lambda")?.unwrap_or(0.5),
                    },
                    "box" => QpRegularizer::Box {
                        lo: kv.require("lo")?,
                        hi: kv.require("hi")?,
                    },
                    other => {
                        return Err(Error::InvalidArgument(format!(
                            "unknown regularizer `{other}`"
                        )))
                    }
                };
                Ok(ProblemSpec::RandomBoxQp(RandomBoxQpSpec {
                    seed,
                    n: kv.scalar("n")?.unwrap_or(defaults.n),
                    m: kv.scalar("m")?.unwrap_or(defaults.m),
                    sigma: kv.scalar("sigma")?.unwrap_or(defaults.sigma),
                    regularizer,
                }))
            }
            "intersection" => {
                let sets = kv
                    .get_all("set")
                    .into_iter()
                    .map(|(line, v)| parse_set(v, line))
                    .collect::<Result<Vec<_>>>()?;
                Ok(ProblemSpec::IntersectionProj(IntersectionProjSpec {
                    d: kv.require_vector("d")?,
                    sets,
                }))
            }
            "resource" => {
                if kv.get("alpha").is_none() {
                    return Ok(ProblemSpec::ResourceAlloc(ResourceAllocSpec::seeded(
                        kv.scalar("n")?.unwrap_or(6),
                        kv.scalar("m")?.unwrap_or(2),
                        seed,
                    )));
                }
                Ok(ProblemSpec::ResourceAlloc(ResourceAllocSpec {
                    lo: kv.require_vector("lo")?,
                    hi: kv.require_vector("hi")?,
                    alpha: kv.require_vector("alpha")?,
                    beta: kv.require_vector("beta")?,
                    coupling: kv.require_vector("coupling")?,
                    budget: kv.require_vector("budget")?,
                }))
            }
            other => Err(Error::InvalidArgument(format!("unknown problem `{other}`"))),
        }
    }
}

pub fn parse_spec_file(text: &str) -> Result<ProblemSpec> {
    ProblemSpec::from_key_values(&parse_key_values(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tv1d_with_comments() {
        let spec =
            parse_spec_file("# toy\nproblem = tv1d\nd = 0, 4  # data\n\nlambda = 1\n").unwrap();
        assert_eq!(
            spec,
            ProblemSpec::Tv1d(Tv1dSpec {
                d: vec![0.0, 4.0],
                lambda: 1.0
            })
        );
    }

    #[test]
    fn intersection_sets() {
        let text = "problem = intersection\nd = 2, -1, 0.5\nset = box -1,-1,-1 ; 1,1,1\nset = halfspace 1,1,1 ; 0.5\n";
        assert_eq!(
            parse_spec_file(text).unwrap(),
            builtin("intersection", None).unwrap()
        );
    }

    #[test]
    fn builtin_key() {
        assert_eq!(
            parse_spec_file("builtin = box-qp\nseed = 9").unwrap(),
            builtin("box-qp", Some(9)).unwrap()
        );
    }

    #[test]
    fn errors_carry_line_numbers() {
        match parse_key_values("problem = tv1d\nnonsense\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match parse_spec_file("problem = tv1d\nlambda = 1\nd = 0, x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(parse_spec_file("problem = nope").is_err());
    }
}
