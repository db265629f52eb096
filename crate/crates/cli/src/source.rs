//! Group sources: `builtin:NAME`, `file:PATH` (JSON) and
//! `presentation:<...>` (inline) or `presentation:PATH`.

use std::fs;

use bordcalc_core::builtins::builtin;
use bordcalc_core::presentation::group_from_presentation;
use bordcalc_core::{Error, FiniteGroup, Result};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum GroupFile {
    Permutation {
        degree: usize,
        generators: Vec<Vec<usize>>,
        #[serde(default)]
        labels: Option<Vec<String>>,
    },
    Cayley {
        table: Vec<Vec<usize>>,
    },
}

pub fn parse_group_json(text: &str) -> Result<FiniteGroup> {
    let file: GroupFile =
        serde_json::from_str(text).map_err(|e| Error::Input(format!("group file: {e}")))?;
    match file {
        GroupFile::Permutation {
            degree,
            generators,
            labels,
        } => FiniteGroup::from_permutations(degree, &generators, labels, bordcalc_core::group::DEFAULT_ORDER_CAP),
        GroupFile::Cayley { table } => FiniteGroup::from_cayley(&table),
    }
}

fn read(path: &str) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {path}: {e}")))
}

pub fn resolve(source: &str, max_cosets: usize) -> Result<FiniteGroup> {
    let (scheme, rest) = source.split_once(':').unwrap_or(("builtin", source));
    match scheme {
        "builtin" => builtin(rest),
        "file" => parse_group_json(&read(rest)?),
        "presentation" => {
            let rest = rest.trim();
            let text = if rest.starts_with('<') {
                rest.to_string()
            } else {
                read(rest)?
            };
            group_from_presentation(&text, max_cosets)
        }
        // builtin names such as "C8:Q8" contain a colon themselves
        _ => builtin(source),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sources() {
        assert_eq!(resolve("builtin:S3", 1000).unwrap().order(), 6);
        assert_eq!(resolve("C8:Q8", 1000).unwrap().order(), 64);
        assert_eq!(resolve("presentation:<a | a^5>", 1000).unwrap().order(), 5);
        let g = parse_group_json(r#"{"type":"permutation","degree":3,"generators":[[1,2,0],[1,0,2]]}"#).unwrap();
        assert_eq!(g.order(), 6);
        let g = parse_group_json(r#"{"type":"cayley","table":[[0,1],[1,0]]}"#).unwrap();
        assert_eq!(g.order(), 2);
        assert!(matches!(parse_group_json("{}"), Err(Error::Input(_))));
        assert!(resolve("builtin:nope", 10).is_err());
    }
}
