use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use lintersect::{PrimeModulus, ResidueSet, SetFamily};
use serde::Deserialize;

use crate::commands::Failure;

/// A comma-separated residue list, braces optional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Residues(pub Vec<u64>);

impl FromStr for Residues {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .trim()
            .trim_start_matches('{')
            .trim_end_matches('}')
            .trim();
        if inner.is_empty() {
            return Ok(Residues(Vec::new()));
        }
        inner
            .split(',')
            .map(|x| x.trim().parse::<u64>().map_err(|e| format!("{x:?}: {e}")))
            .collect::<Result<_, _>>()
            .map(Residues)
    }
}

impl Residues {
    pub fn to_set(&self) -> Result<ResidueSet, Failure> {
        Ok(ResidueSet::new(self.0.iter().copied())?)
    }
}

pub fn modulus(p: Option<u64>) -> Result<Option<PrimeModulus>, Failure> {
    Ok(p.map(PrimeModulus::new).transpose()?)
}

#[derive(Deserialize)]
struct JsonFamily {
    n: usize,
    sets: Vec<Vec<usize>>,
}

/// Text or JSON, chosen by the first non-blank character.
pub fn read_family(path: &Path) -> Result<SetFamily, Failure> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text)
    } else {
        std::fs::File::open(path).and_then(|mut f| f.read_to_string(&mut text))
    }
    .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
    if text.trim_start().starts_with('{') {
        let parsed: JsonFamily = serde_json::from_str(&text)
            .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
        Ok(SetFamily::from_sets(parsed.n, parsed.sets)?)
    } else {
        Ok(SetFamily::parse_text(&text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residue_lists() {
        assert_eq!("0,1, 2".parse(), Ok(Residues(vec![0, 1, 2])));
        assert_eq!("{}".parse(), Ok(Residues(vec![])));
        assert_eq!("".parse(), Ok(Residues(vec![])));
        assert_eq!("{3,5}".parse(), Ok(Residues(vec![3, 5])));
        assert!("1,x".parse::<Residues>().is_err());
    }
}
