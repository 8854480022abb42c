//! Bundled substitutions and the input file format.

use crate::error::{Error, Result};
use crate::spectral::ExpansionSpec;
use crate::substitution::Substitution;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Example {
    pub name: &'static str,
    pub text: &'static str,
    pub summary: &'static str,
}

pub const CORPUS: &[Example] = &[
    Example {
        name: "fibonacci",
        text: "a -> a b\nb -> a\n",
        summary: "golden mean inflation",
    },
    Example {
        name: "example-2-8",
        text: "a -> a b'\nb -> a\na' -> a' b\nb' -> a'\n",
        summary: "four letters, golden mean inflation, H1 of rank 7",
    },
    Example {
        name: "example-2-9",
        text: "a -> a b a'\nb -> a b\na' -> a' b' a\nb' -> a' b'\n",
        summary: "four letters, hyperbolic refinement of rank 4",
    },
    Example {
        name: "final-example",
        text: "a -> a b b b a a a a\nb -> b a a a b\n",
        summary: "inflation by the fourth power of the golden mean",
    },
    Example {
        name: "thue-morse",
        text: "a -> a b\nb -> b a\n",
        summary: "non-unimodular, inflation 2",
    },
];

pub fn example(name: &str) -> Result<&'static Example> {
    CORPUS.iter().find(|e| e.name == name).ok_or_else(|| Error::UnknownExample(name.to_string()))
}

impl Example {
    pub fn substitution(&self) -> Substitution {
        Substitution::parse(self.text).expect("bundled examples parse")
    }
}

/// Contents of an input file: substitution rules, then an optional
/// `[expansion]` section.
#[derive(Clone, Debug)]
pub struct Input {
    pub substitution: Option<Substitution>,
    pub expansion: Option<ExpansionSpec>,
}

const EXPANSION_HEADER: &str = "[expansion]";

pub fn parse_input(text: &str) -> Result<Input> {
    let lines: Vec<&str> = text.lines().collect();
    let split = lines.iter().position(|l| l.trim() == EXPANSION_HEADER);
    let (rules, expansion) = match split {
        Some(i) => (&lines[..i], Some((i + 1, &lines[i + 1..]))),
        None => (&lines[..], None),
    };
    let has_rules = rules.iter().any(|l| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('#')
    });
    let substitution = if has_rules || expansion.is_none() { Some(Substitution::parse(&rules.join("\n"))?) } else { None };
    let expansion = match expansion {
        Some((offset, body)) => Some(ExpansionSpec::parse(&body.join("\n")).map_err(|e| match e {
            Error::Parse { line, message } if line > 0 => Error::Parse { line: line + offset, message },
            other => other,
        })?),
        None => None,
    };
    Ok(Input { substitution, expansion })
}
