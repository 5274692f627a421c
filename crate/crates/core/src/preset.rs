//! Automaton presets: the generating data of a self-similar group.
//!
//! A preset lists generators by their root permutation and their sections.
//! Sections name another generator, its inverse (`"x^-1"`), or the identity
//! (`"1"`). Presets are read from JSON files tagged with schema `asg-1`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const SCHEMA: &str = "asg-1";

const GUPTA_SIDKI_3: &str = include_str!("../presets/gupta-sidki-3.json");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub label: String,
    pub involution: bool,
    pub perm: Vec<u32>,
    pub sections: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresetFile {
    pub schema: String,
    pub name: String,
    pub arity: usize,
    pub generators: Vec<GeneratorSpec>,
}

/// Where a section points after validation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectionRef {
    Identity,
    Generator(usize),
    Inverse(usize),
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub label: char,
    pub involution: bool,
    pub perm: Vec<u8>,
    pub sections: Vec<SectionRef>,
}

/// A validated preset.
#[derive(Clone, Debug)]
pub struct GroupPreset {
    pub name: String,
    pub arity: usize,
    pub generators: Vec<Generator>,
    source: PresetFile,
}

impl GroupPreset {
    pub fn source(&self) -> &PresetFile {
        &self.source
    }

    /// Stable digest of the preset definition, used to tag cache files.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(&self.source).expect("preset serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn generator_index(&self, label: char) -> Option<usize> {
        self.generators.iter().position(|g| g.label == label)
    }

    pub fn labels(&self) -> String {
        self.generators.iter().map(|g| g.label).collect()
    }

    /// True for the four-generator Grigorchuk table (labels a, b, c, d).
    pub fn is_grigorchuk(&self) -> bool {
        self.source == grigorchuk_file()
    }
}

pub fn grigorchuk_file() -> PresetFile {
    let gen = |label: &str, perm: [u32; 2], s: [&str; 2]| GeneratorSpec {
        label: label.into(),
        involution: true,
        perm: perm.to_vec(),
        sections: s.iter().map(|x| x.to_string()).collect(),
    };
    PresetFile {
        schema: SCHEMA.into(),
        name: "grigorchuk".into(),
        arity: 2,
        generators: vec![
            gen("a", [1, 0], ["1", "1"]),
            gen("b", [0, 1], ["a", "c"]),
            gen("c", [0, 1], ["a", "d"]),
            gen("d", [0, 1], ["1", "b"]),
        ],
    }
}

pub fn grigorchuk() -> GroupPreset {
    validate(grigorchuk_file()).expect("built-in preset is valid")
}

/// Resolves a built-in preset name or a path to an `asg-1` JSON file.
pub fn load_preset(spec: &str) -> Result<GroupPreset> {
    match spec {
        "grigorchuk" => Ok(grigorchuk()),
        "gupta-sidki-3" => parse_preset(GUPTA_SIDKI_3),
        other => {
            let path = Path::new(other);
            if path.exists() {
                parse_preset(&std::fs::read_to_string(path)?)
            } else {
                Err(Error::UnknownPreset(other.to_string()))
            }
        }
    }
}

pub fn parse_preset(json: &str) -> Result<GroupPreset> {
    let file: PresetFile = serde_json::from_str(json).map_err(|e| Error::Validation {
        generator: None,
        message: format!("malformed preset JSON: {e}"),
    })?;
    validate(file)
}

fn invalid(generator: Option<&str>, message: impl Into<String>) -> Error {
    Error::Validation {
        generator: generator.map(str::to_string),
        message: message.into(),
    }
}

pub fn validate(file: PresetFile) -> Result<GroupPreset> {
    if file.schema != SCHEMA {
        return Err(invalid(
            None,
            format!("unsupported schema '{}', expected '{SCHEMA}'", file.schema),
        ));
    }
    if file.arity < 2 || file.arity > 16 {
        return Err(invalid(
            None,
            format!("arity {} outside 2..=16", file.arity),
        ));
    }
    if file.generators.is_empty() {
        return Err(invalid(None, "no generators"));
    }
    // Leaf codes of the nucleus must fit in a byte alongside inverses.
    if file.generators.len() > 60 {
        return Err(invalid(None, "at most 60 generators are supported"));
    }
    let mut labels = Vec::new();
    for g in &file.generators {
        let mut chars = g.label.chars();
        let c = match (chars.next(), chars.next()) {
            (Some(c), None) if c.is_ascii_alphabetic() => c,
            _ => {
                return Err(invalid(
                    Some(&g.label),
                    "labels must be a single ASCII letter",
                ))
            }
        };
        if labels.contains(&c) {
            return Err(invalid(Some(&g.label), "duplicate label"));
        }
        labels.push(c);
    }
    let mut generators = Vec::new();
    for g in &file.generators {
        let label = g.label.chars().next().unwrap();
        if g.perm.len() != file.arity || crate::perm::Perm::from_images(g.perm.clone()).is_none() {
            return Err(invalid(
                Some(&g.label),
                format!(
                    "perm {:?} is not a permutation of 0..{}",
                    g.perm, file.arity
                ),
            ));
        }
        if g.sections.len() != file.arity {
            return Err(invalid(
                Some(&g.label),
                format!(
                    "expected {} sections, found {}",
                    file.arity,
                    g.sections.len()
                ),
            ));
        }
        let mut sections = Vec::new();
        for s in &g.sections {
            let r = if s == "1" {
                SectionRef::Identity
            } else {
                let (name, inverse) = match s.strip_suffix("^-1") {
                    Some(base) => (base, true),
                    None => (s.as_str(), false),
                };
                let idx = file
                    .generators
                    .iter()
                    .position(|h| h.label == name)
                    .ok_or_else(|| {
                        invalid(
                            Some(&g.label),
                            format!("section '{s}' is not a declared generator"),
                        )
                    })?;
                if inverse {
                    SectionRef::Inverse(idx)
                } else {
                    SectionRef::Generator(idx)
                }
            };
            sections.push(r);
        }
        generators.push(Generator {
            label,
            involution: g.involution,
            perm: g.perm.iter().map(|&p| p as u8).collect(),
            sections,
        });
    }
    Ok(GroupPreset {
        name: file.name.clone(),
        arity: file.arity,
        generators,
        source: file,
    })
}
