use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::DecodeError;

pub const UNK: u32 = 0;
pub const BOS: u32 = 1;
pub const EOS: u32 = 2;
pub const SEP: u32 = 3;

/// Surfaces of the reserved ids, in id order.
pub const RESERVED: [&str; 4] = ["<unk>", "<s>", "</s>", "<sep>"];

/// Dense bidirectional token map. Ids 0..4 are reserved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Vocabulary {
    surfaces: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Default for Vocabulary {
    fn default() -> Self {
        Self::new()
    }
}

impl Vocabulary {
    pub fn new() -> Self {
        let surfaces: Vec<String> = RESERVED.iter().map(|s| s.to_string()).collect();
        let ids = surfaces
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect();
        Self { surfaces, ids }
    }

    /// Id of `surface`, adding it if absent.
    pub fn insert(&mut self, surface: &str) -> u32 {
        if let Some(&id) = self.ids.get(surface) {
            return id;
        }
        let id = self.surfaces.len() as u32;
        self.surfaces.push(surface.to_string());
        self.ids.insert(surface.to_string(), id);
        id
    }

    pub fn id(&self, surface: &str) -> Option<u32> {
        self.ids.get(surface).copied()
    }

    pub fn surface(&self, id: u32) -> Option<&str> {
        self.surfaces.get(id as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.surfaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.surfaces.is_empty()
    }

    /// Unknown surfaces map to [`UNK`].
    pub fn encode<S: AsRef<str>>(&self, surfaces: &[S]) -> Vec<u32> {
        surfaces
            .iter()
            .map(|s| self.id(s.as_ref()).unwrap_or(UNK))
            .collect()
    }

    pub fn decode(&self, ids: &[u32]) -> Vec<&str> {
        ids.iter()
            .map(|&id| self.surface(id).unwrap_or(RESERVED[UNK as usize]))
            .collect()
    }

    pub fn is_reserved(id: u32) -> bool {
        (id as usize) < RESERVED.len()
    }
}

impl TryFrom<Vec<String>> for Vocabulary {
    type Error = DecodeError;

    fn try_from(surfaces: Vec<String>) -> Result<Self, Self::Error> {
        if surfaces.len() < RESERVED.len()
            || surfaces.iter().zip(RESERVED).any(|(s, r)| s != r)
        {
            return Err(DecodeError::Model("vocabulary must start with the reserved tokens".into()));
        }
        let mut ids = HashMap::with_capacity(surfaces.len());
        for (i, s) in surfaces.iter().enumerate() {
            if ids.insert(s.clone(), i as u32).is_some() {
                return Err(DecodeError::Model(format!("duplicate vocabulary entry {s:?}")));
            }
        }
        Ok(Self { surfaces, ids })
    }
}

impl From<Vocabulary> for Vec<String> {
    fn from(vocab: Vocabulary) -> Self {
        vocab.surfaces
    }
}
