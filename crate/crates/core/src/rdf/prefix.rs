use thiserror::Error;

use super::Iri;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrefixError {
    #[error("prefix {0:?} is already declared")]
    Duplicate(String),
    #[error("prefix {0:?} is not declared")]
    Undeclared(String),
    #[error("expansion of {0:?} is not a valid IRI")]
    InvalidExpansion(String),
}

/// Ordered prefix label → namespace mapping. The empty label is allowed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrefixMap {
    entries: Vec<(String, Iri)>,
}

impl PrefixMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a new prefix; fails if the label is taken.
    pub fn insert(&mut self, label: &str, namespace: Iri) -> Result<(), PrefixError> {
        if self.get(label).is_some() {
            return Err(PrefixError::Duplicate(label.to_string()));
        }
        self.entries.push((label.to_string(), namespace));
        Ok(())
    }

    /// Declares or rebinds a prefix, keeping its original position on rebind.
    pub fn set(&mut self, label: &str, namespace: Iri) {
        match self.entries.iter_mut().find(|(l, _)| l == label) {
            Some(entry) => entry.1 = namespace,
            None => self.entries.push((label.to_string(), namespace)),
        }
    }

    pub fn get(&self, label: &str) -> Option<&Iri> {
        self.entries.iter().find(|(l, _)| l == label).map(|(_, ns)| ns)
    }

    pub fn expand(&self, label: &str, local: &str) -> Result<Iri, PrefixError> {
        let ns = self
            .get(label)
            .ok_or_else(|| PrefixError::Undeclared(label.to_string()))?;
        let full = format!("{}{}", ns.as_str(), local);
        Iri::new(&full).map_err(|_| PrefixError::InvalidExpansion(full))
    }

    /// Splits `iri` against the longest matching namespace.
    pub fn shorten<'a>(&'a self, iri: &'a Iri) -> Option<(&'a str, &'a str)> {
        self.entries
            .iter()
            .filter(|(_, ns)| iri.as_str().starts_with(ns.as_str()))
            .max_by_key(|(_, ns)| ns.as_str().len())
            .map(|(label, ns)| (label.as_str(), &iri.as_str()[ns.as_str().len()..]))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Iri)> {
        self.entries.iter().map(|(l, ns)| (l.as_str(), ns))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
