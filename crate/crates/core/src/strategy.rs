//! Named algorithm variants selectable at runtime.

use crate::error::{Error, Result};

/// Trait objects registered by name; the first registered is the default.
pub struct Registry<T: ?Sized> {
    entries: Vec<(String, Box<T>)>,
}

impl<T: ?Sized> Default for Registry<T> {
    fn default() -> Self {
        Registry { entries: Vec::new() }
    }
}

impl<T: ?Sized> Registry<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Replaces any entry with the same name.
    pub fn register(&mut self, name: &str, item: Box<T>) -> &mut Self {
        match self.entries.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = item,
            None => self.entries.push((name.to_string(), item)),
        }
        self
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t.as_ref())
            .ok_or_else(|| {
                Error::UnknownElement(format!("unknown strategy {name}; available: {}", self.names().join(", ")))
            })
    }

    pub fn default_entry(&self) -> Option<&T> {
        self.entries.first().map(|(_, t)| t.as_ref())
    }

    /// `name`, or the default when `None`.
    pub fn select(&self, name: Option<&str>) -> Result<&T> {
        match name {
            Some(n) => self.get(n),
            None => self
                .default_entry()
                .ok_or_else(|| Error::Invalid("no strategy registered".into())),
        }
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|(n, _)| n.as_str()).collect()
    }
}
