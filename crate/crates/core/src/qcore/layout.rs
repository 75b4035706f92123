use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// One labelled tensor factor of a composite Hilbert space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subsystem {
    label: String,
    dim: usize,
}

impl Subsystem {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Ordered factorization of a composite space, e.g. `S (x) O (x) E1 (x) E2`.
///
/// The first factor is the most significant in the flat basis index, so
/// `|i, j>` maps to `i * dim_rest + ...` exactly like a Kronecker product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeLayout {
    parts: Vec<Subsystem>,
}

impl CompositeLayout {
    pub fn new<L: Into<String>>(parts: impl IntoIterator<Item = (L, usize)>) -> Result<Self> {
        let parts: Vec<Subsystem> = parts
            .into_iter()
            .map(|(label, dim)| Subsystem {
                label: label.into(),
                dim,
            })
            .collect();
        for (i, p) in parts.iter().enumerate() {
            if p.dim == 0 {
                return Err(Error::InvalidLayout("zero-dimensional subsystem".to_string()));
            }
            if parts[..i].iter().any(|q| q.label == p.label) {
                return Err(Error::InvalidLayout(p.label.clone()));
            }
        }
        Ok(Self { parts })
    }

    pub fn single(label: impl Into<String>, dim: usize) -> Result<Self> {
        Self::new([(label.into(), dim)])
    }

    /// Total dimension (product of factor dimensions).
    pub fn dim(&self) -> usize {
        self.parts.iter().map(|p| p.dim).product()
    }

    pub fn parts(&self) -> &[Subsystem] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.parts.iter().position(|p| p.label == label)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.position(label).is_some()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.parts.iter().map(|p| p.dim).collect()
    }

    /// Concatenated layout; errors on duplicate labels.
    pub fn concat(&self, other: &CompositeLayout) -> Result<CompositeLayout> {
        for p in &other.parts {
            if self.contains(&p.label) {
                return Err(Error::LabelCollision(p.label.clone()));
            }
        }
        let mut parts = self.parts.clone();
        parts.extend(other.parts.iter().cloned());
        Ok(CompositeLayout { parts })
    }

    /// Sub-layout of the named labels, in this layout's order.
    pub fn sub_layout(&self, labels: &[&str]) -> Result<CompositeLayout> {
        for l in labels {
            if !self.contains(l) {
                return Err(Error::UnknownLabel(l.to_string()));
            }
        }
        let parts = self
            .parts
            .iter()
            .filter(|p| labels.contains(&p.label.as_str()))
            .cloned()
            .collect();
        Ok(CompositeLayout { parts })
    }

    /// Decomposes a flat basis index into per-subsystem indices.
    pub fn decode(&self, mut flat: usize, out: &mut [usize]) {
        debug_assert_eq!(out.len(), self.parts.len());
        for (slot, p) in out.iter_mut().zip(self.parts.iter()).rev() {
            *slot = flat % p.dim;
            flat /= p.dim;
        }
    }

    /// Recombines per-subsystem indices into a flat basis index.
    pub fn encode(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.parts.len());
        let mut flat = 0;
        for (i, p) in multi.iter().zip(self.parts.iter()) {
            debug_assert!(*i < p.dim);
            flat = flat * p.dim + i;
        }
        flat
    }
}
