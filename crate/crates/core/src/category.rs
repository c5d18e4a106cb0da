//! Finite categories of structures and all embeddings between them.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fraisse::FraisseClass;
use crate::structures::{embedding_maps, FiniteStructure};

#[derive(Debug, Clone)]
pub struct FiniteCategory {
    objects: Vec<Arc<FiniteStructure>>,
    /// `hom[i][j]`: embedding maps from object `i` to object `j`, sorted.
    hom: Vec<Vec<Vec<Vec<usize>>>>,
}

impl FiniteCategory {
    pub fn new(objects: Vec<Arc<FiniteStructure>>) -> Result<Self> {
        if let Some(first) = objects.first() {
            if objects.iter().any(|o| o.signature() != first.signature()) {
                return Err(Error::SignatureMismatch);
            }
        }
        let hom = objects
            .iter()
            .map(|a| objects.iter().map(|b| embedding_maps(a, b, &[])).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(FiniteCategory { objects, hom })
    }

    /// Members of measure at most `n`, with any member isomorphic to one of
    /// `preferred` replaced by it.
    pub fn from_class(class: &FraisseClass, n: usize, preferred: &[Arc<FiniteStructure>]) -> Result<Self> {
        let objects = class
            .members(n)
            .iter()
            .map(|m| preferred.iter().find(|p| p.is_isomorphic(m)).cloned().unwrap_or_else(|| m.clone()))
            .collect();
        Self::new(objects)
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn objects(&self) -> &[Arc<FiniteStructure>] {
        &self.objects
    }

    pub fn object(&self, i: usize) -> &Arc<FiniteStructure> {
        &self.objects[i]
    }

    /// Index of the object isomorphic to `s`.
    pub fn find(&self, s: &FiniteStructure) -> Option<usize> {
        self.objects.iter().position(|o| o.is_isomorphic(s))
    }

    /// Index of the object equal to `s`.
    pub fn position(&self, s: &FiniteStructure) -> Option<usize> {
        self.objects.iter().position(|o| o.as_ref() == s)
    }

    pub fn hom(&self, i: usize, j: usize) -> &[Vec<usize>] {
        &self.hom[i][j]
    }

    pub fn arrow_index(&self, i: usize, j: usize, map: &[usize]) -> Option<usize> {
        self.hom[i][j].binary_search_by(|m| m.as_slice().cmp(map)).ok()
    }

    /// Index in `hom(i, k)` of `g ∘ f` for `f ∈ hom(i, j)`, `g ∈ hom(j, k)`.
    pub fn compose(&self, i: usize, j: usize, k: usize, f: usize, g: usize) -> usize {
        let (f, g) = (&self.hom[i][j][f], &self.hom[j][k][g]);
        let gf: Vec<usize> = f.iter().map(|&x| g[x]).collect();
        self.arrow_index(i, k, &gf).expect("composites of embeddings are embeddings")
    }

    pub fn identity(&self, i: usize) -> usize {
        let id: Vec<usize> = (0..self.objects[i].len()).collect();
        self.arrow_index(i, i, &id).expect("identity is an embedding")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::builders::{cyclic_group, direct_product};

    #[test]
    fn subgroup_category_of_v4() {
        let v4 = direct_product(&cyclic_group(2), &cyclic_group(2));
        let cat =
            FiniteCategory::new(vec![Arc::new(cyclic_group(1)), Arc::new(cyclic_group(2)), Arc::new(v4)]).unwrap();
        assert_eq!(cat.hom(0, 2).len(), 1);
        assert_eq!(cat.hom(1, 2).len(), 3);
        assert_eq!(cat.hom(2, 2).len(), 6);
        assert!(cat.hom(2, 1).is_empty());
        let id = cat.identity(2);
        for f in 0..3 {
            assert_eq!(cat.compose(1, 2, 2, f, id), f);
        }
    }

    #[test]
    fn sets_up_to_three() {
        let cat = FiniteCategory::from_class(&FraisseClass::sets(), 3, &[]).unwrap();
        assert_eq!(cat.len(), 4);
        assert_eq!(cat.hom(2, 3).len(), 6);
    }
}
