use crate::bits::BitSet;
use crate::error::{Error, Result};

use super::{GroupElement, GroupSpec, DEFAULT_MATERIALIZE_CAP};

/// Membership bitmap over the canonical indices of a group.
#[derive(Clone, PartialEq, Eq)]
pub struct ElementSet {
    group: GroupSpec,
    bits: BitSet,
}

impl std::fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ElementSet[{}]{:?}", self.group, self.bits)
    }
}

impl ElementSet {
    pub fn empty(group: &GroupSpec) -> Result<Self> {
        Self::empty_with_cap(group, DEFAULT_MATERIALIZE_CAP)
    }

    pub fn empty_with_cap(group: &GroupSpec, cap: usize) -> Result<Self> {
        if group.order() > cap {
            return Err(Error::CapExceeded {
                what: "materialized element set",
                size: group.order() as u128,
                cap: cap as u128,
            });
        }
        Ok(ElementSet {
            group: group.clone(),
            bits: BitSet::new(group.order()),
        })
    }

    pub fn full(group: &GroupSpec) -> Result<Self> {
        let mut s = Self::empty(group)?;
        s.bits = BitSet::full(group.order());
        Ok(s)
    }

    pub fn from_indices(
        group: &GroupSpec,
        indices: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let mut s = Self::empty(group)?;
        for i in indices {
            if i >= group.order() {
                return Err(Error::IndexOutOfRange(i));
            }
            s.bits.insert(i);
        }
        Ok(s)
    }

    /// Convenience for cyclic groups: members given as residues.
    pub fn from_residues(group: &GroupSpec, residues: &[u64]) -> Result<Self> {
        Self::from_indices(group, residues.iter().map(|&r| r as usize))
    }

    pub fn from_elements<'a>(
        group: &GroupSpec,
        elems: impl IntoIterator<Item = &'a GroupElement>,
    ) -> Result<Self> {
        let mut s = Self::empty(group)?;
        for e in elems {
            let i = group.index_of(e)?;
            s.bits.insert(i);
        }
        Ok(s)
    }

    pub fn from_predicate(group: &GroupSpec, mut pred: impl FnMut(usize) -> bool) -> Result<Self> {
        let mut s = Self::empty(group)?;
        for i in 0..group.order() {
            if pred(i) {
                s.bits.insert(i);
            }
        }
        Ok(s)
    }

    pub(crate) fn from_bits(group: &GroupSpec, bits: BitSet) -> Self {
        debug_assert_eq!(bits.len(), group.order());
        ElementSet {
            group: group.clone(),
            bits,
        }
    }

    #[inline]
    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    #[inline]
    pub fn contains(&self, index: usize) -> bool {
        self.bits.contains(index)
    }

    pub fn contains_element(&self, e: &GroupElement) -> Result<bool> {
        Ok(self.bits.contains(self.group.index_of(e)?))
    }

    pub fn insert(&mut self, index: usize) -> Result<bool> {
        if index >= self.group.order() {
            return Err(Error::IndexOutOfRange(index));
        }
        Ok(self.bits.insert(index))
    }

    pub fn remove(&mut self, index: usize) {
        self.bits.remove(index);
    }

    pub fn len(&self) -> usize {
        self.bits.count()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn density(&self) -> f64 {
        self.len() as f64 / self.group.order() as f64
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.bits.iter().collect()
    }

    pub fn bits(&self) -> &BitSet {
        &self.bits
    }

    fn same_group(&self, other: &ElementSet) -> Result<()> {
        if self.group != other.group {
            return Err(Error::GroupMismatch);
        }
        Ok(())
    }

    pub fn union(&self, other: &ElementSet) -> Result<ElementSet> {
        self.same_group(other)?;
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        Ok(ElementSet::from_bits(&self.group, bits))
    }

    pub fn intersection(&self, other: &ElementSet) -> Result<ElementSet> {
        self.same_group(other)?;
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        Ok(ElementSet::from_bits(&self.group, bits))
    }

    pub fn is_disjoint(&self, other: &ElementSet) -> Result<bool> {
        self.same_group(other)?;
        Ok(self.bits.is_disjoint(&other.bits))
    }

    /// `-A`
    pub fn negated(&self) -> ElementSet {
        let mut bits = BitSet::new(self.group.order());
        for i in self.bits.iter() {
            bits.insert(self.group.neg_index(i));
        }
        ElementSet::from_bits(&self.group, bits)
    }

    /// `c·A` (as a set; may shrink when `c` is not invertible).
    pub fn dilate(&self, c: i64) -> ElementSet {
        let mut bits = BitSet::new(self.group.order());
        for i in self.bits.iter() {
            bits.insert(self.group.scalar_mul_index(c, i));
        }
        ElementSet::from_bits(&self.group, bits)
    }

    /// `A + B` (all sums, repetitions allowed).
    pub fn sumset(&self, other: &ElementSet) -> Result<ElementSet> {
        self.same_group(other)?;
        let mut bits = BitSet::new(self.group.order());
        let rhs: Vec<usize> = other.iter().collect();
        for a in self.bits.iter() {
            for &b in &rhs {
                bits.insert(self.group.add_index(a, b));
            }
        }
        Ok(ElementSet::from_bits(&self.group, bits))
    }

    /// `A - B`
    pub fn difference_set(&self, other: &ElementSet) -> Result<ElementSet> {
        self.sumset(&other.negated())
    }

    /// `{0}` in the same group.
    pub fn singleton_zero(group: &GroupSpec) -> Result<ElementSet> {
        Self::from_indices(group, [0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra_in_z7() {
        let g = GroupSpec::cyclic(7).unwrap();
        let a = ElementSet::from_residues(&g, &[1, 2]).unwrap();
        assert_eq!(a.negated().to_vec(), vec![5, 6]);
        assert_eq!(a.dilate(3).to_vec(), vec![3, 6]);
        assert_eq!(a.sumset(&a).unwrap().to_vec(), vec![2, 3, 4]);
        assert_eq!(a.difference_set(&a).unwrap().to_vec(), vec![0, 1, 6]);
        assert!((a.density() - 2.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn cap_is_enforced() {
        let g = GroupSpec::cyclic(1000).unwrap();
        assert!(matches!(
            ElementSet::empty_with_cap(&g, 999),
            Err(Error::CapExceeded { .. })
        ));
        assert!(ElementSet::from_indices(&g, [1000]).is_err());
    }
}
