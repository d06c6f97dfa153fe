//! Finite abelian groups given as explicit products of cyclic factors.
//!
//! Elements have two interchangeable representations: a residue vector
//! ([`GroupElement`]) and a canonical integer index in `[0, order)`. The index
//! is the mixed-radix encoding of the residue vector with the *first* factor
//! as the most significant digit, so index order coincides with lexicographic
//! order of coordinate vectors and bitmaps stay portable across runs.

mod crt;
mod literal;
mod serial;
mod set;

pub use crt::{crt_split, CrtSplit};
pub use literal::GroupLiteral;
pub use serial::{read_element_set, write_element_set};
pub use set::ElementSet;

use std::fmt;
use std::sync::Arc;

use crate::arith::reduce;
use crate::error::{Error, Result};

/// Default ceiling on the number of elements of a materialized [`ElementSet`].
pub const DEFAULT_MATERIALIZE_CAP: usize = 1 << 26;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct GroupInner {
    moduli: Vec<u64>,
    strides: Vec<usize>,
    order: usize,
}

/// `Z_{n1} x ... x Z_{nr}`. Cheap to clone; immutable after construction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec(Arc<GroupInner>);

impl fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupSpec({})", self)
    }
}

impl fmt::Display for GroupSpec {
    /// Renders as a group literal, e.g. `Z(3)^2` or `Z(2)xZ(15)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0.moduli;
        if m.iter().all(|&x| x == m[0]) && m.len() > 1 {
            return write!(f, "Z({})^{}", m[0], m.len());
        }
        let parts: Vec<String> = m.iter().map(|x| format!("Z({x})")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// Residue vector; `coords[i]` lies in `[0, n_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub coords: Vec<u64>,
}

impl GroupElement {
    pub fn new(coords: Vec<u64>) -> Self {
        GroupElement { coords }
    }
}

impl From<Vec<u64>> for GroupElement {
    fn from(coords: Vec<u64>) -> Self {
        GroupElement { coords }
    }
}

pub fn make_group(moduli: &[u64]) -> Result<GroupSpec> {
    GroupSpec::new(moduli)
}

impl GroupSpec {
    pub fn new(moduli: &[u64]) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::InvalidModulus(0));
        }
        let mut order: usize = 1;
        for &m in moduli {
            if m < 2 {
                return Err(Error::InvalidModulus(m));
            }
            let m = usize::try_from(m).map_err(|_| Error::OrderOverflow)?;
            order = order.checked_mul(m).ok_or(Error::OrderOverflow)?;
        }
        let r = moduli.len();
        let mut strides = vec![1usize; r];
        for i in (0..r.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * moduli[i + 1] as usize;
        }
        Ok(GroupSpec(Arc::new(GroupInner {
            moduli: moduli.to_vec(),
            strides,
            order,
        })))
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        Self::new(&[n])
    }

    /// `Z_p^n`.
    pub fn power(p: u64, n: usize) -> Result<Self> {
        Self::new(&vec![p; n])
    }

    #[inline]
    pub fn moduli(&self) -> &[u64] {
        &self.0.moduli
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.0.moduli.len()
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.0.order
    }

    /// The modulus when the group is a single cyclic factor.
    pub fn cyclic_modulus(&self) -> Option<u64> {
        (self.rank() == 1).then(|| self.0.moduli[0])
    }

    pub fn is_prime_field(&self) -> bool {
        self.cyclic_modulus().is_some_and(crate::arith::is_prime)
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement::new(vec![0; self.rank()])
    }

    pub fn check(&self, x: &GroupElement) -> Result<()> {
        if x.coords.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                got: x.coords.len(),
            });
        }
        for (&c, &m) in x.coords.iter().zip(self.moduli()) {
            if c >= m {
                return Err(Error::CoordinateOutOfRange {
                    value: c,
                    modulus: m,
                });
            }
        }
        Ok(())
    }

    /// Builds an element, reducing each (possibly negative) coordinate.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                got: coords.len(),
            });
        }
        Ok(GroupElement::new(
            coords
                .iter()
                .zip(self.moduli())
                .map(|(&c, &m)| reduce(c, m))
                .collect(),
        ))
    }

    pub fn index_of(&self, x: &GroupElement) -> Result<usize> {
        self.check(x)?;
        Ok(self.encode(&x.coords))
    }

    #[inline]
    fn encode(&self, coords: &[u64]) -> usize {
        coords
            .iter()
            .zip(&self.0.strides)
            .map(|(&c, &s)| c as usize * s)
            .sum()
    }

    pub fn element_at(&self, index: usize) -> Result<GroupElement> {
        if index >= self.order() {
            return Err(Error::IndexOutOfRange(index));
        }
        Ok(GroupElement::new(self.decode(index)))
    }

    #[inline]
    fn decode(&self, mut index: usize) -> Vec<u64> {
        let mut out = vec![0u64; self.rank()];
        for i in (0..self.rank()).rev() {
            let m = self.0.moduli[i] as usize;
            out[i] = (index % m) as u64;
            index /= m;
        }
        out
    }

    /// Coordinate `i` of the element with the given index.
    #[inline]
    pub fn coord_of_index(&self, index: usize, i: usize) -> u64 {
        ((index / self.0.strides[i]) % self.0.moduli[i] as usize) as u64
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(GroupElement::new(
            a.coords
                .iter()
                .zip(&b.coords)
                .zip(self.moduli())
                .map(|((&x, &y), &m)| ((x as u128 + y as u128) % m as u128) as u64)
                .collect(),
        ))
    }

    pub fn neg(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        Ok(GroupElement::new(
            a.coords
                .iter()
                .zip(self.moduli())
                .map(|(&x, &m)| (m - x) % m)
                .collect(),
        ))
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        let nb = self.neg(b)?;
        self.add(a, &nb)
    }

    /// `c·x`, with a negative `c` first reduced modulo each factor.
    pub fn scalar_mul(&self, c: i64, x: &GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        Ok(GroupElement::new(
            x.coords
                .iter()
                .zip(self.moduli())
                .map(|(&v, &m)| crate::arith::mul_mod(reduce(c, m), v, m))
                .collect(),
        ))
    }

    // Index-level arithmetic used by the hot loops.

    #[inline]
    pub fn add_index(&self, a: usize, b: usize) -> usize {
        if let Some(m) = self.cyclic_modulus() {
            let s = a + b;
            let m = m as usize;
            return if s >= m { s - m } else { s };
        }
        let mut out = 0usize;
        for i in 0..self.rank() {
            let m = self.0.moduli[i];
            let x = self.coord_of_index(a, i) + self.coord_of_index(b, i);
            out += ((x % m) as usize) * self.0.strides[i];
        }
        out
    }

    #[inline]
    pub fn neg_index(&self, a: usize) -> usize {
        if let Some(m) = self.cyclic_modulus() {
            let m = m as usize;
            return (m - a) % m;
        }
        let mut out = 0usize;
        for i in 0..self.rank() {
            let m = self.0.moduli[i];
            let x = self.coord_of_index(a, i);
            out += (((m - x) % m) as usize) * self.0.strides[i];
        }
        out
    }

    #[inline]
    pub fn sub_index(&self, a: usize, b: usize) -> usize {
        self.add_index(a, self.neg_index(b))
    }

    pub fn scalar_mul_index(&self, c: i64, a: usize) -> usize {
        if let Some(m) = self.cyclic_modulus() {
            return crate::arith::mul_mod(reduce(c, m), a as u64, m) as usize;
        }
        let mut out = 0usize;
        for i in 0..self.rank() {
            let m = self.0.moduli[i];
            let x = crate::arith::mul_mod(reduce(c, m), self.coord_of_index(a, i), m);
            out += (x as usize) * self.0.strides[i];
        }
        out
    }

    /// Table `t[x] = c·x` over all indices.
    pub fn scalar_table(&self, c: i64) -> Vec<usize> {
        (0..self.order())
            .map(|x| self.scalar_mul_index(c, x))
            .collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order()).map(|i| GroupElement::new(self.decode(i)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn make_group_examples() {
        assert_eq!(make_group(&[7]).unwrap().order(), 7);
        assert_eq!(make_group(&[3, 3, 3]).unwrap().order(), 27);
        assert_eq!(make_group(&[2, 3, 5]).unwrap().order(), 30);
        assert_eq!(make_group(&[1]).unwrap_err(), Error::InvalidModulus(1));
        assert_eq!(
            make_group(&[u64::MAX, u64::MAX]).unwrap_err(),
            Error::OrderOverflow
        );
    }

    #[test]
    fn arithmetic_examples() {
        let z7 = GroupSpec::cyclic(7).unwrap();
        let s = z7.add(&vec![3].into(), &vec![5].into()).unwrap();
        assert_eq!(s.coords, vec![1]);

        let z33 = GroupSpec::power(3, 2).unwrap();
        assert_eq!(z33.neg(&vec![1, 2].into()).unwrap().coords, vec![2, 1]);

        let z5 = GroupSpec::cyclic(5).unwrap();
        assert_eq!(z5.scalar_mul(-2, &vec![3].into()).unwrap().coords, vec![4]);

        assert!(matches!(
            z33.add(&vec![1].into(), &vec![1, 1].into()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn index_is_lexicographic() {
        let g = GroupSpec::new(&[2, 3]).unwrap();
        let listed: Vec<Vec<u64>> = g.elements().map(|e| e.coords).collect();
        assert_eq!(
            listed,
            vec![
                vec![0, 0],
                vec![0, 1],
                vec![0, 2],
                vec![1, 0],
                vec![1, 1],
                vec![1, 2]
            ]
        );
        for (i, e) in g.elements().enumerate() {
            assert_eq!(g.index_of(&e).unwrap(), i);
        }
    }

    fn group_and_elems() -> impl Strategy<Value = (Vec<u64>, Vec<u64>, Vec<u64>, Vec<u64>)> {
        prop::collection::vec(2u64..9, 1..4).prop_flat_map(|ms| {
            let elem = ms.iter().map(|&m| 0..m).collect::<Vec<_>>();
            (Just(ms), elem.clone(), elem.clone(), elem)
        })
    }

    proptest! {
        #[test]
        fn abelian_group_laws((ms, a, b, c) in group_and_elems()) {
            let g = GroupSpec::new(&ms).unwrap();
            let (a, b, c): (GroupElement, GroupElement, GroupElement) = (a.into(), b.into(), c.into());
            let ab = g.add(&a, &b).unwrap();
            prop_assert_eq!(&ab, &g.add(&b, &a).unwrap());
            let left = g.add(&ab, &c).unwrap();
            let right = g.add(&a, &g.add(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
            prop_assert_eq!(g.sub(&a, &a).unwrap(), g.zero());
            // index arithmetic agrees with vector arithmetic
            let (ia, ib) = (g.index_of(&a).unwrap(), g.index_of(&b).unwrap());
            prop_assert_eq!(g.add_index(ia, ib), g.index_of(&ab).unwrap());
            prop_assert_eq!(g.sub_index(ia, ib), g.index_of(&g.sub(&a, &b).unwrap()).unwrap());
        }

        #[test]
        fn scalar_mul_is_repeated_addition((ms, a, _b, _c) in group_and_elems(), c in 0i64..=20) {
            let g = GroupSpec::new(&ms).unwrap();
            let a: GroupElement = a.into();
            let mut acc = g.zero();
            for _ in 0..c {
                acc = g.add(&acc, &a).unwrap();
            }
            prop_assert_eq!(&g.scalar_mul(c, &a).unwrap(), &acc);
            let ia = g.index_of(&a).unwrap();
            prop_assert_eq!(g.scalar_mul_index(c, ia), g.index_of(&acc).unwrap());
            prop_assert_eq!(g.scalar_mul(-c, &a).unwrap(), g.neg(&acc).unwrap());
        }
    }
}
