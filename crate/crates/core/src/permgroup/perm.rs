//! Permutations of {0, .., n-1} as image vectors.

use crate::numtheory::Natural;
use num_integer::Integer;
use num_traits::One;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PermError {
    #[error("image vector is not a bijection")]
    NotAPermutation,
    #[error("degrees differ: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("cannot parse permutation: {0}")]
    Parse(String),
}

/// A permutation acting on the right: `pt^g = g.apply(pt)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u32>,
}

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm {
            images: (0..degree as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Perm, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &img in &images {
            if img as usize >= n || seen[img as usize] {
                return Err(PermError::NotAPermutation);
            }
            seen[img as usize] = true;
        }
        Ok(Perm { images })
    }

    /// Builds a permutation of `degree` points from disjoint cycles.
    pub fn from_cycles(degree: usize, cycles: &[&[u32]]) -> Result<Perm, PermError> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        for cycle in cycles {
            for w in 0..cycle.len() {
                let from = cycle[w] as usize;
                let to = cycle[(w + 1) % cycle.len()];
                if from >= degree || to as usize >= degree {
                    return Err(PermError::NotAPermutation);
                }
                images[from] = to;
            }
        }
        Perm::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, pt: u32) -> u32 {
        self.images[pt as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, &img)| i as u32 == img)
    }

    /// self followed by other: `pt^(self * other) = (pt^self)^other`.
    pub fn then(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            images: self
                .images
                .iter()
                .map(|&m| other.images[m as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &img) in self.images.iter().enumerate() {
            inv[img as usize] = i as u32;
        }
        Perm { images: inv }
    }

    /// Conjugate self^g = g^{-1} self g.
    pub fn conjugate_by(&self, g: &Perm) -> Perm {
        g.inverse().then(self).then(g)
    }

    pub fn commutator(&self, other: &Perm) -> Perm {
        self.inverse().then(&other.inverse()).then(self).then(other)
    }

    pub fn smallest_moved_point(&self) -> Option<u32> {
        self.images
            .iter()
            .enumerate()
            .find(|(i, &img)| *i as u32 != img)
            .map(|(i, _)| i as u32)
    }

    /// Element order: lcm of cycle lengths.
    pub fn order(&self) -> Natural {
        let mut seen = vec![false; self.images.len()];
        let mut order = Natural::one();
        for start in 0..self.images.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut pt = start;
            while !seen[pt] {
                seen[pt] = true;
                pt = self.images[pt] as usize;
                len += 1;
            }
            order = order.lcm(&Natural::from(len));
        }
        order
    }

    /// g^e by repeated squaring on small exponents.
    pub fn power(&self, e: u64) -> Perm {
        let mut acc = Perm::identity(self.degree());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.then(&base);
            }
            base = base.then(&base);
            e >>= 1;
        }
        acc
    }

    /// Cycle notation for small-degree display.
    pub fn cycle_string(&self) -> String {
        let mut seen = vec![false; self.images.len()];
        let mut out = String::new();
        for start in 0..self.images.len() {
            if seen[start] || self.images[start] as usize == start {
                seen[start] = true;
                continue;
            }
            out.push('(');
            let mut pt = start;
            let mut first = true;
            while !seen[pt] {
                seen[pt] = true;
                if !first {
                    out.push(' ');
                }
                out.push_str(&pt.to_string());
                first = false;
                pt = self.images[pt] as usize;
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

/// One-line image sequence, 0-based, comma-separated.
impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strs: Vec<String> = self.images.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", strs.join(","))
    }
}

impl FromStr for Perm {
    type Err = PermError;

    fn from_str(s: &str) -> Result<Perm, PermError> {
        let images: Result<Vec<u32>, _> = s.split(',').map(|t| t.trim().parse::<u32>()).collect();
        let images = images.map_err(|e| PermError::Parse(e.to_string()))?;
        Perm::from_images(images)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::nat;

    #[test]
    fn compose_and_inverse() {
        let a = Perm::from_cycles(4, &[&[0, 1]]).unwrap();
        let b = Perm::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap();
        let ab = a.then(&b);
        // 0 -(a)-> 1 -(b)-> 2
        assert_eq!(ab.apply(0), 2);
        assert!(a.then(&a).is_identity());
        assert!(b.then(&b.inverse()).is_identity());
        assert_eq!(b.order(), nat(4));
        assert_eq!(ab.order(), nat(3));
    }

    #[test]
    fn roundtrip_text() {
        let p = Perm::from_cycles(5, &[&[0, 2, 4]]).unwrap();
        let s = p.to_string();
        assert_eq!(s, "2,1,4,3,0");
        assert_eq!(s.parse::<Perm>().unwrap(), p);
        assert!("1,1,0".parse::<Perm>().is_err());
    }

    #[test]
    fn conjugation_relabels() {
        let x = Perm::from_cycles(5, &[&[0, 1]]).unwrap();
        let g = Perm::from_cycles(5, &[&[0, 2], &[1, 3]]).unwrap();
        assert_eq!(
            x.conjugate_by(&g),
            Perm::from_cycles(5, &[&[2, 3]]).unwrap()
        );
    }
}
