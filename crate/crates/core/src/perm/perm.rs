use std::fmt;

use crate::error::{Error, Result};

/// A bijection of `{0, …, n-1}`.
///
/// Products compose left to right: `a.then(&b)` applies `a` first, so
/// `i^(ab) = (i^a)^b`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    img: Vec<u32>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm { img: (0..n as u32).collect() }
    }

    /// Builds a permutation from its image list, checking bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::NotBijection);
            }
            seen[i] = true;
        }
        Ok(Perm { img: images.into_iter().map(|i| i as u32).collect() })
    }

    /// Builds a permutation of degree `n` from disjoint cycles.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut img: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cyc in cycles {
            for (idx, &p) in cyc.iter().enumerate() {
                if p >= n {
                    return Err(Error::PointOutOfRange { point: p, degree: n });
                }
                if touched[p] {
                    return Err(Error::Parse(format!("point {p} repeated in cycles")));
                }
                touched[p] = true;
                img[p] = cyc[(idx + 1) % cyc.len()];
            }
        }
        Perm::from_images(img)
    }

    /// The transposition `(a b)` on `n` points.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut img: Vec<u32> = (0..n as u32).collect();
        img.swap(a, b);
        Perm { img }
    }

    /// The cycle `(p0 p1 … pr)` on `n` points.
    pub fn cycle(n: usize, points: &[usize]) -> Self {
        let mut img: Vec<u32> = (0..n as u32).collect();
        for (i, &p) in points.iter().enumerate() {
            img[p] = points[(i + 1) % points.len()] as u32;
        }
        Perm { img }
    }

    pub fn degree(&self) -> usize {
        self.img.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.img[i] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.img.iter().map(|&i| i as usize).collect()
    }

    pub(crate) fn raw(&self) -> &[u32] {
        &self.img
    }

    pub fn is_identity(&self) -> bool {
        self.img.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm { img: self.img.iter().map(|&i| other.img[i as usize]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.img.len()];
        for (i, &j) in self.img.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Perm { img: inv }
    }

    /// `self^e` for a non-negative exponent.
    pub fn pow(&self, e: usize) -> Perm {
        let mut acc = Perm::identity(self.degree());
        for _ in 0..e {
            acc = acc.then(self);
        }
        acc
    }

    /// Conjugate `c⁻¹ · self · c`.
    pub fn conjugate_by(&self, c: &Perm) -> Perm {
        c.inverse().then(self).then(c)
    }

    /// Smallest point moved by the permutation.
    pub fn first_moved(&self) -> Option<usize> {
        self.img.iter().enumerate().find(|&(i, &j)| i as u32 != j).map(|(i, _)| i)
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.degree()).filter(|&i| self.apply(i) != i).collect()
    }

    pub fn fixes(&self, p: usize) -> bool {
        self.apply(p) == p
    }

    /// Disjoint cycles of length ≥ 2, each starting at its minimum, ordered by that minimum.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] || self.apply(s) == s {
                continue;
            }
            let mut cyc = vec![s];
            seen[s] = true;
            let mut p = self.apply(s);
            while p != s {
                seen[p] = true;
                cyc.push(p);
                p = self.apply(p);
            }
            out.push(cyc);
        }
        out
    }

    pub fn is_even(&self) -> bool {
        self.cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 0
    }

    pub fn order(&self) -> usize {
        self.cycles().iter().fold(1usize, |acc, c| lcm(acc, c.len()))
    }

    /// Extends to a larger degree by fixing the new points.
    pub fn extend(&self, n: usize) -> Perm {
        assert!(n >= self.degree());
        let mut img = self.img.clone();
        img.extend(self.degree() as u32..n as u32);
        Perm { img }
    }

    /// Concatenates two permutations acting on disjoint consecutive ranges.
    pub fn direct_sum(&self, other: &Perm) -> Perm {
        let off = self.degree() as u32;
        let mut img = self.img.clone();
        img.extend(other.img.iter().map(|&j| j + off));
        Perm { img }
    }

    /// Restriction to the first `n` points; they must form an invariant set.
    pub fn truncate(&self, n: usize) -> Perm {
        let img = self.img[..n].to_vec();
        debug_assert!(img.iter().all(|&j| (j as usize) < n));
        Perm { img }
    }

    /// Restriction to the points `n..degree`, relabelled to start at 0.
    pub fn tail(&self, n: usize) -> Perm {
        let img = self.img[n..].iter().map(|&j| j - n as u32).collect();
        Perm { img }
    }

    /// Restriction to an invariant subset, relabelled by position in `points`.
    pub fn restrict(&self, points: &[usize]) -> Result<Perm> {
        let mut index = vec![u32::MAX; self.degree()];
        for (k, &p) in points.iter().enumerate() {
            index[p] = k as u32;
        }
        let mut img = Vec::with_capacity(points.len());
        for &p in points {
            let q = index[self.apply(p)];
            if q == u32::MAX {
                return Err(Error::NotInvariant);
            }
            img.push(q);
        }
        Ok(Perm { img })
    }

    /// Parses cycle notation such as `(0 1 2)(3 4)` or `()`.
    pub fn parse(n: usize, text: &str) -> Result<Perm> {
        let mut cycles = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            if !rest.starts_with('(') {
                return Err(Error::Parse(format!("expected '(' in {text:?}")));
            }
            let close = rest.find(')').ok_or_else(|| Error::Parse(format!("unclosed cycle in {text:?}")))?;
            let body = &rest[1..close];
            let pts: std::result::Result<Vec<usize>, _> =
                body.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).map(str::parse).collect();
            let pts = pts.map_err(|e| Error::Parse(format!("bad point in {text:?}: {e}")))?;
            if pts.len() > 1 {
                cycles.push(pts);
            } else if let Some(&p) = pts.first() {
                if p >= n {
                    return Err(Error::PointOutOfRange { point: p, degree: n });
                }
            }
            rest = rest[close + 1..].trim_start();
        }
        Perm::from_cycles(n, &cycles)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            write!(f, "(")?;
            for (i, p) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
