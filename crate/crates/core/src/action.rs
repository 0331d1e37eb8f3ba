//! Orbits, blocks and primitivity.

use std::fmt;

use crate::error::{precondition, Error, Result};
use crate::perm::{Perm, PermGroup, TrackedHom};

/// A partition of the domain into classes, each sorted, classes ordered by minimum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub classes: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(mut classes: Vec<Vec<usize>>) -> Self {
        for c in &mut classes {
            c.sort_unstable();
        }
        classes.retain(|c| !c.is_empty());
        classes.sort_by_key(|c| c[0]);
        Partition { classes }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Class index of every point.
    pub fn class_of(&self, degree: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; degree];
        for (i, c) in self.classes.iter().enumerate() {
            for &p in c {
                out[p] = i;
            }
        }
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.classes {
            let parts: Vec<String> = c.iter().map(|p| p.to_string()).collect();
            writeln!(f, "{}", parts.join(","))?;
        }
        Ok(())
    }
}

pub type OrbitPartition = Partition;
pub type BlockSystem = Partition;

/// Orbit of a single point, in discovery order.
pub fn orbit(group: &PermGroup, point: usize) -> Vec<usize> {
    let mut seen = vec![false; group.degree()];
    seen[point] = true;
    let mut out = vec![point];
    let mut i = 0;
    while i < out.len() {
        let p = out[i];
        for g in group.generators() {
            let q = g.apply(p);
            if !seen[q] {
                seen[q] = true;
                out.push(q);
            }
        }
        i += 1;
    }
    out
}

pub fn orbits(group: &PermGroup) -> OrbitPartition {
    orbits_of_gens(group.degree(), group.generators())
}

pub(crate) fn orbits_of_gens(n: usize, gens: &[Perm]) -> Partition {
    let mut uf = UnionFind::new(n);
    for g in gens {
        for i in 0..n {
            uf.union(i, g.apply(i));
        }
    }
    Partition::new(uf.classes())
}

pub fn is_transitive(group: &PermGroup) -> bool {
    group.degree() <= 1 || orbit(group, 0).len() == group.degree()
}

fn require_transitive(group: &PermGroup) -> Result<()> {
    if is_transitive(group) {
        Ok(())
    } else {
        precondition("group is not transitive")
    }
}

/// Smallest block containing `a` and `b`: the component of `a` in the graph whose
/// edges are the images of `{a, b}`.
pub fn smallest_block(group: &PermGroup, a: usize, b: usize) -> Result<Vec<usize>> {
    require_transitive(group)?;
    if a == b {
        return precondition("seed points must differ");
    }
    Ok(smallest_block_unchecked(group.degree(), group.generators(), a, b))
}

fn smallest_block_unchecked(n: usize, gens: &[Perm], a: usize, b: usize) -> Vec<usize> {
    let key = |x: usize, y: usize| x.min(y) * n + x.max(y);
    let mut seen = std::collections::HashSet::new();
    seen.insert(key(a, b));
    let mut queue = vec![(a, b)];
    let mut uf = UnionFind::new(n);
    uf.union(a, b);
    let mut i = 0;
    while i < queue.len() {
        let (x, y) = queue[i];
        for g in gens {
            let (u, v) = (g.apply(x), g.apply(y));
            if seen.insert(key(u, v)) {
                uf.union(u, v);
                queue.push((u, v));
            }
        }
        i += 1;
    }
    let root = uf.find(a);
    let mut block: Vec<usize> = (0..n).filter(|&p| uf.find(p) == root).collect();
    block.sort_unstable();
    block
}

/// Translates of a block under the group.
pub fn block_system_from(group: &PermGroup, block: &[usize]) -> Result<BlockSystem> {
    let n = group.degree();
    let mut blocks: Vec<Vec<usize>> = vec![block.to_vec()];
    let mut owner = vec![usize::MAX; n];
    for &p in block {
        owner[p] = 0;
    }
    let mut i = 0;
    while i < blocks.len() {
        for g in group.generators() {
            let mut img: Vec<usize> = blocks[i].iter().map(|&p| g.apply(p)).collect();
            img.sort_unstable();
            let o = owner[img[0]];
            if o == usize::MAX {
                if img.iter().any(|&p| owner[p] != usize::MAX) {
                    return Err(Error::NotInvariant);
                }
                for &p in &img {
                    owner[p] = blocks.len();
                }
                blocks.push(img);
            } else if blocks[o] != img {
                return Err(Error::NotInvariant);
            }
        }
        i += 1;
    }
    if owner.contains(&usize::MAX) {
        return precondition("block translates do not cover the domain");
    }
    Ok(Partition::new(blocks))
}

pub fn is_primitive(group: &PermGroup) -> Result<bool> {
    require_transitive(group)?;
    let n = group.degree();
    Ok((1..n).all(|b| smallest_block_unchecked(n, group.generators(), 0, b).len() == n))
}

/// A block system with primitive induced action, or `None` when the group is primitive.
///
/// Seeds with point 0 and the smallest partner giving a proper block, then coarsens
/// while the induced action still has blocks.
pub fn minimal_block_system(group: &PermGroup) -> Result<Option<BlockSystem>> {
    require_transitive(group)?;
    let n = group.degree();
    let gens = group.generators();
    let Some(first) = (1..n).map(|b| smallest_block_unchecked(n, gens, 0, b)).find(|blk| blk.len() < n) else {
        return Ok(None);
    };
    let mut system = block_system_from(group, &first)?;
    loop {
        let hom = block_action(group, &system)?;
        let quotient = hom.image();
        let m = system.len();
        let coarser = (1..m).map(|b| smallest_block_unchecked(m, quotient.generators(), 0, b)).find(|blk| blk.len() < m);
        match coarser {
            None => return Ok(Some(system)),
            Some(qblock) => {
                let merged: Vec<usize> = qblock.iter().flat_map(|&i| system.classes[i].iter().copied()).collect();
                system = block_system_from(group, &merged)?;
            }
        }
    }
}

/// Induced action on the blocks of an invariant system, blocks indexed in system order.
pub fn block_action(group: &PermGroup, system: &BlockSystem) -> Result<TrackedHom> {
    let n = group.degree();
    let owner = system.class_of(n);
    if owner.contains(&usize::MAX) {
        return precondition("system does not cover the domain");
    }
    let m = system.len();
    let mut images = Vec::new();
    for g in group.generators() {
        let mut img = vec![usize::MAX; m];
        for (i, blk) in system.classes.iter().enumerate() {
            let target = owner[g.apply(blk[0])];
            if blk.iter().any(|&p| owner[g.apply(p)] != target) {
                return Err(Error::NotInvariant);
            }
            img[i] = target;
        }
        images.push(Perm::from_images(img).map_err(|_| Error::NotInvariant)?);
    }
    TrackedHom::new(group.clone(), m, images)
}

/// Path-compressed union by size; class lists ordered by minimum.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }

    pub fn classes(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..n {
            let r = self.find(i);
            by_root[r].push(i);
        }
        let mut out: Vec<Vec<usize>> = by_root.into_iter().filter(|c| !c.is_empty()).collect();
        out.sort_by_key(|c| c[0]);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn grp(n: usize, gens: &[&str]) -> PermGroup {
        PermGroup::new(n, gens.iter().map(|s| Perm::parse(n, s).unwrap()).collect()).unwrap()
    }

    fn d8() -> PermGroup {
        grp(4, &["(0 1 2 3)", "(1 3)"])
    }

    #[test]
    fn orbit_examples() {
        assert_eq!(orbits(&grp(4, &["(0 1)"])).classes, vec![vec![0, 1], vec![2], vec![3]]);
        assert_eq!(orbits(&grp(5, &["(0 1 2)", "(3 4)"])).classes, vec![vec![0, 1, 2], vec![3, 4]]);
        assert_eq!(orbits(&d8()).classes, vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn blocks_of_d8_and_c6() {
        assert_eq!(smallest_block(&d8(), 0, 2).unwrap(), vec![0, 2]);
        assert_eq!(smallest_block(&PermGroup::symmetric(4), 0, 3).unwrap(), vec![0, 1, 2, 3]);
        let c6 = grp(6, &["(0 1 2 3 4 5)"]);
        assert_eq!(smallest_block(&c6, 0, 3).unwrap(), vec![0, 3]);
        assert!(smallest_block(&grp(4, &["(0 1)"]), 0, 1).is_err());
    }

    #[test]
    fn primitivity() {
        assert!(is_primitive(&PermGroup::alternating(4)).unwrap());
        assert!(!is_primitive(&d8()).unwrap());
        assert!(is_primitive(&grp(5, &["(0 1 2 3 4)"])).unwrap());
        assert!(is_primitive(&grp(3, &["(0 1)"])).is_err());
    }

    #[test]
    fn minimal_systems() {
        assert_eq!(minimal_block_system(&PermGroup::symmetric(5)).unwrap(), None);
        let sys = minimal_block_system(&d8()).unwrap().unwrap();
        assert_eq!(sys.classes, vec![vec![0, 2], vec![1, 3]]);
        let c6 = grp(6, &["(0 1 2 3 4 5)"]);
        let sys = minimal_block_system(&c6).unwrap().unwrap();
        let hom = block_action(&c6, &sys).unwrap();
        assert!(is_primitive(&hom.image()).unwrap());
        assert_eq!(sys.classes, vec![vec![0, 2, 4], vec![1, 3, 5]]);
    }

    #[test]
    fn d8_block_action() {
        let g = d8();
        let sys = minimal_block_system(&g).unwrap().unwrap();
        let hom = block_action(&g, &sys).unwrap();
        assert_eq!(hom.image().order(), BigUint::from(2u32));
        assert_eq!(hom.kernel().order(), BigUint::from(4u32));
        let whole = Partition::new(vec![(0..4).collect()]);
        assert!(block_action(&g, &whole).unwrap().image().is_trivial());
        let bad = Partition::new(vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(block_action(&g, &bad).unwrap_err(), Error::NotInvariant);
    }

    #[test]
    fn orbit_partition_as_blocks_has_trivial_image() {
        let g = grp(5, &["(0 1 2)", "(3 4)"]);
        let hom = block_action(&g, &orbits(&g)).unwrap();
        assert!(hom.image().is_trivial());
        assert!(hom.kernel().same_group(&g));
    }
}
