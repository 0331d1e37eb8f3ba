use num_bigint::BigUint;
use num_traits::One;

use super::Perm;

#[derive(Clone, Debug)]
struct Level {
    point: usize,
    gens: Vec<Perm>,
    orbit: Vec<usize>,
    // reps[p] maps the base point to p; invs[p] is its inverse
    reps: Vec<Option<Perm>>,
    invs: Vec<Option<Perm>>,
    // number of generators already checked for each orbit position
    checked: Vec<usize>,
}

impl Level {
    fn new(degree: usize, point: usize) -> Self {
        let mut reps = vec![None; degree];
        let mut invs = vec![None; degree];
        reps[point] = Some(Perm::identity(degree));
        invs[point] = Some(Perm::identity(degree));
        Level { point, gens: Vec::new(), orbit: vec![point], reps, invs, checked: vec![0] }
    }

    /// Adds a generator and extends the orbit without touching existing representatives.
    fn push_gen(&mut self, g: Perm) {
        self.gens.push(g);
        let newest = self.gens.len() - 1;
        let old_len = self.orbit.len();
        let mut idx = 0;
        while idx < self.orbit.len() {
            let p = self.orbit[idx];
            let first = if idx < old_len { newest } else { 0 };
            for s in first..self.gens.len() {
                let q = self.gens[s].apply(p);
                if self.reps[q].is_none() {
                    let u = self.reps[p].as_ref().unwrap().then(&self.gens[s]);
                    self.invs[q] = Some(u.inverse());
                    self.reps[q] = Some(u);
                    self.orbit.push(q);
                    self.checked.push(0);
                }
            }
            idx += 1;
        }
    }
}

/// Base and strong generating set built by deterministic Schreier–Sims.
#[derive(Clone, Debug)]
pub struct StabChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabChain {
    pub fn trivial(degree: usize) -> Self {
        StabChain { degree, levels: Vec::new() }
    }

    /// Builds a chain whose base starts with `prefix`; further base points are the
    /// smallest points moved by the current residue.
    pub fn build(degree: usize, gens: &[Perm], prefix: &[usize]) -> Self {
        let mut chain = StabChain { degree, levels: prefix.iter().map(|&p| Level::new(degree, p)).collect() };
        for g in gens {
            chain.add_generator(g);
        }
        chain
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn level_point(&self, level: usize) -> usize {
        self.levels[level].point
    }

    pub fn level_orbit(&self, level: usize) -> &[usize] {
        &self.levels[level].orbit
    }

    /// Strong generators of the stabilizer of the first `level` base points.
    pub fn level_gens(&self, level: usize) -> &[Perm] {
        if level < self.levels.len() {
            &self.levels[level].gens
        } else {
            &[]
        }
    }

    pub fn transversal_rep(&self, level: usize, point: usize) -> Option<&Perm> {
        self.levels[level].reps[point].as_ref()
    }

    /// The chain of the stabilizer of the first `level` base points.
    pub fn suffix(&self, level: usize) -> StabChain {
        StabChain { degree: self.degree, levels: self.levels[level.min(self.levels.len())..].to_vec() }
    }

    pub fn order(&self) -> BigUint {
        self.levels.iter().fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    /// Order as a machine integer, or `None` when it exceeds `cap`.
    pub fn order_capped(&self, cap: u64) -> Option<u64> {
        let mut acc: u64 = 1;
        for l in &self.levels {
            acc = acc.checked_mul(l.orbit.len() as u64)?;
            if acc > cap {
                return None;
            }
        }
        Some(acc)
    }

    /// Sifts `g` starting at `from`; returns the residue and the level where sifting stopped.
    pub fn sift_from(&self, g: &Perm, from: usize) -> (Perm, usize) {
        let mut h = g.clone();
        for (i, l) in self.levels.iter().enumerate().skip(from) {
            let p = h.apply(l.point);
            match &l.invs[p] {
                Some(inv) => h = h.then(inv),
                None => return (h, i),
            }
        }
        (h, self.levels.len())
    }

    pub fn sift(&self, g: &Perm) -> (Perm, usize) {
        self.sift_from(g, 0)
    }

    pub fn contains(&self, g: &Perm) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (h, j) = self.sift(g);
        j == self.levels.len() && h.is_identity()
    }

    /// Adds a generator to the group; returns false when it was already a member.
    pub fn add_generator(&mut self, g: &Perm) -> bool {
        assert_eq!(g.degree(), self.degree);
        let (h, j) = self.sift(g);
        if j == self.levels.len() && h.is_identity() {
            return false;
        }
        self.insert(h, 0, j);
        self.complete(j.min(self.levels.len() - 1));
        true
    }

    // h fixes the base points of levels < j; add it to levels from..=j, appending a level if needed
    fn insert(&mut self, h: Perm, from: usize, j: usize) {
        if j == self.levels.len() {
            let p = h.first_moved().expect("residue must be non-identity");
            self.levels.push(Level::new(self.degree, p));
        }
        for l in from..=j {
            self.levels[l].push_gen(h.clone());
        }
    }

    fn complete(&mut self, start: usize) {
        let mut i = start;
        loop {
            match self.find_failing(i) {
                Some((h, j)) => {
                    self.insert(h, i + 1, j);
                    i = j.min(self.levels.len() - 1);
                }
                None => {
                    if i == 0 {
                        return;
                    }
                    i -= 1;
                }
            }
        }
    }

    // Checks Schreier generators of level i that have not been tested yet.
    fn find_failing(&mut self, i: usize) -> Option<(Perm, usize)> {
        let mut idx = 0;
        while idx < self.levels[i].orbit.len() {
            while self.levels[i].checked[idx] < self.levels[i].gens.len() {
                let lvl = &self.levels[i];
                let s = lvl.checked[idx];
                let p = lvl.orbit[idx];
                let q = lvl.gens[s].apply(p);
                let schreier = lvl.reps[p].as_ref().unwrap().then(&lvl.gens[s]).then(lvl.invs[q].as_ref().unwrap());
                self.levels[i].checked[idx] += 1;
                if schreier.is_identity() {
                    continue;
                }
                let (h, j) = self.sift_from(&schreier, i + 1);
                if j < self.levels.len() || !h.is_identity() {
                    return Some((h, j));
                }
            }
            idx += 1;
        }
        None
    }

    /// Visits every element as `t_{L-1} ⋯ t_0` with `t_j` a transversal element of level j.
    /// The callback receives the element; returning false stops the enumeration.
    pub fn for_each_element(&self, mut f: impl FnMut(&Perm) -> bool) {
        self.search(&mut |_, _| true, &mut f);
    }

    /// Enumerates elements with pruning: `prune(level, partial)` sees `t_j ⋯ t_0`, which
    /// already determines the images of base points `b_0..=b_j`.
    pub fn search(&self, prune: &mut impl FnMut(usize, &Perm) -> bool, f: &mut impl FnMut(&Perm) -> bool) {
        let id = Perm::identity(self.degree);
        self.search_level(0, &id, prune, f);
    }

    fn search_level(
        &self,
        j: usize,
        partial: &Perm,
        prune: &mut impl FnMut(usize, &Perm) -> bool,
        f: &mut impl FnMut(&Perm) -> bool,
    ) -> bool {
        if j == self.levels.len() {
            return f(partial);
        }
        let lvl = &self.levels[j];
        for &p in &lvl.orbit {
            let next = lvl.reps[p].as_ref().unwrap().then(partial);
            if !prune(j, &next) {
                continue;
            }
            if !self.search_level(j + 1, &next, prune, f) {
                return false;
            }
        }
        true
    }

    pub fn elements(&self) -> Vec<Perm> {
        let mut out = Vec::new();
        self.for_each_element(|g| {
            out.push(g.clone());
            true
        });
        out
    }

    /// Uniformly random element, as a product of random transversal elements.
    pub fn random_element<R: rand::Rng>(&self, rng: &mut R) -> Perm {
        let mut g = Perm::identity(self.degree);
        for lvl in &self.levels {
            let p = lvl.orbit[rng.gen_range(0..lvl.orbit.len())];
            g = lvl.reps[p].as_ref().unwrap().then(&g);
        }
        g
    }

    /// All strong generators, deduplicated, in level order.
    pub fn strong_gens(&self) -> Vec<Perm> {
        let mut out: Vec<Perm> = Vec::new();
        for l in &self.levels {
            for g in &l.gens {
                if !out.contains(g) {
                    out.push(g.clone());
                }
            }
        }
        out
    }
}
