//! Graphs, the reduction of graph isomorphism to string isomorphism, and decoding.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::perm::{sym_gens, Perm, PermGroup, TrackedHom};
use crate::string_iso::{ColoredString, IsoCoset, Solver};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    directed: bool,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, directed: bool) -> Self {
        Graph { n, directed, edges: BTreeSet::new() }
    }

    pub fn from_edges(n: usize, directed: bool, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::new(n, directed);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Adds an edge; undirected edges are stored as `(min, max)` and may not be loops.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        for p in [u, v] {
            if p >= self.n {
                return Err(Error::PointOutOfRange { point: p, degree: self.n });
            }
        }
        let e = if self.directed { (u, v) } else { (u.min(v), u.max(v)) };
        if !self.directed && u == v {
            return Err(Error::Parse(format!("loop at {u} in an undirected graph")));
        }
        if !self.edges.insert(e) {
            return Err(Error::Parse(format!("duplicate edge {u} {v}")));
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if self.directed {
            self.edges.contains(&(u, v))
        } else {
            self.edges.contains(&(u.min(v), u.max(v)))
        }
    }

    /// The image graph with vertex `v` renamed `σ(v)`.
    pub fn permuted(&self, sigma: &Perm) -> Graph {
        let mut g = Graph::new(self.n, self.directed);
        for &(u, v) in &self.edges {
            g.add_edge(sigma.apply(u), sigma.apply(v)).expect("bijection keeps edges distinct");
        }
        g
    }

    /// Sorted (out-degree, in-degree) pairs; in-degree is 0 for undirected graphs.
    pub fn degree_profile(&self) -> Vec<(usize, usize)> {
        let mut d = vec![(0, 0); self.n];
        for &(u, v) in &self.edges {
            d[u].0 += 1;
            if self.directed {
                d[v].1 += 1;
            } else {
                d[v].0 += 1;
            }
        }
        d.sort_unstable();
        d
    }

    /// Reads `p <directed|undirected> <n> <m>` followed by `e u v` lines.
    /// Blank lines and lines starting with `c` are skipped.
    pub fn parse(text: &str) -> Result<Graph> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('c'));
        let header = lines.next().ok_or_else(|| Error::Parse("missing header".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 4 || h[0] != "p" {
            return Err(Error::Parse(format!("bad header `{header}`")));
        }
        let directed = match h[1] {
            "directed" => true,
            "undirected" => false,
            other => return Err(Error::Parse(format!("unknown graph kind `{other}`"))),
        };
        let n = parse_num(h[2])?;
        let m = parse_num(h[3])?;
        let mut g = Graph::new(n, directed);
        for line in lines {
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 3 || t[0] != "e" {
                return Err(Error::Parse(format!("bad edge line `{line}`")));
            }
            g.add_edge(parse_num(t[1])?, parse_num(t[2])?)?;
        }
        if g.edge_count() != m {
            return Err(Error::Parse(format!("header announces {m} edges, found {}", g.edge_count())));
        }
        Ok(g)
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.directed { "directed" } else { "undirected" };
        writeln!(f, "p {kind} {} {}", self.n, self.edges.len())?;
        for (u, v) in &self.edges {
            writeln!(f, "e {u} {v}")?;
        }
        Ok(())
    }
}

fn parse_num(s: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse(format!("expected a number, found `{s}`")))
}

/// A graph pair as a string isomorphism instance.
#[derive(Clone, Debug)]
pub struct Encoding {
    /// The positions: ordered pairs for digraphs, 2-subsets otherwise.
    pub domain: Vec<(usize, usize)>,
    pub group: PermGroup,
    pub x: ColoredString,
    pub y: ColoredString,
    directed: bool,
    // Sym(V) onto `group`, kept for decoding
    induced: TrackedHom,
}

impl Encoding {
    fn position(&self, u: usize, v: usize) -> usize {
        let key = if self.directed { (u, v) } else { (u.min(v), u.max(v)) };
        self.domain.binary_search(&key).expect("pair in domain")
    }

    /// The permutation of positions induced by a vertex permutation.
    pub fn encode_perm(&self, sigma: &Perm) -> Perm {
        let imgs = self.domain.iter().map(|&(u, v)| self.position(sigma.apply(u), sigma.apply(v))).collect();
        Perm::from_images(imgs).expect("induced map is a bijection")
    }

    /// A vertex permutation inducing `tau`.
    pub fn decode_perm(&self, tau: &Perm) -> Result<Perm> {
        self.induced.lift(tau)
    }

    /// Vertex-level coset of a position-level one.
    pub fn decode(&self, coset: &IsoCoset) -> Result<IsoCoset> {
        match coset {
            IsoCoset::Empty => Ok(IsoCoset::Empty),
            IsoCoset::Coset { group, rep } => {
                let vg = self.induced.preimage(group)?;
                Ok(IsoCoset::new(vg, self.induced.lift(rep)?))
            }
        }
    }
}

/// Encodes the pair as strings over positions; `None` when the vertex counts or kinds differ.
pub fn encode_gi_as_si(g1: &Graph, g2: &Graph) -> Result<Option<Encoding>> {
    if g1.n != g2.n || g1.directed != g2.directed {
        return Ok(None);
    }
    let n = g1.n;
    let domain: Vec<(usize, usize)> = if g1.directed {
        (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).collect()
    } else {
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
    };
    let x = ColoredString::new(domain.iter().map(|&(u, v)| u32::from(g1.has_edge(u, v))).collect());
    let y = ColoredString::new(domain.iter().map(|&(u, v)| u32::from(g2.has_edge(u, v))).collect());
    let sym = PermGroup::new(n, sym_gens(n, &(0..n).collect::<Vec<_>>()))?;
    let mut enc = Encoding {
        group: PermGroup::trivial(domain.len()),
        induced: TrackedHom::identity(sym.clone()),
        domain,
        x,
        y,
        directed: g1.directed,
    };
    let images: Vec<Perm> = sym.generators().iter().map(|s| enc.encode_perm(s)).collect();
    let group = PermGroup::new(enc.domain.len(), images.clone())?;
    // Sym(V) → Sym(Ω) is not injective on two undirected vertices, so decoding goes through
    // preimages rather than an inverse map
    enc.induced = TrackedHom::new(sym, enc.domain.len(), images)?;
    enc.group = group;
    Ok(Some(enc))
}

/// `Iso(g1, g2)` as a coset of vertex permutations.
pub fn solve_gi(solver: &Solver, g1: &Graph, g2: &Graph) -> Result<IsoCoset> {
    let Some(enc) = encode_gi_as_si(g1, g2)? else {
        return Ok(IsoCoset::Empty);
    };
    if g1.edge_count() != g2.edge_count() || g1.degree_profile() != g2.degree_profile() {
        return Ok(IsoCoset::Empty);
    }
    let c = solver.solve(&enc.group, &enc.x, &enc.y)?;
    enc.decode(&c)
}

/// A string isomorphism instance read from text: the degree, the two strings as symbol
/// lists, then one generator per line in cycle notation. Both strings share one alphabet.
pub fn parse_si_instance(text: &str) -> Result<(PermGroup, ColoredString, ColoredString)> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let mut next = |what: &str| lines.next().ok_or_else(|| Error::Parse(format!("missing {what}")));
    let n = parse_num(next("degree")?)?;
    let xs: Vec<&str> = next("first string")?.split_whitespace().collect();
    let ys: Vec<&str> = next("second string")?.split_whitespace().collect();
    for s in [&xs, &ys] {
        if s.len() != n {
            return Err(Error::Parse(format!("string of length {} for degree {n}", s.len())));
        }
    }
    let both = ColoredString::from_symbols(&[xs, ys].concat());
    let x = ColoredString::new(both.letters()[..n].to_vec());
    let y = ColoredString::new(both.letters()[n..].to_vec());
    let rest: Vec<&str> = lines.collect();
    let g = PermGroup::parse(n, &rest.join("\n"))?;
    Ok((g, x, y))
}

/// Every isomorphism `g1 → g2`, by depth-first extension of partial vertex maps.
pub fn backtrack_isomorphisms(g1: &Graph, g2: &Graph) -> Vec<Perm> {
    let mut out = Vec::new();
    if g1.n != g2.n || g1.directed != g2.directed || g1.edge_count() != g2.edge_count() {
        return out;
    }
    let n = g1.n;
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    extend(g1, g2, 0, &mut map, &mut used, &mut out);
    out
}

fn extend(g1: &Graph, g2: &Graph, u: usize, map: &mut [usize], used: &mut [bool], out: &mut Vec<Perm>) {
    if u == g1.n {
        out.push(Perm::from_images(map.to_vec()).expect("bijection"));
        return;
    }
    for v in 0..g1.n {
        if used[v] {
            continue;
        }
        let ok = (0..=u).all(|w| {
            let fw = if w == u { v } else { map[w] };
            g1.has_edge(u, w) == g2.has_edge(v, fw) && g1.has_edge(w, u) == g2.has_edge(fw, v)
        });
        if ok {
            map[u] = v;
            used[v] = true;
            extend(g1, g2, u + 1, map, used, out);
            used[v] = false;
        }
    }
    map[u] = usize::MAX;
}

/// Every isomorphism `g1 → g2` by running through all `n!` bijections.
pub fn brute_force_gi(g1: &Graph, g2: &Graph) -> Vec<Perm> {
    let mut out = Vec::new();
    if g1.n != g2.n || g1.directed != g2.directed {
        return out;
    }
    let mut p: Vec<usize> = (0..g1.n).collect();
    loop {
        let sigma = Perm::from_images(p.clone()).expect("bijection");
        if g1.permuted(&sigma) == *g2 {
            out.push(sigma);
        }
        if !next_permutation(&mut p) {
            return out;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::string_iso::SolverConfig;

    fn cycle(n: usize) -> Graph {
        let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, false, &e).unwrap()
    }

    fn petersen() -> Graph {
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((i, i + 5));
            e.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::from_edges(10, false, &e).unwrap()
    }

    fn solver() -> Solver {
        Solver::new(SolverConfig::default())
    }

    #[test]
    fn si_instance_shares_the_alphabet() {
        let (g, x, y) = parse_si_instance("3\nb c c\na b b\n(0 1 2)\n").unwrap();
        assert_eq!(x.letters(), &[1, 2, 2]);
        assert_eq!(y.letters(), &[0, 1, 1]);
        assert_eq!(g.order(), 3u32.into());
        assert!(parse_si_instance("3\na a\na a a\n").is_err());
        assert!(parse_si_instance("2\na b\nb a\n(0 2)\n").is_err());
    }

    #[test]
    fn parse_round_trip() {
        let g = Graph::parse("p undirected 4 3\ne 1 0\ne 1 2\n\ne 3 2\n").unwrap();
        assert!(g.has_edge(0, 1));
        assert_eq!(Graph::parse(&g.to_string()).unwrap(), g);
        assert!(Graph::parse("p undirected 3 1\ne 0 0\n").is_err());
        assert!(Graph::parse("p undirected 3 2\ne 0 1\ne 1 0\n").is_err());
        assert!(Graph::parse("p undirected 3 2\ne 0 1\n").is_err());
        assert!(Graph::parse("p weird 3 0\n").is_err());
        assert!(Graph::parse("p directed 2 1\ne 0 2\n").is_err());
    }

    #[test]
    fn triangle_encoding() {
        let k3 = cycle(3);
        let enc = encode_gi_as_si(&k3, &k3).unwrap().unwrap();
        assert_eq!(enc.domain.len(), 3);
        assert_eq!(enc.x.letters(), &[1, 1, 1]);
        assert_eq!(enc.y.letters(), &[1, 1, 1]);
        assert_eq!(solve_gi(&solver(), &k3, &k3).unwrap().size(), 6u32.into());
    }

    #[test]
    fn path_and_star_on_three_vertices() {
        let p3 = Graph::from_edges(3, false, &[(0, 1), (1, 2)]).unwrap();
        let star = Graph::from_edges(3, false, &[(2, 0), (2, 1)]).unwrap();
        let c = solve_gi(&solver(), &p3, &star).unwrap();
        let oracle = brute_force_gi(&p3, &star);
        assert_eq!(oracle.len(), 2);
        assert_eq!(c.size(), 2u32.into());
        assert!(oracle.iter().all(|s| c.contains(s)));
        let tri = cycle(3);
        assert!(solve_gi(&solver(), &tri, &p3).unwrap().is_empty());
    }

    #[test]
    fn size_mismatch_is_refuted() {
        assert!(encode_gi_as_si(&cycle(4), &cycle(5)).unwrap().is_none());
        assert!(solve_gi(&solver(), &cycle(4), &cycle(5)).unwrap().is_empty());
    }

    #[test]
    fn cycle_and_petersen_automorphisms() {
        let c5 = cycle(5);
        assert_eq!(brute_force_gi(&c5, &c5).len(), 10);
        assert_eq!(solve_gi(&solver(), &c5, &c5).unwrap().size(), 10u32.into());
        let p = petersen();
        assert_eq!(backtrack_isomorphisms(&p, &p).len(), 120);
        let c = solve_gi(&solver(), &p, &p).unwrap();
        assert_eq!(c.size(), 120u32.into());
        assert!(c.rep().unwrap().is_identity() || c.contains(&Perm::identity(10)));
    }

    #[test]
    fn tiny_graphs_decode() {
        for n in 0..3 {
            for directed in [false, true] {
                let g = Graph::new(n, directed);
                let c = solve_gi(&solver(), &g, &g).unwrap();
                assert_eq!(c.size(), crate::perm::factorial(n));
            }
        }
        let a = Graph::from_edges(2, true, &[(0, 1)]).unwrap();
        let b = Graph::from_edges(2, true, &[(1, 0)]).unwrap();
        let c = solve_gi(&solver(), &a, &b).unwrap();
        assert_eq!(c.elements(), vec![Perm::transposition(2, 0, 1)]);
    }

    #[test]
    fn encode_decode_round_trip() {
        let g = cycle(5);
        let enc = encode_gi_as_si(&g, &g).unwrap().unwrap();
        for sigma in PermGroup::symmetric(5).elements() {
            assert_eq!(enc.decode_perm(&enc.encode_perm(&sigma)).unwrap(), sigma);
        }
    }
}
