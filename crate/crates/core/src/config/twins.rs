use num_rational::Ratio;

use super::PartitionStructure;
use crate::action::{Partition, UnionFind};
use crate::error::{precondition, Result};
use crate::perm::{Perm, PermGroup};

/// Classes of points `a, b` with `(a b)` in the group.
pub fn twin_classes_of_group(group: &PermGroup) -> Partition {
    let n = group.degree();
    twins_by(n, |a, b| group.contains(&Perm::transposition(n, a, b)))
}

/// Classes of points whose transposition preserves every color of the structure.
pub fn twin_classes_of_structure(s: &PartitionStructure) -> Partition {
    let n = s.n();
    twins_by(n, |a, b| swap_preserves(s, a, b))
}

fn swap_preserves(s: &PartitionStructure, a: usize, b: usize) -> bool {
    let k = s.arity();
    let n = s.n();
    let mut t = vec![0usize; k];
    let mut img = vec![0usize; k];
    for &c in s.colors() {
        let mut touched = false;
        for j in 0..k {
            img[j] = if t[j] == a {
                touched = true;
                b
            } else if t[j] == b {
                touched = true;
                a
            } else {
                t[j]
            };
        }
        if touched && s.color(&img) != c {
            return false;
        }
        for j in (0..k).rev() {
            t[j] += 1;
            if t[j] < n {
                break;
            }
            t[j] = 0;
        }
    }
    true
}

// twins form an equivalence relation, so testing against one member per class suffices
fn twins_by(n: usize, mut is_twin: impl FnMut(usize, usize) -> bool) -> Partition {
    let mut uf = UnionFind::new(n);
    let mut reps: Vec<usize> = Vec::new();
    for p in 0..n {
        match reps.iter().find(|&&r| is_twin(r, p)) {
            Some(&r) => {
                uf.union(r, p);
            }
            None => reps.push(p),
        }
    }
    Partition::new(uf.classes())
}

/// Relative symmetry defect: the fraction of points outside a largest twin class.
pub fn symmetry_defect(classes: &Partition, n: usize) -> Ratio<usize> {
    if n == 0 {
        return Ratio::from_integer(0);
    }
    let largest = classes.classes.iter().map(Vec::len).max().unwrap_or(0);
    Ratio::new(n - largest, n)
}

/// Checks that an irreflexive biregular non-trivial digraph has relative defect at least 1/2.
pub fn digraph_symmetry_defect_check(adj: &[Vec<bool>]) -> Result<bool> {
    let n = adj.len();
    if adj.iter().any(|r| r.len() != n) {
        return precondition("adjacency matrix is not square");
    }
    if n < 4 {
        return precondition("digraph needs at least 4 vertices");
    }
    if (0..n).any(|i| adj[i][i]) {
        return precondition("digraph has loops");
    }
    let d = adj[0].iter().filter(|&&e| e).count();
    let regular = (0..n).all(|i| {
        adj[i].iter().filter(|&&e| e).count() == d && (0..n).filter(|&j| adj[j][i]).count() == d
    });
    if !regular {
        return precondition("digraph is not biregular");
    }
    if d == 0 || d == n - 1 {
        return precondition("digraph is trivial");
    }
    let s = PartitionStructure::from_fn(n, 2, |t| u32::from(adj[t[0]][t[1]]));
    Ok(symmetry_defect(&twin_classes_of_structure(&s), n) >= Ratio::new(1, 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::sym_gens;

    #[test]
    fn defect_examples() {
        let mut gens = sym_gens(12, &[0, 1, 2, 3]);
        gens.extend(sym_gens(12, &(4..12).collect::<Vec<_>>()));
        let g = PermGroup::new(12, gens).unwrap();
        let classes = twin_classes_of_group(&g);
        assert_eq!(classes.len(), 2);
        assert_eq!(symmetry_defect(&classes, 12), Ratio::new(1, 3));
        assert_eq!(symmetry_defect(&twin_classes_of_group(&PermGroup::symmetric(5)), 5), Ratio::from_integer(0));
        assert_eq!(symmetry_defect(&twin_classes_of_group(&PermGroup::trivial(4)), 4), Ratio::new(3, 4));
    }

    #[test]
    fn structure_twins_agree_with_group_twins() {
        // star K_{1,3}: the leaves are twins
        let s = PartitionStructure::from_fn(4, 2, |t| u32::from((t[0] == 0) != (t[1] == 0)));
        assert_eq!(twin_classes_of_structure(&s).classes, vec![vec![0], vec![1, 2, 3]]);
        let aut = crate::config::structure_aut(&s);
        assert_eq!(twin_classes_of_group(&aut), twin_classes_of_structure(&s));
    }

    #[test]
    fn digraph_checks() {
        let c4: Vec<Vec<bool>> = (0..4).map(|i| (0..4).map(|j| j == (i + 1) % 4).collect()).collect();
        assert!(digraph_symmetry_defect_check(&c4).unwrap());
        let empty = vec![vec![false; 4]; 4];
        assert!(digraph_symmetry_defect_check(&empty).is_err());
        let complete: Vec<Vec<bool>> = (0..4).map(|i| (0..4).map(|j| i != j).collect()).collect();
        assert!(digraph_symmetry_defect_check(&complete).is_err());
        let mut loops = c4.clone();
        loops[0][0] = true;
        assert!(digraph_symmetry_defect_check(&loops).is_err());
    }
}
