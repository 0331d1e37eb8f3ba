use std::collections::HashMap;

use super::cases::reduce_with_certificates;
use super::effect::{effect_of_structures, Structure};
use crate::config::PartitionStructure;
use crate::error::Result;
use crate::johnson::identify_johnson_action;
use crate::perm::{Perm, PermGroup, TrackedHom};
use crate::string_iso::{giant_coset_iso, iso_cosets_union, ColoredString, IsoCoset, Solver};

/// Test-set size: the relaxed value when set, else the least k above `max{8, 2 + log₂ n}`.
pub fn cert_size(relax_k: Option<usize>, n: usize) -> usize {
    relax_k.unwrap_or_else(|| {
        let bound = (2.0 + (n.max(1) as f64).log2()).max(8.0);
        bound.floor() as usize + 1
    })
}

/// The k-ary structure on Γ read off a string indexed by k-subsets; repeated entries get color 0.
pub fn kary_from_subsets(m: usize, k: usize, iota: &[Vec<usize>], x: &ColoredString) -> PartitionStructure {
    let index: HashMap<&Vec<usize>, usize> = iota.iter().enumerate().map(|(i, s)| (s, i)).collect();
    PartitionStructure::from_fn(m, k, |t| {
        let mut s = t.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.len() < k {
            0
        } else {
            1 + x.get(index[&s])
        }
    })
}

impl Solver {
    /// `Iso_G(x, y)` when `ψ` maps G onto a giant acting on the k-subsets of an m-set.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn giant_pipeline(
        &self,
        psi: &TrackedHom,
        block_of: &[usize],
        primitive: bool,
        m: usize,
        k: usize,
        x: &ColoredString,
        y: &ColoredString,
    ) -> Result<IsoCoset> {
        let n = x.len();
        let (phi, iota) = match identify_johnson_action(&psi.image(), m, k) {
            Ok(ja) => {
                let lifted = ja.lift_through(psi, block_of)?;
                (lifted.phi, ja.iota)
            }
            Err(e) => {
                self.hit("fallback");
                self.trace(|| format!("node n={n} fallback reason={e}"));
                return self.luks_through(psi, x, y);
            }
        };
        let alt = PermGroup::alternating(m);
        let h = phi.preimage(&alt)?;
        let phi_h = phi.restrict_domain(&h)?;
        let mut reps = vec![Perm::identity(n)];
        if !phi.image().is_subgroup_of(&alt) {
            reps.push(phi.lift(&Perm::transposition(m, 0, 1))?);
        }
        self.trace(|| format!("node n={n} giant m={m} k={k} primitive={primitive} cosets={}", reps.len()));
        let mut out = Vec::with_capacity(reps.len());
        for r in &reps {
            let y2 = y.act(&r.inverse());
            out.push(self.giant_core(&h, &phi_h, &iota, primitive, k, x, &y2)?.shift(r));
        }
        iso_cosets_union(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn giant_core(
        &self,
        h: &PermGroup,
        phi: &TrackedHom,
        iota: &[Vec<usize>],
        primitive: bool,
        k: usize,
        x: &ColoredString,
        y: &ColoredString,
    ) -> Result<IsoCoset> {
        let m = phi.codomain_degree();
        if primitive && k == 1 {
            self.hit("giant_direct");
            return giant_coset_iso(h, x, y);
        }
        if primitive {
            // the string is itself a k-ary structure on Γ
            let sx = Structure::Relational(kary_from_subsets(m, k, iota, x));
            let sy = Structure::Relational(kary_from_subsets(m, k, iota, y));
            if let Some((_, c)) = effect_of_structures(self, phi, &sx, &[sy], x, y)? {
                self.hit("giant_structure");
                return Ok(c);
            }
        } else {
            let kk = cert_size(self.config().relax_k, h.degree());
            let relaxed = self.config().relax_k.is_some();
            if kk >= 2 && kk < m && (relaxed || 10 * kk < m) {
                if let Some(r) = reduce_with_certificates(self, h, phi, x, y, kk)? {
                    return Ok(r.iso);
                }
                self.trace(|| format!("node m={m} aggregation made no progress"));
            }
        }
        self.hit("fallback");
        self.trace(|| format!("node m={m} fallback through the alternating quotient"));
        self.luks_through(phi, x, y)
    }
}
