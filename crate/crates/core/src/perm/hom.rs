use std::sync::{Arc, OnceLock};

use super::{Perm, PermGroup, StabChain};
use crate::error::{check_degree, Error, Result};

/// A homomorphism from a permutation group on Ω to `Sym(Γ)`, stored on generators.
///
/// Each generator `g` is paired with its image as one permutation `g ⊕ φ(g)` on the
/// disjoint union Ω ⊔ Γ. Evaluation, kernels and lifts are stabilizer computations in
/// that shadow group.
#[derive(Clone)]
pub struct TrackedHom {
    domain: PermGroup,
    codomain_degree: usize,
    images: Vec<Perm>,
    shadow: Vec<Perm>,
    eval_chain: OnceLock<Arc<StabChain>>,
    lift_chain: OnceLock<Arc<StabChain>>,
}

impl std::fmt::Debug for TrackedHom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TrackedHom({} -> {}, images {:?})", self.domain_degree(), self.codomain_degree, self.images)
    }
}

impl TrackedHom {
    /// Pairs each generator of `domain` with the image at the same index.
    pub fn new(domain: PermGroup, codomain_degree: usize, images: Vec<Perm>) -> Result<Self> {
        if images.len() != domain.generators().len() {
            return Err(Error::Precondition("one image per generator required".into()));
        }
        for im in &images {
            check_degree(codomain_degree, im.degree())?;
        }
        let shadow = domain.generators().iter().zip(&images).map(|(g, h)| g.direct_sum(h)).collect();
        let hom = TrackedHom {
            domain,
            codomain_degree,
            images,
            shadow,
            eval_chain: OnceLock::new(),
            lift_chain: OnceLock::new(),
        };
        Ok(hom)
    }

    /// Builds the map from a function evaluated on generators.
    pub fn from_fn(domain: PermGroup, codomain_degree: usize, f: impl Fn(&Perm) -> Perm) -> Result<Self> {
        let images = domain.generators().iter().map(f).collect();
        Self::new(domain, codomain_degree, images)
    }

    /// Checks that the generator pairs define a homomorphism.
    pub fn verify(&self) -> Result<()> {
        self.eval_chain_checked().map(|_| ())
    }

    pub fn identity(group: PermGroup) -> Self {
        let n = group.degree();
        let images = group.generators().to_vec();
        Self::new(group, n, images).expect("identity map is well formed")
    }

    pub fn domain(&self) -> &PermGroup {
        &self.domain
    }

    pub fn domain_degree(&self) -> usize {
        self.domain.degree()
    }

    pub fn codomain_degree(&self) -> usize {
        self.codomain_degree
    }

    pub fn generator_images(&self) -> &[Perm] {
        &self.images
    }

    fn eval_chain_checked(&self) -> Result<&StabChain> {
        let chain = self.eval_chain.get_or_init(|| {
            Arc::new(StabChain::build(self.domain_degree() + self.codomain_degree, &self.shadow, &[]))
        });
        let n = self.domain_degree();
        if chain.base().iter().any(|&b| b >= n) {
            return Err(Error::NotHomomorphism);
        }
        Ok(chain)
    }

    fn lift_chain(&self) -> &StabChain {
        self.lift_chain.get_or_init(|| {
            let n = self.domain_degree();
            let prefix: Vec<usize> = (n..n + self.codomain_degree).collect();
            let gens = match self.eval_chain.get() {
                Some(c) => c.strong_gens(),
                None => self.shadow.clone(),
            };
            Arc::new(StabChain::build(n + self.codomain_degree, &gens, &prefix))
        })
    }

    /// Image of an arbitrary member of the domain group.
    pub fn eval(&self, g: &Perm) -> Result<Perm> {
        check_degree(self.domain_degree(), g.degree())?;
        let chain = self.eval_chain_checked()?;
        let n = self.domain_degree();
        let (res, _) = chain.sift(&g.extend(n + self.codomain_degree));
        if res.raw()[..n].iter().enumerate().any(|(i, &j)| i as u32 != j) {
            return Err(Error::NotMember);
        }
        Ok(res.tail(n).inverse())
    }

    pub fn kernel(&self) -> PermGroup {
        let chain = self.lift_chain();
        let n = self.domain_degree();
        let gens = chain.level_gens(self.codomain_degree).iter().map(|g| g.truncate(n)).collect();
        PermGroup::from_gens(n, gens)
    }

    pub fn image(&self) -> PermGroup {
        PermGroup::from_gens(self.codomain_degree, self.images.clone())
    }

    /// Some element mapping to `tau`, or `EmptyPreimage` if `tau` is outside the image.
    pub fn lift(&self, tau: &Perm) -> Result<Perm> {
        check_degree(self.codomain_degree, tau.degree())?;
        let n = self.domain_degree();
        let chain = self.lift_chain();
        let (res, j) = chain.sift(&Perm::identity(n).direct_sum(tau));
        if j < self.codomain_degree || !res.tail(n).is_identity() {
            return Err(Error::EmptyPreimage);
        }
        Ok(res.truncate(n).inverse())
    }

    /// Preimage of a single element as `(kernel, representative)`, or `None`.
    pub fn preimage_element(&self, tau: &Perm) -> Result<Option<(PermGroup, Perm)>> {
        match self.lift(tau) {
            Ok(g) => Ok(Some((self.kernel(), g))),
            Err(Error::EmptyPreimage) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Preimage of a subgroup of `Sym(Γ)`.
    pub fn preimage(&self, target: &PermGroup) -> Result<PermGroup> {
        check_degree(self.codomain_degree, target.degree())?;
        let image = self.image();
        let inter = if target.is_subgroup_of(&image) {
            target.clone()
        } else {
            let bound = image.order_capped(u64::MAX).map(|o| o as usize).unwrap_or(usize::MAX);
            image.subgroup_with_cosets(|g| target.contains(g), bound)?.0
        };
        let mut gens = self.kernel().generators().to_vec();
        for t in inter.generators() {
            gens.push(self.lift(t)?);
        }
        Ok(PermGroup::from_gens(self.domain_degree(), gens))
    }

    /// The same map restricted to a subgroup of the domain.
    pub fn restrict_domain(&self, sub: &PermGroup) -> Result<TrackedHom> {
        let images = sub.generators().iter().map(|g| self.eval(g)).collect::<Result<Vec<_>>>()?;
        TrackedHom::new(sub.clone(), self.codomain_degree, images)
    }

    /// Composition with the restriction of the image to an invariant point list of Γ.
    pub fn restrict_codomain(&self, points: &[usize]) -> Result<TrackedHom> {
        let images = self.images.iter().map(|h| h.restrict(points)).collect::<Result<Vec<_>>>()?;
        TrackedHom::new(self.domain.clone(), points.len(), images)
    }

    /// `self` followed by `next`, where `next` is defined on the image of `self`.
    pub fn compose(&self, next: &TrackedHom) -> Result<TrackedHom> {
        check_degree(self.codomain_degree, next.domain_degree())?;
        let images = self.images.iter().map(|h| next.eval(h)).collect::<Result<Vec<_>>>()?;
        TrackedHom::new(self.domain.clone(), next.codomain_degree, images)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(n: usize, s: &str) -> Perm {
        Perm::parse(n, s).unwrap()
    }

    fn d8_blocks() -> TrackedHom {
        let g = PermGroup::new(4, vec![p(4, "(0 1 2 3)"), p(4, "(1 3)")]).unwrap();
        // blocks {0,2} -> 0, {1,3} -> 1
        TrackedHom::from_fn(g, 2, |h| {
            let b = |x: usize| x % 2;
            Perm::from_images(vec![b(h.apply(0)), b(h.apply(1))]).unwrap()
        })
        .unwrap()
    }

    #[test]
    fn evaluates_generators_and_identity() {
        let h = d8_blocks();
        assert_eq!(h.eval(&p(4, "(0 1 2 3)")).unwrap(), p(2, "(0 1)"));
        assert_eq!(h.eval(&p(4, "(1 3)")).unwrap(), Perm::identity(2));
        assert!(h.eval(&Perm::identity(4)).unwrap().is_identity());
        assert_eq!(h.eval(&p(4, "(0 1)")).unwrap_err(), Error::NotMember);
    }

    #[test]
    fn d8_kernel_and_preimage() {
        let h = d8_blocks();
        let k = h.kernel();
        assert_eq!(k.order(), BigUint::from(4u32));
        assert!(k.contains(&p(4, "(0 2)")) && k.contains(&p(4, "(1 3)")));
        let lift = h.lift(&p(2, "(0 1)")).unwrap();
        assert_eq!(h.eval(&lift).unwrap(), p(2, "(0 1)"));
        let brute: Vec<Perm> = h.domain().elements().into_iter().filter(|g| !g.fixes(0) && g.apply(0) % 2 == 1).collect();
        assert_eq!(brute.len(), 4);
        assert!(brute.contains(&lift));
        let triv = h.preimage(&PermGroup::trivial(2)).unwrap();
        assert!(triv.same_group(&k));
    }

    #[test]
    fn sign_map_kernel() {
        let s3 = PermGroup::symmetric(3);
        let sign = TrackedHom::from_fn(s3, 2, |g| if g.is_even() { Perm::identity(2) } else { p(2, "(0 1)") }).unwrap();
        assert_eq!(sign.kernel().order(), BigUint::from(3u32));
        let id = TrackedHom::identity(PermGroup::symmetric(4));
        assert!(id.kernel().is_trivial());
    }

    #[test]
    fn rejects_non_homomorphism() {
        let c3 = PermGroup::new(3, vec![p(3, "(0 1 2)")]).unwrap();
        let bad = TrackedHom::new(c3, 2, vec![p(2, "(0 1)")]).unwrap();
        assert_eq!(bad.verify().unwrap_err(), Error::NotHomomorphism);
    }

    #[test]
    fn multiplicative_on_random_words() {
        let s5 = PermGroup::symmetric(5);
        // action on the 10 unordered pairs
        let pairs: Vec<(usize, usize)> = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
        let idx = |a: usize, b: usize| pairs.iter().position(|&q| q == (a.min(b), a.max(b))).unwrap();
        let act = |g: &Perm| Perm::from_images(pairs.iter().map(|&(a, b)| idx(g.apply(a), g.apply(b))).collect()).unwrap();
        let hom = TrackedHom::from_fn(s5.clone(), 10, act).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let g = s5.random_element(&mut rng);
            let h = s5.random_element(&mut rng);
            assert_eq!(hom.eval(&g.then(&h)).unwrap(), hom.eval(&g).unwrap().then(&hom.eval(&h).unwrap()));
            assert_eq!(hom.eval(&g.inverse()).unwrap(), hom.eval(&g).unwrap().inverse());
            assert_eq!(hom.eval(&g).unwrap(), act(&g));
            let _ = rng.gen::<u8>();
        }
    }
}
