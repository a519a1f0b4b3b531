//! Join-morphisms of finite semilattices as dense image arrays, the named
//! generators `k_a`, `f_{a,b}`, `e_{a,b}`, residuals, the restriction to
//! `L \ {0}`, the `⊠` of two top-fixing morphisms, and enumeration of the
//! morphism monoids `JM`, `JM1`, `Res`, `Res1`, `Res0`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::order::{BoxClass, BoxProduct, Lattice, OrderError, Semilattice};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorphismError {
    #[error("morphism has {got} images, carrier has {expected} elements")]
    SizeMismatch { expected: usize, got: usize },
    #[error("image {value} out of range for carrier of size {n}")]
    ImageOutOfRange { value: usize, n: usize },
    #[error("map does not preserve joins at ({0}, {1})")]
    NotJoinPreserving(usize, usize),
    #[error("f_(a,b) needs a below the top, got a = {0}")]
    TopIndex(usize),
    #[error("a lattice is required")]
    LatticeRequired,
    #[error("map is not residuated (fails to fix the bottom or preserve joins)")]
    NotResiduated,
    #[error("map sends the nonzero element {0} to the bottom")]
    NotInRes0(usize),
    #[error("map does not fix the top")]
    NotTopPreserving,
    #[error(transparent)]
    Order(#[from] OrderError),
}

/// The five morphism monoids on a finite (semi)lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MorphismClass {
    /// Join-morphisms.
    Jm,
    /// Join-morphisms fixing the top.
    Jm1,
    /// Join-morphisms fixing the bottom (finite residuated maps).
    Res,
    /// Residuated maps fixing the top.
    Res1,
    /// Residuated maps sending only the bottom to the bottom.
    Res0,
}

impl MorphismClass {
    pub fn needs_lattice(self) -> bool {
        matches!(self, Self::Res | Self::Res1 | Self::Res0)
    }
}

/// A self-map of a semilattice carrier, stored as its image sequence.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JoinMorphism {
    image: Vec<usize>,
}

impl fmt::Debug for JoinMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.image)
    }
}

impl fmt::Display for JoinMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.image.iter().map(usize::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

impl JoinMorphism {
    /// Wraps an image sequence without checking join preservation.
    pub fn from_image(image: Vec<usize>) -> Self {
        Self { image }
    }

    /// Checks the image against `l`: size, range and join preservation.
    pub fn new(l: &Semilattice, image: Vec<usize>) -> Result<Self, MorphismError> {
        let f = Self { image };
        f.validate(l)?;
        Ok(f)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            image: (0..n).collect(),
        }
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn into_image(self) -> Vec<usize> {
        self.image
    }

    pub fn size(&self) -> usize {
        self.image.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    pub fn validate(&self, l: &Semilattice) -> Result<(), MorphismError> {
        let n = l.size();
        if self.image.len() != n {
            return Err(MorphismError::SizeMismatch {
                expected: n,
                got: self.image.len(),
            });
        }
        if let Some(&v) = self.image.iter().find(|&&v| v >= n) {
            return Err(MorphismError::ImageOutOfRange { value: v, n });
        }
        for x in 0..n {
            for y in x + 1..n {
                if self.image[l.join(x, y)] != l.join(self.image[x], self.image[y]) {
                    return Err(MorphismError::NotJoinPreserving(x, y));
                }
            }
        }
        Ok(())
    }

    pub fn is_join_morphism(&self, l: &Semilattice) -> bool {
        self.validate(l).is_ok()
    }

    /// Pointwise join.
    pub fn sup(&self, other: &Self, l: &Semilattice) -> Result<Self, MorphismError> {
        self.same_size(other)?;
        Ok(Self {
            image: self
                .image
                .iter()
                .zip(&other.image)
                .map(|(&a, &b)| l.join(a, b))
                .collect(),
        })
    }

    /// `(self ∘ other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Self) -> Result<Self, MorphismError> {
        self.same_size(other)?;
        Ok(Self {
            image: other.image.iter().map(|&y| self.image[y]).collect(),
        })
    }

    /// Pointwise order.
    pub fn leq(&self, other: &Self, l: &Semilattice) -> bool {
        self.image.iter().zip(&other.image).all(|(&a, &b)| l.leq(a, b))
    }

    fn same_size(&self, other: &Self) -> Result<(), MorphismError> {
        if self.image.len() != other.image.len() {
            return Err(MorphismError::SizeMismatch {
                expected: self.image.len(),
                got: other.image.len(),
            });
        }
        Ok(())
    }

    /// Membership in one of the five monoids. Errors when the class needs a
    /// lattice and `l` has no least element.
    pub fn belongs(&self, l: &Semilattice, class: MorphismClass) -> Result<bool, MorphismError> {
        if self.validate(l).is_err() {
            return Ok(false);
        }
        let top = l.top();
        let fixes_top = self.image[top] == top;
        if !class.needs_lattice() {
            return Ok(match class {
                MorphismClass::Jm => true,
                _ => fixes_top,
            });
        }
        let bottom = l.bottom().ok_or(MorphismError::LatticeRequired)?;
        let res = self.image[bottom] == bottom;
        Ok(match class {
            MorphismClass::Res => res,
            MorphismClass::Res1 => res && fixes_top,
            MorphismClass::Res0 => res && (0..l.size()).all(|x| x == bottom || self.image[x] != bottom),
            _ => unreachable!(),
        })
    }

    /// Number of distinct image values.
    pub fn range_size(&self) -> usize {
        let mut v = self.image.clone();
        v.sort_unstable();
        v.dedup();
        v.len()
    }
}

/// `k_a`: constant map to `a`.
pub fn make_k(l: &Semilattice, a: usize) -> JoinMorphism {
    JoinMorphism {
        image: vec![a; l.size()],
    }
}

/// `f_{a,b}`: `b` on the downset of `a`, top elsewhere. Requires `a != 1`.
pub fn make_f(l: &Semilattice, a: usize, b: usize) -> Result<JoinMorphism, MorphismError> {
    let top = l.top();
    if a == top {
        return Err(MorphismError::TopIndex(a));
    }
    Ok(JoinMorphism {
        image: (0..l.size()).map(|x| if l.leq(x, a) { b } else { top }).collect(),
    })
}

/// `e_{a,b}`: bottom on the downset of `a`, `b` elsewhere. Requires a lattice.
pub fn make_e(l: &Semilattice, a: usize, b: usize) -> Result<JoinMorphism, MorphismError> {
    let bottom = l.bottom().ok_or(MorphismError::LatticeRequired)?;
    Ok(JoinMorphism {
        image: (0..l.size()).map(|x| if l.leq(x, a) { bottom } else { b }).collect(),
    })
}

/// The residual `f⁺(y) = ⋁{x | f(x) <= y}`, a join-morphism of the dual
/// lattice on the same carrier.
pub fn residual(k: &Lattice, f: &JoinMorphism) -> Result<JoinMorphism, MorphismError> {
    if !f.belongs(k.semilattice(), MorphismClass::Res)? {
        return Err(MorphismError::NotResiduated);
    }
    let n = k.size();
    Ok(JoinMorphism {
        image: (0..n)
            .map(|y| k.join_all((0..n).filter(|&x| k.leq(f.apply(x), y))))
            .collect(),
    })
}

/// Restriction of `f ∈ Res0(K)` to `K \ {0}`, relabeled as in
/// [`Lattice::remove_bottom`].
pub fn psi_restrict(k: &Lattice, f: &JoinMorphism) -> Result<JoinMorphism, MorphismError> {
    if !f.belongs(k.semilattice(), MorphismClass::Res)? {
        return Err(MorphismError::NotResiduated);
    }
    let bottom = k.bottom();
    if let Some(x) = (0..k.size()).find(|&x| x != bottom && f.apply(x) == bottom) {
        return Err(MorphismError::NotInRes0(x));
    }
    let (_, keep) = k.remove_bottom()?;
    let pos = |v: usize| keep.binary_search(&v).expect("nonzero image");
    Ok(JoinMorphism {
        image: keep.iter().map(|&x| pos(f.apply(x))).collect(),
    })
}

/// `(f ⊠ g)([x, y]) = [f(x), g(y)]` for top-fixing `f`, `g`.
pub fn boxtimes_morphism(bp: &BoxProduct, f: &JoinMorphism, g: &JoinMorphism) -> Result<JoinMorphism, MorphismError> {
    for (m, l) in [(f, &bp.left), (g, &bp.right)] {
        if !m.belongs(l, MorphismClass::Jm1)? {
            m.validate(l)?;
            return Err(MorphismError::NotTopPreserving);
        }
    }
    Ok(JoinMorphism {
        image: bp
            .classes
            .iter()
            .map(|c| match c {
                BoxClass::Pair(x, y) => bp.class(f.apply(*x), g.apply(*y)),
                BoxClass::Merged => bp.merged(),
            })
            .collect(),
    })
}

/// All members of a morphism class on `l`, in lexicographic order of images.
///
/// Images are chosen on join-irreducible elements only (they generate `l`
/// under joins) and extended; candidates that fail to preserve joins are
/// dropped.
pub fn enumerate_morphisms(l: &Semilattice, class: MorphismClass) -> Result<Vec<JoinMorphism>, MorphismError> {
    if class.needs_lattice() && !l.is_lattice() {
        return Err(MorphismError::LatticeRequired);
    }
    let n = l.size();
    let mut irr = l.join_irreducibles();
    irr.sort_by_key(|&x| l.downset(x).len());
    let below: Vec<Vec<usize>> = (0..n)
        .map(|x| irr.iter().copied().filter(|&j| l.leq(j, x)).collect())
        .collect();

    let mut out = Vec::new();
    let mut choice = vec![usize::MAX; n];
    fn rec(
        k: usize,
        irr: &[usize],
        l: &Semilattice,
        choice: &mut Vec<usize>,
        below: &[Vec<usize>],
        class: MorphismClass,
        out: &mut Vec<JoinMorphism>,
    ) {
        let n = l.size();
        if k == irr.len() {
            let image: Vec<usize> = (0..n)
                .map(|x| l.join_all(below[x].iter().map(|&j| choice[j])).expect("nonempty"))
                .collect();
            let f = JoinMorphism { image };
            if f.belongs(l, class).unwrap_or(false) {
                out.push(f);
            }
            return;
        }
        let j = irr[k];
        'cand: for v in 0..n {
            for &i in &irr[..k] {
                if l.leq(i, j) && !l.leq(choice[i], v) {
                    continue 'cand;
                }
            }
            choice[j] = v;
            rec(k + 1, irr, l, choice, below, class, out);
        }
        choice[j] = usize::MAX;
    }
    rec(0, &irr, l, &mut choice, &below, class, &mut out);
    out.sort();
    out.dedup();
    Ok(out)
}

/// A finite set of morphisms closed under `∨` and `∘`, with dense lookup
/// tables. Built for `JM(L)` and used by the search code.
#[derive(Clone, Debug)]
pub struct MorphismMonoid {
    pub semilattice: Semilattice,
    pub maps: Vec<JoinMorphism>,
    index: HashMap<Vec<usize>, u32>,
    sup: Vec<u32>,
    comp: Vec<u32>,
}

impl MorphismMonoid {
    pub fn new(l: &Semilattice, class: MorphismClass) -> Result<Self, MorphismError> {
        let maps = enumerate_morphisms(l, class)?;
        Self::from_maps(l, maps).map(|m| m.expect("morphism classes are closed"))
    }

    /// Tables for an arbitrary set of join-morphisms, sorted and deduplicated.
    /// Returns `None` when the set is not closed under `∨` and `∘`.
    pub fn from_maps(l: &Semilattice, mut maps: Vec<JoinMorphism>) -> Result<Option<Self>, MorphismError> {
        maps.sort();
        maps.dedup();
        for f in &maps {
            f.validate(l)?;
        }
        let index: HashMap<Vec<usize>, u32> = maps
            .iter()
            .enumerate()
            .map(|(i, f)| (f.image.clone(), i as u32))
            .collect();
        let m = maps.len();
        let mut sup = vec![0u32; m * m];
        let mut comp = vec![0u32; m * m];
        for (i, f) in maps.iter().enumerate() {
            for (j, g) in maps.iter().enumerate() {
                let (Some(&si), Some(&ci)) = (index.get(&f.sup(g, l)?.image), index.get(&f.compose(g)?.image)) else {
                    return Ok(None);
                };
                sup[i * m + j] = si;
                comp[i * m + j] = ci;
            }
        }
        Ok(Some(Self {
            semilattice: l.clone(),
            maps,
            index,
            sup,
            comp,
        }))
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn index_of(&self, f: &JoinMorphism) -> Option<usize> {
        self.index.get(&f.image).map(|&i| i as usize)
    }

    #[inline]
    pub fn sup(&self, i: usize, j: usize) -> usize {
        self.sup[i * self.maps.len() + j] as usize
    }

    /// Index of `maps[i] ∘ maps[j]`.
    #[inline]
    pub fn compose(&self, i: usize, j: usize) -> usize {
        self.comp[i * self.maps.len() + j] as usize
    }

    #[inline]
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.sup(i, j) == j
    }
}
