//! Exact subspace arrangements (central or affine), intersection posets,
//! c-arrangement recognition, characteristic polynomials and
//! deletion/contraction.
//!
//! A [`Subspace`] is stored as the reduced row-echelon form of its defining
//! system `[N | b]` (rows `n·x = b`). The RREF of a consistent system is
//! unique, so it doubles as an exact canonical key for deduplication.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{q, serde_rational, Poly, Rational, Residual};
use crate::limits::Limits;
use crate::linalg::{dot, integer_rows, IntRref, Rref};
use crate::matroid::Matroid;

/// An affine subspace of `R^ambient`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    /// Rows of width `ambient + 1`; pivots are all `< ambient`.
    eqs: IntRref,
}

impl Subspace {
    pub fn whole(ambient: usize) -> Self {
        Subspace {
            ambient,
            eqs: IntRref::default(),
        }
    }

    /// `{x : normals · x = rhs}`; `None` when the system is inconsistent.
    pub fn from_equations(
        ambient: usize,
        normals: &[Vec<Rational>],
        rhs: &[Rational],
    ) -> Option<Self> {
        assert_eq!(normals.len(), rhs.len());
        let rows: Vec<Vec<Rational>> = normals
            .iter()
            .zip(rhs)
            .map(|(n, b)| {
                assert_eq!(n.len(), ambient, "normal has wrong length");
                let mut row = n.clone();
                row.push(b.clone());
                row
            })
            .collect();
        let mut s = Subspace::whole(ambient);
        for row in integer_rows(&rows) {
            if !s.add_equation(&row) {
                return None;
            }
        }
        Some(s)
    }

    /// Hyperplane `normal · x = value`.
    pub fn hyperplane(normal: &[Rational], value: Rational) -> Result<Self> {
        if normal.iter().all(Zero::is_zero) {
            return Err(Error::Input("hyperplane normal is zero".into()));
        }
        Ok(
            Subspace::from_equations(normal.len(), &[normal.to_vec()], &[value])
                .expect("consistent"),
        )
    }

    pub fn hyperplane_int(normal: &[i64], value: i64) -> Result<Self> {
        let n: Vec<Rational> = normal.iter().map(|&x| q(x)).collect();
        Subspace::hyperplane(&n, q(value))
    }

    /// Linear subspace with the given normal vectors (orthogonal complement of their span).
    pub fn linear_with_normals(ambient: usize, normals: &[Vec<Rational>]) -> Self {
        let zeros = vec![Rational::zero(); normals.len()];
        Subspace::from_equations(ambient, normals, &zeros)
            .expect("homogeneous systems are consistent")
    }

    /// `offset + rowspan(basis)`.
    pub fn from_basis(
        ambient: usize,
        basis: &[Vec<Rational>],
        offset: &[Rational],
    ) -> Result<Self> {
        if offset.len() != ambient || basis.iter().any(|b| b.len() != ambient) {
            return Err(Error::Input(
                "subspace basis/offset have wrong length".into(),
            ));
        }
        let span = Rref::from_rows(basis);
        if span.rank() != basis.len() {
            return Err(Error::Input(
                "subspace basis rows are linearly dependent".into(),
            ));
        }
        let normals = span.nullspace(ambient);
        let rhs: Vec<Rational> = normals.iter().map(|n| dot(n, offset)).collect();
        Ok(Subspace::from_equations(ambient, &normals, &rhs).expect("consistent"))
    }

    /// Adds `row = [n | b]`; returns `false` when the system became inconsistent.
    fn add_equation(&mut self, row: &[BigInt]) -> bool {
        !matches!(self.eqs.push(row), Some(p) if p == self.ambient)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn codim(&self) -> usize {
        self.eqs.rank()
    }

    pub fn dim(&self) -> usize {
        self.ambient - self.codim()
    }

    pub fn is_central(&self) -> bool {
        self.eqs.rows.iter().all(|r| r[self.ambient].is_zero())
    }

    /// Canonical equation rows `[n | b]`, each scaled to a unit pivot.
    pub fn equations(&self) -> Vec<Vec<Rational>> {
        self.eqs.to_rational().rows
    }

    /// Canonical equation rows as primitive integer vectors.
    pub fn integer_equations(&self) -> &[Vec<BigInt>] {
        &self.eqs.rows
    }

    /// Normal vectors (rows spanning the orthogonal complement of the linear part).
    pub fn normals(&self) -> Vec<Vec<Rational>> {
        self.equations()
            .into_iter()
            .map(|mut r| {
                r.truncate(self.ambient);
                r
            })
            .collect()
    }

    pub fn rhs(&self) -> Vec<Rational> {
        self.equations()
            .into_iter()
            .map(|r| r[self.ambient].clone())
            .collect()
    }

    /// Echelon basis of the linear part.
    pub fn basis(&self) -> Vec<Vec<Rational>> {
        let normal_part = Rref {
            rows: self.normals(),
            pivots: self.eqs.pivots.clone(),
        };
        normal_part.nullspace(self.ambient)
    }

    /// The point with all free coordinates zero.
    pub fn offset(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.ambient];
        for (row, &p) in self.eqs.rows.iter().zip(&self.eqs.pivots) {
            x[p] = Rational::new(row[self.ambient].clone(), row[p].clone());
        }
        x
    }

    /// `self ∩ other`, `None` when empty.
    pub fn intersect(&self, other: &Subspace) -> Option<Subspace> {
        assert_eq!(self.ambient, other.ambient, "ambient dimensions differ");
        let mut s = self.clone();
        for row in &other.eqs.rows {
            if !s.add_equation(row) {
                return None;
            }
        }
        Some(s)
    }

    /// `Some(None)` when `self ⊆ other`, `Some(Some(self ∩ other))` for a
    /// proper nonempty intersection, `None` when it is empty.
    pub fn meet(&self, other: &Subspace) -> Option<Option<Subspace>> {
        let reduced: Vec<Vec<BigInt>> = other
            .eqs
            .rows
            .iter()
            .map(|r| self.eqs.reduce(r))
            .filter(|r| !r.iter().all(Zero::is_zero))
            .collect();
        if reduced.is_empty() {
            return Some(None);
        }
        let mut s = self.clone();
        for row in &reduced {
            if !s.add_equation(row) {
                return None;
            }
        }
        Some(Some(s))
    }

    /// Whether `other ⊆ self` (`other` assumed nonempty).
    pub fn contains(&self, other: &Subspace) -> bool {
        self.eqs
            .rows
            .iter()
            .all(|r| other.eqs.reduce(r).iter().all(Zero::is_zero))
    }

    pub fn contains_point(&self, x: &[Rational]) -> bool {
        self.eqs.rows.iter().all(|r| {
            let lhs: Rational = r[..self.ambient].iter().zip(x).map(|(a, b)| b * a).sum();
            lhs == Rational::from_integer(r[self.ambient].clone())
        })
    }

    /// `H × R^ℓ ⊂ R^{ambient+ℓ}`.
    pub fn extend_trivially(&self, l: usize) -> Subspace {
        let rows: Vec<Vec<BigInt>> = self
            .eqs
            .rows
            .iter()
            .map(|r| {
                let mut row = r[..self.ambient].to_vec();
                row.extend(std::iter::repeat_n(BigInt::zero(), l));
                row.push(r[self.ambient].clone());
                row
            })
            .collect();
        Subspace {
            ambient: self.ambient + l,
            eqs: IntRref {
                rows,
                pivots: self.eqs.pivots.clone(),
            },
        }
    }

    /// Expresses `other ∩ self` in the affine coordinates `x = offset + tᵀ·basis`
    /// of `self`. `None` when the intersection is empty.
    pub fn restrict(&self, other: &Subspace) -> Option<Subspace> {
        let basis = self.basis();
        let p = self.offset();
        let eqs = other.equations();
        let normals: Vec<Vec<Rational>> = eqs
            .iter()
            .map(|r| basis.iter().map(|b| dot(&r[..other.ambient], b)).collect())
            .collect();
        let rhs: Vec<Rational> = eqs
            .iter()
            .map(|r| &r[other.ambient] - dot(&r[..other.ambient], &p))
            .collect();
        Subspace::from_equations(basis.len(), &normals, &rhs)
    }

    fn to_json(&self) -> SubspaceJson {
        SubspaceJson {
            basis: self.basis(),
            offset: self.offset(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubspaceJson {
    #[serde(with = "serde_rational::matrix")]
    pub basis: Vec<Vec<Rational>>,
    #[serde(with = "serde_rational::vec")]
    pub offset: Vec<Rational>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArrangementJson {
    pub ambient: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<usize>,
    pub subspaces: Vec<SubspaceJson>,
}

/// A finite list of proper subspaces of `R^ambient`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrangement {
    ambient: usize,
    elements: Vec<Subspace>,
    c: Option<usize>,
}

impl Arrangement {
    pub fn new(ambient: usize, elements: Vec<Subspace>, c: Option<usize>) -> Result<Self> {
        for (i, e) in elements.iter().enumerate() {
            if e.ambient() != ambient {
                return Err(Error::Input(format!(
                    "element {i} lives in the wrong dimension"
                )));
            }
            if e.dim() >= ambient {
                return Err(Error::Input(format!("element {i} is the whole space")));
            }
            if let Some(c) = c {
                if e.codim() != c {
                    return Err(Error::Input(format!(
                        "element {i} has codimension {} but c = {c}",
                        e.codim()
                    )));
                }
            }
        }
        Ok(Arrangement {
            ambient,
            elements,
            c,
        })
    }

    pub fn empty(ambient: usize) -> Self {
        Arrangement {
            ambient,
            elements: Vec::new(),
            c: None,
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn elements(&self) -> &[Subspace] {
        &self.elements
    }

    pub fn declared_c(&self) -> Option<usize> {
        self.c
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_central(&self) -> bool {
        self.elements.iter().all(Subspace::is_central)
    }

    /// Hyperplane arrangement from integer normals through the origin.
    pub fn central_hyperplanes(normals: &[Vec<i64>]) -> Result<Self> {
        let d = normals.first().map_or(0, Vec::len);
        let els = normals
            .iter()
            .map(|n| Subspace::hyperplane_int(n, 0))
            .collect::<Result<Vec<_>>>()?;
        Arrangement::new(d, els, Some(1))
    }

    pub fn from_json(j: &ArrangementJson) -> Result<Self> {
        let els = j
            .subspaces
            .iter()
            .map(|s| Subspace::from_basis(j.ambient, &s.basis, &s.offset))
            .collect::<Result<Vec<_>>>()?;
        Arrangement::new(j.ambient, els, j.c)
    }

    pub fn to_json(&self) -> ArrangementJson {
        ArrangementJson {
            ambient: self.ambient,
            c: self.c,
            subspaces: self.elements.iter().map(Subspace::to_json).collect(),
        }
    }

    pub fn with_elements(&self, elements: Vec<Subspace>, ambient: usize) -> Result<Self> {
        let c = self.c.filter(|&c| elements.iter().all(|e| e.codim() == c));
        Arrangement::new(ambient, elements, c)
    }

    pub fn push(&mut self, e: Subspace) -> Result<()> {
        if e.ambient() != self.ambient || e.dim() >= self.ambient {
            return Err(Error::Input("element does not fit the arrangement".into()));
        }
        if self.c.is_some_and(|c| e.codim() != c) {
            self.c = None;
        }
        self.elements.push(e);
        Ok(())
    }

    pub fn replace(&mut self, i: usize, e: Subspace) -> Result<()> {
        if e.ambient() != self.ambient || e.dim() >= self.ambient {
            return Err(Error::Input("element does not fit the arrangement".into()));
        }
        if self.c.is_some_and(|c| e.codim() != c) {
            self.c = None;
        }
        self.elements[i] = e;
        Ok(())
    }

    /// All nonempty intersections, ordered by reverse inclusion, with Möbius values.
    pub fn intersection_poset(&self, limits: &Limits) -> Result<IntersectionPoset> {
        if self.elements.len() > 128 {
            return Err(Error::Resource("more than 128 elements".into()));
        }
        let mut nodes = vec![Subspace::whole(self.ambient)];
        let mut masks = vec![0u128];
        let mut index: HashMap<Subspace, usize> = HashMap::from([(nodes[0].clone(), 0)]);
        for (j, e) in self.elements.iter().enumerate() {
            let current = nodes.len();
            for i in 0..current {
                let Some(y) = nodes[i].meet(e) else {
                    continue;
                };
                let Some(y) = y else {
                    masks[i] |= 1 << j;
                    continue;
                };
                if index.contains_key(&y) {
                    continue;
                }
                // elements containing nodes[i] contain y as well
                let mut m = masks[i] | 1 << j;
                for (t, f) in self.elements[..j].iter().enumerate() {
                    if m >> t & 1 == 0 && f.contains(&y) {
                        m |= 1 << t;
                    }
                }
                index.insert(y.clone(), nodes.len());
                nodes.push(y);
                masks.push(m);
                if nodes.len() > limits.max_poset_nodes {
                    return Err(Error::Resource(format!(
                        "intersection poset exceeds {} nodes",
                        limits.max_poset_nodes
                    )));
                }
            }
        }
        drop(index);
        // stable sort keeps the whole space first
        let mut order: Vec<usize> = (0..nodes.len()).collect();
        order.sort_by_key(|&i| nodes[i].codim());
        let masks: Vec<u128> = order.iter().map(|&i| masks[i]).collect();
        let mut slots: Vec<Option<Subspace>> = nodes.into_iter().map(Some).collect();
        let nodes: Vec<Subspace> = order
            .iter()
            .map(|&i| slots[i].take().expect("each node once"))
            .collect();
        let mut mobius = vec![0i64; nodes.len()];
        mobius[0] = 1;
        for y in 1..nodes.len() {
            let my = masks[y];
            let cy = nodes[y].codim();
            let s: i64 = (0..y)
                .filter(|&x| nodes[x].codim() < cy && masks[x] & !my == 0)
                .map(|x| mobius[x])
                .sum();
            mobius[y] = -s;
        }
        Ok(IntersectionPoset {
            ambient: self.ambient,
            nodes: nodes
                .into_iter()
                .zip(masks)
                .zip(mobius)
                .map(|((flat, mask), mobius)| PosetNode {
                    dim: flat.dim(),
                    flat,
                    mask,
                    mobius,
                })
                .collect(),
        })
    }

    /// `Σ_x μ(x) λ^{dim x}` and `Σ_x |μ(x)| λ^{dim x}`.
    pub fn char_poly(&self, limits: &Limits) -> Result<ArrangementCharPoly> {
        Ok(self.intersection_poset(limits)?.char_poly())
    }

    /// Absolute characteristic polynomial.
    pub fn psi(&self, limits: &Limits) -> Result<Poly> {
        Ok(self.char_poly(limits)?.absolute)
    }

    /// Every element has codimension `c` and every intersection has codimension divisible by `c`.
    pub fn is_c_arrangement(&self, c: usize, limits: &Limits) -> Result<bool> {
        if !self.is_central() {
            return Err(Error::Precondition(
                "c-arrangement check needs a central arrangement".into(),
            ));
        }
        if c == 0 || self.elements.iter().any(|e| e.codim() != c) {
            return Ok(false);
        }
        let poset = self.intersection_poset(limits)?;
        Ok(poset.nodes.iter().all(|n| n.flat.codim() % c == 0))
    }

    /// Matroid with rank function `S ↦ codim(∩S)/c`.
    pub fn matroid(&self, c: usize, limits: &Limits) -> Result<Matroid> {
        if !self.is_c_arrangement(c, limits)? {
            return Err(Error::Precondition(format!("not a {c}-arrangement")));
        }
        let poset = self.intersection_poset(limits)?;
        let n = self.elements.len();
        // ∩S is the largest node contained in every element of S
        Matroid::from_rank_fn(n, limits, |s| {
            let s = s as u128;
            poset
                .nodes
                .iter()
                .filter(|x| x.mask & s == s)
                .map(|x| x.flat.codim())
                .min()
                .expect("central arrangements have a top")
                / c
        })
    }

    /// `A \ H = {H' : H' ⊄ H}`.
    pub fn delete(&self, h: usize) -> Result<Arrangement> {
        let hh = self.element(h)?;
        let els: Vec<Subspace> = self
            .elements
            .iter()
            .filter(|e| !hh.contains(e))
            .cloned()
            .collect();
        self.with_elements(els, self.ambient)
    }

    /// `A / H = {H' ∩ H : H' ∈ A \ H}` in the echelon coordinates of `H`; empty
    /// intersections and duplicates are dropped, as are intersections equal to `H`.
    pub fn contract(&self, h: usize) -> Result<Arrangement> {
        let hh = self.element(h)?;
        let mut seen: HashMap<Subspace, ()> = HashMap::new();
        let mut els = Vec::new();
        for e in self.elements.iter().filter(|e| !hh.contains(e)) {
            if let Some(r) = hh.restrict(e) {
                if r.codim() > 0 && seen.insert(r.clone(), ()).is_none() {
                    els.push(r);
                }
            }
        }
        let c = self.c.filter(|&c| els.iter().all(|e| e.codim() == c));
        Arrangement::new(hh.dim(), els, c)
    }

    pub fn delete_contract(&self, h: usize) -> Result<(Arrangement, Arrangement)> {
        Ok((self.delete(h)?, self.contract(h)?))
    }

    fn element(&self, h: usize) -> Result<&Subspace> {
        self.elements
            .get(h)
            .ok_or_else(|| Error::Input(format!("no element {h} in arrangement of {}", self.len())))
    }

    /// `T_ℓ(A) = {H × R^ℓ}`.
    pub fn extend_trivially(&self, l: usize) -> Arrangement {
        Arrangement {
            ambient: self.ambient + l,
            elements: self
                .elements
                .iter()
                .map(|e| e.extend_trivially(l))
                .collect(),
            c: self.c,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PosetNode {
    pub flat: Subspace,
    pub dim: usize,
    /// Bitmask of the elements containing this node.
    pub mask: u128,
    pub mobius: i64,
}

/// Intersection poset; node 0 is the minimum (the ambient space), nodes are
/// sorted by codimension.
#[derive(Clone, Debug)]
pub struct IntersectionPoset {
    pub ambient: usize,
    pub nodes: Vec<PosetNode>,
}

impl IntersectionPoset {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `x ≤ y` in reverse inclusion, i.e. `y ⊆ x`.
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.nodes[x].mask & !self.nodes[y].mask == 0
    }

    pub fn char_poly(&self) -> ArrangementCharPoly {
        let mut signed = vec![Rational::zero(); self.ambient + 1];
        let mut absolute = vec![Rational::zero(); self.ambient + 1];
        for n in &self.nodes {
            signed[n.dim] += q(n.mobius);
            absolute[n.dim] += q(n.mobius.abs());
        }
        ArrangementCharPoly {
            signed: Poly::new(signed),
            absolute: Poly::new(absolute),
        }
    }

    /// Whether every pair of nodes has a meet and a join among the nodes.
    pub fn is_lattice(&self) -> bool {
        let by_mask: HashMap<u128, usize> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.mask, i))
            .collect();
        for a in 0..self.len() {
            for b in a + 1..self.len() {
                let meet = self.nodes[a].mask & self.nodes[b].mask;
                if !by_mask.contains_key(&meet) {
                    return false;
                }
                let Some(j) = self.nodes[a].flat.intersect(&self.nodes[b].flat) else {
                    return false;
                };
                if !self.nodes.iter().any(|n| n.flat == j) {
                    return false;
                }
            }
        }
        true
    }

    fn signature(&self, i: usize) -> (usize, i64, usize, usize) {
        let below = (0..self.len())
            .filter(|&j| j != i && self.leq(j, i))
            .count();
        let above = (0..self.len())
            .filter(|&j| j != i && self.leq(i, j))
            .count();
        (self.nodes[i].dim, self.nodes[i].mobius, below, above)
    }

    /// Dimension-preserving order isomorphism test by signature-pruned backtracking.
    pub fn is_isomorphic(&self, other: &IntersectionPoset) -> bool {
        let n = self.len();
        if n != other.len() || self.ambient != other.ambient {
            return false;
        }
        let sa: Vec<_> = (0..n).map(|i| self.signature(i)).collect();
        let sb: Vec<_> = (0..n).map(|i| other.signature(i)).collect();
        let mut ha = sa.clone();
        let mut hb = sb.clone();
        ha.sort_unstable();
        hb.sort_unstable();
        if ha != hb {
            return false;
        }
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        self.extend_iso(other, 0, &sa, &sb, &mut map, &mut used)
    }

    fn extend_iso(
        &self,
        other: &IntersectionPoset,
        i: usize,
        sa: &[(usize, i64, usize, usize)],
        sb: &[(usize, i64, usize, usize)],
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if i == self.len() {
            return true;
        }
        for j in 0..other.len() {
            if used[j] || sa[i] != sb[j] {
                continue;
            }
            let ok = (0..i).all(|k| {
                self.leq(k, i) == other.leq(map[k], j) && self.leq(i, k) == other.leq(j, map[k])
            });
            if !ok {
                continue;
            }
            map[i] = j;
            used[j] = true;
            if self.extend_iso(other, i + 1, sa, sb, map, used) {
                return true;
            }
            used[j] = false;
        }
        map[i] = usize::MAX;
        false
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArrangementCharPoly {
    pub signed: Poly,
    pub absolute: Poly,
}

/// `ψ(A)` and `χ(A)` against the matroid polynomials evaluated at `λ^c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CRelation {
    pub c: usize,
    pub ambient: usize,
    pub rank: usize,
    /// `ψ(A) − λ^{d−cr} ψ(M; λ^c)`.
    pub absolute: Residual,
    /// `χ(A) − λ^{d−cr} χ(M; λ^c)`.
    pub signed: Residual,
    /// `ψ(A) − λ^{d−r} ψ(M; λ^c)`, with the rank shift `d − r` in place of `d − cr`.
    pub absolute_rank_shift: Residual,
}

impl CRelation {
    pub fn holds(&self) -> bool {
        self.absolute.is_zero() && self.signed.is_zero()
    }
}

/// Compares the arrangement polynomials with those of its matroid.
pub fn c_relation(a: &Arrangement, c: usize, limits: &Limits) -> Result<CRelation> {
    let m = a.matroid(c, limits)?;
    let mp = m.char_poly(limits)?;
    let r = m.rank();
    let d = a.ambient();
    let cp = a.char_poly(limits)?;
    let shift = d - c * r;
    let psi_m = mp.psi.substitute_power(c);
    let chi_m = mp.chi.substitute_power(c);
    let rank_shifted = if d >= r {
        psi_m.shift(d - r)
    } else {
        Poly::zero()
    };
    Ok(CRelation {
        c,
        ambient: d,
        rank: r,
        absolute: Residual::new(cp.absolute.clone(), psi_m.shift(shift)),
        signed: Residual::new(cp.signed, chi_m.shift(shift)),
        absolute_rank_shift: Residual::new(cp.absolute, rank_shifted),
    })
}

/// `ψ(A) − [ψ(A ∖ H) + ψ(A / H)]`.
pub fn del_contr_residual(a: &Arrangement, h: usize, limits: &Limits) -> Result<Residual> {
    let (del, con) = a.delete_contract(h)?;
    let rhs = &del.psi(limits)? + &con.psi(limits)?;
    Ok(Residual::new(a.psi(limits)?, rhs))
}

/// Named arrangements used by tests, the CLI and experiments.
pub mod catalog {
    use super::*;

    /// The `d` coordinate hyperplanes of `R^d`.
    pub fn coordinate(d: usize) -> Arrangement {
        let normals: Vec<Vec<i64>> = (0..d)
            .map(|i| (0..d).map(|j| i64::from(i == j)).collect())
            .collect();
        Arrangement::central_hyperplanes(&normals).expect("valid")
    }

    /// `n` central hyperplanes in `R^d` with normals on the moment curve
    /// `(1, t, t², …)`, `t = 1..n`; any `d` of them are independent.
    pub fn generic(n: usize, d: usize) -> Arrangement {
        let normals: Vec<Vec<i64>> = (1..=n as i64)
            .map(|t| (0..d as u32).map(|j| t.pow(j)).collect())
            .collect();
        let mut a = Arrangement::central_hyperplanes(&normals).expect("valid");
        a.ambient = d;
        a
    }

    /// Braid arrangement `x_i = x_j` in `R^m` (graphic arrangement of `K_m`).
    pub fn braid(m: usize) -> Arrangement {
        let normals: Vec<Vec<i64>> = (0..m)
            .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
            .map(|(i, j)| {
                (0..m)
                    .map(|k| {
                        if k == i {
                            1
                        } else if k == j {
                            -1
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        Arrangement::central_hyperplanes(&normals).expect("valid")
    }

    fn codim2(rows: &[[i64; 4]; 2]) -> Subspace {
        let n: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| q(x)).collect())
            .collect();
        Subspace::linear_with_normals(4, &n)
    }

    /// Three codimension-2 planes in `R^4` meeting pairwise only at the origin.
    pub fn transverse_planes_r4() -> Arrangement {
        let els = vec![
            codim2(&[[1, 0, 0, 0], [0, 1, 0, 0]]),
            codim2(&[[0, 0, 1, 0], [0, 0, 0, 1]]),
            codim2(&[[1, 0, -1, 0], [0, 1, 0, -1]]),
        ];
        Arrangement::new(4, els, Some(2)).expect("valid")
    }

    /// Two codimension-2 planes in `R^4` meeting in a line.
    pub fn planes_meeting_in_line_r4() -> Arrangement {
        let els = vec![
            codim2(&[[1, 0, 0, 0], [0, 1, 0, 0]]),
            codim2(&[[1, 0, 0, 0], [0, 0, 1, 0]]),
        ];
        Arrangement::new(4, els, Some(2)).expect("valid")
    }

    fn args(name: &str, prefix: &str) -> Option<Vec<usize>> {
        let inner = name
            .strip_prefix(prefix)?
            .strip_prefix('(')?
            .strip_suffix(')')?;
        inner.split(',').map(|s| s.trim().parse().ok()).collect()
    }

    /// `coordinate(d)`, `generic(n,d)`, `braid(m)`, `transverse-planes-r4`,
    /// `planes-meeting-in-line-r4`.
    pub fn by_name(name: &str) -> Result<Arrangement> {
        let name = name.trim();
        match name {
            "transverse-planes-r4" => return Ok(transverse_planes_r4()),
            "planes-meeting-in-line-r4" => return Ok(planes_meeting_in_line_r4()),
            _ => {}
        }
        match (
            args(name, "coordinate"),
            args(name, "generic"),
            args(name, "braid"),
        ) {
            (Some(a), _, _) if a.len() == 1 && a[0] > 0 => Ok(coordinate(a[0])),
            (_, Some(a), _) if a.len() == 2 && a[1] > 0 => Ok(generic(a[0], a[1])),
            (_, _, Some(a)) if a.len() == 1 && a[0] > 1 => Ok(braid(a[0])),
            _ => Err(Error::Input(format!("unknown arrangement name {name:?}"))),
        }
    }
}

/// Whether every entry of an integer-valued polynomial is non-negative.
pub fn has_nonnegative_coeffs(p: &Poly) -> bool {
    p.coeffs().iter().all(|c| !c.is_negative())
}

#[cfg(test)]
mod tests {
    use super::catalog::*;
    use super::*;

    fn lim() -> Limits {
        Limits::default()
    }

    #[test]
    fn poset_examples() {
        let p = coordinate(3).intersection_poset(&lim()).unwrap();
        assert_eq!(p.len(), 8);
        let lines =
            Arrangement::central_hyperplanes(&[vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let p = lines.intersection_poset(&lim()).unwrap();
        assert_eq!(p.len(), 5);
        assert_eq!(p.nodes.last().unwrap().mobius, 2);
        let parallel = Arrangement::new(
            2,
            vec![
                Subspace::hyperplane_int(&[1, 0], 0).unwrap(),
                Subspace::hyperplane_int(&[1, 0], 1).unwrap(),
            ],
            Some(1),
        )
        .unwrap();
        assert_eq!(parallel.intersection_poset(&lim()).unwrap().len(), 3);
    }

    #[test]
    fn c_arrangement_examples() {
        assert!(coordinate(3).is_c_arrangement(1, &lim()).unwrap());
        assert!(transverse_planes_r4().is_c_arrangement(2, &lim()).unwrap());
        assert!(!planes_meeting_in_line_r4()
            .is_c_arrangement(2, &lim())
            .unwrap());
        let affine =
            Arrangement::new(1, vec![Subspace::hyperplane_int(&[1], 1).unwrap()], None).unwrap();
        assert!(affine.is_c_arrangement(1, &lim()).is_err());
    }

    #[test]
    fn matroid_of_examples() {
        let m = coordinate(4).matroid(1, &lim()).unwrap();
        assert!(m.same_rank_function(&Matroid::boolean(4).unwrap()));
        let m = transverse_planes_r4().matroid(2, &lim()).unwrap();
        assert!(m.same_rank_function(&Matroid::uniform(2, 3).unwrap()));
        let single = Arrangement::new(
            4,
            vec![transverse_planes_r4().elements()[0].clone()],
            Some(2),
        )
        .unwrap();
        assert!(single
            .matroid(2, &lim())
            .unwrap()
            .same_rank_function(&Matroid::uniform(1, 1).unwrap()));
        assert!(planes_meeting_in_line_r4().matroid(2, &lim()).is_err());
    }

    #[test]
    fn char_poly_examples() {
        assert_eq!(
            coordinate(3).psi(&lim()).unwrap(),
            Poly::from_ints(&[1, 3, 3, 1])
        );
        let single = Arrangement::central_hyperplanes(&[vec![1, 2]]).unwrap();
        assert_eq!(single.psi(&lim()).unwrap(), Poly::from_ints(&[0, 1, 1]));
        let cp = transverse_planes_r4().char_poly(&lim()).unwrap();
        assert_eq!(cp.absolute, Poly::from_ints(&[2, 0, 3, 0, 1]));
        assert_eq!(cp.signed, Poly::from_ints(&[2, 0, -3, 0, 1]));
    }

    #[test]
    fn delete_contract_examples() {
        let a = coordinate(3);
        let c = a.contract(0).unwrap();
        assert_eq!(c.ambient(), 2);
        assert_eq!(c.psi(&lim()).unwrap(), coordinate(2).psi(&lim()).unwrap());

        // generic hyperplanes restrict to generic hyperplanes
        let g = generic(5, 3);
        let c = g.contract(2).unwrap();
        assert_eq!((c.ambient(), c.len()), (2, 4));
        assert!(c
            .matroid(1, &lim())
            .unwrap()
            .same_rank_function(&Matroid::uniform(2, 4).unwrap()));

        let one = Arrangement::central_hyperplanes(&[vec![1, 1, 1]]).unwrap();
        let d = one.delete(0).unwrap();
        assert!(d.is_empty());
        assert_eq!(d.psi(&lim()).unwrap(), Poly::monomial(q(1), 3));
        assert!(one.delete(1).is_err());
    }

    #[test]
    fn subspace_basis_round_trip() {
        let s = Subspace::from_equations(3, &[vec![q(1), q(1), q(0)]], &[q(2)]).unwrap();
        let back = Subspace::from_basis(3, &s.basis(), &s.offset()).unwrap();
        assert_eq!(s, back);
        assert!(s.contains_point(&s.offset()));
        assert!(
            Subspace::from_basis(2, &[vec![q(1), q(1)], vec![q(2), q(2)]], &[q(0), q(0)]).is_err()
        );
    }

    #[test]
    fn lattice_and_isomorphism() {
        let p = braid(4).intersection_poset(&lim()).unwrap();
        assert!(p.is_lattice());
        let a = coordinate(2).intersection_poset(&lim()).unwrap();
        let b = generic(2, 2).intersection_poset(&lim()).unwrap();
        assert!(a.is_isomorphic(&b));
        let c = generic(3, 2).intersection_poset(&lim()).unwrap();
        assert!(!a.is_isomorphic(&c));
    }

    #[test]
    fn json_round_trip() {
        let a = transverse_planes_r4();
        let j = serde_json::to_string(&a.to_json()).unwrap();
        let back: ArrangementJson = serde_json::from_str(&j).unwrap();
        assert_eq!(Arrangement::from_json(&back).unwrap(), a);
    }

    #[test]
    fn c_relation_and_del_contr() {
        let r = c_relation(&transverse_planes_r4(), 2, &lim()).unwrap();
        assert!(r.holds());
        assert_eq!(r.absolute.lhs, Poly::from_ints(&[2, 0, 3, 0, 1]));
        assert!(!r.absolute_rank_shift.is_zero());
        let b = braid(4);
        for h in 0..b.len() {
            assert!(del_contr_residual(&b, h, &lim()).unwrap().is_zero());
        }
        assert!(by_name("generic(3,2)").unwrap().len() == 3);
        assert!(by_name("braid(1)").is_err());
    }
}
