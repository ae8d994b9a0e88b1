//! Trivial, large product and semiflexible extensions of realized
//! arrangements, with exact checks of their characteristic-polynomial
//! recurrences.
//!
//! Element order is preserved: a large product extension appends the
//! extension hyperplanes direction by direction, and the semiflexible element
//! `e'` takes the index of `e`.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arrangement::{Arrangement, IntersectionPoset, Subspace};
use crate::error::{Error, Result};
pub use crate::exactnum::Residual;
use crate::exactnum::{q, serde_rational, Poly, Rational};
use crate::limits::Limits;
use crate::linalg::Rref;

/// Entries of sampled integer vectors are uniform in `[−BOUND, BOUND]`.
pub const BOUND: i64 = 10_000;
/// Resampling attempts before genericity is declared unattainable.
pub const MAX_RETRIES: usize = 50;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExtensionKind {
    Trivial {
        l: usize,
    },
    LargeProduct {
        k: usize,
        h: usize,
    },
    Semiflexible {
        k: usize,
        h: usize,
        e: usize,
    },
    Composite {
        k: usize,
        h: usize,
        l: usize,
        order: Vec<usize>,
    },
}

/// Everything needed to replay an extension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionRecord {
    pub kind: ExtensionKind,
    pub seed: u64,
    #[serde(with = "serde_rational::matrix")]
    pub directions: Vec<Vec<Rational>>,
    #[serde(with = "serde_rational::matrix")]
    pub hyperplane_offsets: Vec<Vec<Rational>>,
    /// Normals of the semiflexible element.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_matrix")]
    pub flex_subspace: Option<Vec<Vec<Rational>>>,
    /// Samples rejected by the genericity certificate.
    pub rejected: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub steps: Vec<ExtensionRecord>,
}

mod opt_matrix {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        v: &Option<Vec<Vec<Rational>>>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct W<'a>(#[serde(with = "serde_rational::matrix")] &'a Vec<Vec<Rational>>);
        v.as_ref().map(W).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Vec<Vec<Rational>>>, D::Error> {
        #[derive(Deserialize)]
        struct W(#[serde(with = "serde_rational::matrix")] Vec<Vec<Rational>>);
        Ok(Option::<W>::deserialize(d)?.map(|w| w.0))
    }
}

impl ExtensionRecord {
    fn new(kind: ExtensionKind, seed: u64) -> Self {
        ExtensionRecord {
            kind,
            seed,
            directions: Vec::new(),
            hyperplane_offsets: Vec::new(),
            flex_subspace: None,
            rejected: 0,
            steps: Vec::new(),
        }
    }
}

/// `T_ℓ(A) = {H × R^ℓ}`.
pub fn trivial_ext(a: &Arrangement, l: usize) -> Arrangement {
    a.extend_trivially(l)
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    (0..n)
        .map(|_| q(rng.random_range(-BOUND..=BOUND)))
        .collect()
}

/// Whether `{s·x = j : j = 1..h}` is transverse to every node: each node of
/// positive dimension is cut in codimension one more, and no point lies on
/// a new hyperplane.
fn direction_is_generic(poset: &IntersectionPoset, hyperplanes: &[Subspace]) -> bool {
    poset.nodes.iter().all(|node| {
        hyperplanes.iter().all(|s| match node.flat.intersect(s) {
            Some(y) => y.codim() == node.flat.codim() + 1,
            None => node.flat.dim() == 0,
        })
    })
}

fn add_directions(
    a: &mut Arrangement,
    k: usize,
    h: usize,
    rng: &mut ChaCha8Rng,
    limits: &Limits,
    record: &mut ExtensionRecord,
) -> Result<()> {
    let dim = a.ambient();
    for _ in 0..k {
        let poset = a.intersection_poset(limits)?;
        let mut accepted = None;
        for _ in 0..MAX_RETRIES {
            let s = random_vector(rng, dim);
            if s.iter().all(Zero::is_zero) {
                record.rejected += 1;
                continue;
            }
            let planes: Vec<Subspace> = (1..=h as i64)
                .map(|j| Subspace::hyperplane(&s, q(j)))
                .collect::<Result<_>>()?;
            if direction_is_generic(&poset, &planes) {
                accepted = Some((s, planes));
                break;
            }
            record.rejected += 1;
        }
        let Some((s, planes)) = accepted else {
            return Err(Error::Genericity(format!(
                "no generic extension direction after {MAX_RETRIES} attempts"
            )));
        };
        for p in planes {
            a.push(p)?;
        }
        record.directions.push(s);
        record
            .hyperplane_offsets
            .push((1..=h as i64).map(q).collect());
    }
    Ok(())
}

/// `Pr_{k,h}(A)`: trivially extend by `k`, then add `h` parallel affine
/// hyperplanes `s_i·x = 1, …, h` for each of `k` certified-generic directions.
pub fn large_product_ext(
    a: &Arrangement,
    k: usize,
    h: usize,
    seed: u64,
    limits: &Limits,
) -> Result<(Arrangement, ExtensionRecord)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut record = ExtensionRecord::new(ExtensionKind::LargeProduct { k, h }, seed);
    let out = large_product_with(a, k, h, &mut rng, limits, &mut record)?;
    Ok((out, record))
}

fn large_product_with(
    a: &Arrangement,
    k: usize,
    h: usize,
    rng: &mut ChaCha8Rng,
    limits: &Limits,
    record: &mut ExtensionRecord,
) -> Result<Arrangement> {
    if k > 0 && h == 0 {
        return Err(Error::Input("h must be at least 1".into()));
    }
    let mut out = a.extend_trivially(k);
    add_directions(&mut out, k, h, rng, limits, record)?;
    Ok(out)
}

/// Certificate for the semiflexible element `flex`, whose normal space lies in
/// `W`: for each node `X`, the codimension grows by the generic amount
/// `g = min(c, rank(N_X + W) − codim X)`; when `g = 0` the node must lie in
/// `W^⊥`, and emptiness is only allowed when `g < c`.
fn flex_is_generic(
    poset: &IntersectionPoset,
    flex: &Subspace,
    w: &[Vec<Rational>],
    w_perp: &Subspace,
) -> bool {
    let c = flex.codim();
    poset.nodes.iter().all(|node| {
        let x = &node.flat;
        let mut span = Rref::from_rows(&x.normals());
        for v in w {
            span.push(v);
        }
        let g = c.min(span.rank() - x.codim());
        match x.intersect(flex) {
            Some(y) => y.codim() - x.codim() == g && (g > 0 || w_perp.contains(x)),
            None => g < c,
        }
    })
}

/// `Sf_{k,h}(A, e)`: the large product extension with `H_e` replaced by a
/// linear subspace whose normal space is a generic `c`-dimensional subspace of
/// `span(N_e ∪ {s_1, …, s_k})`.
pub fn semiflexible_ext(
    a: &Arrangement,
    e: usize,
    k: usize,
    h: usize,
    seed: u64,
    limits: &Limits,
) -> Result<(Arrangement, ExtensionRecord)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut record = ExtensionRecord::new(ExtensionKind::Semiflexible { k, h, e }, seed);
    let out = semiflexible_with(a, e, k, h, &mut rng, limits, &mut record)?;
    Ok((out, record))
}

fn semiflexible_with(
    a: &Arrangement,
    e: usize,
    k: usize,
    h: usize,
    rng: &mut ChaCha8Rng,
    limits: &Limits,
    record: &mut ExtensionRecord,
) -> Result<Arrangement> {
    let he = a
        .elements()
        .get(e)
        .ok_or_else(|| Error::Input(format!("no element {e} in arrangement of {}", a.len())))?;
    if !he.is_central() {
        return Err(Error::Precondition(
            "the distinguished element must be linear".into(),
        ));
    }
    let c = he.codim();
    let mut out = large_product_with(a, k, h, rng, limits, record)?;
    let dim = out.ambient();
    let mut w: Vec<Vec<Rational>> = out.elements()[e].normals();
    w.extend(
        record.directions[record.directions.len() - k..]
            .iter()
            .cloned(),
    );
    if k == 0 {
        record.flex_subspace = Some(out.elements()[e].normals());
        return Ok(out);
    }
    let w_perp = Subspace::linear_with_normals(dim, &w);
    let mut rest = out.clone();
    let rest_elems: Vec<Subspace> = out
        .elements()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != e)
        .map(|(_, s)| s.clone())
        .collect();
    rest = rest.with_elements(rest_elems, dim)?;
    let poset = rest.intersection_poset(limits)?;
    for _ in 0..MAX_RETRIES {
        let normals: Vec<Vec<Rational>> = (0..c)
            .map(|_| {
                let coeffs = random_vector(rng, w.len());
                (0..dim)
                    .map(|j| {
                        w.iter()
                            .zip(&coeffs)
                            .map(|(v, t)| &v[j] * t)
                            .sum::<Rational>()
                    })
                    .collect()
            })
            .collect();
        let flex = Subspace::linear_with_normals(dim, &normals);
        if flex.codim() == c && flex_is_generic(&poset, &flex, &w, &w_perp) {
            out.replace(e, flex)?;
            record.flex_subspace = Some(normals);
            return Ok(out);
        }
        record.rejected += 1;
    }
    Err(Error::Genericity(format!(
        "no generic semiflexible element after {MAX_RETRIES} attempts"
    )))
}

/// `Sf_{k,h,ℓ}(A, e_1, …, e_n)`: semiflexible extension at each element of
/// `order` in turn, each followed by `T_ℓ`.
pub fn composite_sfe(
    a: &Arrangement,
    order: &[usize],
    k: usize,
    h: usize,
    l: usize,
    seed: u64,
    limits: &Limits,
) -> Result<(Arrangement, ExtensionRecord)> {
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..a.len()).collect::<Vec<_>>() {
        return Err(Error::Input(
            "order must be a permutation of the elements".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut record = ExtensionRecord::new(
        ExtensionKind::Composite {
            k,
            h,
            l,
            order: order.to_vec(),
        },
        seed,
    );
    let mut cur = a.clone();
    for &e in order {
        let mut step = ExtensionRecord::new(ExtensionKind::Semiflexible { k, h, e }, seed);
        cur = semiflexible_with(&cur, e, k, h, &mut rng, limits, &mut step)?.extend_trivially(l);
        record.rejected += step.rejected;
        record.steps.push(step);
    }
    Ok((cur, record))
}

/// `Pr_{k,h,ℓ}(Sf_{k',h,ℓ}(A, 0, …, n−1))`, the right-hand sides of the
/// semiflexible deletion/contraction isomorphisms.
pub fn product_of_composite(
    a: &Arrangement,
    k_inner: usize,
    k: usize,
    h: usize,
    l: usize,
    seed: u64,
    limits: &Limits,
) -> Result<Arrangement> {
    let order: Vec<usize> = (0..a.len()).collect();
    let (inner, _) = composite_sfe(a, &order, k_inner, h, l, seed, limits)?;
    let (outer, _) = large_product_ext(&inner, k, h, seed.wrapping_add(1), limits)?;
    Ok(outer.extend_trivially(l))
}

fn require_hyperplanes(a: &Arrangement) -> Result<()> {
    if a.elements().iter().any(|s| s.codim() != 1) {
        return Err(Error::Precondition(
            "the recurrence checks need a hyperplane arrangement".into(),
        ));
    }
    Ok(())
}

/// Independent seed for the right-hand side sample.
fn rhs_seed(seed: u64) -> u64 {
    seed ^ 0x0005_eed0_fa11_5eed
}

/// `ψ(Pr_{k,h}(A)) − (λ + h)·ψ(Pr_{k−1,h}(A))`, the two sides sampled independently.
pub fn verify_large_product(
    a: &Arrangement,
    k: usize,
    h: usize,
    seed: u64,
    limits: &Limits,
) -> Result<Residual> {
    require_hyperplanes(a)?;
    if k == 0 {
        return Err(Error::Input("k must be at least 1".into()));
    }
    let (big, _) = large_product_ext(a, k, h, seed, limits)?;
    let (small, _) = large_product_ext(a, k - 1, h, rhs_seed(seed), limits)?;
    let lhs = big.psi(limits)?;
    let rhs = &Poly::linear(q(h as i64)) * &small.psi(limits)?;
    Ok(Residual::new(lhs, rhs))
}

/// Both readings of the semiflexible recurrence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemiflexReport {
    /// `ψ(Sf_k) − [h ψ(Sf_{k−1}) + λ ψ(Pr_{k−1}(A/e)) + λ ψ(Pr_{k−1}(A∖e))]`:
    /// the three-term recurrence, with the last two terms lifted by one trivial
    /// dimension so all three terms live in `R^{d+k}`.
    pub three_term: Residual,
    /// `ψ(Sf_k) − [Σ_j ψ(Sf_k / S_{k,j}) + (λ + 1) ψ(Pr_{k−1}(A∖e))]`, which
    /// follows from deletion-contraction on the `h` hyperplanes of `s_k` and
    /// then on `e'`.
    pub derived: Residual,
    /// Whether `Sf_k / S_{k,1}` has the intersection poset of `Sf_{k−1}`.
    pub contraction_is_previous: bool,
}

/// Checks the semiflexible recurrence for the distinguished element `e`.
pub fn verify_semiflexible(
    a: &Arrangement,
    e: usize,
    k: usize,
    h: usize,
    seed: u64,
    limits: &Limits,
) -> Result<SemiflexReport> {
    require_hyperplanes(a)?;
    if k == 0 {
        return Err(Error::Input("k must be at least 1".into()));
    }
    let (sf, _) = semiflexible_ext(a, e, k, h, seed, limits)?;
    let (sf_prev, _) = semiflexible_ext(a, e, k - 1, h, rhs_seed(seed), limits)?;
    let (del, con) = a.delete_contract(e)?;
    let (pr_del, _) = large_product_ext(&del, k - 1, h, rhs_seed(seed) ^ 1, limits)?;
    let (pr_con, _) = large_product_ext(&con, k - 1, h, rhs_seed(seed) ^ 2, limits)?;
    let lhs = sf.psi(limits)?;
    let prev_poset = sf_prev.intersection_poset(limits)?;
    let first = prev_poset.char_poly().absolute.scale(&q(h as i64));
    let psi_del = pr_del.psi(limits)?;
    let psi_con = pr_con.psi(limits)?;
    let three_term = &first + &(&psi_con + &psi_del).shift(1);
    let last = a.len() + (k - 1) * h;
    let mut contractions = Poly::zero();
    let mut contraction_is_previous = true;
    for j in last..last + h {
        let poset = sf.contract(j)?.intersection_poset(limits)?;
        contraction_is_previous &= poset.is_isomorphic(&prev_poset);
        contractions = &contractions + &poset.char_poly().absolute;
    }
    let derived = &contractions + &(&Poly::linear(q(1)) * &psi_del);
    Ok(SemiflexReport {
        three_term: Residual::new(lhs.clone(), three_term),
        derived: Residual::new(lhs, derived),
        contraction_is_previous,
    })
}

/// One row of the flexible-limit table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlexLimitRow {
    pub h: usize,
    /// Coefficients of `ψ(Sf_{k,h}(A,e)) / h^k`, increasing powers.
    #[serde(with = "serde_rational::vec")]
    pub normalized: Vec<Rational>,
    /// `|normalized_i − [ψ(A)]_i|`.
    #[serde(with = "serde_rational::vec")]
    pub deviation: Vec<Rational>,
}

/// `ψ(Sf_{k,h}(A,e)) / h^k` against `ψ(A)` for each `h`.
pub fn flex_limit_probe(
    a: &Arrangement,
    e: usize,
    k: usize,
    hs: &[usize],
    seed: u64,
    limits: &Limits,
) -> Result<Vec<FlexLimitRow>> {
    let target = a.psi(limits)?;
    hs.iter()
        .map(|&h| {
            if h == 0 {
                return Err(Error::Input("h must be at least 1".into()));
            }
            let (sf, _) = semiflexible_ext(a, e, k, h, seed, limits)?;
            let hk = q(h as i64).pow(k as i32);
            let normalized = sf.psi(limits)?.scale(&hk.recip());
            let len = (normalized.coeffs().len()).max(target.coeffs().len());
            let deviation = (0..len)
                .map(|i| (normalized.coeff(i) - target.coeff(i)).abs())
                .collect();
            let mut coeffs = normalized.coeffs().to_vec();
            coeffs.resize(len, Rational::zero());
            Ok(FlexLimitRow {
                h,
                normalized: coeffs,
                deviation,
            })
        })
        .collect()
}

/// Outcome of the semiflexible deletion/contraction isomorphism checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SfeMinorReport {
    pub composite_nodes: usize,
    /// `Sf(A, e_1..e_n) ∖ e'_n ≅ Pr_{k,h,ℓ}(Sf_{k',h,ℓ}(A ∖ e_n, …))` for `k' = k` and `k' = k − 1`.
    pub delete_same_k: bool,
    pub delete_k_minus_1: bool,
    /// `Sf(A, e_1..e_n) / e'_n ≅ Pr_{k,h,ℓ}(Sf_{k',h,ℓ}(A / e_n, …))` for `k' = k` and `k' = k − 1`.
    pub contract_same_k: bool,
    pub contract_k_minus_1: bool,
}

/// Compares intersection posets of the minors of the composite at its last
/// semiflexible element with the large-product-of-composite arrangements.
pub fn sfe_minor_check(
    a: &Arrangement,
    k: usize,
    h: usize,
    l: usize,
    seed: u64,
    limits: &Limits,
) -> Result<SfeMinorReport> {
    if a.is_empty() || k == 0 {
        return Err(Error::Input("need a nonempty arrangement and k ≥ 1".into()));
    }
    let n = a.len();
    let order: Vec<usize> = (0..n).collect();
    let (comp, _) = composite_sfe(a, &order, k, h, l, seed, limits)?;
    let composite_nodes = comp.intersection_poset(limits)?.len();
    let (del, con) = comp.delete_contract(n - 1)?;
    let (a_del, a_con) = a.delete_contract(n - 1)?;
    let iso = |x: &Arrangement, base: &Arrangement, kk: usize| -> Result<bool> {
        let y = product_of_composite(base, kk, k, h, l, rhs_seed(seed), limits)?;
        if x.ambient() != y.ambient() || x.len() != y.len() {
            return Ok(false);
        }
        Ok(x.intersection_poset(limits)?
            .is_isomorphic(&y.intersection_poset(limits)?))
    };
    Ok(SfeMinorReport {
        composite_nodes,
        delete_same_k: iso(&del, &a_del, k)?,
        delete_k_minus_1: iso(&del, &a_del, k - 1)?,
        contract_same_k: iso(&con, &a_con, k)?,
        contract_k_minus_1: iso(&con, &a_con, k - 1)?,
    })
}

/// Rank function `S ↦ codim(∩_{i∈S} H_i)/c` on the first `n` elements of a
/// composite (its semiflexible elements), as a rank table.
pub fn semiflexible_ranks(composite: &Arrangement, n: usize, c: usize) -> Result<Vec<usize>> {
    if n > composite.len() || n > 20 {
        return Err(Error::Input("too many semiflexible elements".into()));
    }
    (0..1u64 << n)
        .map(|s| {
            let mut x = Subspace::whole(composite.ambient());
            for i in (0..n).filter(|i| s >> i & 1 == 1) {
                x = x.intersect(&composite.elements()[i]).ok_or_else(|| {
                    Error::Precondition("semiflexible elements must be linear".into())
                })?;
            }
            Ok(x.codim() / c)
        })
        .collect()
}

/// Whether any coefficient is negative (the absolute polynomials never are).
pub fn has_negative_coefficient(p: &Poly) -> bool {
    p.coeffs().iter().any(|c| c.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::catalog;

    fn lim() -> Limits {
        Limits::default()
    }

    fn one_line_r1() -> Arrangement {
        Arrangement::central_hyperplanes(&[vec![1]]).unwrap()
    }

    #[test]
    fn trivial_extension() {
        let b2 = catalog::coordinate(2);
        assert_eq!(trivial_ext(&b2, 0), b2);
        let t = trivial_ext(&b2, 1);
        assert_eq!(t.ambient(), 3);
        let want = &Poly::from_ints(&[0, 1]) * &Poly::from_ints(&[1, 1]).pow(2);
        assert_eq!(t.psi(&lim()).unwrap(), want);
        for l in 0..3 {
            let g = catalog::generic(3, 2);
            assert_eq!(
                trivial_ext(&g, l).psi(&lim()).unwrap(),
                g.psi(&lim()).unwrap().shift(l)
            );
        }
    }

    #[test]
    fn large_product_examples() {
        let (a, rec) = large_product_ext(&one_line_r1(), 1, 2, 3, &lim()).unwrap();
        assert_eq!((a.ambient(), a.len()), (2, 3));
        assert_eq!(a.psi(&lim()).unwrap(), Poly::from_ints(&[2, 3, 1]));
        assert_eq!(rec.directions.len(), 1);
        let (same, _) = large_product_ext(&one_line_r1(), 0, 2, 3, &lim()).unwrap();
        assert_eq!(same, one_line_r1());
        for h in 1..=4 {
            for k in 1..=2 {
                let r = verify_large_product(&catalog::generic(1, 2), k, h, 17, &lim()).unwrap();
                assert!(r.is_zero(), "k={k} h={h}: {}", r.residual);
            }
        }
    }

    #[test]
    fn extensions_are_reproducible() {
        let g = catalog::generic(2, 2);
        let (a, ra) = semiflexible_ext(&g, 0, 1, 2, 99, &lim()).unwrap();
        let (b, rb) = semiflexible_ext(&g, 0, 1, 2, 99, &lim()).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra, rb);
        let json = serde_json::to_string(&ra).unwrap();
        let back: ExtensionRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, ra);
    }

    #[test]
    fn semiflexible_examples() {
        let g = catalog::generic(2, 2);
        let (k0, _) = semiflexible_ext(&g, 1, 0, 3, 5, &lim()).unwrap();
        assert_eq!(k0, g);
        for h in 1..=3 {
            for e in 0..2 {
                let r = verify_semiflexible(&g, e, 1, h, 11, &lim()).unwrap();
                assert!(r.three_term.is_zero(), "h={h}: {}", r.three_term.residual);
                assert!(r.derived.is_zero());
                assert!(r.contraction_is_previous);
            }
        }
        let three = catalog::generic(3, 2);
        let r = verify_semiflexible(&three, 0, 1, 2, 11, &lim()).unwrap();
        assert!(r.derived.is_zero());
        assert!(!r.three_term.is_zero());
        assert!(!r.contraction_is_previous);
    }

    #[test]
    fn semiflexible_codim_two() {
        let planes = catalog::transverse_planes_r4();
        let (sf, rec) = semiflexible_ext(&planes, 0, 1, 2, 4, &lim()).unwrap();
        assert_eq!((sf.ambient(), sf.len()), (5, 5));
        assert_eq!(sf.elements()[0].codim(), 2);
        assert_eq!(rec.flex_subspace.unwrap().len(), 2);
    }

    #[test]
    fn composite_counts() {
        let (c, _) = composite_sfe(&one_line_r1(), &[0], 1, 1, 0, 1, &lim()).unwrap();
        assert_eq!((c.ambient(), c.len()), (2, 2));
        let g = catalog::generic(2, 2);
        let (c, rec) = composite_sfe(&g, &[1, 0], 1, 2, 1, 1, &lim()).unwrap();
        assert_eq!((c.ambient(), c.len()), (2 + 2 * 2, 2 + 2 * 2));
        assert_eq!(rec.steps.len(), 2);
        assert!(composite_sfe(&g, &[0, 0], 1, 2, 1, 1, &lim()).is_err());
    }

    #[test]
    fn flex_limit_table() {
        let g = catalog::generic(2, 2);
        let rows = flex_limit_probe(&g, 0, 1, &[4, 16], 3, &lim()).unwrap();
        for i in 0..rows[0].deviation.len() {
            let (a, b) = (&rows[0].deviation[i], &rows[1].deviation[i]);
            assert!(b < a || (a.is_zero() && b.is_zero()));
        }
        let rows = flex_limit_probe(&g, 0, 0, &[4, 16], 3, &lim()).unwrap();
        assert!(rows.iter().all(|r| r.deviation.iter().all(Zero::is_zero)));
    }
}
