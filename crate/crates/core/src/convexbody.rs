//! Zonotopes and discotopes: intrinsic volumes, Steiner and Wills
//! polynomials, support and distance oracles, and Monte Carlo estimation of
//! intrinsic volumes.
//!
//! A zonotope generator `z` stands for the segment `[−z, z]`, of length `2‖z‖`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::arrangement::Arrangement;
use crate::error::{Error, Result};
use crate::exactnum::{
    format_rational, is_log_concave, is_log_concave_f64, parse_rational, q, q_frac, to_f64,
    LogConcavity, Poly, Rational,
};
use crate::limits::Limits;
use crate::linalg::{self, exact_sqrt};
use crate::matroid::Matroid;
use crate::rng::substream;

/// Volume of the unit `m`-ball.
pub fn kappa(m: usize) -> f64 {
    match m {
        0 => 1.0,
        1 => 2.0,
        _ => kappa(m - 2) * 2.0 * PI / m as f64,
    }
}

fn ln_kappa(m: usize) -> f64 {
    let h = m as f64 / 2.0;
    h * PI.ln() - ln_gamma(h + 1.0)
}

/// Radius of the `m`-ball of volume 1.
pub fn unit_volume_radius(m: usize) -> f64 {
    assert!(m > 0, "a 0-ball has no radius");
    kappa(m).powf(-1.0 / m as f64)
}

pub(crate) fn fdot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn fnorm(a: &[f64]) -> f64 {
    fdot(a, a).sqrt()
}

/// Residual of `v` against an orthonormal family (modified Gram–Schmidt, twice).
fn residual(v: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut r = v.to_vec();
    for _ in 0..2 {
        for q in basis {
            let c = fdot(&r, q);
            for (x, y) in r.iter_mut().zip(q) {
                *x -= c * y;
            }
        }
    }
    r
}

/// Orthonormal basis of the span of `vs`, dropping vectors whose residual is
/// below `tol` times their norm.
pub(crate) fn orthonormalize(vs: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vs {
        let scale = fnorm(v);
        if scale == 0.0 {
            continue;
        }
        let r = residual(v, &basis);
        let n = fnorm(&r);
        if n > tol * scale {
            basis.push(r.iter().map(|x| x / n).collect());
        }
    }
    basis
}

const RANK_TOL: f64 = 1e-10;

fn numeric_rank(vs: &[Vec<f64>]) -> usize {
    orthonormalize(vs, RANK_TOL).len()
}

/// Intrinsic volumes `ν_0, …, ν_d`, with exact values when available.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WillsPoly {
    pub ambient: usize,
    pub nu: Vec<f64>,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "ser_opt_rationals"
    )]
    pub exact: Option<Vec<Rational>>,
}

fn ser_opt_rationals<S: serde::Serializer>(
    v: &Option<Vec<Rational>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let strings: Option<Vec<String>> = v.as_ref().map(|v| v.iter().map(format_rational).collect());
    strings.serialize(s)
}

impl WillsPoly {
    pub fn from_nu(ambient: usize, mut nu: Vec<f64>) -> Self {
        nu.resize(ambient + 1, 0.0);
        WillsPoly {
            ambient,
            nu,
            exact: None,
        }
    }

    /// Coefficients of `W(λ) = Σ_i ν_i λ^{d−i}` in increasing powers of `λ`.
    pub fn wills_coeffs(&self) -> Vec<f64> {
        self.nu.iter().rev().copied().collect()
    }

    /// Exact Wills polynomial, when the intrinsic volumes are exact.
    pub fn wills_exact(&self) -> Option<Poly> {
        self.exact
            .as_ref()
            .map(|e| Poly::new(e.iter().rev().cloned().collect()))
    }

    /// Coefficients of `vol_d(K + λB^d) = Σ_i ν_i κ_{d−i} λ^{d−i}` in increasing powers.
    pub fn steiner_coeffs(&self) -> Vec<f64> {
        let d = self.ambient;
        (0..=d).map(|j| self.nu[d - j] * kappa(j)).collect()
    }

    /// Log-concavity of `(ν_i)` and of `(ν_i κ_{d−i})`; exact when possible.
    pub fn log_concavity(&self, slack: f64) -> Result<(LogConcavity, LogConcavity)> {
        let steiner: Vec<f64> = (0..=self.ambient)
            .map(|i| self.nu[i] * kappa(self.ambient - i))
            .collect();
        let nu = match &self.exact {
            Some(e) => is_log_concave(e)?,
            None => is_log_concave_f64(&self.nu, slack)?,
        };
        Ok((nu, is_log_concave_f64(&steiner, slack)?))
    }
}

/// `Σ_i [−z_i, z_i]`, living in a subspace of dimension `ambient`.
#[derive(Clone, Debug, PartialEq)]
pub struct Zonotope {
    ambient: usize,
    generators: Vec<Vec<f64>>,
    exact: Option<Vec<Vec<Rational>>>,
}

impl Zonotope {
    pub fn new(ambient: usize, generators: Vec<Vec<f64>>) -> Result<Self> {
        if generators.iter().any(|g| g.len() != ambient) {
            return Err(Error::Input(format!(
                "generators must have length {ambient}"
            )));
        }
        if generators.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Input("non-finite generator entry".into()));
        }
        Ok(Zonotope {
            ambient,
            generators,
            exact: None,
        })
    }

    pub fn from_rational(ambient: usize, generators: Vec<Vec<Rational>>) -> Result<Self> {
        if generators.iter().any(|g| g.len() != ambient) {
            return Err(Error::Input(format!(
                "generators must have length {ambient}"
            )));
        }
        Ok(Zonotope {
            ambient,
            generators: generators
                .iter()
                .map(|g| g.iter().map(to_f64).collect())
                .collect(),
            exact: Some(generators),
        })
    }

    /// The unit cube, with generators `e_i / 2`.
    pub fn cube(d: usize) -> Self {
        let gens = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        if i == j {
                            q_frac(1, 2)
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Zonotope::from_rational(d, gens).expect("valid")
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    pub fn exact_generators(&self) -> Option<&[Vec<Rational>]> {
        self.exact.as_deref()
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// `2‖z_i‖`.
    pub fn segment_length(&self, i: usize) -> f64 {
        2.0 * fnorm(&self.generators[i])
    }

    /// Exact segment length, when it is rational.
    pub fn segment_length_exact(&self, i: usize) -> Option<Rational> {
        let g = &self.exact.as_ref()?[i];
        exact_sqrt(&linalg::dot(g, g)).map(|r| r * q(2))
    }

    /// Intrinsic volumes by summing parallelotope volumes over independent subsets.
    pub fn intrinsic_volumes(&self) -> WillsPoly {
        let mut nu = vec![0.0; self.ambient + 1];
        nu[0] = 1.0;
        let scale = self.generators.iter().map(|g| fnorm(g)).fold(0.0, f64::max);
        let mut basis = Vec::new();
        subset_dfs(
            &self.generators,
            0,
            &mut basis,
            1.0,
            &mut nu,
            RANK_TOL * scale,
        );
        WillsPoly {
            ambient: self.ambient,
            nu,
            exact: self.intrinsic_volumes_exact(),
        }
    }

    /// Exact subset-method intrinsic volumes; `None` unless every Gram
    /// determinant is the square of a rational.
    pub fn intrinsic_volumes_exact(&self) -> Option<Vec<Rational>> {
        let gens = self.exact.as_ref()?;
        let mut nu = vec![Rational::zero(); self.ambient + 1];
        nu[0] = Rational::one();
        let mut basis = Vec::new();
        exact_subset_dfs(gens, 0, &mut basis, &Rational::one(), &mut nu)?;
        Some(nu)
    }

    /// Intrinsic volumes by the belt decomposition: one term per flat of the
    /// generator matroid, the volume of the sub-zonotope on that flat.
    pub fn intrinsic_volumes_belt(&self, limits: &Limits) -> Result<WillsPoly> {
        let n = self.len();
        let matroid = match &self.exact {
            Some(gens) => {
                let rows: Vec<Vec<Rational>> = (0..self.ambient)
                    .map(|r| gens.iter().map(|g| g[r].clone()).collect())
                    .collect();
                if n == 0 {
                    Matroid::boolean(0)?
                } else {
                    Matroid::from_matrix(&rows)?.tabulated()?
                }
            }
            None => Matroid::from_rank_fn(n, limits, |s| {
                let vs: Vec<Vec<f64>> = (0..n)
                    .filter(|i| s >> i & 1 == 1)
                    .map(|i| self.generators[i].clone())
                    .collect();
                numeric_rank(&vs)
            })?,
        };
        let lattice = matroid.flats_and_mobius(limits)?;
        let mut nu = vec![0.0; self.ambient + 1];
        let mut exact = self
            .exact
            .as_ref()
            .map(|_| vec![Rational::zero(); self.ambient + 1]);
        for (&flat, &k) in lattice.flats.iter().zip(&lattice.ranks) {
            let members: Vec<usize> = (0..n).filter(|i| flat >> i & 1 == 1).collect();
            let gens: Vec<Vec<f64>> = members
                .iter()
                .map(|&i| self.generators[i].clone())
                .collect();
            nu[k] += volume_recursive(&gens, k);
            if let (Some(acc), Some(all)) = (exact.as_mut(), self.exact.as_ref()) {
                let eg: Vec<Vec<Rational>> = members.iter().map(|&i| all[i].clone()).collect();
                match volume_recursive_exact(&eg, k) {
                    Some(v) => acc[k] += v,
                    None => exact = None,
                }
            }
        }
        Ok(WillsPoly {
            ambient: self.ambient,
            nu,
            exact,
        })
    }

    /// `Z \ i`.
    pub fn delete(&self, i: usize) -> Result<Zonotope> {
        self.check_index(i)?;
        let mut z = self.clone();
        z.generators.remove(i);
        if let Some(e) = z.exact.as_mut() {
            e.remove(i);
        }
        Ok(z)
    }

    /// `Z / i`: the other generators projected onto `z_i^⊥`, one dimension lower.
    pub fn contract(&self, i: usize) -> Result<Zonotope> {
        self.check_index(i)?;
        let zi = &self.generators[i];
        let nn = fdot(zi, zi);
        if nn == 0.0 || self.ambient == 0 {
            return Err(Error::Input(format!("cannot contract zero generator {i}")));
        }
        let generators = self
            .generators
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, g)| {
                let c = fdot(g, zi) / nn;
                g.iter().zip(zi).map(|(x, y)| x - c * y).collect()
            })
            .collect();
        let exact = self.exact.as_ref().map(|all| {
            let zi = &all[i];
            let nn = linalg::dot(zi, zi);
            all.iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, g)| project_out(g, zi, &nn))
                .collect()
        });
        Ok(Zonotope {
            ambient: self.ambient - 1,
            generators,
            exact,
        })
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return Err(Error::Input(format!(
                "no generator {i} among {}",
                self.len()
            )));
        }
        Ok(())
    }

    /// Applies a linear map to every generator (exact data is dropped).
    pub fn transformed(&self, m: &DMatrix<f64>) -> Zonotope {
        let generators = self
            .generators
            .iter()
            .map(|g| (m * DVector::from_column_slice(g)).as_slice().to_vec())
            .collect();
        Zonotope {
            ambient: self.ambient,
            generators,
            exact: None,
        }
    }

    pub fn scaled(&self, t: &Rational) -> Zonotope {
        let tf = to_f64(t);
        Zonotope {
            ambient: self.ambient,
            generators: self
                .generators
                .iter()
                .map(|g| g.iter().map(|x| x * tf).collect())
                .collect(),
            exact: self.exact.as_ref().map(|e| {
                e.iter()
                    .map(|g| g.iter().map(|x| x * t).collect())
                    .collect()
            }),
        }
    }

    pub fn to_json(&self) -> ZonotopeJson {
        let generators = match &self.exact {
            Some(e) => e
                .iter()
                .map(|g| g.iter().map(|x| Entry::Text(format_rational(x))).collect())
                .collect(),
            None => self
                .generators
                .iter()
                .map(|g| g.iter().map(|&x| Entry::Float(x)).collect())
                .collect(),
        };
        ZonotopeJson {
            ambient: self.ambient,
            generators,
        }
    }

    pub fn from_json(j: &ZonotopeJson) -> Result<Self> {
        let exact = j
            .generators
            .iter()
            .flatten()
            .all(|e| !matches!(e, Entry::Float(_)));
        if exact {
            let gens = j
                .generators
                .iter()
                .map(|g| g.iter().map(Entry::rational).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Zonotope::from_rational(j.ambient, gens)
        } else {
            let gens = j
                .generators
                .iter()
                .map(|g| g.iter().map(Entry::float).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Zonotope::new(j.ambient, gens)
        }
    }
}

fn project_out(g: &[Rational], z: &[Rational], zz: &Rational) -> Vec<Rational> {
    let c = linalg::dot(g, z) / zz;
    g.iter().zip(z).map(|(x, y)| x - &c * y).collect()
}

fn subset_dfs(
    gens: &[Vec<f64>],
    start: usize,
    basis: &mut Vec<Vec<f64>>,
    vol: f64,
    nu: &mut [f64],
    tol: f64,
) {
    let depth = basis.len();
    for i in start..gens.len() {
        let r = residual(&gens[i], basis);
        let n = fnorm(&r);
        if n <= tol {
            continue;
        }
        let v = vol * 2.0 * n;
        nu[depth + 1] += v;
        if depth + 1 < nu.len() - 1 {
            basis.push(r.iter().map(|x| x / n).collect());
            subset_dfs(gens, i + 1, basis, v, nu, tol);
            basis.pop();
        }
    }
}

/// `basis` holds unnormalized orthogonal residuals with their squared norms;
/// `det` is the Gram determinant of the doubled generators chosen so far.
fn exact_subset_dfs(
    gens: &[Vec<Rational>],
    start: usize,
    basis: &mut Vec<(Vec<Rational>, Rational)>,
    det: &Rational,
    nu: &mut [Rational],
) -> Option<()> {
    let depth = basis.len();
    for i in start..gens.len() {
        let mut r = gens[i].clone();
        for (b, bb) in basis.iter() {
            r = project_out(&r, b, bb);
        }
        let rr = linalg::dot(&r, &r);
        if rr.is_zero() {
            continue;
        }
        let d = det * &rr * q(4);
        nu[depth + 1] += exact_sqrt(&d)?;
        if depth + 1 < nu.len() - 1 {
            basis.push((r, rr));
            exact_subset_dfs(gens, i + 1, basis, &d, nu)?;
            basis.pop();
        }
    }
    Some(())
}

/// `k`-volume of the zonotope on `gens` (spanning a `k`-space) via
/// `vol(Z) = vol(Z \ g) + 2‖g‖·vol(Z / g)`.
fn volume_recursive(gens: &[Vec<f64>], k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let Some((g, rest)) = gens.split_last() else {
        return 0.0;
    };
    let gg = fdot(g, g);
    if gg.sqrt() <= RANK_TOL {
        return volume_recursive(rest, k);
    }
    let mut total = 0.0;
    if rest.len() >= k && numeric_rank(rest) == k {
        total += volume_recursive(rest, k);
    }
    let projected: Vec<Vec<f64>> = rest
        .iter()
        .map(|v| {
            let c = fdot(v, g) / gg;
            v.iter().zip(g).map(|(x, y)| x - c * y).collect()
        })
        .collect();
    total + 2.0 * gg.sqrt() * volume_recursive(&projected, k - 1)
}

fn volume_recursive_exact(gens: &[Vec<Rational>], k: usize) -> Option<Rational> {
    if k == 0 {
        return Some(Rational::one());
    }
    let Some((g, rest)) = gens.split_last() else {
        return Some(Rational::zero());
    };
    let gg = linalg::dot(g, g);
    if gg.is_zero() {
        return volume_recursive_exact(rest, k);
    }
    let mut total = Rational::zero();
    if rest.len() >= k && linalg::rank(rest) == k {
        total += volume_recursive_exact(rest, k)?;
    }
    let projected: Vec<Vec<Rational>> = rest.iter().map(|v| project_out(v, g, &gg)).collect();
    let len = exact_sqrt(&gg)? * q(2);
    Some(total + len * volume_recursive_exact(&projected, k - 1)?)
}

/// A generator entry in JSON: integer, float, or rational string.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Entry {
    fn rational(&self) -> Result<Rational> {
        match self {
            Entry::Int(i) => Ok(q(*i)),
            Entry::Text(s) => parse_rational(s),
            Entry::Float(_) => unreachable!("checked by caller"),
        }
    }

    fn float(&self) -> Result<f64> {
        match self {
            Entry::Int(i) => Ok(*i as f64),
            Entry::Float(x) => Ok(*x),
            Entry::Text(s) => Ok(to_f64(&parse_rational(s)?)),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZonotopeJson {
    pub ambient: usize,
    pub generators: Vec<Vec<Entry>>,
}

/// Stirling-type normalization `ν_i κ_{n−i} π^{−(n−i)/2} √(πn) (n/2e)^{n/2}`
/// of the Steiner coefficients of `K ⊂ R^n`. With `corrected`, the extra
/// factor `(2/n)^{i/2}` (geometric in `i`, so log-concavity is unaffected)
/// makes the sequence converge to `ν_i`.
pub fn stirling_normalized(nu: &[f64], n: usize, corrected: bool) -> Vec<f64> {
    let nf = n as f64;
    nu.iter()
        .enumerate()
        .map(|(i, &v)| {
            if v == 0.0 {
                return 0.0;
            }
            let m = n - i;
            let mut ln = v.ln() + ln_kappa(m) - m as f64 / 2.0 * PI.ln()
                + 0.5 * (PI * nf).ln()
                + nf / 2.0 * (nf / (2.0 * std::f64::consts::E)).ln();
            if corrected {
                ln += i as f64 / 2.0 * (2.0 / nf).ln();
            }
            ln.exp()
        })
        .collect()
}

/// Ball of radius `radius` in the span of the orthonormal rows `basis`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub basis: Vec<Vec<f64>>,
    pub radius: f64,
}

impl Disk {
    fn coords(&self, x: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|b| fdot(b, x)).collect()
    }

    fn lift(&self, c: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for (ci, b) in c.iter().zip(&self.basis) {
            for (o, bj) in out.iter_mut().zip(b) {
                *o += ci * bj;
            }
        }
    }
}

/// Minkowski sum of disks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discotope {
    pub ambient: usize,
    pub disks: Vec<Disk>,
}

/// Outcome of comparing the distance to a body against a threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Within,
    Beyond,
    Unresolved,
}

const DIST_MAX_SWEEPS: usize = 20_000;
const DIST_TOL: f64 = 1e-10;

impl Discotope {
    pub fn new(ambient: usize, disks: Vec<Disk>) -> Result<Self> {
        for (i, d) in disks.iter().enumerate() {
            if d.basis.is_empty() || d.basis.iter().any(|b| b.len() != ambient) {
                return Err(Error::Input(format!("disk {i} has a malformed basis")));
            }
            if !(d.radius >= 0.0 && d.radius.is_finite()) {
                return Err(Error::Input(format!("disk {i} has an invalid radius")));
            }
            for (a, u) in d.basis.iter().enumerate() {
                for (b, v) in d.basis.iter().enumerate() {
                    let want = if a == b { 1.0 } else { 0.0 };
                    if (fdot(u, v) - want).abs() > 1e-9 {
                        return Err(Error::Input(format!("disk {i} basis is not orthonormal")));
                    }
                }
            }
        }
        Ok(Discotope { ambient, disks })
    }

    pub fn point(ambient: usize) -> Self {
        Discotope {
            ambient,
            disks: Vec::new(),
        }
    }

    /// Each generator `z` becomes the 1-disk of radius `‖z‖` along `z`.
    pub fn from_zonotope(z: &Zonotope) -> Self {
        let disks = z
            .generators()
            .iter()
            .filter(|g| fnorm(g) > 0.0)
            .map(|g| {
                let n = fnorm(g);
                Disk {
                    basis: vec![g.iter().map(|x| x / n).collect()],
                    radius: n,
                }
            })
            .collect();
        Discotope {
            ambient: z.ambient(),
            disks,
        }
    }

    /// `h(u) = Σ r_i ‖P_i u‖`.
    pub fn support(&self, u: &[f64]) -> f64 {
        self.disks
            .iter()
            .map(|d| d.radius * fnorm(&d.coords(u)))
            .sum()
    }

    /// Unit-vector support function.
    pub fn support_function(&self, u: &[f64]) -> Result<f64> {
        if (fnorm(u) - 1.0).abs() > 1e-12 || u.len() != self.ambient {
            return Err(Error::Input(
                "support_function needs a unit vector of the ambient dimension".into(),
            ));
        }
        Ok(self.support(u))
    }

    /// `max_i h(e_i)`; the body lies in `[−R, R]^d`.
    pub fn box_radius(&self) -> f64 {
        (0..self.ambient)
            .map(|i| {
                let mut e = vec![0.0; self.ambient];
                e[i] = 1.0;
                self.support(&e)
            })
            .fold(0.0, f64::max)
    }

    /// Block-coordinate projection onto the body. Each sweep yields the primal
    /// bound `‖x − Σ y_i‖ ≥ dist` and the dual bound `⟨x,u⟩ − h(u) ≤ dist` with
    /// `u` the normalized residual. `stop` sees `(lower, upper)` after each sweep.
    fn project(&self, x: &[f64], mut stop: impl FnMut(f64, f64) -> bool) -> (f64, f64, bool) {
        let d = self.ambient;
        let mut coords: Vec<Vec<f64>> = self
            .disks
            .iter()
            .map(|k| vec![0.0; k.basis.len()])
            .collect();
        let mut r = x.to_vec();
        let mut y = vec![0.0; d];
        let mut best_upper = fnorm(&r);
        let mut best_lower = f64::NEG_INFINITY;
        if self.disks.is_empty() || best_upper == 0.0 {
            stop(best_upper, best_upper);
            return (best_upper, best_upper, true);
        }
        for _ in 0..DIST_MAX_SWEEPS {
            for (k, disk) in self.disks.iter().enumerate() {
                disk.lift(&coords[k], &mut y);
                let target: Vec<f64> = r.iter().zip(&y).map(|(a, b)| a + b).collect();
                let mut c = disk.coords(&target);
                let n = fnorm(&c);
                if n > disk.radius {
                    let s = disk.radius / n;
                    c.iter_mut().for_each(|v| *v *= s);
                }
                disk.lift(&c, &mut y);
                for ((ri, ti), yi) in r.iter_mut().zip(&target).zip(&y) {
                    *ri = ti - yi;
                }
                coords[k] = c;
            }
            let upper = fnorm(&r);
            best_upper = best_upper.min(upper);
            if upper == 0.0 {
                stop(0.0, 0.0);
                return (0.0, 0.0, true);
            }
            let u: Vec<f64> = r.iter().map(|v| v / upper).collect();
            best_lower = best_lower.max(fdot(x, &u) - self.support(&u));
            if stop(best_lower, best_upper) {
                return (best_lower, best_upper, true);
            }
        }
        (best_lower, best_upper, false)
    }

    /// Euclidean distance from `x` to the body (0 inside).
    pub fn distance_to_body(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.ambient {
            return Err(Error::Input("point has the wrong dimension".into()));
        }
        let (lo, hi, ok) = self.project(x, |lo, hi| hi - lo.max(0.0) <= DIST_TOL * hi.max(1.0));
        if !ok {
            return Err(Error::Precondition(format!(
                "distance oracle did not converge (gap {})",
                hi - lo.max(0.0)
            )));
        }
        Ok(hi)
    }

    /// Whether `dist(x, body) ≤ t`, deciding as soon as a bound settles it.
    pub fn within(&self, x: &[f64], t: f64) -> Membership {
        let mut verdict = Membership::Unresolved;
        self.project(x, |lo, hi| {
            if hi <= t {
                verdict = Membership::Within;
            } else if lo > t {
                verdict = Membership::Beyond;
            } else if hi - lo <= DIST_TOL * hi.max(1.0) {
                verdict = if hi <= t + DIST_TOL {
                    Membership::Within
                } else {
                    Membership::Beyond
                };
            }
            verdict != Membership::Unresolved
        });
        verdict
    }
}

/// Discotope of an arrangement: one unit-volume ball in `H^⊥` per element.
pub fn discotope_of(a: &Arrangement) -> Discotope {
    let disks = a
        .elements()
        .iter()
        .map(|h| {
            let normals: Vec<Vec<f64>> = h
                .normals()
                .iter()
                .map(|n| n.iter().map(to_f64).collect())
                .collect();
            let basis = orthonormalize(&normals, RANK_TOL);
            Disk {
                radius: unit_volume_radius(basis.len()),
                basis,
            }
        })
        .collect();
    Discotope {
        ambient: a.ambient(),
        disks,
    }
}

/// Zonotope of a hyperplane arrangement: unit normals halved.
pub fn zonotope_of(a: &Arrangement) -> Result<Zonotope> {
    let mut gens = Vec::with_capacity(a.len());
    for (i, h) in a.elements().iter().enumerate() {
        if h.codim() != 1 {
            return Err(Error::Input(format!("element {i} is not a hyperplane")));
        }
        let n: Vec<f64> = h.normals()[0].iter().map(to_f64).collect();
        let len = fnorm(&n);
        gens.push(n.iter().map(|x| x / (2.0 * len)).collect());
    }
    Zonotope::new(a.ambient(), gens)
}

/// Monte Carlo Steiner fit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub ambient: usize,
    pub lambdas: Vec<f64>,
    pub volumes: Vec<f64>,
    pub volume_stderr: Vec<f64>,
    pub nu: Vec<f64>,
    pub nu_stderr: Vec<f64>,
    /// Points dropped because their distance could not be placed on the grid.
    pub flagged: usize,
}

impl McEstimate {
    pub fn wills(&self) -> WillsPoly {
        WillsPoly::from_nu(self.ambient, self.nu.clone())
    }

    pub fn volumes_csv(&self) -> String {
        let mut s = String::from("lambda,raw_volume_estimate,stderr\n");
        for i in 0..self.lambdas.len() {
            s += &format!(
                "{:.16e},{:.16e},{:.16e}\n",
                self.lambdas[i], self.volumes[i], self.volume_stderr[i]
            );
        }
        s
    }

    pub fn nu_csv(&self) -> String {
        let mut s = String::from("i,nu,stderr\n");
        for i in 0..self.nu.len() {
            s += &format!("{},{:.16e},{:.16e}\n", i, self.nu[i], self.nu_stderr[i]);
        }
        s
    }
}

/// `4(d + 1)` equispaced values in `(0, 2R]`, `R` the box radius (1 for a point).
pub fn default_grid(body: &Discotope) -> Vec<f64> {
    let r = match body.box_radius() {
        r if r > 0.0 => r,
        _ => 1.0,
    };
    let m = 4 * (body.ambient + 1);
    (1..=m).map(|j| 2.0 * r * j as f64 / m as f64).collect()
}

const MC_CHUNK: usize = 4096;

impl Discotope {
    /// Index of the first sorted grid value `λ` with `dist(x) ≤ λ`
    /// (`grid.len()` when there is none), or `None` when undecided.
    fn grid_slot(&self, x: &[f64], grid: &[f64]) -> Option<usize> {
        let mut slot = None;
        self.project(x, |lo, hi| {
            let above = grid.partition_point(|&l| l < hi);
            let below = grid.partition_point(|&l| l < lo);
            if above == below {
                slot = Some(above);
            } else if hi - lo <= DIST_TOL * hi.max(1.0) {
                slot = Some(grid.partition_point(|&l| l + DIST_TOL < hi));
            }
            slot.is_some()
        });
        slot
    }
}

/// Uniform points in a box around `body + max(grid)·B`, each placed on the
/// grid by its distance to the body, so every point counts towards every
/// `vol(body + λB)`. The Steiner polynomial is then fitted by generalized
/// least squares with the exact covariance of the nested hit counts and the
/// leading coefficient fixed at `κ_d` (that is, `ν_0 = 1`).
///
/// `samples` is the budget per grid value; `samples · grid.len()` points are drawn.
pub fn estimate_intrinsic_volumes_mc(
    body: &Discotope,
    grid: &[f64],
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    let d = body.ambient;
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    if sorted.len() < d || grid.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
        return Err(Error::Input(format!(
            "need at least {} distinct positive grid values",
            d.max(1)
        )));
    }
    if samples == 0 {
        return Err(Error::Input("samples must be positive".into()));
    }
    let total = samples * grid.len();
    let half = body.box_radius() + sorted[sorted.len() - 1];
    let chunks = total.div_ceil(MC_CHUNK);
    let g = sorted.len();
    let (slots, flagged) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = substream(seed, 0, c as u64);
            let n = MC_CHUNK.min(total - c * MC_CHUNK);
            let mut x = vec![0.0; d];
            let mut slots = vec![0usize; g + 1];
            let mut bad = 0;
            for _ in 0..n {
                x.iter_mut()
                    .for_each(|v| *v = rng.random_range(-half..=half));
                match body.grid_slot(&x, &sorted) {
                    Some(j) => slots[j] += 1,
                    None => bad += 1,
                }
            }
            (slots, bad)
        })
        .reduce(
            || (vec![0; g + 1], 0),
            |mut a, b| {
                a.0.iter_mut().zip(&b.0).for_each(|(x, y)| *x += y);
                (a.0, a.1 + b.1)
            },
        );
    let used = total - flagged;
    if used == 0 {
        return Err(Error::Precondition("every sample was unresolved".into()));
    }
    let vbox = (2.0 * half).powi(d as i32);
    let nf = used as f64;
    let p: Vec<f64> = slots[..g]
        .iter()
        .scan(0usize, |acc, &c| {
            *acc += c;
            Some(*acc as f64 / nf)
        })
        .collect();
    let cov = DMatrix::from_fn(g, g, |a, b| {
        let (lo, hi) = (a.min(b), a.max(b));
        let v = vbox * vbox * p[lo] * (1.0 - p[hi]) / nf;
        // floor keeps the matrix definite when a count is 0 or complete
        if a == b {
            v + (vbox / nf).powi(2)
        } else {
            v
        }
    });
    let scale = sorted[g - 1];
    let kd = kappa(d);
    let y = DVector::from_fn(g, |i, _| vbox * p[i] - kd * sorted[i].powi(d as i32));
    let x = DMatrix::from_fn(g, d, |i, j| (sorted[i] / scale).powi(j as i32));
    let (coef, coef_cov) = gls_fit(&x, &y, cov.clone())?;
    let mut nu = vec![0.0; d + 1];
    let mut nu_stderr = vec![0.0; d + 1];
    nu[0] = 1.0;
    for j in 0..d {
        let s = scale.powi(j as i32);
        nu[d - j] = coef[j] / s / kappa(j);
        nu_stderr[d - j] = coef_cov[(j, j)].max(0.0).sqrt() / s / kappa(j);
    }
    let by_value = |l: &f64| sorted.partition_point(|v| v < l);
    Ok(McEstimate {
        ambient: d,
        lambdas: grid.to_vec(),
        volumes: grid.iter().map(|l| vbox * p[by_value(l)]).collect(),
        volume_stderr: grid
            .iter()
            .map(|l| {
                let i = by_value(l);
                cov[(i, i)].sqrt()
            })
            .collect(),
        nu,
        nu_stderr,
        flagged,
    })
}

/// Generalized least squares `min (y − Xβ)ᵀ Σ⁻¹ (y − Xβ)`; returns `β` and its covariance.
fn gls_fit(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    sigma: DMatrix<f64>,
) -> Result<(Vec<f64>, DMatrix<f64>)> {
    if x.ncols() == 0 {
        return Ok((Vec::new(), DMatrix::zeros(0, 0)));
    }
    let chol = sigma
        .cholesky()
        .ok_or_else(|| Error::Input("singular covariance in the Steiner fit".into()))?;
    let wx = chol.solve(x);
    let normal = x.transpose() * &wx;
    let rhs = wx.transpose() * y;
    let cov = normal
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Input("ill-conditioned Steiner fit".into()))?;
    let svd = normal.svd(true, true);
    let coef = svd
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::Input(format!("Steiner fit failed: {e}")))?;
    Ok((coef.as_slice().to_vec(), cov))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{catalog, Subspace};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn binom(n: u64, k: u64) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
    }

    fn random_zonotope(n: usize, d: usize, seed: u64) -> Zonotope {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gens = (0..n)
            .map(|_| {
                (0..d)
                    .map(|_| rng.sample::<f64, _>(StandardNormal))
                    .collect()
            })
            .collect();
        Zonotope::new(d, gens).unwrap()
    }

    fn random_rotation(d: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
        g.qr().q()
    }

    #[test]
    fn kappa_values() {
        assert_eq!(kappa(0), 1.0);
        assert!(close(kappa(7), PI.powf(3.5) / 11.631728396567448, 1e-13));
        assert!(close(kappa(1), 2.0, 1e-14));
        assert!(close(kappa(2), PI, 1e-14));
        assert!(close(kappa(3), 4.0 * PI / 3.0, 1e-14));
        assert!(close(unit_volume_radius(1), 0.5, 1e-14));
        assert!(close(unit_volume_radius(2), PI.powf(-0.5), 1e-14));
    }

    #[test]
    fn cube_is_binomial() {
        for d in 0..=6 {
            let w = Zonotope::cube(d).intrinsic_volumes();
            let exact = w.exact.clone().unwrap();
            for j in 0..=d {
                assert_eq!(exact[j], q(binom(d as u64, j as u64) as i64));
                assert!(close(w.nu[j], binom(d as u64, j as u64), 1e-12));
            }
            let belt = Zonotope::cube(d)
                .intrinsic_volumes_belt(&Limits::default())
                .unwrap();
            assert_eq!(belt.exact, Some(exact));
        }
    }

    #[test]
    fn segment_and_parallel_generators() {
        let z = Zonotope::new(3, vec![vec![0.0, 1.5, 2.0]]).unwrap();
        let w = z.intrinsic_volumes();
        assert!(close(w.nu[1], 5.0, 1e-14));
        assert_eq!(w.nu[2], 0.0);
        let par = Zonotope::new(2, vec![vec![0.3, 0.0], vec![1.1, 0.0]]).unwrap();
        let w = par.intrinsic_volumes();
        assert!(close(w.nu[1], 2.8, 1e-14));
        assert_eq!(w.nu[2], 0.0);
    }

    #[test]
    fn belt_matches_subset() {
        for (n, d, seed) in [(3, 2, 1), (5, 3, 2), (6, 4, 3), (8, 6, 4), (7, 3, 5)] {
            let z = random_zonotope(n, d, seed);
            let a = z.intrinsic_volumes();
            let b = z.intrinsic_volumes_belt(&Limits::default()).unwrap();
            for k in 0..=d {
                assert!(
                    close(a.nu[k], b.nu[k], 1e-9),
                    "n={n} d={d} k={k}: {} vs {}",
                    a.nu[k],
                    b.nu[k]
                );
            }
        }
        let parallel = Zonotope::from_rational(
            2,
            vec![vec![q(1), q(0)], vec![q(2), q(0)], vec![q(0), q(3)]],
        )
        .unwrap();
        assert_eq!(
            parallel.intrinsic_volumes().exact,
            parallel
                .intrinsic_volumes_belt(&Limits::default())
                .unwrap()
                .exact
        );
    }

    #[test]
    fn wills_delete_contract() {
        let cube = Zonotope::cube(3);
        for i in 0..3 {
            let w = cube.intrinsic_volumes().wills_exact().unwrap();
            let del = cube
                .delete(i)
                .unwrap()
                .intrinsic_volumes()
                .wills_exact()
                .unwrap();
            let con = cube.contract(i).unwrap();
            assert_eq!(con.ambient(), 2);
            let con = con.intrinsic_volumes().wills_exact().unwrap();
            let len = cube.segment_length_exact(i).unwrap();
            assert_eq!(w, &del + &con.scale(&len));
        }
        let z = random_zonotope(5, 3, 9);
        for i in 0..5 {
            let w = z.intrinsic_volumes().wills_coeffs();
            let del = z.delete(i).unwrap().intrinsic_volumes().wills_coeffs();
            let con = z.contract(i).unwrap().intrinsic_volumes().wills_coeffs();
            let len = z.segment_length(i);
            for j in 0..w.len() {
                let rhs = del[j] + len * con.get(j).copied().unwrap_or(0.0);
                assert!(close(w[j], rhs, 1e-9));
            }
        }
        // a point in R^1 has Wills polynomial λ; in R^0 it is 1
        let seg = Zonotope::cube(1);
        let point = seg
            .delete(0)
            .unwrap()
            .intrinsic_volumes()
            .wills_exact()
            .unwrap();
        assert_eq!(point, Poly::monomial(q(1), 1));
        let point0 = seg
            .contract(0)
            .unwrap()
            .intrinsic_volumes()
            .wills_exact()
            .unwrap();
        assert_eq!(point0, Poly::one());
        let zero = Zonotope::new(2, vec![vec![0.0, 0.0]]).unwrap();
        assert!(zero.contract(0).is_err());
    }

    #[test]
    fn rotation_invariance_and_homogeneity() {
        let z = random_zonotope(6, 4, 11);
        let base = z.intrinsic_volumes();
        let rotated = z.transformed(&random_rotation(4, 12)).intrinsic_volumes();
        for k in 0..=4 {
            assert!(close(base.nu[k], rotated.nu[k], 1e-9));
        }
        let e = Zonotope::from_rational(
            3,
            vec![
                vec![q(1), q(0), q(0)],
                vec![q(3), q(4), q(0)],
                vec![q(0), q(0), q(2)],
            ],
        )
        .unwrap();
        let t = q_frac(3, 2);
        let a = e.intrinsic_volumes().exact.unwrap();
        let b = e.scaled(&t).intrinsic_volumes().exact.unwrap();
        let mut tk = Rational::one();
        for k in 0..=3 {
            assert_eq!(&a[k] * &tk, b[k]);
            tk *= &t;
        }
    }

    #[test]
    fn theorem_af_log_concavity() {
        for seed in 0..10 {
            let w = random_zonotope(6, 4, seed).intrinsic_volumes();
            let (nu, steiner) = w.log_concavity(1e-9).unwrap();
            assert!(nu.holds() && steiner.holds());
        }
    }

    #[test]
    fn discotope_examples() {
        let d = discotope_of(&catalog::coordinate(3));
        assert!(d.disks.iter().all(|k| close(k.radius, 0.5, 1e-14)));
        let u = vec![1.0 / 3f64.sqrt(); 3];
        assert!(close(
            d.support_function(&u).unwrap(),
            3f64.sqrt() / 2.0,
            1e-12
        ));
        let plane = Arrangement::new(
            4,
            vec![catalog::transverse_planes_r4().elements()[0].clone()],
            Some(2),
        )
        .unwrap();
        let p = discotope_of(&plane);
        assert!(close(p.disks[0].radius, PI.powf(-0.5), 1e-14));
        assert!(close(
            p.support_function(&[1.0, 0.0, 0.0, 0.0]).unwrap(),
            PI.powf(-0.5),
            1e-12
        ));
        assert_eq!(p.support_function(&[0.0, 0.0, 1.0, 0.0]).unwrap(), 0.0);
        assert!(discotope_of(&Arrangement::empty(3)).disks.is_empty());
        let h = Arrangement::new(
            2,
            vec![Subspace::hyperplane_int(&[3, 4], 0).unwrap()],
            Some(1),
        )
        .unwrap();
        let z = zonotope_of(&h).unwrap();
        assert!(close(z.segment_length(0), 1.0, 1e-14));
    }

    #[test]
    fn distance_examples() {
        let cube = discotope_of(&catalog::coordinate(3));
        assert_eq!(cube.distance_to_body(&[0.0; 3]).unwrap(), 0.0);
        let seg = Discotope::from_zonotope(&Zonotope::new(3, vec![vec![0.7, 0.0, 0.0]]).unwrap());
        assert!(close(
            seg.distance_to_body(&[1.0, 0.0, 0.0]).unwrap(),
            0.3,
            1e-9
        ));
        let plane = discotope_of(
            &Arrangement::new(
                3,
                vec![Subspace::hyperplane_int(&[0, 0, 1], 0).unwrap()],
                Some(1),
            )
            .unwrap(),
        );
        let disk = Discotope::new(
            3,
            vec![Disk {
                basis: vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]],
                radius: 0.8,
            }],
        )
        .unwrap();
        assert!(close(
            disk.distance_to_body(&[0.0, 2.0, 0.0]).unwrap(),
            1.2,
            1e-9
        ));
        assert!(close(
            plane.distance_to_body(&[0.0, 0.0, 2.0]).unwrap(),
            1.5,
            1e-9
        ));
        let corner = cube.distance_to_body(&[1.5, 1.5, 1.5]).unwrap();
        assert!(close(corner, 3f64.sqrt(), 1e-9));
        let skew = random_zonotope(5, 3, 3);
        let sd = Discotope::from_zonotope(&skew);
        let x = [2.0, -1.0, 0.5];
        let dist = sd.distance_to_body(&x).unwrap();
        for u in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.6, 0.8, 0.0]] {
            assert!(fdot(&x, &u) - sd.support(&u) <= dist + 1e-9);
        }
    }

    #[test]
    fn mc_point_and_small_cube() {
        let pt = Discotope::point(2);
        let est = estimate_intrinsic_volumes_mc(&pt, &default_grid(&pt), 20_000, 1).unwrap();
        assert_eq!(est.nu[0], 1.0);
        assert!(est.nu[1].abs() < 0.1 && est.nu[2].abs() < 0.1);
        let sq = discotope_of(&catalog::coordinate(2));
        let grid: Vec<f64> = (1..=8).map(|i| 0.25 * i as f64).collect();
        let est = estimate_intrinsic_volumes_mc(&sq, &grid, 40_000, 7).unwrap();
        for (got, want) in est.nu.iter().zip([1.0, 2.0, 1.0]) {
            assert!((got - want).abs() < 0.1 * want, "{got} vs {want}");
        }
        let again = estimate_intrinsic_volumes_mc(&sq, &grid, 40_000, 7).unwrap();
        assert_eq!(est.volumes_csv(), again.volumes_csv());
        assert!(estimate_intrinsic_volumes_mc(&sq, &[0.5, 0.5], 100, 1).is_err());
        assert!(estimate_intrinsic_volumes_mc(&sq, &[0.0, 0.5, 1.0], 100, 1).is_err());
    }

    #[test]
    fn stirling_normalization() {
        let nu = [1.0, 3.0, 3.0, 1.0];
        let err = |n: usize, corrected: bool| {
            stirling_normalized(&nu, n, corrected)
                .iter()
                .zip(&nu)
                .map(|(a, b)| (a / b - 1.0).abs())
                .fold(0.0, f64::max)
        };
        assert!(err(800, true) < 0.02);
        assert!(err(800, true) < err(200, true) && err(200, true) < err(50, true));
        assert!(err(800, false) > err(50, false));
    }
}
