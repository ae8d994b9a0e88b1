//! Matroids given by rank oracles: lattice of flats, Möbius function,
//! characteristic polynomial, Whitney numbers, Ingleton screening and a small
//! catalog of named matroids.
//!
//! Subsets of the ground set are `u64` bitmasks, so ground sets hold at most
//! 64 elements; enumerations are further bounded by [`Limits`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{q, serde_rational, Poly, Rational};
use crate::limits::Limits;
use crate::linalg::{integer_rows, rank_bareiss};

/// Matroids on at most this many elements built from matrices get a
/// precomputed rank table.
pub const TABLE_MAX: usize = 12;

#[derive(Clone)]
pub enum RankOracle {
    /// `table[mask]` is the rank of `mask`.
    Table(Arc<Vec<u8>>),
    /// Integer column vectors; rank is the rank of the selected columns.
    Matrix(Arc<Vec<Vec<BigInt>>>),
    /// `rank(S) = min(|S|, r)`.
    Uniform(usize),
}

/// A matroid on the ground set `0..n`, with optional element labels.
#[derive(Clone)]
pub struct Matroid {
    labels: Vec<String>,
    oracle: RankOracle,
    rank: usize,
}

impl fmt::Debug for Matroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Matroid")
            .field("n", &self.len())
            .field("rank", &self.rank)
            .finish()
    }
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

impl Matroid {
    fn with_oracle(n: usize, oracle: RankOracle) -> Result<Self> {
        if n > 64 {
            return Err(Error::Resource(format!(
                "ground set of {n} elements exceeds 64"
            )));
        }
        let mut m = Matroid {
            labels: default_labels(n),
            oracle,
            rank: 0,
        };
        m.rank = m.rank_of(full_mask(n));
        Ok(m)
    }

    /// Builds a matroid from a `2^n`-entry rank table, checking the rank axioms.
    pub fn from_rank_table(n: usize, table: Vec<u8>) -> Result<Self> {
        if n > 24 || table.len() != 1usize << n {
            return Err(Error::Input(format!(
                "rank table has {} entries, expected 2^{n}",
                table.len()
            )));
        }
        let m = Matroid::with_oracle(n, RankOracle::Table(Arc::new(table)))?;
        m.check_axioms()?;
        Ok(m)
    }

    /// Builds a matroid from an arbitrary rank function (tabulated once).
    pub fn from_rank_fn(
        n: usize,
        limits: &Limits,
        f: impl Fn(u64) -> usize + Sync,
    ) -> Result<Self> {
        if n > limits.max_ground {
            return Err(Error::Resource(format!(
                "ground set of {n} elements exceeds limit {}",
                limits.max_ground
            )));
        }
        let table: Vec<u8> = (0..1u64 << n).into_par_iter().map(|s| f(s) as u8).collect();
        Matroid::with_oracle(n, RankOracle::Table(Arc::new(table)))
    }

    /// Column matroid of a `d × n` rational matrix (given as rows).
    pub fn from_matrix(rows: &[Vec<Rational>]) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Input("ragged matrix".into()));
        }
        let cols: Vec<Vec<Rational>> = (0..n)
            .map(|j| rows.iter().map(|r| r[j].clone()).collect())
            .collect();
        let cols = integer_rows(&cols);
        let m = Matroid::with_oracle(n, RankOracle::Matrix(Arc::new(cols)))?;
        if n <= TABLE_MAX {
            return m.tabulated();
        }
        Ok(m)
    }

    pub fn uniform(r: usize, n: usize) -> Result<Self> {
        if r > n {
            return Err(Error::Input(format!("uniform({r},{n}) needs r <= n")));
        }
        Matroid::with_oracle(n, RankOracle::Uniform(r))
    }

    pub fn boolean(n: usize) -> Result<Self> {
        Matroid::uniform(n, n)
    }

    /// Copies the oracle into a rank table.
    pub fn tabulated(&self) -> Result<Self> {
        let n = self.len();
        if n > 24 {
            return Err(Error::Resource(format!("cannot tabulate {n} elements")));
        }
        let table: Vec<u8> = (0..1u64 << n)
            .into_par_iter()
            .map(|s| self.rank_of(s) as u8)
            .collect();
        Ok(Matroid {
            labels: self.labels.clone(),
            oracle: RankOracle::Table(Arc::new(table)),
            rank: self.rank,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::Input("label count does not match ground set".into()));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Rank of the whole ground set.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn oracle(&self) -> &RankOracle {
        &self.oracle
    }

    pub fn rank_of(&self, s: u64) -> usize {
        match &self.oracle {
            RankOracle::Table(t) => t[s as usize] as usize,
            RankOracle::Uniform(r) => (s.count_ones() as usize).min(*r),
            RankOracle::Matrix(cols) => {
                let sel: Vec<Vec<BigInt>> = (0..cols.len())
                    .filter(|&i| s >> i & 1 == 1)
                    .map(|i| cols[i].clone())
                    .collect();
                rank_bareiss(&sel)
            }
        }
    }

    pub fn full(&self) -> u64 {
        full_mask(self.len())
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.rank_of(1 << e) == 0
    }

    pub fn is_coloop(&self, e: usize) -> bool {
        self.rank_of(self.full() & !(1 << e)) < self.rank
    }

    pub fn closure(&self, s: u64) -> u64 {
        let r = self.rank_of(s);
        (0..self.len())
            .filter(|&e| s >> e & 1 == 1 || self.rank_of(s | 1 << e) == r)
            .fold(0, |acc, e| acc | 1 << e)
    }

    /// Spot-checks normalization, `rank(S) ≤ |S|`, monotonicity and
    /// submodularity on every subset (local form) when `n ≤ 12`.
    pub fn check_axioms(&self) -> Result<()> {
        let n = self.len();
        if self.rank_of(0) != 0 {
            return Err(Error::Input("rank of the empty set is not 0".into()));
        }
        if n > TABLE_MAX {
            return Ok(());
        }
        for s in 0..1u64 << n {
            let rs = self.rank_of(s);
            if rs > s.count_ones() as usize {
                return Err(Error::Input(format!("rank({s:#b}) exceeds its size")));
            }
            for e in (0..n).filter(|&e| s >> e & 1 == 0) {
                let re = self.rank_of(s | 1 << e);
                if re < rs || re > rs + 1 {
                    return Err(Error::Input(format!(
                        "rank is not unit-increasing at {s:#b} + {e}"
                    )));
                }
                for f in (e + 1..n).filter(|&f| s >> f & 1 == 0) {
                    let rf = self.rank_of(s | 1 << f);
                    let ref_ = self.rank_of(s | 1 << e | 1 << f);
                    if re + rf < ref_ + rs {
                        return Err(Error::Input(format!(
                            "rank is not submodular at {s:#b} with {e},{f}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Lattice of flats with Möbius values `μ(0̂, x)`.
    pub fn flats_and_mobius(&self, limits: &Limits) -> Result<FlatLattice> {
        let n = self.len();
        if n > limits.max_ground {
            return Err(Error::Resource(format!(
                "ground set of {n} elements exceeds limit {}",
                limits.max_ground
            )));
        }
        let bottom = self.closure(0);
        let mut flats = vec![bottom];
        let mut ranks = vec![self.rank_of(bottom)];
        let mut covers: Vec<Vec<usize>> = vec![Vec::new()];
        let mut index: HashMap<u64, usize> = HashMap::from([(bottom, 0)]);
        let mut level = vec![0usize];
        while !level.is_empty() {
            let mut next = Vec::new();
            for &fi in &level {
                let f = flats[fi];
                for e in (0..n).filter(|&e| f >> e & 1 == 0) {
                    let g = self.closure(f | 1 << e);
                    let gi = match index.get(&g) {
                        Some(&gi) => gi,
                        None => {
                            let gi = flats.len();
                            flats.push(g);
                            ranks.push(self.rank_of(g));
                            covers.push(Vec::new());
                            index.insert(g, gi);
                            next.push(gi);
                            gi
                        }
                    };
                    if !covers[fi].contains(&gi) {
                        covers[fi].push(gi);
                    }
                }
            }
            level = next;
        }
        // BFS from the bottom visits flats rank by rank already.
        let mut mobius = vec![0i64; flats.len()];
        mobius[0] = 1;
        for x in 1..flats.len() {
            let fx = flats[x];
            let s: i64 = (0..x)
                .filter(|&y| flats[y] & !fx == 0 && ranks[y] < ranks[x])
                .map(|y| mobius[y])
                .sum();
            mobius[x] = -s;
        }
        for c in covers.iter_mut() {
            c.sort_unstable();
        }
        Ok(FlatLattice {
            flats,
            ranks,
            covers,
            mobius,
        })
    }

    /// `χ(M;λ) = Σ_x μ(x) λ^{r − rk x}` with its absolute version and Whitney numbers.
    pub fn char_poly(&self, limits: &Limits) -> Result<CharPoly> {
        let lattice = self.flats_and_mobius(limits)?;
        Ok(lattice.char_poly(self.rank))
    }

    /// Maps a subset of the ground set with `e` removed back to the original indices.
    fn lift(s: u64, e: usize) -> u64 {
        let low = s & ((1u64 << e) - 1);
        let high = (s >> e) << (e + 1);
        low | high
    }

    fn minor(&self, e: usize, f: impl Fn(u64) -> usize + Sync) -> Result<Matroid> {
        let n = self.len();
        if e >= n {
            return Err(Error::Input(format!(
                "element {e} not in ground set of size {n}"
            )));
        }
        if n - 1 > 24 {
            return Err(Error::Resource("minor too large to tabulate".into()));
        }
        let table: Vec<u8> = (0..1u64 << (n - 1))
            .into_par_iter()
            .map(|s| f(Matroid::lift(s, e)) as u8)
            .collect();
        let mut labels = self.labels.clone();
        labels.remove(e);
        let mut m = Matroid::with_oracle(n - 1, RankOracle::Table(Arc::new(table)))?;
        m.labels = labels;
        Ok(m)
    }

    /// `M \ e`: same rank on subsets avoiding `e`.
    pub fn delete(&self, e: usize) -> Result<Matroid> {
        self.minor(e, |s| self.rank_of(s))
    }

    /// `M / e`: `rank(S ∪ e) − rank(e)`.
    pub fn contract(&self, e: usize) -> Result<Matroid> {
        if e >= self.len() {
            return Err(Error::Input(format!("element {e} not in ground set")));
        }
        let re = self.rank_of(1 << e);
        self.minor(e, |s| self.rank_of(s | 1 << e) - re)
    }

    pub fn delete_contract(&self, e: usize) -> Result<(Matroid, Matroid)> {
        Ok((self.delete(e)?, self.contract(e)?))
    }

    /// Whether two matroids on the same ground set have identical rank functions.
    pub fn same_rank_function(&self, other: &Matroid) -> bool {
        self.len() == other.len() && (0..=self.full()).all(|s| self.rank_of(s) == other.rank_of(s))
    }

    /// Ingleton's inequality
    /// `r(AB)+r(AC)+r(AD)+r(BC)+r(BD) ≥ r(A)+r(B)+r(CD)+r(ABC)+r(ABD)`
    /// over quadruples of subsets: exhaustive up to 8 elements, otherwise
    /// `samples` seeded uniform quadruples.
    pub fn ingleton_check(
        &self,
        limits: &Limits,
        samples: usize,
        seed: u64,
    ) -> Result<IngletonReport> {
        let n = self.len();
        if n > limits.max_ground {
            return Err(Error::Resource(format!(
                "ground set of {n} elements exceeds limit {}",
                limits.max_ground
            )));
        }
        let t = self.tabulated()?;
        let RankOracle::Table(table) = &t.oracle else {
            unreachable!()
        };
        let r = |s: u64| table[s as usize] as i32;
        let violates = |a: u64, b: u64, c: u64, d: u64| {
            let lhs = r(a | b) + r(a | c) + r(a | d) + r(b | c) + r(b | d);
            let rhs = r(a) + r(b) + r(c | d) + r(a | b | c) + r(a | b | d);
            lhs < rhs
        };
        let big = 1u64 << n;
        if n <= 8 {
            // the inequality is symmetric under A↔B and C↔D
            let hit = (0..big).into_par_iter().find_map_first(|a| {
                for b in a..big {
                    for c in 0..big {
                        for d in c..big {
                            if violates(a, b, c, d) {
                                return Some([a, b, c, d]);
                            }
                        }
                    }
                }
                None
            });
            let checked = {
                let pairs = big * (big + 1) / 2;
                pairs.saturating_mul(pairs)
            };
            return Ok(IngletonReport::from_hit(hit, checked, true, self));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mask = big - 1;
        for _ in 0..samples {
            let quad = [0; 4].map(|_| rng.random::<u64>() & mask);
            if violates(quad[0], quad[1], quad[2], quad[3]) {
                return Ok(IngletonReport::from_hit(
                    Some(quad),
                    samples as u64,
                    false,
                    self,
                ));
            }
        }
        Ok(IngletonReport::from_hit(None, samples as u64, false, self))
    }

    /// Rank table form `{"rank_table": {mask: rank}}`.
    pub fn to_json(&self) -> Result<serde_json::Value> {
        if self.len() > 16 {
            return Err(Error::Resource(
                "rank table JSON limited to 16 elements".into(),
            ));
        }
        let table: BTreeMap<String, usize> = (0..=self.full())
            .map(|s| (s.to_string(), self.rank_of(s)))
            .collect();
        Ok(serde_json::json!({ "labels": self.labels, "rank_table": table }))
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Matroid> {
        let spec: MatroidSpec = serde_json::from_value(v.clone())?;
        spec.build()
    }
}

/// Matroid input formats.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatroidSpec {
    Matrix {
        #[serde(with = "serde_rational::matrix")]
        matrix: Vec<Vec<Rational>>,
        #[serde(default)]
        labels: Option<Vec<String>>,
    },
    RankTable {
        rank_table: BTreeMap<String, usize>,
        #[serde(default)]
        labels: Option<Vec<String>>,
    },
    Name {
        name: String,
    },
}

impl MatroidSpec {
    pub fn build(&self) -> Result<Matroid> {
        match self {
            MatroidSpec::Matrix { matrix, labels } => {
                let m = Matroid::from_matrix(matrix)?;
                match labels {
                    Some(l) => m.with_labels(l.clone()),
                    None => Ok(m),
                }
            }
            MatroidSpec::RankTable { rank_table, labels } => {
                let entries: Vec<(u64, usize)> = rank_table
                    .iter()
                    .map(|(k, v)| {
                        k.parse::<u64>()
                            .map(|k| (k, *v))
                            .map_err(|_| Error::Input(format!("bad subset mask {k:?}")))
                    })
                    .collect::<Result<_>>()?;
                let size = entries.len();
                if !size.is_power_of_two() {
                    return Err(Error::Input("rank table must list all 2^n subsets".into()));
                }
                let n = size.trailing_zeros() as usize;
                let mut table = vec![u8::MAX; size];
                for (k, v) in entries {
                    let slot = table
                        .get_mut(k as usize)
                        .ok_or_else(|| Error::Input(format!("mask {k} out of range")))?;
                    *slot = v as u8;
                }
                let m = Matroid::from_rank_table(n, table)?;
                match labels {
                    Some(l) => m.with_labels(l.clone()),
                    None => Ok(m),
                }
            }
            MatroidSpec::Name { name } => catalog(name),
        }
    }
}

/// Lattice of flats ordered by inclusion; index 0 is the bottom `cl(∅)`.
#[derive(Clone, Debug)]
pub struct FlatLattice {
    pub flats: Vec<u64>,
    pub ranks: Vec<usize>,
    /// Indices of the flats covering each flat.
    pub covers: Vec<Vec<usize>>,
    pub mobius: Vec<i64>,
}

impl FlatLattice {
    pub fn len(&self) -> usize {
        self.flats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flats.is_empty()
    }

    pub fn index_of(&self, flat: u64) -> Option<usize> {
        self.flats.iter().position(|&f| f == flat)
    }

    pub fn char_poly(&self, rank: usize) -> CharPoly {
        let mut chi = vec![Rational::zero(); rank + 1];
        for (r, mu) in self.ranks.iter().zip(&self.mobius) {
            chi[rank - r] += q(*mu);
        }
        let chi = Poly::new(chi);
        let psi = chi.abs_coeffs();
        let gamma = (0..=rank).map(|i| psi.coeff(rank - i)).collect();
        CharPoly { chi, psi, gamma }
    }
}

/// Characteristic polynomial, absolute characteristic polynomial and Whitney
/// numbers of the first kind (`gamma[i]` = |coefficient of `λ^{r−i}`|).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharPoly {
    pub chi: Poly,
    pub psi: Poly,
    #[serde(with = "serde_rational::vec")]
    pub gamma: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum IngletonReport {
    Satisfied {
        quadruples_checked: u64,
        exhaustive: bool,
    },
    Violated {
        /// A, B, C, D as lists of element labels.
        witness: [Vec<String>; 4],
        masks: [u64; 4],
    },
}

impl IngletonReport {
    fn from_hit(hit: Option<[u64; 4]>, checked: u64, exhaustive: bool, m: &Matroid) -> Self {
        match hit {
            None => IngletonReport::Satisfied {
                quadruples_checked: checked,
                exhaustive,
            },
            Some(masks) => IngletonReport::Violated {
                witness: masks.map(|s| {
                    (0..m.len())
                        .filter(|&i| s >> i & 1 == 1)
                        .map(|i| m.labels[i].clone())
                        .collect()
                }),
                masks,
            },
        }
    }

    pub fn is_violated(&self) -> bool {
        matches!(self, IngletonReport::Violated { .. })
    }
}

/// Vámos matroid: rank 4 on 8 elements whose dependent 4-sets are five of
/// the six unions of two of the pairs {0,1},{2,3},{4,5},{6,7}.
pub fn vamos() -> Result<Matroid> {
    let pairs = [0b11u64, 0b1100, 0b11_0000, 0b1100_0000];
    let circuits: Vec<u64> = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]
        .iter()
        .map(|&(i, j)| pairs[i] | pairs[j])
        .collect();
    let table = (0..256u64)
        .map(|s| {
            let k = s.count_ones() as u8;
            if k == 4 && circuits.contains(&s) {
                3
            } else {
                k.min(4)
            }
        })
        .collect();
    Matroid::from_rank_table(8, table)
}

/// Fano plane as a rank table: rank 3 on 7 points, the 7 lines have rank 2.
pub fn fano() -> Result<Matroid> {
    let lines: [[usize; 3]; 7] = [
        [0, 1, 2],
        [0, 3, 4],
        [0, 5, 6],
        [1, 3, 5],
        [1, 4, 6],
        [2, 3, 6],
        [2, 4, 5],
    ];
    let lines: Vec<u64> = lines
        .iter()
        .map(|l| l.iter().fold(0, |a, &i| a | 1 << i))
        .collect();
    let table = (0..128u64)
        .map(|s| {
            let k = s.count_ones() as u8;
            if k == 3 && lines.contains(&s) {
                2
            } else {
                k.min(3)
            }
        })
        .collect();
    Matroid::from_rank_table(7, table)
}

/// Cycle matroid of the complete graph `K_m` via its signed incidence matrix.
pub fn graphic_complete(m: usize) -> Result<Matroid> {
    let edges: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .collect();
    let rows: Vec<Vec<Rational>> = (0..m)
        .map(|v| {
            edges
                .iter()
                .map(|&(i, j)| {
                    if v == i {
                        q(1)
                    } else if v == j {
                        q(-1)
                    } else {
                        q(0)
                    }
                })
                .collect()
        })
        .collect();
    let labels = edges.iter().map(|(i, j)| format!("{i}{j}")).collect();
    Matroid::from_matrix(&rows)?.with_labels(labels)
}

fn parse_args(name: &str, prefix: &str) -> Option<Vec<usize>> {
    let inner = name
        .strip_prefix(prefix)?
        .strip_prefix('(')?
        .strip_suffix(')')?;
    inner.split(',').map(|s| s.trim().parse().ok()).collect()
}

/// Named matroids: `uniform(r,n)`, `boolean(n)`, `vamos`, `fano`, `graphic-complete(m)`.
pub fn catalog(name: &str) -> Result<Matroid> {
    let name = name.trim();
    match name {
        "vamos" => return vamos(),
        "fano" => return fano(),
        _ => {}
    }
    if let Some(a) = parse_args(name, "uniform") {
        if let [r, n] = a[..] {
            return Matroid::uniform(r, n);
        }
    }
    if let Some(a) = parse_args(name, "boolean") {
        if let [n] = a[..] {
            return Matroid::boolean(n);
        }
    }
    if let Some(a) = parse_args(name, "graphic-complete") {
        if let [m] = a[..] {
            return graphic_complete(m);
        }
    }
    Err(Error::Input(format!("unknown matroid name {name:?}")))
}
