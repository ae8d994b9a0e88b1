//! Sampling on spheres and Grassmannians, Lévy concentration demos and the
//! Wills-coefficient concentration experiments.
//!
//! Every sample derives its stream from `(seed, item)`, so results do not
//! depend on the number of worker threads.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arrangement::Arrangement;
use crate::convexbody::{
    default_grid, estimate_intrinsic_volumes_mc, fnorm, orthonormalize, unit_volume_radius,
    Discotope, Disk, Zonotope,
};
use crate::error::{Error, Result};
use crate::exactnum::to_f64;
use crate::limits::Limits;
use crate::rng::substream;

/// Ambient dimensions up to which the Monte Carlo path is accepted.
pub const MC_MAX_AMBIENT: usize = 6;

const CHUNK: usize = 4096;

/// Statistical acceptance thresholds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    /// Relative error allowed for Monte Carlo intrinsic volumes.
    pub mc_relative: f64,
    /// Allowed `|mean ν_2 − 6|` in the uniform experiment at the larger dimension.
    pub uniform_mean_abs: f64,
    /// Required `std(large d) / std(small d)` upper bound.
    pub uniform_std_ratio: f64,
    /// Binomial standard errors of slack in the Lévy comparison.
    pub levy_sigmas: f64,
    /// Slack for floating log-concavity checks.
    pub wills_slack: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            mc_relative: 0.05,
            uniform_mean_abs: 0.6,
            uniform_std_ratio: 0.7,
            levy_sigmas: 3.0,
            wills_slack: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub d: usize,
    pub n: usize,
    pub c: usize,
    pub k: usize,
    pub h: usize,
    pub l: usize,
    pub num_samples: usize,
    #[serde(default)]
    pub lambda_grid: Vec<f64>,
    pub mc_budget: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    /// Configuration for `a` with `h = 2^k` and `ℓ = 4^k`.
    pub fn for_arrangement(a: &Arrangement, k: usize, num_samples: usize, seed: u64) -> Self {
        ExperimentConfig {
            d: a.ambient(),
            n: a.len(),
            c: a.elements().iter().map(|s| s.codim()).max().unwrap_or(1),
            k,
            h: Self::default_h(k),
            l: Self::default_l(k),
            num_samples,
            lambda_grid: Vec::new(),
            mc_budget: 100_000,
            seed,
        }
    }

    pub fn default_h(k: usize) -> usize {
        1 << k
    }

    pub fn default_l(k: usize) -> usize {
        1 << (2 * k)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("d", self.d),
            ("n", self.n),
            ("c", self.c),
            ("k", self.k),
            ("h", self.h),
            ("l", self.l),
            ("num_samples", self.num_samples),
            ("mc_budget", self.mc_budget),
        ];
        match fields.iter().find(|(_, v)| *v == 0) {
            Some((name, _)) => Err(Error::Input(format!("{name} must be positive"))),
            None => Ok(()),
        }
    }

    /// First 16 hex digits of the SHA-256 of the JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&json)[..8]
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Per-coefficient summary of a set of samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleStats {
    pub mean: Vec<f64>,
    /// Empirical Lévy mean.
    pub median: Vec<f64>,
    pub std: Vec<f64>,
    pub count: usize,
}

impl SampleStats {
    /// Rows may differ in length; missing entries count as zero.
    pub fn from_samples(rows: &[Vec<f64>]) -> Self {
        let width = rows.iter().map(Vec::len).max().unwrap_or(0);
        let count = rows.len();
        let mut mean = Vec::with_capacity(width);
        let mut median = Vec::with_capacity(width);
        let mut std = Vec::with_capacity(width);
        for i in 0..width {
            let mut col: Vec<f64> = rows
                .iter()
                .map(|r| r.get(i).copied().unwrap_or(0.0))
                .collect();
            let m = col.iter().sum::<f64>() / count as f64;
            let var = if count > 1 {
                col.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (count - 1) as f64
            } else {
                0.0
            };
            col.sort_by(f64::total_cmp);
            let med = if count % 2 == 1 {
                col[count / 2]
            } else {
                0.5 * (col[count / 2 - 1] + col[count / 2])
            };
            mean.push(m);
            median.push(med);
            std.push(var.sqrt());
        }
        SampleStats {
            mean,
            median,
            std,
            count,
        }
    }
}

fn gaussian_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = fnorm(&v);
        if n > 0.0 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// `n_vectors` independent uniform points of `S^{d−1}`.
pub fn sample_sphere(n_vectors: usize, d: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if d == 0 {
        return Err(Error::Input("d must be at least 1".into()));
    }
    let mut rng = substream(seed, 0, 0);
    Ok((0..n_vectors).map(|_| gaussian_unit(&mut rng, d)).collect())
}

fn grassmann_from(rng: &mut ChaCha8Rng, r: usize, d: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(d, r, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let rdiag = qr.r();
    for j in 0..r {
        if rdiag[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Orthonormal `d × r` basis of a Haar-random `r`-plane in `R^d`.
pub fn sample_grassmann(r: usize, d: usize, seed: u64) -> Result<DMatrix<f64>> {
    if r == 0 || r > d {
        return Err(Error::Input(format!(
            "need 1 ≤ r ≤ d, got r = {r}, d = {d}"
        )));
    }
    Ok(grassmann_from(&mut substream(seed, 0, 0), r, d))
}

/// `‖P_U − P_V‖`, the sine of the largest principal angle.
pub fn grassmann_distance(u: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<f64> {
    if u.nrows() != v.nrows() || u.ncols() != v.ncols() {
        return Err(Error::Input(
            "subspaces must have equal dimension and ambient space".into(),
        ));
    }
    let m = u.transpose() * v;
    let smin = m
        .singular_values()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
        .min(1.0);
    Ok((1.0 - smin * smin).max(0.0).sqrt())
}

/// Kolmogorov–Smirnov test against the uniform law on `[lo, hi]`:
/// statistic and asymptotic p-value.
pub fn ks_uniform(samples: &[f64], lo: f64, hi: f64) -> (f64, f64) {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let stat = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    let t = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * stat;
    let p = if t < 1e-3 {
        1.0
    } else if t < 1.18 {
        let y = (-std::f64::consts::PI.powi(2) / (8.0 * t * t)).exp();
        let s: f64 = (1..=20).map(|j| y.powi((2 * j - 1) * (2 * j - 1))).sum();
        1.0 - (2.0 * std::f64::consts::PI).sqrt() / t * s
    } else {
        (1..=100)
            .map(|j| {
                let sign = if j % 2 == 1 { 2.0 } else { -2.0 };
                sign * (-2.0 * (j * j) as f64 * t * t).exp()
            })
            .sum()
    };
    (stat, p.clamp(0.0, 1.0))
}

/// First `m` coordinates of `num_samples` uniform points of `S^d ⊂ R^{d+1}`.
fn sphere_coords(d: usize, m: usize, num_samples: usize, seed: u64, tag: u64) -> Vec<Vec<f64>> {
    let chunks = num_samples.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = substream(seed, tag, c as u64);
            let count = CHUNK.min(num_samples - c * CHUNK);
            (0..count)
                .map(|_| gaussian_unit(&mut rng, d + 1)[..m].to_vec())
                .collect::<Vec<_>>()
        })
        .flatten()
        .collect()
}

/// One row of the Lévy table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevyRow {
    pub eps: f64,
    /// Empirical `μ(A_ε)` for the hemisphere `A = {x₁ ≤ 0}`.
    pub empirical: f64,
    /// Binomial standard error of `empirical`.
    pub stderr: f64,
    /// `1 − √(π/8)·e^{−dε²/8}`.
    pub bound: f64,
    /// Empirical `P(|x₁ − M| > ε)` with `M` the sample median.
    pub deviation: f64,
    /// `2·√(π/8)·e^{−dε²/8}`.
    pub deviation_bound: f64,
}

impl LevyRow {
    pub fn passes(&self, sigmas: f64) -> bool {
        self.empirical >= self.bound - sigmas * self.stderr
    }
}

fn levy_alpha(d: usize, eps: f64) -> f64 {
    (std::f64::consts::PI / 8.0).sqrt() * (-(d as f64) * eps * eps / 8.0).exp()
}

/// Hemisphere neighbourhoods of `S^d` and deviations of `x₁` from its median.
pub fn levy_demo(
    d: usize,
    eps_grid: &[f64],
    num_samples: usize,
    seed: u64,
) -> Result<Vec<LevyRow>> {
    if d < 2 {
        return Err(Error::Input("d must be at least 2".into()));
    }
    if num_samples == 0 {
        return Err(Error::Input("num_samples must be positive".into()));
    }
    let mut x1: Vec<f64> = sphere_coords(d, 1, num_samples, seed, 1)
        .into_iter()
        .map(|v| v[0])
        .collect();
    let n = num_samples as f64;
    let mut sorted = x1.clone();
    sorted.sort_by(f64::total_cmp);
    let median = if num_samples % 2 == 1 {
        sorted[num_samples / 2]
    } else {
        0.5 * (sorted[num_samples / 2 - 1] + sorted[num_samples / 2])
    };
    x1.shrink_to_fit();
    eps_grid
        .iter()
        .map(|&eps| {
            if !(eps >= 0.0) {
                return Err(Error::Input("ε must be non-negative".into()));
            }
            let hits = if eps >= std::f64::consts::FRAC_PI_2 {
                num_samples
            } else {
                let s = eps.sin();
                x1.iter().filter(|&&x| x <= s).count()
            };
            let p = hits as f64 / n;
            let far = x1.iter().filter(|&&x| (x - median).abs() > eps).count();
            let alpha = levy_alpha(d, eps);
            Ok(LevyRow {
                eps,
                empirical: p,
                stderr: (p * (1.0 - p) / n).sqrt(),
                bound: 1.0 - alpha,
                deviation: far as f64 / n,
                deviation_bound: 2.0 * alpha,
            })
        })
        .collect()
}

/// Empirical measure of the `ε`-neighbourhood of the great subsphere
/// `{x₁ = … = x_k = 0}` of `S^d`.
pub fn orthogonal_concentration_demo(
    d: usize,
    k: usize,
    eps: f64,
    num_samples: usize,
    seed: u64,
) -> Result<f64> {
    if k >= d {
        return Err(Error::Input("need k < d".into()));
    }
    if !(eps >= 0.0) || num_samples == 0 {
        return Err(Error::Input(
            "need ε ≥ 0 and a positive sample count".into(),
        ));
    }
    if k == 0 || eps >= std::f64::consts::FRAC_PI_2 {
        return Ok(1.0);
    }
    let s = eps.sin();
    let hits = sphere_coords(d, k, num_samples, seed, 2)
        .iter()
        .filter(|v| fnorm(v) <= s)
        .count();
    Ok(hits as f64 / num_samples as f64)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Results of the uniform-matroid experiment at one dimension.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniformRow {
    pub d: usize,
    /// `ν_0, …, ν_n` per sample.
    pub samples: Vec<Vec<f64>>,
    pub stats: SampleStats,
    /// `C(n, i)`.
    pub target: Vec<f64>,
}

/// Intrinsic volumes of the sum of `n` random unit segments in `R^d`, for
/// each `d`, against the Whitney numbers `C(n, i)` of `U_{n,n}`.
pub fn uniform_matroid_experiment(
    n: usize,
    d_list: &[usize],
    num_samples: usize,
    seed: u64,
) -> Result<Vec<UniformRow>> {
    if n == 0 || num_samples == 0 || d_list.is_empty() {
        return Err(Error::Input("need n, samples and dimensions".into()));
    }
    if d_list.iter().any(|&d| d <= n) {
        return Err(Error::Input("every d must exceed n".into()));
    }
    d_list
        .iter()
        .map(|&d| {
            let samples: Vec<Vec<f64>> = (0..num_samples)
                .into_par_iter()
                .map(|s| {
                    let mut rng = substream(seed, d as u64, s as u64);
                    let units: Vec<Vec<f64>> = (0..n).map(|_| gaussian_unit(&mut rng, d)).collect();
                    let gens = units
                        .iter()
                        .map(|u| u.iter().map(|x| 0.5 * x).collect())
                        .collect();
                    let mut nu = Zonotope::new(d, gens)?.intrinsic_volumes().nu;
                    nu.truncate(n + 1);
                    let g = DMatrix::from_fn(n, n, |i, j| {
                        crate::convexbody::fdot(&units[i], &units[j])
                    });
                    let top = g.determinant().max(0.0).sqrt();
                    if (nu[n] - top).abs() > 1e-9 || nu[n] > 1.0 + 1e-12 {
                        return Err(Error::Precondition(format!(
                            "parallelotope volume check failed at d = {d}, sample {s}"
                        )));
                    }
                    Ok(nu)
                })
                .collect::<Result<_>>()?;
            Ok(UniformRow {
                d,
                stats: SampleStats::from_samples(&samples),
                samples,
                target: (0..=n).map(|i| binomial(n, i)).collect(),
            })
        })
        .collect()
}

/// Floating realization: each element is the orthonormal basis of its normal
/// space together with the radius of its disk.
#[derive(Clone, Debug)]
struct FloatArrangement {
    ambient: usize,
    elements: Vec<(Vec<Vec<f64>>, f64)>,
}

impl FloatArrangement {
    fn of(a: &Arrangement) -> Self {
        let elements = a
            .elements()
            .iter()
            .map(|s| {
                let normals: Vec<Vec<f64>> = s
                    .normals()
                    .iter()
                    .map(|r| r.iter().map(to_f64).collect())
                    .collect();
                let basis = orthonormalize(&normals, 1e-12);
                let r = unit_volume_radius(basis.len());
                (basis, r)
            })
            .collect();
        FloatArrangement {
            ambient: a.ambient(),
            elements,
        }
    }

    fn pad(&mut self, l: usize) {
        self.ambient += l;
        for (basis, _) in &mut self.elements {
            for v in basis {
                v.resize(v.len() + l, 0.0);
            }
        }
    }

    /// Composite semiflexible extension with Haar-random directions. The `h`
    /// parallel hyperplanes of a direction contribute one segment of length `h`.
    fn composite(&mut self, k: usize, h: usize, l: usize, rng: &mut ChaCha8Rng) {
        for e in 0..self.elements.len() {
            self.pad(k);
            let dirs: Vec<Vec<f64>> = (0..k).map(|_| gaussian_unit(rng, self.ambient)).collect();
            if k > 0 {
                let c = self.elements[e].0.len();
                let mut w = self.elements[e].0.clone();
                w.extend(dirs.iter().cloned());
                let flex = loop {
                    let combos: Vec<Vec<f64>> = (0..c)
                        .map(|_| {
                            let t: Vec<f64> =
                                (0..w.len()).map(|_| rng.sample(StandardNormal)).collect();
                            (0..self.ambient)
                                .map(|j| w.iter().zip(&t).map(|(v, t)| v[j] * t).sum())
                                .collect()
                        })
                        .collect();
                    let b = orthonormalize(&combos, 1e-9);
                    if b.len() == c {
                        break b;
                    }
                };
                self.elements[e].0 = flex;
            }
            let r = h as f64 * unit_volume_radius(1);
            self.elements.extend(dirs.into_iter().map(|s| (vec![s], r)));
            self.pad(l);
        }
    }

    fn intrinsic_volumes(&self, cfg: &ExperimentConfig, seed: u64) -> Result<Vec<f64>> {
        if self.elements.iter().all(|(b, _)| b.len() == 1) {
            let gens = self
                .elements
                .iter()
                .map(|(b, r)| b[0].iter().map(|x| x * r).collect())
                .collect();
            return Ok(Zonotope::new(self.ambient, gens)?.intrinsic_volumes().nu);
        }
        if self.ambient > MC_MAX_AMBIENT {
            return Err(Error::Resource(format!(
                "Monte Carlo path needs ambient dimension ≤ {MC_MAX_AMBIENT}, got {}",
                self.ambient
            )));
        }
        let disks = self
            .elements
            .iter()
            .map(|(b, r)| Disk {
                basis: b.clone(),
                radius: *r,
            })
            .collect();
        let body = Discotope::new(self.ambient, disks)?;
        let grid = if cfg.lambda_grid.is_empty() {
            default_grid(&body)
        } else {
            cfg.lambda_grid.clone()
        };
        Ok(estimate_intrinsic_volumes_mc(&body, &grid, cfg.mc_budget, seed)?.nu)
    }
}

/// Report of the composite-extension experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MainReport {
    pub config: ExperimentConfig,
    pub config_hash: String,
    /// Raw `ν` per sample.
    pub samples: Vec<Vec<f64>>,
    pub raw: SampleStats,
    /// `h^{−kn}·ν_{kn+ic}` for `i = 0, …, rk/c`.
    pub normalized: SampleStats,
    /// Whitney numbers `γ_i` of the arrangement.
    pub target: Vec<f64>,
    /// `|mean normalized_i − γ_i|`.
    pub deviation: Vec<f64>,
    pub max_deviation: f64,
    /// Mean of `h^{−kn}ν_{kn+ic}(A′) − h^{−kn″}ν_{kn″+ic}(A″) − h^{−kn‴}ν_{kn‴+(i−1)c}(A‴)`
    /// with `A″`, `A‴` sampled from the deletion and contraction of the last element.
    pub del_contr_residual: Vec<f64>,
}

fn sampled_nu(a: &Arrangement, cfg: &ExperimentConfig, tag: u64, s: usize) -> Result<Vec<f64>> {
    let mut rng = substream(cfg.seed, tag, s as u64);
    let mut fa = FloatArrangement::of(a);
    fa.composite(cfg.k, cfg.h, cfg.l, &mut rng);
    let mc_seed = rng.random();
    fa.intrinsic_volumes(cfg, mc_seed)
}

fn normalized_coeffs(
    nu: &[f64],
    n: usize,
    cfg: &ExperimentConfig,
    count: usize,
    shift: isize,
) -> Vec<f64> {
    let scale = (cfg.h as f64).powi(-((cfg.k * n) as i32));
    (0..count)
        .map(|i| {
            let j = (cfg.k * n) as isize + (i as isize + shift) * cfg.c as isize;
            if j < 0 {
                0.0
            } else {
                nu.get(j as usize).copied().unwrap_or(0.0) * scale
            }
        })
        .collect()
}

/// Samples `A′ ~ Sf_{k,h,ℓ}(A, e_1, …, e_n)` and compares the normalized
/// intrinsic volumes with the Whitney numbers of `A`.
pub fn theorem_main_experiment(
    a: &Arrangement,
    cfg: &ExperimentConfig,
    limits: &Limits,
) -> Result<MainReport> {
    cfg.validate()?;
    if !a.is_central() || a.is_empty() {
        return Err(Error::Precondition(
            "need a nonempty central arrangement".into(),
        ));
    }
    let c = cfg.c;
    let gamma: Vec<f64> = a
        .matroid(c, limits)?
        .char_poly(limits)?
        .gamma
        .iter()
        .map(to_f64)
        .collect();
    let n = a.len();
    let last = n - 1;
    let (del, con) = a.delete_contract(last)?;
    let samples: Vec<Vec<f64>> = (0..cfg.num_samples)
        .into_par_iter()
        .map(|s| sampled_nu(a, cfg, 0, s))
        .collect::<Result<_>>()?;
    let width = gamma.len();
    let norm: Vec<Vec<f64>> = samples
        .iter()
        .map(|nu| normalized_coeffs(nu, n, cfg, width, 0))
        .collect();
    let residuals: Vec<Vec<f64>> = (0..cfg.num_samples)
        .into_par_iter()
        .map(|s| {
            let main = normalized_coeffs(&samples[s], n, cfg, width, 0);
            let d = normalized_coeffs(&sampled_nu(&del, cfg, 1, s)?, del.len(), cfg, width, 0);
            let k = normalized_coeffs(&sampled_nu(&con, cfg, 2, s)?, con.len(), cfg, width, -1);
            Ok((0..width).map(|i| main[i] - d[i] - k[i]).collect())
        })
        .collect::<Result<_>>()?;
    let normalized = SampleStats::from_samples(&norm);
    let deviation: Vec<f64> = normalized
        .mean
        .iter()
        .zip(&gamma)
        .map(|(m, g)| (m - g).abs())
        .collect();
    Ok(MainReport {
        config: cfg.clone(),
        config_hash: cfg.hash(),
        raw: SampleStats::from_samples(&samples),
        max_deviation: deviation.iter().copied().fold(0.0, f64::max),
        del_contr_residual: SampleStats::from_samples(&residuals).mean,
        samples,
        normalized,
        target: gamma,
        deviation,
    })
}

/// Per-sample rows `config_hash,sample,coefficient,value`.
pub fn samples_csv(config_hash: &str, samples: &[Vec<f64>]) -> String {
    let mut s = String::from("config_hash,sample,coefficient,value\n");
    for (i, row) in samples.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            s += &format!("{config_hash},{i},{j},{v:.16e}\n");
        }
    }
    s
}

/// Summary rows `coefficient,mean,median,std,target,deviation`.
pub fn summary_csv(stats: &SampleStats, target: &[f64]) -> String {
    let mut s = String::from("coefficient,mean,median,std,target,deviation\n");
    for i in 0..stats.mean.len() {
        let t = target.get(i).copied().unwrap_or(0.0);
        s += &format!(
            "{i},{:.16e},{:.16e},{:.16e},{t:.16e},{:.16e}\n",
            stats.mean[i],
            stats.median[i],
            stats.std[i],
            (stats.mean[i] - t).abs()
        );
    }
    s
}

/// Summary rows per dimension, `d,coefficient,mean,median,std,target,deviation`.
pub fn uniform_csv(rows: &[UniformRow]) -> String {
    let mut s = String::from("d,coefficient,mean,median,std,target,deviation\n");
    for r in rows {
        for line in summary_csv(&r.stats, &r.target).lines().skip(1) {
            s += &format!("{},{line}\n", r.d);
        }
    }
    s
}

impl MainReport {
    /// Per coefficient: index of `ν` used, raw and normalized statistics,
    /// target and the mean deletion-contraction residual.
    pub fn csv(&self) -> String {
        let kn = self.config.k * self.config.n;
        let mut s = String::from(
            "coefficient,nu_index,raw_mean,mean,median,std,target,deviation,del_contr_residual\n",
        );
        for i in 0..self.target.len() {
            let j = kn + i * self.config.c;
            s += &format!(
                "{i},{j},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                self.raw.mean.get(j).copied().unwrap_or(0.0),
                self.normalized.mean[i],
                self.normalized.median[i],
                self.normalized.std[i],
                self.target[i],
                self.deviation[i],
                self.del_contr_residual[i]
            );
        }
        s
    }
}

pub fn levy_csv(rows: &[LevyRow]) -> String {
    let mut s = String::from("eps,empirical,stderr,bound,deviation,deviation_bound\n");
    for r in rows {
        s += &format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            r.eps, r.empirical, r.stderr, r.bound, r.deviation, r.deviation_bound
        );
    }
    s
}
