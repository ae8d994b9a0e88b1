use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use wills_core::arrangement::{self, catalog, Arrangement, ArrangementJson};
use wills_core::concentration::{self as conc, ExperimentConfig};
use wills_core::convexbody::{self as cb, Zonotope, ZonotopeJson};
use wills_core::exactnum::{format_rational, is_log_concave, is_log_concave_f64, is_unimodal};
use wills_core::extensions as ext;
use wills_core::limits::Limits;
use wills_core::matroid::{self, Matroid};
use wills_core::rng::fresh_seed;
use wills_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "wills",
    version,
    about = "Whitney numbers, intrinsic volumes and arrangement extensions"
)]
struct Cli {
    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Matroid polynomials and checks.
    Matroid {
        #[command(subcommand)]
        cmd: MatroidCmd,
    },
    /// Subspace arrangements.
    Arr {
        #[command(subcommand)]
        cmd: ArrCmd,
    },
    /// Zonotopes.
    Zono {
        #[command(subcommand)]
        cmd: ZonoCmd,
    },
    /// Discotopes.
    Disco {
        #[command(subcommand)]
        cmd: DiscoCmd,
    },
    /// Arrangement extensions.
    Extend {
        #[command(subcommand)]
        cmd: ExtendCmd,
    },
    /// Exact identity checks; exit code 1 when a residual is nonzero.
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
    /// Sampling experiments.
    Experiment {
        #[command(subcommand)]
        cmd: ExperimentCmd,
    },
}

#[derive(Args, Clone, Serialize)]
struct MatroidIn {
    /// Catalog name: uniform(r,n), boolean(n), vamos, fano, graphic-complete(m).
    #[arg(long, conflicts_with = "file")]
    name: Option<String>,
    /// JSON with a "matrix", "rank_table" or "name" field.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args, Clone, Serialize)]
struct ArrIn {
    /// Arrangement JSON.
    #[arg(long, conflicts_with = "catalog")]
    file: Option<PathBuf>,
    /// coordinate(d), generic(n,d), braid(m), transverse-planes-r4, planes-meeting-in-line-r4.
    #[arg(long)]
    catalog: Option<String>,
}

#[derive(Args, Clone, Serialize)]
struct ZonoIn {
    /// Zonotope JSON (`ambient`, `generators`).
    #[arg(long, conflicts_with_all = ["cube", "arr"])]
    file: Option<PathBuf>,
    /// The unit cube `[0,1]^d`.
    #[arg(long, conflicts_with = "arr")]
    cube: Option<usize>,
    /// Zonotope of a hyperplane arrangement JSON.
    #[arg(long)]
    arr: Option<PathBuf>,
}

#[derive(Subcommand)]
enum MatroidCmd {
    /// Characteristic polynomial and Whitney numbers.
    Char(MatroidIn),
    /// Ingleton's inequality.
    Ingleton {
        #[command(flatten)]
        input: MatroidIn,
        /// Sampled quadruples beyond 8 elements.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List catalog names, or print the rank table of one.
    Catalog {
        #[arg(long)]
        name: Option<String>,
    },
}

#[derive(Subcommand)]
enum ArrCmd {
    /// Intersection poset with Möbius values.
    Poset(ArrIn),
    /// Signed and absolute characteristic polynomials.
    Char(ArrIn),
    /// Whether the arrangement is a c-arrangement.
    CheckC {
        #[command(flatten)]
        input: ArrIn,
        #[arg(long)]
        c: usize,
    },
    /// Deletion of one element.
    Delete {
        #[command(flatten)]
        input: ArrIn,
        #[arg(long)]
        element: usize,
    },
    /// Contraction to one element.
    Contract {
        #[command(flatten)]
        input: ArrIn,
        #[arg(long)]
        element: usize,
    },
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Subset,
    Belt,
}

#[derive(Subcommand)]
enum ZonoCmd {
    /// Wills polynomial.
    Wills(ZonoIn),
    /// Intrinsic volumes as CSV.
    Intrinsic {
        #[command(flatten)]
        input: ZonoIn,
        #[arg(long, value_enum, default_value_t = Method::Subset)]
        method: Method,
    },
}

#[derive(Subcommand)]
enum DiscoCmd {
    /// Monte Carlo intrinsic volumes of the discotope of an arrangement.
    Estimate {
        #[command(flatten)]
        input: ArrIn,
        /// Samples per grid value.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Comma-separated λ values.
        #[arg(long, value_delimiter = ',')]
        grid: Vec<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the raw volume estimates here.
        #[arg(long)]
        volumes_out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ExtendCmd {
    /// Trivial extension by `ℓ` new coordinates.
    Trivial {
        #[command(flatten)]
        input: ArrIn,
        #[arg(long)]
        l: usize,
    },
    /// Large product extension `Pr_{k,h}`.
    Product {
        #[command(flatten)]
        input: ArrIn,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Semiflexible extension `Sf_{k,h}` at one element.
    Semiflex {
        #[command(flatten)]
        input: ArrIn,
        #[arg(long)]
        e: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Composite semiflexible extension over all elements.
    Composite {
        #[command(flatten)]
        input: ArrIn,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        l: usize,
        /// Comma-separated element order; defaults to 0,1,…
        #[arg(long, value_delimiter = ',')]
        order: Vec<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// `ψ(Sf_{k,h})/h^k` against `ψ(A)` for several `h`.
    LimitProbe {
        #[command(flatten)]
        input: ArrIn,
        #[arg(long)]
        e: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, value_delimiter = ',', default_value = "4,16,64")]
        hs: Vec<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// `ψ(Pr_{k,h}) − (λ + h)ψ(Pr_{k−1,h})`.
    LemmaProduct {
        #[command(flatten)]
        input: ArrIn,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Three-term and contraction-sum forms of the semiflexible recurrence.
    LemmaSemiflex {
        #[command(flatten)]
        input: ArrIn,
        #[arg(long)]
        e: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Deletion-contraction at one element, or at every element.
    DelContr {
        #[command(flatten)]
        input: ArrIn,
        #[arg(long)]
        element: Option<usize>,
    },
    /// Arrangement polynomials against those of the matroid at `λ^c`.
    CRelation {
        #[command(flatten)]
        input: ArrIn,
        #[arg(long)]
        c: usize,
    },
    /// Whitney numbers of a matroid and/or intrinsic volumes of a zonotope.
    LogConcave {
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        matroid_file: Option<PathBuf>,
        #[arg(long)]
        zono_file: Option<PathBuf>,
        #[arg(long)]
        cube: Option<usize>,
        #[arg(long, default_value_t = 1e-9)]
        slack: f64,
    },
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Sums of random unit segments against the Whitney numbers of `U_{n,n}`.
    Uniform {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "16,64")]
        d: Vec<usize>,
        #[arg(long, default_value_t = 40)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Per-sample rows.
        #[arg(long)]
        samples_out: Option<PathBuf>,
    },
    /// Hemisphere neighbourhoods on the sphere against Lévy's bound.
    Levy {
        #[arg(long, default_value_t = 50)]
        d: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5")]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Measure of the ε-neighbourhood of a great subsphere of codimension k.
    Orthogonal {
        #[arg(long, value_delimiter = ',', default_value = "20,80")]
        d: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0.3)]
        eps: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Normalized intrinsic volumes of sampled composite extensions against the Whitney numbers.
    Main {
        #[command(flatten)]
        input: ArrIn,
        #[arg(long)]
        k: usize,
        /// Defaults to 2^k.
        #[arg(long)]
        h: Option<usize>,
        /// Defaults to 4^k.
        #[arg(long)]
        l: Option<usize>,
        #[arg(long, default_value_t = 40)]
        samples: usize,
        /// Monte Carlo samples per λ when c > 1.
        #[arg(long, default_value_t = 100_000)]
        mc_budget: usize,
        #[arg(long, value_delimiter = ',')]
        grid: Vec<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples_out: Option<PathBuf>,
    },
}

enum Output {
    Json(Value),
    Csv(String),
}

struct Outcome {
    output: Output,
    /// False when a verified identity has a nonzero residual.
    ok: bool,
}

fn json_out<T: Serialize>(config: Value, result: &T) -> Result<Outcome> {
    json_check(config, result, true)
}

fn json_check<T: Serialize>(config: Value, result: &T, ok: bool) -> Result<Outcome> {
    let mut v = serde_json::to_value(result)?;
    match v.as_object_mut() {
        Some(obj) => {
            obj.insert("config".into(), config);
        }
        None => v = json!({ "config": config, "result": v }),
    }
    Ok(Outcome {
        output: Output::Json(v),
        ok,
    })
}

fn csv_out(config: Value, body: String) -> Outcome {
    Outcome {
        output: Output::Csv(format!("# config {config}\n{body}")),
        ok: true,
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = fresh_seed();
        eprintln!("seed: {s}");
        s
    })
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Input(format!("malformed JSON in {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}

fn load_matroid(input: &MatroidIn) -> Result<Matroid> {
    match (&input.name, &input.file) {
        (Some(n), _) => matroid::catalog(n),
        (None, Some(f)) => Matroid::from_json(&read_json(f)?),
        (None, None) => Err(Error::Input("give --name or --file".into())),
    }
}

fn load_arr(input: &ArrIn) -> Result<Arrangement> {
    match (&input.file, &input.catalog) {
        (Some(f), _) => {
            let j: ArrangementJson = serde_json::from_value(read_json(f)?)
                .map_err(|e| Error::Input(format!("not an arrangement: {e}")))?;
            Arrangement::from_json(&j)
        }
        (None, Some(name)) => catalog::by_name(name),
        (None, None) => Err(Error::Input("give --file or --catalog".into())),
    }
}

fn load_zono(input: &ZonoIn) -> Result<Zonotope> {
    match (&input.file, input.cube, &input.arr) {
        (Some(f), _, _) => {
            let j: ZonotopeJson = serde_json::from_value(read_json(f)?)
                .map_err(|e| Error::Input(format!("not a zonotope: {e}")))?;
            Zonotope::from_json(&j)
        }
        (None, Some(d), _) => Ok(Zonotope::cube(d)),
        (None, None, Some(f)) => cb::zonotope_of(&load_arr(&ArrIn {
            file: Some(f.clone()),
            catalog: None,
        })?),
        _ => Err(Error::Input("give --file, --cube or --arr".into())),
    }
}

fn strings(v: &[wills_core::Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn arrangement_out(config: Value, a: &Arrangement, extra: Option<Value>) -> Result<Outcome> {
    let mut v = serde_json::to_value(a.to_json())?;
    if let (Some(obj), Some(extra)) = (v.as_object_mut(), extra) {
        obj.insert("record".into(), extra);
    }
    json_out(config, &v)
}

fn matroid_cmd(cmd: MatroidCmd, limits: &Limits) -> Result<Outcome> {
    match cmd {
        MatroidCmd::Char(input) => {
            let m = load_matroid(&input)?;
            let cp = m.char_poly(limits)?;
            let result = json!({
                "rank": m.rank(),
                "chi": cp.chi,
                "psi": cp.psi,
                "gamma": strings(&cp.gamma),
                "log_concave": is_log_concave(&cp.gamma)?,
                "unimodal": is_unimodal(&cp.gamma),
            });
            json_out(
                json!({ "command": "matroid char", "input": input }),
                &result,
            )
        }
        MatroidCmd::Ingleton {
            input,
            samples,
            seed,
        } => {
            let m = load_matroid(&input)?;
            let seed = resolve_seed(seed);
            let report = m.ingleton_check(limits, samples, seed)?;
            json_out(
                json!({ "command": "matroid ingleton", "input": input, "samples": samples, "seed": seed }),
                &report,
            )
        }
        MatroidCmd::Catalog { name } => match name {
            Some(n) => json_out(
                json!({ "command": "matroid catalog", "name": n }),
                &matroid::catalog(&n)?.to_json()?,
            ),
            None => json_out(
                json!({ "command": "matroid catalog" }),
                &json!({ "names": ["uniform(r,n)", "boolean(n)", "graphic-complete(m)", "fano", "vamos"] }),
            ),
        },
    }
}

fn arr_cmd(cmd: ArrCmd, limits: &Limits) -> Result<Outcome> {
    match cmd {
        ArrCmd::Poset(input) => {
            let a = load_arr(&input)?;
            let p = a.intersection_poset(limits)?;
            let nodes: Vec<Value> = p
                .nodes
                .iter()
                .map(|n| {
                    json!({
                        "dim": n.dim,
                        "codim": n.flat.codim(),
                        "mobius": n.mobius,
                        "elements": (0..a.len()).filter(|&i| n.mask >> i & 1 == 1).collect::<Vec<_>>(),
                    })
                })
                .collect();
            json_out(
                json!({ "command": "arr poset", "input": input }),
                &json!({ "ambient": a.ambient(), "is_lattice": p.is_lattice(), "nodes": nodes }),
            )
        }
        ArrCmd::Char(input) => {
            let a = load_arr(&input)?;
            json_out(
                json!({ "command": "arr char", "input": input }),
                &a.char_poly(limits)?,
            )
        }
        ArrCmd::CheckC { input, c } => {
            let a = load_arr(&input)?;
            let is_c = a.is_c_arrangement(c, limits)?;
            json_out(
                json!({ "command": "arr check-c", "input": input, "c": c }),
                &json!({ "c": c, "is_c_arrangement": is_c }),
            )
        }
        ArrCmd::Delete { input, element } => {
            let a = load_arr(&input)?.delete(element)?;
            arrangement_out(
                json!({ "command": "arr delete", "input": input, "element": element }),
                &a,
                None,
            )
        }
        ArrCmd::Contract { input, element } => {
            let a = load_arr(&input)?.contract(element)?;
            arrangement_out(
                json!({ "command": "arr contract", "input": input, "element": element }),
                &a,
                None,
            )
        }
    }
}

fn zono_cmd(cmd: ZonoCmd, limits: &Limits) -> Result<Outcome> {
    match cmd {
        ZonoCmd::Wills(input) => {
            let z = load_zono(&input)?;
            let w = z.intrinsic_volumes();
            let result = json!({
                "ambient": w.ambient,
                "nu": w.nu,
                "nu_exact": w.exact.as_deref().map(strings),
                "wills": match w.wills_exact() {
                    Some(p) => json!(strings(p.coeffs())),
                    None => json!(w.wills_coeffs()),
                },
            });
            json_out(json!({ "command": "zono wills", "input": input }), &result)
        }
        ZonoCmd::Intrinsic { input, method } => {
            let z = load_zono(&input)?;
            let w = match method {
                Method::Subset => z.intrinsic_volumes(),
                Method::Belt => z.intrinsic_volumes_belt(limits)?,
            };
            let mut s = String::from("i,nu,exact\n");
            for (i, v) in w.nu.iter().enumerate() {
                let exact = w
                    .exact
                    .as_ref()
                    .map(|e| format_rational(&e[i]))
                    .unwrap_or_default();
                s += &format!("{i},{v:.16e},{exact}\n");
            }
            Ok(csv_out(
                json!({ "command": "zono intrinsic", "input": input, "method": method }),
                s,
            ))
        }
    }
}

fn disco_cmd(cmd: DiscoCmd) -> Result<Outcome> {
    let DiscoCmd::Estimate {
        input,
        samples,
        grid,
        seed,
        volumes_out,
    } = cmd;
    let a = load_arr(&input)?;
    let body = cb::discotope_of(&a);
    let seed = resolve_seed(seed);
    let grid = if grid.is_empty() {
        cb::default_grid(&body)
    } else {
        grid
    };
    let est = cb::estimate_intrinsic_volumes_mc(&body, &grid, samples, seed)?;
    if est.flagged > 0 {
        eprintln!(
            "warning: {} samples could not be placed on the grid and were dropped",
            est.flagged
        );
    }
    let config = json!({ "command": "disco estimate", "input": input, "samples": samples, "grid": grid, "seed": seed });
    if let Some(p) = volumes_out {
        write_file(&p, &format!("# config {config}\n{}", est.volumes_csv()))?;
    }
    Ok(csv_out(config, est.nu_csv()))
}

fn extend_cmd(cmd: ExtendCmd, limits: &Limits) -> Result<Outcome> {
    match cmd {
        ExtendCmd::Trivial { input, l } => {
            let a = ext::trivial_ext(&load_arr(&input)?, l);
            arrangement_out(
                json!({ "command": "extend trivial", "input": input, "l": l }),
                &a,
                None,
            )
        }
        ExtendCmd::Product { input, k, h, seed } => {
            let seed = resolve_seed(seed);
            let (a, rec) = ext::large_product_ext(&load_arr(&input)?, k, h, seed, limits)?;
            let config = json!({ "command": "extend product", "input": input, "k": k, "h": h, "seed": seed });
            arrangement_out(config, &a, Some(serde_json::to_value(rec)?))
        }
        ExtendCmd::Semiflex {
            input,
            e,
            k,
            h,
            seed,
        } => {
            let seed = resolve_seed(seed);
            let (a, rec) = ext::semiflexible_ext(&load_arr(&input)?, e, k, h, seed, limits)?;
            let config = json!({ "command": "extend semiflex", "input": input, "e": e, "k": k, "h": h, "seed": seed });
            arrangement_out(config, &a, Some(serde_json::to_value(rec)?))
        }
        ExtendCmd::Composite {
            input,
            k,
            h,
            l,
            order,
            seed,
        } => {
            let a = load_arr(&input)?;
            let order = if order.is_empty() {
                (0..a.len()).collect()
            } else {
                order
            };
            let seed = resolve_seed(seed);
            let (b, rec) = ext::composite_sfe(&a, &order, k, h, l, seed, limits)?;
            let config = json!({
                "command": "extend composite", "input": input, "k": k, "h": h, "l": l, "order": order, "seed": seed,
            });
            arrangement_out(config, &b, Some(serde_json::to_value(rec)?))
        }
        ExtendCmd::LimitProbe {
            input,
            e,
            k,
            hs,
            seed,
        } => {
            let seed = resolve_seed(seed);
            let rows = ext::flex_limit_probe(&load_arr(&input)?, e, k, &hs, seed, limits)?;
            let config = json!({ "command": "extend limit-probe", "input": input, "e": e, "k": k, "hs": hs, "seed": seed });
            json_out(config, &rows)
        }
    }
}

fn verify_cmd(cmd: VerifyCmd, limits: &Limits) -> Result<Outcome> {
    match cmd {
        VerifyCmd::LemmaProduct { input, k, h, seed } => {
            let seed = resolve_seed(seed);
            let r = ext::verify_large_product(&load_arr(&input)?, k, h, seed, limits)?;
            let config = json!({ "command": "verify lemma-product", "input": input, "k": k, "h": h, "seed": seed });
            json_check(config, &r, r.is_zero())
        }
        VerifyCmd::LemmaSemiflex {
            input,
            e,
            k,
            h,
            seed,
        } => {
            let seed = resolve_seed(seed);
            let r = ext::verify_semiflexible(&load_arr(&input)?, e, k, h, seed, limits)?;
            let config = json!({ "command": "verify lemma-semiflex", "input": input, "e": e, "k": k, "h": h, "seed": seed });
            let ok = r.three_term.is_zero() && r.derived.is_zero();
            json_check(config, &r, ok)
        }
        VerifyCmd::DelContr { input, element } => {
            let a = load_arr(&input)?;
            let which: Vec<usize> = match element {
                Some(i) => vec![i],
                None => (0..a.len()).collect(),
            };
            let rows = which
                .iter()
                .map(|&i| {
                    let r = arrangement::del_contr_residual(&a, i, limits)?;
                    Ok((i, r))
                })
                .collect::<Result<Vec<_>>>()?;
            let ok = rows.iter().all(|(_, r)| r.is_zero());
            let result: Vec<Value> = rows
                .into_iter()
                .map(|(i, r)| json!({ "element": i, "lhs": r.lhs, "rhs": r.rhs, "residual": r.residual }))
                .collect();
            json_check(
                json!({ "command": "verify del-contr", "input": input, "element": element }),
                &result,
                ok,
            )
        }
        VerifyCmd::CRelation { input, c } => {
            let r = arrangement::c_relation(&load_arr(&input)?, c, limits)?;
            let ok = r.holds();
            json_check(
                json!({ "command": "verify c-relation", "input": input, "c": c }),
                &r,
                ok,
            )
        }
        VerifyCmd::LogConcave {
            name,
            matroid_file,
            zono_file,
            cube,
            slack,
        } => {
            let config = json!({
                "command": "verify log-concave", "name": name, "matroid_file": matroid_file,
                "zono_file": zono_file, "cube": cube, "slack": slack,
            });
            let mut result = serde_json::Map::new();
            let mut ok = true;
            if name.is_some() || matroid_file.is_some() {
                let m = load_matroid(&MatroidIn {
                    name,
                    file: matroid_file,
                })?;
                let gamma = m.char_poly(limits)?.gamma;
                let lc = is_log_concave(&gamma)?;
                ok &= lc.holds();
                result.insert(
                    "whitney".into(),
                    json!({ "gamma": strings(&gamma), "result": lc }),
                );
            }
            if zono_file.is_some() || cube.is_some() {
                let z = load_zono(&ZonoIn {
                    file: zono_file,
                    cube,
                    arr: None,
                })?;
                let w = z.intrinsic_volumes();
                let (nu, steiner) = w.log_concavity(slack)?;
                let wills = is_log_concave_f64(&w.wills_coeffs(), slack)?;
                ok &= nu.holds() && steiner.holds() && wills.holds();
                result.insert(
                    "intrinsic_volumes".into(),
                    json!({ "nu": w.nu, "nu_result": nu, "steiner": steiner, "wills": wills }),
                );
            }
            if result.is_empty() {
                return Err(Error::Input(
                    "give a matroid (--name, --matroid-file) or a zonotope (--zono-file, --cube)"
                        .into(),
                ));
            }
            json_check(config, &Value::Object(result), ok)
        }
    }
}

fn experiment_cmd(cmd: ExperimentCmd, limits: &Limits) -> Result<Outcome> {
    match cmd {
        ExperimentCmd::Uniform {
            n,
            d,
            samples,
            seed,
            samples_out,
        } => {
            let seed = resolve_seed(seed);
            let rows = conc::uniform_matroid_experiment(n, &d, samples, seed)?;
            let config = json!({ "command": "experiment uniform", "n": n, "d": d, "samples": samples, "seed": seed });
            if let Some(p) = samples_out {
                let mut s = format!("# config {config}\n");
                for r in &rows {
                    let cfg = ExperimentConfig {
                        d: r.d,
                        n,
                        c: 1,
                        k: 0,
                        h: 1,
                        l: 0,
                        num_samples: samples,
                        lambda_grid: Vec::new(),
                        mc_budget: 0,
                        seed,
                    };
                    let body = conc::samples_csv(&cfg.hash(), &r.samples);
                    let (header, rows) = body.split_once('\n').expect("header line");
                    if !s.contains(header) {
                        s += header;
                        s.push('\n');
                    }
                    s += rows;
                }
                write_file(&p, &s)?;
            }
            Ok(csv_out(config, conc::uniform_csv(&rows)))
        }
        ExperimentCmd::Levy {
            d,
            eps,
            samples,
            seed,
        } => {
            let seed = resolve_seed(seed);
            let rows = conc::levy_demo(d, &eps, samples, seed)?;
            let config = json!({ "command": "experiment levy", "d": d, "eps": eps, "samples": samples, "seed": seed });
            Ok(csv_out(config, conc::levy_csv(&rows)))
        }
        ExperimentCmd::Orthogonal {
            d,
            k,
            eps,
            samples,
            seed,
        } => {
            let seed = resolve_seed(seed);
            let mut s = String::from("d,k,eps,measure\n");
            for &dd in &d {
                let m = conc::orthogonal_concentration_demo(dd, k, eps, samples, seed)?;
                s += &format!("{dd},{k},{eps:.16e},{m:.16e}\n");
            }
            let config = json!({ "command": "experiment orthogonal", "d": d, "k": k, "eps": eps, "samples": samples, "seed": seed });
            Ok(csv_out(config, s))
        }
        ExperimentCmd::Main {
            input,
            k,
            h,
            l,
            samples,
            mc_budget,
            grid,
            seed,
            samples_out,
        } => {
            let a = load_arr(&input)?;
            let seed = resolve_seed(seed);
            let mut cfg = ExperimentConfig::for_arrangement(&a, k, samples, seed);
            cfg.h = h.unwrap_or(cfg.h);
            cfg.l = l.unwrap_or(cfg.l);
            cfg.mc_budget = mc_budget;
            cfg.lambda_grid = grid;
            let report = conc::theorem_main_experiment(&a, &cfg, limits)?;
            let config = json!({ "command": "experiment main", "input": input, "experiment": cfg });
            if let Some(p) = samples_out {
                write_file(
                    &p,
                    &format!(
                        "# config {config}\n{}",
                        conc::samples_csv(&report.config_hash, &report.samples)
                    ),
                )?;
            }
            Ok(csv_out(config, report.csv()))
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .map_err(|e| Error::Input(format!("cannot size the worker pool: {e}")))?;
    }
    let limits = Limits::from_env();
    match cli.cmd {
        Cmd::Matroid { cmd } => matroid_cmd(cmd, &limits),
        Cmd::Arr { cmd } => arr_cmd(cmd, &limits),
        Cmd::Zono { cmd } => zono_cmd(cmd, &limits),
        Cmd::Disco { cmd } => disco_cmd(cmd),
        Cmd::Extend { cmd } => extend_cmd(cmd, &limits),
        Cmd::Verify { cmd } => verify_cmd(cmd, &limits),
        Cmd::Experiment { cmd } => experiment_cmd(cmd, &limits),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    let outcome = match run(cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = match &outcome.output {
        Output::Json(v) => format!("{}\n", serde_json::to_string_pretty(v).expect("valid JSON")),
        Output::Csv(s) => s.clone(),
    };
    match out {
        Some(p) => {
            if let Err(e) = write_file(&p, &text) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if outcome.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
