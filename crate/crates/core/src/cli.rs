//! Command-line surface: domain specs in; distance tables, figure data, and
//! reports out.  All output formats are deterministic for a fixed
//! `(spec, seed, version)` triple: CSV grids carry a header row and 17
//! significant digits, JSON documents use stable (sorted) key order.

use crate::domains::convexity::{conformal_convexity_report, ConvexityVerdict};
use crate::domains::{ConcreteDomain, Exit};
use crate::markowitz::{
    affine_mobius_hyperplane, chain_length, delta_diamond_exact, delta_lower_interval,
    delta_upper, f_flat, hb_reference_distance, ChainBudget, DistanceEstimate, LightlikeChain,
    LowerCertificate,
};
use crate::models::{MobiusHyperplane, StereoChart};
use crate::{Error, Result, Tolerances};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};
use std::path::PathBuf;

// ---------------------------------------------------------------------------
// Domain-spec schema.
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
struct DomainSpecFile {
    schema: u32,
    ambient: AmbientSpec,
    #[serde(flatten)]
    node: DomainNode,
}

#[derive(Debug, Deserialize)]
struct AmbientSpec {
    p: usize,
    q: usize,
}

#[derive(Debug, Deserialize)]
struct DomainNode {
    #[serde(default)]
    kind: Option<String>,
    #[serde(default)]
    params: Option<Value>,
    #[serde(default)]
    boolean: Option<BooleanNode>,
}

#[derive(Debug, Deserialize)]
struct BooleanNode {
    op: String,
    children: Vec<DomainNode>,
}

fn param_f64(params: &Value, key: &str) -> Result<f64> {
    params
        .get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::Spec(format!("missing numeric param `{key}`")))
}

fn param_usize(params: &Value, key: &str) -> Result<usize> {
    params
        .get(key)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| Error::Spec(format!("missing integer param `{key}`")))
}

fn param_vec(params: &Value, key: &str) -> Result<Vec<f64>> {
    params
        .get(key)
        .and_then(Value::as_array)
        .map(|a| a.iter().filter_map(Value::as_f64).collect::<Vec<f64>>())
        .ok_or_else(|| Error::Spec(format!("missing array param `{key}`")))
}

fn build_node(node: &DomainNode, ambient: &AmbientSpec) -> Result<ConcreteDomain> {
    if let Some(b) = &node.boolean {
        let children = b
            .children
            .iter()
            .map(|c| build_node(c, ambient))
            .collect::<Result<Vec<_>>>()?;
        if children.is_empty() {
            return Err(Error::Spec("boolean node needs children".into()));
        }
        return match b.op.as_str() {
            "union" => Ok(ConcreteDomain::Union(children)),
            "intersection" => Ok(ConcreteDomain::Intersection(children)),
            other => Err(Error::Spec(format!("unknown boolean op `{other}`"))),
        };
    }
    let kind = node
        .kind
        .as_deref()
        .ok_or_else(|| Error::Spec("node needs `kind` or `boolean`".into()))?;
    let empty = json!({});
    let params = node.params.as_ref().unwrap_or(&empty);
    let d = match kind {
        "euclidean_ball" | "EuclideanBall" => ConcreteDomain::EuclideanBall {
            center: param_vec(params, "center")?,
            radius: param_f64(params, "radius")?,
        },
        "half_space_future" | "HalfSpaceFuture" => ConcreteDomain::HalfSpaceFuture {
            base: param_vec(params, "base")?,
            normal: param_vec(params, "normal")?,
        },
        "diamond" | "DiamondDomain" => ConcreteDomain::Diamond {
            a: param_vec(params, "a")?,
            b: param_vec(params, "b")?,
        },
        "pq_ball" | "PQBall" => ConcreteDomain::PQBall {
            p: ambient.p,
            q: ambient.q,
            radius: param_f64(params, "radius")?,
        },
        "hb" | "HBDomain" => ConcreteDomain::HB {
            n: ambient.q,
            l: param_usize(params, "l")?,
        },
        "eps_cone_complement" | "EpsConeComplement" => ConcreteDomain::EpsConeComplement {
            n: ambient.q,
            eps: param_f64(params, "eps")?,
            apex: param_vec(params, "apex")?,
        },
        "slit" | "SlitDomain" => ConcreteDomain::Slit,
        "two_half_future_union" | "TwoHalfFutureUnion" => ConcreteDomain::TwoHalfFutureUnion {
            n: ambient.q,
            tilt: param_f64(params, "tilt")?,
        },
        "hyperboloid_shell" | "HyperboloidShell" => ConcreteDomain::HyperboloidShell,
        "full_space" | "FullSpace" => ConcreteDomain::FullSpace {
            p: ambient.p,
            q: ambient.q,
        },
        other => return Err(Error::Spec(format!("unknown domain kind `{other}`"))),
    };
    let sig = d.space().signature;
    if sig.p != ambient.p || sig.q != ambient.q {
        return Err(Error::Spec(format!(
            "domain signature ({},{}) does not match ambient ({},{})",
            sig.p, sig.q, ambient.p, ambient.q
        )));
    }
    Ok(d)
}

/// Parse a versioned JSON domain spec into a [`ConcreteDomain`].
pub fn parse_domain_spec(text: &str) -> Result<ConcreteDomain> {
    let file: DomainSpecFile =
        serde_json::from_str(text).map_err(|e| Error::Spec(format!("malformed spec: {e}")))?;
    if file.schema != 1 {
        return Err(Error::Spec(format!(
            "unsupported schema version {}",
            file.schema
        )));
    }
    build_node(&file.node, &file.ambient)
}

pub fn load_domain_spec(path: &std::path::Path) -> Result<ConcreteDomain> {
    parse_domain_spec(&std::fs::read_to_string(path)?)
}

// ---------------------------------------------------------------------------
// Formatting helpers.
// ---------------------------------------------------------------------------

/// 17 significant digits, locale-independent; infinities spelled out.
pub fn fmt_float(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.16e}")
}

fn csv_row(fields: &[String]) -> String {
    fields.join(",")
}

// ---------------------------------------------------------------------------
// Run configuration.
// ---------------------------------------------------------------------------

/// Options shared by all subcommands.
#[derive(Debug, Args, Clone)]
pub struct CommonOpts {
    /// Path of the JSON domain spec.
    #[arg(long)]
    pub domain: Option<PathBuf>,
    /// RNG seed; every random choice flows from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Maximum number of chain links.
    #[arg(long = "budget-m", default_value_t = 4)]
    pub budget_m: usize,
    /// Output path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Tolerance overrides, `name=value`, repeatable.
    #[arg(long = "tol")]
    pub tol: Vec<String>,
}

impl CommonOpts {
    pub fn tolerances(&self) -> Result<Tolerances> {
        let mut t = Tolerances::default();
        for entry in &self.tol {
            let (name, value) = entry
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("bad --tol entry `{entry}`")))?;
            let v: f64 = value
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad --tol value `{value}`")))?;
            t.set(name, v)?;
        }
        Ok(t)
    }

    pub fn budget(&self) -> ChainBudget {
        ChainBudget {
            max_links: self.budget_m.max(1),
            seed: self.seed,
            ..ChainBudget::default()
        }
    }

    pub fn require_domain(&self) -> Result<ConcreteDomain> {
        let path = self
            .domain
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("--domain is required".into()))?;
        load_domain_spec(path)
    }
}

#[derive(Debug, Parser)]
#[command(name = "markgeo", version, about = "Conformal pseudodistance engine")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the infinitesimal functional F on a sampled grid (CSV).
    Functional {
        #[command(flatten)]
        common: CommonOpts,
        /// Base points in the grid.
        #[arg(long = "base-points", default_value_t = 16)]
        base_points: usize,
        /// Lightlike directions per base point.
        #[arg(long, default_value_t = 8)]
        directions: usize,
    },
    /// Certified distance bracket between two chart points (JSON).
    Distance {
        #[command(flatten)]
        common: CommonOpts,
        /// First point, comma-separated chart coordinates.
        #[arg(long)]
        x: String,
        /// Second point, comma-separated chart coordinates.
        #[arg(long)]
        y: String,
    },
    /// Figure data grids (CSV).
    Figure {
        #[command(flatten)]
        common: CommonOpts,
        /// Figure id: ball-levelsets | slit-degeneracy | hb-bilipschitz | diamond-pinch.
        #[arg(long)]
        figure: String,
        /// Grid resolution (>= 8).
        #[arg(long, default_value_t = 32)]
        resolution: usize,
    },
    /// Conformal convexity report for a domain (JSON).
    Convexity {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run the full acceptance suite; exit code 0 iff all criteria pass.
    Suite {
        #[command(flatten)]
        common: CommonOpts,
    },
}

pub fn parse_point(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad coordinate `{s}`")))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Subcommand implementations (pure: return the output document).
// ---------------------------------------------------------------------------

/// CSV of `(x, v, F)` rows over seeded base points and unit lightlike
/// directions.
pub fn cmd_functional(
    domain: &ConcreteDomain,
    base_points: usize,
    directions: usize,
    seed: u64,
) -> Result<String> {
    let space = domain.space();
    let dim = space.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    let header: Vec<String> = (0..dim)
        .map(|i| format!("x{i}"))
        .chain((0..dim).map(|i| format!("v{i}")))
        .chain(std::iter::once("F".to_string()))
        .collect();
    out.push_str(&csv_row(&header));
    out.push('\n');
    for _ in 0..base_points {
        let x = domain.sample_interior(&mut rng);
        for _ in 0..directions {
            let v = crate::bilinear::random_isotropic(space, &mut rng);
            let nn = v.euclid_norm();
            let unit: Vec<f64> = v.coords.iter().map(|c| c / nn).collect();
            let f = f_flat(domain, &x, &unit)?;
            let fields: Vec<String> = x
                .iter()
                .chain(unit.iter())
                .map(|&c| fmt_float(c))
                .chain(std::iter::once(fmt_float(f)))
                .collect();
            out.push_str(&csv_row(&fields));
            out.push('\n');
        }
    }
    Ok(out)
}

/// Best validated hyperplane-pair lower bound available for the domain kind;
/// `(0, None)` when no certificate is known.
pub fn lower_bound_for(
    domain: &ConcreteDomain,
    x: &[f64],
    y: &[f64],
) -> (f64, Option<(MobiusHyperplane, MobiusHyperplane)>) {
    let sig = domain.space().signature;
    let chart = match StereoChart::canonical(sig.p, sig.q) {
        Ok(c) => c,
        Err(_) => return (0.0, None),
    };
    let mut best: (f64, Option<(MobiusHyperplane, MobiusHyperplane)>) = (0.0, None);
    let mut try_pair = |h1: MobiusHyperplane, h2: MobiusHyperplane| {
        if let Ok(v) = delta_lower_interval(domain, x, y, &h1, &h2) {
            if v > best.0 {
                best = (v, Some((h1, h2)));
            }
        }
    };
    match domain {
        ConcreteDomain::HalfSpaceFuture { base, normal } => {
            let offset: f64 = base.iter().zip(normal).map(|(a, b)| a * b).sum();
            if let (Ok(h1), Ok(h2)) = (
                affine_mobius_hyperplane(&chart, normal, offset),
                MobiusHyperplane::new(chart.pole.clone()),
            ) {
                try_pair(h1, h2);
            }
        }
        ConcreteDomain::Diamond { a, b } if sig.p == 1 && sig.q == 1 => {
            // Null-coordinate planes through the diamond corners.
            let u_of = |z: &[f64]| z[1] + z[0];
            let w_of = |z: &[f64]| z[1] - z[0];
            let pairs = [
                ([1.0, 1.0], u_of(a).min(u_of(b)), u_of(a).max(u_of(b))),
                ([-1.0, 1.0], w_of(a).min(w_of(b)), w_of(a).max(w_of(b))),
            ];
            for (n, lo, hi) in pairs {
                if let (Ok(h1), Ok(h2)) = (
                    affine_mobius_hyperplane(&chart, &n, lo),
                    affine_mobius_hyperplane(&chart, &n, hi),
                ) {
                    try_pair(h1, h2);
                }
            }
        }
        _ => {}
    }
    best
}

fn chain_json(chain: &LightlikeChain) -> Value {
    let links: Vec<Value> = chain
        .links
        .iter()
        .map(|l| {
            let exit = |e: Exit| -> Value {
                match e {
                    Exit::Finite(v) => json!({ "finite": v }),
                    Exit::Infinite => json!("infinite"),
                }
            };
            json!({
                "base": l.base,
                "dir": l.dir,
                "tau_a": l.tau_a,
                "tau_b": l.tau_b,
                "span": { "neg": exit(l.span.neg), "pos": exit(l.span.pos) },
                "cost": l.cost(),
            })
        })
        .collect();
    json!(links)
}

/// JSON distance bracket with serialized certificates.
pub fn cmd_distance(
    domain: &ConcreteDomain,
    x: &[f64],
    y: &[f64],
    budget: &ChainBudget,
) -> Result<String> {
    let (lower, pair) = lower_bound_for(domain, x, y);
    let doc = match delta_upper(domain, x, y, budget) {
        Ok((upper, chain)) => {
            let cert = match &pair {
                Some((h1, h2)) => LowerCertificate::HyperplanePair(
                    Box::new(h1.clone()),
                    Box::new(h2.clone()),
                ),
                None => LowerCertificate::None,
            };
            let est = DistanceEstimate::new(lower, upper, Some(chain), cert)?;
            let chain = est.upper_chain.as_ref().unwrap();
            json!({
                "schema": 1,
                "status": "ok",
                "lower": est.lower,
                "upper": est.upper,
                "chain": chain_json(chain),
                "hyperplanes": pair.as_ref().map(|(h1, h2)| {
                    json!([h1.normal.coords, h2.normal.coords])
                }),
            })
        }
        Err(Error::NoFeasibleChain(_)) => json!({
            "schema": 1,
            "status": "no_feasible_chain",
            "lower": lower,
            "upper": Value::Null,
            "chain": Value::Null,
            "hyperplanes": pair.as_ref().map(|(h1, h2)| {
                json!([h1.normal.coords, h2.normal.coords])
            }),
        }),
        Err(e) => return Err(e),
    };
    serde_json::to_string_pretty(&doc)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::Numerical(format!("serialization failed: {e}")))
}

/// Re-validate a JSON certificate produced by [`cmd_distance`]: the chain
/// re-scored by [`chain_length`] must reproduce the reported upper value.
pub fn revalidate_certificate(domain: &ConcreteDomain, doc: &str) -> Result<f64> {
    let v: Value =
        serde_json::from_str(doc).map_err(|e| Error::Spec(format!("bad certificate: {e}")))?;
    let upper = v
        .get("upper")
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::Spec("certificate has no upper value".into()))?;
    let links = v
        .get("chain")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Spec("certificate has no chain".into()))?;
    let mut chain = LightlikeChain::default();
    for l in links {
        let get_vec = |key: &str| -> Result<Vec<f64>> {
            l.get(key)
                .and_then(Value::as_array)
                .map(|a| a.iter().filter_map(Value::as_f64).collect())
                .ok_or_else(|| Error::Spec(format!("chain link missing `{key}`")))
        };
        let base = get_vec("base")?;
        let dir = get_vec("dir")?;
        let tau_a = l.get("tau_a").and_then(Value::as_f64).unwrap_or(0.0);
        let tau_b = l
            .get("tau_b")
            .and_then(Value::as_f64)
            .ok_or_else(|| Error::Spec("chain link missing `tau_b`".into()))?;
        // Spans are recomputed from the domain, not trusted from the file.
        let span = domain.ray_exit(&base, &dir)?;
        chain.links.push(crate::markowitz::ChainLink {
            base,
            dir,
            span,
            tau_a,
            tau_b,
        });
    }
    let rescored = chain_length(&chain)?;
    if (rescored - upper).abs() > 1e-12 * (1.0 + upper.abs()) {
        return Err(Error::Numerical(format!(
            "certificate re-score {rescored} does not reproduce reported upper {upper}"
        )));
    }
    Ok(rescored)
}

/// Figure data grids.
pub fn cmd_figure(figure: &str, resolution: usize, seed: u64, budget_m: usize) -> Result<String> {
    if resolution < 8 {
        return Err(Error::InvalidArgument(format!(
            "figure resolution must be >= 8, got {resolution}"
        )));
    }
    let mut out = String::new();
    // Light per-point budget for grid figures.
    let grid_budget = ChainBudget {
        max_links: budget_m.max(2),
        seeds: 6,
        refine_iters: 80,
        graph_res: 12,
        seed,
    };
    match figure {
        "ball-levelsets" => {
            let d = ConcreteDomain::EuclideanBall {
                center: vec![0.0, 0.0],
                radius: 1.0,
            };
            out.push_str("angle,radius,delta\n");
            for i in 0..resolution {
                let angle = 2.0 * std::f64::consts::PI * i as f64 / resolution as f64;
                for j in 0..resolution {
                    let r = 0.9 * (j + 1) as f64 / resolution as f64;
                    let p = vec![r * angle.cos(), r * angle.sin()];
                    let val = delta_upper(&d, &[0.0, 0.0], &p, &grid_budget)
                        .map(|(v, _)| v)
                        .unwrap_or(f64::INFINITY);
                    out.push_str(&csv_row(&[
                        fmt_float(angle),
                        fmt_float(r),
                        fmt_float(val),
                    ]));
                    out.push('\n');
                }
            }
        }
        "slit-degeneracy" => {
            // Fixed distinct points of the degenerate segment of the slit
            // domain, chart coordinates of (u,w) = (0, ±0.6).
            let d = ConcreteDomain::Slit;
            let x = [-0.3, 0.3];
            let y = [0.3, -0.3];
            out.push_str("budget_m,seeds,upper\n");
            for m in 1..=budget_m.max(4) {
                let b = ChainBudget {
                    max_links: m,
                    seeds: 32,
                    refine_iters: 200,
                    graph_res: 24,
                    seed,
                };
                let val = delta_upper(&d, &x, &y, &b)
                    .map(|(v, _)| v)
                    .unwrap_or(f64::INFINITY);
                out.push_str(&csv_row(&[
                    m.to_string(),
                    b.seeds.to_string(),
                    fmt_float(val),
                ]));
                out.push('\n');
            }
        }
        "hb-bilipschitz" => {
            let d = ConcreteDomain::HB { n: 2, l: 1 };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            out.push_str("x0,x1,x2,y0,y1,y2,upper,reference,ratio\n");
            let b = ChainBudget {
                max_links: budget_m.max(4),
                seeds: 16,
                refine_iters: 120,
                graph_res: 12,
                seed,
            };
            for _ in 0..resolution {
                let x = d.sample_interior(&mut rng);
                let y = d.sample_interior(&mut rng);
                let reference = hb_reference_distance(2, 1, &x, &y)?;
                if reference < 0.1 {
                    continue;
                }
                let upper = delta_upper(&d, &x, &y, &b)
                    .map(|(v, _)| v)
                    .unwrap_or(f64::INFINITY);
                let fields: Vec<String> = x
                    .iter()
                    .chain(y.iter())
                    .map(|&c| fmt_float(c))
                    .chain([
                        fmt_float(upper),
                        fmt_float(reference),
                        fmt_float(upper / reference),
                    ])
                    .collect();
                out.push_str(&csv_row(&fields));
                out.push('\n');
            }
        }
        "diamond-pinch" => {
            let d = ConcreteDomain::Diamond {
                a: vec![-1.0, 0.0],
                b: vec![1.0, 0.0],
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            out.push_str("lower,upper,oracle\n");
            let b = ChainBudget {
                max_links: budget_m.max(4),
                seeds: 16,
                refine_iters: 120,
                graph_res: 16,
                seed,
            };
            for _ in 0..resolution {
                let x = d.sample_interior(&mut rng);
                let y = d.sample_interior(&mut rng);
                let (lower, _) = lower_bound_for(&d, &x, &y);
                let upper = delta_upper(&d, &x, &y, &b)
                    .map(|(v, _)| v)
                    .unwrap_or(f64::INFINITY);
                let oracle = diamond_box_oracle(&x, &y);
                out.push_str(&csv_row(&[
                    fmt_float(lower),
                    fmt_float(upper),
                    fmt_float(oracle),
                ]));
                out.push('\n');
            }
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown figure id `{other}`"
            )))
        }
    }
    Ok(out)
}

/// Exact factor-max oracle of the standard (1,1) diamond (null box):
/// `max(d_I(u), d_I(w))` with the null-coordinate box normalized to (-1,1)².
pub fn diamond_box_oracle(x: &[f64], y: &[f64]) -> f64 {
    let map = |z: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let u = z[1] + z[0];
        let w = z[1] - z[0];
        let pt = |c: f64| {
            let r = 2.0 * c.atanh();
            vec![r.cosh(), r.sinh()]
        };
        (pt(u), pt(w))
    };
    let (xp, xq) = map(x);
    let (yp, yq) = map(y);
    delta_diamond_exact(&xp, &yp, &xq, &yq).unwrap_or(f64::NAN)
}

/// JSON conformal-convexity report.
pub fn cmd_convexity(domain: &ConcreteDomain, seed: u64) -> Result<String> {
    let report = conformal_convexity_report(domain, 8, 200, seed);
    let samples: Vec<Value> = report
        .samples
        .iter()
        .map(|s| {
            json!({
                "boundary_point": s.boundary_point,
                "margin": s.hyperplane.as_ref().map(|(_, m)| m),
                "normal": s.hyperplane.as_ref().map(|(h, _)| h.normal.coords.clone()),
            })
        })
        .collect();
    let (verdict, counterexample) = match &report.verdict {
        ConvexityVerdict::LikelyConformallyConvex => ("likely_conformally_convex", None),
        ConvexityVerdict::CounterexamplePoint(p) => ("counterexample", Some(p.clone())),
    };
    let doc = json!({
        "schema": 1,
        "verdict": verdict,
        "counterexample": counterexample,
        "samples": samples,
    });
    serde_json::to_string_pretty(&doc)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::Numerical(format!("serialization failed: {e}")))
}

/// Dispatch a parsed command; returns the output document.
pub fn run(cli: &Cli) -> Result<(String, bool)> {
    match &cli.command {
        Command::Functional {
            common,
            base_points,
            directions,
        } => {
            let d = common.require_domain()?;
            common.tolerances()?;
            Ok((
                cmd_functional(&d, *base_points, *directions, common.seed)?,
                true,
            ))
        }
        Command::Distance { common, x, y } => {
            let d = common.require_domain()?;
            common.tolerances()?;
            let x = parse_point(x)?;
            let y = parse_point(y)?;
            Ok((cmd_distance(&d, &x, &y, &common.budget())?, true))
        }
        Command::Figure {
            common,
            figure,
            resolution,
        } => {
            common.tolerances()?;
            Ok((
                cmd_figure(figure, *resolution, common.seed, common.budget_m)?,
                true,
            ))
        }
        Command::Convexity { common } => {
            let d = common.require_domain()?;
            common.tolerances()?;
            Ok((cmd_convexity(&d, common.seed)?, true))
        }
        Command::Suite { common } => {
            let tol = common.tolerances()?;
            let results = crate::suite::run_all(&tol, common.seed);
            let mut out = String::new();
            let mut all_pass = true;
            for r in &results {
                all_pass &= r.passed;
                out.push_str(&r.summary_line());
                out.push('\n');
            }
            out.push_str(if all_pass {
                "suite: PASS\n"
            } else {
                "suite: FAIL\n"
            });
            Ok((out, all_pass))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BALL_SPEC: &str = r#"{
        "schema": 1,
        "ambient": { "p": 1, "q": 1 },
        "kind": "euclidean_ball",
        "params": { "center": [0.0, 0.0], "radius": 1.0 }
    }"#;

    #[test]
    fn parse_simple_and_boolean_specs() {
        let d = parse_domain_spec(BALL_SPEC).unwrap();
        assert!(d.contains(&[0.0, 0.0]));
        let boolean = r#"{
            "schema": 1,
            "ambient": { "p": 1, "q": 1 },
            "boolean": {
                "op": "intersection",
                "children": [
                    { "kind": "slit" },
                    { "kind": "diamond", "params": { "a": [-1.0, 0.0], "b": [1.0, 0.0] } }
                ]
            }
        }"#;
        let d = parse_domain_spec(boolean).unwrap();
        assert!(d.contains(&[0.0, 0.0]));
        assert!(!d.contains(&[0.0, 1.5]));
        // Malformed specs error.
        assert!(parse_domain_spec("{}").is_err());
        assert!(parse_domain_spec(&BALL_SPEC.replace("\"schema\": 1", "\"schema\": 2")).is_err());
        assert!(parse_domain_spec(&BALL_SPEC.replace("euclidean_ball", "mystery")).is_err());
    }

    #[test]
    fn functional_rows_and_determinism() {
        let d = parse_domain_spec(BALL_SPEC).unwrap();
        let a = cmd_functional(&d, 16, 8, 7).unwrap();
        let b = cmd_functional(&d, 16, 8, 7).unwrap();
        assert_eq!(a, b);
        let lines: Vec<&str> = a.lines().collect();
        assert_eq!(lines.len(), 1 + 128);
        assert!(lines[0].starts_with("x0,"));
        for row in &lines[1..] {
            let f: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
            assert!(f > 0.0);
        }
        // Full space: all F = 0.
        let full = ConcreteDomain::FullSpace { p: 1, q: 1 };
        let c = cmd_functional(&full, 4, 4, 7).unwrap();
        for row in c.lines().skip(1) {
            let f: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
            assert_eq!(f, 0.0);
        }
    }

    #[test]
    fn distance_json_and_revalidation() {
        let d = parse_domain_spec(BALL_SPEC).unwrap();
        let budget = ChainBudget {
            seeds: 8,
            ..ChainBudget::default()
        };
        let x = [0.0, 0.0];
        let y = [0.2, 0.3];
        let doc = cmd_distance(&d, &x, &y, &budget).unwrap();
        let doc2 = cmd_distance(&d, &x, &y, &budget).unwrap();
        assert_eq!(doc, doc2, "distance output must be byte-deterministic");
        let v: Value = serde_json::from_str(&doc).unwrap();
        assert_eq!(v["status"], "ok");
        assert!(v["upper"].as_f64().unwrap() > 0.0);
        revalidate_certificate(&d, &doc).unwrap();
        // x = y gives a zero bracket.
        let doc = cmd_distance(&d, &x, &x, &budget).unwrap();
        let v: Value = serde_json::from_str(&doc).unwrap();
        assert_eq!(v["lower"].as_f64().unwrap(), 0.0);
        assert_eq!(v["upper"].as_f64().unwrap(), 0.0);
    }

    #[test]
    fn figure_ids() {
        let csv = cmd_figure("diamond-pinch", 8, 3, 4).unwrap();
        assert!(csv.lines().count() > 1);
        assert!(csv.starts_with("lower,upper,oracle"));
        let csv = cmd_figure("slit-degeneracy", 8, 3, 4).unwrap();
        assert!(csv.starts_with("budget_m,"));
        assert!(cmd_figure("nonexistent", 8, 3, 4).is_err());
        assert!(cmd_figure("diamond-pinch", 4, 3, 4).is_err());
    }

    #[test]
    fn convexity_json() {
        let d = parse_domain_spec(BALL_SPEC).unwrap();
        let doc = cmd_convexity(&d, 17).unwrap();
        let v: Value = serde_json::from_str(&doc).unwrap();
        assert_eq!(v["verdict"], "likely_conformally_convex");
    }

    #[test]
    fn point_parsing() {
        assert_eq!(parse_point("0.5, -1").unwrap(), vec![0.5, -1.0]);
        assert!(parse_point("0.5,x").is_err());
    }
}
