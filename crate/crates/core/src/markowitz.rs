//! The infinitesimal functional `F`, lightlike chains, and certified
//! upper/lower estimates of the pseudodistance, together with exact oracles
//! (diamond, Hilbert, HB reference metric) and hyperbolicity probes.
//!
//! Estimates are one-sided by construction: upper bounds come only from
//! feasible chains (re-scored by [`chain_length`]), lower bounds only from
//! validated projective functionals or exact oracles.

use crate::bilinear::QuadraticSpace;
use crate::domains::{ConcreteDomain, Exit, RaySpan, SphereProductDomain};
use crate::geodesic::{maximal_ppl_curved, MetricField, ProjectiveDomain};
use crate::models::{MobiusHyperplane, StereoChart};
use crate::opt::nelder_mead;
use crate::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BinaryHeap;

/// Chart-metric tolerance for chain joints.
pub const JOINT_TOL: f64 = 1e-8;

// ---------------------------------------------------------------------------
// The infinitesimal functional.
// ---------------------------------------------------------------------------

/// Interval Poincaré density seen from the base point of a ray span:
/// `1/|tau-| + 1/tau+`, dropping unbounded terms; 0 when both ends are
/// unbounded; +inf when an end collapses onto the base point.
pub fn span_density(span: RaySpan) -> f64 {
    let mut f = 0.0;
    if let Exit::Finite(a) = span.neg {
        if a >= 0.0 {
            return f64::INFINITY;
        }
        f += 1.0 / (-a);
    }
    if let Exit::Finite(b) = span.pos {
        if b <= 0.0 {
            return f64::INFINITY;
        }
        f += 1.0 / b;
    }
    f
}

/// `F` on a flat-chart domain: the Poincaré density of the maximal in-domain
/// chord through `x` in direction `v`, in the affine parameter of `v`.
pub fn f_flat(domain: &ConcreteDomain, x: &[f64], v: &[f64]) -> Result<f64> {
    let span = domain.ray_exit(x, v)?;
    Ok(span_density(span))
}

/// `F` on a domain of the double cover `S^p x S^q` for a lightlike `v`
/// (equal per-factor speeds).  `x_p, x_q` are ambient unit vectors; `v_p,
/// v_q` tangent vectors with `|v_p| = |v_q|`.
pub fn f_sphere_product(
    domain: &SphereProductDomain,
    x_p: &[f64],
    x_q: &[f64],
    v_p: &[f64],
    v_q: &[f64],
) -> Result<f64> {
    if !domain.contains(x_p, x_q) {
        return Err(Error::OutsideDomain(format!("{x_p:?} x {x_q:?}")));
    }
    let norm = |v: &[f64]| v.iter().map(|c| c * c).sum::<f64>().sqrt();
    let sp = norm(v_p);
    let sq = norm(v_q);
    if (sp - sq).abs() > 1e-9 * (sp + sq) || sp == 0.0 {
        return Err(Error::InvalidArgument(
            "sphere-product F needs equal nonzero per-factor speeds".into(),
        ));
    }
    // Per-factor unit tangents, orthogonalized against the base points.
    let tangent = |x: &[f64], v: &[f64]| -> Vec<f64> {
        let d: f64 = x.iter().zip(v).map(|(a, b)| a * b).sum();
        let w: Vec<f64> = v.iter().zip(x).map(|(v, x)| v - d * x).collect();
        let n = norm(&w);
        w.iter().map(|c| c / n).collect()
    };
    let wp = tangent(x_p, v_p);
    let wq = tangent(x_q, v_q);
    let exit = domain.arc_exit(x_p, &wp, x_q, &wq);
    let l = exit.s_plus - exit.s_minus;
    if exit.full || l >= std::f64::consts::PI {
        return Ok(0.0);
    }
    let t = (0.5 * l).tan();
    let mid = 0.5 * (exit.s_plus + exit.s_minus);
    let u = (-mid).tan();
    let vg = (sp * sp + sq * sq).sqrt();
    Ok((vg / std::f64::consts::SQRT_2) * (1.0 + u * u) * 2.0 * t / (t * t - u * u))
}

/// Poincaré density of a bounded projective domain given the development
/// angles of its ends (base point at angle 0).
pub fn theta_density(theta_minus: f64, theta_plus: f64) -> f64 {
    let opening = theta_plus - theta_minus;
    if opening >= std::f64::consts::PI - 1e-12 {
        return 0.0;
    }
    let denom = (-theta_minus).sin() * theta_plus.sin();
    if denom <= 0.0 {
        return f64::INFINITY;
    }
    opening.sin() / denom
}

/// `F` via the projective-parameter ODE along the maximal PPL through
/// `(x, v)`: integrates the combined geodesic/Schwarzian system until the
/// membership callback fails and reads the density off the development
/// angles.  Independent of the closed forms.
pub fn f_general(
    metric: &MetricField,
    inside: &dyn Fn(&[f64]) -> bool,
    x: &[f64],
    v: &[f64],
    step: f64,
) -> Result<f64> {
    let ppl = maximal_ppl_curved(metric, inside, x, v, step)?;
    match ppl.domain {
        ProjectiveDomain::ContainsRealLine => Ok(0.0),
        ProjectiveDomain::Bounded {
            theta_minus,
            theta_plus,
        } => Ok(theta_density(theta_minus, theta_plus)),
    }
}

// ---------------------------------------------------------------------------
// Lightlike chains.
// ---------------------------------------------------------------------------

/// One link of a chain: a segment of a maximal null chord, between affine
/// parameters `tau_a` and `tau_b` (relative to `base`).
#[derive(Debug, Clone)]
pub struct ChainLink {
    pub base: Vec<f64>,
    pub dir: Vec<f64>,
    pub span: RaySpan,
    pub tau_a: f64,
    pub tau_b: f64,
}

impl ChainLink {
    pub fn point(&self, tau: f64) -> Vec<f64> {
        self.base
            .iter()
            .zip(&self.dir)
            .map(|(x, v)| x + tau * v)
            .collect()
    }

    pub fn start(&self) -> Vec<f64> {
        self.point(self.tau_a)
    }

    pub fn end(&self) -> Vec<f64> {
        self.point(self.tau_b)
    }

    /// Interval Poincaré distance between the endpoint parameters inside the
    /// maximal chord; +inf when an endpoint leaves the chord.
    pub fn cost(&self) -> f64 {
        let (t1, t2) = (self.tau_a, self.tau_b);
        match (self.span.neg, self.span.pos) {
            (Exit::Finite(a), Exit::Finite(b)) => {
                if t1 <= a || t1 >= b || t2 <= a || t2 >= b {
                    f64::INFINITY
                } else {
                    (((t2 - a) * (b - t1)) / ((t1 - a) * (b - t2))).ln().abs()
                }
            }
            (Exit::Finite(a), Exit::Infinite) => {
                if t1 <= a || t2 <= a {
                    f64::INFINITY
                } else {
                    ((t2 - a) / (t1 - a)).ln().abs()
                }
            }
            (Exit::Infinite, Exit::Finite(b)) => {
                if t1 >= b || t2 >= b {
                    f64::INFINITY
                } else {
                    ((b - t1) / (b - t2)).ln().abs()
                }
            }
            (Exit::Infinite, Exit::Infinite) => 0.0,
        }
    }

    /// The `I = (-1,1)` parameter of an affine parameter on this link's
    /// maximal chord (canonical normalization; base point at 0 for one-sided
    /// chords).
    pub fn i_param(&self, tau: f64) -> Option<f64> {
        match (self.span.neg, self.span.pos) {
            (Exit::Finite(a), Exit::Finite(b)) => Some((2.0 * tau - a - b) / (b - a)),
            (Exit::Finite(a), Exit::Infinite) => {
                // tau(t) = a + (-a)(1+t)/(1-t), tau(0) = 0.
                let k = -a;
                Some((tau - a - k) / (tau - a + k))
            }
            (Exit::Infinite, Exit::Finite(b)) => {
                let k = b;
                Some(-((b - tau - k) / (b - tau + k)))
            }
            (Exit::Infinite, Exit::Infinite) => None,
        }
    }
}

/// A piecewise-lightlike chain; joints must match within [`JOINT_TOL`].
#[derive(Debug, Clone, Default)]
pub struct LightlikeChain {
    pub links: Vec<ChainLink>,
}

impl LightlikeChain {
    pub fn endpoints(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let first = self.links.first()?;
        let last = self.links.last()?;
        Some((first.start(), last.end()))
    }
}

/// Total chain length: the sum of interval Poincaré distances of the link
/// parameter pairs, after validating every joint.
pub fn chain_length(chain: &LightlikeChain) -> Result<f64> {
    for pair in chain.links.windows(2) {
        let e = pair[0].end();
        let s = pair[1].start();
        let gap: f64 = e
            .iter()
            .zip(&s)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let scale: f64 = 1.0 + e.iter().map(|c| c.abs()).sum::<f64>();
        if gap > JOINT_TOL * scale {
            return Err(Error::InvalidArgument(format!(
                "chain joint mismatch: {e:?} vs {s:?}"
            )));
        }
    }
    let mut total = 0.0;
    for l in &chain.links {
        let c = l.cost();
        if !c.is_finite() {
            return Err(Error::InvalidArgument(
                "chain link leaves its maximal chord".into(),
            ));
        }
        total += c;
    }
    Ok(total)
}

/// Budget of the chain optimizer.
#[derive(Debug, Clone)]
pub struct ChainBudget {
    /// Maximum number of links (>= 1).
    pub max_links: usize,
    /// Random seeds per strategy.
    pub seeds: usize,
    /// Simplex refinement iterations per seed.
    pub refine_iters: usize,
    /// Lattice resolution of the integral-graph strategy.
    pub graph_res: usize,
    /// RNG seed; all randomness flows from here.
    pub seed: u64,
}

impl Default for ChainBudget {
    fn default() -> Self {
        ChainBudget {
            max_links: 4,
            seeds: 64,
            refine_iters: 200,
            graph_res: 24,
            seed: 0,
        }
    }
}

/// Certificate of a lower bound.
#[derive(Debug, Clone)]
pub enum LowerCertificate {
    None,
    HyperplanePair(Box<MobiusHyperplane>, Box<MobiusHyperplane>),
    Oracle(String),
}

/// A certified distance bracket.
#[derive(Debug, Clone)]
pub struct DistanceEstimate {
    pub lower: f64,
    pub upper: f64,
    pub upper_chain: Option<LightlikeChain>,
    pub lower_certificate: LowerCertificate,
}

impl DistanceEstimate {
    pub fn new(
        lower: f64,
        upper: f64,
        upper_chain: Option<LightlikeChain>,
        lower_certificate: LowerCertificate,
    ) -> Result<Self> {
        if !(lower >= 0.0) || lower > upper + 1e-9 {
            return Err(Error::Numerical(format!(
                "invalid bracket: lower {lower}, upper {upper}"
            )));
        }
        Ok(DistanceEstimate {
            lower,
            upper,
            upper_chain,
            lower_certificate,
        })
    }
}

// ---------------------------------------------------------------------------
// Upper estimates: chain optimization.
// ---------------------------------------------------------------------------

fn make_link(
    domain: &ConcreteDomain,
    base: Vec<f64>,
    dir: Vec<f64>,
    tau: f64,
) -> Option<ChainLink> {
    let span = domain.ray_exit(&base, &dir).ok()?;
    Some(ChainLink {
        base,
        dir,
        span,
        tau_a: 0.0,
        tau_b: tau,
    })
}

fn chain_cost(links: &Option<Vec<ChainLink>>) -> f64 {
    match links {
        None => f64::INFINITY,
        Some(ls) => ls.iter().map(|l| l.cost()).sum(),
    }
}

// --- signature (1,1): staircase chains in null coordinates -----------------

fn uw_of(x: &[f64]) -> (f64, f64) {
    (x[1] + x[0], x[1] - x[0])
}

fn point_of_uw(u: f64, w: f64) -> Vec<f64> {
    vec![0.5 * (u - w), 0.5 * (u + w)]
}

/// Link moving the `u` coordinate from `u1` to `u2` at fixed `w` (or the
/// `w` coordinate when `move_u` is false).
fn uw_link(
    domain: &ConcreteDomain,
    move_u: bool,
    z1: f64,
    z2: f64,
    other: f64,
) -> Option<ChainLink> {
    let (base, dir) = if move_u {
        (point_of_uw(z1, other), vec![1.0, 1.0])
    } else {
        (point_of_uw(other, z1), vec![-1.0, 1.0])
    };
    make_link(domain, base, dir, 0.5 * (z2 - z1))
}

/// Build the staircase chain for an alternating move pattern.  `pattern[k]`
/// is true for a `u`-move; `frees` are the intermediate targets (all but the
/// final move of each coordinate); the final move of each coordinate lands
/// on the destination value.
fn staircase_links(
    domain: &ConcreteDomain,
    x: &[f64],
    y: &[f64],
    pattern: &[bool],
    frees: &[f64],
) -> Option<Vec<ChainLink>> {
    let (mut u, mut w) = uw_of(x);
    let (uy, wy) = uw_of(y);
    let last_u = pattern.iter().rposition(|&p| p);
    let last_w = pattern.iter().rposition(|&p| !p);
    let mut links = Vec::with_capacity(pattern.len());
    let mut fi = 0;
    for (k, &mu) in pattern.iter().enumerate() {
        let target = if mu {
            if Some(k) == last_u {
                uy
            } else {
                let t = frees[fi];
                fi += 1;
                t
            }
        } else if Some(k) == last_w {
            wy
        } else {
            let t = frees[fi];
            fi += 1;
            t
        };
        let link = if mu {
            let l = uw_link(domain, true, u, target, w)?;
            u = target;
            l
        } else {
            let l = uw_link(domain, false, w, target, u)?;
            w = target;
            l
        };
        links.push(link);
    }
    if (u - uy).abs() > 1e-9 * (1.0 + uy.abs()) || (w - wy).abs() > 1e-9 * (1.0 + wy.abs()) {
        return None;
    }
    Some(links)
}

fn staircase_free_count(pattern: &[bool]) -> usize {
    let u_moves = pattern.iter().filter(|&&p| p).count();
    let w_moves = pattern.len() - u_moves;
    u_moves.saturating_sub(1) + w_moves.saturating_sub(1)
}

fn delta_upper_staircase(
    domain: &ConcreteDomain,
    x: &[f64],
    y: &[f64],
    budget: &ChainBudget,
    rng: &mut ChaCha8Rng,
) -> Option<(f64, LightlikeChain)> {
    let (ux, wx) = uw_of(x);
    let (uy, wy) = uw_of(y);
    let mut patterns: Vec<Vec<bool>> = Vec::new();
    if (wx - wy).abs() <= 1e-10 * (1.0 + wy.abs()) {
        patterns.push(vec![true]);
    }
    if (ux - uy).abs() <= 1e-10 * (1.0 + uy.abs()) {
        patterns.push(vec![false]);
    }
    for m in 2..=budget.max_links {
        for start_u in [true, false] {
            let p: Vec<bool> = (0..m).map(|k| (k % 2 == 0) == start_u).collect();
            patterns.push(p);
        }
    }
    // Free-coordinate search range from the sampling box in null coordinates.
    let (c, h) = domain.sample_box();
    let (uc, wc) = uw_of(&c);
    let spread = 2.0 * (h[0] + h[1]);
    let mut best: Option<(f64, Vec<ChainLink>)> = None;
    for pattern in &patterns {
        let nf = staircase_free_count(pattern);
        let score = |frees: &[f64]| -> f64 {
            chain_cost(&staircase_links(domain, x, y, pattern, frees))
        };
        let mut inits: Vec<Vec<f64>> = Vec::new();
        // Deterministic seeds: stay near the endpoint coordinates.
        inits.push(vec![0.5 * (ux + uy); nf]);
        inits.push(vec![0.5 * (wx + wy); nf]);
        for _ in 0..budget.seeds.max(1) {
            let center = if rng.random::<bool>() { uc } else { wc };
            inits.push(
                (0..nf)
                    .map(|_| center + spread * rng.random_range(-1.0..1.0))
                    .collect(),
            );
        }
        for init in inits {
            let (frees, val) = if nf == 0 {
                (init.clone(), score(&init))
            } else {
                nelder_mead(score, &init, 0.25 * (1.0 + spread), budget.refine_iters)
            };
            if val.is_finite() && best.as_ref().map_or(true, |b| val < b.0) {
                if let Some(links) = staircase_links(domain, x, y, pattern, &frees) {
                    best = Some((val, links));
                }
            }
        }
    }
    let (_, links) = best?;
    let chain = LightlikeChain { links };
    let val = chain_length(&chain).ok()?;
    Some((val, chain))
}

// --- signature (1,1): integral-graph strategy ------------------------------

/// Composite-Simpson integral of the Poincaré density along one coordinate
/// move (an approximation; selected paths are re-scored exactly).
fn uw_edge_weight(domain: &ConcreteDomain, move_u: bool, z1: f64, z2: f64, other: f64) -> f64 {
    let link = match uw_link(domain, move_u, z1, z2, other) {
        Some(l) => l,
        None => return f64::INFINITY,
    };
    let n = 9;
    let mut vals = Vec::with_capacity(n);
    for i in 0..n {
        let tau = link.tau_b * i as f64 / (n - 1) as f64;
        // Density of the link's chord at affine parameter tau.
        let shifted = RaySpan {
            neg: match link.span.neg {
                Exit::Finite(a) => Exit::Finite(a - tau),
                Exit::Infinite => Exit::Infinite,
            },
            pos: match link.span.pos {
                Exit::Finite(b) => Exit::Finite(b - tau),
                Exit::Infinite => Exit::Infinite,
            },
        };
        let f = span_density(shifted);
        if !f.is_finite() {
            return f64::INFINITY;
        }
        vals.push(f);
    }
    crate::opt::simpson_uniform(&vals, 0.0, link.tau_b).abs()
}

fn delta_upper_graph(
    domain: &ConcreteDomain,
    x: &[f64],
    y: &[f64],
    budget: &ChainBudget,
) -> Option<(f64, LightlikeChain)> {
    let (ux, wx) = uw_of(x);
    let (uy, wy) = uw_of(y);
    let (c, h) = domain.sample_box();
    let (uc, wc) = uw_of(&c);
    let spread = h[0] + h[1];
    let g = budget.graph_res.max(8);
    let mut us: Vec<f64> = (0..g)
        .map(|i| uc - spread + 2.0 * spread * i as f64 / (g - 1) as f64)
        .collect();
    us.push(ux);
    us.push(uy);
    us.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut ws: Vec<f64> = (0..g)
        .map(|i| wc - spread + 2.0 * spread * i as f64 / (g - 1) as f64)
        .collect();
    ws.push(wx);
    ws.push(wy);
    ws.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let nu = us.len();
    let nw = ws.len();
    let idx = |i: usize, j: usize| i * nw + j;
    let inside: Vec<bool> = (0..nu * nw)
        .map(|k| domain.contains(&point_of_uw(us[k / nw], ws[k % nw])))
        .collect();
    // Dijkstra over lattice moves between adjacent in-domain nodes.
    let find = |zs: &[f64], z: f64| zs.iter().position(|&a| (a - z).abs() < 1e-12);
    let (si, sj) = (find(&us, ux)?, find(&ws, wx)?);
    let (ti, tj) = (find(&us, uy)?, find(&ws, wy)?);
    let n_nodes = nu * nw;
    let mut dist = vec![f64::INFINITY; n_nodes];
    let mut prev: Vec<Option<usize>> = vec![None; n_nodes];
    let start = idx(si, sj);
    let goal = idx(ti, tj);
    dist[start] = 0.0;
    let mut heap: BinaryHeap<(std::cmp::Reverse<Ordered>, usize)> = BinaryHeap::new();
    heap.push((std::cmp::Reverse(ordered(0.0)), start));
    while let Some((std::cmp::Reverse(d), node)) = heap.pop() {
        let d = d.0;
        if d > dist[node] {
            continue;
        }
        if node == goal {
            break;
        }
        let (i, j) = (node / nw, node % nw);
        let mut relax = |ni: usize, nj: usize, move_u: bool| {
            let nn = idx(ni, nj);
            if !inside[nn] {
                return;
            }
            let w = if move_u {
                uw_edge_weight(domain, true, us[i], us[ni], ws[j])
            } else {
                uw_edge_weight(domain, false, ws[j], ws[nj], us[i])
            };
            if !w.is_finite() {
                return;
            }
            let nd = d + w;
            if nd < dist[nn] {
                dist[nn] = nd;
                prev[nn] = Some(node);
                heap.push((std::cmp::Reverse(ordered(nd)), nn));
            }
        };
        if i + 1 < nu {
            relax(i + 1, j, true);
        }
        if i > 0 {
            relax(i - 1, j, true);
        }
        if j + 1 < nw {
            relax(i, j + 1, false);
        }
        if j > 0 {
            relax(i, j - 1, false);
        }
    }
    if !dist[goal].is_finite() {
        return None;
    }
    // Reconstruct, merge runs of same-coordinate moves, and re-score.
    let mut path = vec![goal];
    let mut cur = goal;
    while let Some(p) = prev[cur] {
        path.push(p);
        cur = p;
    }
    path.reverse();
    let mut links: Vec<ChainLink> = Vec::new();
    let mut k = 0;
    while k + 1 < path.len() {
        let (i0, j0) = (path[k] / nw, path[k] % nw);
        let move_u = path[k + 1] / nw != i0;
        let mut k2 = k + 1;
        while k2 + 1 < path.len() {
            let next_move_u = path[k2 + 1] / nw != path[k2] / nw;
            if next_move_u != move_u {
                break;
            }
            k2 += 1;
        }
        let (i2, j2) = (path[k2] / nw, path[k2] % nw);
        let link = if move_u {
            uw_link(domain, true, us[i0], us[i2], ws[j0])?
        } else {
            uw_link(domain, false, ws[j0], ws[j2], us[i0])?
        };
        links.push(link);
        k = k2;
    }
    let chain = LightlikeChain { links };
    let val = chain_length(&chain).ok()?;
    Some((val, chain))
}

/// Total order wrapper for finite non-NaN weights.
#[derive(PartialEq)]
struct Ordered(f64);
fn ordered(x: f64) -> Ordered {
    Ordered(x)
}
impl Eq for Ordered {}
impl PartialOrd for Ordered {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ordered {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.partial_cmp(&other.0).unwrap_or(std::cmp::Ordering::Equal)
    }
}

// --- signature (1,n), n >= 2: shooting with two-link closure ---------------

/// Orthonormal spatial frame whose first vector is aligned with the spatial
/// separation of the pair (equivariant under similarities of the pair).
fn pair_frame(delta: &[f64]) -> Vec<Vec<f64>> {
    let n = delta.len() - 1;
    let spat = &delta[1..];
    let ns: f64 = spat.iter().map(|c| c * c).sum::<f64>().sqrt();
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(n);
    if ns > 1e-12 {
        let f1: Vec<f64> = spat.iter().map(|c| c / ns).collect();
        if n == 2 {
            // Orientation fixed by the pair itself, so the frame is
            // equivariant under rotations of the spatial plane.
            let f2 = vec![-f1[1], f1[0]];
            return vec![f1, f2];
        }
        frame.push(f1);
    }
    for i in 0..n {
        if frame.len() == n {
            break;
        }
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        for f in &frame {
            let d: f64 = e.iter().zip(f).map(|(a, b)| a * b).sum();
            for (c, fc) in e.iter_mut().zip(f) {
                *c -= d * fc;
            }
        }
        let nn: f64 = e.iter().map(|c| c * c).sum::<f64>().sqrt();
        if nn > 1e-8 {
            e.iter_mut().for_each(|c| *c /= nn);
            frame.push(e);
        }
    }
    frame
}

/// Spatial unit vector from spherical angles in the given frame.
fn omega_from_angles(frame: &[Vec<f64>], angles: &[f64]) -> Vec<f64> {
    let n = frame[0].len();
    let mut coeff = vec![0.0; frame.len()];
    let mut r = 1.0;
    for (k, &a) in angles.iter().enumerate() {
        coeff[k] = r * a.cos();
        r *= a.sin();
    }
    coeff[frame.len() - 1] = if angles.len() == frame.len() - 1 {
        r
    } else {
        coeff[frame.len() - 1]
    };
    let mut out = vec![0.0; n];
    for (c, f) in coeff.iter().zip(frame) {
        for (o, fc) in out.iter_mut().zip(f) {
            *o += c * fc;
        }
    }
    out
}

fn null_dir(frame: &[Vec<f64>], sign: f64, angles: &[f64]) -> Vec<f64> {
    let omega = omega_from_angles(frame, angles);
    let mut d = Vec::with_capacity(omega.len() + 1);
    d.push(sign);
    d.extend(omega);
    d
}

#[allow(clippy::too_many_arguments)]
fn shooting_links(
    domain: &ConcreteDomain,
    space: QuadraticSpace,
    x: &[f64],
    y: &[f64],
    frame: &[Vec<f64>],
    signs: &[f64],
    n_free: usize,
    params: &[f64],
    scale: f64,
) -> Option<Vec<ChainLink>> {
    let n_ang = frame.len() - 1;
    let mut links: Vec<ChainLink> = Vec::new();
    let mut p = x.to_vec();
    let mut off = 0;
    for k in 0..n_free {
        let angles = &params[off..off + n_ang];
        let len = params[off + n_ang] * scale;
        off += n_ang + 1;
        let d = null_dir(frame, signs[k], angles);
        let link = make_link(domain, p.clone(), d.clone(), len)?;
        p = link.end();
        links.push(link);
    }
    // Two-link closure from p to y: pick a null direction, land on the null
    // cone of y.
    let delta: Vec<f64> = y.iter().zip(&p).map(|(a, b)| a - b).collect();
    let q_delta = space.quad(&delta);
    let dn: f64 = delta.iter().map(|c| c * c).sum::<f64>().sqrt();
    if q_delta.abs() <= 1e-12 * (1.0 + dn * dn) {
        // Already null-aligned: single closing link.
        if dn > 1e-12 {
            links.push(make_link(domain, p, delta, 1.0)?);
        }
        return Some(links);
    }
    let angles = &params[off..off + n_ang];
    let d = null_dir(frame, signs[n_free], angles);
    let c = space.beta(&delta, &d);
    if c.abs() < 1e-12 * (1.0 + dn) {
        return None;
    }
    let tau = q_delta / (2.0 * c);
    let link = make_link(domain, p, d, tau)?;
    let z = link.end();
    links.push(link);
    let fin: Vec<f64> = y.iter().zip(&z).map(|(a, b)| a - b).collect();
    let fn_: f64 = fin.iter().map(|c| c * c).sum::<f64>().sqrt();
    if fn_ > 1e-12 * (1.0 + dn) {
        links.push(make_link(domain, z, fin, 1.0)?);
    }
    Some(links)
}

fn delta_upper_shooting(
    domain: &ConcreteDomain,
    x: &[f64],
    y: &[f64],
    budget: &ChainBudget,
    rng: &mut ChaCha8Rng,
) -> Option<(f64, LightlikeChain)> {
    let space = domain.space();
    let delta: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
    let dn: f64 = delta.iter().map(|c| c * c).sum::<f64>().sqrt();
    let frame = pair_frame(&delta);
    let n_ang = frame.len() - 1;
    let mut best: Option<(f64, Vec<ChainLink>)> = None;
    // Direct link when the pair is null-aligned.
    if space.quad(&delta).abs() <= 1e-12 * (1.0 + dn * dn) {
        if let Some(l) = make_link(domain, x.to_vec(), delta.clone(), 1.0) {
            let c = l.cost();
            if c.is_finite() {
                best = Some((c, vec![l]));
            }
        }
    }
    for n_free in 0..=budget.max_links.saturating_sub(2) {
        let n_params = n_free * (n_ang + 1) + n_ang;
        let seeds = budget.seeds.max(4);
        for s in 0..seeds {
            let signs: Vec<f64> = (0..=n_free)
                .map(|k| if (s >> k) & 1 == 0 { 1.0 } else { -1.0 })
                .collect();
            let init: Vec<f64> = (0..n_params)
                .map(|i| {
                    if i % (n_ang + 1) == n_ang && i < n_free * (n_ang + 1) {
                        rng.random_range(-1.0..1.0) // lengths (scaled by |delta|)
                    } else {
                        rng.random_range(0.0..std::f64::consts::PI)
                    }
                })
                .collect();
            let score = |params: &[f64]| -> f64 {
                chain_cost(&shooting_links(
                    domain, space, x, y, &frame, &signs, n_free, params, dn,
                ))
            };
            let (params, val) = if n_params == 0 {
                (init.clone(), score(&init))
            } else {
                nelder_mead(score, &init, 0.4, budget.refine_iters)
            };
            if val.is_finite() && best.as_ref().map_or(true, |b| val < b.0) {
                if let Some(links) =
                    shooting_links(domain, space, x, y, &frame, &signs, n_free, &params, dn)
                {
                    best = Some((val, links));
                }
            }
        }
    }
    let (_, links) = best?;
    let chain = LightlikeChain { links };
    let val = chain_length(&chain).ok()?;
    Some((val, chain))
}

/// Certified upper estimate of the pseudodistance: the best feasible chain
/// found within the budget, re-scored by [`chain_length`].  Never fabricates
/// a value: returns an error when no feasible chain is found.
pub fn delta_upper(
    domain: &ConcreteDomain,
    x: &[f64],
    y: &[f64],
    budget: &ChainBudget,
) -> Result<(f64, LightlikeChain)> {
    if !domain.contains(x) || !domain.contains(y) {
        return Err(Error::OutsideDomain(format!("{x:?} / {y:?}")));
    }
    let gap: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    if gap < 1e-12 {
        return Ok((0.0, LightlikeChain::default()));
    }
    let sig = domain.space().signature;
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut best: Option<(f64, LightlikeChain)> = None;
    let mut consider = |cand: Option<(f64, LightlikeChain)>| {
        if let Some((v, c)) = cand {
            if best.as_ref().map_or(true, |b| v < b.0) {
                best = Some((v, c));
            }
        }
    };
    if sig.p == 1 && sig.q == 1 {
        consider(delta_upper_staircase(domain, x, y, budget, &mut rng));
        consider(delta_upper_graph(domain, x, y, budget));
    } else if sig.p == 1 {
        consider(delta_upper_shooting(domain, x, y, budget, &mut rng));
    } else {
        return Err(Error::InvalidArgument(
            "chain optimization supports Lorentzian charts only".into(),
        ));
    }
    best.ok_or_else(|| Error::NoFeasibleChain(format!("{x:?} -> {y:?}")))
}

// ---------------------------------------------------------------------------
// Lower estimates and oracles.
// ---------------------------------------------------------------------------

/// Möbius hyperplane whose chart trace is the affine hyperplane
/// `{h : normal . h = offset}`.
pub fn affine_mobius_hyperplane(
    chart: &StereoChart,
    normal: &[f64],
    offset: f64,
) -> Result<MobiusHyperplane> {
    let amb = chart.ambient();
    let cs = chart.chart_space;
    if normal.len() != cs.dim() {
        return Err(Error::DimensionMismatch(format!(
            "normal length {}, chart dimension {}",
            normal.len(),
            cs.dim()
        )));
    }
    // u = a v + sum_i s_i beta_i f_i with a + beta . h = 0 on the trace:
    // beta = normal, a = -offset.
    let mut coords = chart.pole.coords.clone();
    coords.iter_mut().for_each(|c| *c *= -offset);
    for (i, f) in chart.frame.iter().enumerate() {
        let s = cs.basis_sign(i);
        for (c, fc) in coords.iter_mut().zip(&f.coords) {
            *c += s * normal[i] * fc;
        }
    }
    let v = crate::bilinear::SpaceVec::new(amb, coords)?;
    MobiusHyperplane::new(v)
}

/// Lower bound on the pseudodistance from a pair of Möbius hyperplanes
/// disjoint from the domain: the interval Kobayashi distance of the points
/// projected by the pencil coordinate `lambda(z) = b(u1, lift z)/b(u2,
/// lift z)`.  Validates sign-constancy of both pairings on a seeded interior
/// sample.
pub fn delta_lower_interval(
    domain: &ConcreteDomain,
    x: &[f64],
    y: &[f64],
    h1: &MobiusHyperplane,
    h2: &MobiusHyperplane,
) -> Result<f64> {
    if !domain.contains(x) || !domain.contains(y) {
        return Err(Error::OutsideDomain(format!("{x:?} / {y:?}")));
    }
    let space = domain.space();
    let chart = StereoChart::canonical(space.signature.p, space.signature.q)?;
    let amb = chart.ambient();
    let pairing = |u: &MobiusHyperplane, z: &[f64]| -> f64 {
        let l = chart.lift(z);
        amb.beta(&u.normal.coords, &l.coords)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x1234);
    let mut samples: Vec<Vec<f64>> = (0..200).map(|_| domain.sample_interior(&mut rng)).collect();
    samples.push(x.to_vec());
    samples.push(y.to_vec());
    for u in [h1, h2] {
        let vals: Vec<f64> = samples.iter().map(|z| pairing(u, z)).collect();
        let scale = u.normal.euclid_norm();
        if vals.iter().any(|v| v.abs() < 1e-12 * scale)
            || (vals.iter().any(|v| *v > 0.0) && vals.iter().any(|v| *v < 0.0))
        {
            return Err(Error::InvalidArgument(
                "hyperplane trace meets the domain sample".into(),
            ));
        }
    }
    let lam = |z: &[f64]| pairing(h1, z) / pairing(h2, z);
    Ok((lam(x) / lam(y)).ln().abs())
}

/// Exact pseudodistance of the diamond `D^{p,q} = H^p x H^q`: the max of the
/// factor hyperbolic distances (hyperboloid-model points, `b(v,v) = -1`).
pub fn delta_diamond_exact(
    x_p: &[f64],
    y_p: &[f64],
    x_q: &[f64],
    y_q: &[f64],
) -> Result<f64> {
    let dist = |a: &[f64], b: &[f64]| -> Result<f64> {
        if a.len() != b.len() || a.is_empty() {
            return Err(Error::DimensionMismatch("hyperboloid points".into()));
        }
        let s = QuadraticSpace::new(1, a.len() - 1)?;
        for v in [a, b] {
            if (s.quad(v) + 1.0).abs() > 1e-9 || v[0] <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "point off the hyperboloid: {v:?}"
                )));
            }
        }
        Ok((-s.beta(a, b)).max(1.0).acosh())
    };
    Ok(dist(x_p, y_p)?.max(dist(x_q, y_q)?))
}

/// Hilbert (projective Kobayashi) distance on a convex chart domain
/// (convexity caller-asserted), normalized like the interval distance `d_I`.
/// Unbounded chords give +inf.
pub fn hilbert_distance(domain: &ConcreteDomain, x: &[f64], y: &[f64]) -> Result<f64> {
    if !domain.contains(x) || !domain.contains(y) {
        return Err(Error::OutsideDomain(format!("{x:?} / {y:?}")));
    }
    let dir: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
    let dn: f64 = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
    if dn < 1e-14 {
        return Ok(0.0);
    }
    let span = domain.ray_exit(x, &dir)?;
    match (span.neg, span.pos) {
        (Exit::Finite(a), Exit::Finite(b)) => {
            if b <= 1.0 {
                return Err(Error::Numerical(
                    "chord exit before the second point".into(),
                ));
            }
            Ok((((1.0 - a) * b) / ((-a) * (b - 1.0))).ln().abs())
        }
        _ => Ok(f64::INFINITY),
    }
}

/// Reference distance of the HB domain `Omega_l ⊂ R^{1,n}`: the product
/// distance of the explicit `H^{n-l} x H^{l+1}` model of the invariant
/// metric `b / r^2`, `r = sqrt(t^2 - |x_perp|^2)`.
pub fn hb_reference_distance(n: usize, l: usize, x: &[f64], y: &[f64]) -> Result<f64> {
    if l > n || x.len() != n + 1 || y.len() != n + 1 {
        return Err(Error::DimensionMismatch(format!(
            "expected points of R^{{1,{n}}} with l <= n"
        )));
    }
    let m = n - l;
    let r_of = |z: &[f64]| -> Result<f64> {
        let r2 = z[0] * z[0] - z[1..=m].iter().map(|c| c * c).sum::<f64>();
        if z[0] <= 0.0 || r2 <= 0.0 {
            return Err(Error::OutsideDomain(format!("{z:?}")));
        }
        Ok(r2.sqrt())
    };
    let rx = r_of(x)?;
    let ry = r_of(y)?;
    // Hyperboloid factor H^{n-l}: normalized perp blocks.
    let d_a = if m >= 1 {
        let mut inner = x[0] * y[0];
        for i in 1..=m {
            inner -= x[i] * y[i];
        }
        (inner / (rx * ry)).max(1.0).acosh()
    } else {
        0.0
    };
    // Half-space factor H^{l+1} in (r, tangential) coordinates.
    let du2: f64 = x[m + 1..]
        .iter()
        .zip(&y[m + 1..])
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let dr = rx - ry;
    let d_b = (1.0 + (dr * dr + du2) / (2.0 * rx * ry)).acosh();
    Ok((d_a * d_a + d_b * d_b).sqrt())
}

// ---------------------------------------------------------------------------
// Probes.
// ---------------------------------------------------------------------------

/// Verdict of the hyperbolicity probe.
#[derive(Debug, Clone, PartialEq)]
pub enum HyperbolicityVerdict {
    LikelyHyperbolic,
    Flagged,
}

#[derive(Debug, Clone)]
pub struct HyperbolicityReport {
    /// Minimum of `F` over unit lightlike vectors on the sample.
    pub min_f: f64,
    /// Sup of per-factor arc lengths (sphere-product charts only).
    pub max_arc: Option<f64>,
    pub verdict: HyperbolicityVerdict,
}

/// Sample `F` over interior base points and unit lightlike directions;
/// LikelyHyperbolic iff the minimum clears the floor.  Evidence, not proof.
pub fn hyperbolicity_probe(
    domain: &ConcreteDomain,
    n_base: usize,
    n_dirs: usize,
    floor: f64,
    seed: u64,
) -> Result<HyperbolicityReport> {
    let space = domain.space();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_f = f64::INFINITY;
    for _ in 0..n_base {
        let x = domain.sample_interior(&mut rng);
        for _ in 0..n_dirs {
            let v = crate::bilinear::random_isotropic(space, &mut rng);
            let nn = v.euclid_norm();
            let unit: Vec<f64> = v.coords.iter().map(|c| c / nn).collect();
            let f = f_flat(domain, &x, &unit)?;
            if f < min_f {
                min_f = f;
            }
        }
    }
    let verdict = if min_f > floor {
        HyperbolicityVerdict::LikelyHyperbolic
    } else {
        HyperbolicityVerdict::Flagged
    };
    Ok(HyperbolicityReport {
        min_f,
        max_arc: None,
        verdict,
    })
}

/// Total conformal lightlike incompleteness check: true iff no sampled
/// maximal null chord extends over the whole projective line (i.e. every
/// sampled ray exits in at least one direction).
pub fn tcli_check(domain: &ConcreteDomain, n_samples: usize, seed: u64) -> bool {
    let space = domain.space();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n_samples {
        let x = domain.sample_interior(&mut rng);
        let v = crate::bilinear::random_isotropic(space, &mut rng);
        if let Ok(span) = domain.ray_exit(&x, &v.coords) {
            if span.neg.is_infinite() && span.pos.is_infinite() {
                return false;
            }
        }
    }
    true
}

/// Euclidean distance from `z` to the boundary, by ray casting over sampled
/// directions (an over-estimate; the quasi-hyperbolic value is reported as
/// an approximation, not a certificate).
fn boundary_distance<R: Rng>(domain: &ConcreteDomain, z: &[f64], n_dirs: usize, rng: &mut R) -> f64 {
    let dim = z.len();
    let mut best = f64::INFINITY;
    for k in 0..n_dirs {
        let dir: Vec<f64> = if k < 2 * dim {
            let mut e = vec![0.0; dim];
            e[k / 2] = if k % 2 == 0 { 1.0 } else { -1.0 };
            e
        } else {
            let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let n: f64 = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            if n < 1e-9 {
                continue;
            }
            v.iter().map(|c| c / n).collect()
        };
        let span = domain.ray_exit_bisect(z, &dir);
        if let Exit::Finite(t) = span.pos {
            best = best.min(t);
        }
        if let Exit::Finite(t) = span.neg {
            best = best.min(-t);
        }
    }
    best
}

/// Approximate quasi-hyperbolic lower bound: shortest path on a seeded point
/// cloud with edges weighted by `∫ |dz| / d(z, ∂Ω)` (composite Simpson),
/// divided by `sqrt(2) * alpha`.
pub fn quasi_hyperbolic_lower(
    domain: &ConcreteDomain,
    x: &[f64],
    y: &[f64],
    alpha: f64,
    n_cloud: usize,
    seed: u64,
) -> Result<f64> {
    if !domain.contains(x) || !domain.contains(y) {
        return Err(Error::OutsideDomain(format!("{x:?} / {y:?}")));
    }
    let gap: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    if gap < 1e-12 {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes: Vec<Vec<f64>> = vec![x.to_vec(), y.to_vec()];
    for _ in 0..n_cloud {
        nodes.push(domain.sample_interior(&mut rng));
    }
    let n = nodes.len();
    let bdist: Vec<f64> = nodes
        .iter()
        .map(|z| boundary_distance(domain, z, 24, &mut rng))
        .collect();
    // k-nearest-neighbor edges with Simpson-weighted quasi-hyperbolic length.
    let k_nn = 10.min(n - 1);
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let edge_weight = |i: usize, j: usize, rng: &mut ChaCha8Rng| -> f64 {
        let (a, b) = (&nodes[i], &nodes[j]);
        let len: f64 = a
            .iter()
            .zip(b)
            .map(|(p, q)| (p - q) * (p - q))
            .sum::<f64>()
            .sqrt();
        let m = 5;
        let mut vals = Vec::with_capacity(m);
        for s in 0..m {
            let t = s as f64 / (m - 1) as f64;
            let z: Vec<f64> = a.iter().zip(b).map(|(p, q)| p + t * (q - p)).collect();
            if !domain.contains(&z) {
                return f64::INFINITY;
            }
            let d = if s == 0 {
                bdist[i]
            } else if s == m - 1 {
                bdist[j]
            } else {
                boundary_distance(domain, &z, 12, rng)
            };
            if !(d > 0.0) || !d.is_finite() {
                return f64::INFINITY;
            }
            vals.push(1.0 / d);
        }
        crate::opt::simpson_uniform(&vals, 0.0, len)
    };
    for i in 0..n {
        let mut ds: Vec<(usize, f64)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| {
                let d: f64 = nodes[i]
                    .iter()
                    .zip(&nodes[j])
                    .map(|(p, q)| (p - q) * (p - q))
                    .sum();
                (j, d)
            })
            .collect();
        ds.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        for &(j, _) in ds.iter().take(k_nn) {
            let w = edge_weight(i, j, &mut rng);
            if w.is_finite() {
                adj[i].push((j, w));
                adj[j].push((i, w));
            }
        }
    }
    let mut dist = vec![f64::INFINITY; n];
    dist[0] = 0.0;
    let mut heap: BinaryHeap<(std::cmp::Reverse<Ordered>, usize)> = BinaryHeap::new();
    heap.push((std::cmp::Reverse(ordered(0.0)), 0));
    while let Some((std::cmp::Reverse(d), node)) = heap.pop() {
        let d = d.0;
        if d > dist[node] {
            continue;
        }
        for &(j, w) in &adj[node] {
            if d + w < dist[j] {
                dist[j] = d + w;
                heap.push((std::cmp::Reverse(ordered(d + w)), j));
            }
        }
    }
    if !dist[1].is_finite() {
        return Err(Error::Numerical(
            "quasi-hyperbolic graph disconnected".into(),
        ));
    }
    Ok(dist[1] / (std::f64::consts::SQRT_2 * alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ball11() -> ConcreteDomain {
        ConcreteDomain::EuclideanBall {
            center: vec![0.0, 0.0],
            radius: 1.0,
        }
    }

    #[test]
    fn f_flat_examples() {
        // Midpoint of a chord scaled to tau = ±1 gives F = 2.
        let d = ball11();
        let s = 1.0 / 2f64.sqrt();
        let f = f_flat(&d, &[0.0, 0.0], &[s, s]).unwrap();
        assert_relative_eq!(f, 2.0, max_relative = 1e-12);
        // Full space: 0.
        let full = ConcreteDomain::FullSpace { p: 1, q: 2 };
        assert_eq!(f_flat(&full, &[0.0, 0.0, 0.0], &[1.0, 1.0, 0.0]).unwrap(), 0.0);
        // Half-space, unit exit behind: F = 1.
        let hs = ConcreteDomain::HalfSpaceFuture {
            base: vec![0.0, 0.0, 0.0],
            normal: vec![1.0, 0.0, 0.0],
        };
        let f = f_flat(&hs, &[1.0, 0.0, 0.0], &[1.0, 1.0, 0.0]).unwrap();
        assert_relative_eq!(f, 1.0, max_relative = 1e-12);
        // Outside point errors.
        assert!(f_flat(&d, &[3.0, 0.0], &[s, s]).is_err());
    }

    #[test]
    fn f_sphere_product_midpoint_and_threshold() {
        // Caps of radius r on both factors, base at the centers, equatorial
        // tangents: segment is symmetric with per-factor half-length r.
        let cp = vec![1.0, 0.0];
        let cq = vec![1.0, 0.0, 0.0];
        let d = SphereProductDomain::from_caps(cp.clone(), 0.7, cq.clone(), 0.7);
        let vp = vec![0.0, 1.0];
        let vq = vec![0.0, 1.0, 0.0];
        let f = f_sphere_product(&d, &cp, &cq, &vp, &vq).unwrap();
        let vg = 2f64.sqrt();
        let expected = 2f64.sqrt() * vg / (0.7f64).tan();
        assert_relative_eq!(f, expected, max_relative = 1e-6);
        // Arc >= pi: functional vanishes.
        let wide = SphereProductDomain::from_caps(cp.clone(), 3.0, cq.clone(), 3.0);
        let f = f_sphere_product(&wide, &cp, &cq, &vp, &vq).unwrap();
        assert_eq!(f, 0.0);
    }

    #[test]
    fn f_general_matches_f_flat_on_ball() {
        let d = ball11();
        let metric = MetricField::flat(d.space());
        let inside = |z: &[f64]| d.contains(z);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let x = d.sample_interior(&mut rng);
            let v = crate::bilinear::random_isotropic(d.space(), &mut rng);
            let f1 = f_flat(&d, &x, &v.coords).unwrap();
            let f2 = f_general(&metric, &inside, &x, &v.coords, 0.02).unwrap();
            assert_relative_eq!(f1, f2, max_relative = 1e-8);
        }
    }

    #[test]
    fn f_general_homogeneity() {
        let d = ball11();
        let metric = MetricField::flat(d.space());
        let inside = |z: &[f64]| d.contains(z);
        let x = [0.1, -0.2];
        let v = [0.4, 0.4];
        let f1 = f_general(&metric, &inside, &x, &v, 0.02).unwrap();
        let v3: Vec<f64> = v.iter().map(|c| 3.0 * c).collect();
        let f3 = f_general(&metric, &inside, &x, &v3, 0.02).unwrap();
        assert_relative_eq!(f3, 3.0 * f1, max_relative = 1e-8);
    }

    #[test]
    fn chain_length_closed_forms() {
        let d = ball11();
        let s = 1.0 / 2f64.sqrt();
        // Chord with span (-1, 1): parameters 0 -> tanh(1) give length 2.
        let mut link = make_link(&d, vec![0.0, 0.0], vec![s, s], 1f64.tanh()).unwrap();
        let chain = LightlikeChain {
            links: vec![link.clone()],
        };
        assert_relative_eq!(chain_length(&chain).unwrap(), 2.0, max_relative = 1e-10);
        // Degenerate link: zero length.
        link.tau_b = 0.0;
        assert_eq!(chain_length(&LightlikeChain { links: vec![link] }).unwrap(), 0.0);
        // Splitting a link preserves the total.
        let l1 = make_link(&d, vec![0.0, 0.0], vec![s, s], 0.3).unwrap();
        let l2 = make_link(&d, l1.end(), vec![s, s], 1f64.tanh() - 0.3).unwrap();
        let split = LightlikeChain { links: vec![l1, l2] };
        assert_relative_eq!(chain_length(&split).unwrap(), 2.0, max_relative = 1e-9);
        // Broken joint rejected.
        let a = make_link(&d, vec![0.0, 0.0], vec![s, s], 0.3).unwrap();
        let b = make_link(&d, vec![0.2, 0.0], vec![s, -s], 0.1).unwrap();
        assert!(chain_length(&LightlikeChain { links: vec![a, b] }).is_err());
    }

    #[test]
    fn diamond_oracle_basics() {
        let p1 = vec![1.0, 0.0];
        let p2 = vec![1.5f64.cosh(), 1.5f64.sinh()];
        assert_eq!(delta_diamond_exact(&p1, &p1, &p1, &p1).unwrap(), 0.0);
        let d = delta_diamond_exact(&p1, &p1, &p1, &p2).unwrap();
        assert_relative_eq!(d, 1.5, max_relative = 1e-12);
        let swapped = delta_diamond_exact(&p1, &p1, &p2, &p1).unwrap();
        assert_relative_eq!(d, swapped, max_relative = 1e-12);
        assert!(delta_diamond_exact(&[1.0, 0.1], &p1, &p1, &p1).is_err());
    }

    #[test]
    fn null_box_distance_brackets() {
        // The unit null-coordinate box: delta = d1 + d2 via a two-link
        // staircase; the interval lower bound is max(d1, d2).
        let d = ConcreteDomain::Intersection(vec![ConcreteDomain::Slit, {
            // max(|u|,|w|) < 1 is the diamond with corners at t = ±1.
            ConcreteDomain::Diamond {
                a: vec![-1.0, 0.0],
                b: vec![1.0, 0.0],
            }
        }]);
        let x = point_of_uw(0.0, 0.0);
        let y = point_of_uw(0.5, -0.3);
        let budget = ChainBudget {
            seeds: 16,
            ..ChainBudget::default()
        };
        let (val, chain) = delta_upper(&d, &x, &y, &budget).unwrap();
        let d1 = 2.0 * 0.5f64.atanh();
        let d2 = 2.0 * 0.3f64.atanh();
        assert!(val <= d1 + d2 + 1e-6, "upper {val} vs staircase {}", d1 + d2);
        assert!(val >= d1.max(d2) - 1e-9);
        assert!(!chain.links.is_empty());
        // Certificate re-scores to the reported value.
        assert_relative_eq!(chain_length(&chain).unwrap(), val, max_relative = 1e-12);
    }

    #[test]
    fn single_null_chord_is_optimal() {
        // Two points on one null chord of the ball: the one-link chain gives
        // exactly their interval distance.
        let d = ball11();
        let s = 1.0 / 2f64.sqrt();
        let x = vec![0.0, 0.0];
        let tau = 0.4;
        let y = vec![tau * s, tau * s];
        let budget = ChainBudget {
            seeds: 8,
            ..ChainBudget::default()
        };
        let (val, _) = delta_upper(&d, &x, &y, &budget).unwrap();
        let expected = ((1.0 + tau) / (1.0 - tau)).ln();
        assert!(val <= expected + 1e-6, "val {val} expected {expected}");
    }

    #[test]
    fn lower_interval_strip() {
        // Strip {0 < t < 2} via HalfSpaceFuture meet: use the half-space
        // domain and the pair {t=0}, pole (trace at infinity).
        let d = ConcreteDomain::HalfSpaceFuture {
            base: vec![0.0, 0.0, 0.0],
            normal: vec![1.0, 0.0, 0.0],
        };
        let chart = StereoChart::canonical(1, 2).unwrap();
        let h1 = affine_mobius_hyperplane(&chart, &[1.0, 0.0, 0.0], 0.0).unwrap();
        let h2 = MobiusHyperplane::new(chart.pole.clone()).unwrap();
        let x = [1.0, 0.3, 0.0];
        let y = [2.5, 0.3, 0.0];
        let val = delta_lower_interval(&d, &x, &y, &h1, &h2).unwrap();
        assert_relative_eq!(val, (2.5f64 / 1.0).ln(), max_relative = 1e-10);
        assert_eq!(delta_lower_interval(&d, &x, &x, &h1, &h2).unwrap(), 0.0);
        // A hyperplane crossing the domain is rejected.
        let bad = affine_mobius_hyperplane(&chart, &[1.0, 0.0, 0.0], 1.0).unwrap();
        assert!(delta_lower_interval(&d, &x, &y, &bad, &h2).is_err());
    }

    #[test]
    fn hilbert_examples() {
        let d = ball11();
        // Chord through the center: hilbert(0, t*dir) = 2 artanh t.
        let y = [0.35, 0.2];
        let yn: f64 = y.iter().map(|c| c * c).sum::<f64>().sqrt();
        let val = hilbert_distance(&d, &[0.0, 0.0], &y).unwrap();
        assert_relative_eq!(val, 2.0 * yn.atanh(), max_relative = 1e-9);
        assert_eq!(hilbert_distance(&d, &y, &y).unwrap(), 0.0);
        // Unbounded chord flagged.
        let hs = ConcreteDomain::HalfSpaceFuture {
            base: vec![0.0, 0.0, 0.0],
            normal: vec![1.0, 0.0, 0.0],
        };
        let v = hilbert_distance(&hs, &[1.0, 0.0, 0.0], &[2.0, 0.0, 0.0]).unwrap();
        assert!(v.is_infinite());
    }

    #[test]
    fn hb_reference_examples() {
        // l = 0: points on the axis at heights h1, h2 -> |log(h1/h2)|.
        let x = [1.0, 0.0, 0.0];
        let y = [3.0, 0.0, 0.0];
        let d = hb_reference_distance(2, 0, &x, &y).unwrap();
        assert_relative_eq!(d, 3f64.ln(), max_relative = 1e-12);
        assert_eq!(hb_reference_distance(2, 0, &x, &x).unwrap(), 0.0);
        // Dilation invariance for l = 1.
        let x = [2.0, 0.5, 0.7];
        let y = [3.0, -0.4, 1.9];
        let d1 = hb_reference_distance(2, 1, &x, &y).unwrap();
        let x2: Vec<f64> = x.iter().map(|c| 2.0 * c).collect();
        let y2: Vec<f64> = y.iter().map(|c| 2.0 * c).collect();
        let d2 = hb_reference_distance(2, 1, &x2, &y2).unwrap();
        assert_relative_eq!(d1, d2, max_relative = 1e-12);
        assert!(hb_reference_distance(2, 1, &[0.1, 5.0, 0.0], &y).is_err());
    }

    #[test]
    fn tcli_and_probe() {
        let diamond = ConcreteDomain::Diamond {
            a: vec![-1.0, 0.0, 0.0],
            b: vec![1.0, 0.0, 0.0],
        };
        assert!(tcli_check(&diamond, 64, 3));
        let full = ConcreteDomain::FullSpace { p: 1, q: 2 };
        assert!(!tcli_check(&full, 16, 3));
        assert!(tcli_check(&ConcreteDomain::Slit, 64, 3));
        let rep = hyperbolicity_probe(&ball11(), 12, 12, 1e-4, 7).unwrap();
        assert_eq!(rep.verdict, HyperbolicityVerdict::LikelyHyperbolic);
        assert!(rep.min_f >= 1.0, "ball min F {}", rep.min_f);
        let rep = hyperbolicity_probe(&full, 4, 4, 1e-4, 7).unwrap();
        assert_eq!(rep.verdict, HyperbolicityVerdict::Flagged);
        assert_eq!(rep.min_f, 0.0);
    }

    #[test]
    fn quasi_hyperbolic_basics() {
        let d = ConcreteDomain::TwoHalfFutureUnion { n: 1, tilt: 0.5 };
        let x = [1.0, 0.0];
        assert_eq!(quasi_hyperbolic_lower(&d, &x, &x, 1.0, 30, 9).unwrap(), 0.0);
        let y = [1.5, 0.4];
        let v = quasi_hyperbolic_lower(&d, &x, &y, 1.0, 60, 9).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }
}
