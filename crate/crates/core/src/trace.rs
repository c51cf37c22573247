//! Extraction of the multiplicity base `{f = 0}` as closed oriented curves.
//!
//! Marching squares runs on a `grid_n x grid_n` cell grid over the disk
//! `|coord| <= disk_radius` in each chart. Cell-edge crossings are linked
//! into chains through exact edge identifiers, every vertex is Newton-refined
//! onto the level set, and chains are adaptively densified (step length,
//! flatness, turning angle) so later winding sums stay far from their Nyquist
//! guard.
//!
//! A component that fits inside one chart disk closes there; components seen
//! closed by both charts are merged by their embedded distance. A component
//! visiting both polar caps closes in neither chart: its open chains are
//! trimmed to the ownership region (chart 1 keeps `|z| <=` the trim radius,
//! chart 2 the complement, an exact partition of the sphere) and the trimmed
//! pieces are stitched across charts by matching endpoints in the embedding.
//! The assembled curves may therefore carry vertices from both charts; every
//! downstream quantity (tangent frames, section ratios) is chart-invariant,
//! so mixed curves need no special handling.
//!
//! Orientation follows the boundary convention for the region `{f < 0}`:
//! traversal direction is chosen so that `f` is negative at a small offset
//! along the leftward normal `i·tangent`. The inversion `w = 1/z` is
//! holomorphic, so the rule is the same in both charts.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex;
#[allow(unused_imports)] use num_traits::Float;

use crate::error::{Error, Result};
use crate::fields::SymbolSpec;
use crate::sphere::{ChartId, ChartPoint};
use crate::tol::Tolerances;
use crate::Complex64;

/// A closed polyline on the sphere, oriented as the boundary of `{f < 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientedCurve {
    /// Closed vertex loop (the last vertex connects back to the first).
    /// Vertices may come from both charts when the component straddles the
    /// polar caps.
    pub vertices: Vec<ChartPoint>,
    /// Worst |f| margin observed at the leftward orientation offsets; larger
    /// is a more decisive orientation.
    pub orientation_check: f64,
}

impl OrientedCurve {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Reversed traversal (used by tests; orientation is re-derived from f).
    pub fn reversed(&self) -> OrientedCurve {
        let mut v = self.vertices.clone();
        v.reverse();
        OrientedCurve {
            vertices: v,
            orientation_check: self.orientation_check,
        }
    }

    /// Neighbor coordinate expressed in the chart of vertex `k`.
    fn neighbor_in_chart(&self, k: usize, offset: isize) -> Complex64 {
        let n = self.vertices.len() as isize;
        let idx = ((k as isize + offset) % n + n) % n;
        let v = self.vertices[idx as usize];
        let chart = self.vertices[k].chart;
        if v.chart == chart {
            v.coord
        } else {
            // neighbors of a vertex never sit at the opposite pole
            v.coord.inv()
        }
    }

    /// Unit tangent at vertex `k` in that vertex's chart, by the central
    /// difference of the neighbor coordinates.
    pub fn unit_tangent(&self, k: usize) -> Complex64 {
        let prev = self.neighbor_in_chart(k, -1);
        let next = self.neighbor_in_chart(k, 1);
        let t = next - prev;
        let n = t.norm();
        if n == 0.0 {
            Complex::new(1.0, 0.0)
        } else {
            t / n
        }
    }

    /// Largest chart-coordinate modulus over the vertices.
    pub fn max_coord_norm(&self) -> f64 {
        self.vertices
            .iter()
            .fold(0.0, |m, v| m.max(v.coord.norm()))
    }

    /// One round of midpoint subdivision with on-curve refinement; used when
    /// an index computation asks for a denser sampling.
    pub fn subdivided(&self, spec: &SymbolSpec, tol: &Tolerances) -> OrientedCurve {
        let n = self.vertices.len();
        let mut out = Vec::with_capacity(2 * n);
        for k in 0..n {
            let a = self.vertices[k];
            out.push(a);
            let b_coord = self.neighbor_in_chart(k, 1);
            let mid = ChartPoint::new(a.chart, (a.coord + b_coord) / 2.0);
            let (refined, _) = refine_onto_level_set(spec, mid, tol);
            out.push(refined);
        }
        OrientedCurve {
            vertices: out,
            orientation_check: self.orientation_check,
        }
    }
}

/// Genericity verdict for a traced symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Generic,
    Suspect,
    Degenerate,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Generic => "Generic",
            Verdict::Suspect => "Suspect",
            Verdict::Degenerate => "Degenerate",
        }
    }
}

/// Summary of how cleanly the traced curve satisfies the regular-value and
/// equal-modulus conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct GenericityReport {
    /// Smallest |grad f| at any curve vertex.
    pub min_grad_norm_on_curve: f64,
    /// Largest ||zv| - |zw|| at any curve vertex.
    pub fiber_defect_max: f64,
    /// Largest |f| left after vertex refinement.
    pub max_f_residual: f64,
    pub verdict: Verdict,
}

// ---------------------------------------------------------------------------
// marching squares
// ---------------------------------------------------------------------------

/// Cell-edge identifier: the edge starting at node `(i, j)`, horizontal
/// (towards `(i+1, j)`) or vertical (towards `(i, j+1)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct EdgeId {
    i: u32,
    j: u32,
    vertical: bool,
}

struct Segment {
    ea: EdgeId,
    eb: EdgeId,
    pa: Complex64,
    pb: Complex64,
}

struct Chain {
    points: Vec<Complex64>,
    closed: bool,
}

fn march_chart(
    spec: &SymbolSpec,
    chart: ChartId,
    grid_n: usize,
    tol: &Tolerances,
) -> Result<Vec<Chain>> {
    let r = tol.disk_radius;
    let n = grid_n;
    let step = 2.0 * r / n as f64;
    let node = |i: usize, j: usize| Complex::new(-r + step * i as f64, -r + step * j as f64);

    // f on the node grid
    let mut f = vec![0.0f64; (n + 1) * (n + 1)];
    for i in 0..=n {
        for j in 0..=n {
            f[i * (n + 1) + j] = spec.eval_f(&ChartPoint::new(chart, node(i, j)));
        }
    }
    let fv = |i: usize, j: usize| f[i * (n + 1) + j];

    let interp = |c0: Complex64, f0: f64, c1: Complex64, f1: f64| {
        let t = f0 / (f0 - f1);
        c0 + (c1 - c0) * t
    };
    let edge_point = |e: EdgeId| {
        let (i, j) = (e.i as usize, e.j as usize);
        if e.vertical {
            interp(node(i, j), fv(i, j), node(i, j + 1), fv(i, j + 1))
        } else {
            interp(node(i, j), fv(i, j), node(i + 1, j), fv(i + 1, j))
        }
    };

    let mut segs: Vec<Segment> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let center = node(i, j) + Complex::new(step / 2.0, step / 2.0);
            if center.norm() > r {
                continue;
            }
            let (f00, f10, f01, f11) = (fv(i, j), fv(i + 1, j), fv(i, j + 1), fv(i + 1, j + 1));
            let case = (f00 > 0.0) as u8
                | (((f10 > 0.0) as u8) << 1)
                | (((f11 > 0.0) as u8) << 2)
                | (((f01 > 0.0) as u8) << 3);
            if case == 0 || case == 15 {
                continue;
            }
            let (i32_, j32) = (i as u32, j as u32);
            let eb = EdgeId { i: i32_, j: j32, vertical: false };
            let et = EdgeId { i: i32_, j: j32 + 1, vertical: false };
            let el = EdgeId { i: i32_, j: j32, vertical: true };
            let er = EdgeId { i: i32_ + 1, j: j32, vertical: true };
            let mut push = |a: EdgeId, b: EdgeId| {
                segs.push(Segment { ea: a, eb: b, pa: edge_point(a), pb: edge_point(b) });
            };
            match case {
                1 | 14 => push(el, eb),
                2 | 13 => push(eb, er),
                4 | 11 => push(er, et),
                7 | 8 => push(et, el),
                3 | 12 => push(el, er),
                6 | 9 => push(eb, et),
                5 | 10 => {
                    // saddle pattern: resolve by the sign of f at the center,
                    // but refuse when the gradient is tiny there (0 would not
                    // be a regular value of f)
                    let gc = spec.grad_f_complex(&ChartPoint::new(chart, center));
                    let fc = spec.eval_f(&ChartPoint::new(chart, center));
                    if gc.norm() < tol.grad_floor && fc.abs() < tol.grad_floor * step {
                        return Err(Error::NonGenericLevelSet {
                            chart: chart.label(),
                            x: center.re,
                            y: center.im,
                            grad_norm: gc.norm(),
                        });
                    }
                    if case == 5 {
                        if fc <= 0.0 {
                            push(el, eb);
                            push(er, et);
                        } else {
                            push(el, et);
                            push(er, eb);
                        }
                    } else if fc <= 0.0 {
                        push(eb, er);
                        push(et, el);
                    } else {
                        push(eb, el);
                        push(et, er);
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    Ok(link_chains(&segs))
}

fn link_chains(segs: &[Segment]) -> Vec<Chain> {
    let mut by_edge: BTreeMap<EdgeId, Vec<usize>> = BTreeMap::new();
    for (k, s) in segs.iter().enumerate() {
        by_edge.entry(s.ea).or_default().push(k);
        by_edge.entry(s.eb).or_default().push(k);
    }
    let mut used = vec![false; segs.len()];

    // walk from segment k entered through edge `e`, consuming segments until
    // the chain ends or closes; returns visited (edge, point) pairs and the
    // final edge
    let walk = |k0: usize, e0: EdgeId, used: &mut Vec<bool>| -> (Vec<(EdgeId, Complex64)>, EdgeId) {
        let mut out = Vec::new();
        let mut kk = k0;
        let mut e = e0;
        loop {
            used[kk] = true;
            let s = &segs[kk];
            let (ne, np) = if e == s.ea { (s.eb, s.pb) } else { (s.ea, s.pa) };
            out.push((ne, np));
            e = ne;
            match by_edge.get(&e).and_then(|v| v.iter().copied().find(|&m| !used[m])) {
                Some(m) => kk = m,
                None => return (out, e),
            }
        }
    };

    let mut chains = Vec::new();
    for k0 in 0..segs.len() {
        if used[k0] {
            continue;
        }
        let (fwd, end_edge) = walk(k0, segs[k0].ea, &mut used);
        let closed = end_edge == segs[k0].ea;
        let pts: Vec<(EdgeId, Complex64)> = if closed {
            let mut v = vec![(segs[k0].ea, segs[k0].pa)];
            v.extend(fwd);
            v.pop();
            v
        } else {
            used[k0] = false;
            let (back, _) = walk(k0, segs[k0].eb, &mut used);
            let mut v: Vec<(EdgeId, Complex64)> = back.into_iter().rev().collect();
            v.push((segs[k0].eb, segs[k0].pb));
            v.extend(fwd);
            let mut dedup: Vec<(EdgeId, Complex64)> = Vec::with_capacity(v.len());
            for (e, p) in v {
                if dedup.last().map(|(le, _)| *le == e).unwrap_or(false) {
                    continue;
                }
                dedup.push((e, p));
            }
            dedup
        };
        if pts.len() >= 2 {
            chains.push(Chain {
                points: pts.into_iter().map(|(_, p)| p).collect(),
                closed,
            });
        }
    }
    chains
}

// ---------------------------------------------------------------------------
// refinement and densification
// ---------------------------------------------------------------------------

/// One-dimensional Newton step along the gradient direction until
/// `|f| <= trace_tol`; reports whether the target was reached.
pub(crate) fn refine_onto_level_set(
    spec: &SymbolSpec,
    p: ChartPoint,
    tol: &Tolerances,
) -> (ChartPoint, bool) {
    let mut c = p.coord;
    for _ in 0..tol.refine_max_iter {
        let at = ChartPoint::new(p.chart, c);
        let f = spec.eval_f(&at);
        if f.abs() <= tol.trace_tol {
            return (at, true);
        }
        let g = spec.grad_f_complex(&at);
        let g2 = g.norm_sqr();
        if g2 < 1e-30 {
            return (at, false);
        }
        c -= g * (f / g2);
    }
    let at = ChartPoint::new(p.chart, c);
    (at, spec.eval_f(&at).abs() <= tol.trace_tol)
}

/// Adaptive subdivision: splits segments that are longer than `max_step`,
/// bend more than `turn_limit` at a vertex, or sag more than `sag_tol` away
/// from the refined midpoint.
fn densify(
    spec: &SymbolSpec,
    chart: ChartId,
    pts: Vec<Complex64>,
    closed: bool,
    tol: &Tolerances,
) -> Vec<Complex64> {
    let mut pts = pts;
    for _ in 0..8 {
        let m = pts.len();
        if m < 2 {
            return pts;
        }
        let seg_count = if closed { m } else { m - 1 };
        let dir = |k: usize| {
            let d = pts[(k + 1) % m] - pts[k];
            let n = d.norm();
            if n == 0.0 { Complex::new(1.0, 0.0) } else { d / n }
        };
        let mut split = vec![false; seg_count];
        let mut any = false;
        for k in 0..seg_count {
            let a = pts[k];
            let b = pts[(k + 1) % m];
            let len = (b - a).norm();
            let mut s = len > tol.max_step;
            if !s && len > 4.0 * tol.sag_tol {
                let mid = (a + b) / 2.0;
                let (r, ok) = refine_onto_level_set(spec, ChartPoint::new(chart, mid), tol);
                s = ok && (r.coord - mid).norm() > tol.sag_tol;
            }
            if !s && (closed || k + 1 < seg_count) {
                let turn = (dir((k + 1) % seg_count) / dir(k)).arg().abs();
                s = turn > tol.turn_limit && len > 4.0 * tol.sag_tol;
            }
            if s {
                split[k] = true;
                any = true;
            }
        }
        if !any {
            break;
        }
        let mut out = Vec::with_capacity(m + seg_count);
        for k in 0..m {
            out.push(pts[k]);
            if k < seg_count && split[k] {
                let mid = (pts[k] + pts[(k + 1) % m]) / 2.0;
                let (r, _) = refine_onto_level_set(spec, ChartPoint::new(chart, mid), tol);
                out.push(r.coord);
            }
        }
        pts = out;
    }
    pts
}

// ---------------------------------------------------------------------------
// deduplication, trimming, stitching
// ---------------------------------------------------------------------------

fn embed_all(chart: ChartId, pts: &[Complex64]) -> Vec<[f64; 3]> {
    pts.iter()
        .map(|&c| ChartPoint::new(chart, c).embed())
        .collect()
}

fn dist3(a: [f64; 3], b: [f64; 3]) -> f64 {
    let mut s = 0.0;
    for k in 0..3 {
        let d = a[k] - b[k];
        s += d * d;
    }
    s.sqrt()
}

fn point_to_segment(p: [f64; 3], a: [f64; 3], b: [f64; 3]) -> f64 {
    let mut ab = [0.0; 3];
    let mut ap = [0.0; 3];
    for k in 0..3 {
        ab[k] = b[k] - a[k];
        ap[k] = p[k] - a[k];
    }
    let denom = ab.iter().map(|x| x * x).sum::<f64>();
    let mut t = if denom > 1e-30 {
        ab.iter().zip(&ap).map(|(x, y)| x * y).sum::<f64>() / denom
    } else {
        0.0
    };
    t = t.clamp(0.0, 1.0);
    let mut s = 0.0;
    for k in 0..3 {
        let d = p[k] - (a[k] + t * ab[k]);
        s += d * d;
    }
    s.sqrt()
}

/// Mean distance from (a sample of) `pts` to the closed polyline `poly`.
fn mean_curve_dist(pts: &[[f64; 3]], poly: &[[f64; 3]], poly_closed: bool) -> f64 {
    let m = poly.len();
    if m < 2 || pts.is_empty() {
        return f64::INFINITY;
    }
    let seg_count = if poly_closed { m } else { m - 1 };
    let stride = (pts.len() / 48).max(1);
    let mut total = 0.0;
    let mut count = 0usize;
    for p in pts.iter().step_by(stride) {
        let mut best = f64::INFINITY;
        for k in 0..seg_count {
            best = best.min(point_to_segment(*p, poly[k], poly[(k + 1) % m]));
        }
        total += best;
        count += 1;
    }
    total / count as f64
}

struct Piece {
    chart: ChartId,
    pts: Vec<Complex64>,
    embedded: Vec<[f64; 3]>,
}

/// Solves `f = 0, |c| = limit` by a 2x2 Newton step from a linear estimate,
/// so that both charts compute the same crossing point to high accuracy.
/// Falls back to the estimate when the system is near-singular (curve close
/// to tangent to the circle).
fn refine_circle_crossing(
    spec: &SymbolSpec,
    chart: ChartId,
    guess: Complex64,
    limit: f64,
    tol: &Tolerances,
) -> Complex64 {
    let mut c = guess;
    for _ in 0..12 {
        let at = ChartPoint::new(chart, c);
        let f = spec.eval_f(&at);
        let r = c.norm() - limit;
        if f.abs() <= tol.trace_tol && r.abs() <= 1e-12 {
            return c;
        }
        let g = spec.grad_f_complex(&at);
        let n = c.norm();
        if n < 1e-12 {
            return guess;
        }
        // solve [gx gy; rx ry]·d = (-f, -r)
        let (gx, gy) = (g.re, g.im);
        let (rx, ry) = (c.re / n, c.im / n);
        let det = gx * ry - gy * rx;
        if det.abs() < 1e-10 {
            return c;
        }
        let dx = (-f * ry + gy * r) / det;
        let dy = (f * rx - gx * r) / det;
        let step = Complex::new(dx, dy);
        if step.norm() > 0.1 {
            return c;
        }
        c += step;
    }
    c
}

/// Splits an open chain into the parts inside the ownership radius, with
/// refined crossing points on the boundary circle as their endpoints.
fn trim_to_ownership(
    spec: &SymbolSpec,
    chart: ChartId,
    pts: &[Complex64],
    limit: f64,
    tol: &Tolerances,
) -> Vec<Vec<Complex64>> {
    let cross = |a: Complex64, b: Complex64| {
        let (na, nb) = (a.norm(), b.norm());
        let t = if (nb - na).abs() < 1e-30 { 0.5 } else { (limit - na) / (nb - na) };
        let guess = a + (b - a) * t.clamp(0.0, 1.0);
        refine_circle_crossing(spec, chart, guess, limit, tol)
    };
    let mut out: Vec<Vec<Complex64>> = Vec::new();
    let mut cur: Vec<Complex64> = Vec::new();
    for (k, &c) in pts.iter().enumerate() {
        if c.norm() <= limit {
            if cur.is_empty() && k > 0 {
                cur.push(cross(pts[k - 1], c));
            }
            cur.push(c);
        } else if !cur.is_empty() {
            cur.push(cross(*cur.last().unwrap(), c));
            if cur.len() >= 2 {
                out.push(core::mem::take(&mut cur));
            } else {
                cur.clear();
            }
        }
    }
    if cur.len() >= 2 {
        out.push(cur);
    }
    out
}

fn normalize3(mut v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if n > 1e-30 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
    v
}

/// Travel direction at the start of a piece when traversed (optionally
/// reversed).
fn piece_start_dir(embedded: &[[f64; 3]], reversed: bool) -> [f64; 3] {
    let (a, b) = if reversed {
        (embedded[embedded.len() - 1], embedded[embedded.len() - 2])
    } else {
        (embedded[0], embedded[1])
    };
    normalize3([b[0] - a[0], b[1] - a[1], b[2] - a[2]])
}

/// Travel direction at the end of a piece when traversed (optionally
/// reversed).
fn piece_end_dir(embedded: &[[f64; 3]], reversed: bool) -> [f64; 3] {
    let (a, b) = if reversed {
        (embedded[1], embedded[0])
    } else {
        (embedded[embedded.len() - 2], embedded[embedded.len() - 1])
    };
    normalize3([b[0] - a[0], b[1] - a[1], b[2] - a[2]])
}

/// Joins trimmed pieces into closed mixed-chart cycles by matching endpoints
/// in the embedding.
fn stitch_pieces(pieces: Vec<Piece>, tol: &Tolerances) -> Result<Vec<Vec<ChartPoint>>> {
    let mut used = vec![false; pieces.len()];
    let mut cycles = Vec::new();
    for start in 0..pieces.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut cyc: Vec<ChartPoint> = pieces[start]
            .pts
            .iter()
            .map(|&c| ChartPoint::new(pieces[start].chart, c))
            .collect();
        let head = pieces[start].embedded[0];
        let head_dir = piece_start_dir(&pieces[start].embedded, false);
        let mut tail = *pieces[start].embedded.last().unwrap();
        let mut tail_dir = piece_end_dir(&pieces[start].embedded, false);
        loop {
            let gap = dist3(head, tail);
            let dot_close: f64 = (0..3).map(|a| tail_dir[a] * head_dir[a]).sum();
            let may_close = gap <= tol.stitch_tol && dot_close > 0.0 && cyc.len() >= 3;

            // nearest free endpoint that continues in the same direction
            let mut best: Option<(usize, bool, f64)> = None;
            for (k, piece) in pieces.iter().enumerate() {
                if used[k] {
                    continue;
                }
                for reversed in [false, true] {
                    let end = if reversed {
                        *piece.embedded.last().unwrap()
                    } else {
                        piece.embedded[0]
                    };
                    let d = dist3(end, tail);
                    if d > tol.stitch_tol {
                        continue;
                    }
                    let start_dir = piece_start_dir(&piece.embedded, reversed);
                    let dot: f64 = (0..3).map(|a| tail_dir[a] * start_dir[a]).sum();
                    if dot > 0.0 && best.map(|(_, _, bd)| d < bd).unwrap_or(true) {
                        best = Some((k, reversed, d));
                    }
                }
            }

            let (k, reversed) = match (may_close, best) {
                (true, None) => break,
                (true, Some((_, _, d))) if gap <= d => break,
                (_, Some((k, reversed, _))) => (k, reversed),
                (false, None) => {
                    return Err(Error::TraceIncomplete {
                        open_pieces: used.iter().filter(|u| !**u).count() + 1,
                        gap,
                    });
                }
            };
            used[k] = true;
            let piece = &pieces[k];
            let mut pts = piece.pts.clone();
            if reversed {
                pts.reverse();
            }
            // the first vertex duplicates the matched endpoint
            for &c in pts.iter().skip(1) {
                cyc.push(ChartPoint::new(piece.chart, c));
            }
            tail = if reversed {
                piece.embedded[0]
            } else {
                *piece.embedded.last().unwrap()
            };
            tail_dir = piece_end_dir(&piece.embedded, reversed);
        }
        if cyc.len() >= 3 {
            cycles.push(cyc);
        }
    }
    Ok(cycles)
}

// ---------------------------------------------------------------------------
// public operations
// ---------------------------------------------------------------------------

/// Traces all connected components of `{f = 0}` and orients them as the
/// boundary of `{f < 0}`.
pub fn trace_level_set(
    spec: &SymbolSpec,
    grid_n: usize,
    tol: &Tolerances,
) -> Result<Vec<OrientedCurve>> {
    assert!(grid_n >= 16, "grid_n too small for meaningful tracing");
    let mut loops: Vec<(ChartId, Vec<Complex64>, Vec<[f64; 3]>)> = Vec::new();
    let mut open: Vec<(ChartId, Vec<Complex64>)> = Vec::new();

    for chart in [ChartId::Chart1, ChartId::Chart2] {
        for chain in march_chart(spec, chart, grid_n, tol)? {
            let refined: Vec<Complex64> = chain
                .points
                .iter()
                .map(|&c| refine_onto_level_set(spec, ChartPoint::new(chart, c), tol).0.coord)
                .collect();
            let dense = densify(spec, chart, refined, chain.closed, tol);
            if chain.closed {
                if dense.len() >= 3 {
                    let embedded = embed_all(chart, &dense);
                    loops.push((chart, dense, embedded));
                }
            } else {
                open.push((chart, dense));
            }
        }
    }

    // merge loops traced by both charts, preferring the chart that keeps the
    // loop inside the unit disk
    let mut unique: Vec<(ChartId, Vec<Complex64>, Vec<[f64; 3]>)> = Vec::new();
    'outer: for (chart, pts, embedded) in loops {
        for existing in unique.iter_mut() {
            if mean_curve_dist(&embedded, &existing.2, true) < tol.merge_dist {
                let new_max = pts.iter().fold(0.0f64, |m, c| m.max(c.norm()));
                let old_max = existing.1.iter().fold(0.0f64, |m, c| m.max(c.norm()));
                if new_max <= 1.0 + 1e-9 && old_max > 1.0 + 1e-9 {
                    *existing = (chart, pts, embedded);
                }
                continue 'outer;
            }
        }
        unique.push((chart, pts, embedded));
    }

    // trim open chains to the ownership partition and drop the parts that are
    // re-traces of loops already accepted
    let mut pieces: Vec<Piece> = Vec::new();
    for (chart, pts) in open {
        let limit = match chart {
            ChartId::Chart1 => tol.trim_radius,
            ChartId::Chart2 => 1.0 / tol.trim_radius,
        };
        for part in trim_to_ownership(spec, chart, &pts, limit, tol) {
            let embedded = embed_all(chart, &part);
            let covered = unique
                .iter()
                .any(|(_, _, le)| mean_curve_dist(&embedded, le, true) < tol.merge_dist);
            if !covered {
                pieces.push(Piece { chart, pts: part, embedded });
            }
        }
    }
    let stitched = stitch_pieces(pieces, tol)?;

    let mut curves: Vec<OrientedCurve> = Vec::new();
    for (chart, pts, _) in unique {
        let vertices = pts.into_iter().map(|c| ChartPoint::new(chart, c)).collect();
        curves.push(OrientedCurve { vertices, orientation_check: 0.0 });
    }
    for cyc in stitched {
        curves.push(OrientedCurve { vertices: dedup_vertices(cyc), orientation_check: 0.0 });
    }

    let mut oriented = Vec::with_capacity(curves.len());
    for curve in curves {
        oriented.push(orient_as_boundary(&curve, spec, tol)?);
    }
    // deterministic component order: by embedded centroid
    oriented.sort_by(|a, b| {
        let ca = centroid(a);
        let cb = centroid(b);
        ca.partial_cmp(&cb).unwrap_or(core::cmp::Ordering::Equal)
    });
    Ok(oriented)
}

fn centroid(c: &OrientedCurve) -> [f64; 3] {
    let mut s = [0.0; 3];
    for v in &c.vertices {
        let e = v.embed();
        for k in 0..3 {
            s[k] += e[k];
        }
    }
    let n = c.vertices.len().max(1) as f64;
    [s[0] / n, s[1] / n, s[2] / n]
}

fn dedup_vertices(mut v: Vec<ChartPoint>) -> Vec<ChartPoint> {
    v.dedup_by(|a, b| a.chord_dist(b) < 1e-9);
    while v.len() > 2 && v[0].chord_dist(v.last().unwrap()) < 1e-9 {
        v.pop();
    }
    v
}

/// Chooses the traversal direction so that `f < 0` lies on the left of the
/// curve (offset along `i·tangent`), which orients it as the boundary of the
/// region `{f < 0}`. Idempotent; reversing the input does not change the
/// output traversal.
pub fn orient_as_boundary(
    curve: &OrientedCurve,
    spec: &SymbolSpec,
    tol: &Tolerances,
) -> Result<OrientedCurve> {
    let n = curve.vertices.len();
    assert!(n >= 3, "orientation needs a closed polyline");
    let stride = (n / 32).max(1);
    let mut votes = 0i64;
    let mut worst = f64::INFINITY;
    let mut sampled = 0usize;
    for k in (0..n).step_by(stride) {
        let v = curve.vertices[k];
        let t = curve.unit_tangent(k);
        let off = ChartPoint::new(v.chart, v.coord + Complex::<f64>::i() * t * tol.orient_offset);
        let f = spec.eval_f(&off);
        if f.abs() < 1e-12 {
            continue;
        }
        sampled += 1;
        votes += if f < 0.0 { 1 } else { -1 };
        worst = worst.min(f.abs());
    }
    if sampled == 0 {
        return Err(Error::OrientationAmbiguous { margin: 0.0 });
    }
    let vertices = if votes >= 0 {
        curve.vertices.clone()
    } else {
        let mut v = curve.vertices.clone();
        v.reverse();
        v
    };
    Ok(OrientedCurve { vertices, orientation_check: worst })
}

/// Measures how far the traced symbol is from the genericity assumptions:
/// the gradient floor on the curve and the equal-modulus fiber condition.
pub fn genericity_diagnostic(
    spec: &SymbolSpec,
    curves: &[OrientedCurve],
    tol: &Tolerances,
) -> GenericityReport {
    let mut min_grad = f64::INFINITY;
    let mut defect = 0.0f64;
    let mut residual = 0.0f64;
    for curve in curves {
        for v in &curve.vertices {
            let g = spec.grad_f_complex(v).norm();
            min_grad = min_grad.min(g);
            let (zv, zw) = spec.eval_sections(v);
            defect = defect.max((zv.norm() - zw.norm()).abs());
            residual = residual.max(spec.eval_f(v).abs());
        }
    }
    let verdict = if min_grad < tol.grad_floor / 10.0 || defect > 100.0 * tol.fiber_defect_tol {
        Verdict::Degenerate
    } else if min_grad < tol.grad_floor
        || defect > tol.fiber_defect_tol
        || residual > 10.0 * tol.trace_tol
    {
        Verdict::Suspect
    } else {
        Verdict::Generic
    };
    GenericityReport {
        min_grad_norm_on_curve: min_grad,
        fiber_defect_max: defect,
        max_f_residual: residual,
        verdict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::SymbolSpec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex::new(re, im)
    }

    fn example1() -> SymbolSpec {
        SymbolSpec::new(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0)], "ex1").unwrap()
    }

    #[test]
    fn example1_is_one_unit_circle() {
        let tol = Tolerances::default();
        let curves = trace_level_set(&example1(), 128, &tol).unwrap();
        assert_eq!(curves.len(), 1);
        let mut worst = 0.0f64;
        for v in &curves[0].vertices {
            worst = worst.max((v.coord.norm() - 1.0).abs());
        }
        assert!(worst <= 1e-6, "distance from unit circle {worst}");
        // every vertex satisfies |f| <= trace_tol and steps stay below max_step
        let spec = example1();
        let n = curves[0].vertices.len();
        for (k, v) in curves[0].vertices.iter().enumerate() {
            assert!(spec.eval_f(v).abs() <= tol.trace_tol);
            let next = curves[0].vertices[(k + 1) % n];
            assert!(v.chord_dist(&next) < tol.max_step * 2.5);
        }
    }

    #[test]
    fn example1_clockwise_in_chart1() {
        // boundary of {|z| > 1} means the enclosed area in the z-plane is
        // traversed clockwise: negative shoelace area
        let tol = Tolerances::default();
        let curves = trace_level_set(&example1(), 128, &tol).unwrap();
        let verts = &curves[0].vertices;
        assert!(verts.iter().all(|v| v.chart == ChartId::Chart1));
        let mut area = 0.0;
        for k in 0..verts.len() {
            let a = verts[k].coord;
            let b = verts[(k + 1) % verts.len()].coord;
            area += a.re * b.im - b.re * a.im;
        }
        assert!(area < 0.0, "area {area}");
    }

    #[test]
    fn orientation_is_involution_proof() {
        let tol = Tolerances::default();
        let spec = example1();
        let curves = trace_level_set(&spec, 96, &tol).unwrap();
        let c0 = &curves[0];
        let again = orient_as_boundary(c0, &spec, &tol).unwrap();
        assert_eq!(c0.vertices, again.vertices);
        let rev = orient_as_boundary(&c0.reversed(), &spec, &tol).unwrap();
        // same traversal direction as the original (possibly different start)
        let a0 = c0.vertices[0];
        let pos = rev
            .vertices
            .iter()
            .position(|v| v.chord_dist(&a0) < 1e-12)
            .unwrap();
        let next_orig = c0.vertices[1];
        let next_rev = rev.vertices[(pos + 1) % rev.vertices.len()];
        assert!(next_rev.chord_dist(&next_orig) < 1e-12);
    }

    #[test]
    fn genericity_example1() {
        let tol = Tolerances::default();
        let spec = example1();
        let curves = trace_level_set(&spec, 128, &tol).unwrap();
        let rep = genericity_diagnostic(&spec, &curves, &tol);
        assert_eq!(rep.verdict, Verdict::Generic);
        assert!(rep.min_grad_norm_on_curve > 0.1);
        assert!(rep.fiber_defect_max <= 1e-6);
    }

    #[test]
    fn radial_spec_with_known_zero_set() {
        // Q = 1, P = 1: f = a^2 (a^4 - 1), zero exactly on |z| = 1
        let spec = SymbolSpec::new(&[c(1.0, 0.0)], &[c(1.0, 0.0)], "flat").unwrap();
        let tol = Tolerances::default();
        let curves = trace_level_set(&spec, 128, &tol).unwrap();
        assert_eq!(curves.len(), 1);
        for v in &curves[0].vertices {
            assert!((v.coord.norm() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn component_count_stable_under_grid_doubling() {
        let spec = example1();
        let tol = Tolerances::default();
        let a = trace_level_set(&spec, 128, &tol).unwrap().len();
        let b = trace_level_set(&spec, 256, &tol).unwrap().len();
        assert_eq!(a, b);
    }
}
