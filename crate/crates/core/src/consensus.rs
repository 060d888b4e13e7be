//! Moving-knife consensus machinery on the unit circle.
//!
//! Everything here lives on `[0, 1]` with endpoints identified. Agent A's
//! distribution fixes a knife map `kappa(c)`: the smallest point such that
//! the clockwise arc `[c, kappa(c)]` holds exactly `t` of A's mass. Sliding
//! `c` once around the circle while tracking `kappa` sweeps a closed path of
//! candidate cuts; agent B's value of the arc varies continuously along it
//! and equals `t` on average, so a consensus cut is a zero of the objective.
//!
//! Zero-density plateaus of A make `kappa` jump. The path therefore inserts
//! explicit plateau segments — the right knife sweeps across a plateau while
//! the left knife waits, and vice versa — restoring continuity so that
//! bisection stays sound.
//!
//! Numerics: positions are kept as `(period, local)` pairs so that segment
//! lookups always use exact breakpoint coordinates; only objective values
//! (not positions) are subject to rounding.

use crate::error::{Error, Result};
use crate::valuation::{DensitySegment, Entitlement};

/// Tolerance for validating that circle segments form a partition of [0, 1].
const PARTITION_EPS: f64 = 1e-9;

/// Snap distance when a recomputed knife position lands a hair before the
/// breakpoint it provably reaches.
const KNIFE_SNAP: f64 = 1e-12;

/// A point on the universal cover of the circle: `period + x` with the
/// local coordinate kept exact for breakpoint lookups.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
struct Lifted {
    period: i64,
    x: f64,
}

impl Lifted {
    fn new(period: i64, x: f64) -> Self {
        debug_assert!((0.0..1.0).contains(&x), "local coordinate {x} out of range");
        Lifted { period, x }
    }

    fn value(self) -> f64 {
        self.period as f64 + self.x
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

/// A piecewise-constant probability density on the unit circle, stored as
/// its exact breakpoint table and cumulative distribution.
#[derive(Debug, Clone)]
pub struct CircleValuation {
    /// `breakpoints[0] = 0 < ... < breakpoints[n] = 1`.
    breakpoints: Vec<f64>,
    /// `cum[i]` is the CDF at `breakpoints[i]`; `cum[n] = 1` exactly.
    cum: Vec<f64>,
    /// Density on `[breakpoints[i], breakpoints[i + 1]]`.
    dens: Vec<f64>,
}

impl CircleValuation {
    /// Builds a circle valuation from contiguous segments covering [0, 1]
    /// in order. Densities are scaled so the total mass is exactly 1.
    pub fn new(segments: Vec<DensitySegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::BadCircleValuation("no segments".to_string()));
        }
        if segments[0].lo.abs() > PARTITION_EPS {
            return Err(Error::BadCircleValuation(format!(
                "first segment starts at {}, not 0",
                segments[0].lo
            )));
        }
        if (segments.last().expect("non-empty").hi - 1.0).abs() > PARTITION_EPS {
            return Err(Error::BadCircleValuation(format!(
                "last segment ends at {}, not 1",
                segments.last().expect("non-empty").hi
            )));
        }
        let mut breakpoints = vec![0.0];
        let mut dens = Vec::with_capacity(segments.len());
        let mut prev_hi = 0.0;
        for s in &segments {
            if !s.lo.is_finite() || !s.hi.is_finite() || !s.density.is_finite() {
                return Err(Error::BadCircleValuation(
                    "non-finite segment".to_string(),
                ));
            }
            if (s.lo - prev_hi).abs() > PARTITION_EPS {
                return Err(Error::BadCircleValuation(format!(
                    "gap between segments near {prev_hi}"
                )));
            }
            if s.density < -1e-12 {
                return Err(Error::BadCircleValuation(format!(
                    "negative density {}",
                    s.density
                )));
            }
            prev_hi = s.hi;
            let last = *breakpoints.last().expect("non-empty");
            let hi = s.hi.clamp(last, 1.0);
            if hi > last {
                breakpoints.push(hi);
                dens.push(s.density.max(0.0));
            }
        }
        *breakpoints.last_mut().expect("non-empty") = 1.0;
        if dens.is_empty() {
            return Err(Error::BadCircleValuation(
                "all segments have zero width".to_string(),
            ));
        }
        let mut cum = Vec::with_capacity(breakpoints.len());
        cum.push(0.0);
        for i in 0..dens.len() {
            let width = breakpoints[i + 1] - breakpoints[i];
            cum.push(cum[i] + dens[i] * width);
        }
        let total = *cum.last().expect("non-empty");
        if total <= 0.0 {
            return Err(Error::BadCircleValuation("zero total mass".to_string()));
        }
        for c in &mut cum {
            *c /= total;
        }
        for d in &mut dens {
            *d /= total;
        }
        *cum.last_mut().expect("non-empty") = 1.0;
        Ok(CircleValuation {
            breakpoints,
            cum,
            dens,
        })
    }

    /// The uniform density.
    pub fn uniform() -> Self {
        CircleValuation {
            breakpoints: vec![0.0, 1.0],
            cum: vec![0.0, 1.0],
            dens: vec![1.0],
        }
    }

    pub fn max_density(&self) -> f64 {
        self.dens.iter().copied().fold(0.0, f64::max)
    }

    /// Piece boundaries, from 0.0 to 1.0 inclusive.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Piece densities; entry `i` covers `breakpoints[i]..breakpoints[i+1]`.
    pub fn densities(&self) -> &[f64] {
        &self.dens
    }

    /// CDF at `x` in [0, 1]; exact at breakpoints.
    pub fn cdf(&self, x: f64) -> f64 {
        let n = self.dens.len();
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let i = self.breakpoints.partition_point(|&b| b <= x) - 1;
        let i = i.min(n - 1);
        if self.breakpoints[i] == x {
            self.cum[i]
        } else {
            self.cum[i] + self.dens[i] * (x - self.breakpoints[i])
        }
    }

    /// Generalized inverse CDF: the smallest `x` with `cdf(x) >= y`. On a
    /// plateau of the CDF this returns the plateau's left end.
    pub fn quantile(&self, y: f64) -> f64 {
        let n = self.dens.len();
        if y <= 0.0 {
            return 0.0;
        }
        let j = self.cum.partition_point(|&c| c < y);
        if j > n {
            return 1.0;
        }
        if self.cum[j] == y {
            return self.breakpoints[j];
        }
        let i = j - 1;
        let x = self.breakpoints[i] + (y - self.cum[i]) / self.dens[i];
        x.min(self.breakpoints[j])
    }

    /// CDF on the universal cover: `lifted_cdf(x + 1) = lifted_cdf(x) + 1`.
    pub fn lifted_cdf(&self, x: f64) -> f64 {
        let k = x.floor();
        k + self.cdf(x - k)
    }

    /// Mass of the clockwise arc from `c` to `k` (wrapping if `k <= c`).
    pub fn arc_value(&self, c: f64, k: f64) -> f64 {
        let roll = |x: f64| x - x.floor();
        let (c, k) = (roll(c), roll(k));
        if k >= c {
            self.cdf(k) - self.cdf(c)
        } else {
            1.0 - self.cdf(c) + self.cdf(k)
        }
    }

    // ─── exact lifted-point helpers used by the path builder ───

    fn cdf_at(&self, p: Lifted) -> f64 {
        p.period as f64 + self.cdf(p.x)
    }

    /// Smallest lifted point with CDF at least `y`, for `y` in (0, 2].
    fn quantile_at(&self, y: f64) -> Lifted {
        debug_assert!(y > 0.0 && y <= 2.0 + 1e-9, "quantile target {y}");
        let period = (y.ceil() as i64 - 1).max(0);
        let q = self.quantile(y - period as f64);
        if q >= 1.0 {
            Lifted::new(period + 1, 0.0)
        } else {
            Lifted::new(period, q)
        }
    }

    /// Density immediately to the right of `p`.
    fn density_after(&self, p: Lifted) -> f64 {
        let n = self.dens.len();
        let i = self.breakpoints.partition_point(|&b| b <= p.x) - 1;
        self.dens[i.min(n - 1)]
    }

    /// Next breakpoint strictly after `p`.
    fn next_breakpoint_after(&self, p: Lifted) -> Lifted {
        let n = self.dens.len();
        let j = self.breakpoints[..n].partition_point(|&b| b <= p.x);
        if j >= n {
            Lifted::new(p.period + 1, 0.0)
        } else {
            Lifted::new(p.period, self.breakpoints[j])
        }
    }

    /// First point at or after `p` with positive density ahead. Only
    /// meaningful when `p` sits in a zero-density stretch.
    fn plateau_end_after(&self, p: Lifted) -> Lifted {
        let n = self.dens.len();
        let mut i = (self.breakpoints.partition_point(|&b| b <= p.x) - 1).min(n - 1);
        let mut pos = p;
        for _ in 0..=n {
            if self.dens[i] > 0.0 {
                return pos;
            }
            pos = if i + 1 >= n {
                Lifted::new(pos.period + 1, 0.0)
            } else {
                Lifted::new(pos.period, self.breakpoints[i + 1])
            };
            i = (i + 1) % n;
        }
        // Unreachable: total mass is 1, so some segment has positive density.
        pos
    }
}

/// The knife map: smallest point `k` such that the arc `[c, k]` holds mass
/// `t`. Returned on the circle (in `[0, 1)`).
pub fn kappa(va: &CircleValuation, t: Entitlement, c: f64) -> f64 {
    let c = c - c.floor();
    let k = va.quantile_at((va.cdf(c) + t.get()).clamp(f64::MIN_POSITIVE, 2.0));
    k.x
}

/// What the knives are doing on one path segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentKind {
    /// Both knives move through positive density; A's arc mass stays `t`.
    Regular,
    /// The right knife sweeps a zero-density plateau of A; the left waits.
    PlateauRight,
    /// The left knife sweeps a zero-density plateau of A; the right waits.
    PlateauLeft,
}

/// One linear piece of the knife path, in lifted coordinates.
#[derive(Debug, Clone, Copy)]
pub struct PathSegment {
    pub kind: SegmentKind,
    /// Path parameter range (cumulative knife travel, normalized to [0, 1]).
    pub s0: f64,
    pub s1: f64,
    pub c0: f64,
    pub c1: f64,
    pub k0: f64,
    pub k1: f64,
}

/// The closed path of candidate cuts `(c, kappa(c))` for one full turn of
/// the left knife, with plateau segments spliced in.
#[derive(Debug, Clone)]
pub struct KnifePath {
    segments: Vec<PathSegment>,
    t: f64,
}

impl KnifePath {
    pub fn segments(&self) -> &[PathSegment] {
        &self.segments
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Knife positions at path parameter `s` in [0, 1], as lifted
    /// coordinates `(c, k)` with `c <= k <= c + 1`.
    pub fn state_at(&self, s: f64) -> (f64, f64) {
        let s = s.clamp(0.0, 1.0);
        let i = self
            .segments
            .partition_point(|seg| seg.s1 < s)
            .min(self.segments.len() - 1);
        let seg = &self.segments[i];
        let w = seg.s1 - seg.s0;
        let tau = if w > 0.0 { ((s - seg.s0) / w).clamp(0.0, 1.0) } else { 1.0 };
        (
            seg.c0 + tau * (seg.c1 - seg.c0),
            seg.k0 + tau * (seg.k1 - seg.k0),
        )
    }
}

/// Builds the knife path for entitlement `t` in (0, 1).
///
/// Event-driven sweep: between events both knives sit in constant-density
/// segments, so the right knife's position is linear in the left's. Events
/// are breakpoint crossings of either knife; after each event the right
/// knife is re-derived from the CDF so positions cannot drift.
pub fn build_knife_path(va: &CircleValuation, t: Entitlement) -> Result<KnifePath> {
    let t = t.get();
    debug_assert!(t > 0.0 && t < 1.0, "degenerate entitlement {t}");
    let end = Lifted::new(1, 0.0);
    let mut c = Lifted::new(0, 0.0);
    let mut k = va.quantile_at(t);
    let mut raw: Vec<(SegmentKind, Lifted, Lifted, Lifted, Lifted)> = Vec::new();
    let max_iter = 64 * (va.dens.len() + 2);
    let mut iterations = 0;
    loop {
        iterations += 1;
        if iterations > max_iter {
            return Err(Error::BadCircleValuation(format!(
                "knife path failed to close after {} segments",
                raw.len()
            )));
        }
        // Right knife clears its plateau first: among all cuts with the
        // same A-mass, take the one extending farthest.
        if va.density_after(k) == 0.0 {
            let k2 = va
                .plateau_end_after(k)
                .min(Lifted::new(c.period + 1, c.x));
            if k2 > k {
                raw.push((SegmentKind::PlateauRight, c, c, k, k2));
                k = k2;
                continue;
            }
        }
        // Then the left knife clears its own plateau.
        if c < end && va.density_after(c) == 0.0 {
            let c2 = va.plateau_end_after(c).min(end);
            if c2 > c {
                raw.push((SegmentKind::PlateauLeft, c, c2, k, k));
                c = c2;
                continue;
            }
        }
        if c >= end {
            break;
        }
        // Regular segment up to the next breakpoint crossing.
        let dc = va.density_after(c);
        let dk = va.density_after(k);
        let cb = va.next_breakpoint_after(c).min(end);
        let kb = va.next_breakpoint_after(k);
        let step_via_c = cb.value() - c.value();
        let step_via_k = (kb.value() - k.value()) * dk / dc;
        let (c2, k2) = if step_via_c <= step_via_k {
            let c2 = cb;
            let mut k2 = va.quantile_at(va.cdf_at(c2) + t);
            if k2 < k {
                k2 = k;
            }
            if k2 < kb && kb.value() - k2.value() < KNIFE_SNAP {
                k2 = kb; // provably reaches the breakpoint; undo rounding
            }
            // Within one segment the right knife cannot pass its own
            // breakpoint; if the quantile target grazed a plateau level,
            // it may have skipped the whole plateau. Pull it back.
            if k2 > kb {
                k2 = kb;
            }
            (c2, k2)
        } else {
            // The right knife reaches its breakpoint first; the event
            // itself pins the exact endpoint, no quantile needed.
            let target = c.value() + step_via_k;
            let c2 = Lifted::new(
                target.floor() as i64,
                (target - target.floor()).clamp(0.0, 1.0 - f64::EPSILON),
            );
            (c2, kb)
        };
        raw.push((SegmentKind::Regular, c, c2, k, k2));
        c = c2;
        k = k2;
    }

    let mut segments = Vec::with_capacity(raw.len());
    let mut travel = 0.0;
    for &(kind, c0, c1, k0, k1) in &raw {
        let w = (c1.value() - c0.value()) + (k1.value() - k0.value());
        if w <= 0.0 {
            continue;
        }
        segments.push(PathSegment {
            kind,
            s0: travel,
            s1: travel + w,
            c0: c0.value(),
            c1: c1.value(),
            k0: k0.value(),
            k1: k1.value(),
        });
        travel += w;
    }
    if segments.is_empty() || travel <= 0.0 {
        return Err(Error::BadCircleValuation(
            "knife path is empty".to_string(),
        ));
    }
    for seg in &mut segments {
        seg.s0 /= travel;
        seg.s1 /= travel;
    }
    segments.last_mut().expect("non-empty").s1 = 1.0;
    Ok(KnifePath { segments, t })
}

/// Signed consensus defect at path parameter `s`: B's mass of the arc
/// `[c(s), kappa(s)]` minus `t`. A's mass of the same arc is `t` by
/// construction (exactly on regular segments, and still on plateau segments
/// since only zero-density ground is swept).
pub fn objective(vb: &CircleValuation, path: &KnifePath, s: f64) -> f64 {
    let (c, k) = path.state_at(s);
    vb.lifted_cdf(k) - vb.lifted_cdf(c) - path.t()
}

/// Solver resolution: the starting grid and the cap it may double up to.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub grid_start: usize,
    pub grid_max: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            grid_start: 1024,
            grid_max: 1 << 20,
        }
    }
}

/// A consensus cut: the arc `[c, kappa]` (clockwise, possibly wrapping) is
/// agent A's piece. Residuals report how far each agent's mass of that arc
/// is from `t`.
#[derive(Debug, Clone, Copy)]
pub struct CutPair {
    /// Left cut point on the circle, in `[0, 1)`.
    pub c: f64,
    /// Right cut point on the circle, in `[0, 1)`.
    pub kappa: f64,
    /// Arc length in parameter space; `kappa = (c + arc_len) mod 1`.
    pub arc_len: f64,
    /// Path parameter where the cut was found (0 for degenerate cuts).
    pub param: f64,
    pub residual_a: f64,
    pub residual_b: f64,
}

fn cut_at(va: &CircleValuation, vb: &CircleValuation, path: &KnifePath, s: f64) -> CutPair {
    let (c, k) = path.state_at(s);
    let arc_len = (k - c).clamp(0.0, 1.0);
    let t = path.t();
    let roll = |x: f64| {
        let r = x - x.floor();
        if r >= 1.0 {
            0.0
        } else {
            r
        }
    };
    CutPair {
        c: roll(c),
        kappa: roll(c + arc_len),
        arc_len,
        param: s,
        residual_a: (va.lifted_cdf(k) - va.lifted_cdf(c) - t).abs(),
        residual_b: (vb.lifted_cdf(k) - vb.lifted_cdf(c) - t).abs(),
    }
}

/// Finds a cut both agents value at `t` within `tol`.
///
/// Scans the knife path on a uniform grid, accepting the first sample whose
/// objective is within `tol`; otherwise bisects the first sign change. The
/// grid doubles up to `grid_max` before giving up, so the returned cut is
/// deterministic (smallest path parameter at the finest grid reached).
pub fn solve_consensus(
    va: &CircleValuation,
    vb: &CircleValuation,
    t: Entitlement,
    tol: f64,
    config: SolverConfig,
) -> Result<CutPair> {
    let tv = t.get();
    if tv <= 0.0 || tv >= 1.0 {
        // Degenerate entitlements: an empty arc or the full circle.
        return Ok(CutPair {
            c: 0.0,
            kappa: 0.0,
            arc_len: if tv >= 1.0 { 1.0 } else { 0.0 },
            param: 0.0,
            residual_a: 0.0,
            residual_b: 0.0,
        });
    }
    let path = build_knife_path(va, t)?;
    let mut n = config.grid_start.clamp(2, config.grid_max.max(2));
    let mut best = (f64::INFINITY, 0.0_f64); // (|objective|, s)
    loop {
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..=n {
            let s = i as f64 / n as f64;
            let v = objective(vb, &path, s);
            if v.abs() < best.0 {
                best = (v.abs(), s);
            }
            if v.abs() <= tol {
                return Ok(cut_at(va, vb, &path, s));
            }
            if let Some((ps, pv)) = prev {
                if pv * v < 0.0 {
                    let s = bisect(vb, &path, ps, s, pv, tol);
                    return Ok(cut_at(va, vb, &path, s));
                }
            }
            prev = Some((s, v));
        }
        if n >= config.grid_max {
            let cut = cut_at(va, vb, &path, best.1);
            return Err(Error::ResolutionExhausted {
                grid: n,
                best: (cut.c, cut.kappa),
                residual_a: cut.residual_a,
                residual_b: cut.residual_b,
            });
        }
        n = (n * 2).min(config.grid_max);
    }
}

/// Bisection on a bracketing interval of the (continuous) objective.
fn bisect(vb: &CircleValuation, path: &KnifePath, lo: f64, hi: f64, flo: f64, tol: f64) -> f64 {
    let (mut lo, mut hi, mut flo) = (lo, hi, flo);
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..256 {
        mid = 0.5 * (lo + hi);
        let v = objective(vb, path, mid);
        if v.abs() <= tol {
            return mid;
        }
        if v * flo > 0.0 {
            lo = mid;
            flo = v;
        } else {
            hi = mid;
        }
    }
    mid
}
