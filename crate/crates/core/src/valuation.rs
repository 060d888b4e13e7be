//! Piecewise-constant valuations on a cake.
//!
//! A valuation assigns each edge a density function that is constant on
//! finitely many segments. Integrating a non-negative density yields a
//! non-atomic measure, so single points always have value zero. The divider
//! works with valuations normalized to total mass 1; raw densities can be
//! loaded first and normalized explicitly.

use crate::cake::{GraphCake, SubInterval, Division, DIVISION_EPS, SNAP_EPS};
use crate::error::{Error, Result};

/// Constant density `density` on `[lo, hi]` of one edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensitySegment {
    pub lo: f64,
    pub hi: f64,
    pub density: f64,
}

impl DensitySegment {
    pub fn new(lo: f64, hi: f64, density: f64) -> Self {
        DensitySegment { lo, hi, density }
    }
}

/// Entitlement of agent A; agent B holds the complement `1 - t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entitlement(f64);

impl Entitlement {
    pub fn new(t: f64) -> Result<Self> {
        if t.is_finite() && (0.0..=1.0).contains(&t) {
            Ok(Entitlement(t))
        } else {
            Err(Error::EntitlementRange(t))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// A piecewise-constant valuation over all edges of a cake.
///
/// Internally each edge carries a full partition of `[0, length]`: gaps in
/// the input are filled with zero-density segments, so lookups never fall
/// through.
#[derive(Debug, Clone)]
pub struct Valuation {
    per_edge: Vec<Vec<DensitySegment>>,
}

impl Valuation {
    /// Validates raw segments against the cake. `segments[i]` belongs to
    /// edge `i`; missing trailing edges are allowed and treated as empty.
    /// Segments may not overlap; uncovered stretches get density zero.
    pub fn new(cake: &GraphCake, mut segments: Vec<Vec<DensitySegment>>) -> Result<Self> {
        if segments.len() > cake.edge_count() {
            return Err(Error::NoSuchEdge(format!(
                "#{} (cake has {} edges)",
                segments.len() - 1,
                cake.edge_count()
            )));
        }
        segments.resize(cake.edge_count(), Vec::new());
        let mut per_edge = Vec::with_capacity(cake.edge_count());
        for (i, raw) in segments.into_iter().enumerate() {
            let edge = &cake.edges()[i];
            per_edge.push(Self::partition_edge(&edge.name, edge.length, raw)?);
        }
        Ok(Valuation { per_edge })
    }

    /// The uniform valuation: constant density `1 / total_length`.
    pub fn uniform(cake: &GraphCake) -> Self {
        let d = 1.0 / cake.total_length();
        Valuation {
            per_edge: cake
                .edges()
                .iter()
                .map(|e| vec![DensitySegment::new(0.0, e.length, d)])
                .collect(),
        }
    }

    /// Sorts, snaps, and gap-fills one edge's segments into a partition.
    fn partition_edge(
        name: &str,
        length: f64,
        mut raw: Vec<DensitySegment>,
    ) -> Result<Vec<DensitySegment>> {
        let eps = SNAP_EPS * length.max(1.0);
        for s in &raw {
            if !s.lo.is_finite() || !s.hi.is_finite() || s.lo < -eps || s.hi > length + eps || s.lo > s.hi {
                return Err(Error::SegmentOutOfBounds {
                    edge: name.to_string(),
                    lo: s.lo,
                    hi: s.hi,
                    length,
                });
            }
            if s.density < 0.0 || s.density.is_nan() {
                return Err(Error::NegativeDensity {
                    edge: name.to_string(),
                    density: s.density,
                });
            }
        }
        raw.sort_by(|a, b| a.lo.partial_cmp(&b.lo).expect("finite segment bounds"));
        let mut out: Vec<DensitySegment> = Vec::with_capacity(raw.len() + 2);
        let mut cursor = 0.0_f64;
        for s in raw {
            let lo = if s.lo.abs() <= eps { 0.0 } else { s.lo };
            let hi = if (s.hi - length).abs() <= eps { length } else { s.hi };
            if hi - lo <= eps {
                continue; // zero-width segment carries no mass
            }
            if lo < cursor - eps {
                return Err(Error::SegmentOverlap {
                    edge: name.to_string(),
                    at: lo,
                });
            }
            if lo > cursor {
                out.push(DensitySegment::new(cursor, lo, 0.0));
            }
            out.push(DensitySegment::new(cursor.max(lo), hi, s.density));
            cursor = hi;
        }
        if cursor < length {
            out.push(DensitySegment::new(cursor, length, 0.0));
        }
        if out.is_empty() {
            out.push(DensitySegment::new(0.0, length, 0.0));
        }
        // Re-anchor the partition exactly: consecutive segments share bounds.
        let mut prev_hi = 0.0;
        for s in &mut out {
            s.lo = prev_hi;
            prev_hi = s.hi;
        }
        out.last_mut().expect("non-empty partition").hi = length;
        Ok(out)
    }

    /// Segments of one edge, a partition of `[0, length]` in order.
    pub fn segments(&self, edge: usize) -> &[DensitySegment] {
        &self.per_edge[edge]
    }

    /// Total mass over the whole cake.
    pub fn total(&self) -> f64 {
        self.per_edge
            .iter()
            .flatten()
            .map(|s| s.density * (s.hi - s.lo))
            .sum()
    }

    /// Largest density anywhere on the cake.
    pub fn max_density(&self) -> f64 {
        self.per_edge
            .iter()
            .flatten()
            .map(|s| s.density)
            .fold(0.0, f64::max)
    }

    /// Scales densities so the total mass becomes 1. Fails on zero mass.
    pub fn normalize(&self) -> Result<Valuation> {
        let total = self.total();
        if total <= 0.0 || !total.is_finite() {
            return Err(Error::ZeroTotalMass);
        }
        Ok(Valuation {
            per_edge: self
                .per_edge
                .iter()
                .map(|segs| {
                    segs.iter()
                        .map(|s| DensitySegment::new(s.lo, s.hi, s.density / total))
                        .collect()
                })
                .collect(),
        })
    }

    /// Returns an error unless the total mass is 1 within `eps`.
    pub fn ensure_normalized(&self, eps: f64) -> Result<()> {
        let total = self.total();
        if (total - 1.0).abs() > eps {
            return Err(Error::NotNormalized { total });
        }
        Ok(())
    }

    /// Integral of the density over a piece. Subintervals must lie on their
    /// edges (within the division tolerance); overlapping subintervals are
    /// double-counted, so pass canonical pieces when that matters.
    pub fn value_of_piece(&self, cake: &GraphCake, piece: &[SubInterval]) -> Result<f64> {
        let mut value = 0.0;
        for sub in piece {
            let edge = cake
                .edges()
                .get(sub.edge.0)
                .ok_or_else(|| Error::NoSuchEdge(format!("#{}", sub.edge.0)))?;
            let eps = DIVISION_EPS * edge.length.max(1.0);
            if !sub.lo.is_finite()
                || !sub.hi.is_finite()
                || sub.lo < -eps
                || sub.hi > edge.length + eps
                || sub.lo > sub.hi + eps
            {
                return Err(Error::InvalidSubInterval {
                    edge: edge.name.clone(),
                    lo: sub.lo,
                    hi: sub.hi,
                    length: edge.length,
                });
            }
            let (lo, hi) = (sub.lo.max(0.0), sub.hi.min(edge.length));
            for seg in &self.per_edge[sub.edge.0] {
                let overlap = hi.min(seg.hi) - lo.max(seg.lo);
                if overlap > 0.0 {
                    value += seg.density * overlap;
                }
            }
        }
        Ok(value)
    }
}

/// Residuals of a division against the consensus target: how far each
/// agent's value of piece A is from `t`.
pub fn residuals(
    cake: &GraphCake,
    va: &Valuation,
    vb: &Valuation,
    division: &Division,
    t: Entitlement,
) -> Result<(f64, f64)> {
    let ra = (va.value_of_piece(cake, &division.a)? - t.get()).abs();
    let rb = (vb.value_of_piece(cake, &division.a)? - t.get()).abs();
    Ok((ra, rb))
}

/// True when both agents value piece A at `t` within `eps`.
pub fn consensus_check(
    cake: &GraphCake,
    va: &Valuation,
    vb: &Valuation,
    division: &Division,
    t: Entitlement,
    eps: f64,
) -> Result<bool> {
    let (ra, rb) = residuals(cake, va, vb, division, t)?;
    Ok(ra <= eps && rb <= eps)
}
