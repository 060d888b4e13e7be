//! The two file formats: cake instances in, division reports out.
//!
//! Both are TOML with a `format = 1` version field and reject unknown
//! keys. Valuations in a cake file need not sum to one — they are
//! normalized on load. Reports round-trip losslessly: floats are written
//! with enough digits to reparse to the same values.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use consensus_cake::{
    CakeClass, DensitySegment, Division, DivisionReport, Entitlement, EdgeId, GraphCake,
    PointOnCake, SubInterval, TheoremCase, Valuation, VertexId,
};

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

// ─── cake files ───

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CakeFile {
    pub format: u32,
    pub cake: CakeSection,
    pub valuations: ValuationsSection,
    pub entitlement: EntitlementSection,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CakeSection {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSection>,
    /// Optional cyclic edge order per vertex; defaults to declaration order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adjacency: Option<BTreeMap<String, Vec<String>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EdgeSection {
    pub id: String,
    pub u: String,
    pub v: String,
    #[serde(default = "default_length")]
    pub length: f64,
}

fn default_length() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ValuationsSection {
    pub a: BTreeMap<String, Vec<SegmentSection>>,
    pub b: BTreeMap<String, Vec<SegmentSection>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SegmentSection {
    pub lo: f64,
    pub hi: f64,
    pub density: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EntitlementSection {
    pub t: f64,
}

/// A parsed and validated instance.
#[derive(Debug)]
pub struct LoadedInstance {
    pub cake: GraphCake,
    pub va: Valuation,
    pub vb: Valuation,
    pub t: Entitlement,
}

pub fn parse_cake_file(text: &str) -> Result<CakeFile, CliError> {
    let file: CakeFile = toml::from_str(text).map_err(|e| CliError::input(e.to_string()))?;
    if file.format != FORMAT_VERSION {
        return Err(CliError::input(format!(
            "unsupported format {} (expected {FORMAT_VERSION})",
            file.format
        )));
    }
    Ok(file)
}

impl CakeFile {
    /// Snapshots an in-memory instance, e.g. to write fixtures.
    pub fn from_instance(cake: &GraphCake, va: &Valuation, vb: &Valuation, t: Entitlement) -> Self {
        let pack = |val: &Valuation| -> BTreeMap<String, Vec<SegmentSection>> {
            cake.edges()
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    let segs = val
                        .segments(i)
                        .iter()
                        .map(|s| SegmentSection {
                            lo: s.lo,
                            hi: s.hi,
                            density: s.density,
                        })
                        .collect();
                    (e.name.clone(), segs)
                })
                .collect()
        };
        CakeFile {
            format: FORMAT_VERSION,
            cake: CakeSection {
                vertices: (0..cake.vertex_count())
                    .map(|v| cake.vertex_name(VertexId(v)).to_string())
                    .collect(),
                edges: cake
                    .edges()
                    .iter()
                    .map(|e| EdgeSection {
                        id: e.name.clone(),
                        u: cake.vertex_name(e.u).to_string(),
                        v: cake.vertex_name(e.v).to_string(),
                        length: e.length,
                    })
                    .collect(),
                adjacency: None,
            },
            valuations: ValuationsSection {
                a: pack(va),
                b: pack(vb),
            },
            entitlement: EntitlementSection { t: t.get() },
        }
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::input(e.to_string()))
    }

    /// Builds the cake, both (normalized) valuations, and the entitlement.
    pub fn load(&self) -> Result<LoadedInstance, CliError> {
        let edges: Vec<(String, String, String, f64)> = self
            .cake
            .edges
            .iter()
            .map(|e| (e.id.clone(), e.u.clone(), e.v.clone(), e.length))
            .collect();
        let mut cake = GraphCake::new(self.cake.vertices.clone(), edges)?;
        if let Some(adj) = &self.cake.adjacency {
            for (vertex, order) in adj {
                let order: Vec<&str> = order.iter().map(String::as_str).collect();
                cake.set_adjacency(vertex, &order)?;
            }
        }
        let va = load_valuation(&cake, &self.valuations.a)?;
        let vb = load_valuation(&cake, &self.valuations.b)?;
        let t = Entitlement::new(self.entitlement.t)?;
        Ok(LoadedInstance { cake, va, vb, t })
    }
}

fn load_valuation(
    cake: &GraphCake,
    per_edge: &BTreeMap<String, Vec<SegmentSection>>,
) -> Result<Valuation, CliError> {
    let mut segments = vec![Vec::new(); cake.edge_count()];
    for (edge_name, segs) in per_edge {
        let id = cake
            .edge_id(edge_name)
            .ok_or_else(|| CliError::input(format!("valuation names unknown edge {edge_name:?}")))?;
        segments[id.0] = segs
            .iter()
            .map(|s| DensitySegment::new(s.lo, s.hi, s.density))
            .collect();
    }
    Ok(Valuation::new(cake, segments)?.normalize()?)
}

// ─── report files ───

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub format: u32,
    pub class: String,
    pub theorem_case: String,
    pub bound: usize,
    pub t: f64,
    pub tol: f64,
    pub pieces: PiecesSection,
    pub residuals: ResidualsSection,
    pub metrics: MetricsSection,
    #[serde(default)]
    pub cuts: Vec<CutSection>,
    pub division: DivisionSection,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PiecesSection {
    pub a: usize,
    pub b: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ResidualsSection {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MetricsSection {
    pub components: usize,
    pub radius: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree_height: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub star_arms: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CutSection {
    pub edge: String,
    pub offset: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DivisionSection {
    #[serde(default)]
    pub a: Vec<PieceSection>,
    #[serde(default)]
    pub b: Vec<PieceSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PieceSection {
    pub edge: String,
    pub lo: f64,
    pub hi: f64,
}

pub fn parse_report_file(text: &str) -> Result<ReportFile, CliError> {
    let file: ReportFile = toml::from_str(text).map_err(|e| CliError::input(e.to_string()))?;
    if file.format != FORMAT_VERSION {
        return Err(CliError::input(format!(
            "unsupported format {} (expected {FORMAT_VERSION})",
            file.format
        )));
    }
    Ok(file)
}

impl ReportFile {
    pub fn from_report(cake: &GraphCake, report: &DivisionReport) -> Self {
        let piece = |s: &SubInterval| PieceSection {
            edge: cake.edge(s.edge).name.clone(),
            lo: s.lo,
            hi: s.hi,
        };
        ReportFile {
            format: FORMAT_VERSION,
            class: report.class.as_str().to_string(),
            theorem_case: report.theorem_case.as_str().to_string(),
            bound: report.bound,
            t: report.t,
            tol: report.tol,
            pieces: PiecesSection {
                a: report.pieces_a,
                b: report.pieces_b,
            },
            residuals: ResidualsSection {
                a: report.residual_a,
                b: report.residual_b,
            },
            metrics: MetricsSection {
                components: report.metrics.components,
                radius: report.metrics.radius,
                tree_height: report.metrics.tree_height,
                star_arms: report.metrics.star_arms,
            },
            cuts: report
                .cuts
                .iter()
                .map(|p: &PointOnCake| CutSection {
                    edge: cake.edge(p.edge).name.clone(),
                    offset: p.offset,
                })
                .collect(),
            division: DivisionSection {
                a: report.division.a.iter().map(piece).collect(),
                b: report.division.b.iter().map(piece).collect(),
            },
        }
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::input(e.to_string()))
    }

    /// Reconstructs the division against a cake, resolving edge names.
    pub fn division(&self, cake: &GraphCake) -> Result<Division, CliError> {
        let resolve = |pieces: &[PieceSection]| -> Result<Vec<SubInterval>, CliError> {
            pieces
                .iter()
                .map(|p| {
                    let id: EdgeId = cake.edge_id(&p.edge).ok_or_else(|| {
                        CliError::input(format!("report names unknown edge {:?}", p.edge))
                    })?;
                    Ok(SubInterval::new(id, p.lo, p.hi))
                })
                .collect()
        };
        Ok(Division {
            a: resolve(&self.division.a)?,
            b: resolve(&self.division.b)?,
        })
    }

    pub fn cake_class(&self) -> Result<CakeClass, CliError> {
        CakeClass::from_name(&self.class)
            .ok_or_else(|| CliError::input(format!("unknown cake class {:?}", self.class)))
    }

    pub fn case(&self) -> Result<TheoremCase, CliError> {
        TheoremCase::from_name(&self.theorem_case)
            .ok_or_else(|| CliError::input(format!("unknown theorem case {:?}", self.theorem_case)))
    }
}
