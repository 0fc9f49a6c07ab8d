//! Serialized forms of the crate's inputs and reports. Complex numbers are
//! `[re, im]` pairs everywhere; floats print with 17 significant digits so
//! identical runs produce byte-identical files.

use crate::certify::{CriterionMethod, IndependenceCertificate};
use crate::error::{Error, Result};
use crate::forge::{CycleFamily, DisjointnessCertificate, LimitCycle};
use crate::model::{Monomial, PolynomialVectorField};
use crate::scalar::cplx;
use crate::transport::BasePath;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::io::Write;

// ---------------------------------------------------------------------------
// deterministic JSON output
// ---------------------------------------------------------------------------

struct PreciseFormatter;

impl serde_json::ser::Formatter for PreciseFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        // 17 significant digits round-trip any f64
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{:.16e}", value as f64)
    }
}

/// Serializes with fixed field order and 17-significant-digit floats.
pub fn to_json_precise<S: Serialize>(value: &S) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, PreciseFormatter);
    value.serialize(&mut ser).map_err(|e| Error::Parse {
        path: "<serialize>".to_string(),
        message: e.to_string(),
    })?;
    String::from_utf8(out).map_err(|e| Error::Parse {
        path: "<serialize>".to_string(),
        message: e.to_string(),
    })
}

pub fn from_json_str<'a, D: Deserialize<'a>>(text: &'a str, path: &str) -> Result<D> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        path: path.to_string(),
        message: e.to_string(),
    })
}

// ---------------------------------------------------------------------------
// field ingestion
// ---------------------------------------------------------------------------

/// `{"p": [{"i":..,"j":..,"c":[re,im]}, ...], "q": [...]}` — the ingestion
/// format for polynomial vector fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldJson {
    pub p: Vec<MonomialJson>,
    pub q: Vec<MonomialJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonomialJson {
    pub i: u32,
    pub j: u32,
    pub c: [f64; 2],
}

impl FieldJson {
    pub fn to_field(&self) -> Result<PolynomialVectorField<f64>> {
        let conv = |terms: &[MonomialJson]| -> Result<Vec<Monomial<f64>>> {
            terms
                .iter()
                .map(|m| {
                    if !m.c[0].is_finite() || !m.c[1].is_finite() {
                        return Err(Error::invalid("coefficients must be finite"));
                    }
                    Ok(Monomial::new(m.i, m.j, Complex::new(m.c[0], m.c[1])))
                })
                .collect()
        };
        PolynomialVectorField::new(conv(&self.p)?, conv(&self.q)?)
    }

    pub fn from_field(field: &PolynomialVectorField<f64>) -> Self {
        let conv = |terms: &[Monomial<f64>]| {
            terms
                .iter()
                .map(|m| MonomialJson {
                    i: m.z_pow,
                    j: m.w_pow,
                    c: [m.coeff.re, m.coeff.im],
                })
                .collect()
        };
        FieldJson {
            p: conv(field.p_monomials()),
            q: conv(field.q_monomials()),
        }
    }
}

// ---------------------------------------------------------------------------
// base paths
// ---------------------------------------------------------------------------

/// Base paths serialize either as `{"kind": "circle", "turns": k}` or as an
/// array of `[t, [re, im]]` control points interpreted piecewise-linearly.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PathJson {
    Circle { kind: String, turns: i32 },
    Points(Vec<(f64, [f64; 2])>),
}

impl PathJson {
    pub fn to_base_path(&self) -> Result<BasePath<f64>> {
        match self {
            PathJson::Circle { kind, turns } => {
                if kind != "circle" {
                    return Err(Error::invalid(format!("unknown path kind '{kind}'")));
                }
                Ok(BasePath::circle(*turns))
            }
            PathJson::Points(points) => {
                BasePath::polyline(points.iter().map(|(t, c)| (*t, cplx(c[0], c[1]))).collect())
            }
        }
    }
}

// ---------------------------------------------------------------------------
// cycle families
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelJson {
    pub lambda: [f64; 2],
    pub nu: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CycleJson {
    pub n: u32,
    pub p: [f64; 2],
    pub mu: [f64; 2],
    pub log_mu_abs: f64,
    pub residual: f64,
    pub curve: Vec<[f64; 4]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClauseJson {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DisjointCertJson {
    pub clauses: Vec<ClauseJson>,
    pub verdict: String,
    pub section_log_margin: f64,
}

/// The full cycles report: model data, the certified section radius, the
/// chart-to-ambient scale, the cycles, and the disjointness certificate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CyclesJson {
    pub model: ModelJson,
    pub section_radius: f64,
    pub chart_scale: [f64; 2],
    pub cycles: Vec<CycleJson>,
    pub certificate: DisjointCertJson,
}

impl CyclesJson {
    pub fn from_family(
        family: &CycleFamily<f64>,
        certificate: &DisjointnessCertificate<f64>,
    ) -> Self {
        CyclesJson {
            model: ModelJson {
                lambda: [family.model.lambda().re, family.model.lambda().im],
                nu: [family.model.nu().re, family.model.nu().im],
            },
            section_radius: family.section_radius,
            chart_scale: [family.chart_scale.0, family.chart_scale.1],
            cycles: family.cycles.iter().map(cycle_to_json).collect(),
            certificate: DisjointCertJson {
                clauses: certificate
                    .clauses
                    .iter()
                    .map(|c| ClauseJson {
                        name: c.name.to_string(),
                        passed: c.passed,
                        detail: c.detail.clone(),
                    })
                    .collect(),
                verdict: verdict_str(certificate.verdict).to_string(),
                section_log_margin: certificate.section_log_margin,
            },
        }
    }
}

fn cycle_to_json(c: &LimitCycle<f64>) -> CycleJson {
    CycleJson {
        n: c.index,
        p: [c.fixed_point.re, c.fixed_point.im],
        mu: [c.multiplier.re, c.multiplier.im],
        log_mu_abs: c.log_multiplier_abs,
        residual: c.residual,
        curve: c
            .representative
            .iter()
            .map(|(z, w)| [z.re, z.im, w.re, w.im])
            .collect(),
    }
}

fn verdict_str(pass: bool) -> &'static str {
    if pass {
        "certified"
    } else {
        "not-certified"
    }
}

// ---------------------------------------------------------------------------
// independence certificates
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertEntryJson {
    pub j: usize,
    pub value: f64,
    pub threshold: f64,
    pub log_margin: f64,
}

/// `certificate.json`: the applied criterion, per-entry log quantities with
/// margins, the verdict, and caveats.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateJson {
    pub method: String,
    pub entries: Vec<CertEntryJson>,
    pub verdict: String,
    pub caveats: Vec<String>,
}

impl CertificateJson {
    pub fn from_certificate(cert: &IndependenceCertificate<f64>) -> Self {
        CertificateJson {
            method: match cert.method {
                CriterionMethod::Multiplier => "multiplier".to_string(),
                CriterionMethod::Integral => "integral".to_string(),
            },
            entries: cert
                .entries
                .iter()
                .map(|e| CertEntryJson {
                    j: e.index,
                    value: e.log_value,
                    threshold: e.log_threshold,
                    log_margin: e.log_margin,
                })
                .collect(),
            verdict: verdict_str(cert.certified).to_string(),
            caveats: cert.caveats.clone(),
        }
    }
}

// ---------------------------------------------------------------------------
// analysis report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AffineSingularityJson {
    pub point: [[f64; 2]; 2],
    pub jacobian: [[[f64; 2]; 2]; 2],
    pub eigenvalues: [[f64; 2]; 2],
    pub lambda: Option<[f64; 2]>,
    pub complex_hyperbolic: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InfinitySingularityJson {
    pub direction: [[f64; 2]; 2],
    pub lambda_j: Option<[f64; 2]>,
    pub multiplicity: u32,
    pub hyperbolic: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TangencyJson {
    pub line: LineJson,
    pub count: u32,
    pub points: Vec<[[f64; 2]; 2]>,
    pub implied_class_degree: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LineJson {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

/// `analyze.json`: affine singular points, infinity singular points with
/// characteristic numbers, and tangency counts per supplied line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalyzeJson {
    pub degree: u32,
    pub affine_singularities: Vec<AffineSingularityJson>,
    pub infinity_singularities: Vec<InfinitySingularityJson>,
    pub tangencies: Vec<TangencyJson>,
}

// ---------------------------------------------------------------------------
// holonomy report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HolonomyJson {
    pub endpoint: [f64; 2],
    pub derivative: [f64; 2],
    pub estimated_error: f64,
    pub trace: Vec<[f64; 5]>,
}

// ---------------------------------------------------------------------------
// CSV export
// ---------------------------------------------------------------------------

/// CSV rows `(t, Re z, Im z, Re w, Im w)` for plotting sampled curves
/// (spirals, lift traces, representatives).
pub fn sampled_curve_csv(
    rows: &[(f64, num_complex::Complex<f64>, num_complex::Complex<f64>)],
) -> String {
    let mut out = String::from("t,re_z,im_z,re_w,im_w\n");
    for (t, z, w) in rows {
        out.push_str(&format!(
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
            t, z.re, z.im, w.re, w.im
        ));
    }
    out
}
