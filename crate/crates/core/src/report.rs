//! The end-to-end pipeline and its JSON report.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{algebraic_profile, char_poly, is_irreducible, IntMatrix, IntPolynomial, UnitCircle};
use crate::complex::{
    build_ap_complex, essential_image_rank, homology_with_action, relative_cohomology_action, tiling_space_h1, ApComplex,
    EdgeMap, HomologyAction,
};
use crate::error::{Error, Result};
use crate::realization::{
    first_period_with_seeds, iota_and_translation_check, periodic_fibers, FiberReport, IotaReport, Kernel, Realizer,
    TilingPoint,
};
use crate::return_lattice::{foreign_factors, pisot_subgroup, ReturnLattice};
use crate::spectral::{classify_expansion, DegreeReport, ExpansionFlags, ExpansionSpec};
use crate::substitution::{PerronData, Substitution};

#[derive(Clone, Debug)]
pub struct Options {
    pub collared: bool,
    pub depth: usize,
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
    /// Run the sampled realization checks as part of `analyze`.
    pub realize: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { collared: true, depth: 50, tol: 1e-9, samples: 100, seed: 0, realize: true }
    }
}

/// Everything built from a substitution before realization.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub substitution: Substitution,
    pub perron: PerronData,
    pub complex: ApComplex,
    pub edge_map: EdgeMap,
    pub homology: HomologyAction,
    pub lattice: ReturnLattice,
    pub tol: f64,
}

impl Pipeline {
    pub fn new(s: &Substitution, collared: bool, tol: f64) -> Result<Self> {
        s.require_primitive()?;
        let perron = s.perron_data()?;
        let (complex, edge_map) = build_ap_complex(s, &perron, collared)?;
        let homology = homology_with_action(&complex, &edge_map)?;
        let lattice = crate::return_lattice::return_lattice(&complex, &homology, &perron, tol)?;
        Ok(Pipeline { substitution: s.clone(), perron, complex, edge_map, homology, lattice, tol })
    }

    pub fn realizer(&self, which: Kernel) -> Result<Realizer> {
        Realizer::new(&self.complex, &self.edge_map, &self.homology, &self.lattice, &self.perron, which, self.tol)
    }

    pub fn expansion(&self) -> Result<DegreeReport> {
        classify_expansion(&ExpansionSpec::scalar(self.perron.lambda.clone()), self.tol)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Satisfied,
    NotSatisfied,
    Uncertified,
    NotApplicable,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Satisfied => "satisfied",
            Status::NotSatisfied => "not satisfied",
            Status::Uncertified => "uncertified",
            Status::NotApplicable => "not applicable",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjectureRow {
    pub name: &'static str,
    pub hypothesis_status: Status,
    pub witnesses: BTreeMap<&'static str, Value>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Ranks {
    #[serde(rename = "H1_collared")]
    pub h1_complex: usize,
    #[serde(rename = "H1_tiling_space")]
    pub h1_tiling_space: usize,
    #[serde(rename = "D_lambda")]
    pub d_lambda: usize,
    #[serde(rename = "D_GR")]
    pub d_gr: usize,
    #[serde(rename = "D_prime")]
    pub d_prime: Option<usize>,
    #[serde(rename = "H1_f")]
    pub h1_f: usize,
    pub pisot_subgroup_rank: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Flags {
    pub primitive: bool,
    pub collared: bool,
    pub incidence_unimodular: bool,
    pub incidence_irreducible: bool,
    pub pisot: bool,
    #[serde(flatten)]
    pub expansion: ExpansionFlags,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexSummary {
    pub vertices: usize,
    pub edges: usize,
    pub models_tiling_space: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleRow {
    pub id: usize,
    pub coords: Vec<f64>,
    pub residual: f64,
}

/// Sampled evaluation of `G` with its semi-conjugacy residuals.
#[derive(Clone, Debug, Serialize)]
pub struct SampleRun {
    pub kernel: Kernel,
    pub dimension: usize,
    pub depth: usize,
    pub seed: u64,
    pub error_bound: f64,
    pub digit_bound: f64,
    pub residual_max: f64,
    pub rows: Vec<SampleRow>,
}

impl SampleRun {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id");
        for i in 0..self.dimension {
            out.push_str(&format!(",g{i}"));
        }
        out.push_str(",residual\n");
        for r in &self.rows {
            out.push_str(&r.id.to_string());
            for c in &r.coords {
                out.push_str(&format!(",{c:.17e}"));
            }
            out.push_str(&format!(",{:.6e}\n", r.residual));
        }
        out
    }
}

pub fn sample_realization(r: &Realizer, samples: usize, depth: usize, seed: u64) -> Result<SampleRun> {
    let mut rng = crate::realization::sampler(seed);
    let mut rows = Vec::with_capacity(samples);
    let mut worst: f64 = 0.0;
    for id in 0..samples {
        let p = TilingPoint::sample(r, depth + 8, &mut rng);
        let g = r.realize(&p, depth)?;
        let residual = r.semiconjugacy_residual(&p, depth)?;
        worst = worst.max(residual);
        rows.push(SampleRow { id, coords: g.point.coords, residual });
    }
    Ok(SampleRun {
        kernel: r.which,
        dimension: r.dim(),
        depth,
        seed,
        error_bound: r.error_bound(depth),
        digit_bound: r.b_digits,
        residual_max: worst,
        rows,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Realization {
    pub kernel: Kernel,
    pub dimension: usize,
    pub depth: usize,
    pub samples: usize,
    pub error_bound: f64,
    pub residual_max: f64,
    pub within_bound: bool,
    pub translation: Option<IotaReport>,
    pub fiber_groups: Option<FiberReport>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub substitution: String,
    pub letters: Vec<String>,
    pub incidence: Vec<Vec<i64>>,
    pub lambda: f64,
    pub lambda_minpoly: Vec<i64>,
    pub lambda_conjugate_moduli: Vec<f64>,
    pub flags: Flags,
    pub complex: ComplexSummary,
    pub ranks: Ranks,
    #[serde(rename = "charpoly_A")]
    pub charpoly_a: Vec<i64>,
    #[serde(rename = "charpoly_Aprime")]
    pub charpoly_aprime: Option<Vec<i64>>,
    pub foreign_factors: Vec<String>,
    pub conjectures: Vec<ConjectureRow>,
    pub realization: Option<Realization>,
    pub expansion: Option<DegreeReport>,
    pub warnings: Vec<String>,
}

fn small(x: &BigInt) -> Result<i64> {
    x.to_i64().ok_or_else(|| Error::Internal(format!("{x} does not fit in 64 bits")))
}

fn poly_json(p: &IntPolynomial) -> Result<Vec<i64>> {
    p.coeffs().iter().map(small).collect()
}

fn matrix_json(m: &IntMatrix) -> Result<Vec<Vec<i64>>> {
    m.to_rows().iter().map(|r| r.iter().map(small).collect()).collect()
}

struct Facts<'a> {
    unimodular: bool,
    incidence_det: BigInt,
    incidence_irreducible: bool,
    pisot: bool,
    pisot_certified: bool,
    expansion: &'a ExpansionFlags,
    ranks: &'a Ranks,
}

fn status(ok: bool, certified: bool) -> Status {
    match (ok, certified) {
        (true, true) => Status::Satisfied,
        (true, false) => Status::Uncertified,
        (false, _) => Status::NotSatisfied,
    }
}

/// Hypothesis status of each conjecture; no conclusions are drawn.
fn conjecture_table(f: &Facts) -> Vec<ConjectureRow> {
    let r = f.ranks;
    let e = f.expansion;
    let mut rows = vec![
        ConjectureRow {
            name: "Pisotconj",
            hypothesis_status: status(f.unimodular && f.incidence_irreducible && f.pisot, f.pisot_certified),
            witnesses: BTreeMap::from([
                ("incidence_det", json!(f.incidence_det.to_string())),
                ("incidence_irreducible", json!(f.incidence_irreducible)),
                ("lambda_pisot", json!(f.pisot)),
            ]),
        },
        ConjectureRow {
            name: "homologicalPisot1",
            hypothesis_status: status(
                e.unimodular && e.pisot_family && r.h1_tiling_space == r.d_lambda,
                e.certified,
            ),
            witnesses: BTreeMap::from([
                ("rank_H1_tiling_space", json!(r.h1_tiling_space)),
                ("D_lambda", json!(r.d_lambda)),
                ("pisot_family", json!(e.pisot_family)),
            ]),
        },
        ConjectureRow {
            name: "hypconjecture",
            hypothesis_status: status(
                e.hyperbolic && r.d_prime == Some(r.h1_tiling_space),
                e.certified,
            ),
            witnesses: BTreeMap::from([
                ("rank_H1_tiling_space", json!(r.h1_tiling_space)),
                ("D_prime", json!(r.d_prime)),
                ("hyperbolic", json!(e.hyperbolic)),
            ]),
        },
        ConjectureRow {
            name: "homologicalPisot2",
            hypothesis_status: status(e.unimodular && e.pisot_family && r.h1_f == r.d_lambda, e.certified),
            witnesses: BTreeMap::from([
                ("rank_H1_f", json!(r.h1_f)),
                ("D_lambda", json!(r.d_lambda)),
                ("proxy", json!("H1_f stands in for H1_ess")),
            ]),
        },
    ];
    if !f.unimodular || !e.unimodular {
        for row in &mut rows {
            row.hypothesis_status = Status::NotApplicable;
            row.witnesses.insert("unimodular", json!(false));
        }
    }
    rows
}

/// Runs the full pipeline on `s`.
pub fn analyze(s: &Substitution, opts: &Options) -> Result<AnalysisReport> {
    let mut warnings = Vec::new();
    let incidence = s.incidence_matrix();
    let primitive = s.is_primitive();
    let pipe = Pipeline::new(s, opts.collared, opts.tol)?;
    let minpoly = pipe.perron.field().minpoly().clone();
    let profile = algebraic_profile(&minpoly, opts.tol)?;
    let degree = pipe.expansion()?;
    let exp_flags = degree.flags.clone().ok_or_else(|| Error::Internal("classification without flags".into()))?;

    let h1 = tiling_space_h1(&pipe.complex, &pipe.homology)?;
    if !h1.models_tiling_space {
        warnings.push("uncollared complex: H1 is that of the inverse limit, which may differ from the tiling space".into());
    }
    let rel = relative_cohomology_action(&pipe.complex, &pipe.edge_map)?;
    let pisot_rank = match pisot_subgroup(&rel, &minpoly) {
        Ok(p) => Some(p.len()),
        Err(e) => {
            warnings.push(format!("pisot subgroup: {e}"));
            None
        }
    };
    let lat = &pipe.lattice;
    if let Err(e) = &lat.hyp {
        warnings.push(format!("hyperbolic refinement: {e}"));
    }
    if let Ok(h) = &lat.hyp {
        warnings.extend(h.warnings.iter().cloned());
    }
    let ranks = Ranks {
        h1_complex: pipe.homology.rank(),
        h1_tiling_space: h1.rank,
        d_lambda: degree.d_lambda,
        d_gr: lat.d_gr(),
        d_prime: lat.d_prime(),
        h1_f: essential_image_rank(s)?,
        pisot_subgroup_rank: pisot_rank,
    };

    let incidence_det = incidence.det()?;
    let incidence_irreducible = is_irreducible(&char_poly(&incidence)?)?;
    let facts = Facts {
        unimodular: incidence_det.abs() == BigInt::from(1),
        incidence_det: incidence_det.clone(),
        incidence_irreducible,
        pisot: profile.is_pisot,
        pisot_certified: profile.unit_circle != UnitCircle::Uncertified,
        expansion: &exp_flags,
        ranks: &ranks,
    };
    let conjectures = conjecture_table(&facts);

    let charpoly_a = poly_json(&char_poly(lat.a())?)?;
    let charpoly_aprime = match &lat.hyp {
        Ok(h) => Some(poly_json(&char_poly(&h.hyp.presentation.endo)?)?),
        Err(_) => None,
    };
    let foreign = foreign_factors(lat.a(), &minpoly)?.iter().map(ToString::to_string).collect();

    let realization = if opts.realize { realization_diagnostics(&pipe, &exp_flags, degree.d_lambda, opts, &mut warnings)? } else { None };

    Ok(AnalysisReport {
        substitution: s.to_string(),
        letters: s.letters().to_vec(),
        incidence: matrix_json(&incidence)?,
        lambda: pipe.perron.lambda.to_f64(),
        lambda_minpoly: poly_json(&minpoly)?,
        lambda_conjugate_moduli: profile.root_moduli.clone(),
        flags: Flags {
            primitive,
            collared: opts.collared,
            incidence_unimodular: facts.unimodular,
            incidence_irreducible,
            pisot: profile.is_pisot,
            expansion: exp_flags,
        },
        complex: ComplexSummary {
            vertices: pipe.complex.vertices,
            edges: pipe.complex.edges.len(),
            models_tiling_space: h1.models_tiling_space,
        },
        ranks,
        charpoly_a,
        charpoly_aprime,
        foreign_factors: foreign,
        conjectures,
        realization,
        expansion: None,
        warnings,
    })
}

fn realization_diagnostics(
    pipe: &Pipeline,
    flags: &ExpansionFlags,
    d_lambda: usize,
    opts: &Options,
    warnings: &mut Vec<String>,
) -> Result<Option<Realization>> {
    let r = match pipe.realizer(Kernel::Lambda) {
        Ok(r) => r,
        Err(e @ (Error::NotUnimodular(_) | Error::NotHyperbolic(_) | Error::HypothesisNotMet(_))) => {
            warnings.push(format!("realization skipped: {e}"));
            return Ok(None);
        }
        Err(e) => return Err(e),
    };
    let run = sample_realization(&r, opts.samples, opts.depth, opts.seed)?;
    let bound = run.error_bound;
    let mut notes = Vec::new();
    let translation = match iota_and_translation_check(&r, &pipe.lattice, flags.pisot_family, d_lambda, opts.samples, opts.depth, opts.seed) {
        Ok(t) => Some(t),
        Err(Error::HypothesisNotMet(m)) => {
            notes.push(format!("translation check skipped: {m}"));
            None
        }
        Err(e) => return Err(e),
    };
    let fiber_groups = match first_period_with_seeds(&pipe.substitution, 6)? {
        Some(m) => Some(periodic_fibers(&r, &pipe.substitution, m, opts.depth)?),
        None => {
            notes.push("no periodic seeds with period at most 6".into());
            None
        }
    };
    notes.push("fiber groups over periodic points are diagnostics, not the almost-everywhere fiber size".into());
    Ok(Some(Realization {
        kernel: Kernel::Lambda,
        dimension: r.dim(),
        depth: opts.depth,
        samples: opts.samples,
        error_bound: bound,
        residual_max: run.residual_max,
        within_bound: run.residual_max <= 2.0 * bound,
        translation,
        fiber_groups,
        notes,
    }))
}

/// Classification of a standalone `[expansion]` section.
pub fn classify(e: &ExpansionSpec, tol: f64) -> Result<DegreeReport> {
    classify_expansion(e, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::example;

    fn quick() -> Options {
        Options { realize: false, ..Options::default() }
    }

    fn row<'a>(r: &'a AnalysisReport, name: &str) -> &'a ConjectureRow {
        r.conjectures.iter().find(|c| c.name == name).unwrap()
    }

    #[test]
    fn final_example_report() {
        let r = analyze(&example("final-example").unwrap().substitution(), &quick()).unwrap();
        assert_eq!(r.lambda_minpoly, vec![1, -7, 1]);
        assert_eq!(r.ranks.h1_tiling_space, 3);
        assert_eq!(r.ranks.h1_f, 2);
        assert_eq!(r.ranks.pisot_subgroup_rank, Some(2));
        assert_eq!(row(&r, "Pisotconj").hypothesis_status, Status::Satisfied);
        assert_eq!(row(&r, "homologicalPisot1").hypothesis_status, Status::NotSatisfied);
        assert_eq!(row(&r, "homologicalPisot2").hypothesis_status, Status::Satisfied);
    }

    #[test]
    fn fibonacci_hypotheses() {
        let r = analyze(&example("fibonacci").unwrap().substitution(), &quick()).unwrap();
        assert!(r.flags.incidence_unimodular && r.flags.incidence_irreducible && r.flags.pisot);
        assert!(r.conjectures.iter().all(|c| c.hypothesis_status == Status::Satisfied));
    }

    #[test]
    fn thue_morse_is_not_applicable() {
        let r = analyze(&example("thue-morse").unwrap().substitution(), &Options { samples: 2, ..Options::default() }).unwrap();
        assert!(!r.flags.expansion.unimodular);
        assert!(r.conjectures.iter().all(|c| c.hypothesis_status == Status::NotApplicable));
        assert!(r.realization.is_none());
    }

    #[test]
    fn json_keys_are_stable() {
        let r = analyze(&example("example-2-8").unwrap().substitution(), &quick()).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for k in ["substitution", "incidence", "lambda_minpoly", "flags", "ranks", "charpoly_A", "charpoly_Aprime", "conjectures"] {
            assert!(v.get(k).is_some(), "{k}");
        }
        assert_eq!(v["ranks"]["H1_tiling_space"], 7);
        assert_eq!(v["ranks"]["D_GR"], 2);
        assert_eq!(v["ranks"]["D_prime"], 2);
    }

    #[test]
    fn reports_are_deterministic() {
        let s = example("fibonacci").unwrap().substitution();
        let opts = Options { samples: 5, depth: 30, ..Options::default() };
        let a = serde_json::to_string(&analyze(&s, &opts).unwrap()).unwrap();
        let b = serde_json::to_string(&analyze(&s, &opts).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"residual_max\""));
    }

    #[test]
    fn csv_has_a_row_per_sample() {
        let p = Pipeline::new(&example("fibonacci").unwrap().substitution(), true, 1e-9).unwrap();
        let run = sample_realization(&p.realizer(Kernel::Lambda).unwrap(), 4, 30, 1).unwrap();
        let csv = run.to_csv();
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.starts_with("id,g0,g1,residual"));
    }
}
