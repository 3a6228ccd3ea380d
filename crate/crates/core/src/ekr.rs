//! The bound on intersecting families in GL_n(F_q) and its verification.
//!
//! An intersecting family has at most `q^(n(n-1)/2) prod_{i=1}^{n-1}(q^i-1)`
//! members. The bound is `|GL_n(F_q)| / (q^n - 1)`: the graph is
//! vertex-transitive, so a clique and a coclique multiply to at most the
//! group order, and spreads supply cocliques of size `q^n - 1`.
//!
//! [`verify_theorem`] runs in one of two modes. `Exhaustive` searches the
//! whole graph and proves both numbers for the given parameters.
//! `Certificate` only builds the witnesses (a vector stabilizer and a spread
//! coclique) and audits them against each other, which shows the bound is
//! attained and cannot be beaten by this argument, but makes no claim that
//! a search was done.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::certificate::{AuditCertificate, Check, ExhaustiveSection, ExtremalSurvey, GlCertificate, GlWitnesses, Verdict};
use crate::error::{Error, Result};
use crate::glgroup::{self, coset, enumerate_gl, stabilizer_in, Family, GroupParams, Side};
use crate::igraph::{self, clique_coclique_audit, is_clique, CosetShape, IGraph, Samples};
use crate::matfq::{MatF, VecF};
use crate::spread::{coclique_maximality_audit, spread_coclique};

/// The bound together with the quantities it is derived from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundClaim {
    pub n: usize,
    pub q: u64,
    pub bound: BigUint,
    pub group_order: BigUint,
    /// `q^n - 1`, the coclique number.
    pub coclique_bound: BigUint,
}

/// JSON form of a [`BoundClaim`]; big integers are decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub n: usize,
    pub q: u64,
    pub bound: String,
    pub group_order: String,
    pub alpha: String,
}

impl BoundClaim {
    pub fn record(&self) -> BoundRecord {
        BoundRecord {
            n: self.n,
            q: self.q,
            bound: self.bound.to_string(),
            group_order: self.group_order.to_string(),
            alpha: self.coclique_bound.to_string(),
        }
    }

    pub fn summary(&self) -> String {
        format!("bound={} |GL|={} alpha={}", self.bound, self.group_order, self.coclique_bound)
    }
}

/// `q^(n(n-1)/2) prod_{i=1}^{n-1} (q^i - 1)`, with the consistency identity
/// `bound * (q^n - 1) = |GL_n(F_q)|` asserted.
pub fn ekr_bound(n: usize, q: u64) -> BoundClaim {
    let bound = glgroup::stabilizer_order(n, q);
    let group_order = glgroup::gl_order(n, q);
    let coclique_bound = BigUint::from(q).pow(n as u32) - 1u32;
    assert_eq!(&bound * &coclique_bound, group_order, "bound * (q^n - 1) != |GL_n(F_q)|");
    BoundClaim { n, q, bound, group_order, coclique_bound }
}

/// The stabilizer of `v`, optionally right-translated by `translate`. Its
/// size is exactly the bound.
pub fn build_extremal(params: &GroupParams, v: &VecF, translate: Option<&MatF>) -> Result<Family> {
    let group = enumerate_gl(params)?;
    build_extremal_in(&group, v, translate)
}

pub fn build_extremal_in(group: &Family, v: &VecF, translate: Option<&MatF>) -> Result<Family> {
    let stab = stabilizer_in(group, v)?;
    match translate {
        Some(g) => coset(&stab, g, Side::Right),
        None => Ok(stab),
    }
}

/// The unique common element of a clique and a coclique whose sizes
/// multiply to the group order.
pub fn intersection_point(c: &Family, a: &Family) -> Result<MatF> {
    let report = clique_coclique_audit(c, a)?;
    if !report.clique_valid || !report.coclique_valid || !report.equality_case {
        return Err(Error::EqualityConditionViolated(report.intersection_size.unwrap_or(0)));
    }
    let common = c.intersection(a);
    match common.as_slice() {
        [point] => Ok(point.clone()),
        _ => Err(Error::EqualityConditionViolated(common.len())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Certificate,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Mode, String> {
        match s {
            "exhaustive" => Ok(Mode::Exhaustive),
            "certificate" => Ok(Mode::Certificate),
            other => Err(format!("unknown mode {other:?} (expected exhaustive or certificate)")),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Exhaustive => "exhaustive",
            Mode::Certificate => "certificate",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Largest group searched in exhaustive mode.
    pub search_cap: usize,
    /// Also enumerate every maximum clique and classify it (exhaustive mode).
    pub survey_extremal: bool,
    pub all_cliques_cap: usize,
    /// Random triples for the transitivity check when the group is too big
    /// for the full scan.
    pub transitivity_samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            search_cap: igraph::DEFAULT_SEARCH_CAP,
            survey_extremal: false,
            all_cliques_cap: igraph::DEFAULT_ALL_CLIQUES_CAP,
            transitivity_samples: 10_000,
            seed: 0,
        }
    }
}

/// Full triple scans for the transitivity check stay below this many vertices.
const FULL_TRANSITIVITY_LIMIT: usize = 64;

fn ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

fn to_u64(x: &BigUint) -> Result<u64> {
    x.to_u64().ok_or_else(|| Error::EnumerationTooLarge(format!("{x} exceeds 64 bits")))
}

pub fn verify_theorem(params: &GroupParams, mode: Mode, options: &VerifyOptions) -> Result<GlCertificate> {
    let (n, q) = (params.n(), params.q());
    let claim = ekr_bound(n, q);
    if mode == Mode::Exhaustive && claim.group_order > BigUint::from(options.search_cap) {
        return Err(Error::SearchTooLarge {
            vertices: claim.group_order.to_usize().unwrap_or(usize::MAX),
            cap: options.search_cap,
        });
    }
    let bound = to_u64(&claim.bound)?;
    let group_order = to_u64(&claim.group_order)?;
    let alpha_bound = to_u64(&claim.coclique_bound)?;
    let mut timings = BTreeMap::new();
    let mut checks = Vec::new();

    let start = Instant::now();
    let group = enumerate_gl(params)?;
    timings.insert("enumerate".to_string(), ms(start));

    let (clique, coclique, exhaustive, survey) = match mode {
        Mode::Exhaustive => {
            let graph = IGraph::new(params)?.with_search_cap(options.search_cap);
            let start = Instant::now();
            let clique = graph.max_clique(false)?;
            timings.insert("max_clique".to_string(), ms(start));
            let start = Instant::now();
            let anchored = graph.max_clique(true)?;
            timings.insert("max_clique_anchored".to_string(), ms(start));
            let start = Instant::now();
            let coclique = graph.max_coclique()?;
            timings.insert("max_coclique".to_string(), ms(start));
            let start = Instant::now();
            let samples = if group.len() <= FULL_TRANSITIVITY_LIMIT {
                Samples::All
            } else {
                Samples::Random { count: options.transitivity_samples, seed: options.seed }
            };
            let transitive = graph.transitivity_check(samples);
            timings.insert("transitivity".to_string(), ms(start));

            checks.push(Check::new("max_clique_equals_bound", clique.len() as u64 == bound));
            checks.push(Check::new("anchored_search_agrees", anchored.len() == clique.len()));
            checks.push(Check::new("max_coclique_equals_q^n-1", coclique.len() as u64 == alpha_bound));
            checks.push(Check::new("translation_invariance", transitive));

            let survey = if options.survey_extremal {
                let start = Instant::now();
                let all = graph.all_max_cliques(options.all_cliques_cap)?;
                timings.insert("all_max_cliques".to_string(), ms(start));
                Some(ExtremalSurvey::from_families(&all))
            } else {
                None
            };
            let section = ExhaustiveSection {
                max_clique_size: clique.len(),
                max_clique_anchored_size: anchored.len(),
                max_coclique_size: coclique.len(),
                transitivity_samples: match samples {
                    Samples::All => None,
                    Samples::Random { count, .. } => Some(count),
                },
                transitivity_holds: transitive,
            };
            (clique, coclique, Some(section), survey)
        }
        Mode::Certificate => {
            let start = Instant::now();
            let clique = build_extremal_in(&group, &VecF::unit(params.field(), n, 0), None)?;
            timings.insert("build_extremal".to_string(), ms(start));
            let start = Instant::now();
            let coclique = spread_coclique(params)?;
            timings.insert("spread_coclique".to_string(), ms(start));
            checks.push(Check::new("clique_size_equals_bound", clique.len() as u64 == bound));
            checks.push(Check::new("clique_is_intersecting", is_clique(&clique)));
            checks.push(Check::new("coclique_size_equals_q^n-1", coclique.len() as u64 == alpha_bound));
            (clique, coclique, None, None)
        }
    };

    let start = Instant::now();
    let audit = clique_coclique_audit(&clique, &coclique)?;
    let search_cap = (mode == Mode::Exhaustive).then_some(options.search_cap);
    let maximality = coclique_maximality_audit(&coclique, search_cap)?;
    timings.insert("audit".to_string(), ms(start));
    checks.push(Check::new("audit_valid", audit.valid()));
    checks.push(Check::new("product_equals_group_order", audit.equality_case));
    checks.push(Check::new("intersection_size_one", audit.intersection_size == Some(1)));
    checks.push(Check::new("coclique_packing", maximality.valid() && maximality.meets_bound));

    let verdict = Verdict::from_checks(&checks);
    Ok(GlCertificate {
        schema_version: crate::certificate::SCHEMA_VERSION,
        kind: crate::certificate::GL_KIND.to_string(),
        n,
        q,
        field: params.field().record(),
        mode,
        bound,
        group_order,
        alpha: coclique.len() as u64,
        witnesses: GlWitnesses { clique: clique.record(), coclique: coclique.record(), audit },
        maximality,
        exhaustive,
        extremal_survey: survey,
        checks,
        verdict,
        timings_ms: timings,
    })
}

/// Audits the translated stabilizer `Stab(v) g` against the spread
/// coclique translated by the same `g`. At equality they meet exactly in `g`.
pub fn audit_certificate(params: &GroupParams, v: &VecF, translate: Option<&MatF>) -> Result<AuditCertificate> {
    let mut timings = BTreeMap::new();
    let start = Instant::now();
    let clique = build_extremal(params, v, translate)?;
    let base = spread_coclique(params)?;
    let coclique = match translate {
        Some(g) => coset(&base, g, Side::Right)?,
        None => base,
    };
    timings.insert("build".to_string(), ms(start));
    let start = Instant::now();
    let audit = clique_coclique_audit(&clique, &coclique)?;
    timings.insert("audit".to_string(), ms(start));
    let point = intersection_point(&clique, &coclique).ok();
    let expected_point = translate.cloned().unwrap_or_else(|| params.identity());
    let bound = ekr_bound(params.n(), params.q());
    let checks = vec![
        Check::new("clique_size_equals_bound", BigUint::from(clique.len()) == bound.bound),
        Check::new("audit_valid", audit.valid()),
        Check::new("product_equals_group_order", audit.equality_case),
        Check::new("intersection_size_one", audit.intersection_size == Some(1)),
        Check::new("intersection_is_translate", point.as_ref() == Some(&expected_point)),
    ];
    let verdict = Verdict::from_checks(&checks);
    Ok(AuditCertificate {
        schema_version: crate::certificate::SCHEMA_VERSION,
        kind: crate::certificate::AUDIT_KIND.to_string(),
        n: params.n(),
        q: params.q(),
        field: params.field().record(),
        vector: v.values(),
        translate: translate.map(MatF::record),
        clique: clique.record(),
        coclique: coclique.record(),
        audit,
        intersection_point: point.as_ref().map(MatF::record),
        checks,
        verdict,
        timings_ms: timings,
    })
}

/// Classifies each family by [`igraph::coset_shape`].
pub fn classify_extremal(families: &[Family]) -> Vec<CosetShape> {
    families.iter().map(igraph::coset_shape).collect()
}
