//! JSON certificates for verification runs, and an independent re-check.
//!
//! Every certificate carries `schema_version`, a `kind` tag, a list of named
//! checks, a verdict and `timings_ms`. Timings are the only field allowed to
//! differ between two runs with the same inputs; [`Certificate::content_hash`]
//! hashes everything else.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ekr::{ekr_bound, Mode};
use crate::error::{Error, Result};
use crate::gfq::{Field, FieldRecord, DEFAULT_MAX_ORDER};
use crate::glgroup::{Family, FamilyRecord, GroupParams};
use crate::igraph::{clique_coclique_audit, coset_shape, is_clique, is_coclique, AuditReport, CosetShape};
use crate::matfq::{MatF, MatrixRecord, Subspace, VecF};
use crate::spread::{coclique_maximality_audit, verify_partition, MaximalityReport, PartitionReport, Spread, SpreadRecord, DEFAULT_SCAN_CAP};
use crate::symbase::{self, Perm};

pub const SCHEMA_VERSION: u32 = 1;
pub const GL_KIND: &str = "gl_ekr";
pub const SN_KIND: &str = "sn_ekr";
pub const SPREAD_KIND: &str = "spread";
pub const AUDIT_KIND: &str = "audit";

/// Largest `n` accepted when re-checking a decoded certificate.
pub const RECHECK_MAX_N: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_checks(checks: &[Check]) -> Verdict {
        if checks.iter().all(|c| c.passed) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

impl Check {
    pub fn new(name: &str, passed: bool) -> Check {
        Check { name: name.to_string(), passed }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlWitnesses {
    pub clique: FamilyRecord,
    pub coclique: FamilyRecord,
    pub audit: AuditReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustiveSection {
    pub max_clique_size: usize,
    pub max_clique_anchored_size: usize,
    pub max_coclique_size: usize,
    /// Random triples checked; `None` means every triple was checked.
    pub transitivity_samples: Option<usize>,
    pub transitivity_holds: bool,
}

/// Every maximum clique, sorted by key, with its shape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalSurvey {
    pub count: usize,
    pub row_vector_cosets: usize,
    pub column_vector_cosets: usize,
    pub other: usize,
    pub shapes: Vec<CosetShape>,
}

impl ExtremalSurvey {
    pub fn from_families(families: &[Family]) -> ExtremalSurvey {
        let shapes: Vec<CosetShape> = families.iter().map(coset_shape).collect();
        let count_of = |s: CosetShape| shapes.iter().filter(|&&x| x == s).count();
        ExtremalSurvey {
            count: shapes.len(),
            row_vector_cosets: count_of(CosetShape::RowVectorCoset),
            column_vector_cosets: count_of(CosetShape::ColumnVectorCoset),
            other: count_of(CosetShape::Other),
            shapes,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlCertificate {
    pub schema_version: u32,
    pub kind: String,
    pub n: usize,
    pub q: u64,
    pub field: FieldRecord,
    pub mode: Mode,
    pub bound: u64,
    pub group_order: u64,
    pub alpha: u64,
    pub witnesses: GlWitnesses,
    pub maximality: MaximalityReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exhaustive: Option<ExhaustiveSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extremal_survey: Option<ExtremalSurvey>,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
    pub timings_ms: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnWitnesses {
    /// Permutations as 1-indexed image lists.
    pub clique: Vec<Vec<usize>>,
    pub coclique: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnCertificate {
    pub schema_version: u32,
    pub kind: String,
    pub n: usize,
    pub bound: u64,
    pub group_order: u64,
    pub max_clique_size: usize,
    pub max_coclique_size: usize,
    pub extremal_checked: bool,
    pub max_clique_count: Option<usize>,
    /// Whether every maximum clique is a set `{f : f(x) = y}`.
    pub extremal_all_cosets: Option<bool>,
    pub witnesses: SnWitnesses,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
    pub timings_ms: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpreadCoclique {
    /// Content hash of the spread record the coclique was read from.
    pub source_spread_hash: String,
    pub normalizer: MatrixRecord,
    pub family: FamilyRecord,
    pub maximality: MaximalityReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpreadCertificate {
    pub schema_version: u32,
    pub kind: String,
    pub n: usize,
    pub l: usize,
    pub q: u64,
    pub spread: SpreadRecord,
    pub spread_hash: String,
    pub partition: PartitionReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coclique: Option<SpreadCoclique>,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
    pub timings_ms: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditCertificate {
    pub schema_version: u32,
    pub kind: String,
    pub n: usize,
    pub q: u64,
    pub field: FieldRecord,
    /// The fixed vector of the clique, before translation.
    pub vector: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translate: Option<MatrixRecord>,
    pub clique: FamilyRecord,
    pub coclique: FamilyRecord,
    pub audit: AuditReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intersection_point: Option<MatrixRecord>,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
    pub timings_ms: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Gl(GlCertificate),
    Sn(SnCertificate),
    Spread(SpreadCertificate),
    Audit(AuditCertificate),
}

#[derive(Deserialize)]
struct Header {
    schema_version: u32,
    kind: String,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidCertificate(msg.into())
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of a serializable value's compact JSON.
pub fn json_hash<T: Serialize>(value: &T) -> String {
    sha256_hex(serde_json::to_string(value).expect("serializable").as_bytes())
}

impl Certificate {
    /// Parses any certificate kind, rejecting unknown kinds and schema
    /// versions.
    pub fn from_json(text: &str) -> Result<Certificate> {
        let header: Header = serde_json::from_str(text).map_err(|e| bad(format!("malformed certificate: {e}")))?;
        if header.schema_version != SCHEMA_VERSION {
            return Err(bad(format!("unsupported schema_version {}", header.schema_version)));
        }
        fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
            serde_json::from_str(text).map_err(|e| bad(format!("malformed certificate: {e}")))
        }
        Ok(match header.kind.as_str() {
            GL_KIND => Certificate::Gl(parse(text)?),
            SN_KIND => Certificate::Sn(parse(text)?),
            SPREAD_KIND => Certificate::Spread(parse(text)?),
            AUDIT_KIND => Certificate::Audit(parse(text)?),
            other => return Err(bad(format!("unknown certificate kind {other:?}"))),
        })
    }

    pub fn kind(&self) -> &str {
        match self {
            Certificate::Gl(c) => &c.kind,
            Certificate::Sn(c) => &c.kind,
            Certificate::Spread(c) => &c.kind,
            Certificate::Audit(c) => &c.kind,
        }
    }

    pub fn verdict(&self) -> Verdict {
        match self {
            Certificate::Gl(c) => c.verdict,
            Certificate::Sn(c) => c.verdict,
            Certificate::Spread(c) => c.verdict,
            Certificate::Audit(c) => c.verdict,
        }
    }

    pub fn timings_ms(&self) -> &BTreeMap<String, u64> {
        match self {
            Certificate::Gl(c) => &c.timings_ms,
            Certificate::Sn(c) => &c.timings_ms,
            Certificate::Spread(c) => &c.timings_ms,
            Certificate::Audit(c) => &c.timings_ms,
        }
    }

    fn timings_mut(&mut self) -> &mut BTreeMap<String, u64> {
        match self {
            Certificate::Gl(c) => &mut c.timings_ms,
            Certificate::Sn(c) => &mut c.timings_ms,
            Certificate::Spread(c) => &mut c.timings_ms,
            Certificate::Audit(c) => &mut c.timings_ms,
        }
    }

    fn to_value_string(&self, pretty: bool) -> String {
        let out = match (self, pretty) {
            (Certificate::Gl(c), true) => serde_json::to_string_pretty(c),
            (Certificate::Gl(c), false) => serde_json::to_string(c),
            (Certificate::Sn(c), true) => serde_json::to_string_pretty(c),
            (Certificate::Sn(c), false) => serde_json::to_string(c),
            (Certificate::Spread(c), true) => serde_json::to_string_pretty(c),
            (Certificate::Spread(c), false) => serde_json::to_string(c),
            (Certificate::Audit(c), true) => serde_json::to_string_pretty(c),
            (Certificate::Audit(c), false) => serde_json::to_string(c),
        };
        out.expect("certificates always serialize")
    }

    pub fn to_json(&self) -> String {
        self.to_value_string(true)
    }

    /// The certificate with `timings_ms` emptied, as compact JSON.
    pub fn canonical_json(&self) -> String {
        let mut stripped = self.clone();
        stripped.timings_mut().clear();
        stripped.to_value_string(false)
    }

    /// SHA-256 of [`Certificate::canonical_json`], hex encoded.
    pub fn content_hash(&self) -> String {
        sha256_hex(self.canonical_json().as_bytes())
    }

    /// Re-derives every recorded quantity from the witnesses alone and
    /// fails on the first disagreement. Searches are not repeated, so
    /// exhaustive results are only checked for consistency with the
    /// witnesses.
    pub fn recheck(&self) -> Result<()> {
        match self {
            Certificate::Gl(c) => recheck_gl(c),
            Certificate::Sn(c) => recheck_sn(c),
            Certificate::Spread(c) => recheck_spread(c),
            Certificate::Audit(c) => recheck_audit(c),
        }
    }
}

impl From<GlCertificate> for Certificate {
    fn from(c: GlCertificate) -> Self {
        Certificate::Gl(c)
    }
}

impl From<SnCertificate> for Certificate {
    fn from(c: SnCertificate) -> Self {
        Certificate::Sn(c)
    }
}

impl From<SpreadCertificate> for Certificate {
    fn from(c: SpreadCertificate) -> Self {
        Certificate::Spread(c)
    }
}

impl From<AuditCertificate> for Certificate {
    fn from(c: AuditCertificate) -> Self {
        Certificate::Audit(c)
    }
}

fn ensure(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(bad(msg))
    }
}

fn check_params(n: usize, q: u64, field: &FieldRecord) -> Result<GroupParams> {
    ensure((1..=RECHECK_MAX_N).contains(&n), "n out of range")?;
    let f = Field::from_record(field, DEFAULT_MAX_ORDER)?;
    ensure(f.q() as u64 == q, "q does not match the field")?;
    GroupParams::new(n, &f)
}

fn family_in(record: &FamilyRecord, params: &GroupParams) -> Result<Family> {
    let family = Family::from_record(record, DEFAULT_MAX_ORDER)?;
    ensure(family.params() == params, "family parameters differ from the certificate")?;
    Ok(family)
}

fn check_verdict(checks: &[Check], verdict: Verdict) -> Result<()> {
    ensure(Verdict::from_checks(checks) == verdict, "verdict does not follow from the checks")
}

fn recheck_gl(c: &GlCertificate) -> Result<()> {
    ensure(c.kind == GL_KIND, "wrong kind")?;
    let params = check_params(c.n, c.q, &c.field)?;
    let claim = ekr_bound(c.n, c.q);
    ensure(claim.bound == c.bound.into(), "bound is wrong")?;
    ensure(claim.group_order == c.group_order.into(), "group order is wrong")?;
    let clique = family_in(&c.witnesses.clique, &params)?;
    let coclique = family_in(&c.witnesses.coclique, &params)?;
    ensure(c.alpha == coclique.len() as u64, "alpha differs from the coclique size")?;
    let audit = clique_coclique_audit(&clique, &coclique)?;
    ensure(audit == c.witnesses.audit, "audit report does not match the witnesses")?;
    ensure(is_coclique(&coclique), "coclique witness is not a coclique")?;
    let mut m = coclique_maximality_audit(&coclique, None)?;
    m.exhaustive_alpha = c.maximality.exhaustive_alpha;
    ensure(m == c.maximality, "maximality report does not match the coclique")?;
    if let Some(a) = c.maximality.exhaustive_alpha {
        ensure(a as u64 >= c.alpha, "exhaustive alpha below a verified coclique")?;
    }
    if let Some(ex) = &c.exhaustive {
        ensure(c.mode == Mode::Exhaustive, "exhaustive section in certificate mode")?;
        ensure(ex.max_clique_size == clique.len(), "clique witness size differs from the search")?;
        ensure(ex.max_coclique_size == coclique.len(), "coclique witness size differs from the search")?;
    }
    if let Some(s) = &c.extremal_survey {
        let tally = |k: CosetShape| s.shapes.iter().filter(|&&x| x == k).count();
        ensure(s.count == s.shapes.len(), "survey count mismatch")?;
        ensure(
            s.row_vector_cosets == tally(CosetShape::RowVectorCoset)
                && s.column_vector_cosets == tally(CosetShape::ColumnVectorCoset)
                && s.other == tally(CosetShape::Other),
            "survey tallies mismatch",
        )?;
    }
    let recomputed = [
        ("audit_valid", audit.valid()),
        ("product_equals_group_order", audit.equality_case),
        ("intersection_size_one", audit.intersection_size == Some(1)),
    ];
    for (name, value) in recomputed {
        if let Some(chk) = c.checks.iter().find(|k| k.name == name) {
            ensure(chk.passed == value, &format!("check {name} disagrees with the witnesses"))?;
        }
    }
    if c.mode == Mode::Certificate {
        ensure(
            c.checks.iter().find(|k| k.name == "clique_is_intersecting").is_none_or(|k| k.passed == is_clique(&clique)),
            "check clique_is_intersecting disagrees with the witnesses",
        )?;
    }
    check_verdict(&c.checks, c.verdict)
}

fn perms_from(lists: &[Vec<usize>], n: usize) -> Result<Vec<Perm>> {
    lists.iter().map(|l| Perm::from_one_based(l).and_then(|p| {
        ensure(p.degree() == n, "permutation of the wrong degree")?;
        Ok(p)
    })).collect()
}

fn recheck_sn(c: &SnCertificate) -> Result<()> {
    ensure(c.kind == SN_KIND, "wrong kind")?;
    ensure((1..=symbase::MAX_DEGREE).contains(&c.n), "n out of range")?;
    let bound = symbase::deza_frankl_bound(c.n);
    ensure(bound == c.bound.into(), "bound is wrong")?;
    ensure(symbase::factorial(c.n) == c.group_order.into(), "group order is wrong")?;
    let clique = perms_from(&c.witnesses.clique, c.n)?;
    let coclique = perms_from(&c.witnesses.coclique, c.n)?;
    ensure(clique.len() == c.max_clique_size, "clique witness size mismatch")?;
    ensure(coclique.len() == c.max_coclique_size, "coclique witness size mismatch")?;
    ensure(symbase::is_intersecting_family(&clique), "clique witness is not intersecting")?;
    ensure(symbase::is_non_intersecting_family(&coclique), "coclique witness has an agreeing pair")?;
    ensure(c.extremal_checked == c.extremal_all_cosets.is_some(), "extremal fields inconsistent")?;
    check_verdict(&c.checks, c.verdict)
}

fn recheck_spread(c: &SpreadCertificate) -> Result<()> {
    ensure(c.kind == SPREAD_KIND, "wrong kind")?;
    let r = &c.spread;
    ensure(r.n == c.n && r.l == c.l, "spread record parameters differ")?;
    ensure((1..=RECHECK_MAX_N).contains(&c.n) && c.l <= 2 * RECHECK_MAX_N, "dimensions out of range")?;
    let field = Field::from_record(&r.field, DEFAULT_MAX_ORDER)?;
    ensure(field.q() as u64 == c.q, "q does not match the field")?;
    ensure(json_hash(r) == c.spread_hash, "spread hash mismatch")?;
    let members = r
        .members
        .iter()
        .map(|m| {
            ensure(m.cols == c.l, "member has the wrong ambient dimension")?;
            Ok(Subspace::from_rows(&MatF::from_record(&field, m)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let spread = Spread::from_members(&field, c.n, c.l, members)?;
    let partition = verify_partition(&spread, DEFAULT_SCAN_CAP);
    ensure(partition == c.partition, "partition report does not match the members")?;
    if let Some(co) = &c.coclique {
        ensure(co.source_spread_hash == c.spread_hash, "coclique names a different spread")?;
        ensure(c.l == 2 * c.n, "coclique needs l = 2n")?;
        let params = GroupParams::new(c.n, &field)?;
        let family = family_in(&co.family, &params)?;
        let (normalized, g) = crate::spread::normalize_spread(&spread, 0, spread.len().saturating_sub(1))?;
        ensure(g.record() == co.normalizer, "normalizer mismatch")?;
        let expected = crate::spread::extract_coclique(&normalized)?;
        ensure(expected == family, "coclique does not come from the normalized spread")?;
        let m = coclique_maximality_audit(&family, None)?;
        ensure(m.packing == co.maximality.packing && m.size == co.maximality.size, "maximality report mismatch")?;
    }
    check_verdict(&c.checks, c.verdict)
}

fn recheck_audit(c: &AuditCertificate) -> Result<()> {
    ensure(c.kind == AUDIT_KIND, "wrong kind")?;
    let params = check_params(c.n, c.q, &c.field)?;
    let v = VecF::from_values(params.field(), &c.vector)?;
    ensure(v.len() == c.n, "vector has the wrong length")?;
    let clique = family_in(&c.clique, &params)?;
    let coclique = family_in(&c.coclique, &params)?;
    let translate = c.translate.as_ref().map(|t| MatF::from_record(params.field(), t)).transpose()?;
    if let Some(t) = &translate {
        params.check_member(t)?;
    }
    let fixes = |m: &MatF| -> Result<bool> {
        let target = match &translate {
            Some(t) => v.mul_mat(t)?,
            None => v.clone(),
        };
        Ok(v.mul_mat(m)? == target)
    };
    for m in clique.members() {
        ensure(fixes(m)?, "clique member does not map the vector correctly")?;
    }
    let audit = clique_coclique_audit(&clique, &coclique)?;
    ensure(audit == c.audit, "audit report does not match the witnesses")?;
    let common = clique.intersection(&coclique);
    let point = match common.as_slice() {
        [p] if audit.equality_case => Some(p.record()),
        _ => None,
    };
    ensure(point == c.intersection_point, "intersection point mismatch")?;
    check_verdict(&c.checks, c.verdict)
}
