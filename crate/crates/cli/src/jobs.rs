//! Job descriptions, validation against caps, execution and the
//! certificate cache.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ekrgl::certificate::{Certificate, Verdict};
use ekrgl::ekr::{self, Mode, VerifyOptions};
use ekrgl::glgroup::gl_order;
use ekrgl::spread::{spread_certificate, spread_size};
use ekrgl::symbase::{factorial, verify_sn_with_caps};
use ekrgl::{Field, GroupParams, MatF, VecF};

/// Spreads with more members than this are refused.
pub const MAX_SPREAD_MEMBERS: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Caps {
    pub max_vertices: usize,
    pub max_q: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_vertices: ekrgl::igraph::DEFAULT_SEARCH_CAP, max_q: ekrgl::gfq::DEFAULT_MAX_ORDER }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JobSpec {
    Gl { n: usize, q: u64, mode: Mode, extremal: bool },
    Sn { n: usize, extremal: bool },
    Spread { n: usize, l: usize, q: u64, coclique: bool },
    Audit { n: usize, q: u64, vector: Option<Vec<u32>>, translate: Option<Vec<u32>> },
}

fn join(values: &[u32]) -> String {
    values.iter().map(u32::to_string).collect::<Vec<_>>().join("-")
}

impl JobSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            JobSpec::Gl { .. } => ekrgl::certificate::GL_KIND,
            JobSpec::Sn { .. } => ekrgl::certificate::SN_KIND,
            JobSpec::Spread { .. } => ekrgl::certificate::SPREAD_KIND,
            JobSpec::Audit { .. } => ekrgl::certificate::AUDIT_KIND,
        }
    }

    /// `{kind}_{params}`, the stem of the certificate file name.
    pub fn label(&self) -> String {
        let params = match self {
            JobSpec::Gl { n, q, mode, extremal } => {
                format!("n{n}_q{q}_{mode}{}", if *extremal { "_extremal" } else { "" })
            }
            JobSpec::Sn { n, extremal } => format!("n{n}{}", if *extremal { "_extremal" } else { "" }),
            JobSpec::Spread { n, l, q, coclique } => {
                format!("n{n}_l{l}_q{q}{}", if *coclique { "_coclique" } else { "" })
            }
            JobSpec::Audit { n, q, vector, translate } => {
                let mut s = format!("n{n}_q{q}");
                if let Some(v) = vector {
                    s += &format!("_v{}", join(v));
                }
                if let Some(t) = translate {
                    s += &format!("_g{}", join(t));
                }
                s
            }
        };
        format!("{}_{params}", self.kind())
    }

    /// Checks preconditions and caps without running anything.
    pub fn validate(&self, caps: &Caps) -> Result<(), String> {
        let field = |q: u64| Field::from_order_with_cap(q, caps.max_q).map_err(|e| e.to_string());
        let positive = |n: usize| if n == 0 { Err("n must be at least 1".to_string()) } else { Ok(()) };
        match self {
            JobSpec::Gl { n, q, mode, extremal } => {
                positive(*n)?;
                field(*q)?;
                let order = gl_order(*n, *q);
                if *mode == Mode::Exhaustive && order > caps.max_vertices.into() {
                    return Err(format!("|GL_{n}(F_{q})| = {order} exceeds max_vertices = {}", caps.max_vertices));
                }
                if *extremal && *mode != Mode::Exhaustive {
                    return Err("extremal survey needs mode=exhaustive".into());
                }
                if *extremal && order > ekrgl::igraph::DEFAULT_ALL_CLIQUES_CAP.into() {
                    return Err(format!(
                        "extremal survey is limited to {} vertices, |GL_{n}(F_{q})| = {order}",
                        ekrgl::igraph::DEFAULT_ALL_CLIQUES_CAP
                    ));
                }
                if *mode == Mode::Certificate && order > ekrgl::glgroup::DEFAULT_ENUMERATION_CAP.into() {
                    return Err(format!("|GL_{n}(F_{q})| = {order} is too large to enumerate"));
                }
                Ok(())
            }
            JobSpec::Sn { n, extremal } => {
                positive(*n)?;
                let order = factorial(*n);
                if order > caps.max_vertices.into() {
                    return Err(format!("{n}! = {order} exceeds max_vertices = {}", caps.max_vertices));
                }
                if *extremal && order > ekrgl::igraph::DEFAULT_ALL_CLIQUES_CAP.into() {
                    return Err(format!(
                        "extremal check is limited to {} vertices, {n}! = {order}",
                        ekrgl::igraph::DEFAULT_ALL_CLIQUES_CAP
                    ));
                }
                Ok(())
            }
            JobSpec::Spread { n, l, q, coclique } => {
                if *n == 0 || *l == 0 || l % n != 0 {
                    return Err(format!("n must divide l (n = {n}, l = {l})"));
                }
                if *coclique && *l != 2 * n {
                    return Err(format!("emitting a coclique needs l = 2n (n = {n}, l = {l})"));
                }
                field(*q)?;
                match spread_size(*n, *l, *q) {
                    Some(s) if s <= MAX_SPREAD_MEMBERS.into() => {}
                    _ => return Err(format!("spread would exceed {MAX_SPREAD_MEMBERS} members")),
                }
                let ext_order = (*q as u128).checked_pow(*n as u32);
                if ext_order.is_none_or(|o| o > 1 << 24) {
                    return Err(format!("GF({q}^{n}) is too large"));
                }
                Ok(())
            }
            JobSpec::Audit { n, q, .. } => {
                positive(*n)?;
                let f = field(*q)?;
                if gl_order(*n, *q) > ekrgl::glgroup::DEFAULT_ENUMERATION_CAP.into() {
                    return Err(format!("|GL_{n}(F_{q})| is too large to enumerate"));
                }
                self.audit_inputs(&f).map(|_| ())
            }
        }
    }

    fn audit_inputs(&self, field: &Field) -> Result<(VecF, Option<MatF>), String> {
        let JobSpec::Audit { n, vector, translate, .. } = self else {
            unreachable!("audit inputs requested for another job kind")
        };
        let v = match vector {
            Some(vals) if vals.len() != *n => return Err(format!("vector needs {n} entries, got {}", vals.len())),
            Some(vals) => VecF::from_values(field, vals).map_err(|e| e.to_string())?,
            None => VecF::unit(field, *n, 0),
        };
        if v.is_zero() {
            return Err("vector must be non-zero".into());
        }
        let g = match translate {
            Some(vals) if vals.len() != n * n => {
                return Err(format!("translate needs {} entries, got {}", n * n, vals.len()))
            }
            Some(vals) => {
                let g = MatF::from_values(field, *n, *n, vals).map_err(|e| e.to_string())?;
                if !g.is_invertible() {
                    return Err("translate must be invertible".into());
                }
                Some(g)
            }
            None => None,
        };
        Ok((v, g))
    }

    /// Runs the job. Errors are precondition or cap failures.
    pub fn run(&self, caps: &Caps, seed: u64) -> Result<Certificate, String> {
        self.validate(caps)?;
        let field = |q: u64| Field::from_order_with_cap(q, caps.max_q).map_err(|e| e.to_string());
        let cert: Certificate = match self {
            JobSpec::Gl { n, q, mode, extremal } => {
                let params = GroupParams::new(*n, &field(*q)?).map_err(|e| e.to_string())?;
                let options = VerifyOptions {
                    search_cap: caps.max_vertices,
                    survey_extremal: *extremal,
                    seed,
                    ..VerifyOptions::default()
                };
                ekr::verify_theorem(&params, *mode, &options).map_err(|e| e.to_string())?.into()
            }
            JobSpec::Sn { n, extremal } => verify_sn_with_caps(
                *n,
                *extremal,
                caps.max_vertices,
                ekrgl::igraph::DEFAULT_ALL_CLIQUES_CAP,
            )
            .map_err(|e| e.to_string())?
            .into(),
            JobSpec::Spread { n, l, q, coclique } => {
                spread_certificate(&field(*q)?, *n, *l, *coclique).map_err(|e| e.to_string())?.into()
            }
            JobSpec::Audit { n, q, .. } => {
                let f = field(*q)?;
                let params = GroupParams::new(*n, &f).map_err(|e| e.to_string())?;
                let (v, g) = self.audit_inputs(&f)?;
                ekr::audit_certificate(&params, &v, g.as_ref()).map_err(|e| e.to_string())?.into()
            }
        };
        Ok(cert)
    }
}

impl fmt::Display for JobSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Hex characters of the content hash kept in file names.
pub const HASH_CHARS: usize = 16;

pub fn certificate_path(dir: &Path, spec: &JobSpec, cert: &Certificate) -> PathBuf {
    dir.join(format!("{}_{}.json", spec.label(), &cert.content_hash()[..HASH_CHARS]))
}

/// A cached certificate for `spec` in `dir`, if a readable one exists.
pub fn find_cached(dir: &Path, spec: &JobSpec) -> Option<(PathBuf, Certificate)> {
    let prefix = format!("{}_", spec.label());
    let mut names: Vec<_> = fs::read_dir(dir)
        .ok()?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|name| {
            name.strip_prefix(&prefix).and_then(|rest| rest.strip_suffix(".json")).is_some_and(|h| {
                h.len() == HASH_CHARS && h.bytes().all(|b| b.is_ascii_hexdigit())
            })
        })
        .collect();
    names.sort();
    names.into_iter().find_map(|name| {
        let path = dir.join(&name);
        let cert = Certificate::from_json(&fs::read_to_string(&path).ok()?).ok()?;
        (cert.kind() == spec.kind() && name.contains(&cert.content_hash()[..HASH_CHARS])).then_some((path, cert))
    })
}

#[derive(Clone, Debug)]
pub struct JobOutcome {
    pub spec: JobSpec,
    pub certificate: Certificate,
    pub path: PathBuf,
    pub cached: bool,
    pub wall_ms: u64,
}

impl JobOutcome {
    pub fn verdict(&self) -> Verdict {
        self.certificate.verdict()
    }
}

/// Runs a job, or reuses a cached certificate unless `force`, and writes
/// the certificate into `dir`.
pub fn execute(spec: &JobSpec, caps: &Caps, seed: u64, dir: &Path, force: bool) -> Result<JobOutcome, String> {
    let start = Instant::now();
    spec.validate(caps)?;
    if !force {
        if let Some((path, certificate)) = find_cached(dir, spec) {
            return Ok(JobOutcome {
                spec: spec.clone(),
                certificate,
                path,
                cached: true,
                wall_ms: start.elapsed().as_millis() as u64,
            });
        }
    }
    let certificate = spec.run(caps, seed)?;
    fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    let path = certificate_path(dir, spec, &certificate);
    fs::write(&path, certificate.to_json() + "\n").map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    Ok(JobOutcome { spec: spec.clone(), certificate, path, cached: false, wall_ms: start.elapsed().as_millis() as u64 })
}

/// A short `key=value` description of the sizes a certificate reports.
pub fn sizes(cert: &Certificate) -> String {
    match cert {
        Certificate::Gl(c) => {
            let a = &c.witnesses.audit;
            let mut s = format!(
                "clique={} alpha={} product={} intersection={}",
                a.clique_size,
                c.alpha,
                a.product,
                a.intersection_size.map_or("-".to_string(), |k| k.to_string())
            );
            if let Some(survey) = &c.extremal_survey {
                s += &format!(" max_cliques={} row_cosets={} column_cosets={}", survey.count, survey.row_vector_cosets, survey.column_vector_cosets);
            }
            s
        }
        Certificate::Sn(c) => {
            let mut s = format!("clique={} coclique={}", c.max_clique_size, c.max_coclique_size);
            if let Some(count) = c.max_clique_count {
                s += &format!(" max_cliques={count}");
            }
            if let Some(all) = c.extremal_all_cosets {
                s += &format!(" all_point_maps={all}");
            }
            s
        }
        Certificate::Spread(c) => {
            let mut s = format!("members={} partition={}", c.partition.member_count, c.partition.partition_ok);
            if let Some(co) = &c.coclique {
                s += &format!(" coclique={}", co.family.size);
            }
            s
        }
        Certificate::Audit(c) => format!(
            "clique={} coclique={} product={} intersection={}",
            c.audit.clique_size,
            c.audit.coclique_size,
            c.audit.product,
            c.audit.intersection_size.map_or("-".to_string(), |k| k.to_string())
        ),
    }
}
