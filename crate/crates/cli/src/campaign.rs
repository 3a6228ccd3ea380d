//! Campaign files: one job or setting per line.
//!
//! ```text
//! # settings
//! output_dir=results
//! max_vertices=512
//! max_q=16
//! time_budget_s=300
//!
//! # jobs
//! kind=gl_ekr n=2 q=3 mode=exhaustive
//! kind=gl_ekr n=2 q=2 mode=exhaustive extremal=true
//! kind=gl_ekr n=2 q=5 mode=certificate
//! kind=sn_ekr n=4 extremal=true
//! kind=spread n=2 l=4 q=3 coclique=true
//! kind=audit n=2 q=3 vector=0,1 translate=1,2,1,0
//! ```
//!
//! Tokens are `key=value` pairs separated by whitespace; `#` starts a
//! comment. A line with `kind=` is a job, any other non-empty line holds
//! settings. Settings may appear anywhere and apply to every job. Jobs are
//! checked against the final caps, and every problem is reported with its
//! line number.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use ekrgl::ekr::Mode;

use crate::jobs::{Caps, JobSpec};

pub const GRAMMAR_HELP: &str = "\
Campaign file format: one entry per line, whitespace-separated key=value tokens, '#' starts a comment.
  settings:  output_dir=DIR  max_vertices=N  max_q=Q  time_budget_s=SECONDS
  jobs:      kind=gl_ekr n=N q=Q [mode=exhaustive|certificate] [extremal=true]
             kind=sn_ekr n=N [extremal=true]
             kind=spread n=N l=L q=Q [coclique=true]
             kind=audit n=N q=Q [vector=a,b,..] [translate=a,b,..]   (translate is row-major, n*n entries)
Command-line flags override settings from the file.";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CampaignJob {
    pub line: usize,
    pub spec: JobSpec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Campaign {
    pub jobs: Vec<CampaignJob>,
    pub output_dir: Option<PathBuf>,
    pub caps: Caps,
    pub time_budget_s: Option<u64>,
}

/// Values given on the command line, which win over the file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Overrides {
    pub max_vertices: Option<usize>,
    pub max_q: Option<u64>,
}

type Pairs = BTreeMap<String, String>;

fn tokenize(line: &str) -> Result<Pairs, String> {
    let mut pairs = Pairs::new();
    for token in line.split_whitespace() {
        let (k, v) = token.split_once('=').ok_or_else(|| format!("expected key=value, found {token:?}"))?;
        if k.is_empty() || v.is_empty() {
            return Err(format!("empty key or value in {token:?}"));
        }
        if pairs.insert(k.to_string(), v.to_string()).is_some() {
            return Err(format!("duplicate key {k:?}"));
        }
    }
    Ok(pairs)
}

fn take<T: FromStr>(pairs: &mut Pairs, key: &str) -> Result<Option<T>, String> {
    match pairs.remove(key) {
        None => Ok(None),
        Some(v) => v.parse().map(Some).map_err(|_| format!("invalid value {v:?} for {key}")),
    }
}

fn require<T: FromStr>(pairs: &mut Pairs, key: &str) -> Result<T, String> {
    take(pairs, key)?.ok_or_else(|| format!("missing required key {key}"))
}

fn take_list(pairs: &mut Pairs, key: &str) -> Result<Option<Vec<u32>>, String> {
    match pairs.remove(key) {
        None => Ok(None),
        Some(v) => v
            .split(',')
            .map(|x| x.trim().parse::<u32>().map_err(|_| format!("invalid entry {x:?} in {key}")))
            .collect::<Result<Vec<_>, _>>()
            .map(Some),
    }
}

fn parse_job(mut pairs: Pairs) -> Result<JobSpec, String> {
    let kind: String = require(&mut pairs, "kind")?;
    let spec = match kind.as_str() {
        "gl_ekr" => JobSpec::Gl {
            n: require(&mut pairs, "n")?,
            q: require(&mut pairs, "q")?,
            mode: take::<Mode>(&mut pairs, "mode")?.unwrap_or(Mode::Exhaustive),
            extremal: take(&mut pairs, "extremal")?.unwrap_or(false),
        },
        "sn_ekr" => JobSpec::Sn { n: require(&mut pairs, "n")?, extremal: take(&mut pairs, "extremal")?.unwrap_or(false) },
        "spread" => JobSpec::Spread {
            n: require(&mut pairs, "n")?,
            l: require(&mut pairs, "l")?,
            q: require(&mut pairs, "q")?,
            coclique: take(&mut pairs, "coclique")?.unwrap_or(false),
        },
        "audit" => JobSpec::Audit {
            n: require(&mut pairs, "n")?,
            q: require(&mut pairs, "q")?,
            vector: take_list(&mut pairs, "vector")?,
            translate: take_list(&mut pairs, "translate")?,
        },
        other => return Err(format!("unknown job kind {other:?} (expected gl_ekr, sn_ekr, spread or audit)")),
    };
    match pairs.keys().next() {
        Some(k) => Err(format!("unknown key {k:?} for kind {kind}")),
        None => Ok(spec),
    }
}

pub fn parse_campaign(text: &str, overrides: &Overrides) -> Result<Campaign, Vec<ParseError>> {
    let mut errors = Vec::new();
    let mut jobs = Vec::new();
    let mut output_dir = None;
    let mut max_vertices = None;
    let mut max_q = None;
    let mut time_budget_s = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut fail = |message: String| errors.push(ParseError { line, message });
        let mut pairs = match tokenize(content) {
            Ok(p) => p,
            Err(e) => {
                fail(e);
                continue;
            }
        };
        if pairs.contains_key("kind") {
            match parse_job(pairs) {
                Ok(spec) => jobs.push(CampaignJob { line, spec }),
                Err(e) => fail(e),
            }
            continue;
        }
        let mut settings = || -> Result<(), String> {
            if let Some(v) = take::<PathBuf>(&mut pairs, "output_dir")? {
                output_dir = Some(v);
            }
            if let Some(v) = take::<usize>(&mut pairs, "max_vertices")? {
                max_vertices = Some(v);
            }
            if let Some(v) = take::<u64>(&mut pairs, "max_q")? {
                max_q = Some(v);
            }
            if let Some(v) = take::<u64>(&mut pairs, "time_budget_s")? {
                time_budget_s = Some(v);
            }
            match pairs.keys().next() {
                Some(k) => Err(format!("unknown setting {k:?}")),
                None => Ok(()),
            }
        };
        if let Err(e) = settings() {
            fail(e);
        }
    }

    let defaults = Caps::default();
    let caps = Caps {
        max_vertices: overrides.max_vertices.or(max_vertices).unwrap_or(defaults.max_vertices),
        max_q: overrides.max_q.or(max_q).unwrap_or(defaults.max_q),
    };
    for job in &jobs {
        if let Err(message) = job.spec.validate(&caps) {
            errors.push(ParseError { line: job.line, message });
        }
    }
    if jobs.is_empty() && errors.is_empty() {
        errors.push(ParseError { line: 0, message: "campaign contains no jobs".into() });
    }
    if errors.is_empty() {
        Ok(Campaign { jobs, output_dir, caps, time_budget_s })
    } else {
        errors.sort_by_key(|e| e.line);
        Err(errors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_example() {
        let text = "\
# settings
output_dir=out
max_vertices=200   # inline comment

kind=gl_ekr n=2 q=3 mode=exhaustive
kind=sn_ekr n=4 extremal=true
kind=spread n=2 l=4 q=3 coclique=true
kind=audit n=2 q=3 vector=0,1 translate=1,2,1,0
";
        let c = parse_campaign(text, &Overrides::default()).unwrap();
        assert_eq!(c.jobs.len(), 4);
        assert_eq!(c.caps.max_vertices, 200);
        assert_eq!(c.output_dir, Some(PathBuf::from("out")));
        assert_eq!(c.jobs[0].line, 5);
        assert_eq!(c.jobs[3].spec.label(), "audit_n2_q3_v0-1_g1-2-1-0");
    }

    #[test]
    fn diagnostics_carry_lines() {
        let text = "kind=gl_ekr n=2 q=6\nkind=spread n=2 l=3 q=2\nfoo\nkind=bogus\nkind=gl_ekr n=3 q=3 mode=exhaustive\nkind=sn_ekr n=4 colour=red\n";
        let errs = parse_campaign(text, &Overrides::default()).unwrap_err();
        let lines: Vec<usize> = errs.iter().map(|e| e.line).collect();
        assert_eq!(lines, vec![1, 2, 3, 4, 5, 6]);
        assert!(errs[0].message.contains("prime power"));
        assert!(errs[1].message.contains("n must divide l"));
        assert!(errs[4].message.contains("max_vertices"));
        assert!(errs[5].message.contains("colour"));
    }

    #[test]
    fn overrides_win() {
        let text = "max_vertices=10\nkind=gl_ekr n=2 q=3\n";
        assert!(parse_campaign(text, &Overrides::default()).is_err());
        let o = Overrides { max_vertices: Some(100), max_q: None };
        assert!(parse_campaign(text, &o).is_ok());
    }

    #[test]
    fn empty_campaign_rejected() {
        assert!(parse_campaign("# nothing\n", &Overrides::default()).is_err());
    }
}
