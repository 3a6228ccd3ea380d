//! Intersecting permutations, as a baseline for the matrix case.
//!
//! Two permutations of `{0, .., n-1}` intersect when they agree on some
//! point. The largest intersecting families in S_n have `(n-1)!` members,
//! and the maximum ones are the sets `{f : f(x) = y}`. A sharply transitive
//! set (here, the cyclic shifts) is a coclique of size `n`.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::certificate::{Check, SnCertificate, SnWitnesses, Verdict, SCHEMA_VERSION, SN_KIND};
use crate::clique::{self, AdjacencyOracle, BitGraph};
use crate::error::{Error, Result};
use crate::igraph::{DEFAULT_ALL_CLIQUES_CAP, DEFAULT_SEARCH_CAP};

/// Largest degree accepted when decoding permutations.
pub const MAX_DEGREE: usize = 20;

/// A permutation of `{0, .., n-1}`, stored as its image list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn new(images: Vec<usize>) -> Result<Perm> {
        let n = images.len();
        if n > MAX_DEGREE {
            return Err(Error::InvalidPermutation(format!("degree {n} exceeds {MAX_DEGREE}")));
        }
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidPermutation(format!("{images:?} is not a bijection")));
            }
        }
        Ok(Perm { images })
    }

    /// Builds a permutation from 1-indexed images.
    pub fn from_one_based(images: &[usize]) -> Result<Perm> {
        let shifted = images
            .iter()
            .map(|&x| x.checked_sub(1).ok_or_else(|| Error::InvalidPermutation("images start at 1".into())))
            .collect::<Result<Vec<_>>>()?;
        Perm::new(shifted)
    }

    pub fn identity(n: usize) -> Perm {
        Perm { images: (0..n).collect() }
    }

    /// The cyclic shift `x -> x + k mod n`.
    pub fn shift(n: usize, k: usize) -> Perm {
        Perm { images: (0..n).map(|x| (x + k) % n).collect() }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.images.iter().map(|x| x + 1).collect()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Result<Perm> {
        if self.degree() != other.degree() {
            return Err(Error::SizeMismatch(self.degree(), other.degree()));
        }
        Ok(Perm { images: other.images.iter().map(|&x| self.images[x]).collect() })
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.degree()];
        for (x, &y) in self.images.iter().enumerate() {
            inv[y] = x;
        }
        Perm { images: inv }
    }

    pub fn fixed_points(&self) -> usize {
        self.images.iter().enumerate().filter(|&(x, &y)| x == y).count()
    }

    pub fn is_derangement(&self) -> bool {
        self.fixed_points() == 0
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.one_based())
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.one_based().iter().map(usize::to_string).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// Pointwise agreement.
pub fn perm_intersecting(f: &Perm, g: &Perm) -> Result<bool> {
    if f.degree() != g.degree() {
        return Err(Error::SizeMismatch(f.degree(), g.degree()));
    }
    Ok(f.images.iter().zip(&g.images).any(|(a, b)| a == b))
}

/// Same relation, read off `f ∘ g⁻¹` having a fixed point.
pub fn perm_intersecting_by_quotient(f: &Perm, g: &Perm) -> Result<bool> {
    Ok(!f.compose(&g.inverse())?.is_derangement())
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

/// `(n-1)!`.
pub fn deza_frankl_bound(n: usize) -> BigUint {
    factorial(n.saturating_sub(1))
}

/// All of S_n in lexicographic order of image lists.
pub fn all_perms(n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(n: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Perm>) {
        if current.len() == n {
            out.push(Perm { images: current.clone() });
            return;
        }
        for x in 0..n {
            if !used[x] {
                used[x] = true;
                current.push(x);
                rec(n, current, used, out);
                current.pop();
                used[x] = false;
            }
        }
    }
    rec(n, &mut current, &mut used, &mut out);
    out
}

pub fn is_intersecting_family(family: &[Perm]) -> bool {
    family
        .iter()
        .enumerate()
        .all(|(i, f)| family[i + 1..].iter().all(|g| perm_intersecting(f, g).unwrap_or(false)))
}

pub fn is_non_intersecting_family(family: &[Perm]) -> bool {
    family
        .iter()
        .enumerate()
        .all(|(i, f)| family[i + 1..].iter().all(|g| perm_intersecting(f, g) == Ok(false)))
}

/// `{f : f(x) = y}`, in lexicographic order.
pub fn point_map_family(n: usize, x: usize, y: usize) -> Vec<Perm> {
    all_perms(n).into_iter().filter(|f| f.apply(x) == y).collect()
}

/// The agreement graph on a list of permutations.
pub struct AgreementGraph {
    perms: Vec<Perm>,
}

impl AgreementGraph {
    pub fn new(n: usize) -> AgreementGraph {
        AgreementGraph { perms: all_perms(n) }
    }

    pub fn perms(&self) -> &[Perm] {
        &self.perms
    }
}

impl AdjacencyOracle for AgreementGraph {
    fn vertex_count(&self) -> usize {
        self.perms.len()
    }

    fn adjacent(&self, i: usize, j: usize) -> bool {
        i != j && perm_intersecting(&self.perms[i], &self.perms[j]).unwrap_or(false)
    }
}

fn ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

/// Exact search of the agreement graph on S_n. With `check_extremal`, every
/// maximum clique is enumerated and compared with the point-map families.
pub fn verify_sn(n: usize, check_extremal: bool) -> Result<SnCertificate> {
    verify_sn_with_caps(n, check_extremal, DEFAULT_SEARCH_CAP, DEFAULT_ALL_CLIQUES_CAP)
}

pub fn verify_sn_with_caps(n: usize, check_extremal: bool, search_cap: usize, all_cap: usize) -> Result<SnCertificate> {
    if n == 0 {
        return Err(Error::InvalidPermutation("degree must be positive".into()));
    }
    let order = factorial(n);
    let too_large = |cap: usize| Error::SearchTooLarge { vertices: order.to_usize().unwrap_or(usize::MAX), cap };
    if order > BigUint::from(search_cap) {
        return Err(too_large(search_cap));
    }
    if check_extremal && order > BigUint::from(all_cap) {
        return Err(too_large(all_cap));
    }
    let bound = deza_frankl_bound(n).to_u64().expect("small n");
    let group_order = order.to_u64().expect("small n");
    let mut timings = BTreeMap::new();

    let start = Instant::now();
    let graph = AgreementGraph::new(n);
    let bits = BitGraph::from_oracle(&graph);
    timings.insert("build_graph".to_string(), ms(start));
    let start = Instant::now();
    let clique_idx = clique::max_clique(&bits, None);
    timings.insert("max_clique".to_string(), ms(start));
    let start = Instant::now();
    let coclique_idx = clique::max_clique(&bits.complement(), None);
    timings.insert("max_coclique".to_string(), ms(start));
    let pick = |idx: &[usize]| idx.iter().map(|&i| graph.perms[i].clone()).collect::<Vec<_>>();
    let clique = pick(&clique_idx);
    let coclique = pick(&coclique_idx);

    let mut checks = vec![
        Check::new("max_clique_equals_bound", clique.len() as u64 == bound),
        Check::new("clique_is_intersecting", is_intersecting_family(&clique)),
        Check::new("max_coclique_equals_n", coclique.len() == n),
        Check::new("product_equals_group_order", (clique.len() * coclique.len()) as u64 == group_order),
    ];

    let (mut max_clique_count, mut extremal_all_cosets) = (None, None);
    if check_extremal {
        let start = Instant::now();
        let all = clique::all_max_cliques(&bits);
        let mut expected: Vec<Vec<Perm>> = (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .map(|(x, y)| point_map_family(n, x, y))
            .collect();
        expected.sort();
        expected.dedup();
        let mut found: Vec<Vec<Perm>> = all.iter().map(|c| pick(c)).collect();
        found.sort();
        timings.insert("all_max_cliques".to_string(), ms(start));
        let all_cosets = found == expected;
        checks.push(Check::new("extremal_are_point_maps", all_cosets));
        max_clique_count = Some(found.len());
        extremal_all_cosets = Some(all_cosets);
    }

    let cyclic: Vec<Perm> = (0..n).map(|k| Perm::shift(n, k)).collect();
    checks.push(Check::new("cyclic_shifts_non_intersecting", is_non_intersecting_family(&cyclic)));

    let verdict = Verdict::from_checks(&checks);
    Ok(SnCertificate {
        schema_version: SCHEMA_VERSION,
        kind: SN_KIND.to_string(),
        n,
        bound,
        group_order,
        max_clique_size: clique.len(),
        max_coclique_size: coclique.len(),
        extremal_checked: check_extremal,
        max_clique_count,
        extremal_all_cosets,
        witnesses: SnWitnesses {
            clique: clique.iter().map(Perm::one_based).collect(),
            coclique: coclique.iter().map(Perm::one_based).collect(),
        },
        checks,
        verdict,
        timings_ms: timings,
    })
}
