//! Spreads by field reduction, and the coclique they induce in GL_n(F_q).
//!
//! Identifying F_q^l with GF(q^n)^(l/n), the one-dimensional GF(q^n)
//! subspaces become n-dimensional GF(q) subspaces that partition the
//! non-zero vectors. For `l = 2n` the members are `rowspace(I | M(m))` for
//! every `m` in GF(q^n), where `M(m)` is the matrix of multiplication by `m`,
//! together with `rowspace(0 | I)`. Any two of those with `m != m'` are
//! complementary, so the non-zero `M(m)` form a coclique of size `q^n - 1`.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::certificate::{json_hash, Check, SpreadCertificate, SpreadCoclique, Verdict, SCHEMA_VERSION, SPREAD_KIND};
use crate::error::{Error, Result};
use crate::gfq::{ExtensionField, Field, FieldRecord};
use crate::glgroup::{Family, GroupParams};
use crate::igraph::{self, is_coclique, IGraph};
use crate::matfq::{MatF, MatrixRecord, Subspace, VecF};

/// Exhaustive vector scans are skipped above this many vectors.
pub const DEFAULT_SCAN_CAP: u128 = 1_000_000;

/// Matrix of `x -> m x` on GF(q^n) over GF(q), in the basis
/// `1, y, ..., y^(n-1)`. Row `j` holds the coordinates of `y^j m`.
pub fn mult_matrix(ext: &ExtensionField, m: u64) -> Result<MatF> {
    if m >= ext.order() {
        return Err(Error::ElementOutOfRange { value: m, order: ext.order() });
    }
    let n = ext.degree();
    let mut entries = Vec::with_capacity(n * n);
    let mut row = m;
    for _ in 0..n {
        entries.extend(ext.coeffs(row));
        row = ext.mul_by_y(row);
    }
    MatF::new(ext.base(), n, n, entries)
}

/// Checks that `ext` extends `base` before building a multiplication matrix.
pub fn mult_matrix_over(base: &Field, ext: &ExtensionField, m: u64) -> Result<MatF> {
    if ext.base() != base {
        return Err(Error::IncompatibleExtension(format!(
            "extension is built over GF({}), not GF({})",
            ext.base().q(),
            base.q()
        )));
    }
    mult_matrix(ext, m)
}

/// `(q^l - 1) / (q^n - 1)` when it is an integer.
pub fn spread_size(n: usize, l: usize, q: u64) -> Option<BigUint> {
    if n == 0 || l == 0 {
        return None;
    }
    let qb = BigUint::from(q);
    let num = qb.pow(l as u32) - 1u32;
    let den = qb.pow(n as u32) - 1u32;
    (&num % &den).is_zero().then(|| num / den)
}

/// A set of n-dimensional subspaces of F_q^l.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spread {
    field: Field,
    n: usize,
    l: usize,
    members: Vec<Subspace>,
}

/// Field-reduction spread of F_q^l into n-dimensional pieces.
///
/// Members are ordered by the position of the leading coordinate of their
/// GF(q^n) point, then by the remaining coordinates. For `l = 2n` this is
/// `W_0, W_1, ...` in ascending `m`, with `rowspace(0 | I)` last.
pub fn construct_spread(field: &Field, n: usize, l: usize) -> Result<Spread> {
    if n == 0 || l == 0 || !l.is_multiple_of(n) {
        return Err(Error::NotDivisible { n, l });
    }
    let ext = ExtensionField::new(field, n)?;
    let k = l / n;
    let blocks: Vec<MatF> = (0..ext.order()).map(|m| mult_matrix(&ext, m)).collect::<Result<_>>()?;
    let zero = MatF::zero(field, n, n);
    let identity = MatF::identity(field, n);
    let mut members = Vec::new();
    for lead in 0..k {
        let tail = k - lead - 1;
        let count = ext.order().pow(tail as u32);
        for idx in 0..count {
            // tail coordinates in lexicographic order, first coordinate most significant
            let mut coords = vec![0u64; tail];
            let mut rest = idx;
            for c in coords.iter_mut().rev() {
                *c = rest % ext.order();
                rest /= ext.order();
            }
            let mut basis = MatF::zero(field, n, 0);
            for _ in 0..lead {
                basis = basis.hstack(&zero)?;
            }
            basis = basis.hstack(&identity)?;
            for &c in &coords {
                basis = basis.hstack(&blocks[c as usize])?;
            }
            members.push(Subspace::from_rows(&basis));
        }
    }
    Ok(Spread { field: field.clone(), n, l, members })
}

impl Spread {
    /// Wraps arbitrary subspaces; nothing is checked until [`verify_partition`].
    pub fn from_members(field: &Field, n: usize, l: usize, members: Vec<Subspace>) -> Result<Spread> {
        for w in &members {
            if w.ambient() != l {
                return Err(Error::AmbientMismatch(w.ambient(), l));
            }
            if w.field() != field {
                return Err(Error::FieldMismatch);
            }
        }
        Ok(Spread { field: field.clone(), n, l, members })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn members(&self) -> &[Subspace] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `{W G}` member by member, order preserved.
    pub fn transform(&self, g: &MatF) -> Result<Spread> {
        let members = self.members.iter().map(|w| w.transform(g)).collect::<Result<_>>()?;
        Ok(Spread { field: self.field.clone(), n: self.n, l: self.l, members })
    }

    /// Member count is right, every member has dimension n, and members
    /// meet pairwise in zero. By counting, this forces a partition.
    pub fn is_spread_by_counting(&self) -> bool {
        let expected = spread_size(self.n, self.l, self.field.q() as u64);
        expected == Some(BigUint::from(self.len()))
            && self.members.iter().all(|w| w.dim() == self.n)
            && self.pairwise_trivial()
    }

    fn pairwise_trivial(&self) -> bool {
        let m = &self.members;
        m.iter()
            .enumerate()
            .all(|(i, a)| m[i + 1..].iter().all(|b| a.intersection_dim(b) == Ok(0)))
    }

    pub fn record(&self) -> SpreadRecord {
        SpreadRecord {
            n: self.n,
            l: self.l,
            field: self.field.record(),
            members: self.members.iter().map(|w| w.basis().record()).collect(),
        }
    }
}

/// Serialized spread: `{n, l, field, members: [bases]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpreadRecord {
    pub n: usize,
    pub l: usize,
    pub field: FieldRecord,
    pub members: Vec<MatrixRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub member_count: usize,
    pub expected_count: Option<u64>,
    pub dimensions_ok: bool,
    pub pairwise_trivial: bool,
    /// Non-zero vectors scanned; `None` when the scan was skipped.
    pub vectors_scanned: Option<u64>,
    pub uncovered: u64,
    pub multiply_covered: u64,
    pub partition_ok: bool,
}

/// Checks the partition property, scanning every non-zero vector when
/// `q^l <= scan_cap`.
pub fn verify_partition(spread: &Spread, scan_cap: u128) -> PartitionReport {
    let q = spread.field.q() as u64;
    let expected = spread_size(spread.n, spread.l, q).and_then(|s| u64::try_from(s).ok());
    let dimensions_ok = spread.members.iter().all(|w| w.dim() == spread.n);
    let pairwise_trivial = spread.pairwise_trivial();
    let total = (q as u128).checked_pow(spread.l as u32);
    let (mut uncovered, mut multiply_covered) = (0, 0);
    let mut vectors_scanned = None;
    if total.is_some_and(|t| t <= scan_cap) {
        let mut scanned = 0;
        for v in VecF::all(&spread.field, spread.l).skip(1) {
            scanned += 1;
            let hits = spread.members.iter().filter(|w| w.contains(&v).unwrap_or(false)).count();
            match hits {
                0 => uncovered += 1,
                1 => {}
                _ => multiply_covered += 1,
            }
        }
        vectors_scanned = Some(scanned);
    }
    let count_ok = expected == Some(spread.len() as u64);
    PartitionReport {
        member_count: spread.len(),
        expected_count: expected,
        dimensions_ok,
        pairwise_trivial,
        vectors_scanned,
        uncovered,
        multiply_covered,
        partition_ok: count_ok && dimensions_ok && pairwise_trivial && uncovered == 0 && multiply_covered == 0,
    }
}

/// Moves members `i0` and `i1` of a spread of F_q^(2n) to `rowspace(I | 0)`
/// and `rowspace(0 | I)`. `G` inverts the matrix stacking the two bases.
/// The result lists the image of `i0` first, the image of `i1` last, and
/// the rest in their original order.
pub fn normalize_spread(spread: &Spread, i0: usize, i1: usize) -> Result<(Spread, MatF)> {
    let n = spread.n;
    if spread.l != 2 * n {
        return Err(Error::ShapeMismatch(format!("normalization needs l = 2n, got l = {}", spread.l)));
    }
    let len = spread.len();
    if i0 >= len || i1 >= len {
        return Err(Error::ShapeMismatch(format!("member index out of range for {len} members")));
    }
    let (a, b) = (&spread.members[i0], &spread.members[i1]);
    if i0 == i1 || a.dim() != n || b.dim() != n || a.intersection_dim(b)? != 0 {
        return Err(Error::NotComplementary(i0, i1));
    }
    let stacked = a.basis().vstack(b.basis())?;
    let g = stacked.inverse().map_err(|_| Error::NotComplementary(i0, i1))?;
    let image = spread.transform(&g)?;
    let mut members = Vec::with_capacity(len);
    members.push(image.members[i0].clone());
    members.extend(
        image.members.iter().enumerate().filter(|&(i, _)| i != i0 && i != i1).map(|(_, w)| w.clone()),
    );
    members.push(image.members[i1].clone());
    let normalized = Spread { members, ..image };
    if !normalized.is_spread_by_counting() {
        return Err(Error::NotComplementary(i0, i1));
    }
    Ok((normalized, g))
}

fn standard_pieces(field: &Field, n: usize) -> (Subspace, Subspace) {
    let i = MatF::identity(field, n);
    let z = MatF::zero(field, n, n);
    (
        Subspace::from_rows(&i.hstack(&z).expect("same rows")),
        Subspace::from_rows(&z.hstack(&i).expect("same rows")),
    )
}

/// Reads `(I | T_i)` off every member of a normalized spread other than
/// the first and last, and returns the `T_i`.
pub fn extract_coclique(spread: &Spread) -> Result<Family> {
    let n = spread.n;
    if spread.l != 2 * n || spread.len() < 2 {
        return Err(Error::NotNormalized);
    }
    let (first, last) = standard_pieces(&spread.field, n);
    if spread.members[0] != first || spread.members[spread.len() - 1] != last {
        return Err(Error::NotNormalized);
    }
    let identity = MatF::identity(&spread.field, n);
    let params = GroupParams::new(n, &spread.field)?;
    let mut ts = Vec::with_capacity(spread.len() - 2);
    for (idx, w) in spread.members.iter().enumerate().take(spread.len() - 1).skip(1) {
        if w.dim() != n || w.basis().column_block(0, n) != identity {
            return Err(Error::MalformedMember(idx));
        }
        let t = w.basis().column_block(n, 2 * n);
        if !t.is_invertible() {
            return Err(Error::MalformedMember(idx));
        }
        ts.push(t);
    }
    let family = Family::new(&params, ts)?;
    if family.len() != spread.len() - 2 || !is_coclique(&family) {
        return Err(Error::NotCoclique);
    }
    Ok(family)
}

/// The coclique of GL_n(F_q) obtained from the field-reduction spread of
/// F_q^(2n), already in normal form.
pub fn spread_coclique(params: &GroupParams) -> Result<Family> {
    let n = params.n();
    let spread = construct_spread(params.field(), n, 2 * n)?;
    let (normalized, _) = normalize_spread(&spread, 0, spread.len() - 1)?;
    extract_coclique(&normalized)
}

/// Replays the packing count: `W_0 = (I|0)`, `W_i = (I|T_i)` and
/// `(0|I)` meet pairwise in zero, so `(|A| + 2)(q^n - 1)` non-zero vectors
/// fit inside the `q^(2n) - 1` available.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingCheck {
    pub pieces: usize,
    pub pairwise_trivial: bool,
    pub covered: u64,
    pub available: u64,
    /// Distinct non-zero vectors in the union, when scanned.
    pub scanned_covered: Option<u64>,
    pub fits: bool,
    pub tight: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaximalityReport {
    pub size: usize,
    pub bound: u64,
    pub meets_bound: bool,
    pub packing: PackingCheck,
    /// Independent exact coclique number, when the group is small enough.
    pub exhaustive_alpha: Option<usize>,
}

impl MaximalityReport {
    pub fn valid(&self) -> bool {
        self.packing.pairwise_trivial
            && self.packing.fits
            && self.packing.tight == self.meets_bound
            && self.packing.scanned_covered.is_none_or(|c| c == self.packing.covered)
            && self.exhaustive_alpha.is_none_or(|a| a as u64 == self.bound)
    }
}

/// Audits a coclique against `q^n - 1`. When `search_cap` admits the whole
/// group, also computes the coclique number by exact search.
pub fn coclique_maximality_audit(a: &Family, search_cap: Option<usize>) -> Result<MaximalityReport> {
    if !is_coclique(a) {
        return Err(Error::NotCoclique);
    }
    let p = a.params();
    let (n, q) = (p.n(), p.q());
    let too_large = || Error::EnumerationTooLarge(format!("q^(2n) for n = {n}, q = {q}"));
    let piece: u64 = q.checked_pow(n as u32).ok_or_else(too_large)? - 1;
    let available = q.checked_pow(2 * n as u32).ok_or_else(too_large)? - 1;

    let field = p.field();
    let (first, last) = standard_pieces(field, n);
    let identity = MatF::identity(field, n);
    let mut pieces = vec![first];
    for t in a.members() {
        pieces.push(Subspace::from_rows(&identity.hstack(t)?));
    }
    pieces.push(last);
    let pairwise_trivial = pieces
        .iter()
        .enumerate()
        .all(|(i, x)| pieces[i + 1..].iter().all(|y| x.intersection_dim(y) == Ok(0)));
    let covered = (pieces.len() as u64).saturating_mul(piece);
    let scanned_covered = ((q as u128).pow(2 * n as u32) <= DEFAULT_SCAN_CAP).then(|| {
        VecF::all(field, 2 * n)
            .skip(1)
            .filter(|v| pieces.iter().any(|w| w.contains(v).unwrap_or(false)))
            .count() as u64
    });

    let exhaustive_alpha = match search_cap {
        Some(cap) if BigUint::from(cap) >= p.order() => {
            Some(IGraph::new(p)?.with_search_cap(cap).max_coclique()?.len())
        }
        _ => None,
    };
    Ok(MaximalityReport {
        size: a.len(),
        bound: piece,
        meets_bound: a.len() as u64 == piece,
        packing: PackingCheck {
            pieces: pieces.len(),
            pairwise_trivial,
            covered,
            available,
            scanned_covered,
            fits: covered <= available,
            tight: covered == available,
        },
        exhaustive_alpha,
    })
}

/// `T_i - T_j` for two multiplication matrices is again one, so its
/// invertibility can be read off the field element. Returns whether this
/// agrees with the determinant test on every pair.
pub fn differences_match_field(ext: &ExtensionField) -> Result<bool> {
    let elems: Vec<u64> = (1..ext.order()).collect();
    for &a in &elems {
        let ma = mult_matrix(ext, a)?;
        for &b in &elems {
            let diff = ma.sub(&mult_matrix(ext, b)?)?;
            if diff != mult_matrix(ext, ext.sub(a, b))? || diff.is_invertible() != (a != b) {
                return Ok(false);
            }
        }
    }
    Ok(igraph::is_coclique(&Family::new(
        &GroupParams::new(ext.degree(), ext.base())?,
        elems.iter().map(|&m| mult_matrix(ext, m)).collect::<Result<_>>()?,
    )?))
}

fn ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

/// Builds the field-reduction spread and certifies the partition. With
/// `emit_coclique` (which needs `l = 2n`) the certificate also carries the
/// coclique read off the normalized spread, tied to it by hash.
pub fn spread_certificate(field: &Field, n: usize, l: usize, emit_coclique: bool) -> Result<SpreadCertificate> {
    if emit_coclique && n > 0 && l.is_multiple_of(n) && l != 2 * n {
        return Err(Error::ShapeMismatch(format!("emitting a coclique needs l = 2n, got n = {n}, l = {l}")));
    }
    let mut timings = BTreeMap::new();
    let start = Instant::now();
    let spread = construct_spread(field, n, l)?;
    timings.insert("construct".to_string(), ms(start));
    let record = spread.record();
    let spread_hash = json_hash(&record);
    let start = Instant::now();
    let partition = verify_partition(&spread, DEFAULT_SCAN_CAP);
    timings.insert("partition".to_string(), ms(start));
    let mut checks = vec![
        Check::new("member_count", partition.expected_count == Some(spread.len() as u64)),
        Check::new("partition", partition.partition_ok),
    ];
    let coclique = if emit_coclique {
        let start = Instant::now();
        let (normalized, g) = normalize_spread(&spread, 0, spread.len() - 1)?;
        let family = extract_coclique(&normalized)?;
        let maximality = coclique_maximality_audit(&family, None)?;
        timings.insert("coclique".to_string(), ms(start));
        let size = (field.q() as u64).pow(n as u32) - 1;
        checks.push(Check::new("coclique_size_q^n-1", family.len() as u64 == size));
        checks.push(Check::new("coclique_packing", maximality.valid() && maximality.meets_bound));
        Some(SpreadCoclique {
            source_spread_hash: spread_hash.clone(),
            normalizer: g.record(),
            family: family.record(),
            maximality,
        })
    } else {
        None
    };
    let verdict = Verdict::from_checks(&checks);
    Ok(SpreadCertificate {
        schema_version: SCHEMA_VERSION,
        kind: SPREAD_KIND.to_string(),
        n,
        l,
        q: field.q() as u64,
        spread: record,
        spread_hash,
        partition,
        coclique,
        checks,
        verdict,
        timings_ms: timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u64) -> Field {
        Field::from_order(q).unwrap()
    }

    #[test]
    fn mult_matrix_examples() {
        let base = gf(2);
        let ext = ExtensionField::new(&base, 2).unwrap();
        assert_eq!(mult_matrix(&ext, 0).unwrap(), MatF::zero(&base, 2, 2));
        assert_eq!(mult_matrix(&ext, 1).unwrap(), MatF::identity(&base, 2));
        let x = mult_matrix(&ext, 2).unwrap();
        assert_eq!(x, MatF::from_rows(&base, &[[0, 1], [1, 1]]).unwrap());
        let x_plus_1 = MatF::from_rows(&base, &[[1, 1], [1, 0]]).unwrap();
        assert_eq!(x.mul(&x).unwrap(), x_plus_1);
        assert_eq!(mult_matrix(&ext, 3).unwrap(), x_plus_1);
        assert!(mult_matrix(&ext, 4).is_err());
        let other = ExtensionField::new(&gf(3), 2).unwrap();
        assert!(matches!(mult_matrix_over(&base, &other, 1), Err(Error::IncompatibleExtension(_))));
    }

    #[test]
    fn mult_matrix_is_a_ring_homomorphism() {
        for (q, n) in [(2, 2), (2, 3), (3, 2), (4, 2), (2, 6), (8, 2), (4, 3), (7, 2)] {
            let ext = ExtensionField::new(&gf(q), n).unwrap();
            if ext.order() > 64 {
                continue;
            }
            let ms: Vec<MatF> = (0..ext.order()).map(|m| mult_matrix(&ext, m).unwrap()).collect();
            for a in 0..ext.order() {
                for b in 0..ext.order() {
                    let (ma, mb) = (&ms[a as usize], &ms[b as usize]);
                    assert_eq!(ma.mul(mb).unwrap(), ms[ext.mul(a, b) as usize]);
                    assert_eq!(ma.add(mb).unwrap(), ms[ext.add(a, b) as usize]);
                }
                assert_eq!(ms[a as usize].is_invertible(), a != 0);
            }
        }
    }

    #[test]
    fn lines_of_the_plane() {
        let f = gf(2);
        let s = construct_spread(&f, 1, 2).unwrap();
        let spans: Vec<Vec<u32>> = s.members().iter().map(|w| w.basis().values()).collect();
        assert_eq!(spans, vec![vec![1, 0], vec![1, 1], vec![0, 1]]);
    }

    #[test]
    fn spread_partitions() {
        for (n, l, q, count) in [(2, 4, 2, 5), (2, 4, 3, 10), (2, 6, 2, 21), (3, 6, 2, 9), (1, 3, 3, 13)] {
            let s = construct_spread(&gf(q), n, l).unwrap();
            assert_eq!(s.len(), count);
            let r = verify_partition(&s, DEFAULT_SCAN_CAP);
            assert!(r.partition_ok, "{r:?}");
            assert_eq!(r.vectors_scanned, Some(q.pow(l as u32) - 1));
            // pieces add up to every non-zero vector
            assert_eq!(count as u64 * (q.pow(n as u32) - 1), q.pow(l as u32) - 1);
        }
    }

    #[test]
    fn rejects_non_divisors() {
        assert_eq!(construct_spread(&gf(2), 2, 3).unwrap_err(), Error::NotDivisible { n: 2, l: 3 });
        assert_eq!(spread_size(2, 3, 2), None);
        assert_eq!(spread_size(2, 6, 2), Some(BigUint::from(21u32)));
        for q in [2u64, 3, 4, 5] {
            for n in 1..5 {
                for l in 1..9 {
                    assert_eq!(spread_size(n, l, q).is_some(), l % n == 0, "n={n} l={l} q={q}");
                }
            }
        }
    }

    #[test]
    fn broken_spread_is_detected() {
        let f = gf(2);
        let s = construct_spread(&f, 2, 4).unwrap();
        let mut members = s.members().to_vec();
        members[1] = members[0].clone();
        let broken = Spread::from_members(&f, 2, 4, members).unwrap();
        let r = verify_partition(&broken, DEFAULT_SCAN_CAP);
        assert!(!r.partition_ok);
        assert_eq!(r.uncovered, 3);
        assert_eq!(r.multiply_covered, 3);
    }

    #[test]
    fn normalization() {
        let f = gf(2);
        let s = construct_spread(&f, 2, 4).unwrap();
        let last = s.len() - 1;
        let (norm, g) = normalize_spread(&s, 0, last).unwrap();
        assert_eq!(g, MatF::identity(&f, 4));
        assert_eq!(norm, s);

        let (swapped, g) = normalize_spread(&s, last, 0).unwrap();
        let anti = MatF::from_rows(&f, &[[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]).unwrap();
        assert_eq!(g, anti);
        assert!(verify_partition(&swapped, DEFAULT_SCAN_CAP).partition_ok);
        assert_eq!(extract_coclique(&swapped).unwrap(), extract_coclique(&norm).unwrap());

        assert_eq!(normalize_spread(&s, 1, 1).unwrap_err(), Error::NotComplementary(1, 1));
    }

    #[test]
    fn normalization_from_arbitrary_pairs() {
        let f = gf(3);
        let s = construct_spread(&f, 2, 4).unwrap();
        for (i0, i1) in [(3, 7), (9, 2), (5, 0)] {
            let (norm, g) = normalize_spread(&s, i0, i1).unwrap();
            assert!(g.is_invertible());
            assert!(verify_partition(&norm, DEFAULT_SCAN_CAP).partition_ok);
            let a = extract_coclique(&norm).unwrap();
            assert_eq!(a.len(), 8);
            assert!(is_coclique(&a));
        }
    }

    #[test]
    fn extraction() {
        let f = gf(2);
        let s = construct_spread(&f, 2, 4).unwrap();
        let a = extract_coclique(&s).unwrap();
        let ext = ExtensionField::new(&f, 2).unwrap();
        let expected: Vec<MatF> = (1..4).map(|m| mult_matrix(&ext, m).unwrap()).collect();
        assert_eq!(a, Family::new(a.params(), expected).unwrap());

        for (n, q, size) in [(2, 3, 8), (3, 2, 7), (2, 4, 15), (1, 5, 4)] {
            let p = GroupParams::new(n, &gf(q)).unwrap();
            let a = spread_coclique(&p).unwrap();
            assert_eq!(a.len(), size);
            assert!(is_coclique(&a));
        }
    }

    #[test]
    fn extraction_errors() {
        let f = gf(2);
        let s = construct_spread(&f, 2, 4).unwrap();
        let mut members = s.members().to_vec();
        members.swap(0, 1);
        let shuffled = Spread::from_members(&f, 2, 4, members).unwrap();
        assert_eq!(extract_coclique(&shuffled).unwrap_err(), Error::NotNormalized);

        let mut members = s.members().to_vec();
        members[2] = Subspace::from_rows(&MatF::from_rows(&f, &[[1, 0, 0, 0], [0, 0, 1, 0]]).unwrap());
        let bad = Spread::from_members(&f, 2, 4, members).unwrap();
        assert_eq!(extract_coclique(&bad).unwrap_err(), Error::MalformedMember(2));
    }

    #[test]
    fn maximality_audit() {
        for (n, q) in [(1, 5), (2, 2), (2, 3)] {
            let p = GroupParams::new(n, &gf(q)).unwrap();
            let a = spread_coclique(&p).unwrap();
            let r = coclique_maximality_audit(&a, Some(64)).unwrap();
            assert!(r.meets_bound && r.packing.tight && r.valid(), "{r:?}");
            assert_eq!(r.exhaustive_alpha, Some(q.pow(n as u32) as usize - 1));
            assert_eq!(r.packing.scanned_covered, Some(r.packing.available));
        }
        // a smaller coclique fits but is not tight
        let p = GroupParams::new(2, &gf(3)).unwrap();
        let a = spread_coclique(&p).unwrap();
        let part = Family::new(&p, a.members()[..5].to_vec()).unwrap();
        let r = coclique_maximality_audit(&part, None).unwrap();
        assert!(!r.meets_bound && !r.packing.tight && r.packing.fits && r.valid());
        let clique = crate::glgroup::stabilizer(&p, &VecF::unit(p.field(), 2, 0)).unwrap();
        assert_eq!(coclique_maximality_audit(&clique, None).unwrap_err(), Error::NotCoclique);
    }

    #[test]
    fn field_reduction_differences() {
        for (q, n) in [(2, 2), (3, 2), (2, 3), (4, 2), (5, 2)] {
            let ext = ExtensionField::new(&gf(q), n).unwrap();
            assert!(differences_match_field(&ext).unwrap());
        }
    }

    #[test]
    fn images_of_spreads_are_spreads() {
        let f = gf(3);
        let s = construct_spread(&f, 2, 4).unwrap();
        let g = MatF::from_rows(&f, &[[1, 2, 0, 1], [0, 1, 1, 0], [2, 0, 1, 1], [1, 1, 1, 2]]).unwrap();
        assert!(g.is_invertible());
        assert!(verify_partition(&s.transform(&g).unwrap(), DEFAULT_SCAN_CAP).partition_ok);
    }
}
