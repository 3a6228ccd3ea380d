//! GL_n(F_q): orders, exhaustive enumeration, vector stabilizers, cosets.

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gfq::{Felt, Field, FieldRecord};
use crate::matfq::{MatF, MatrixRecord, VecF};

/// Default cap on `q^(n^2)`, the number of candidate matrices.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000_000;

/// Families up to this size serialize their full matrices.
pub const FULL_MATRIX_LIMIT: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupParams {
    n: usize,
    field: Field,
}

impl GroupParams {
    pub fn new(n: usize, field: &Field) -> Result<GroupParams> {
        if n == 0 {
            return Err(Error::ShapeMismatch("degree n must be at least 1".into()));
        }
        Ok(GroupParams { n, field: field.clone() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.field.q() as u64
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn order(&self) -> BigUint {
        gl_order(self.n, self.q())
    }

    /// `q^(n^2)`, saturating.
    pub fn candidate_count(&self) -> u128 {
        (self.q() as u128).checked_pow((self.n * self.n) as u32).unwrap_or(u128::MAX)
    }

    pub fn identity(&self) -> MatF {
        MatF::identity(&self.field, self.n)
    }

    /// Checks that `m` is an invertible `n x n` matrix over this field.
    pub fn check_member(&self, m: &MatF) -> Result<()> {
        if *m.field() != self.field {
            return Err(Error::FieldMismatch);
        }
        if m.rows() != self.n || m.cols() != self.n {
            return Err(Error::ShapeMismatch(format!(
                "expected {n}x{n}, got {}x{}",
                m.rows(),
                m.cols(),
                n = self.n
            )));
        }
        if !m.is_invertible() {
            return Err(Error::NonGroupElement);
        }
        Ok(())
    }
}

/// `|GL_n(F_q)| = prod_{i=0}^{n-1} (q^n - q^i)`.
pub fn gl_order(n: usize, q: u64) -> BigUint {
    let q = BigUint::from(q);
    let qn = q.pow(n as u32);
    (0..n).fold(BigUint::one(), |acc, i| acc * (&qn - q.pow(i as u32)))
}

/// A set of group elements kept in ascending key order without duplicates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    params: GroupParams,
    members: Vec<MatF>,
}

impl Family {
    /// Validates and canonicalizes `members`.
    pub fn new(params: &GroupParams, mut members: Vec<MatF>) -> Result<Family> {
        for m in &members {
            params.check_member(m)?;
        }
        members.sort();
        members.dedup();
        Ok(Family { params: params.clone(), members })
    }

    // Caller guarantees members are valid group elements.
    pub(crate) fn from_members_unchecked(params: &GroupParams, mut members: Vec<MatF>) -> Family {
        members.sort();
        members.dedup();
        Family { params: params.clone(), members }
    }

    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn members(&self) -> &[MatF] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn index_of(&self, m: &MatF) -> Option<usize> {
        self.members.binary_search(m).ok()
    }

    pub fn contains(&self, m: &MatF) -> bool {
        self.index_of(m).is_some()
    }

    pub fn intersection(&self, other: &Family) -> Vec<MatF> {
        self.members.iter().filter(|m| other.contains(m)).cloned().collect()
    }

    pub fn keys(&self) -> Vec<Option<u128>> {
        self.members.iter().map(MatF::key).collect()
    }

    pub fn record(&self) -> FamilyRecord {
        FamilyRecord {
            params: ParamsRecord { n: self.params.n, field: self.params.field.record() },
            size: self.len(),
            member_keys: self.members.iter().map(|m| m.key().unwrap_or(u128::MAX)).collect(),
            members: (self.len() <= FULL_MATRIX_LIMIT)
                .then(|| self.members.iter().map(MatF::record).collect()),
        }
    }

    /// Rebuilds a family from its record, re-checking every member.
    pub fn from_record(record: &FamilyRecord, max_order: u64) -> Result<Family> {
        let field = Field::from_record(&record.params.field, max_order)?;
        let params = GroupParams::new(record.params.n, &field)?;
        let n = params.n;
        let members = match &record.members {
            Some(ms) => ms.iter().map(|m| MatF::from_record(&field, m)).collect::<Result<Vec<_>>>()?,
            None => record
                .member_keys
                .iter()
                .map(|&k| MatF::from_key(&field, n, n, k))
                .collect::<Result<Vec<_>>>()?,
        };
        let family = Family::new(&params, members)?;
        if family.len() != record.size || family.len() != record.member_keys.len() {
            return Err(Error::InvalidCertificate("family size does not match its members".into()));
        }
        if family.members.iter().zip(&record.member_keys).any(|(m, &k)| m.key() != Some(k)) {
            return Err(Error::InvalidCertificate("member keys out of order or mismatched".into()));
        }
        Ok(family)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsRecord {
    pub n: usize,
    pub field: FieldRecord,
}

/// Serialized family: `{params, size, member_keys, members?}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyRecord {
    pub params: ParamsRecord,
    pub size: usize,
    pub member_keys: Vec<u128>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<MatrixRecord>>,
}

pub fn enumerate_gl(params: &GroupParams) -> Result<Family> {
    enumerate_gl_with_cap(params, DEFAULT_ENUMERATION_CAP)
}

/// Every invertible matrix, built row by row with each new row chosen
/// outside the span of the rows above it. Rows are tried in ascending key
/// order, so the output is already sorted.
pub fn enumerate_gl_with_cap(params: &GroupParams, cap: u128) -> Result<Family> {
    let count = params.candidate_count();
    if count > cap {
        return Err(Error::EnumerationTooLarge(format!(
            "q^(n^2) = {}^{} candidates",
            params.q(),
            params.n * params.n
        )));
    }
    let f = params.field();
    let n = params.n;
    let vectors: Vec<VecF> = VecF::all(f, n).collect();
    let mut out = Vec::new();
    let mut rows: Vec<usize> = Vec::with_capacity(n);
    let mut in_span = vec![false; vectors.len()];
    in_span[0] = true;
    extend_rows(f, &vectors, &mut rows, &mut in_span, &mut out, n);
    Ok(Family { params: params.clone(), members: out })
}

fn extend_rows(
    f: &Field,
    vectors: &[VecF],
    rows: &mut Vec<usize>,
    in_span: &mut [bool],
    out: &mut Vec<MatF>,
    n: usize,
) {
    if rows.len() == n {
        let chosen: Vec<VecF> = rows.iter().map(|&i| vectors[i].clone()).collect();
        out.push(MatF::from_row_vecs(f, &chosen, n).expect("rows have length n"));
        return;
    }
    for cand in 0..vectors.len() {
        if in_span[cand] {
            continue;
        }
        // span + F*cand
        let span: Vec<usize> = (0..vectors.len()).filter(|&i| in_span[i]).collect();
        let mut grown = in_span.to_vec();
        for &s in &span {
            for c in f.elements().skip(1) {
                let sum: Vec<Felt> = vectors[s]
                    .entries()
                    .iter()
                    .zip(vectors[cand].entries())
                    .map(|(&a, &b)| f.add(a, f.mul(c, b)))
                    .collect();
                let key = VecF::new(f, sum).expect("in field").key().expect("fits") as usize;
                grown[key] = true;
            }
        }
        rows.push(cand);
        extend_rows(f, vectors, rows, &mut grown, out, n);
        rows.pop();
    }
}

/// Elements fixing the non-zero vector `v`, found by filtering the full
/// enumeration.
pub fn stabilizer(params: &GroupParams, v: &VecF) -> Result<Family> {
    stabilizer_in(&enumerate_gl(params)?, v)
}

/// Stabilizer of `v` inside an already enumerated group.
pub fn stabilizer_in(group: &Family, v: &VecF) -> Result<Family> {
    let params = group.params();
    if v.len() != params.n {
        return Err(Error::ShapeMismatch(format!("vector of length {} for n = {}", v.len(), params.n)));
    }
    if *v.field() != params.field {
        return Err(Error::FieldMismatch);
    }
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let members = group
        .members
        .iter()
        .filter(|t| v.mul_mat(t).expect("shapes checked") == *v)
        .cloned()
        .collect();
    Ok(Family { params: params.clone(), members })
}

/// `|G_v| = q^(n(n-1)/2) prod_{i=1}^{n-1} (q^i - 1)`, the claimed size.
pub fn stabilizer_order(n: usize, q: u64) -> BigUint {
    let qb = BigUint::from(q);
    let power = qb.pow((n * (n - 1) / 2) as u32);
    (1..n).fold(power, |acc, i| acc * (qb.pow(i as u32) - 1u32))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// `{gT}` for `Side::Left`, `{Tg}` for `Side::Right`.
pub fn coset(family: &Family, g: &MatF, side: Side) -> Result<Family> {
    let params = family.params();
    match params.check_member(g) {
        Err(Error::NonGroupElement) => return Err(Error::SingularTranslate),
        other => other?,
    }
    let members = family
        .members
        .iter()
        .map(|t| match side {
            Side::Left => g.mul(t),
            Side::Right => t.mul(g),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Family::from_members_unchecked(params, members))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, q: u64) -> GroupParams {
        GroupParams::new(n, &Field::from_order(q).unwrap()).unwrap()
    }

    #[test]
    fn orders() {
        assert_eq!(gl_order(1, 7), BigUint::from(6u32));
        assert_eq!(gl_order(2, 2), BigUint::from(6u32));
        assert_eq!(gl_order(3, 2), BigUint::from(168u32));
        assert_eq!(gl_order(2, 3), BigUint::from(48u32));
    }

    #[test]
    fn enumeration_sizes() {
        let g = enumerate_gl(&params(1, 3)).unwrap();
        assert_eq!(g.members().iter().map(|m| m.values()).collect::<Vec<_>>(), vec![vec![1], vec![2]]);
        // independent count: filter all 16 matrices by det
        let f = Field::from_order(2).unwrap();
        let by_det = (0..16).filter(|&k| MatF::from_key(&f, 2, 2, k).unwrap().is_invertible()).count();
        assert_eq!(by_det, 6);
        assert_eq!(enumerate_gl(&params(2, 2)).unwrap().len(), 6);
        assert_eq!(enumerate_gl(&params(2, 3)).unwrap().len(), 48);
    }

    #[test]
    fn enumeration_matches_order_and_is_sorted() {
        for (n, q) in [(1, 2), (1, 5), (2, 2), (2, 3), (2, 4), (2, 5), (3, 2)] {
            let p = params(n, q);
            let g = enumerate_gl(&p).unwrap();
            assert_eq!(BigUint::from(g.len()), gl_order(n, q));
            assert!(g.members().windows(2).all(|w| w[0].key() < w[1].key()));
            assert!(g.members().iter().all(MatF::is_invertible));
        }
    }

    #[test]
    fn enumeration_respects_cap() {
        assert!(matches!(
            enumerate_gl_with_cap(&params(3, 2), 100),
            Err(Error::EnumerationTooLarge(_))
        ));
    }

    #[test]
    fn stabilizer_examples() {
        let p = params(1, 5);
        let v = VecF::from_values(p.field(), &[3]).unwrap();
        assert_eq!(stabilizer(&p, &v).unwrap().members(), &[p.identity()]);

        let p = params(2, 2);
        let v = VecF::from_values(p.field(), &[1, 0]).unwrap();
        let s = stabilizer(&p, &v).unwrap();
        let expected = Family::new(
            &p,
            vec![p.identity(), MatF::from_rows(p.field(), &[[1, 0], [1, 1]]).unwrap()],
        )
        .unwrap();
        assert_eq!(s, expected);

        let p = params(2, 3);
        let v = VecF::from_values(p.field(), &[1, 0]).unwrap();
        assert_eq!(stabilizer(&p, &v).unwrap().len(), 6);
        assert_eq!(stabilizer(&p, &VecF::zero(p.field(), 2)).unwrap_err(), Error::ZeroVector);
    }

    #[test]
    fn orbit_stabilizer() {
        for (n, q) in [(1, 3), (2, 2), (2, 3), (2, 4), (3, 2)] {
            let p = params(n, q);
            let g = enumerate_gl(&p).unwrap();
            for v in VecF::all(p.field(), n).filter(|v| !v.is_zero()) {
                let s = stabilizer_in(&g, &v).unwrap();
                assert_eq!(BigUint::from(s.len()), stabilizer_order(n, q));
                assert_eq!(BigUint::from(s.len()) * (q.pow(n as u32) - 1), gl_order(n, q));
            }
        }
    }

    #[test]
    fn stabilizer_is_a_subgroup() {
        for (n, q) in [(2, 2), (2, 3), (3, 2)] {
            let p = params(n, q);
            let v = VecF::unit(p.field(), n, 0);
            let s = stabilizer(&p, &v).unwrap();
            for a in s.members() {
                assert!(s.contains(&a.inverse().unwrap()));
                for b in s.members() {
                    assert!(s.contains(&a.mul(b).unwrap()));
                }
            }
        }
    }

    #[test]
    fn coset_examples() {
        let p = params(2, 2);
        let v = VecF::from_values(p.field(), &[1, 0]).unwrap();
        let s = stabilizer(&p, &v).unwrap();
        assert_eq!(coset(&s, &p.identity(), Side::Left).unwrap(), s);
        let swap = MatF::from_rows(p.field(), &[[0, 1], [1, 0]]).unwrap();
        let c = coset(&s, &swap, Side::Right).unwrap();
        let expected = Family::new(
            &p,
            vec![swap.clone(), MatF::from_rows(p.field(), &[[0, 1], [1, 1]]).unwrap()],
        )
        .unwrap();
        assert_eq!(c, expected);
        let singular = MatF::from_rows(p.field(), &[[1, 1], [1, 1]]).unwrap();
        assert_eq!(coset(&s, &singular, Side::Right).unwrap_err(), Error::SingularTranslate);
    }

    #[test]
    fn right_cosets_partition_the_group() {
        for q in [2, 3] {
            let p = params(2, q);
            let g = enumerate_gl(&p).unwrap();
            let s = stabilizer_in(&g, &VecF::unit(p.field(), 2, 0)).unwrap();
            let mut cosets: Vec<Family> = g
                .members()
                .iter()
                .map(|x| coset(&s, x, Side::Right).unwrap())
                .collect();
            cosets.sort_by(|a, b| a.members().cmp(b.members()));
            cosets.dedup();
            assert_eq!(cosets.len(), q.pow(2) as usize - 1);
            let mut union: Vec<MatF> = cosets.iter().flat_map(|c| c.members().to_vec()).collect();
            let total = union.len();
            union.sort();
            union.dedup();
            assert_eq!(union.len(), total, "cosets overlap");
            assert_eq!(union, g.members());
        }
    }

    #[test]
    fn family_record_round_trip() {
        let p = params(2, 3);
        let s = stabilizer(&p, &VecF::unit(p.field(), 2, 1)).unwrap();
        let rec = s.record();
        assert_eq!(rec.size, 6);
        assert!(rec.members.is_some());
        assert_eq!(Family::from_record(&rec, 256).unwrap(), s);
        let mut keys_only = rec.clone();
        keys_only.members = None;
        assert_eq!(Family::from_record(&keys_only, 256).unwrap(), s);
    }
}
