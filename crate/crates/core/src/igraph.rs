//! The graph on GL_n(F_q) joining intersecting pairs.
//!
//! `T` and `S` intersect when `aT = aS` for a non-zero row vector `a`,
//! which happens exactly when `T - S` is singular. Adjacency uses the
//! determinant; [`intersecting_by_scan`] keeps the literal definition as a
//! reference to check it against.

use std::sync::OnceLock;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clique::{self, AdjacencyOracle, BitGraph};
use crate::error::{Error, Result};
use crate::glgroup::{self, enumerate_gl, Family, GroupParams};
use crate::matfq::{MatF, MatrixRecord, VecF};

/// Default cap on vertices for exact search.
pub const DEFAULT_SEARCH_CAP: usize = 512;
/// Default cap on vertices when enumerating every maximum clique.
pub const DEFAULT_ALL_CLIQUES_CAP: usize = 64;
/// Adjacency is only materialized as a bitmap up to this many vertices.
pub const BITMAP_VERTEX_LIMIT: usize = 1 << 16;

fn check_pair(t: &MatF, s: &MatF) -> Result<()> {
    if t.field() != s.field() {
        return Err(Error::FieldMismatch);
    }
    if t.rows() != s.rows() || t.cols() != s.cols() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            t.rows(),
            t.cols(),
            s.rows(),
            s.cols()
        )));
    }
    if !t.is_invertible() || !s.is_invertible() {
        return Err(Error::NonGroupElement);
    }
    Ok(())
}

#[inline]
fn difference_singular(t: &MatF, s: &MatF) -> bool {
    !t.sub(s).expect("same shape").is_invertible()
}

/// Whether `T` and `S` agree on some non-zero vector. `T = S` counts.
pub fn intersecting(t: &MatF, s: &MatF) -> Result<bool> {
    check_pair(t, s)?;
    Ok(difference_singular(t, s))
}

/// The definition itself: scan every non-zero `a` for `aT = aS`.
pub fn intersecting_by_scan(t: &MatF, s: &MatF) -> Result<bool> {
    check_pair(t, s)?;
    Ok(VecF::all(t.field(), t.rows())
        .filter(|a| !a.is_zero())
        .any(|a| a.mul_mat(t).expect("shapes checked") == a.mul_mat(s).expect("shapes checked")))
}

/// A non-zero `a` with `aT = aS`, or `None`. The choice is the first row
/// of the reduced row echelon basis of the left kernel of `T - S`.
pub fn intersecting_witness(t: &MatF, s: &MatF) -> Result<Option<VecF>> {
    check_pair(t, s)?;
    let kernel = t.sub(s)?.left_kernel();
    Ok((kernel.dim() > 0).then(|| kernel.basis().row_vec(0)))
}

/// Every pair of members intersects.
pub fn is_clique(family: &Family) -> bool {
    let m = family.members();
    m.iter().enumerate().all(|(i, t)| m[i + 1..].iter().all(|s| difference_singular(t, s)))
}

/// Every pair of distinct members has an invertible difference.
pub fn is_coclique(family: &Family) -> bool {
    let m = family.members();
    m.iter().enumerate().all(|(i, t)| m[i + 1..].iter().all(|s| !difference_singular(t, s)))
}

/// Outcome of checking a clique against a coclique in a vertex-transitive
/// graph on `v` vertices: `|C||A| <= v`, with `|C ∩ A| = 1` at equality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub v: u64,
    pub clique_size: usize,
    pub coclique_size: usize,
    pub product: u64,
    pub clique_valid: bool,
    pub coclique_valid: bool,
    pub inequality_holds: bool,
    pub equality_case: bool,
    /// `|C ∩ A|`, computed when the product equals `v`.
    pub intersection_size: Option<usize>,
    pub equality_condition_met: Option<bool>,
    pub witnesses: AuditWitnesses,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditWitnesses {
    pub intersection: Vec<MatrixRecord>,
}

impl AuditReport {
    /// Both inputs verified and every applicable condition holds.
    pub fn valid(&self) -> bool {
        self.clique_valid
            && self.coclique_valid
            && self.inequality_holds
            && self.equality_condition_met.unwrap_or(true)
    }
}

pub fn clique_coclique_audit(c: &Family, a: &Family) -> Result<AuditReport> {
    if c.params() != a.params() {
        return Err(Error::FieldMismatch);
    }
    let p = c.params();
    let v: u64 = p
        .order()
        .try_into()
        .map_err(|_| Error::EnumerationTooLarge("group order exceeds 64 bits".into()))?;
    let product = (c.len() as u64) * (a.len() as u64);
    let equality_case = product == v;
    let common = if equality_case { c.intersection(a) } else { Vec::new() };
    let intersection_size = equality_case.then_some(common.len());
    Ok(AuditReport {
        v,
        clique_size: c.len(),
        coclique_size: a.len(),
        product,
        clique_valid: is_clique(c),
        coclique_valid: is_coclique(a),
        inequality_holds: product <= v,
        equality_case,
        intersection_size,
        equality_condition_met: intersection_size.map(|k| k == 1),
        witnesses: AuditWitnesses { intersection: common.iter().map(MatF::record).collect() },
    })
}

/// The graph Γ on all of GL_n(F_q).
pub struct IGraph {
    params: GroupParams,
    vertices: Family,
    bitmap: OnceLock<BitGraph>,
    search_cap: usize,
}

impl IGraph {
    pub fn new(params: &GroupParams) -> Result<IGraph> {
        Ok(IGraph {
            params: params.clone(),
            vertices: enumerate_gl(params)?,
            bitmap: OnceLock::new(),
            search_cap: DEFAULT_SEARCH_CAP,
        })
    }

    pub fn with_search_cap(mut self, cap: usize) -> IGraph {
        self.search_cap = cap;
        self
    }

    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn vertices(&self) -> &Family {
        &self.vertices
    }

    pub fn order(&self) -> BigUint {
        self.params.order()
    }

    pub fn identity_index(&self) -> usize {
        self.vertices.index_of(&self.params.identity()).expect("identity is a vertex")
    }

    /// Adjacency bitmap, built on first use.
    pub fn bitmap(&self) -> Result<&BitGraph> {
        let n = self.vertices.len();
        if n > BITMAP_VERTEX_LIMIT {
            return Err(Error::SearchTooLarge { vertices: n, cap: BITMAP_VERTEX_LIMIT });
        }
        Ok(self.bitmap.get_or_init(|| BitGraph::from_oracle(self)))
    }

    fn check_search(&self, cap: usize) -> Result<()> {
        let n = self.vertices.len();
        if n > cap {
            return Err(Error::SearchTooLarge { vertices: n, cap });
        }
        Ok(())
    }

    fn family_of(&self, indices: &[usize]) -> Family {
        let members = indices.iter().map(|&i| self.vertices.members()[i].clone()).collect();
        Family::from_members_unchecked(&self.params, members)
    }

    /// An exact maximum intersecting family. With `anchor_identity`, only
    /// families containing `I` are searched; right translation by an
    /// inverse moves any clique onto one containing `I`, so the size is
    /// still the global maximum.
    pub fn max_clique(&self, anchor_identity: bool) -> Result<Family> {
        self.check_search(self.search_cap)?;
        let anchor = anchor_identity.then(|| self.identity_index());
        Ok(self.family_of(&clique::max_clique(self.bitmap()?, anchor)))
    }

    /// An exact maximum coclique, as a maximum clique of the complement.
    pub fn max_coclique(&self) -> Result<Family> {
        self.check_search(self.search_cap)?;
        let complement = self.bitmap()?.complement();
        Ok(self.family_of(&clique::max_clique(&complement, None)))
    }

    /// Every maximum intersecting family.
    pub fn all_max_cliques(&self, cap: usize) -> Result<Vec<Family>> {
        self.check_search(cap)?;
        Ok(clique::all_max_cliques(self.bitmap()?).iter().map(|c| self.family_of(c)).collect())
    }

    /// Checks `T ~ S  <=>  Tg ~ Sg` on vertex triples.
    pub fn transitivity_check(&self, samples: Samples) -> bool {
        let m = self.vertices.members();
        let preserved = |t: &MatF, s: &MatF, g: &MatF| {
            let before = difference_singular(t, s);
            let after = difference_singular(&t.mul(g).expect("square"), &s.mul(g).expect("square"));
            before == after
        };
        match samples {
            Samples::All => m.iter().all(|t| m.iter().all(|s| m.iter().all(|g| preserved(t, s, g)))),
            Samples::Random { count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..count).all(|_| {
                    let t = &m[rng.gen_range(0..m.len())];
                    let s = &m[rng.gen_range(0..m.len())];
                    let g = &m[rng.gen_range(0..m.len())];
                    preserved(t, s, g)
                })
            }
        }
    }
}

impl AdjacencyOracle for IGraph {
    fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    fn adjacent(&self, i: usize, j: usize) -> bool {
        let m = self.vertices.members();
        difference_singular(&m[i], &m[j])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Samples {
    All,
    Random { count: usize, seed: u64 },
}

/// How a family sits relative to vector stabilizers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CosetShape {
    /// `{T : aT = b}`, a left or right coset of a row-vector stabilizer.
    RowVectorCoset,
    /// `{T : Tc = d}` for column vectors, the transposed shape.
    ColumnVectorCoset,
    Other,
}

/// Classifies a family against the two stabilizer-coset shapes.
pub fn coset_shape(family: &Family) -> CosetShape {
    let p = family.params();
    let n = p.n();
    if family.is_empty() {
        return CosetShape::Other;
    }
    let maps_a_to_same = |members: &[MatF], a: &VecF| {
        let image = a.mul_mat(&members[0]).expect("shapes agree");
        members.iter().all(|t| a.mul_mat(t).expect("shapes agree") == image)
    };
    let nonzero: Vec<VecF> = VecF::all(p.field(), n).filter(|v| !v.is_zero()).collect();
    let bound = glgroup::stabilizer_order(n, p.q());
    let full = BigUint::from(family.len()) == bound;
    if full && nonzero.iter().any(|a| maps_a_to_same(family.members(), a)) {
        return CosetShape::RowVectorCoset;
    }
    let transposed: Vec<MatF> = family.members().iter().map(MatF::transpose).collect();
    if full && nonzero.iter().any(|a| maps_a_to_same(&transposed, a)) {
        return CosetShape::ColumnVectorCoset;
    }
    CosetShape::Other
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfq::Field;
    use crate::glgroup::{coset, stabilizer, Side};

    fn params(n: usize, q: u64) -> GroupParams {
        GroupParams::new(n, &Field::from_order(q).unwrap()).unwrap()
    }

    fn m(p: &GroupParams, rows: &[[u32; 2]]) -> MatF {
        MatF::from_rows(p.field(), rows).unwrap()
    }

    #[test]
    fn intersecting_examples() {
        let p = params(2, 2);
        let i = p.identity();
        let swap = m(&p, &[[0, 1], [1, 0]]);
        let other = m(&p, &[[0, 1], [1, 1]]);
        assert!(intersecting(&i, &i).unwrap());
        assert!(intersecting(&i, &swap).unwrap());
        assert!(!intersecting(&i, &other).unwrap());
        assert!(!intersecting_by_scan(&i, &other).unwrap());
        assert_eq!(intersecting_witness(&i, &swap).unwrap().unwrap().values(), vec![1, 1]);
        assert_eq!(intersecting_witness(&i, &other).unwrap(), None);
        assert_eq!(intersecting_witness(&i, &i).unwrap().unwrap(), VecF::unit(p.field(), 2, 0));
    }

    #[test]
    fn intersecting_rejects_non_members() {
        let p = params(2, 2);
        let singular = m(&p, &[[1, 1], [1, 1]]);
        assert_eq!(intersecting(&p.identity(), &singular).unwrap_err(), Error::NonGroupElement);
        let q3 = params(2, 3);
        assert_eq!(intersecting(&p.identity(), &q3.identity()).unwrap_err(), Error::FieldMismatch);
    }

    #[test]
    fn clique_and_coclique_examples() {
        let p = params(2, 2);
        let single = Family::new(&p, vec![p.identity()]).unwrap();
        assert!(is_clique(&single) && is_coclique(&single));
        let stab = stabilizer(&p, &VecF::unit(p.field(), 2, 0)).unwrap();
        assert!(is_clique(&stab));
        let singer = Family::new(
            &p,
            vec![p.identity(), m(&p, &[[0, 1], [1, 1]]), m(&p, &[[1, 1], [1, 0]])],
        )
        .unwrap();
        assert!(is_coclique(&singer));
        assert!(!is_clique(&singer));
    }

    #[test]
    fn audit_on_gl2_f2() {
        let p = params(2, 2);
        let id = Family::new(&p, vec![p.identity()]).unwrap();
        let r = clique_coclique_audit(&id, &id).unwrap();
        assert_eq!((r.product, r.v), (1, 6));
        assert!(r.inequality_holds && !r.equality_case && r.valid());

        let stab = stabilizer(&p, &VecF::unit(p.field(), 2, 0)).unwrap();
        let singer = Family::new(
            &p,
            vec![p.identity(), m(&p, &[[0, 1], [1, 1]]), m(&p, &[[1, 1], [1, 0]])],
        )
        .unwrap();
        let r = clique_coclique_audit(&stab, &singer).unwrap();
        assert_eq!(r.product, 6);
        assert!(r.equality_case);
        assert_eq!(r.intersection_size, Some(1));
        assert_eq!(r.witnesses.intersection, vec![p.identity().record()]);
        assert!(r.valid());

        // a non-clique is reported, not raised
        let r = clique_coclique_audit(&singer, &singer).unwrap();
        assert!(!r.clique_valid && !r.valid());
    }

    #[test]
    fn max_search_small_cases() {
        for q in [2, 3, 5] {
            let g = IGraph::new(&params(1, q)).unwrap();
            assert_eq!(g.max_clique(false).unwrap().len(), 1);
            assert_eq!(g.max_coclique().unwrap().len(), q as usize - 1);
        }
        let g = IGraph::new(&params(2, 2)).unwrap();
        assert_eq!(g.max_clique(false).unwrap().len(), 2);
        assert_eq!(g.max_clique(true).unwrap().len(), 2);
        assert_eq!(g.max_coclique().unwrap().len(), 3);
        let g = IGraph::new(&params(2, 3)).unwrap();
        let c = g.max_clique(false).unwrap();
        assert_eq!(c.len(), 6);
        assert!(is_clique(&c));
        let a = g.max_coclique().unwrap();
        assert_eq!(a.len(), 8);
        assert!(is_coclique(&a));
        // unpruned oracle on both graphs
        let bm = g.bitmap().unwrap();
        assert_eq!(clique::exhaustive_max_clique(bm).len(), 6);
        assert_eq!(clique::exhaustive_max_clique(&bm.complement()).len(), 8);
    }

    #[test]
    fn search_cap_is_enforced() {
        let g = IGraph::new(&params(2, 3)).unwrap().with_search_cap(10);
        assert!(matches!(g.max_clique(false), Err(Error::SearchTooLarge { .. })));
    }

    #[test]
    fn bitmap_agrees_with_oracle() {
        let g = IGraph::new(&params(2, 3)).unwrap();
        let bm = g.bitmap().unwrap();
        let v = g.vertices().members();
        for i in 0..v.len() {
            assert!(!bm.adjacent(i, i));
            for j in 0..v.len() {
                if i != j {
                    assert_eq!(bm.adjacent(i, j), intersecting(&v[i], &v[j]).unwrap());
                }
            }
        }
    }

    #[test]
    fn transitivity() {
        let g = IGraph::new(&params(2, 2)).unwrap();
        assert!(g.transitivity_check(Samples::All));
        let g = IGraph::new(&params(2, 3)).unwrap();
        assert!(g.transitivity_check(Samples::Random { count: 10_000, seed: 7 }));
    }

    #[test]
    fn clique_property_survives_right_translation() {
        let p = params(2, 3);
        let g = IGraph::new(&p).unwrap();
        let stab = stabilizer(&p, &VecF::unit(p.field(), 2, 0)).unwrap();
        let a = g.max_coclique().unwrap();
        for x in g.vertices().members().iter().step_by(5) {
            assert!(is_clique(&coset(&stab, x, Side::Right).unwrap()));
            assert!(is_coclique(&coset(&a, x, Side::Right).unwrap()));
        }
    }

    #[test]
    fn coset_shapes() {
        let p = params(2, 3);
        let stab = stabilizer(&p, &VecF::unit(p.field(), 2, 0)).unwrap();
        assert_eq!(coset_shape(&stab), CosetShape::RowVectorCoset);
        let transposed =
            Family::new(&p, stab.members().iter().map(MatF::transpose).collect()).unwrap();
        assert_eq!(coset_shape(&transposed), CosetShape::ColumnVectorCoset);
        let single = Family::new(&p, vec![p.identity()]).unwrap();
        assert_eq!(coset_shape(&single), CosetShape::Other);
    }
}
