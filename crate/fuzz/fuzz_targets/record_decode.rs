#![no_main]

use ekrgl::gfq::{FieldRecord, DEFAULT_MAX_ORDER};
use ekrgl::glgroup::FamilyRecord;
use ekrgl::matfq::MatrixRecord;
use ekrgl::spread::SpreadRecord;
use ekrgl::{Family, Field, MatF};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(r) = serde_json::from_slice::<FieldRecord>(data) {
        if let Ok(f) = Field::from_record(&r, DEFAULT_MAX_ORDER) {
            assert_eq!(f.record(), r);
        }
    }
    if let Ok(r) = serde_json::from_slice::<MatrixRecord>(data) {
        let f = Field::from_order(3).expect("GF(3)");
        if let Ok(m) = MatF::from_record(&f, &r) {
            assert_eq!(m.record().entries, r.entries);
        }
    }
    if let Ok(r) = serde_json::from_slice::<FamilyRecord>(data) {
        if r.params.n <= 8 {
            if let Ok(fam) = Family::from_record(&r, DEFAULT_MAX_ORDER) {
                assert_eq!(fam.len(), r.size);
                assert_eq!(Family::from_record(&fam.record(), DEFAULT_MAX_ORDER).ok(), Some(fam));
            }
        }
    }
    if let Ok(r) = serde_json::from_slice::<SpreadRecord>(data) {
        if let Ok(f) = Field::from_record(&r.field, DEFAULT_MAX_ORDER) {
            for m in &r.members {
                let _ = MatF::from_record(&f, m).map(|b| b.rref());
            }
        }
    }
});
