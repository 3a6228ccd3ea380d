#![no_main]

use ekrgl::symbase::Perm;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(images) = text.split(',').map(|s| s.trim().parse::<usize>()).collect::<Result<Vec<_>, _>>() else {
        return;
    };
    if let Ok(p) = Perm::from_one_based(&images) {
        assert_eq!(p.one_based(), images);
        assert_eq!(p.compose(&p.inverse()).unwrap(), Perm::identity(p.degree()));
    }
});
