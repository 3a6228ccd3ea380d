//! Decodes arbitrary bytes as a certificate and re-checks whatever parses.
//!
//! ```not_rust
//! cargo +nightly fuzz run certificate_decode
//! ```

#![no_main]

use ekrgl::certificate::Certificate;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cert) = Certificate::from_json(text) else { return };
    let again = Certificate::from_json(&cert.to_json()).expect("re-encoded certificate decodes");
    assert_eq!(again, cert);
    assert_eq!(again.content_hash(), cert.content_hash());
    let _ = cert.recheck();
});
