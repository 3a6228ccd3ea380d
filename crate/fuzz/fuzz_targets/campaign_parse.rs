#![no_main]

use ekrgl_cli::campaign::{parse_campaign, Overrides};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    match parse_campaign(text, &Overrides::default()) {
        Ok(campaign) => {
            assert!(!campaign.jobs.is_empty());
            for job in &campaign.jobs {
                // accepted jobs must pass the same validation the runner applies
                assert!(job.spec.validate(&campaign.caps).is_ok());
                assert!(job.spec.label().starts_with(job.spec.kind()));
            }
        }
        Err(errors) => assert!(!errors.is_empty()),
    }
});
