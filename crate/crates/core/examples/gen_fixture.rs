//! Regenerates `data/fixture.csv`:
//!
//! ```text
//! cargo run -p rcf-core --example gen_fixture > data/fixture.csv
//! ```

use rcf_core::fixture::{fixture_csv, FIXTURE_SEED};

fn main() {
    print!("{}", fixture_csv(FIXTURE_SEED));
}
