use std::path::Path;

use anyhow::{Context, Result};
use rcf_core::{load_dataset, Format, LoadedDataset};
use sha2::{Digest, Sha256};

/// The synthetic dataset shipped with the repository.
pub const BUNDLED_FIXTURE: &str = include_str!("../../../data/fixture.csv");

pub struct Dataset {
    pub source: String,
    pub digest: String,
    pub loaded: LoadedDataset,
    pub proxies_excluded: usize,
}

impl Dataset {
    pub fn proxy_count(&self) -> usize {
        self.loaded
            .records
            .iter()
            .filter(|r| r.cost_is_proxy)
            .count()
    }

    pub fn dropped_rows(&self) -> usize {
        self.loaded.dropped_rows()
    }
}

pub fn load(path: Option<&Path>, exclude_proxies: bool) -> Result<Dataset> {
    let (source, bytes, format) = match path {
        Some(p) => {
            let bytes = std::fs::read(p).with_context(|| format!("cannot read {}", p.display()))?;
            (p.display().to_string(), bytes, Format::from_path(p))
        }
        None => (
            "<bundled fixture>".to_string(),
            BUNDLED_FIXTURE.as_bytes().to_vec(),
            Format::Csv,
        ),
    };
    let digest = Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect::<String>();
    let mut loaded =
        load_dataset(bytes.as_slice(), format).with_context(|| format!("cannot load {source}"))?;
    let before = loaded.records.len();
    if exclude_proxies {
        loaded.records.retain(|r| !r.cost_is_proxy);
    }
    Ok(Dataset {
        source,
        digest,
        proxies_excluded: before - loaded.records.len(),
        loaded,
    })
}
