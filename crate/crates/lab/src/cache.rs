//! On-disk cache of expensive extremizer data in the core binary container.

use std::path::{Path, PathBuf};

use semiperiodic_core::container::{decode, domain_fingerprint, encode_tensor, Payload};
use semiperiodic_core::{DomainSpec, TensorSpectrum};

use crate::error::LabError;

#[derive(Debug, Clone)]
pub struct FieldCache {
    dir: PathBuf,
}

impl FieldCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self, LabError> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// File for `(m, n, h, eps0, domain)`.
    pub fn path_for(&self, label: &str, domain: &DomainSpec, h: f64, eps0: f64) -> PathBuf {
        let name = format!(
            "{label}-m{}-n{}-h{:016x}-e{:016x}-{:016x}.bin",
            domain.m,
            domain.n,
            h.to_bits(),
            eps0.to_bits(),
            domain_fingerprint(domain)
        );
        self.dir.join(name)
    }

    /// Cached tensor for the key, or `None` when absent or unreadable.
    pub fn load(&self, path: &Path, domain: &DomainSpec) -> Option<TensorSpectrum> {
        let bytes = std::fs::read(path).ok()?;
        match decode(&bytes).ok()? {
            Payload::Tensor(t) if domain_fingerprint(&t.domain) == domain_fingerprint(domain) => {
                // Restore the caller's time plan; it is not stored.
                Some(TensorSpectrum { domain: domain.clone(), factors: t.factors })
            }
            _ => None,
        }
    }

    pub fn store(&self, path: &Path, data: &TensorSpectrum) -> Result<(), LabError> {
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, encode_tensor(data))?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn get_or_insert<F>(&self, label: &str, domain: &DomainSpec, h: f64, eps0: f64, build: F) -> Result<TensorSpectrum, LabError>
    where
        F: FnOnce() -> Result<TensorSpectrum, LabError>,
    {
        let path = self.path_for(label, domain, h, eps0);
        if let Some(t) = self.load(&path, domain) {
            return Ok(t);
        }
        let t = build()?;
        self.store(&path, &t)?;
        Ok(t)
    }
}
