//! Seeded 128-bit hashing shared by every fingerprinting routine.
//!
//! All digests are SHA-256 over a fixed library seed followed by the
//! caller's words, truncated to 16 bytes. Colors are the first 8 bytes of
//! a digest. Collisions are treated as negligible; every test built on
//! these digests is one-sided, so a collision can only hide a difference.

use sha2::{Digest as _, Sha256};

const LIBRARY_SEED: &[u8; 16] = b"gnnak-subgraphwl";

pub type Digest128 = [u8; 16];

/// Incremental hasher over little-endian 64-bit words.
#[derive(Clone)]
pub struct WordHasher {
    inner: Sha256,
}

impl WordHasher {
    pub fn new(domain: u64) -> Self {
        let mut inner = Sha256::new();
        inner.update(LIBRARY_SEED);
        inner.update(domain.to_le_bytes());
        WordHasher { inner }
    }

    pub fn word(&mut self, w: u64) -> &mut Self {
        self.inner.update(w.to_le_bytes());
        self
    }

    pub fn words(&mut self, ws: &[u64]) -> &mut Self {
        for &w in ws {
            self.inner.update(w.to_le_bytes());
        }
        self
    }

    pub fn bytes(&mut self, b: &[u8]) -> &mut Self {
        self.inner.update((b.len() as u64).to_le_bytes());
        self.inner.update(b);
        self
    }

    pub fn finish128(&self) -> Digest128 {
        let full = self.inner.clone().finalize();
        let mut out = [0u8; 16];
        out.copy_from_slice(&full[..16]);
        out
    }

    pub fn finish64(&self) -> u64 {
        digest_to_u64(&self.finish128())
    }
}

pub fn digest_to_u64(d: &Digest128) -> u64 {
    u64::from_le_bytes(d[..8].try_into().expect("8 bytes"))
}

pub fn to_hex(d: &Digest128) -> String {
    d.iter().map(|b| format!("{b:02x}")).collect()
}

// Domain tags keep digests of different kinds apart.
pub(crate) const DOMAIN_LABEL: u64 = 1;
pub(crate) const DOMAIN_WL_ROUND: u64 = 2;
pub(crate) const DOMAIN_FINGERPRINT: u64 = 3;
pub(crate) const DOMAIN_CANON: u64 = 4;
pub(crate) const DOMAIN_ROOT_MARK: u64 = 5;
