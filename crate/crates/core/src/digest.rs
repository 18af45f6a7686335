//! Stable digests of domain values, used to bind certificates to the inputs
//! they were built from.

use sha2::{Digest, Sha256};

/// SHA-256 over the canonical parts, joined with a unit separator so field
/// boundaries cannot collide.
pub fn hex_digest<I, S>(parts: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update(part.as_ref().as_bytes());
        hasher.update([0x1f]);
    }
    let bytes = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in bytes {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_boundaries_matter() {
        assert_ne!(hex_digest(["ab", "c"]), hex_digest(["a", "bc"]));
        assert_eq!(hex_digest(["a", "b"]), hex_digest(["a", "b"]));
    }
}
