//! Shared text primitives: whitespace normalization, word splitting,
//! case folding, and the FNV-1a hashes used for feature indexing and
//! content deduplication.
//!
//! A word is a maximal run of non-whitespace after normalization.

/// Collapse runs of whitespace to single spaces and trim the ends.
pub fn normalize_ws(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for word in s.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Case-fold for matching. Full Unicode lowercasing.
pub fn fold(s: &str) -> String {
    s.to_lowercase()
}

/// Words of `s`: maximal runs of non-whitespace.
pub fn words(s: &str) -> impl Iterator<Item = &str> {
    s.split_whitespace()
}

pub fn word_count(s: &str) -> usize {
    words(s).count()
}

/// FNV-1a, 64-bit. Used to index hashed n-gram features.
pub fn fnv1a_64(bytes: &[u8]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut hash = OFFSET;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(PRIME);
    }
    hash
}

/// FNV-1a, 128-bit. Used as the dedup content hash.
pub fn fnv1a_128(bytes: &[u8]) -> u128 {
    const OFFSET: u128 = 0x6c62_272e_07bb_0142_62b8_2175_6295_c58d;
    const PRIME: u128 = 0x0000_0000_0100_0000_0000_0000_0000_013b;
    let mut hash = OFFSET;
    for &b in bytes {
        hash ^= u128::from(b);
        hash = hash.wrapping_mul(PRIME);
    }
    hash
}

/// Content key for deduplication: 128-bit hash of the case-folded,
/// whitespace-collapsed text.
pub fn dedup_key(text: &str) -> u128 {
    fnv1a_128(fold(&normalize_ws(text)).as_bytes())
}

/// Deterministic 64-bit child seed for a named pipeline stage or group.
pub fn derive_seed(seed: u64, scope: &str) -> u64 {
    let mut buf = Vec::with_capacity(8 + scope.len());
    buf.extend_from_slice(&seed.to_le_bytes());
    buf.extend_from_slice(scope.as_bytes());
    fnv1a_64(&buf)
}

/// Lowercase hex SHA-256, used to fingerprint configs and artifacts.
pub fn sha256_hex(bytes: &[u8]) -> String {
    use std::fmt::Write as _;

    use sha2::{Digest, Sha256};

    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        write!(out, "{b:02x}").expect("writing to a String");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_collapses_and_trims() {
        assert_eq!(normalize_ws("  a\t\nb   c  "), "a b c");
        assert_eq!(normalize_ws(""), "");
        assert_eq!(normalize_ws("   "), "");
    }

    #[test]
    fn word_count_is_whitespace_runs() {
        assert_eq!(word_count("one two\tthree\nfour"), 4);
        assert_eq!(word_count(""), 0);
        assert_eq!(word_count("don't+parse,this"), 1);
    }

    #[test]
    fn fnv64_known_vectors() {
        // Published FNV-1a test vectors.
        assert_eq!(fnv1a_64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a_64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a_64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn fnv128_distinguishes_and_is_stable() {
        assert_eq!(fnv1a_128(b""), 0x6c62272e07bb014262b821756295c58d);
        assert_ne!(fnv1a_128(b"abc"), fnv1a_128(b"abd"));
        assert_eq!(fnv1a_128(b"abc"), fnv1a_128(b"abc"));
    }

    #[test]
    fn dedup_key_folds_case_and_whitespace() {
        assert_eq!(dedup_key("Hello  World"), dedup_key("hello world"));
        assert_ne!(dedup_key("hello world"), dedup_key("hello worlds"));
    }

    #[test]
    fn derived_seeds_differ_by_scope() {
        assert_ne!(derive_seed(7, "a"), derive_seed(7, "b"));
        assert_eq!(derive_seed(7, "a"), derive_seed(7, "a"));
    }

    #[test]
    fn sha256_known_vectors() {
        // FIPS 180-2 examples.
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
