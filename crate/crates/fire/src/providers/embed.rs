//! Deterministic text embedding for the similarity guard.

use super::{ProviderError, TextEmbedder};

/// Dimension of the hashed character-trigram space.
pub const EMBEDDING_DIM: usize = 256;

/// A unit-L2-norm vector of fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector {
    values: Vec<f32>,
}

impl EmbeddingVector {
    /// Normalize `values` to unit L2 norm. Returns `None` for the zero vector.
    pub fn unit_from(values: Vec<f32>) -> Option<EmbeddingVector> {
        let norm = values.iter().map(|v| v * v).sum::<f32>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return None;
        }
        Some(EmbeddingVector { values: values.into_iter().map(|v| v / norm).collect() })
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }
}

/// Cosine similarity of two unit vectors: their dot product.
pub fn cosine(a: &EmbeddingVector, b: &EmbeddingVector) -> f32 {
    assert_eq!(a.values.len(), b.values.len(), "embedding dimension mismatch");
    a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum()
}

/// Hashed character-trigram embedder.
///
/// Counts character trigrams into [`EMBEDDING_DIM`] buckets via FNV-1a and
/// L2-normalizes. Identical bytes give identical vectors on every platform,
/// which keeps guard decisions replayable.
#[derive(Debug, Default, Clone, Copy)]
pub struct TrigramEmbedder;

impl TextEmbedder for TrigramEmbedder {
    fn embed(&self, text: &str) -> Result<EmbeddingVector, ProviderError> {
        if text.is_empty() {
            return Err(ProviderError::EmptyText);
        }
        let mut counts = vec![0.0f32; EMBEDDING_DIM];
        let chars: Vec<char> = text.chars().collect();
        if chars.len() < 3 {
            counts[bucket_of(text)] += 1.0;
        } else {
            let mut gram = String::with_capacity(12);
            for window in chars.windows(3) {
                gram.clear();
                gram.extend(window);
                counts[bucket_of(&gram)] += 1.0;
            }
        }
        Ok(EmbeddingVector::unit_from(counts).expect("non-empty text has a non-zero count"))
    }
}

fn bucket_of(gram: &str) -> usize {
    (fnv1a64(gram.as_bytes()) % EMBEDDING_DIM as u64) as usize
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_text_has_cosine_one() {
        let e = TrigramEmbedder;
        let a = e.embed("When was the Eiffel Tower built").unwrap();
        let b = e.embed("When was the Eiffel Tower built").unwrap();
        assert!((cosine(&a, &b) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn disjoint_trigrams_are_orthogonal() {
        let e = TrigramEmbedder;
        let a = e.embed("aaaa").unwrap();
        let b = e.embed("zzzz").unwrap();
        assert_eq!(cosine(&a, &b), 0.0);
    }

    #[test]
    fn cosine_is_symmetric() {
        let e = TrigramEmbedder;
        let a = e.embed("capital of France").unwrap();
        let b = e.embed("capital city of France").unwrap();
        assert_eq!(cosine(&a, &b), cosine(&b, &a));
    }

    #[test]
    fn vectors_are_unit_norm() {
        let e = TrigramEmbedder;
        for text in ["x", "ab", "abc", "a longer sentence with several words"] {
            let v = e.embed(text).unwrap();
            let norm: f32 = v.values().iter().map(|x| x * x).sum::<f32>().sqrt();
            assert!((norm - 1.0).abs() < 1e-6, "norm {norm} for {text:?}");
        }
    }

    #[test]
    fn empty_text_is_rejected() {
        assert!(matches!(TrigramEmbedder.embed(""), Err(ProviderError::EmptyText)));
    }

    #[test]
    fn embedding_is_frozen_across_builds() {
        // Frozen bucket assignments; any change to the hash or bucket layout
        // breaks stored-trace replays and must show up here.
        assert_eq!(bucket_of("abc"), 75);
        assert_eq!(bucket_of("bcd"), 98);
        assert_eq!(bucket_of("cde"), 101);
        assert_eq!(bucket_of("aaa"), 162);
        assert_eq!(bucket_of("zzz"), 157);

        // "abcde" has trigrams abc, bcd, cde: three distinct buckets at
        // weight 1/sqrt(3) each.
        let v = TrigramEmbedder.embed("abcde").unwrap();
        let hot: Vec<usize> =
            v.values().iter().enumerate().filter(|(_, x)| **x > 0.0).map(|(i, _)| i).collect();
        assert_eq!(hot, vec![75, 98, 101]);
        let weight = 1.0 / 3.0f32.sqrt();
        for bucket in hot {
            assert!((v.values()[bucket] - weight).abs() < 1e-6);
        }
    }
}
