use std::collections::HashMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("failed to read vector file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed vector file line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("vector file is empty")]
    Empty,
    #[error("embedding service error: {0}")]
    Service(String),
    #[error("provider returned a vector of dimension {got}, expected {expected}")]
    Dimension { got: usize, expected: usize },
}

/// Maps a phrase to a unit vector (or the zero vector when every word is
/// out of vocabulary).
pub trait EmbeddingProvider: Send + Sync {
    fn dimension(&self) -> usize;

    fn embed(&self, phrase: &str) -> Result<Vec<f64>, EmbeddingError>;

    fn embed_batch(&self, phrases: &[String]) -> Result<Vec<Vec<f64>>, EmbeddingError> {
        phrases.iter().map(|p| self.embed(p)).collect()
    }
}

/// Mean-pooled word vectors from a `word f1 .. fd` text file.
#[derive(Debug)]
pub struct WordVectorProvider {
    vectors: HashMap<String, Vec<f64>>,
    dimension: usize,
}

impl WordVectorProvider {
    pub fn from_content(content: &str) -> Result<Self, EmbeddingError> {
        let mut vectors = HashMap::new();
        let mut dimension = None;
        for (idx, line) in content.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(' ');
            let word = parts.next().unwrap_or("").to_string();
            let values: Result<Vec<f64>, _> = parts.map(str::parse).collect();
            let values = values.map_err(|e| EmbeddingError::Malformed {
                line: idx + 1,
                reason: e.to_string(),
            })?;
            if values.is_empty() {
                return Err(EmbeddingError::Malformed {
                    line: idx + 1,
                    reason: "no vector components".into(),
                });
            }
            match dimension {
                None => dimension = Some(values.len()),
                Some(d) if d != values.len() => {
                    return Err(EmbeddingError::Malformed {
                        line: idx + 1,
                        reason: format!("dimension {} != {}", values.len(), d),
                    })
                }
                _ => {}
            }
            vectors.insert(word, values);
        }
        let dimension = dimension.ok_or(EmbeddingError::Empty)?;
        Ok(WordVectorProvider { vectors, dimension })
    }

    pub fn from_path(path: &Path) -> Result<Self, EmbeddingError> {
        let content = fs::read_to_string(path).map_err(|source| EmbeddingError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_content(&content)
    }

    /// The compiled-in default vectors.
    pub fn bundled() -> Self {
        Self::from_content(super::bundled::VECTORS).expect("bundled vectors are valid")
    }
}

impl EmbeddingProvider for WordVectorProvider {
    fn dimension(&self) -> usize {
        self.dimension
    }

    /// Mean of in-vocabulary word vectors, L2-normalized; all-OOV phrases
    /// embed to the zero vector so unknown text earns no similarity.
    fn embed(&self, phrase: &str) -> Result<Vec<f64>, EmbeddingError> {
        let mut acc = vec![0.0; self.dimension];
        let mut hits = 0usize;
        for word in phrase.split_whitespace() {
            if let Some(v) = self.vectors.get(word) {
                for (a, x) in acc.iter_mut().zip(v) {
                    *a += x;
                }
                hits += 1;
            }
        }
        if hits == 0 {
            return Ok(acc);
        }
        for a in &mut acc {
            *a /= hits as f64;
        }
        let norm = acc.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            for a in &mut acc {
                *a /= norm;
            }
        }
        Ok(acc)
    }
}

/// Client for an external embedding service speaking
/// `POST {"phrases": [..]} -> {"vectors": [[..]]}`.
#[cfg(feature = "http-embeddings")]
pub struct HttpEmbeddingProvider {
    endpoint: String,
    dimension: usize,
    timeout: std::time::Duration,
}

#[cfg(feature = "http-embeddings")]
impl HttpEmbeddingProvider {
    pub fn new(endpoint: impl Into<String>, dimension: usize, timeout_secs: u64) -> Self {
        HttpEmbeddingProvider {
            endpoint: endpoint.into(),
            dimension,
            timeout: std::time::Duration::from_secs(timeout_secs),
        }
    }
}

#[cfg(feature = "http-embeddings")]
impl EmbeddingProvider for HttpEmbeddingProvider {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed(&self, phrase: &str) -> Result<Vec<f64>, EmbeddingError> {
        let mut vectors = self.embed_batch(&[phrase.to_string()])?;
        Ok(vectors.pop().unwrap_or_default())
    }

    fn embed_batch(&self, phrases: &[String]) -> Result<Vec<Vec<f64>>, EmbeddingError> {
        #[derive(serde::Serialize)]
        struct Request<'a> {
            phrases: &'a [String],
        }
        #[derive(serde::Deserialize)]
        struct Response {
            vectors: Vec<Vec<f64>>,
        }
        if phrases.is_empty() {
            return Ok(Vec::new());
        }
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(self.timeout))
            .build()
            .into();
        let response: Response = agent
            .post(&self.endpoint)
            .send_json(Request { phrases })
            .map_err(|e| EmbeddingError::Service(e.to_string()))?
            .body_mut()
            .read_json()
            .map_err(|e| EmbeddingError::Service(e.to_string()))?;
        if response.vectors.len() != phrases.len() {
            return Err(EmbeddingError::Service(format!(
                "{} vectors for {} phrases",
                response.vectors.len(),
                phrases.len()
            )));
        }
        for v in &response.vectors {
            if v.len() != self.dimension {
                return Err(EmbeddingError::Dimension {
                    got: v.len(),
                    expected: self.dimension,
                });
            }
        }
        Ok(response.vectors)
    }
}

pub(crate) fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const TOY: &str = include_str!("../../tests/fixtures/toy_vectors_4d.txt");

    fn toy() -> WordVectorProvider {
        WordVectorProvider::from_content(TOY).unwrap()
    }

    #[test]
    fn single_word_is_normalized_vector_of_that_word() {
        let p = toy();
        let v = p.embed("wooden").unwrap();
        let s = 1.0 / 2.0f64.sqrt();
        assert_abs_diff_eq!(v[0], s, epsilon = 1e-12);
        assert_abs_diff_eq!(v[1], s, epsilon = 1e-12);
        assert_abs_diff_eq!(v[2], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn self_similarity_is_one() {
        let p = toy();
        let a = p.embed("wooden bench").unwrap();
        let b = p.embed("wooden bench").unwrap();
        assert_abs_diff_eq!(cosine(&a, &b), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mean_pool_cosine_matches_hand_arithmetic() {
        // wooden=(1,1,0,0), bench=(0,0,1,1), metal=(1,0,1,0); "pipe" is OOV.
        // mean(wooden,bench) normalized = (.5,.5,.5,.5); metal normalized =
        // (1,0,1,0)/sqrt(2); cosine = 1/sqrt(2).
        let p = toy();
        let a = p.embed("wooden bench").unwrap();
        let b = p.embed("metal pipe").unwrap();
        assert_abs_diff_eq!(cosine(&a, &b), 1.0 / 2.0f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn all_oov_embeds_to_zero() {
        let p = toy();
        let v = p.embed("quantum flux").unwrap();
        assert!(v.iter().all(|x| *x == 0.0));
        assert_eq!(v.len(), 4);
    }

    #[test]
    fn norm_is_zero_or_one() {
        let p = WordVectorProvider::bundled();
        for phrase in ["red car", "tall tree", "xyzzy", "dog perch on bench"] {
            let v = p.embed(phrase).unwrap();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!(
                norm.abs() < 1e-9 || (norm - 1.0).abs() < 1e-9,
                "phrase {phrase:?} norm {norm}"
            );
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let err = WordVectorProvider::from_content("a 1 2\nb 1 2 3\n").unwrap_err();
        assert!(matches!(err, EmbeddingError::Malformed { line: 2, .. }));
    }

    #[test]
    fn empty_file_rejected() {
        assert!(matches!(
            WordVectorProvider::from_content(""),
            Err(EmbeddingError::Empty)
        ));
    }
}
