//! Cross-checks against the OEIS b-file format.
//!
//! Every sequence the library constructs (generalized Beatty blocks, row 2
//! of the mex matrix, the built-in permutations) exists in the OEIS.  A
//! manifest maps each catalogued entry to a generator plus a small
//! alignment transform, and the checker compares term by term.  The
//! comparison is positional: b-file indices establish order only, since
//! offsets differ across entries.
//!
//! B-files resolve from three places, in order: a table embedded in the
//! binary, a local cache directory, and (only when built with the `fetch`
//! feature and explicitly asked) the network.

use crate::gbs::{GbsBlock, GbsError};
use crate::mex::MexMatrix;
use crate::perm::{builtin, PermError};
use crate::wythoff::ArithError;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OeisError {
    #[error("malformed sequence id {0:?}")]
    BadId(String),
    #[error("b-file line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("no b-file for {id} ({detail})")]
    NotFound { id: String, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Gbs(#[from] GbsError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("no built-in permutation named {0:?}")]
    UnknownPerm(String),
    #[error("manifest: {0}")]
    Manifest(String),
    #[cfg(feature = "fetch")]
    #[error("fetch of {id} failed: {reason}")]
    Fetch { id: String, reason: String },
}

/// Parses b-file text: one `index value` pair per line, `#` comments and
/// blank lines ignored.
pub fn parse_bfile(text: &str) -> Result<Vec<(i64, i64)>, OeisError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(idx), Some(val), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(OeisError::Parse {
                line: lineno + 1,
                reason: format!("expected two fields, got {raw:?}"),
            });
        };
        let idx: i64 = idx.parse().map_err(|e| OeisError::Parse {
            line: lineno + 1,
            reason: format!("bad index: {e}"),
        })?;
        let val: i64 = val.parse().map_err(|e| OeisError::Parse {
            line: lineno + 1,
            reason: format!("bad value: {e}"),
        })?;
        if let Some(&(prev, _)) = out.last() {
            if idx != prev + 1 {
                return Err(OeisError::Parse {
                    line: lineno + 1,
                    reason: format!("index {idx} does not follow {prev}"),
                });
            }
        }
        out.push((idx, val));
    }
    Ok(out)
}

fn bfile_name(id: &str) -> Result<String, OeisError> {
    let digits = id.strip_prefix('A').unwrap_or("");
    if digits.len() != 6 || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(OeisError::BadId(id.to_string()));
    }
    Ok(format!("b{digits}.txt"))
}

macro_rules! bfile_table {
    ($($id:literal),+ $(,)?) => {
        &[$(($id, include_str!(concat!("../fixtures/oeis/b", $id, ".txt")))),+]
    };
}

/// Embedded b-files, keyed by the six digits of the sequence id.
const BUILTIN_BFILES: &[(&str, &str)] = bfile_table![
    "000201", "001950", "002251", "003622", "003623", "004956", "019444",
    "022342", "022413", "026273", "026351", "035336", "035337", "035338",
    "047924", "058065", "089910", "099267", "101345", "101642", "101864",
    "134859", "134860", "134861", "134862", "134863", "184732", "188012",
    "190460",
];

/// Where a b-file may come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FetchPolicy {
    /// Embedded table and local cache only.
    #[default]
    OfflineOnly,
    /// Allow a network download into the cache directory as a last resort.
    /// Without the `fetch` build feature this behaves like `OfflineOnly`.
    FetchIfMissing,
}

/// Resolves sequence ids to term lists.
#[derive(Debug, Clone, Default)]
pub struct BfileCache {
    dir: Option<PathBuf>,
    policy: FetchPolicy,
}

impl BfileCache {
    /// Embedded table only.
    pub fn builtin_only() -> Self {
        BfileCache::default()
    }

    /// Also consult `dir` for `bNNNNNN.txt` files.
    pub fn with_dir(dir: PathBuf) -> Self {
        BfileCache {
            dir: Some(dir),
            policy: FetchPolicy::OfflineOnly,
        }
    }

    pub fn policy(mut self, policy: FetchPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn get(&self, id: &str) -> Result<Vec<(i64, i64)>, OeisError> {
        let name = bfile_name(id)?;
        let digits = &name[1..7];
        if let Some(&(_, text)) = BUILTIN_BFILES.iter().find(|&&(d, _)| d == digits) {
            return parse_bfile(text);
        }
        if let Some(dir) = &self.dir {
            let path = dir.join(&name);
            if path.exists() {
                return parse_bfile(&std::fs::read_to_string(path)?);
            }
        }
        if self.policy == FetchPolicy::FetchIfMissing {
            #[cfg(feature = "fetch")]
            return self.fetch(id, &name);
            #[cfg(not(feature = "fetch"))]
            return Err(OeisError::NotFound {
                id: id.to_string(),
                detail: "not embedded, not cached; built without network support".into(),
            });
        }
        Err(OeisError::NotFound {
            id: id.to_string(),
            detail: "not embedded and not in the cache directory".into(),
        })
    }

    #[cfg(feature = "fetch")]
    fn fetch(&self, id: &str, name: &str) -> Result<Vec<(i64, i64)>, OeisError> {
        let Some(dir) = &self.dir else {
            return Err(OeisError::NotFound {
                id: id.to_string(),
                detail: "fetching needs a cache directory to write into".into(),
            });
        };
        let url = format!("https://oeis.org/{id}/{name}");
        let fail = |reason: String| OeisError::Fetch {
            id: id.to_string(),
            reason,
        };
        let resp = reqwest::blocking::get(&url).map_err(|e| fail(e.to_string()))?;
        if !resp.status().is_success() {
            return Err(fail(format!("{url} returned {}", resp.status())));
        }
        let text = resp.text().map_err(|e| fail(e.to_string()))?;
        let terms = parse_bfile(&text)?;
        std::fs::create_dir_all(dir)?;
        let tmp = dir.join(format!(".{name}.tmp"));
        std::fs::write(&tmp, &text)?;
        std::fs::rename(&tmp, dir.join(name))?;
        Ok(terms)
    }
}

/// How to produce the raw terms of a catalogued sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// `F(i+1) a(n) + F(i) n - j` for `n = 1, 2, ...`
    Gbs { i: u32, j: i64 },
    /// Row 2 of the mex matrix from column 0.
    MexRow2,
    /// A built-in permutation applied to `1, 2, ...`
    Perm { name: String },
}

impl Generator {
    pub fn terms(&self, count: usize) -> Result<Vec<i64>, OeisError> {
        match self {
            Generator::Gbs { i, j } => {
                let block = GbsBlock::new(*i, *j);
                (1..=count as i128)
                    .map(|n| {
                        let v = block.eval(n).map_err(OeisError::from)?;
                        i64::try_from(v).map_err(|_| {
                            OeisError::Arith(ArithError::Overflow("sequence term exceeds 64 bits"))
                        })
                    })
                    .collect()
            }
            Generator::MexRow2 => {
                let m = MexMatrix::generate(3, count);
                Ok(m.row(2).to_vec())
            }
            Generator::Perm { name } => {
                let p = builtin(name).ok_or_else(|| OeisError::UnknownPerm(name.clone()))?;
                (1..=count as i128)
                    .map(|n| {
                        let v = p.eval(n).map_err(OeisError::from)?;
                        i64::try_from(v).map_err(|_| {
                            OeisError::Arith(ArithError::Overflow("sequence term exceeds 64 bits"))
                        })
                    })
                    .collect()
            }
        }
    }
}

/// Alignment applied to generated terms before comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Transform {
    Identity,
    /// Extra leading terms the OEIS entry carries.
    Prepend { values: Vec<i64> },
    /// Leading generated terms the OEIS entry omits.
    DropFirst { count: usize },
    /// Constant offset on every term.
    AddConstant { value: i64 },
}

impl Transform {
    pub fn apply(&self, terms: Vec<i64>) -> Vec<i64> {
        match self {
            Transform::Identity => terms,
            Transform::Prepend { values } => {
                let mut out = values.clone();
                out.extend(terms);
                out
            }
            Transform::DropFirst { count } => terms.into_iter().skip(*count).collect(),
            Transform::AddConstant { value } => terms.into_iter().map(|t| t + value).collect(),
        }
    }

    /// Raw terms needed so that the transformed list has `want` terms.
    fn raw_count(&self, want: usize) -> usize {
        match self {
            Transform::Identity | Transform::AddConstant { .. } => want,
            Transform::Prepend { values } => want.saturating_sub(values.len()),
            Transform::DropFirst { count } => want + count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case {
    pub id: String,
    pub generator: Generator,
    pub transform: Transform,
    pub bfile: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub cases: Vec<Case>,
}

/// The catalogue embedded in the binary.
pub fn builtin_manifest() -> Result<Manifest, OeisError> {
    serde_json::from_str(include_str!("../fixtures/oeis/manifest.json"))
        .map_err(|e| OeisError::Manifest(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum CrosscheckOutcome {
    Match,
    Mismatch {
        position: usize,
        ours: i64,
        reference: i64,
    },
    /// Fewer overlapping terms than the caller required.
    TooShort { have: usize, want: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrosscheckReport {
    pub id: String,
    pub terms_compared: usize,
    pub outcome: CrosscheckOutcome,
}

impl CrosscheckReport {
    pub fn is_pass(&self) -> bool {
        self.outcome == CrosscheckOutcome::Match
    }
}

/// Compares one catalogued sequence against its b-file, positionally.
pub fn crosscheck(case: &Case, cache: &BfileCache, min_terms: usize) -> Result<CrosscheckReport, OeisError> {
    let reference = cache.get(&case.id)?;
    let ours = case
        .transform
        .apply(case.generator.terms(case.transform.raw_count(reference.len()))?);
    let overlap = ours.len().min(reference.len());
    if overlap < min_terms {
        return Ok(CrosscheckReport {
            id: case.id.clone(),
            terms_compared: overlap,
            outcome: CrosscheckOutcome::TooShort {
                have: overlap,
                want: min_terms,
            },
        });
    }
    for (pos, (&ours_v, &(_, ref_v))) in ours.iter().zip(&reference).enumerate() {
        if ours_v != ref_v {
            return Ok(CrosscheckReport {
                id: case.id.clone(),
                terms_compared: overlap,
                outcome: CrosscheckOutcome::Mismatch {
                    position: pos,
                    ours: ours_v,
                    reference: ref_v,
                },
            });
        }
    }
    Ok(CrosscheckReport {
        id: case.id.clone(),
        terms_compared: overlap,
        outcome: CrosscheckOutcome::Match,
    })
}

/// Runs every case of the manifest.
pub fn crosscheck_all(
    manifest: &Manifest,
    cache: &BfileCache,
    min_terms: usize,
) -> Result<Vec<CrosscheckReport>, OeisError> {
    manifest
        .cases
        .par_iter()
        .map(|case| crosscheck(case, cache, min_terms))
        .collect()
}
