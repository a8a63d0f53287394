//! JSON documents on disk: functions, pairs and corpus directories.

use std::fs;
use std::path::Path;

use serde_json::Value;
use sha2::{Digest, Sha256};

use blaschke::corpus::{Corpus, CorpusEntry, PolygonPair};
use blaschke::logconcave::{FunctionSpec, LogConcave};
use blaschke::measures::{admissible, AnyPair, RadialPair, SurfaceAreaPair};
use blaschke::solver::{solve, SolverConfig};

use crate::error::{CliError, CliResult};

/// A parsed input file with the SHA-256 of its bytes.
pub struct Input {
    pub path: String,
    pub digest: String,
    pub object: Object,
}

pub enum Object {
    Function(LogConcave),
    /// A pair given directly; it is solved on first use.
    Pair(AnyPair),
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read(path: &str) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(path, &e))
}

fn parse_value(path: &str, bytes: &[u8]) -> CliResult<Value> {
    serde_json::from_slice(bytes).map_err(|e| CliError::parse(path, &e))
}

fn typed<T: serde::de::DeserializeOwned>(path: &str, v: Value) -> CliResult<T> {
    // Semantic errors from `try_from` surface through serde as messages.
    serde_json::from_value(v).map_err(|e| CliError::validation(format!("{path}: {e}")))
}

/// Function documents use the `kind` tags `indicator`, `polyhedral` and
/// `radial`; pairs use `pair` (planar atoms) or `radial-pair`.
pub fn parse_object(path: &str, bytes: &[u8]) -> CliResult<Object> {
    let v = parse_value(path, bytes)?;
    match v.get("kind").and_then(Value::as_str) {
        Some("pair") => {
            let pair: SurfaceAreaPair = typed(path, v)?;
            let report = admissible(&pair);
            if !report.is_admissible() {
                return Err(blaschke::Error::NotAdmissible(report).into());
            }
            Ok(Object::Pair(AnyPair::Planar(pair)))
        }
        Some("radial-pair") => Ok(Object::Pair(AnyPair::Radial(typed::<RadialPair>(path, v)?))),
        _ => {
            let spec: FunctionSpec = typed(path, v)?;
            Ok(Object::Function(LogConcave::try_from(spec)?))
        }
    }
}

pub fn load(path: &str) -> CliResult<Input> {
    let bytes = read(path)?;
    let object = parse_object(path, &bytes)?;
    Ok(Input { path: path.to_string(), digest: digest(&bytes), object })
}

impl Input {
    pub fn function(&self, cfg: &SolverConfig) -> CliResult<LogConcave> {
        match &self.object {
            Object::Function(f) => Ok(f.clone()),
            Object::Pair(p) => Ok(solve(p, cfg)?.0),
        }
    }

    pub fn pair(&self) -> AnyPair {
        match &self.object {
            Object::Function(f) => blaschke::measures::extract(f),
            Object::Pair(p) => p.clone(),
        }
    }
}

pub fn function_json(f: &LogConcave) -> Value {
    serde_json::to_value(FunctionSpec::from(f.clone())).expect("function documents serialize")
}

pub fn pair_json(p: &AnyPair) -> Value {
    let (kind, mut v) = match p {
        AnyPair::Planar(p) => ("pair", serde_json::to_value(p)),
        AnyPair::Radial(r) => ("radial-pair", serde_json::to_value(r)),
    };
    let v = v.as_mut().expect("pairs serialize");
    v.as_object_mut().expect("pairs are objects").insert("kind".into(), Value::from(kind));
    v.take()
}

pub const POLYGON_PAIRS_FILE: &str = "polygon-pairs.json";

/// Every `*.json` file of `dir` in name order: function documents named by
/// their stem, plus the polygon pairs file. Returns the corpus and a digest
/// over names and contents.
pub fn load_corpus(dir: &str) -> CliResult<(Corpus, String)> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::io(dir, &e))?;
    let mut paths: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut corpus = Corpus::default();
    let mut hasher = Sha256::new();
    for p in &paths {
        let name = p.file_name().unwrap().to_string_lossy().into_owned();
        let shown = p.to_string_lossy().into_owned();
        let bytes = read(&shown)?;
        hasher.update(name.as_bytes());
        hasher.update(&bytes);
        if name == POLYGON_PAIRS_FILE {
            let v = parse_value(&shown, &bytes)?;
            corpus.polygon_pairs = typed::<Vec<PolygonPair>>(&shown, v)?;
            continue;
        }
        let Object::Function(function) = parse_object(&shown, &bytes)? else {
            return Err(CliError::validation(format!("{shown}: corpus entries must be functions")));
        };
        let stem = p.file_stem().unwrap().to_string_lossy().into_owned();
        corpus.functions.push(CorpusEntry { name: stem, function });
    }
    if corpus.functions.is_empty() {
        return Err(CliError::validation(format!("{dir}: no function documents")));
    }
    Ok((corpus, hex::encode(hasher.finalize())))
}

/// Writes `corpus` in the layout read by [`load_corpus`].
pub fn write_corpus(corpus: &Corpus, dir: &Path) -> CliResult<Vec<String>> {
    let shown = dir.to_string_lossy().into_owned();
    fs::create_dir_all(dir).map_err(|e| CliError::io(&shown, &e))?;
    let mut written = Vec::new();
    for e in &corpus.functions {
        let path = dir.join(format!("{}.json", e.name));
        written.push(write_json(&path, &function_json(&e.function))?);
    }
    let pairs = serde_json::to_value(&corpus.polygon_pairs).expect("polygons serialize");
    written.push(write_json(&dir.join(POLYGON_PAIRS_FILE), &pairs)?);
    Ok(written)
}

pub fn write_json(path: &Path, v: &Value) -> CliResult<String> {
    let shown = path.to_string_lossy().into_owned();
    let mut text = serde_json::to_string_pretty(v).expect("values serialize");
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(&shown, &e))?;
    Ok(shown)
}
