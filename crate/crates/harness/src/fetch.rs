//! Download and normalization of public SNAP graphs.
//!
//! Archives are cached under the data directory and checked against
//! `checksums.json` there. The first download of a dataset records its digest;
//! later downloads must match it unless a digest is pinned explicitly.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use flate2::read::GzDecoder;
use thiserror::Error;

use crate::benchmark::sha256_hex;

pub const SNAP_BASE_URL: &str = "https://snap.stanford.edu/data/";
pub const CHECKSUM_FILE: &str = "checksums.json";

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("unknown dataset {0:?}")]
    UnknownDataset(String),
    #[error("download of {url} failed: {message}")]
    Download { url: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("checksum mismatch for {name}: expected {expected}, got {actual}")]
    Checksum {
        name: String,
        expected: String,
        actual: String,
    },
    #[error("archive {0} has no edge list")]
    EmptyArchive(PathBuf),
    #[error("malformed checksum file: {0}")]
    Checksums(#[from] serde_json::Error),
    #[error("{0}")]
    Archive(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> FetchError + '_ {
    move |source| FetchError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArchiveKind {
    Gzip,
    Zip,
    Plain,
}

impl ArchiveKind {
    fn from_file_name(name: &str) -> Self {
        if name.ends_with(".gz") {
            ArchiveKind::Gzip
        } else if name.ends_with(".zip") {
            ArchiveKind::Zip
        } else {
            ArchiveKind::Plain
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Dataset {
    pub name: &'static str,
    pub file: &'static str,
}

pub const DATASETS: [Dataset; 5] = [
    Dataset {
        name: "as-skitter",
        file: "as-skitter.txt.gz",
    },
    Dataset {
        name: "email-EuAll",
        file: "email-EuAll.txt.gz",
    },
    Dataset {
        name: "wiki-Talk",
        file: "wiki-Talk.txt.gz",
    },
    Dataset {
        name: "ego-Twitter",
        file: "twitter_combined.txt.gz",
    },
    Dataset {
        name: "twitch-gamers",
        file: "twitch_gamers.zip",
    },
];

pub fn dataset(name: &str) -> Option<Dataset> {
    DATASETS.iter().copied().find(|d| d.name.eq_ignore_ascii_case(name))
}

#[derive(Clone, Debug, Default)]
pub struct FetchOptions {
    /// Replaces the registry URL, e.g. for a mirror.
    pub url: Option<String>,
    /// Required archive digest; overrides any recorded one.
    pub sha256: Option<String>,
    /// Download again even if the archive is cached.
    pub force: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FetchOutcome {
    pub archive: PathBuf,
    pub edges: PathBuf,
    pub sha256: String,
    pub edge_lines: usize,
}

fn read_checksums(path: &Path) -> Result<BTreeMap<String, String>, FetchError> {
    match std::fs::read_to_string(path) {
        Ok(s) => Ok(serde_json::from_str(&s)?),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(BTreeMap::new()),
        Err(e) => Err(io_err(path)(e)),
    }
}

fn write_checksums(path: &Path, sums: &BTreeMap<String, String>) -> Result<(), FetchError> {
    let mut s = serde_json::to_string_pretty(sums)?;
    s.push('\n');
    std::fs::write(path, s).map_err(io_err(path))
}

fn download(url: &str, to: &Path) -> Result<(), FetchError> {
    let fail = |message: String| FetchError::Download {
        url: url.to_string(),
        message,
    };
    let mut resp = reqwest::blocking::Client::builder()
        .timeout(None)
        .build()
        .map_err(|e| fail(e.to_string()))?
        .get(url)
        .send()
        .and_then(|r| r.error_for_status())
        .map_err(|e| fail(e.to_string()))?;
    let partial = to.with_extension("part");
    let mut file = BufWriter::new(std::fs::File::create(&partial).map_err(io_err(&partial))?);
    resp.copy_to(&mut file).map_err(|e| fail(e.to_string()))?;
    file.flush().map_err(io_err(&partial))?;
    drop(file);
    std::fs::rename(&partial, to).map_err(io_err(to))
}

fn file_sha256(path: &Path) -> Result<String, FetchError> {
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    Ok(sha256_hex(&bytes))
}

/// Copies `u v` pairs from `input` to `out`, dropping comments and a CSV header.
///
/// Commas and tabs are treated as separators. Returns the number of pairs written.
pub fn normalize_edges<R: BufRead, W: Write>(input: R, mut out: W) -> std::io::Result<usize> {
    let mut count = 0;
    for line in input.lines() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
            continue;
        }
        let mut fields = t.split([',', ' ', '\t']).filter(|f| !f.is_empty());
        let (Some(u), Some(v)) = (fields.next(), fields.next()) else {
            continue;
        };
        if u.parse::<u64>().is_err() || v.parse::<u64>().is_err() {
            // header rows such as `numeric_id_1,numeric_id_2`
            continue;
        }
        writeln!(out, "{u} {v}")?;
        count += 1;
    }
    out.flush()?;
    Ok(count)
}

fn extract(archive: &Path, kind: ArchiveKind, out_path: &Path) -> Result<usize, FetchError> {
    let file = std::fs::File::open(archive).map_err(io_err(archive))?;
    let out = BufWriter::new(std::fs::File::create(out_path).map_err(io_err(out_path))?);
    let count = match kind {
        ArchiveKind::Gzip => normalize_edges(BufReader::new(GzDecoder::new(file)), out),
        ArchiveKind::Plain => normalize_edges(BufReader::new(file), out),
        ArchiveKind::Zip => {
            let mut zip = zip::ZipArchive::new(file).map_err(|e| FetchError::Archive(e.to_string()))?;
            let names: Vec<String> = zip.file_names().map(str::to_string).collect();
            let pick = names
                .iter()
                .find(|n| n.contains("edges") && !n.ends_with('/'))
                .or_else(|| names.iter().find(|n| n.ends_with(".csv") || n.ends_with(".txt")))
                .ok_or_else(|| FetchError::EmptyArchive(archive.to_path_buf()))?;
            let mut entry = zip.by_name(pick).map_err(|e| FetchError::Archive(e.to_string()))?;
            let mut buf = Vec::new();
            entry.read_to_end(&mut buf).map_err(io_err(archive))?;
            normalize_edges(&buf[..], out)
        }
    };
    count.map_err(io_err(out_path))
}

/// Fetches `name` into `data_dir`, writing `<name>.edges` next to the cached archive.
pub fn fetch_dataset(name: &str, data_dir: &Path, opts: &FetchOptions) -> Result<FetchOutcome, FetchError> {
    let known = dataset(name);
    let (canonical, file) = match (known, &opts.url) {
        (Some(d), _) => (d.name.to_string(), d.file.to_string()),
        (None, Some(url)) => (
            name.to_string(),
            url.rsplit('/').next().filter(|s| !s.is_empty()).unwrap_or(name).to_string(),
        ),
        (None, None) => return Err(FetchError::UnknownDataset(name.to_string())),
    };
    let url = opts.url.clone().unwrap_or_else(|| format!("{SNAP_BASE_URL}{file}"));
    std::fs::create_dir_all(data_dir).map_err(io_err(data_dir))?;
    let archive = data_dir.join(&file);
    if opts.force || !archive.exists() {
        download(&url, &archive)?;
    }
    let actual = file_sha256(&archive)?;
    let sums_path = data_dir.join(CHECKSUM_FILE);
    let mut sums = read_checksums(&sums_path)?;
    if let Some(expected) = opts.sha256.as_ref().or(sums.get(&canonical)) {
        if !expected.eq_ignore_ascii_case(&actual) {
            return Err(FetchError::Checksum {
                name: canonical,
                expected: expected.clone(),
                actual,
            });
        }
    }
    if sums.get(&canonical) != Some(&actual) {
        sums.insert(canonical.clone(), actual.clone());
        write_checksums(&sums_path, &sums)?;
    }
    let edges = data_dir.join(format!("{canonical}.edges"));
    let edge_lines = extract(&archive, ArchiveKind::from_file_name(&file), &edges)?;
    if edge_lines == 0 {
        return Err(FetchError::EmptyArchive(archive));
    }
    Ok(FetchOutcome {
        archive,
        edges,
        sha256: actual,
        edge_lines,
    })
}
