use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use flate2::write::GzEncoder;
use flate2::{Compression, GzBuilder};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::failure::Failure;

pub fn sha256_file(path: &Path) -> io::Result<String> {
    let mut file = File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

enum Sink {
    Plain(BufWriter<File>),
    Gzip(GzEncoder<BufWriter<File>>),
}

/// Output file; gzip-compressed (with a fixed header) for `.gz` names.
pub struct OutFile {
    sink: Sink,
}

impl OutFile {
    pub fn create(path: &Path) -> Result<Self, Failure> {
        let file = File::create(path).map_err(|e| Failure::input("io", format!("{}: {e}", path.display())))?;
        let writer = BufWriter::new(file);
        let sink = if path.extension().is_some_and(|ext| ext == "gz") {
            Sink::Gzip(GzBuilder::new().mtime(0).write(writer, Compression::default()))
        } else {
            Sink::Plain(writer)
        };
        Ok(Self { sink })
    }

    pub fn finish(self) -> io::Result<()> {
        match self.sink {
            Sink::Plain(mut w) => w.flush(),
            Sink::Gzip(gz) => gz.finish()?.flush(),
        }
    }
}

impl Write for OutFile {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        match &mut self.sink {
            Sink::Plain(w) => w.write(buf),
            Sink::Gzip(w) => w.write(buf),
        }
    }

    fn flush(&mut self) -> io::Result<()> {
        match &mut self.sink {
            Sink::Plain(w) => w.flush(),
            Sink::Gzip(w) => w.flush(),
        }
    }
}

pub fn write_failure(path: &Path, err: io::Error) -> Failure {
    Failure::internal("io", format!("writing {}: {err}", path.display()))
}

/// Writes through `fill` into `path`.
pub fn write_with(path: &Path, fill: impl FnOnce(&mut OutFile) -> io::Result<()>) -> Result<(), Failure> {
    let mut out = OutFile::create(path)?;
    fill(&mut out).and_then(|_| out.finish()).map_err(|e| write_failure(path, e))
}

pub fn write_json_pretty<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    write_with(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        w.write_all(b"\n")
    })
}

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path) -> Result<Self, Failure> {
        let sha256 = sha256_file(path).map_err(|e| Failure::input("io", format!("{}: {e}", path.display())))?;
        Ok(Self { path: path.to_path_buf(), sha256 })
    }
}

/// Provenance record written next to every output as `<output>.manifest.json`.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a, O: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub argv: Vec<String>,
    pub options: &'a O,
    pub jobs: Option<usize>,
    pub parallel: bool,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub timestamp: String,
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

pub struct ManifestWriter<'a, O: Serialize> {
    pub command: &'static str,
    pub options: &'a O,
    pub jobs: Option<usize>,
}

impl<O: Serialize> ManifestWriter<'_, O> {
    /// Digests inputs and outputs and writes the manifest beside `primary`.
    pub fn write(&self, inputs: &[&Path], outputs: &[&Path], primary: &Path) -> Result<(), Failure> {
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: self.command,
            argv: std::env::args().collect(),
            options: self.options,
            jobs: self.jobs,
            parallel: ontosub::par::is_parallel(),
            inputs: inputs.iter().map(|p| FileDigest::of(p)).collect::<Result<_, _>>()?,
            outputs: outputs.iter().map(|p| FileDigest::of(p)).collect::<Result<_, _>>()?,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        };
        write_json_pretty(&manifest_path(primary), &manifest)
    }
}
