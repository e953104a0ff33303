//! Gray-scale matrix images, sample packaging, splits, and manifests.
//!
//! A sample pairs the adjacency image of a generated graph with the
//! controllability curve its simulated attack produced. Samples are
//! stored one binary file each (small header, then the image and curve as
//! 32-bit floats, row-major); the manifest is a human-readable key/value
//! index carrying all metadata plus a CRC32 per file. Images are the
//! adjacency matrix verbatim: 0 is black, weight 1 is white, weighted
//! entries are used directly as intensities with no per-image rescaling.
//!
//! Builds are deterministic: a fixed master seed reproduces every sample
//! file and the manifest byte for byte, regardless of worker count.

use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use crate::attack::{self, AttackStrategy};
use crate::control::ControllabilityKind;
use crate::graph::{AdjacencyMatrix, DirectedGraph};
use crate::netgen::{GenSpec, Topology};
use crate::{rng, CoreError, Result};

const SAMPLE_MAGIC: [u8; 4] = *b"CRSB";
const SAMPLE_VERSION: u16 = 1;
const MANIFEST_HEADER: &str = "ctrlrob dataset manifest v1";
const FLAG_WEIGHTED: u16 = 1;

/// Which split a sample belongs to. Assignment is 8:1:1 per
/// `(topology, <k>)` cell, within one sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub fn label(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

impl std::fmt::Display for Split {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "train" => Ok(Split::Train),
            "validation" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split `{other}`")),
        }
    }
}

/// Provenance of one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMeta {
    pub topology: Topology,
    pub avg_degree: f64,
    pub weighted: bool,
    pub strategy: AttackStrategy,
    pub gen_seed: u64,
    pub attack_seed: u64,
}

/// One loaded sample: the image, its curve, and where it came from.
///
/// Values are exactly what the sample file stores, i.e. quantized to
/// 32-bit floats and widened back.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub image: AdjacencyMatrix,
    pub curve: Vec<f64>,
    pub meta: SampleMeta,
    pub split: Split,
}

/// Manifest line for one sample file.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub id: usize,
    pub file: String,
    pub meta: SampleMeta,
    pub split: Split,
    pub curve_len: usize,
    pub crc32: u32,
}

/// On-disk catalog of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub n: usize,
    pub kind: ControllabilityKind,
    pub strategy: AttackStrategy,
    pub master_seed: u64,
    pub entries: Vec<ManifestEntry>,
}

/// What to build: the full cell grid of one dataset.
#[derive(Debug, Clone)]
pub struct DatasetSpec {
    pub n: usize,
    pub topologies: Vec<Topology>,
    pub degrees: Vec<f64>,
    pub weighted: bool,
    pub instances_per_cell: usize,
    pub strategy: AttackStrategy,
    pub kind: ControllabilityKind,
    pub master_seed: u64,
    pub sf_sigma: f64,
    pub sf_theta: f64,
    pub qsn_rq: usize,
    pub sw_k: usize,
}

impl DatasetSpec {
    pub fn new(
        n: usize,
        topologies: Vec<Topology>,
        degrees: Vec<f64>,
        weighted: bool,
        instances_per_cell: usize,
        strategy: AttackStrategy,
        kind: ControllabilityKind,
        master_seed: u64,
    ) -> Self {
        Self {
            n,
            topologies,
            degrees,
            weighted,
            instances_per_cell,
            strategy,
            kind,
            master_seed,
            sf_sigma: crate::netgen::DEFAULT_SF_SIGMA,
            sf_theta: crate::netgen::DEFAULT_SF_THETA,
            qsn_rq: crate::netgen::DEFAULT_QSN_RQ,
            sw_k: crate::netgen::DEFAULT_SW_K,
        }
    }
}

/// Samples that failed to build, by id, with the error rendered.
#[derive(Debug, Clone)]
pub struct SampleFailure {
    pub id: usize,
    pub error: String,
}

/// Result of a dataset build: the manifest of everything that succeeded
/// plus a per-sample failure report.
#[derive(Debug)]
pub struct BuildReport {
    pub manifest: DatasetManifest,
    pub failures: Vec<SampleFailure>,
}

/// The gray-scale image of a graph is its adjacency matrix, unchanged:
/// weights are already in `(0, 1]` and zero means no edge.
pub fn to_image(g: &DirectedGraph) -> AdjacencyMatrix {
    g.to_matrix()
}

/// Write a matrix as an 8-bit grayscale PNG; pixel = `round(255 * value)`
/// with halves rounding up, matrix row `i` = image row `i`.
pub fn export_png(m: &AdjacencyMatrix, path: &Path) -> Result<()> {
    let n = m.n();
    let pixels: Vec<u8> = m.values().iter().map(|&v| (255.0 * v).round() as u8).collect();
    let file = fs::File::create(path)?;
    let mut encoder = png::Encoder::new(std::io::BufWriter::new(file), n as u32, n as u32);
    encoder.set_color(png::ColorType::Grayscale);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder
        .write_header()
        .map_err(|e| CoreError::Png(e.to_string()))?;
    writer
        .write_image_data(&pixels)
        .map_err(|e| CoreError::Png(e.to_string()))?;
    Ok(())
}

fn sample_bytes(n: usize, weighted: bool, image: &AdjacencyMatrix, curve: &[f64]) -> Vec<u8> {
    let mut buf = Vec::with_capacity(16 + 4 * (n * n + curve.len()));
    buf.extend_from_slice(&SAMPLE_MAGIC);
    buf.extend_from_slice(&SAMPLE_VERSION.to_le_bytes());
    let flags = if weighted { FLAG_WEIGHTED } else { 0 };
    buf.extend_from_slice(&flags.to_le_bytes());
    buf.extend_from_slice(&(n as u32).to_le_bytes());
    buf.extend_from_slice(&(curve.len() as u32).to_le_bytes());
    for &v in image.values() {
        buf.extend_from_slice(&(v as f32).to_le_bytes());
    }
    for &v in curve {
        buf.extend_from_slice(&(v as f32).to_le_bytes());
    }
    buf
}

fn parse_sample_bytes(path: &Path, bytes: &[u8]) -> Result<(usize, bool, Vec<f64>, Vec<f64>)> {
    let bad = |detail: &str| CoreError::BadSampleFile {
        file: path.to_path_buf(),
        detail: detail.to_string(),
    };
    if bytes.len() < 16 {
        return Err(bad("truncated header"));
    }
    if bytes[0..4] != SAMPLE_MAGIC {
        return Err(bad("bad magic"));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != SAMPLE_VERSION {
        return Err(bad(&format!("unsupported version {version}")));
    }
    let flags = u16::from_le_bytes([bytes[6], bytes[7]]);
    let n = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let curve_len = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let expected = 16 + 4 * (n * n + curve_len);
    if bytes.len() != expected {
        return Err(bad(&format!(
            "expected {expected} bytes for n={n}, curve_len={curve_len}; found {}",
            bytes.len()
        )));
    }
    let mut floats = bytes[16..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64);
    let image: Vec<f64> = floats.by_ref().take(n * n).collect();
    let curve: Vec<f64> = floats.collect();
    Ok((n, flags & FLAG_WEIGHTED != 0, image, curve))
}

/// Quantize a curve the way sample files store it.
pub fn quantize_curve(values: &[f64]) -> Vec<f64> {
    values.iter().map(|&v| v as f32 as f64).collect()
}

/// Quantize an image the way sample files store it.
pub fn quantize_image(m: &AdjacencyMatrix) -> AdjacencyMatrix {
    let values = m.values().iter().map(|&v| v as f32 as f64).collect();
    AdjacencyMatrix::from_values(m.n(), values).expect("quantization preserves invariants")
}

/// Generate, simulate, and store every sample of `spec` under `out_dir`,
/// writing `manifest.txt` plus one file per sample in `samples/`.
///
/// Cells are enumerated topology-major, degree-minor; sample `i` uses
/// derived seed streams `(master, 2i)` for generation and
/// `(master, 2i+1)` for the attack. Split assignment shuffles each cell
/// with its own derived stream, so the whole build is a pure function of
/// the spec.
pub fn build_dataset(spec: &DatasetSpec, out_dir: &Path, workers: usize) -> Result<BuildReport> {
    let sample_dir = out_dir.join("samples");
    fs::create_dir_all(&sample_dir)?;

    // enumerate cells and samples
    let mut gen_specs = Vec::new();
    let mut metas = Vec::new();
    let mut cell_of = Vec::new();
    let mut attack_seeds = Vec::new();
    for (t_idx, &topology) in spec.topologies.iter().enumerate() {
        for (d_idx, &avg_degree) in spec.degrees.iter().enumerate() {
            let cell = t_idx * spec.degrees.len() + d_idx;
            for _ in 0..spec.instances_per_cell {
                let id = gen_specs.len();
                let gen_seed = rng::derive_seed(spec.master_seed, 2 * id as u64);
                let attack_seed = rng::derive_seed(spec.master_seed, 2 * id as u64 + 1);
                gen_specs.push(GenSpec {
                    sf_sigma: spec.sf_sigma,
                    sf_theta: spec.sf_theta,
                    qsn_rq: spec.qsn_rq,
                    sw_k: spec.sw_k,
                    ..GenSpec::new(topology, spec.n, avg_degree, spec.weighted, gen_seed)
                });
                metas.push(SampleMeta {
                    topology,
                    avg_degree,
                    weighted: spec.weighted,
                    strategy: spec.strategy,
                    gen_seed,
                    attack_seed,
                });
                cell_of.push(cell);
                attack_seeds.push(attack_seed);
            }
        }
    }

    let results = attack::batch_simulate(&gen_specs, spec.strategy, spec.kind, &attack_seeds, workers)?;

    // write sample files in id order; collect failures
    let mut produced: Vec<(usize, ManifestEntry)> = Vec::new();
    let mut failures = Vec::new();
    for (id, result) in results.into_iter().enumerate() {
        match result {
            Ok((graph, curve)) => {
                let image = to_image(&graph);
                let bytes = sample_bytes(spec.n, spec.weighted, &image, &curve.values);
                let crc = crc32fast::hash(&bytes);
                let file = format!("samples/s{id:05}.bin");
                fs::write(out_dir.join(&file), &bytes)?;
                produced.push((
                    cell_of[id],
                    ManifestEntry {
                        id,
                        file,
                        meta: metas[id].clone(),
                        split: Split::Train, // placeholder until assignment below
                        curve_len: curve.values.len(),
                        crc32: crc,
                    },
                ));
            }
            Err(err) => failures.push(SampleFailure {
                id,
                error: err.to_string(),
            }),
        }
    }

    assign_splits(&mut produced, spec.master_seed);

    let manifest = DatasetManifest {
        n: spec.n,
        kind: spec.kind,
        strategy: spec.strategy,
        master_seed: spec.master_seed,
        entries: produced.into_iter().map(|(_, e)| e).collect(),
    };
    fs::write(out_dir.join("manifest.txt"), manifest.to_text())?;
    Ok(BuildReport { manifest, failures })
}

/// 8:1:1 split per cell: validation and test each get `round(c / 10)`
/// samples of a `c`-sample cell, chosen by a seeded shuffle.
fn assign_splits(produced: &mut [(usize, ManifestEntry)], master_seed: u64) {
    use rand::seq::SliceRandom;
    const SPLIT_SALT: u64 = 0x5_9117_0f_5a17;

    let max_cell = produced.iter().map(|(c, _)| *c).max().map_or(0, |c| c + 1);
    for cell in 0..max_cell {
        let mut indices: Vec<usize> = produced
            .iter()
            .enumerate()
            .filter(|(_, (c, _))| *c == cell)
            .map(|(i, _)| i)
            .collect();
        let mut cell_rng = rng::stream(master_seed ^ SPLIT_SALT, cell as u64);
        indices.shuffle(&mut cell_rng);
        let count = indices.len();
        let holdout = (count as f64 / 10.0).round() as usize;
        for (pos, &idx) in indices.iter().enumerate() {
            produced[idx].1.split = if pos < holdout {
                Split::Validation
            } else if pos < 2 * holdout {
                Split::Test
            } else {
                Split::Train
            };
        }
    }
}

impl DatasetManifest {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MANIFEST_HEADER}");
        let _ = writeln!(out, "n = {}", self.n);
        let _ = writeln!(out, "kind = {}", self.kind.label());
        if let ControllabilityKind::State { rank_tol } = self.kind {
            let _ = writeln!(out, "rank_tol = {rank_tol}");
        }
        let _ = writeln!(out, "strategy = {}", self.strategy);
        let _ = writeln!(out, "master_seed = {}", self.master_seed);
        let _ = writeln!(out, "samples = {}", self.entries.len());
        out.push('\n');
        for e in &self.entries {
            let _ = writeln!(
                out,
                "sample id={} file={} topology={} k={} weighted={} strategy={} gen_seed={} attack_seed={} split={} curve_len={} crc32={:08x}",
                e.id,
                e.file,
                e.meta.topology,
                e.meta.avg_degree,
                e.meta.weighted,
                e.meta.strategy,
                e.meta.gen_seed,
                e.meta.attack_seed,
                e.split,
                e.curve_len,
                e.crc32,
            );
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let err = |line: usize, detail: String| CoreError::ParseManifest { line, detail };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| err(1, "empty manifest".into()))?;
        if header != MANIFEST_HEADER {
            return Err(err(1, format!("unrecognized header `{header}`")));
        }

        let mut n = None;
        let mut kind_label: Option<String> = None;
        let mut rank_tol = crate::control::DEFAULT_RANK_TOL;
        let mut strategy = None;
        let mut master_seed = None;
        let mut declared = None;
        let mut entries = Vec::new();

        for (idx, raw) in lines {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("sample ") {
                entries.push(parse_entry(rest, line_no, rank_tol)?);
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err(line_no, format!("expected `key = value`, got `{line}`")))?;
            match key {
                "n" => n = Some(value.parse().map_err(|e| err(line_no, format!("bad n: {e}")))?),
                "kind" => kind_label = Some(value.to_string()),
                "rank_tol" => {
                    rank_tol = value
                        .parse()
                        .map_err(|e| err(line_no, format!("bad rank_tol: {e}")))?
                }
                "strategy" => {
                    strategy = Some(value.parse::<AttackStrategy>().map_err(|e| err(line_no, e))?)
                }
                "master_seed" => {
                    master_seed = Some(
                        value
                            .parse()
                            .map_err(|e| err(line_no, format!("bad master_seed: {e}")))?,
                    )
                }
                "samples" => {
                    declared = Some(
                        value
                            .parse::<usize>()
                            .map_err(|e| err(line_no, format!("bad samples: {e}")))?,
                    )
                }
                other => return Err(err(line_no, format!("unknown key `{other}`"))),
            }
        }

        let kind = match kind_label.as_deref() {
            Some("structural") => ControllabilityKind::Structural,
            Some("state") => ControllabilityKind::State { rank_tol },
            Some(other) => return Err(err(1, format!("unknown kind `{other}`"))),
            None => return Err(err(1, "missing kind".into())),
        };
        let manifest = DatasetManifest {
            n: n.ok_or_else(|| err(1, "missing n".into()))?,
            kind,
            strategy: strategy.ok_or_else(|| err(1, "missing strategy".into()))?,
            master_seed: master_seed.ok_or_else(|| err(1, "missing master_seed".into()))?,
            entries,
        };
        if let Some(declared) = declared {
            if declared != manifest.entries.len() {
                return Err(err(
                    1,
                    format!(
                        "header declares {declared} samples, found {}",
                        manifest.entries.len()
                    ),
                ));
            }
        }
        Ok(manifest)
    }

    pub fn split_entries(&self, split: Split) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(move |e| e.split == split)
    }
}

fn parse_entry(rest: &str, line_no: usize, _rank_tol: f64) -> Result<ManifestEntry> {
    let err = |detail: String| CoreError::ParseManifest {
        line: line_no,
        detail,
    };
    let mut fields = std::collections::BTreeMap::new();
    for token in rest.split_whitespace() {
        let (k, v) = token
            .split_once('=')
            .ok_or_else(|| err(format!("bad token `{token}`")))?;
        fields.insert(k.to_string(), v.to_string());
    }
    let get = |k: &str| {
        fields
            .get(k)
            .cloned()
            .ok_or_else(|| err(format!("missing field `{k}`")))
    };
    Ok(ManifestEntry {
        id: get("id")?.parse().map_err(|e| err(format!("bad id: {e}")))?,
        file: get("file")?,
        meta: SampleMeta {
            topology: get("topology")?.parse().map_err(|e| err(e))?,
            avg_degree: get("k")?.parse().map_err(|e| err(format!("bad k: {e}")))?,
            weighted: get("weighted")?
                .parse()
                .map_err(|e| err(format!("bad weighted: {e}")))?,
            strategy: get("strategy")?.parse().map_err(|e| err(e))?,
            gen_seed: get("gen_seed")?
                .parse()
                .map_err(|e| err(format!("bad gen_seed: {e}")))?,
            attack_seed: get("attack_seed")?
                .parse()
                .map_err(|e| err(format!("bad attack_seed: {e}")))?,
        },
        split: get("split")?.parse().map_err(|e| err(e))?,
        curve_len: get("curve_len")?
            .parse()
            .map_err(|e| err(format!("bad curve_len: {e}")))?,
        crc32: u32::from_str_radix(&get("crc32")?, 16)
            .map_err(|e| err(format!("bad crc32: {e}")))?,
    })
}

/// Re-export every stored curve as CSV (rows `id, v1, ..., v_{N-1}`),
/// e.g. for plotting the ground truth of a dataset.
pub fn export_curves_csv(reader: &DatasetReader) -> Result<String> {
    let mut rows = Vec::with_capacity(reader.manifest.entries.len());
    for entry in &reader.manifest.entries {
        let sample = reader.load_entry(entry)?;
        rows.push((entry.id, sample.curve));
    }
    Ok(attack::curves_to_csv(
        rows.iter().map(|(id, curve)| (*id, curve.as_slice())),
    ))
}

/// Handle on a dataset directory; loads samples on demand.
pub struct DatasetReader {
    pub manifest: DatasetManifest,
    base_dir: PathBuf,
}

/// Open the manifest at `path` for reading samples.
pub fn load_dataset(manifest_path: &Path) -> Result<DatasetReader> {
    let text = fs::read_to_string(manifest_path)?;
    let manifest = DatasetManifest::parse(&text)?;
    let base_dir = manifest_path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    Ok(DatasetReader { manifest, base_dir })
}

impl DatasetReader {
    /// Load and validate one sample: checksum, magic, declared shapes.
    pub fn load_entry(&self, entry: &ManifestEntry) -> Result<Sample> {
        let path = self.base_dir.join(&entry.file);
        let mut bytes = Vec::new();
        fs::File::open(&path)?.read_to_end(&mut bytes)?;
        let actual = crc32fast::hash(&bytes);
        if actual != entry.crc32 {
            return Err(CoreError::ChecksumMismatch {
                file: path,
                expected: entry.crc32,
                actual,
            });
        }
        let (n, weighted, image, curve) = parse_sample_bytes(&path, &bytes)?;
        let mismatch = |detail: String| CoreError::SampleShape {
            file: path.clone(),
            detail,
        };
        if n != self.manifest.n {
            return Err(mismatch(format!(
                "file stores n={n} but the manifest declares n={}",
                self.manifest.n
            )));
        }
        if curve.len() != entry.curve_len {
            return Err(mismatch(format!(
                "file stores a {}-value curve but the manifest declares {}",
                curve.len(),
                entry.curve_len
            )));
        }
        if curve.len() != n.saturating_sub(1) {
            return Err(mismatch(format!(
                "curve length {} does not match n-1 = {}",
                curve.len(),
                n - 1
            )));
        }
        if weighted != entry.meta.weighted {
            return Err(mismatch("weighted flag disagrees with manifest".into()));
        }
        let image = AdjacencyMatrix::from_values(n, image)
            .map_err(|e| mismatch(format!("invalid image: {e}")))?;
        Ok(Sample {
            image,
            curve,
            meta: entry.meta.clone(),
            split: entry.split,
        })
    }

    /// Iterate over all samples in manifest order; failures are yielded
    /// per sample.
    pub fn iter(&self) -> impl Iterator<Item = Result<Sample>> + '_ {
        self.manifest.entries.iter().map(move |e| self.load_entry(e))
    }

    /// Load every sample of one split, in manifest order.
    pub fn load_split(&self, split: Split) -> Result<Vec<Sample>> {
        self.manifest
            .split_entries(split)
            .map(|e| self.load_entry(e))
            .collect()
    }

    pub fn base_dir(&self) -> &Path {
        &self.base_dir
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DirectedGraph;

    fn tiny_spec(seed: u64) -> DatasetSpec {
        DatasetSpec::new(
            16,
            vec![Topology::Er, Topology::Qsn],
            vec![2.0, 3.0],
            false,
            10,
            AttackStrategy::Random,
            ControllabilityKind::Structural,
            seed,
        )
    }

    #[test]
    fn image_is_the_matrix() {
        let g = DirectedGraph::from_edge_list(3, &[(0, 1, 1.0), (1, 2, 0.37)]).unwrap();
        let img = to_image(&g);
        assert_eq!(img, g.to_matrix());
        assert_eq!(img.get(1, 2), 0.37);
        assert_eq!(img.nonzero_count(), g.edge_count());
        let empty = DirectedGraph::unweighted(4, &[]).unwrap();
        assert!(to_image(&empty).values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn png_pixels_round_half_up() {
        let dir = tempfile::tempdir().unwrap();
        let m = AdjacencyMatrix::from_values(2, vec![0.0, 1.0, 0.5, 0.0]).unwrap();
        let path = dir.path().join("m.png");
        export_png(&m, &path).unwrap();

        let decoder = png::Decoder::new(std::io::Cursor::new(std::fs::read(&path).unwrap()));
        let mut reader = decoder.read_info().unwrap();
        let mut buf = vec![0; reader.output_buffer_size().unwrap()];
        let info = reader.next_frame(&mut buf).unwrap();
        assert_eq!((info.width, info.height), (2, 2));
        assert_eq!(&buf[..4], &[0, 255, 128, 0]);
    }

    #[test]
    fn build_then_load_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let spec = tiny_spec(42);
        let report = build_dataset(&spec, dir.path(), 2).unwrap();
        assert!(report.failures.is_empty());
        assert_eq!(report.manifest.entries.len(), 40);

        let reader = load_dataset(&dir.path().join("manifest.txt")).unwrap();
        assert_eq!(reader.manifest, report.manifest);
        let mut count = 0;
        for sample in reader.iter() {
            let sample = sample.unwrap();
            assert_eq!(sample.curve.len(), 15);
            assert_eq!(*sample.curve.last().unwrap(), 1.0);
            count += 1;
        }
        assert_eq!(count, 40);

        // loaded values equal the quantized originals
        let entry = &report.manifest.entries[0];
        let g = crate::netgen::generate(&GenSpec::new(
            entry.meta.topology,
            spec.n,
            entry.meta.avg_degree,
            false,
            entry.meta.gen_seed,
        ))
        .unwrap();
        let mut rng = crate::rng::from_seed(entry.meta.attack_seed);
        let curve =
            attack::simulate_curve(&g, spec.strategy, spec.kind, &mut rng).unwrap();
        let loaded = reader.load_entry(entry).unwrap();
        assert_eq!(loaded.image, quantize_image(&to_image(&g)));
        assert_eq!(loaded.curve, quantize_curve(&curve.values));
    }

    #[test]
    fn split_ratios_per_cell() {
        let dir = tempfile::tempdir().unwrap();
        let report = build_dataset(&tiny_spec(7), dir.path(), 1).unwrap();
        // 4 cells x 10 instances: 8/1/1 per cell, 32/4/4 overall
        for topology in [Topology::Er, Topology::Qsn] {
            for k in [2.0, 3.0] {
                let cell: Vec<_> = report
                    .manifest
                    .entries
                    .iter()
                    .filter(|e| e.meta.topology == topology && e.meta.avg_degree == k)
                    .collect();
                assert_eq!(cell.len(), 10);
                let count = |s: Split| cell.iter().filter(|e| e.split == s).count();
                assert_eq!(count(Split::Train), 8);
                assert_eq!(count(Split::Validation), 1);
                assert_eq!(count(Split::Test), 1);
            }
        }
    }

    #[test]
    fn rebuild_is_byte_identical_for_any_worker_count() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let report = build_dataset(&tiny_spec(11), dir_a.path(), 1).unwrap();
        build_dataset(&tiny_spec(11), dir_b.path(), 4).unwrap();
        let read = |d: &Path, f: &str| std::fs::read(d.join(f)).unwrap();
        assert_eq!(
            read(dir_a.path(), "manifest.txt"),
            read(dir_b.path(), "manifest.txt")
        );
        for entry in &report.manifest.entries {
            assert_eq!(
                read(dir_a.path(), &entry.file),
                read(dir_b.path(), &entry.file),
                "sample {} differs between runs",
                entry.id
            );
        }
    }

    #[test]
    fn empty_spec_builds_empty_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let mut spec = tiny_spec(1);
        spec.topologies.clear();
        let report = build_dataset(&spec, dir.path(), 1).unwrap();
        assert!(report.manifest.entries.is_empty());
        assert!(report.failures.is_empty());
        let reader = load_dataset(&dir.path().join("manifest.txt")).unwrap();
        assert_eq!(reader.iter().count(), 0);
    }

    #[test]
    fn corrupted_sample_is_a_per_sample_error() {
        let dir = tempfile::tempdir().unwrap();
        let report = build_dataset(&tiny_spec(3), dir.path(), 1).unwrap();
        let entry = report.manifest.entries[2].clone();
        let path = dir.path().join(&entry.file);
        let mut bytes = std::fs::read(&path).unwrap();
        let last = bytes.len() - 1;
        bytes[last] ^= 0xff;
        std::fs::write(&path, &bytes).unwrap();

        let reader = load_dataset(&dir.path().join("manifest.txt")).unwrap();
        assert!(matches!(
            reader.load_entry(&entry).unwrap_err(),
            CoreError::ChecksumMismatch { .. }
        ));
        // other samples still load
        assert!(reader.load_entry(&report.manifest.entries[0]).is_ok());
    }

    #[test]
    fn shape_mismatches_are_detected() {
        let dir = tempfile::tempdir().unwrap();
        let report = build_dataset(&tiny_spec(5), dir.path(), 1).unwrap();
        let mut entry = report.manifest.entries[0].clone();
        let reader = load_dataset(&dir.path().join("manifest.txt")).unwrap();

        // manifest disagreeing on curve length
        entry.curve_len += 1;
        // crc still matches, so the shape check fires
        assert!(matches!(
            reader.load_entry(&entry).unwrap_err(),
            CoreError::SampleShape { .. }
        ));
    }

    #[test]
    fn manifest_text_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let report = build_dataset(&tiny_spec(21), dir.path(), 1).unwrap();
        let text = report.manifest.to_text();
        assert_eq!(DatasetManifest::parse(&text).unwrap(), report.manifest);
    }

    #[test]
    fn full_grid_split_matches_the_8_1_1_ratio() {
        // 4 topologies x 4 degrees x 10 instances: 160 samples, 128/16/16
        let dir = tempfile::tempdir().unwrap();
        let spec = DatasetSpec::new(
            16,
            Topology::ALL.to_vec(),
            vec![2.0, 3.0, 4.0, 5.0],
            false,
            10,
            AttackStrategy::Random,
            ControllabilityKind::Structural,
            88,
        );
        let report = build_dataset(&spec, dir.path(), 2).unwrap();
        assert!(report.failures.is_empty());
        assert_eq!(report.manifest.entries.len(), 160);
        let count = |s: Split| report.manifest.split_entries(s).count();
        assert_eq!(count(Split::Train), 128);
        assert_eq!(count(Split::Validation), 16);
        assert_eq!(count(Split::Test), 16);
        // a partition: every sample in exactly one split
        assert_eq!(
            count(Split::Train) + count(Split::Validation) + count(Split::Test),
            report.manifest.entries.len()
        );
    }

    #[test]
    fn curves_reexport_as_csv() {
        let dir = tempfile::tempdir().unwrap();
        let report = build_dataset(&tiny_spec(13), dir.path(), 1).unwrap();
        let reader = load_dataset(&dir.path().join("manifest.txt")).unwrap();
        let csv = export_curves_csv(&reader).unwrap();
        assert_eq!(csv.lines().count(), report.manifest.entries.len());
        assert!(csv.starts_with("0,"));
        let first_row_values = csv.lines().next().unwrap().split(',').count() - 1;
        assert_eq!(first_row_values, 15);
    }
}
