//! On-disk cache of length layers. Advisory: anything unreadable is
//! ignored and recomputed.
//!
//! File layout, all integers little endian:
//! `magic(4) version(u32) key(32) layers(u32)`, then per layer a count
//! (u32) followed by records `len(u32) dim(u8) lambda(i64 * dim)
//! perm_len(u16) perm(u16 * perm_len) length(u32)`, then the SHA-256 of
//! everything before it.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::rootdata::LatticeVec;
use crate::weyl::{IwahoriWeylElement, IwahoriWeylGroup};

use super::config::DatumSpec;

const MAGIC: &[u8; 4] = b"IWLC";
const FORMAT_VERSION: u32 = 1;

pub const CACHE_ENV: &str = "IWAHORI_CACHE_DIR";

#[derive(Debug, Clone)]
pub struct LayerCache {
    dir: PathBuf,
}

impl LayerCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        LayerCache { dir: dir.into() }
    }

    /// `--cache-dir` if given, else the environment variable.
    pub fn from_options(flag: Option<&Path>) -> Option<Self> {
        flag.map(Path::to_path_buf)
            .or_else(|| std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
            .map(LayerCache::new)
    }

    pub fn key(datum: &DatumSpec) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(b"iwahori-layers\0");
        h.update(env!("CARGO_PKG_VERSION").as_bytes());
        h.update(FORMAT_VERSION.to_le_bytes());
        h.update(serde_json::to_vec(datum).expect("datum spec serializes"));
        h.finalize().into()
    }

    pub fn path_for(&self, datum: &DatumSpec) -> PathBuf {
        let key = Self::key(datum);
        let hex: String = key[..16].iter().map(|b| format!("{b:02x}")).collect();
        self.dir.join(format!("layers-{hex}.bin"))
    }

    /// Seeds `group` from disk. Returns the number of layers accepted.
    pub fn load(&self, datum: &DatumSpec, group: &IwahoriWeylGroup) -> usize {
        let Ok(bytes) = fs::read(self.path_for(datum)) else {
            return 0;
        };
        match decode(&bytes, &Self::key(datum), group) {
            Some(layers) => {
                let n = layers.len();
                if group.seed_layers(layers) {
                    n
                } else {
                    0
                }
            }
            None => 0,
        }
    }

    /// Writes every layer `group` currently holds, atomically.
    pub fn store(&self, datum: &DatumSpec, group: &IwahoriWeylGroup) -> std::io::Result<()> {
        let count = group.cached_layer_count();
        if count == 0 {
            return Ok(());
        }
        let layers = group.layers(count - 1);
        let bytes = encode(&Self::key(datum), group, &layers);
        fs::create_dir_all(&self.dir)?;
        let target = self.path_for(datum);
        let tmp = self.dir.join(format!(
            ".{}.{}.tmp",
            target.file_name().and_then(|s| s.to_str()).unwrap_or("layers"),
            std::process::id()
        ));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&bytes)?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &target)
    }
}

fn encode(key: &[u8; 32], group: &IwahoriWeylGroup, layers: &[std::sync::Arc<[IwahoriWeylElement]>]) -> Vec<u8> {
    let w0 = group.finite_weyl_group();
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(key);
    out.extend_from_slice(&(layers.len() as u32).to_le_bytes());
    for (k, layer) in layers.iter().enumerate() {
        out.extend_from_slice(&(layer.len() as u32).to_le_bytes());
        for x in layer.iter() {
            let perm = w0.root_permutation(x.finite());
            let mut rec = Vec::new();
            rec.push(x.translation().len() as u8);
            for c in x.translation() {
                rec.extend_from_slice(&c.to_le_bytes());
            }
            rec.extend_from_slice(&(perm.len() as u16).to_le_bytes());
            for p in perm {
                rec.extend_from_slice(&p.to_le_bytes());
            }
            rec.extend_from_slice(&(k as u32).to_le_bytes());
            out.extend_from_slice(&(rec.len() as u32).to_le_bytes());
            out.extend_from_slice(&rec);
        }
    }
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest);
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        let s = self.bytes.get(self.pos..self.pos + n)?;
        self.pos += n;
        Some(s)
    }

    fn u8(&mut self) -> Option<u8> {
        Some(self.take(1)?[0])
    }

    fn u16(&mut self) -> Option<u16> {
        Some(u16::from_le_bytes(self.take(2)?.try_into().ok()?))
    }

    fn u32(&mut self) -> Option<u32> {
        Some(u32::from_le_bytes(self.take(4)?.try_into().ok()?))
    }

    fn i64(&mut self) -> Option<i64> {
        Some(i64::from_le_bytes(self.take(8)?.try_into().ok()?))
    }
}

fn decode(bytes: &[u8], key: &[u8; 32], group: &IwahoriWeylGroup) -> Option<Vec<Vec<IwahoriWeylElement>>> {
    if bytes.len() < 32 {
        return None;
    }
    let (body, digest) = bytes.split_at(bytes.len() - 32);
    if Sha256::digest(body).as_slice() != digest {
        return None;
    }
    let mut r = Reader { bytes: body, pos: 0 };
    if r.take(4)? != MAGIC || r.u32()? != FORMAT_VERSION || r.take(32)? != key {
        return None;
    }
    let w0 = group.finite_weyl_group();
    let nlayers = r.u32()? as usize;
    let mut layers = Vec::with_capacity(nlayers);
    for k in 0..nlayers {
        let count = r.u32()? as usize;
        let mut layer = Vec::with_capacity(count.min(1 << 20));
        for _ in 0..count {
            let len = r.u32()? as usize;
            let end = r.pos + len;
            let dim = r.u8()? as usize;
            let lambda: LatticeVec = (0..dim).map(|_| r.i64()).collect::<Option<_>>()?;
            let plen = r.u16()? as usize;
            let perm: Vec<u16> = (0..plen).map(|_| r.u16()).collect::<Option<_>>()?;
            if r.u32()? as usize != k || r.pos != end {
                return None;
            }
            let w = w0.from_root_permutation(&perm)?;
            layer.push(IwahoriWeylElement::new(lambda, w));
        }
        layers.push(layer);
    }
    (r.pos == body.len()).then_some(layers)
}
