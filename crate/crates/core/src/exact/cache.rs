use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::table::{walk_area_table, Constraint, DpTable, Layer};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"IPDW";
const VERSION: u32 = 1;

/// Writes `table` as a header followed, for each step `n ≤ N_max`, by the
/// layer's area cap and its `log_mass[g][v]` for `|v| ≤ g ≤ cap`,
/// little-endian.
pub fn save_table<W: Write>(table: &DpTable, w: W) -> Result<()> {
    let mut w = BufWriter::new(w);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&table.beta.to_le_bytes())?;
    w.write_all(&(table.n_max as u32).to_le_bytes())?;
    w.write_all(&(table.g_max as u32).to_le_bytes())?;
    w.write_all(&[table.constraint.code()])?;
    for layer in &table.layers {
        let cap = layer.cap();
        w.write_all(&(cap as u32).to_le_bytes())?;
        for g in 0..=cap {
            for v in -(g as i64)..=g as i64 {
                w.write_all(&layer.log_mass(v, g).to_le_bytes())?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

/// Header of a cache file.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CacheHeader {
    pub version: u32,
    pub beta: f64,
    pub n_max: usize,
    pub g_max: usize,
    pub constraint: Constraint,
}

fn read_header<R: Read>(r: &mut R) -> Result<CacheHeader> {
    if &read_array::<4, _>(r)? != MAGIC {
        return Err(Error::Format("not an IPDW table file".into()));
    }
    let version = u32::from_le_bytes(read_array(r)?);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported table version {version}")));
    }
    Ok(CacheHeader {
        version,
        beta: f64::from_le_bytes(read_array(r)?),
        n_max: u32::from_le_bytes(read_array(r)?) as usize,
        g_max: u32::from_le_bytes(read_array(r)?) as usize,
        constraint: Constraint::from_code(read_array::<1, _>(r)?[0])?,
    })
}

pub fn load_table<R: Read>(r: R) -> Result<DpTable> {
    let mut r = BufReader::new(r);
    let h = read_header(&mut r)?;
    let mut layers = Vec::with_capacity(h.n_max + 1);
    for _ in 0..=h.n_max {
        let cap = u32::from_le_bytes(read_array(&mut r)?) as usize;
        if cap > h.g_max {
            return Err(Error::Format(format!("layer cap {cap} exceeds G_max {}", h.g_max)));
        }
        let mut logs = Vec::with_capacity((cap + 1) * (cap + 1));
        for _ in 0..(cap + 1) * (cap + 1) {
            logs.push(f64::from_le_bytes(read_array(&mut r)?));
        }
        // column g starts at g², entry v at offset v + g
        layers.push(Layer::from_log_mass(cap, |v, g| logs[g * g + (v + g as i64) as usize]));
    }
    Ok(DpTable {
        beta: h.beta,
        n_max: h.n_max,
        g_max: h.g_max,
        constraint: h.constraint,
        layers,
    })
}

/// File name used for a table in a cache directory.
pub fn cache_file_name(beta: f64, n_max: usize, g_max: usize, constraint: Constraint) -> String {
    format!(
        "ipdw-{:016x}-{n_max}-{g_max}-{}.bin",
        beta.to_bits(),
        constraint.code()
    )
}

/// Loads the table from `dir` if a matching file exists; otherwise builds it
/// and stores it there.
pub fn cached_walk_area_table(
    dir: &Path,
    beta: f64,
    n_max: usize,
    g_max: usize,
    constraint: Constraint,
) -> Result<DpTable> {
    let path = dir.join(cache_file_name(beta, n_max, g_max, constraint));
    cached(&path, beta, n_max, g_max, |_| g_max, || walk_area_table(beta, n_max, g_max, constraint))
}

pub(crate) fn cached(
    path: &Path,
    beta: f64,
    n_max: usize,
    g_max: usize,
    cap: impl Fn(usize) -> usize,
    build: impl FnOnce() -> Result<DpTable>,
) -> Result<DpTable> {
    if let Ok(f) = File::open(path) {
        let t = load_table(f)?;
        let same = t.beta.to_bits() == beta.to_bits()
            && t.n_max == n_max
            && t.g_max == g_max
            && t.layers.iter().enumerate().all(|(n, l)| l.cap() == cap(n));
        if same {
            return Ok(t);
        }
    }
    let t = build()?;
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    save_table(&t, File::create(path)?)?;
    Ok(t)
}
