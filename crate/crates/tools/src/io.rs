//! OFF meshes, snowball square lists and atomic JSON artifacts.

use std::fmt::Write as _;
use std::path::Path;

use qsunif::math::Vec3;
use qsunif::spaces::snowball::Square;
use qsunif::spaces::{MeshedSphere, MetricMode, SquareComplex};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// `OFF` header, counts line `V F 0`, vertex lines, then `3 a b c`
/// triangle lines. `#` starts a comment.
pub fn write_off(coords: &[Vec3], tris: &[[u32; 3]]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "OFF\n{} {} 0", coords.len(), tris.len());
    for p in coords {
        let _ = writeln!(s, "{:?} {:?} {:?}", p[0], p[1], p[2]);
    }
    for t in tris {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    s
}

/// Finest level of a mesh as OFF text.
pub fn mesh_to_off(m: &MeshedSphere) -> Result<String> {
    let l = m.finest();
    let n = m.count(l)?;
    Ok(write_off(&m.coords()[..n], m.triangles(l)?))
}

fn fmt_err(line: usize, msg: &str) -> CliError {
    CliError::Format(format!("OFF line {line}: {msg}"))
}

pub fn read_off(text: &str) -> Result<(Vec<Vec3>, Vec<[u32; 3]>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (i, head) = lines.next().ok_or(fmt_err(0, "empty file"))?;
    if head != "OFF" {
        return Err(fmt_err(i, "missing OFF header"));
    }
    let (i, counts) = lines.next().ok_or(fmt_err(i, "missing counts"))?;
    let c: Vec<usize> = counts.split_whitespace().map(str::parse).collect::<std::result::Result<_, _>>().map_err(|_| fmt_err(i, "bad counts"))?;
    if c.len() != 3 {
        return Err(fmt_err(i, "expected 'V F E'"));
    }
    let mut coords = Vec::with_capacity(c[0]);
    for _ in 0..c[0] {
        let (i, l) = lines.next().ok_or(fmt_err(i, "too few vertex lines"))?;
        let v: Vec<f64> = l.split_whitespace().map(str::parse).collect::<std::result::Result<_, _>>().map_err(|_| fmt_err(i, "bad vertex"))?;
        if v.len() != 3 || !v.iter().all(|x| x.is_finite()) {
            return Err(fmt_err(i, "vertex needs three finite coordinates"));
        }
        coords.push([v[0], v[1], v[2]]);
    }
    let mut tris = Vec::with_capacity(c[1]);
    for _ in 0..c[1] {
        let (i, l) = lines.next().ok_or(fmt_err(i, "too few face lines"))?;
        let f: Vec<u32> = l.split_whitespace().map(str::parse).collect::<std::result::Result<_, _>>().map_err(|_| fmt_err(i, "bad face"))?;
        if f.len() != 4 || f[0] != 3 {
            return Err(fmt_err(i, "only triangles are supported"));
        }
        if f[1..].iter().any(|&v| v as usize >= c[0]) {
            return Err(fmt_err(i, "face references a missing vertex"));
        }
        tris.push([f[1], f[2], f[3]]);
    }
    if let Some((i, _)) = lines.next() {
        return Err(fmt_err(i, "trailing data"));
    }
    Ok((coords, tris))
}

pub fn load_off(path: &Path, mode: MetricMode) -> Result<MeshedSphere> {
    let text = read_file(path)?;
    let (coords, tris) = read_off(&text)?;
    let label = path.file_stem().and_then(|s| s.to_str()).unwrap_or("mesh");
    Ok(MeshedSphere::from_triangles(coords, tris, mode, label)?)
}

pub fn read_file(path: &Path) -> Result<String> {
    if !path.exists() {
        return Err(CliError::FileMissing(path.to_path_buf()));
    }
    std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e.to_string()))
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |e: std::io::Error| CliError::Io(path.to_path_buf(), e.to_string());
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    std::fs::write(&tmp, bytes).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<()> {
    write_atomic(path, to_json(v).as_bytes())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_file(path)?).map_err(|e| CliError::Format(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareRecord {
    /// Corners `o, o+u, o+u+v, o+v` as exact fractions.
    pub corners: [[String; 3]; 4],
    pub normal: [i64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnowballFile {
    pub levels: Vec<Vec<SquareRecord>>,
}

pub fn snowball_file(c: &SquareComplex) -> SnowballFile {
    let levels = c
        .levels
        .iter()
        .map(|l| {
            l.iter()
                .map(|s| SquareRecord { corners: s.corners().map(|p| p.map(|x| c.rational(x))), normal: s.normal() })
                .collect()
        })
        .collect();
    SnowballFile { levels }
}

fn parse_rational(s: &str, den: i64) -> Result<i64> {
    let bad = || CliError::Format(format!("bad rational '{s}'"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.parse::<i64>().map_err(|_| bad())?, d.parse::<i64>().map_err(|_| bad())?),
        None => (s.parse::<i64>().map_err(|_| bad())?, 1),
    };
    if d <= 0 || den % d != 0 {
        return Err(bad());
    }
    Ok(n * (den / d))
}

/// Rebuilds the complex over the denominator `5^n` of its finest level.
pub fn snowball_from_file(f: &SnowballFile) -> Result<SquareComplex> {
    if f.levels.is_empty() {
        return Err(CliError::Format("snowball file has no levels".into()));
    }
    let den = 5i64.pow(f.levels.len() as u32 - 1);
    let mut levels = Vec::with_capacity(f.levels.len());
    for l in &f.levels {
        let mut sq = Vec::with_capacity(l.len());
        for r in l {
            let mut c = [[0i64; 3]; 4];
            for (k, p) in r.corners.iter().enumerate() {
                for j in 0..3 {
                    c[k][j] = parse_rational(&p[j], den)?;
                }
            }
            let sub = |a: [i64; 3], b: [i64; 3]| [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
            let s = Square { origin: c[0], u: sub(c[1], c[0]), v: sub(c[3], c[0]) };
            if s.corners() != c || s.normal() != r.normal {
                return Err(CliError::Format("square corners are not a consistently oriented square".into()));
            }
            sq.push(s);
        }
        levels.push(sq);
    }
    Ok(SquareComplex { denominator: den, levels })
}
