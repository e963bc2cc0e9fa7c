//! File formats: text-first tensor and mask files with an optional binary
//! twin, sweep plans, and CSV results. All writes go through a temp file
//! plus rename.
//!
//! Text tensor layout (`ttensor v1`): a magic line, a `shape` line, then one
//! value per line in vectorization order (first index fastest). Values use
//! Rust's shortest-round-trip float formatting, so finite doubles survive a
//! write/read cycle bit-exactly. Mask files (`ttmask v1`) carry `0`/`1`
//! lines instead. The binary twins open with an 8-byte magic, then the
//! order, the shape, and the payload as 64-bit little-endian words.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::completion::SolverConfig;
use crate::error::{Error, Result};
use crate::experiments::{Method, SweepPlan, SweepResult};
use crate::tensor::{DenseTensor, ObservationMask};

const TENSOR_MAGIC_TEXT: &str = "ttensor v1";
const MASK_MAGIC_TEXT: &str = "ttmask v1";
const TENSOR_MAGIC_BIN: &[u8; 8] = b"TTNSRB1\0";
const MASK_MAGIC_BIN: &[u8; 8] = b"TTMSKB1\0";

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

/// Write `bytes` to `path` atomically: a sibling temp file is renamed over
/// the target only after the full payload is flushed.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp).map_err(|e| io_err(&tmp, e))?;
        f.write_all(bytes).map_err(|e| io_err(&tmp, e))?;
        f.sync_all().map_err(|e| io_err(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))?;
    if let Some(dir) = dir {
        // Renames in an unsynced directory can be lost on crash; ignore
        // filesystems that refuse to open directories.
        if let Ok(d) = fs::File::open(dir) {
            let _ = d.sync_all();
        }
    }
    Ok(())
}

fn parse_shape_line(path: &Path, line_no: usize, line: &str) -> Result<Vec<usize>> {
    let rest = line
        .strip_prefix("shape")
        .ok_or_else(|| parse_err(path, line_no, "expected a 'shape ...' line"))?;
    let shape: Vec<usize> = rest
        .split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| parse_err(path, line_no, format!("invalid mode size '{tok}'")))
        })
        .collect::<Result<_>>()?;
    if shape.is_empty() {
        return Err(parse_err(path, line_no, "shape must list at least one mode"));
    }
    if shape.contains(&0) {
        return Err(parse_err(path, line_no, "mode sizes must be positive"));
    }
    Ok(shape)
}

/// Write a tensor in the text format.
pub fn write_tensor(path: impl AsRef<Path>, t: &DenseTensor) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    out.push_str(TENSOR_MAGIC_TEXT);
    out.push('\n');
    out.push_str("shape");
    for s in t.shape() {
        out.push(' ');
        out.push_str(&s.to_string());
    }
    out.push('\n');
    for v in t.data() {
        out.push_str(&format!("{v}\n"));
    }
    write_atomic(path, out.as_bytes())
}

/// Write a tensor in the binary format.
pub fn write_tensor_binary(path: impl AsRef<Path>, t: &DenseTensor) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::with_capacity(16 + 8 * (t.order() + t.len()));
    out.extend_from_slice(TENSOR_MAGIC_BIN);
    out.extend_from_slice(&(t.order() as u64).to_le_bytes());
    for &s in t.shape() {
        out.extend_from_slice(&(s as u64).to_le_bytes());
    }
    for &v in t.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    write_atomic(path, &out)
}

/// Read a tensor file, auto-detecting the text or binary format.
pub fn read_tensor(path: impl AsRef<Path>) -> Result<DenseTensor> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    if bytes.starts_with(TENSOR_MAGIC_BIN) {
        return read_tensor_binary(path, &bytes);
    }
    let text = String::from_utf8(bytes)
        .map_err(|_| parse_err(path, 1, "file is neither valid UTF-8 text nor binary"))?;
    read_tensor_text(path, &text)
}

fn read_tensor_text(path: &Path, text: &str) -> Result<DenseTensor> {
    let mut lines = text.lines().enumerate();
    let (_, magic) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    if magic.trim_end() != TENSOR_MAGIC_TEXT {
        return Err(parse_err(
            path,
            1,
            format!("bad magic '{magic}', expected '{TENSOR_MAGIC_TEXT}'"),
        ));
    }
    let (line_no, shape_line) = lines
        .next()
        .ok_or_else(|| parse_err(path, 2, "missing shape line"))?;
    let shape = parse_shape_line(path, line_no + 1, shape_line)?;
    let expected: usize = shape.iter().product();
    let mut data = Vec::with_capacity(expected);
    for (line_no, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v = line
            .parse::<f64>()
            .map_err(|_| parse_err(path, line_no + 1, format!("invalid value '{line}'")))?;
        data.push(v);
    }
    if data.len() != expected {
        return Err(parse_err(
            path,
            1,
            format!(
                "payload length mismatch: expected {expected} values for shape {shape:?}, got {}",
                data.len()
            ),
        ));
    }
    DenseTensor::new(shape, data)
}

fn read_tensor_binary(path: &Path, bytes: &[u8]) -> Result<DenseTensor> {
    let mut cursor = TENSOR_MAGIC_BIN.len();
    let take_u64 = |cursor: &mut usize| -> Result<u64> {
        let end = *cursor + 8;
        let chunk = bytes
            .get(*cursor..end)
            .ok_or_else(|| parse_err(path, 0, "truncated binary header"))?;
        *cursor = end;
        Ok(u64::from_le_bytes(chunk.try_into().unwrap()))
    };
    let order = take_u64(&mut cursor)? as usize;
    if order == 0 || order > crate::tensor::MAX_ORDER {
        return Err(parse_err(path, 0, format!("invalid order {order}")));
    }
    let mut shape = Vec::with_capacity(order);
    for _ in 0..order {
        shape.push(take_u64(&mut cursor)? as usize);
    }
    let expected: usize = shape.iter().product();
    let payload = &bytes[cursor..];
    if payload.len() != expected * 8 {
        return Err(parse_err(
            path,
            0,
            format!(
                "payload length mismatch: expected {expected} values, got {}",
                payload.len() / 8
            ),
        ));
    }
    let data = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    DenseTensor::new(shape, data)
}

/// Write a mask in the text format.
pub fn write_mask(path: impl AsRef<Path>, mask: &ObservationMask) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    out.push_str(MASK_MAGIC_TEXT);
    out.push('\n');
    out.push_str("shape");
    for s in mask.shape() {
        out.push(' ');
        out.push_str(&s.to_string());
    }
    out.push('\n');
    for &b in mask.bits() {
        out.push(if b { '1' } else { '0' });
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

/// Write a mask in the binary format.
pub fn write_mask_binary(path: impl AsRef<Path>, mask: &ObservationMask) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::with_capacity(16 + 8 * mask.shape().len() + mask.len());
    out.extend_from_slice(MASK_MAGIC_BIN);
    out.extend_from_slice(&(mask.shape().len() as u64).to_le_bytes());
    for &s in mask.shape() {
        out.extend_from_slice(&(s as u64).to_le_bytes());
    }
    out.extend(mask.bits().iter().map(|&b| u8::from(b)));
    write_atomic(path, &out)
}

/// Read a mask file, auto-detecting the text or binary format.
pub fn read_mask(path: impl AsRef<Path>) -> Result<ObservationMask> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    if bytes.starts_with(MASK_MAGIC_BIN) {
        return read_mask_binary(path, &bytes);
    }
    let text = String::from_utf8(bytes)
        .map_err(|_| parse_err(path, 1, "file is neither valid UTF-8 text nor binary"))?;
    read_mask_text(path, &text)
}

fn read_mask_text(path: &Path, text: &str) -> Result<ObservationMask> {
    let mut lines = text.lines().enumerate();
    let (_, magic) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    if magic.trim_end() != MASK_MAGIC_TEXT {
        return Err(parse_err(
            path,
            1,
            format!("bad magic '{magic}', expected '{MASK_MAGIC_TEXT}'"),
        ));
    }
    let (line_no, shape_line) = lines
        .next()
        .ok_or_else(|| parse_err(path, 2, "missing shape line"))?;
    let shape = parse_shape_line(path, line_no + 1, shape_line)?;
    let expected: usize = shape.iter().product();
    let mut bits = Vec::with_capacity(expected);
    for (line_no, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        match line {
            "0" => bits.push(false),
            "1" => bits.push(true),
            other => {
                return Err(parse_err(
                    path,
                    line_no + 1,
                    format!("mask values must be 0 or 1, got '{other}'"),
                ))
            }
        }
    }
    if bits.len() != expected {
        return Err(parse_err(
            path,
            1,
            format!(
                "payload length mismatch: expected {expected} bits for shape {shape:?}, got {}",
                bits.len()
            ),
        ));
    }
    ObservationMask::new(shape, bits)
}

fn read_mask_binary(path: &Path, bytes: &[u8]) -> Result<ObservationMask> {
    let mut cursor = MASK_MAGIC_BIN.len();
    let take_u64 = |cursor: &mut usize| -> Result<u64> {
        let end = *cursor + 8;
        let chunk = bytes
            .get(*cursor..end)
            .ok_or_else(|| parse_err(path, 0, "truncated binary header"))?;
        *cursor = end;
        Ok(u64::from_le_bytes(chunk.try_into().unwrap()))
    };
    let order = take_u64(&mut cursor)? as usize;
    if order == 0 || order > crate::tensor::MAX_ORDER {
        return Err(parse_err(path, 0, format!("invalid order {order}")));
    }
    let mut shape = Vec::with_capacity(order);
    for _ in 0..order {
        shape.push(take_u64(&mut cursor)? as usize);
    }
    let expected: usize = shape.iter().product();
    let payload = &bytes[cursor..];
    if payload.len() != expected {
        return Err(parse_err(
            path,
            0,
            format!(
                "payload length mismatch: expected {expected} bits, got {}",
                payload.len()
            ),
        ));
    }
    let bits = payload
        .iter()
        .map(|&b| match b {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(parse_err(path, 0, format!("mask byte must be 0 or 1, got {other}"))),
        })
        .collect::<Result<Vec<bool>>>()?;
    ObservationMask::new(shape, bits)
}

/// Render sweep rows as CSV with the fixed column set
/// `method,obs_ratio,trial,iterations,reme,seconds`.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from("method,obs_ratio,trial,iterations,reme,seconds\n");
    for row in &result.rows {
        out.push_str(&format!(
            "{},{},{},{},{:e},{:.3}\n",
            row.method, row.obs_ratio, row.trial, row.iterations, row.reme, row.seconds
        ));
    }
    out
}

/// Write sweep results as CSV.
pub fn write_sweep_csv(path: impl AsRef<Path>, result: &SweepResult) -> Result<()> {
    write_atomic(path.as_ref(), sweep_csv(result).as_bytes())
}

/// Parse a sweep plan from `key = value` lines.
///
/// ```text
/// shape   = 8,8,8,8
/// rank    = 1,2,4,2,1
/// ratios  = 0.2,0.3,0.4,0.5
/// trials  = 12
/// methods = tcam-tt, tmm1, tmm2, tmm3
/// seed    = 7
/// # optional: tol, max_iter, ridge, tmm_max_iter
/// ```
pub fn parse_plan(path: impl AsRef<Path>, text: &str) -> Result<SweepPlan> {
    let path = path.as_ref();
    let mut shape = None;
    let mut rank = None;
    let mut ratios = None;
    let mut trials = None;
    let mut methods = None;
    let mut seed = None;
    let mut config = SolverConfig::default();
    let mut tmm_max_iter = 1000;

    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(path, line_no + 1, "expected 'key = value'"))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |msg: String| parse_err(path, line_no + 1, msg);
        match key {
            "shape" => shape = Some(parse_usize_list(value).map_err(bad)?),
            "rank" => rank = Some(parse_usize_list(value).map_err(bad)?),
            "ratios" => ratios = Some(parse_f64_list(value).map_err(bad)?),
            "trials" => {
                trials = Some(value.parse::<usize>().map_err(|_| {
                    parse_err(path, line_no + 1, format!("invalid trials '{value}'"))
                })?)
            }
            "methods" => {
                methods = Some(
                    value
                        .split(',')
                        .map(Method::parse)
                        .collect::<Result<Vec<_>>>()?,
                )
            }
            "seed" => {
                seed = Some(value.parse::<u64>().map_err(|_| {
                    parse_err(path, line_no + 1, format!("invalid seed '{value}'"))
                })?)
            }
            "tol" => {
                config.tol = value.parse::<f64>().map_err(|_| {
                    parse_err(path, line_no + 1, format!("invalid tol '{value}'"))
                })?
            }
            "max_iter" => {
                config.max_iter = value.parse::<usize>().map_err(|_| {
                    parse_err(path, line_no + 1, format!("invalid max_iter '{value}'"))
                })?
            }
            "ridge" => {
                config.ridge = value.parse::<f64>().map_err(|_| {
                    parse_err(path, line_no + 1, format!("invalid ridge '{value}'"))
                })?
            }
            "tmm_max_iter" => {
                tmm_max_iter = value.parse::<usize>().map_err(|_| {
                    parse_err(path, line_no + 1, format!("invalid tmm_max_iter '{value}'"))
                })?
            }
            other => {
                return Err(parse_err(
                    path,
                    line_no + 1,
                    format!("unknown plan key '{other}'"),
                ))
            }
        }
    }

    let missing = |what: &str| parse_err(path, 1, format!("plan is missing '{what}'"));
    let plan = SweepPlan {
        shape: shape.ok_or_else(|| missing("shape"))?,
        rank: rank.ok_or_else(|| missing("rank"))?,
        ratios: ratios.ok_or_else(|| missing("ratios"))?,
        trials: trials.ok_or_else(|| missing("trials"))?,
        methods: methods.ok_or_else(|| missing("methods"))?,
        seed_base: seed.ok_or_else(|| missing("seed"))?,
        config,
        tmm_max_iter,
    };
    plan.validate()?;
    Ok(plan)
}

/// Read and parse a sweep plan file.
pub fn read_plan(path: impl AsRef<Path>) -> Result<SweepPlan> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_plan(path, &text)
}

/// Comma-separated positive integers, e.g. shapes and rank vectors.
pub fn parse_usize_list(s: &str) -> std::result::Result<Vec<usize>, String> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| format!("invalid integer '{}'", tok.trim()))
        })
        .collect()
}

/// Comma-separated floats, e.g. observation ratios.
pub fn parse_f64_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| format!("invalid number '{}'", tok.trim()))
        })
        .collect()
}
