//! Canonical on-disk formats: one network per `.mask` file, plus a CSV
//! manifest describing a directory of such files.
//!
//! The mask format is line-oriented and canonical (edges in ascending
//! lexicographic order), so equal stacks always serialize to identical
//! bytes:
//!
//! ```text
//! motifgrid-mask v1
//! layers <L>
//! mask <i> <rows> <cols> <edge_count>
//! <row> <col>
//! ...
//! ```

use crate::mask::{MaskMatrix, MaskStack};
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;
use thiserror::Error;

pub const MASK_FORMAT_HEADER: &str = "motifgrid-mask v1";
pub const MASK_FILE_EXT: &str = "mask";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn parse_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse { line, message: message.into() }
}

/// Serialize a stack to canonical bytes.
pub fn mask_to_string(stack: &MaskStack) -> String {
    let mut out = String::new();
    writeln!(out, "{MASK_FORMAT_HEADER}").unwrap();
    writeln!(out, "layers {}", stack.len()).unwrap();
    for (i, m) in stack.masks().iter().enumerate() {
        writeln!(out, "mask {} {} {} {}", i, m.rows(), m.cols(), m.count_ones()).unwrap();
        for (r, c) in m.edges() {
            writeln!(out, "{r} {c}").unwrap();
        }
    }
    out
}

/// Write a stack to `path` in the canonical format.
pub fn write_mask_file(stack: &MaskStack, path: impl AsRef<Path>) -> io::Result<()> {
    fs::write(path, mask_to_string(stack))
}

/// Parse canonical bytes. The label is supplied by the caller (files carry
/// no label; collections keep labels in the manifest, single files use the
/// file stem).
pub fn mask_from_str(text: &str, label: impl Into<String>) -> Result<MaskStack, FormatError> {
    let mut lines = text.lines().enumerate();
    let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    if header.trim_end() != MASK_FORMAT_HEADER {
        return Err(parse_err(ln + 1, format!("expected header `{MASK_FORMAT_HEADER}`")));
    }
    let (ln, layers_line) = lines.next().ok_or_else(|| parse_err(2, "missing `layers` line"))?;
    let layer_count: usize = layers_line
        .strip_prefix("layers ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| parse_err(ln + 1, "expected `layers <L>`"))?;

    let mut masks = Vec::with_capacity(layer_count);
    for i in 0..layer_count {
        let (ln, mask_line) =
            lines.next().ok_or_else(|| parse_err(0, format!("missing `mask {i}` block")))?;
        let fields: Vec<&str> = mask_line.split_whitespace().collect();
        if fields.len() != 5 || fields[0] != "mask" {
            return Err(parse_err(ln + 1, "expected `mask <i> <rows> <cols> <edge_count>`"));
        }
        let index: usize =
            fields[1].parse().map_err(|_| parse_err(ln + 1, "bad mask index"))?;
        if index != i {
            return Err(parse_err(ln + 1, format!("expected mask index {i}, found {index}")));
        }
        let rows: usize = fields[2].parse().map_err(|_| parse_err(ln + 1, "bad row count"))?;
        let cols: usize = fields[3].parse().map_err(|_| parse_err(ln + 1, "bad column count"))?;
        let edge_count: usize =
            fields[4].parse().map_err(|_| parse_err(ln + 1, "bad edge count"))?;

        let mut mask = MaskMatrix::zeros(rows, cols);
        let mut prev: Option<(usize, usize)> = None;
        for _ in 0..edge_count {
            let (ln, edge_line) =
                lines.next().ok_or_else(|| parse_err(0, format!("mask {i}: truncated edge list")))?;
            let mut parts = edge_line.split_whitespace();
            let r: usize = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| parse_err(ln + 1, "expected `<row> <col>`"))?;
            let c: usize = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| parse_err(ln + 1, "expected `<row> <col>`"))?;
            if parts.next().is_some() {
                return Err(parse_err(ln + 1, "trailing fields on edge line"));
            }
            if r >= rows || c >= cols {
                return Err(parse_err(ln + 1, format!("edge ({r}, {c}) outside {rows}x{cols} mask")));
            }
            if let Some(p) = prev {
                if (r, c) <= p {
                    return Err(parse_err(ln + 1, "edges out of canonical ascending order"));
                }
            }
            prev = Some((r, c));
            mask.set(r, c, true);
        }
        masks.push(mask);
    }
    if let Some((ln, extra)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(parse_err(ln + 1, format!("unexpected trailing content `{extra}`")));
    }
    Ok(MaskStack::new(label, masks))
}

/// Read a stack from a file; the label is the file stem.
pub fn read_mask_file(path: impl AsRef<Path>) -> Result<MaskStack, FormatError> {
    let path = path.as_ref();
    let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let text = fs::read_to_string(path)?;
    mask_from_str(&text, label)
}

/// One row of a collection manifest. The trainer fields are present only
/// for sweep snapshots.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifestEntry {
    pub file: String,
    pub label: String,
    pub sparsity_tag: String,
    pub network_id: Option<u64>,
    pub level: Option<f64>,
    pub global_sparsity: Option<f64>,
    pub train_mse: Option<f64>,
    pub val_mse: Option<f64>,
}

impl ManifestEntry {
    pub fn new(file: impl Into<String>, label: impl Into<String>, tag: impl Into<String>) -> Self {
        Self {
            file: file.into(),
            label: label.into(),
            sparsity_tag: tag.into(),
            network_id: None,
            level: None,
            global_sparsity: None,
            train_mse: None,
            val_mse: None,
        }
    }
}

pub const MANIFEST_FILE: &str = "manifest.csv";
const MANIFEST_COLUMNS: [&str; 8] =
    ["file", "label", "sparsity", "network_id", "level", "global_sparsity", "train_mse", "val_mse"];

fn opt_str<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

/// Serialize manifest rows to CSV bytes.
pub fn manifest_to_string(entries: &[ManifestEntry]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(MANIFEST_COLUMNS).unwrap();
    for e in entries {
        w.write_record([
            e.file.clone(),
            e.label.clone(),
            e.sparsity_tag.clone(),
            opt_str(&e.network_id),
            opt_str(&e.level),
            opt_str(&e.global_sparsity),
            opt_str(&e.train_mse),
            opt_str(&e.val_mse),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

pub fn write_manifest(entries: &[ManifestEntry], path: impl AsRef<Path>) -> io::Result<()> {
    fs::write(path, manifest_to_string(entries))
}

fn opt_parse<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<Option<T>, FormatError> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|_| parse_err(line, format!("bad {what} `{s}`")))
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>, FormatError> {
    let text = fs::read_to_string(path)?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if headers.iter().ne(MANIFEST_COLUMNS) {
        return Err(parse_err(1, "unexpected manifest columns"));
    }
    let mut entries = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let r = record.map_err(|e| parse_err(line, e.to_string()))?;
        if r.len() != MANIFEST_COLUMNS.len() {
            return Err(parse_err(line, "wrong field count"));
        }
        entries.push(ManifestEntry {
            file: r[0].to_string(),
            label: r[1].to_string(),
            sparsity_tag: r[2].to_string(),
            network_id: opt_parse(&r[3], line, "network_id")?,
            level: opt_parse(&r[4], line, "level")?,
            global_sparsity: opt_parse(&r[5], line, "global_sparsity")?,
            train_mse: opt_parse(&r[6], line, "train_mse")?,
            val_mse: opt_parse(&r[7], line, "val_mse")?,
        });
    }
    Ok(entries)
}
