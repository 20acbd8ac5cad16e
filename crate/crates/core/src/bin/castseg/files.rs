//! Filesystem helpers shared by the subcommands.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use castseg::coco::CocoDataset;
use castseg::{Error, Result};

const IMAGE_EXTENSIONS: [&str; 2] = ["png", "pgm"];

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| IMAGE_EXTENSIONS.iter().any(|x| e.eq_ignore_ascii_case(x)))
}

pub fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// PNG and PGM files directly inside `dir`, sorted by file name.
pub fn list_images(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && is_image(&path) {
            out.push(path);
        }
    }
    out.sort_by_key(|p| file_name(p));
    Ok(out)
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Write through a temporary file in the target directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| Error::io(&dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// `path` with its extension replaced and `suffix` appended to the stem.
pub fn sibling(path: &Path, suffix: &str, extension: &str) -> PathBuf {
    path.with_file_name(format!("{}{suffix}.{extension}", stem(path)))
}

/// Image id for each file: the id of the same-named COCO image when a
/// reference dataset is given, otherwise 1, 2, ... in file-name order.
pub fn image_ids(images: &[PathBuf], reference: Option<&CocoDataset>) -> Result<BTreeMap<PathBuf, u64>> {
    let Some(coco) = reference else {
        return Ok(images.iter().cloned().zip(1..).collect());
    };
    let mut ids = BTreeMap::new();
    let mut missing = Vec::new();
    for path in images {
        match coco.image_by_name(&file_name(path)) {
            Some(image) => {
                ids.insert(path.clone(), image.id);
            }
            None => missing.push(file_name(path)),
        }
    }
    if !missing.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "images missing from the reference COCO file: {}",
            missing.join(", ")
        )));
    }
    Ok(ids)
}

/// Last run of ASCII digits in the file stem, e.g. `dets_iter300.json` → 300.
pub fn iteration_from_name(path: &Path) -> Option<u64> {
    let stem = stem(path);
    let end = stem.rfind(|c: char| c.is_ascii_digit())? + 1;
    let start = stem[..end].rfind(|c: char| !c.is_ascii_digit()).map_or(0, |i| i + 1);
    stem[start..end].parse().ok()
}
