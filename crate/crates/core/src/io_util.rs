use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

fn staging_path(path: &Path) -> PathBuf {
    let mut name = OsString::from(".");
    name.push(path.file_name().unwrap_or_default());
    name.push(".partial");
    path.with_file_name(name)
}

/// Writes `bytes` next to `path` and renames over it, so readers never see a
/// half-written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let staging = staging_path(path);
    let mut file = fs::File::create(&staging).map_err(|e| Error::io(&staging, e))?;
    file.write_all(bytes).map_err(|e| Error::io(&staging, e))?;
    file.sync_all().map_err(|e| Error::io(&staging, e))?;
    drop(file);
    fs::rename(&staging, path).map_err(|e| Error::io(path, e))
}

/// Encodes a PNG in memory and writes it atomically.
pub(crate) fn write_png<P, C>(path: &Path, img: &::image::ImageBuffer<P, C>) -> Result<()>
where
    P: ::image::PixelWithColorType,
    [P::Subpixel]: ::image::EncodableLayout,
    C: std::ops::Deref<Target = [P::Subpixel]>,
{
    let mut buf = std::io::Cursor::new(Vec::new());
    img.write_to(&mut buf, ::image::ImageFormat::Png)
        .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    write_atomic(path, buf.get_ref())
}

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}
