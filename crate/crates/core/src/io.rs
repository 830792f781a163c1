//! Binary weight/image formats and CSV point clouds.
//!
//! * `WTS1`: magic `WTS1`, then `w, h, c, dnum` as little-endian `u32`, then
//!   `w·h·c·dnum` little-endian `f32` ordered map, channel, row, column.
//! * `IMG1`: magic `IMG1`, then `H, W, C` as little-endian `u32`, then `H·W·C`
//!   little-endian `f32`, row-major with channels innermost.
//! * CSV: one point per line, comma separated; a non-numeric first line is a
//!   header and is skipped.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::filterbank::ImageTensor;
use crate::pointcloud::{extract_spatial_filters, PointCloud, WeightTensor};
use crate::scalar::Scalar;

const WTS_MAGIC: &[u8; 4] = b"WTS1";
const IMG_MAGIC: &[u8; 4] = b"IMG1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    Wts1,
    Csv,
    Img1,
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wts1" => Ok(InputFormat::Wts1),
            "csv" => Ok(InputFormat::Csv),
            "img1" => Ok(InputFormat::Img1),
            other => Err(Error::InvalidParameter(format!("unknown input format {other:?}"))),
        }
    }
}

impl InputFormat {
    /// Guesses the format from the file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        path.extension()?.to_str()?.parse().ok()
    }
}

fn parse_err(location: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::ParseError { location: location.into(), reason: reason.into() }
}

struct Reader<'a> {
    bytes: &'a [u8],
    offset: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8]> {
        let end = self.offset.checked_add(len).filter(|&e| e <= self.bytes.len());
        let Some(end) = end else {
            return Err(parse_err(format!("byte {}", self.offset), format!("truncated {what}")));
        };
        let out = &self.bytes[self.offset..end];
        self.offset = end;
        Ok(out)
    }

    fn magic(&mut self, magic: &[u8; 4]) -> Result<()> {
        let got = self.take(4, "magic")?;
        if got != magic {
            return Err(parse_err(
                "byte 0",
                format!("expected magic {:?}, found {:?}", String::from_utf8_lossy(magic), String::from_utf8_lossy(got)),
            ));
        }
        Ok(())
    }

    fn u32(&mut self, what: &str) -> Result<usize> {
        let b = self.take(4, what)?;
        Ok(u32::from_le_bytes(b.try_into().expect("four bytes")) as usize)
    }

    fn f32s(&mut self, count: usize) -> Result<Vec<f32>> {
        let len = count
            .checked_mul(4)
            .ok_or_else(|| parse_err(format!("byte {}", self.offset), "value count overflows"))?;
        let raw = self.take(len, "payload")?;
        Ok(raw.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().expect("four bytes"))).collect())
    }

    fn finish(&self) -> Result<()> {
        if self.offset != self.bytes.len() {
            return Err(parse_err(
                format!("byte {}", self.offset),
                format!("{} trailing bytes", self.bytes.len() - self.offset),
            ));
        }
        Ok(())
    }
}

pub fn decode_wts1(bytes: &[u8]) -> Result<WeightTensor<f32>> {
    let mut r = Reader { bytes, offset: 0 };
    r.magic(WTS_MAGIC)?;
    let (w, h, c, dnum) = (r.u32("w")?, r.u32("h")?, r.u32("c")?, r.u32("dnum")?);
    let count = [w, h, c, dnum]
        .iter()
        .try_fold(1usize, |acc, &x| acc.checked_mul(x))
        .ok_or_else(|| parse_err("byte 4", "tensor size overflows"))?;
    let values = r.f32s(count)?;
    r.finish()?;
    WeightTensor::new(w, h, c, dnum, values)
}

pub fn encode_wts1<T: Scalar>(tensor: &WeightTensor<T>) -> Vec<u8> {
    let mut out = Vec::with_capacity(20 + 4 * tensor.values().len());
    out.extend_from_slice(WTS_MAGIC);
    for x in [tensor.w, tensor.h, tensor.c, tensor.dnum] {
        out.extend_from_slice(&(x as u32).to_le_bytes());
    }
    for v in tensor.values() {
        out.extend_from_slice(&(v.as_f64() as f32).to_le_bytes());
    }
    out
}

pub fn decode_img1(bytes: &[u8]) -> Result<ImageTensor<f32>> {
    let mut r = Reader { bytes, offset: 0 };
    r.magic(IMG_MAGIC)?;
    let (h, w, c) = (r.u32("H")?, r.u32("W")?, r.u32("C")?);
    let count = [h, w, c]
        .iter()
        .try_fold(1usize, |acc, &x| acc.checked_mul(x))
        .ok_or_else(|| parse_err("byte 4", "image size overflows"))?;
    let values = r.f32s(count)?;
    r.finish()?;
    ImageTensor::new(h, w, c, values)
}

pub fn encode_img1<T: Scalar>(image: &ImageTensor<T>) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 4 * image.values().len());
    out.extend_from_slice(IMG_MAGIC);
    for x in [image.height, image.width, image.channels] {
        out.extend_from_slice(&(x as u32).to_le_bytes());
    }
    for v in image.values() {
        out.extend_from_slice(&(v.as_f64() as f32).to_le_bytes());
    }
    out
}

pub fn parse_csv<T: Scalar>(text: &str) -> Result<PointCloud<T>> {
    let mut cloud: Option<PointCloud<T>> = None;
    let mut row = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        row.clear();
        let mut numeric = true;
        for field in line.split(',') {
            match field.trim().parse::<f64>() {
                Ok(v) => row.push(T::of(v)),
                Err(_) => {
                    numeric = false;
                    break;
                }
            }
        }
        if !numeric {
            if cloud.is_none() && lineno == 0 {
                continue;
            }
            return Err(parse_err(format!("line {}", lineno + 1), "non-numeric field"));
        }
        match cloud.as_mut() {
            None => {
                let mut c = PointCloud::new(row.len())?;
                c.push(&row)?;
                cloud = Some(c);
            }
            Some(c) => c.push(&row).map_err(|_| {
                Error::ShapeError(format!(
                    "line {} has {} fields, expected {}",
                    lineno + 1,
                    row.len(),
                    c.dim()
                ))
            })?,
        }
    }
    cloud.ok_or(Error::EmptyCloud)
}

/// One line per point, shortest round-trip decimal text.
pub fn format_csv<T: Scalar>(cloud: &PointCloud<T>) -> String {
    let mut out = String::new();
    for p in cloud.points() {
        let fields: Vec<String> = p.iter().map(|x| format_float(x.as_f64())).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

/// Reads a point cloud; WTS1 input is sliced into spatial filters.
pub fn load_point_cloud(path: &Path, format: InputFormat) -> Result<PointCloud<f64>> {
    match format {
        InputFormat::Csv => parse_csv(&fs::read_to_string(path)?),
        InputFormat::Wts1 => {
            let tensor = decode_wts1(&fs::read(path)?)?;
            Ok(extract_spatial_filters(&tensor).cast())
        }
        InputFormat::Img1 => {
            // each pixel's channel vector is a point
            let image = decode_img1(&fs::read(path)?)?;
            let mut cloud = PointCloud::new(image.channels)?;
            for (k, px) in image.values().chunks_exact(image.channels).enumerate() {
                let row: Vec<f64> = px.iter().map(|&v| f64::from(v)).collect();
                let (r, c) = (k / image.width, k % image.width);
                cloud.push_labeled(&row, format!("px{r}/{c}"))?;
            }
            Ok(cloud)
        }
    }
}

/// Writes via a temporary sibling file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidParameter(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_basic_and_header() {
        let c: PointCloud<f64> = parse_csv("1,2\n3,4").unwrap();
        assert_eq!((c.len(), c.dim()), (2, 2));
        let c: PointCloud<f64> = parse_csv("x,y\n1,2\n\n3,4\n").unwrap();
        assert_eq!(c.as_flat(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn csv_errors() {
        assert!(matches!(parse_csv::<f64>("1,2\n3"), Err(Error::ShapeError(_))));
        assert!(matches!(parse_csv::<f64>("1,2\n3,a"), Err(Error::ParseError { .. })));
        assert!(matches!(parse_csv::<f64>("x,y\n"), Err(Error::EmptyCloud)));
    }

    #[test]
    fn wts1_layout() {
        let values: Vec<f32> = (0..36).map(|v| v as f32).collect();
        let t = WeightTensor::new(3, 3, 2, 2, values).unwrap();
        let bytes = encode_wts1(&t);
        assert_eq!(&bytes[..4], b"WTS1");
        assert_eq!(&bytes[4..8], &3u32.to_le_bytes());
        assert_eq!(&bytes[16..20], &2u32.to_le_bytes());
        assert_eq!(&bytes[20 + 4 * 9..20 + 4 * 10], &9.0f32.to_le_bytes());
        assert_eq!(decode_wts1(&bytes).unwrap(), t);
        let c = extract_spatial_filters(&decode_wts1(&bytes).unwrap());
        assert_eq!((c.len(), c.dim()), (4, 9));
    }

    #[test]
    fn wts1_rejects_bad_input() {
        let t = WeightTensor::new(3, 3, 1, 1, vec![1.0f32; 9]).unwrap();
        let bytes = encode_wts1(&t);
        assert!(matches!(decode_wts1(&bytes[..30]), Err(Error::ParseError { .. })));
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(decode_wts1(&extra).is_err());
        let mut bad = bytes;
        bad[0] = b'X';
        assert!(decode_wts1(&bad).is_err());
    }

    #[test]
    fn img1_round_trip() {
        let img = ImageTensor::new(2, 3, 2, (0..12).map(|v| v as f32 * 0.5).collect()).unwrap();
        let bytes = encode_img1(&img);
        assert_eq!(&bytes[..4], b"IMG1");
        assert_eq!(decode_img1(&bytes).unwrap(), img);
    }

    #[test]
    fn float_text_round_trips() {
        for x in [0.1, 1.0 / 3.0, 2f64.sqrt(), -1e-300, 0.0] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_float(1.0), "1.0");
    }
}
