use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::trial_io::ObjectClass;

/// Gray levels above this value are foreground.
pub const MASK_THRESHOLD: u8 = 127;

/// Binary segmentation mask for one object class in one frame.
///
/// `bits` is row-major with one byte per pixel holding 0 or 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mask {
    pub width: usize,
    pub height: usize,
    pub bits: Vec<u8>,
    pub frame_index: usize,
    pub object_class: ObjectClass,
}

impl Mask {
    pub fn empty(width: usize, height: usize, object_class: ObjectClass, frame_index: usize) -> Self {
        Mask {
            width,
            height,
            bits: vec![0; width * height],
            frame_index,
            object_class,
        }
    }

    /// Builds a mask by thresholding 8-bit gray levels.
    pub fn from_gray(
        width: usize,
        height: usize,
        gray: &[u8],
        object_class: ObjectClass,
        frame_index: usize,
    ) -> Self {
        assert_eq!(gray.len(), width * height, "gray buffer size");
        Mask {
            width,
            height,
            bits: threshold(gray),
            frame_index,
            object_class,
        }
    }

    #[inline]
    pub fn get(&self, x: i64, y: i64) -> bool {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return false;
        }
        self.bits[y as usize * self.width + x as usize] != 0
    }

    pub fn set(&mut self, x: usize, y: usize, on: bool) {
        self.bits[y * self.width + x] = on as u8;
    }

    /// Sets every pixel in `[x0, x1) x [y0, y1)`, clipped to the image.
    pub fn fill_rect(&mut self, x0: i64, y0: i64, x1: i64, y1: i64) {
        let (x0, x1) = (x0.max(0) as usize, (x1.max(0) as usize).min(self.width));
        let (y0, y1) = (y0.max(0) as usize, (y1.max(0) as usize).min(self.height));
        for y in y0..y1.max(y0) {
            if x0 < x1 {
                self.bits[y * self.width + x0..y * self.width + x1].fill(1);
            }
        }
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b != 0).count()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    /// Re-thresholds the mask's own 0/1 levels; the result equals `self`.
    pub fn rethreshold(&self) -> Mask {
        let gray: Vec<u8> = self.bits.iter().map(|&b| b * 255).collect();
        Mask::from_gray(self.width, self.height, &gray, self.object_class, self.frame_index)
    }
}

fn threshold(gray: &[u8]) -> Vec<u8> {
    gray.iter().map(|&g| (g > MASK_THRESHOLD) as u8).collect()
}

/// Loads a binary PGM (`P5`) or 8-bit grayscale PNG mask.
pub fn load_mask(path: impl AsRef<Path>, object_class: ObjectClass, frame_index: usize) -> Result<Mask> {
    let path = path.as_ref();
    let data = fs::read(path).map_err(|e| Error::io(path, e))?;
    let (w, h, gray) = if data.starts_with(b"P5") {
        let (w, h, offset) = parse_pgm_header(&data).map_err(|message| Error::Image {
            path: path.to_path_buf(),
            message,
        })?;
        let gray = data.get(offset..offset + w * h).ok_or_else(|| Error::Image {
            path: path.to_path_buf(),
            message: format!("truncated pixel data: expected {} bytes", w * h),
        })?;
        return Ok(Mask {
            width: w,
            height: h,
            bits: threshold(gray),
            frame_index,
            object_class,
        });
    } else if data.starts_with(b"\x89PNG") {
        decode_png(&data).map_err(|message| Error::Image {
            path: path.to_path_buf(),
            message,
        })?
    } else {
        return Err(Error::Image {
            path: path.to_path_buf(),
            message: "unsupported format: expected binary PGM (P5) or PNG".into(),
        });
    };
    Ok(Mask::from_gray(w, h, &gray, object_class, frame_index))
}

/// Returns `(width, height, pixel data offset)`.
fn parse_pgm_header(data: &[u8]) -> std::result::Result<(usize, usize, usize), String> {
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        loop {
            match data.get(pos) {
                Some(b'#') => {
                    while data.get(pos).is_some_and(|&c| c != b'\n') {
                        pos += 1;
                    }
                }
                Some(c) if c.is_ascii_whitespace() => pos += 1,
                Some(_) => break,
                None => return Err("truncated PGM header".into()),
            }
        }
        let start = pos;
        while data.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        *field = std::str::from_utf8(&data[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format!("bad PGM header field at byte {start}"))?;
    }
    if !data.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err("missing whitespace after PGM maxval".into());
    }
    let [w, h, maxval] = fields;
    if maxval == 0 || maxval > 255 {
        return Err(format!("unsupported bit depth: maxval {maxval} (only 8-bit masks are accepted)"));
    }
    if w == 0 || h == 0 {
        return Err("zero image dimension".into());
    }
    Ok((w, h, pos + 1))
}

fn decode_png(data: &[u8]) -> std::result::Result<(usize, usize, Vec<u8>), String> {
    use image::{ColorType, ImageFormat};
    let img = image::load_from_memory_with_format(data, ImageFormat::Png).map_err(|e| e.to_string())?;
    match img.color() {
        ColorType::L8 => {
            let g = img.into_luma8();
            let (w, h) = g.dimensions();
            Ok((w as usize, h as usize, g.into_raw()))
        }
        other => Err(format!(
            "unsupported bit depth or color type {other:?}: expected 8-bit grayscale"
        )),
    }
}

/// Writes a mask as binary PGM with levels 0 and 255.
pub fn write_pgm(mask: &Mask, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::with_capacity(mask.bits.len() + 32);
    write!(out, "P5\n{} {}\n255\n", mask.width, mask.height).expect("write to vec");
    out.extend(mask.bits.iter().map(|&b| if b != 0 { 255u8 } else { 0 }));
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads only the header of a mask file and returns its dimensions.
pub fn probe_dimensions(path: impl AsRef<Path>) -> Result<(usize, usize)> {
    use std::io::Read;
    let path = path.as_ref();
    let mut head = Vec::with_capacity(512);
    fs::File::open(path)
        .and_then(|f| f.take(512).read_to_end(&mut head))
        .map_err(|e| Error::io(path, e))?;
    let image_err = |message: String| Error::Image {
        path: path.to_path_buf(),
        message,
    };
    if head.starts_with(b"P5") {
        let (w, h, _) = parse_pgm_header(&head).map_err(image_err)?;
        Ok((w, h))
    } else if head.starts_with(b"\x89PNG") && head.len() >= 26 {
        let be = |b: &[u8]| u32::from_be_bytes([b[0], b[1], b[2], b[3]]) as usize;
        let (bit_depth, color_type) = (head[24], head[25]);
        if bit_depth != 8 || color_type != 0 {
            return Err(image_err(format!(
                "unsupported bit depth {bit_depth} / color type {color_type}: expected 8-bit grayscale"
            )));
        }
        Ok((be(&head[16..20]), be(&head[20..24])))
    } else {
        Err(image_err("unsupported format: expected binary PGM (P5) or PNG".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pgm_bytes(w: usize, h: usize, maxval: usize, pixels: &[u8]) -> Vec<u8> {
        let mut v = format!("P5\n# comment\n{w} {h}\n{maxval}\n").into_bytes();
        v.extend_from_slice(pixels);
        v
    }

    #[test]
    fn all_zero_image_is_empty() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("z.pgm");
        fs::write(&p, pgm_bytes(8, 4, 255, &[0; 32])).unwrap();
        let m = load_mask(&p, ObjectClass::Needle, 3).unwrap();
        assert_eq!((m.width, m.height, m.frame_index), (8, 4, 3));
        assert_eq!(m.count_ones(), 0);
    }

    #[test]
    fn block_of_400_pixels() {
        let (w, h) = (50, 40);
        let mut px = vec![0u8; w * h];
        for y in 10..30 {
            for x in 5..25 {
                px[y * w + x] = 255;
            }
        }
        // Values at or below the threshold stay background.
        px[0] = 127;
        px[1] = 128;
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("b.pgm");
        fs::write(&p, pgm_bytes(w, h, 255, &px)).unwrap();
        let m = load_mask(&p, ObjectClass::Thread, 0).unwrap();
        assert_eq!(m.count_ones(), 401);
    }

    #[test]
    fn sixteen_bit_pgm_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.pgm");
        fs::write(&p, pgm_bytes(2, 2, 65535, &[0; 8])).unwrap();
        let err = load_mask(&p, ObjectClass::Needle, 0).unwrap_err();
        assert!(err.to_string().contains("bit depth"), "{err}");
    }

    #[test]
    fn png_gray8_and_gray16() {
        let dir = tempfile::tempdir().unwrap();
        let p8 = dir.path().join("a.png");
        let mut img = image::GrayImage::new(30, 30);
        for y in 0..20 {
            for x in 0..20 {
                img.put_pixel(x, y, image::Luma([255]));
            }
        }
        img.save(&p8).unwrap();
        assert_eq!(load_mask(&p8, ObjectClass::Needle, 0).unwrap().count_ones(), 400);

        let p16 = dir.path().join("b.png");
        let img16 = image::ImageBuffer::<image::Luma<u16>, Vec<u16>>::new(4, 4);
        img16.save(&p16).unwrap();
        let err = load_mask(&p16, ObjectClass::Needle, 0).unwrap_err();
        assert!(err.to_string().contains("bit depth"), "{err}");
    }

    #[test]
    fn pgm_round_trip_and_idempotent_threshold() {
        let mut m = Mask::empty(17, 9, ObjectClass::Ring, 2);
        m.fill_rect(3, 2, 11, 7);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.pgm");
        write_pgm(&m, &p).unwrap();
        let back = load_mask(&p, ObjectClass::Ring, 2).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.rethreshold(), back);
        assert_eq!(probe_dimensions(&p).unwrap(), (17, 9));
    }

    #[test]
    fn truncated_data_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.pgm");
        fs::write(&p, pgm_bytes(4, 4, 255, &[0; 10])).unwrap();
        assert!(load_mask(&p, ObjectClass::Needle, 0).is_err());
    }
}
