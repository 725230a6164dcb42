//! PNG plumbing: RGB image files and the 16-bit grayscale root codec.

use std::io::Cursor;

use image::codecs::png::PngEncoder;
use image::{DynamicImage, ExtendedColorType, ImageEncoder, ImageFormat};
use rlfc_core::container::{RootCodec, RootCodecs};
use rlfc_core::{CodecId, Error, RawCodec, Result, RgbImage};

pub fn encode_rgb(img: &RgbImage) -> Vec<u8> {
    let mut out = Vec::new();
    PngEncoder::new(&mut out)
        .write_image(&img.data, img.width as u32, img.height as u32, ExtendedColorType::Rgb8)
        .expect("in-memory PNG encode of a well-formed image");
    out
}

pub fn decode_rgb(bytes: &[u8]) -> std::result::Result<RgbImage, image::ImageError> {
    let img = image::load_from_memory_with_format(bytes, ImageFormat::Png)?.into_rgb8();
    let (w, h) = img.dimensions();
    Ok(RgbImage::from_vec(w as usize, h as usize, img.into_raw()).expect("buffer matches dims"))
}

/// Lossless 16-bit grayscale PNG for root key views.
#[derive(Debug, Clone, Copy, Default)]
pub struct PngCodec;

impl RootCodec for PngCodec {
    fn encode(&self, samples: &[u16], width: usize, height: usize) -> Result<Vec<u8>> {
        if samples.len() != width * height {
            return Err(Error::DimensionMismatch);
        }
        let bytes: Vec<u8> = samples.iter().flat_map(|v| v.to_ne_bytes()).collect();
        let mut out = Vec::new();
        PngEncoder::new(&mut out)
            .write_image(&bytes, width as u32, height as u32, ExtendedColorType::L16)
            .map_err(|_| Error::Codec("PNG encode failed"))?;
        Ok(out)
    }

    fn decode(&self, bytes: &[u8], width: usize, height: usize) -> Result<Vec<u16>> {
        let mut reader = image::ImageReader::new(Cursor::new(bytes));
        reader.set_format(ImageFormat::Png);
        let img = reader.decode().map_err(|_| Error::Codec("PNG decode failed"))?;
        let DynamicImage::ImageLuma16(buf) = img else {
            return Err(Error::Codec("root PNG is not 16-bit grayscale"));
        };
        if buf.dimensions() != (width as u32, height as u32) {
            return Err(Error::Codec("root PNG dims differ from header"));
        }
        Ok(buf.into_raw())
    }
}

/// RAW and PNG root codecs.
#[derive(Debug, Clone, Copy, Default)]
pub struct StdCodecs;

impl RootCodecs for StdCodecs {
    fn codec(&self, id: CodecId) -> Option<&dyn RootCodec> {
        match id {
            CodecId::Raw => Some(&RawCodec),
            CodecId::Png => Some(&PngCodec),
            CodecId::Jpeg2000 => None,
        }
    }
}
