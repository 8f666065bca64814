//! Nine-color HSV profiles.
//!
//! HSV uses the 8-bit convention: hue in `0..=180` (two degrees per unit),
//! saturation and value in `0..=255`. A profile is computed per color by
//! masking, dilating with a 3×3 square, filling outer contours and dividing
//! the filled area by the image area.

mod morphology;

use std::fmt;
use std::path::{Path, PathBuf};

use image::RgbImage;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use morphology::{contour_area_ratio, dilate, fill_outer_contours, BinaryMask};

#[derive(Debug, thiserror::Error)]
pub enum ColorError {
    #[error("image has zero area")]
    EmptyImage,
    #[error("failed to read image {path}: {source}")]
    Decode {
        path: String,
        #[source]
        source: image::ImageError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HsvPixel {
    pub h: u8,
    pub s: u8,
    pub v: u8,
}

impl HsvPixel {
    pub const MAX_HUE: u8 = 180;

    pub fn new(h: u8, s: u8, v: u8) -> Self {
        debug_assert!(h <= Self::MAX_HUE);
        HsvPixel { h, s, v }
    }
}

/// Standard RGB to HSV conversion scaled to the 8-bit convention and
/// rounded to the nearest integer.
pub fn rgb_to_hsv(r: u8, g: u8, b: u8) -> HsvPixel {
    let (rf, gf, bf) = (f64::from(r), f64::from(g), f64::from(b));
    let max = rf.max(gf).max(bf);
    let min = rf.min(gf).min(bf);
    let delta = max - min;
    let s = if max > 0.0 { delta / max * 255.0 } else { 0.0 };
    let mut hue = if delta == 0.0 {
        0.0
    } else if max == rf {
        60.0 * (gf - bf) / delta
    } else if max == gf {
        120.0 + 60.0 * (bf - rf) / delta
    } else {
        240.0 + 60.0 * (rf - gf) / delta
    };
    if hue < 0.0 {
        hue += 360.0;
    }
    HsvPixel {
        h: (hue / 2.0).round() as u8,
        s: s.round() as u8,
        v: max as u8,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorLabel {
    Red,
    Orange,
    Yellow,
    Green,
    Cyan,
    Blue,
    Purple,
    Black,
    White,
}

/// Inclusive HSV bounds of one color.
#[derive(Debug, Clone, Copy)]
struct HsvBox {
    h: (u8, u8),
    s: (u8, u8),
    v: (u8, u8),
}

impl HsvBox {
    const fn chromatic(h_min: u8, h_max: u8) -> Self {
        HsvBox {
            h: (h_min, h_max),
            s: (43, 255),
            v: (46, 255),
        }
    }

    fn contains(&self, p: HsvPixel) -> bool {
        (self.h.0..=self.h.1).contains(&p.h)
            && (self.s.0..=self.s.1).contains(&p.s)
            && (self.v.0..=self.v.1).contains(&p.v)
    }
}

const RED_LOW: HsvBox = HsvBox::chromatic(0, 10);
const RED_HIGH: HsvBox = HsvBox::chromatic(156, 180);
const ORANGE: HsvBox = HsvBox::chromatic(11, 25);
const YELLOW: HsvBox = HsvBox::chromatic(26, 34);
const GREEN: HsvBox = HsvBox::chromatic(35, 77);
const CYAN: HsvBox = HsvBox::chromatic(78, 99);
const BLUE: HsvBox = HsvBox::chromatic(100, 124);
const PURPLE: HsvBox = HsvBox::chromatic(125, 155);
const BLACK: HsvBox = HsvBox {
    h: (0, 180),
    s: (0, 255),
    v: (0, 46),
};
const WHITE: HsvBox = HsvBox {
    h: (0, 180),
    s: (0, 30),
    v: (221, 255),
};

impl ColorLabel {
    /// Column order used by tables and reports.
    pub const ALL: [ColorLabel; 9] = [
        ColorLabel::Red,
        ColorLabel::Orange,
        ColorLabel::Yellow,
        ColorLabel::Green,
        ColorLabel::Cyan,
        ColorLabel::Blue,
        ColorLabel::Purple,
        ColorLabel::Black,
        ColorLabel::White,
    ];

    /// Order in which overlapping boxes are resolved.
    pub const PRECEDENCE: [ColorLabel; 9] = [
        ColorLabel::Black,
        ColorLabel::White,
        ColorLabel::Red,
        ColorLabel::Orange,
        ColorLabel::Yellow,
        ColorLabel::Green,
        ColorLabel::Cyan,
        ColorLabel::Blue,
        ColorLabel::Purple,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ColorLabel::Red => "red",
            ColorLabel::Orange => "orange",
            ColorLabel::Yellow => "yellow",
            ColorLabel::Green => "green",
            ColorLabel::Cyan => "cyan",
            ColorLabel::Blue => "blue",
            ColorLabel::Purple => "purple",
            ColorLabel::Black => "black",
            ColorLabel::White => "white",
        }
    }

    /// Box test alone; a pixel may satisfy more than one color's box.
    pub fn contains(self, p: HsvPixel) -> bool {
        match self {
            ColorLabel::Red => RED_LOW.contains(p) || RED_HIGH.contains(p),
            ColorLabel::Orange => ORANGE.contains(p),
            ColorLabel::Yellow => YELLOW.contains(p),
            ColorLabel::Green => GREEN.contains(p),
            ColorLabel::Cyan => CYAN.contains(p),
            ColorLabel::Blue => BLUE.contains(p),
            ColorLabel::Purple => PURPLE.contains(p),
            ColorLabel::Black => BLACK.contains(p),
            ColorLabel::White => WHITE.contains(p),
        }
    }
}

impl fmt::Display for ColorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The unique label for `p` after precedence, or `None` for unclassified
/// pixels (low saturation mid-value grays).
pub fn classify_pixel(p: HsvPixel) -> Option<ColorLabel> {
    ColorLabel::PRECEDENCE
        .into_iter()
        .find(|label| label.contains(p))
}

#[derive(Debug, Clone)]
pub struct HsvImage {
    width: u32,
    height: u32,
    pixels: Vec<HsvPixel>,
}

impl HsvImage {
    pub fn from_rgb(image: &RgbImage) -> Self {
        let pixels = image
            .pixels()
            .map(|p| rgb_to_hsv(p[0], p[1], p[2]))
            .collect();
        HsvImage {
            width: image.width(),
            height: image.height(),
            pixels,
        }
    }

    pub fn from_fn(width: u32, height: u32, f: impl Fn(u32, u32) -> HsvPixel) -> Self {
        let pixels = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        HsvImage {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.pixels.len()
    }

    pub fn get(&self, x: u32, y: u32) -> HsvPixel {
        self.pixels[(y * self.width + x) as usize]
    }

    fn mask_where(&self, pred: impl Fn(HsvPixel) -> bool) -> BinaryMask {
        BinaryMask::from_vec(
            self.width,
            self.height,
            self.pixels.iter().map(|p| pred(*p)).collect(),
        )
    }
}

/// Mask of pixels inside `label`'s box.
pub fn color_mask(image: &HsvImage, label: ColorLabel) -> Result<BinaryMask, ColorError> {
    if image.pixel_count() == 0 {
        return Err(ColorError::EmptyImage);
    }
    Ok(image.mask_where(|p| label.contains(p)))
}

/// Area ratio per color. Ratios are individually in `[0, 1]` but need not
/// sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ColorProfile {
    pub red: f64,
    pub orange: f64,
    pub yellow: f64,
    pub green: f64,
    pub cyan: f64,
    pub blue: f64,
    pub purple: f64,
    pub black: f64,
    pub white: f64,
}

impl ColorProfile {
    pub fn get(&self, label: ColorLabel) -> f64 {
        match label {
            ColorLabel::Red => self.red,
            ColorLabel::Orange => self.orange,
            ColorLabel::Yellow => self.yellow,
            ColorLabel::Green => self.green,
            ColorLabel::Cyan => self.cyan,
            ColorLabel::Blue => self.blue,
            ColorLabel::Purple => self.purple,
            ColorLabel::Black => self.black,
            ColorLabel::White => self.white,
        }
    }

    pub fn set(&mut self, label: ColorLabel, value: f64) {
        let slot = match label {
            ColorLabel::Red => &mut self.red,
            ColorLabel::Orange => &mut self.orange,
            ColorLabel::Yellow => &mut self.yellow,
            ColorLabel::Green => &mut self.green,
            ColorLabel::Cyan => &mut self.cyan,
            ColorLabel::Blue => &mut self.blue,
            ColorLabel::Purple => &mut self.purple,
            ColorLabel::Black => &mut self.black,
            ColorLabel::White => &mut self.white,
        };
        *slot = value;
    }

    pub fn total(&self) -> f64 {
        ColorLabel::ALL.iter().map(|c| self.get(*c)).sum()
    }
}

/// Per-color masks after precedence, i.e. every pixel is in at most one mask.
pub fn classified_masks(image: &HsvImage) -> Result<Vec<(ColorLabel, BinaryMask)>, ColorError> {
    if image.pixel_count() == 0 {
        return Err(ColorError::EmptyImage);
    }
    let labels: Vec<Option<ColorLabel>> = image.pixels.iter().map(|p| classify_pixel(*p)).collect();
    Ok(ColorLabel::ALL
        .into_iter()
        .map(|label| {
            let data = labels.iter().map(|l| *l == Some(label)).collect();
            (label, BinaryMask::from_vec(image.width, image.height, data))
        })
        .collect())
}

pub fn hsv_profile(image: &HsvImage, dilation_iterations: u32) -> Result<ColorProfile, ColorError> {
    let mut profile = ColorProfile::default();
    let total = image.pixel_count();
    for (label, mask) in classified_masks(image)? {
        let dilated = dilate(&mask, dilation_iterations);
        profile.set(label, contour_area_ratio(&dilated, total));
    }
    Ok(profile)
}

pub fn color_profile(
    image: &RgbImage,
    dilation_iterations: u32,
) -> Result<ColorProfile, ColorError> {
    if image.width() == 0 || image.height() == 0 {
        return Err(ColorError::EmptyImage);
    }
    hsv_profile(&HsvImage::from_rgb(image), dilation_iterations)
}

#[derive(Debug, Clone, Copy)]
pub struct ProfileOptions {
    pub dilation_iterations: u32,
    /// Downscale so the longer side is at most this many pixels.
    pub max_side: Option<u32>,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            dilation_iterations: 2,
            max_side: Some(1024),
        }
    }
}

pub fn load_rgb(path: &Path, max_side: Option<u32>) -> Result<RgbImage, ColorError> {
    let img = image::open(path).map_err(|source| ColorError::Decode {
        path: path.display().to_string(),
        source,
    })?;
    let img = match max_side {
        Some(limit) if img.width().max(img.height()) > limit => {
            img.resize(limit, limit, image::imageops::FilterType::Triangle)
        }
        _ => img,
    };
    Ok(img.to_rgb8())
}

pub fn profile_image_file(
    path: &Path,
    options: ProfileOptions,
) -> Result<ColorProfile, ColorError> {
    color_profile(
        &load_rgb(path, options.max_side)?,
        options.dilation_iterations,
    )
}

/// Profiles image files in parallel. Results keep the input order.
pub fn profile_image_files(
    paths: &[PathBuf],
    options: ProfileOptions,
) -> Vec<Result<ColorProfile, ColorError>> {
    paths
        .par_iter()
        .map(|p| profile_image_file(p, options))
        .collect()
}
