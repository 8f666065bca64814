use std::collections::VecDeque;

use image::GrayImage;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32) -> Self {
        BinaryMask {
            width,
            height,
            data: vec![false; (width * height) as usize],
        }
    }

    pub fn from_vec(width: u32, height: u32, data: Vec<bool>) -> Self {
        assert_eq!(data.len(), (width * height) as usize, "mask buffer size");
        BinaryMask {
            width,
            height,
            data,
        }
    }

    pub fn from_fn(width: u32, height: u32, f: impl Fn(u32, u32) -> bool) -> Self {
        let data = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        BinaryMask {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.data[(y * self.width + x) as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        self.data[(y * self.width + x) as usize] = value;
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().filter(|b| **b).count()
    }

    /// True when every set pixel of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.data.iter().zip(&other.data).all(|(a, b)| !*a || *b)
    }

    pub fn union(&self, other: &BinaryMask) -> BinaryMask {
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| *a || *b)
            .collect();
        BinaryMask::from_vec(self.width, self.height, data)
    }

    /// 0/255 grayscale rendering, for mask dumps.
    pub fn to_gray_image(&self) -> GrayImage {
        GrayImage::from_fn(self.width, self.height, |x, y| {
            image::Luma([if self.get(x, y) { 255 } else { 0 }])
        })
    }
}

/// Dilation by the full 3×3 square, `iterations` times. Pixels outside the
/// image count as unset.
pub fn dilate(mask: &BinaryMask, iterations: u32) -> BinaryMask {
    let (w, h) = (mask.width as usize, mask.height as usize);
    let mut cur = mask.data.clone();
    let mut tmp = vec![false; cur.len()];
    for _ in 0..iterations {
        // The square element is separable: a row pass then a column pass.
        for y in 0..h {
            let row = &cur[y * w..(y + 1) * w];
            for x in 0..w {
                let lo = x.saturating_sub(1);
                let hi = (x + 1).min(w - 1);
                tmp[y * w + x] = row[lo..=hi].iter().any(|b| *b);
            }
        }
        for y in 0..h {
            let lo = y.saturating_sub(1);
            let hi = (y + 1).min(h - 1);
            for x in 0..w {
                cur[y * w + x] = (lo..=hi).any(|yy| tmp[yy * w + x]);
            }
        }
    }
    BinaryMask::from_vec(mask.width, mask.height, cur)
}

/// Fills the interior of every 8-connected component's outer contour.
///
/// Holes of 8-connected foreground are the 4-connected background regions
/// that cannot reach the image border, so the filled mask is the complement
/// of the border-reachable background.
pub fn fill_outer_contours(mask: &BinaryMask) -> BinaryMask {
    if mask.is_empty() {
        return mask.clone();
    }
    let (w, h) = (mask.width as usize, mask.height as usize);
    let mut outside = vec![false; mask.data.len()];
    let mut queue = VecDeque::new();
    let seed = |i: usize, outside: &mut Vec<bool>, queue: &mut VecDeque<usize>| {
        if !mask.data[i] && !outside[i] {
            outside[i] = true;
            queue.push_back(i);
        }
    };
    for x in 0..w {
        seed(x, &mut outside, &mut queue);
        seed((h - 1) * w + x, &mut outside, &mut queue);
    }
    for y in 0..h {
        seed(y * w, &mut outside, &mut queue);
        seed(y * w + w - 1, &mut outside, &mut queue);
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = (i % w, i / w);
        if x > 0 {
            seed(i - 1, &mut outside, &mut queue);
        }
        if x + 1 < w {
            seed(i + 1, &mut outside, &mut queue);
        }
        if y > 0 {
            seed(i - w, &mut outside, &mut queue);
        }
        if y + 1 < h {
            seed(i + w, &mut outside, &mut queue);
        }
    }
    BinaryMask::from_vec(
        mask.width,
        mask.height,
        outside.into_iter().map(|o| !o).collect(),
    )
}

/// Filled contour area divided by `original_pixel_count`, clamped to `[0, 1]`.
pub fn contour_area_ratio(mask: &BinaryMask, original_pixel_count: usize) -> f64 {
    assert!(
        original_pixel_count > 0,
        "original pixel count must be positive"
    );
    if mask.is_empty() {
        return 0.0;
    }
    let filled = fill_outer_contours(mask).count_ones();
    (filled as f64 / original_pixel_count as f64).clamp(0.0, 1.0)
}
