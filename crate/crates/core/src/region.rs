//! Analysis region masks derived from facial landmarks.
//!
//! Seven regions are analyzed per frame: the entire frame, the face, the
//! face contour band, eyes, nose, mouth, and the background. The masks
//! follow the 68-point landmark convention:
//!
//! - Face: filled convex hull of all 68 points.
//! - Eyes: hull of points 36–47, dilated by 4 px (periocular blending).
//! - Nose: hull of points 27–35, dilated by 4 px.
//! - Mouth: hull of points 48–67, dilated by 4 px.
//! - FaceContour: the band dilate(face, 8) minus erode(face, 8), a ring
//!   straddling the blending boundary.
//! - Background: complement of the face bounding box expanded by 16 px.
//!
//! Eyes, nose, and mouth are clipped to the face fill, and disputed pixels
//! are assigned by precedence Eyes > Nose > Mouth > FaceContour, so the
//! part masks are pairwise disjoint and the face mask is their superset.
//! Morphology uses the exact Euclidean disc (two-pass squared distance
//! transform). Rasterization is by pixel center: pixel (x, y) belongs to a
//! shape iff (x+0.5, y+0.5) is inside or on the boundary.

use alloc::vec;
use alloc::vec::Vec;

use crate::gray::GrayImage;
use crate::landmarks::{LandmarkSet, Point, EYE_POINTS, MOUTH_POINTS, NOSE_POINTS};

/// Dilation radius for the eye/nose/mouth part masks, pixels.
const PART_DILATION: f64 = 4.0;
/// Half-width of the face contour band, pixels.
const CONTOUR_BAND: f64 = 8.0;
/// Expansion of the face bounding box that the background excludes, pixels.
const BACKGROUND_MARGIN: f64 = 16.0;

/// The seven analysis regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RegionKind {
    EntireFrame,
    Face,
    FaceContour,
    Eyes,
    Nose,
    Mouth,
    Background,
}

impl RegionKind {
    /// All regions, in the canonical reporting order.
    pub const ALL: [RegionKind; 7] = [
        RegionKind::EntireFrame,
        RegionKind::Face,
        RegionKind::FaceContour,
        RegionKind::Eyes,
        RegionKind::Nose,
        RegionKind::Mouth,
        RegionKind::Background,
    ];

    /// Canonical snake_case name used in files and CLI flags.
    pub fn as_str(self) -> &'static str {
        match self {
            RegionKind::EntireFrame => "entire_frame",
            RegionKind::Face => "face",
            RegionKind::FaceContour => "face_contour",
            RegionKind::Eyes => "eyes",
            RegionKind::Nose => "nose",
            RegionKind::Mouth => "mouth",
            RegionKind::Background => "background",
        }
    }

    pub fn parse(s: &str) -> Option<RegionKind> {
        RegionKind::ALL.into_iter().find(|k| k.as_str() == s)
    }

    /// Whether building this region requires landmarks.
    pub fn needs_landmarks(self) -> bool {
        self != RegionKind::EntireFrame
    }
}

impl core::fmt::Display for RegionKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegionError {
    /// The region collapsed to zero area after clipping; the caller skips
    /// this patch.
    #[error("region {kind} has zero area after clipping")]
    DegenerateRegion { kind: RegionKind },
}

/// A per-pixel membership mask, bit-packed row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionMask {
    width: u32,
    height: u32,
    words: Vec<u64>,
}

impl RegionMask {
    /// All-clear mask.
    pub fn new(width: u32, height: u32) -> RegionMask {
        let bits = width as usize * height as usize;
        RegionMask {
            width,
            height,
            words: vec![0; bits.div_ceil(64)],
        }
    }

    /// All-set mask.
    pub fn full(width: u32, height: u32) -> RegionMask {
        let mut mask = RegionMask::new(width, height);
        for word in mask.words.iter_mut() {
            *word = u64::MAX;
        }
        mask.clear_tail();
        mask
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        debug_assert!(x < self.width && y < self.height);
        let idx = y as usize * self.width as usize + x as usize;
        self.words[idx / 64] >> (idx % 64) & 1 == 1
    }

    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        debug_assert!(x < self.width && y < self.height);
        let idx = y as usize * self.width as usize + x as usize;
        if value {
            self.words[idx / 64] |= 1 << (idx % 64);
        } else {
            self.words[idx / 64] &= !(1 << (idx % 64));
        }
    }

    /// Number of set pixels.
    pub fn count_set(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn assert_same_shape(&self, other: &RegionMask) {
        assert!(
            self.width == other.width && self.height == other.height,
            "mask shapes differ"
        );
    }

    fn subtract(&mut self, other: &RegionMask) {
        self.assert_same_shape(other);
        for (w, o) in self.words.iter_mut().zip(other.words.iter()) {
            *w &= !o;
        }
    }

    fn intersect(&mut self, other: &RegionMask) {
        self.assert_same_shape(other);
        for (w, o) in self.words.iter_mut().zip(other.words.iter()) {
            *w &= o;
        }
    }

    fn invert(&mut self) {
        for word in self.words.iter_mut() {
            *word = !*word;
        }
        self.clear_tail();
    }

    /// Zeroes the unused bits of the last word so popcounts stay exact.
    fn clear_tail(&mut self) {
        let bits = self.width as usize * self.height as usize;
        if bits % 64 != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << (bits % 64)) - 1;
            }
        }
    }
}

/// One 8×8 pixel block cut from the frame grid, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block8x8 {
    pub pixels: [u8; 64],
}

/// Builds the mask of `kind` for a `width`×`height` frame annotated with
/// `landmarks`. Pure: output depends only on the arguments.
///
/// Errors with `DegenerateRegion` when the mask is empty, which happens for
/// collapsed landmark geometry or, for `Background`, when the expanded face
/// box swallows the whole frame.
pub fn build_mask(
    width: u32,
    height: u32,
    landmarks: &LandmarkSet,
    kind: RegionKind,
) -> Result<RegionMask, RegionError> {
    assert!(width >= 8 && height >= 8, "frame must be at least 8x8");
    let mask = match kind {
        RegionKind::EntireFrame => RegionMask::full(width, height),
        RegionKind::Face => face_fill(width, height, landmarks),
        RegionKind::Eyes => part_masks(width, height, landmarks).0,
        RegionKind::Nose => part_masks(width, height, landmarks).1,
        RegionKind::Mouth => part_masks(width, height, landmarks).2,
        RegionKind::FaceContour => {
            let face = face_fill(width, height, landmarks);
            let mut band = dilate(&face, CONTOUR_BAND);
            band.subtract(&erode(&face, CONTOUR_BAND));
            let (eyes, nose, mouth) = part_masks(width, height, landmarks);
            band.subtract(&eyes);
            band.subtract(&nose);
            band.subtract(&mouth);
            band
        }
        RegionKind::Background => {
            let mut bg = expanded_face_box(width, height, landmarks);
            bg.invert();
            bg
        }
    };
    if mask.is_empty() {
        return Err(RegionError::DegenerateRegion { kind });
    }
    Ok(mask)
}

/// Cuts the frame into 8×8 blocks on the grid aligned to (0,0) with stride
/// 8 and returns those whose 64 pixels are all mask-set, row-major by block
/// origin. An empty result is valid.
pub fn extract_blocks(image: &GrayImage, mask: &RegionMask) -> Vec<Block8x8> {
    assert!(
        image.width() == mask.width() && image.height() == mask.height(),
        "image and mask dimensions differ"
    );
    let mut blocks = Vec::new();
    let mut y0 = 0;
    while y0 + 8 <= image.height() {
        let mut x0 = 0;
        while x0 + 8 <= image.width() {
            let covered =
                (0..8).all(|dy| (0..8).all(|dx| mask.get(x0 + dx, y0 + dy)));
            if covered {
                blocks.push(Block8x8 {
                    pixels: image.block_at(x0, y0),
                });
            }
            x0 += 8;
        }
        y0 += 8;
    }
    blocks
}

/// Eyes, nose, and mouth masks with clipping and precedence applied:
/// each part is its dilated hull, intersected with the face fill, minus
/// every higher-precedence part.
fn part_masks(width: u32, height: u32, lm: &LandmarkSet) -> (RegionMask, RegionMask, RegionMask) {
    let face = face_fill(width, height, lm);
    let raw = |pts: &[Point]| {
        let mut m = dilate(&fill_hull(width, height, pts), PART_DILATION);
        m.intersect(&face);
        m
    };
    let eyes = raw(lm.part(EYE_POINTS));
    let mut nose = raw(lm.part(NOSE_POINTS));
    nose.subtract(&eyes);
    let mut mouth = raw(lm.part(MOUTH_POINTS));
    mouth.subtract(&eyes);
    mouth.subtract(&nose);
    (eyes, nose, mouth)
}

fn face_fill(width: u32, height: u32, lm: &LandmarkSet) -> RegionMask {
    fill_hull(width, height, lm.points())
}

/// Pixels whose center lies in the face bounding box expanded by the
/// background margin.
fn expanded_face_box(width: u32, height: u32, lm: &LandmarkSet) -> RegionMask {
    let points = lm.points();
    let mut x0 = f64::MAX;
    let mut y0 = f64::MAX;
    let mut x1 = f64::MIN;
    let mut y1 = f64::MIN;
    for p in points.iter() {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    x0 -= BACKGROUND_MARGIN;
    y0 -= BACKGROUND_MARGIN;
    x1 += BACKGROUND_MARGIN;
    y1 += BACKGROUND_MARGIN;
    let mut mask = RegionMask::new(width, height);
    for y in 0..height {
        let yc = y as f64 + 0.5;
        if yc < y0 || yc > y1 {
            continue;
        }
        for x in 0..width {
            let xc = x as f64 + 0.5;
            if xc >= x0 && xc <= x1 {
                mask.set(x, y, true);
            }
        }
    }
    mask
}

/// z-component of the cross product (a−o) × (b−o); positive when o→a→b
/// turns counterclockwise in coordinate terms.
fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Andrew's monotone chain. Returns the hull in counterclockwise
/// coordinate order with collinear points dropped; fewer than 3 vertices
/// means the input had zero area.
fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup_by(|a, b| a.x == b.x && a.y == b.y);
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(pts.len() * 2);
    for &p in pts.iter() {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev() {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Rasterizes the filled convex hull of `points`: pixel centers inside or
/// on the hull boundary are set. Degenerate hulls produce an empty mask.
fn fill_hull(width: u32, height: u32, points: &[Point]) -> RegionMask {
    let hull = convex_hull(points);
    let mut mask = RegionMask::new(width, height);
    if hull.len() < 3 {
        return mask;
    }
    for y in 0..height {
        let yc = y as f64 + 0.5;
        // The hull interior is the intersection of edge half-planes
        // cross(p, q, ·) ≥ 0; restricted to this row, each edge bounds the
        // center abscissa from one side.
        let mut lo = f64::MIN;
        let mut hi = f64::MAX;
        let mut row_alive = true;
        for i in 0..hull.len() {
            let p = hull[i];
            let q = hull[(i + 1) % hull.len()];
            let a = q.y - p.y;
            let k = (q.x - p.x) * (yc - p.y) + a * p.x;
            if a > 0.0 {
                hi = hi.min(k / a);
            } else if a < 0.0 {
                lo = lo.max(k / a);
            } else if (q.x - p.x) * (yc - p.y) < 0.0 {
                row_alive = false;
                break;
            }
        }
        if !row_alive || lo > hi {
            continue;
        }
        let xs = libm::ceil(lo - 0.5).max(0.0) as i64;
        let xe = libm::floor(hi - 0.5).min(width as f64 - 1.0) as i64;
        for x in xs..=xe {
            mask.set(x as u32, y, true);
        }
    }
    mask
}

/// Sentinel for "no source on this scanline"; large enough to dominate any
/// real squared distance, small enough to keep the parabola arithmetic
/// finite.
const EDT_FAR: f64 = 1e20;

/// One-dimensional squared distance transform (lower envelope of
/// parabolas). `f[i]` is the source cost at site i; returns the envelope
/// sampled at every site.
fn dt_1d(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    z[0] = f64::MIN;
    z[1] = f64::MAX;
    for q in 1..n {
        loop {
            let p = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2 * q - 2 * p) as f64;
            if s <= z[k] {
                k -= 1;
            } else {
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = f64::MAX;
                break;
            }
        }
    }
    let mut d = vec![0.0f64; n];
    let mut k = 0usize;
    for q in 0..n {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let dq = q as f64 - v[k] as f64;
        d[q] = dq * dq + f[v[k]];
    }
    d
}

/// Exact squared Euclidean distance from every pixel to the nearest pixel
/// whose mask bit equals `to_set`, measured between pixel centers.
fn squared_distance_to(mask: &RegionMask, to_set: bool) -> Vec<f64> {
    let w = mask.width() as usize;
    let h = mask.height() as usize;
    let mut dist = vec![0.0f64; w * h];
    // Column pass.
    let mut col = vec![0.0f64; h];
    for x in 0..w {
        for (y, c) in col.iter_mut().enumerate() {
            *c = if mask.get(x as u32, y as u32) == to_set {
                0.0
            } else {
                EDT_FAR
            };
        }
        for (y, d) in dt_1d(&col).into_iter().enumerate() {
            dist[y * w + x] = d;
        }
    }
    // Row pass over the column results.
    let mut row = vec![0.0f64; w];
    for y in 0..h {
        row.copy_from_slice(&dist[y * w..(y + 1) * w]);
        for (x, d) in dt_1d(&row).into_iter().enumerate() {
            dist[y * w + x] = d;
        }
    }
    dist
}

/// Morphological dilation by a closed Euclidean disc of `radius`.
fn dilate(mask: &RegionMask, radius: f64) -> RegionMask {
    let dist = squared_distance_to(mask, true);
    let mut out = RegionMask::new(mask.width(), mask.height());
    let r2 = radius * radius;
    let w = mask.width() as usize;
    for (i, &d) in dist.iter().enumerate() {
        if d <= r2 {
            out.set((i % w) as u32, (i / w) as u32, true);
        }
    }
    out
}

/// Morphological erosion by a closed Euclidean disc of `radius`: keeps the
/// pixels strictly farther than `radius` from the nearest clear pixel.
fn erode(mask: &RegionMask, radius: f64) -> RegionMask {
    let dist = squared_distance_to(mask, false);
    let mut out = RegionMask::new(mask.width(), mask.height());
    let r2 = radius * radius;
    let w = mask.width() as usize;
    for (i, &d) in dist.iter().enumerate() {
        let (x, y) = ((i % w) as u32, (i / w) as u32);
        if mask.get(x, y) && d > r2 {
            out.set(x, y, true);
        }
    }
    out
}
