//! Facial landmarks in the 68-point convention.
//!
//! Point semantics follow the standard annotation order: 0–16 jaw line,
//! 17–21 right eyebrow, 22–26 left eyebrow, 27–30 nose bridge, 31–35
//! nostril line, 36–41 right eye, 42–47 left eye, 48–67 mouth (48–59 outer
//! lip, 60–67 inner lip). Landmarks are consumed, never detected: they
//! arrive from sidecar files written by an external detector.

use alloc::vec::Vec;
use core::ops::Range;

/// Exact number of points in the convention.
pub const LANDMARK_COUNT: usize = 68;

/// Point index ranges of the facial parts used to build region masks.
pub const JAW: Range<usize> = 0..17;
pub const NOSE_POINTS: Range<usize> = 27..36;
pub const EYE_POINTS: Range<usize> = 36..48;
pub const MOUTH_POINTS: Range<usize> = 48..68;

/// A 2-D point in pixel coordinates (x right, y down). Landmark detectors
/// emit subpixel positions, so coordinates are real-valued.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Point {
        Point { x, y }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LandmarkError {
    #[error("expected {LANDMARK_COUNT} landmark points, got {got}")]
    WrongPointCount { got: usize },
    #[error("landmark coordinates must be finite")]
    NonFinite,
}

/// One frame's 68 landmark points.
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkSet {
    points: [Point; LANDMARK_COUNT],
}

impl LandmarkSet {
    /// Validates the point count and finiteness.
    pub fn new(points: Vec<Point>) -> Result<LandmarkSet, LandmarkError> {
        if points.len() != LANDMARK_COUNT {
            return Err(LandmarkError::WrongPointCount { got: points.len() });
        }
        if points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(LandmarkError::NonFinite);
        }
        let mut arr = [Point::new(0.0, 0.0); LANDMARK_COUNT];
        arr.copy_from_slice(&points);
        Ok(LandmarkSet { points: arr })
    }

    pub fn points(&self) -> &[Point; LANDMARK_COUNT] {
        &self.points
    }

    /// Points of one facial part, e.g. `part(EYE_POINTS)`.
    pub fn part(&self, range: Range<usize>) -> &[Point] {
        &self.points[range]
    }
}

/// Builds a canonical frontal face centered at `(cx, cy)` with the given
/// half-width and half-height, in the 68-point convention.
///
/// The layout is parametric, not a statistical mean shape: the jaw is the
/// lower half-ellipse, eyes are hexagons at ±0.42·half_width, the nose runs
/// down the midline, and the mouth is a pair of concentric ellipses. Useful
/// for synthetic fixtures and geometry tests; all parts land where the
/// region-mask design expects them.
pub fn synthetic_face(cx: f64, cy: f64, half_width: f64, half_height: f64) -> LandmarkSet {
    use core::f64::consts::PI;
    let (a, b) = (half_width, half_height);
    let mut pts: Vec<Point> = Vec::with_capacity(LANDMARK_COUNT);

    // 0-16: jaw, right side of the image to left along the lower ellipse arc.
    for i in 0..17 {
        let theta = PI - i as f64 * PI / 16.0;
        pts.push(Point::new(
            cx + a * libm::cos(theta),
            cy + b * libm::sin(theta),
        ));
    }
    // 17-21 and 22-26: eyebrows, straight segments above the eyes.
    for i in 0..5 {
        let t = i as f64 / 4.0;
        pts.push(Point::new(cx - 0.8 * a + t * 0.55 * a, cy - 0.5 * b));
    }
    for i in 0..5 {
        let t = i as f64 / 4.0;
        pts.push(Point::new(cx + 0.25 * a + t * 0.55 * a, cy - 0.5 * b));
    }
    // 27-30: nose bridge down the midline.
    for i in 0..4 {
        let t = i as f64 / 3.0;
        pts.push(Point::new(cx, cy - 0.4 * b + t * 0.5 * b));
    }
    // 31-35: nostril line.
    for i in 0..5 {
        let t = i as f64 / 4.0;
        pts.push(Point::new(cx - 0.18 * a + t * 0.36 * a, cy + 0.2 * b));
    }
    // 36-41 and 42-47: eye hexagons.
    for side in [-1.0, 1.0] {
        let (ex, ey) = (cx + side * 0.42 * a, cy - 0.22 * b);
        for j in 0..6 {
            let theta = j as f64 * PI / 3.0;
            pts.push(Point::new(
                ex + 0.16 * a * libm::cos(theta),
                ey + 0.07 * b * libm::sin(theta),
            ));
        }
    }
    // 48-59: outer lip ellipse; 60-67: inner lip ellipse.
    let (mx, my) = (cx, cy + 0.55 * b);
    for j in 0..12 {
        let theta = j as f64 * PI / 6.0;
        pts.push(Point::new(
            mx + 0.35 * a * libm::cos(theta),
            my + 0.12 * b * libm::sin(theta),
        ));
    }
    for j in 0..8 {
        let theta = j as f64 * PI / 4.0;
        pts.push(Point::new(
            mx + 0.20 * a * libm::cos(theta),
            my + 0.05 * b * libm::sin(theta),
        ));
    }

    LandmarkSet::new(pts).expect("synthetic layout emits 68 finite points")
}
