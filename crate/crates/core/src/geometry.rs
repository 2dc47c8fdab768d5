//! Axis-aligned bounding boxes and the pairwise distances used by the
//! matching and metric modules.

use crate::error::{Error, Result};
use crate::math;

/// Axis-aligned box in pixel coordinates, stored as top-left corner plus
/// width and height. Width and height must be strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundingBox {
    pub x_left: f64,
    pub y_top: f64,
    pub width: f64,
    pub height: f64,
}

impl BoundingBox {
    pub fn new(x_left: f64, y_top: f64, width: f64, height: f64) -> Result<Self> {
        if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
            return Err(Error::InvalidConfig(alloc::format!(
                "box width/height must be positive and finite, got {width}x{height}"
            )));
        }
        if !(x_left.is_finite() && y_top.is_finite()) {
            return Err(Error::InvalidConfig(alloc::format!(
                "box origin must be finite, got ({x_left}, {y_top})"
            )));
        }
        Ok(Self {
            x_left,
            y_top,
            width,
            height,
        })
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn x_right(&self) -> f64 {
        self.x_left + self.width
    }

    pub fn y_bottom(&self) -> f64 {
        self.y_top + self.height
    }

    pub fn center(&self) -> (f64, f64) {
        (
            self.x_left + self.width / 2.0,
            self.y_top + self.height / 2.0,
        )
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Self {
            x_left: self.x_left + dx,
            y_top: self.y_top + dy,
            ..*self
        }
    }
}

/// Intersection over union in `[0, 1]`; 0 for disjoint boxes, 1 only for
/// identical boxes.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let ix = (a.x_right().min(b.x_right()) - a.x_left.max(b.x_left)).max(0.0);
    let iy = (a.y_bottom().min(b.y_bottom()) - a.y_top.max(b.y_top)).max(0.0);
    let intersection = ix * iy;
    let union = a.area() + b.area() - intersection;
    intersection / union
}

/// Euclidean distance between box centers, in pixels.
pub fn center_distance(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let (ax, ay) = a.center();
    let (bx, by) = b.center();
    let dx = ax - bx;
    let dy = ay - by;
    math::sqrt(dx * dx + dy * dy)
}

/// Which localization distance MOTP averages over matched pairs.
///
/// Center distance is the default pixel-valued choice; `OneMinusIou` is
/// the unitless alternative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum DistanceMode {
    #[default]
    Center,
    OneMinusIou,
}

impl DistanceMode {
    pub fn distance(&self, a: &BoundingBox, b: &BoundingBox) -> f64 {
        match self {
            DistanceMode::Center => center_distance(a, b),
            DistanceMode::OneMinusIou => 1.0 - iou(a, b),
        }
    }
}
