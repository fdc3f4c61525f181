//! Curved scene-text detection post-processing: square anchors, per-anchor
//! segment masks, mask merging and principal-curve polygonization, plus the
//! reference losses and evaluation used to check them.
//!
//! The usual flow for one image is
//! [`cli::connect::connect_image`]: keep the confident square predictions,
//! binarize their masks, merge overlapping masks into regions with
//! [`merge::merge_masks`], and turn each region into a 14-vertex polygon with
//! [`curve::polygonize`].

pub mod anchors;
pub mod cli;
pub mod curve;
pub mod error;
pub mod eval;
pub mod geom;
pub mod lossref;
pub mod maskgrid;
pub mod merge;
pub mod synth;

pub use error::{Error, Result};
pub use geom::{BBox, Point, Polygon};
