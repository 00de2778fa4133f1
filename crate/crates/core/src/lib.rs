//! Spray-quality measurement for water-sensitive card images.
//!
//! The analysis runs in five raster steps followed by a measurement step:
//!
//! 1. **Grayscale** – weighted luma of each RGB pixel.
//! 2. **Binarize** – fixed threshold; dark pixels become drop material.
//! 3. **Dilate / erode** – one pass each with a square structuring element.
//! 4. **Contour ring** – `dilated AND NOT eroded`.
//! 5. **Watershed** – each 8-connected ring is a marker for a priority flood
//!    over the gray levels; the card outside the dilated mask is seeded as
//!    background.
//!
//! Segments are then converted to equivalent-circle diameters and summarized
//! as drop density, coverage density, VMD and relative span
//! ([`metrics::SprayReport`]). [`synthcard`] renders cards with known drops
//! for end-to-end checks.

pub mod error;
pub mod metrics;
pub mod pipeline;
pub mod raster;
pub mod segmentation;
pub mod synthcard;

pub use error::{Error, Result};
pub use metrics::{CalibrationParams, CardSpec, SprayReport};
pub use pipeline::{analyze_gray, analyze_rgb, Analysis, PipelineConfig};
pub use raster::{BinaryImage, GrayImage, RgbImage, StructuringElement};
pub use segmentation::{Contour, DropSegment, LabelMap};
