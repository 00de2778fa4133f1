use thiserror::Error;

/// Errors raised by the analysis pipeline and its building blocks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    EmptyImage { width: u32, height: u32 },

    #[error("pixel buffer holds {actual} values, expected {expected}")]
    BufferSize { expected: usize, actual: usize },

    #[error("pixel value {value} at index {index} is outside [0, 1]")]
    PixelRange { index: usize, value: f64 },

    #[error("dimension mismatch: {left_width}x{left_height} vs {right_width}x{right_height}")]
    DimensionMismatch {
        left_width: u32,
        left_height: u32,
        right_width: u32,
        right_height: u32,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// Horizontal and vertical µm/px ratios disagree: the card was not
    /// captured orthogonally or the card size is wrong.
    #[error(
        "distorted capture: horizontal scale {horizontal:.4} um/px and vertical scale \
         {vertical:.4} um/px differ by more than {tolerance_pct}%"
    )]
    DistortedCapture {
        horizontal: f64,
        vertical: f64,
        tolerance_pct: f64,
    },

    #[error("drop {index} (center {center_x_um}, {center_y_um} um, diameter {diameter_um} um) crosses the card edge")]
    DropOutsideCard {
        index: usize,
        center_x_um: f64,
        center_y_um: f64,
        diameter_um: f64,
    },

    #[error("layout does not fit: {0}")]
    LayoutDoesNotFit(String),
}

impl Error {
    pub(crate) fn parameter(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
