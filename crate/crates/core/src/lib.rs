//! License plate localization from photographs using grayscale
//! preprocessing, Sobel/Canny edge detection and binary morphology with
//! line structuring elements.
//!
//! Image samples are 8-bit integers; kernels, angles, centroids and scores
//! are generic over [`Real`] (`f32` or `f64`). The `*F32`/`*F64` aliases
//! below fix the scalar.

pub mod edge;
pub mod error;
pub mod image;
pub mod locate;
pub mod morphology;
pub mod netpbm;
pub mod preprocess;
pub mod real;

pub use error::{Error, Result};
pub use image::{BBox, BinaryImage, GrayImage, PixelCoord, RgbImage};
pub use real::Real;

pub type GradientMapF32 = edge::GradientMap<f32>;
pub type GradientMapF64 = edge::GradientMap<f64>;
pub type CannyParamsF32 = edge::CannyParams<f32>;
pub type CannyParamsF64 = edge::CannyParams<f64>;
pub type RegionF32 = locate::Region<f32>;
pub type RegionF64 = locate::Region<f64>;
pub type PlateCriteriaF32 = locate::PlateCriteria<f32>;
pub type PlateCriteriaF64 = locate::PlateCriteria<f64>;
pub type PlateResultF32 = locate::PlateResult<f32>;
pub type PlateResultF64 = locate::PlateResult<f64>;
