//! Walking-droplet pilot-wave simulation on a vibrated bath with submerged
//! topography, plus a Bohmian reference model for comparison.

pub mod analysis;
pub mod bohm;
pub mod droplet;
pub mod error;
pub mod fft;
pub mod grid;
pub mod io;
pub mod params;
pub mod simulation;
pub mod topography;
pub mod wavefield;

pub use error::{Error, Result};
