//! Numerical laboratory for quantitative John–Nirenberg inequalities on
//! discretized dyadic grids: BMO oscillations, Calderón–Zygmund stopping
//! times, Orlicz / weak-Orlicz / variable-exponent Luxemburg norms,
//! A∞-type functionals and the explicit constants that bound them.

pub mod constants;
pub mod error;
pub mod functionals;
pub mod grid;
pub mod io;
pub mod norms;
pub mod numeric;
pub mod oscillation;
pub mod testfns;
pub mod verify;
pub mod young;

pub use error::{Error, Result};
pub use grid::{CellFunction, CellMeasure, DisjointFamily, DyadicCube, Grid};
pub use young::YoungFunction;
