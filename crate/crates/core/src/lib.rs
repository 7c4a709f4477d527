pub mod numkit;
pub mod cfrac;
pub mod maps;
pub mod siegel;
pub mod circle;
pub mod herman;
pub mod render;
