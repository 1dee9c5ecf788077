//! Reading and writing instances and allocations, seeded instance
//! generation and SVG output.

pub mod document;
pub mod generate;
pub mod render;

pub use document::{
    load_allocation, load_instance, save_allocation, save_instance, AllocationDocument, InstanceDocument,
};
pub use generate::{generate_instance, random_valuation};
pub use render::render_svg;
