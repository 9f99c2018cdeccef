//! Browser bindings for the demo page: classify a point of the torus, paint
//! the region map at a coverage radius, and tabulate the loads against `t`.
//!
//! The exported functions return JSON strings; the plain functions in
//! [`demo`] carry the logic so they can be tested off the browser.

use wasm_bindgen::prelude::*;

pub mod demo;

fn js(e: String) -> JsError {
    JsError::new(&e)
}

/// Access set of a user at `(x, y)` in grid coordinates.
#[wasm_bindgen]
pub fn classify(k1: usize, k2: usize, r: f64, x: f64, y: f64) -> Result<String, JsError> {
    demo::classify(k1, k2, r, x, y).map(|c| serde_json::to_string(&c).expect("serializes")).map_err(js)
}

/// Class index per pixel, row-major, `k1 * px` wide and `k2 * px` high.
#[wasm_bindgen]
pub fn region_map(k1: usize, k2: usize, r: f64, px: usize) -> Result<Vec<u8>, JsError> {
    demo::region_map(k1, k2, r, px).map_err(js)
}

/// Loads of every scheme for `t = 0..=K1 K2`.
#[wasm_bindgen]
pub fn load_curves(k1: usize, k2: usize, regime: &str) -> Result<String, JsError> {
    demo::load_curves(k1, k2, regime).map(|c| serde_json::to_string(&c).expect("serializes")).map_err(js)
}

/// Class names in region-map index order.
#[wasm_bindgen]
pub fn class_names() -> String {
    serde_json::to_string(&demo::class_names()).expect("serializes")
}
