//! Browser bindings: reduction, utility orders and admissibility on model text.
//!
//! Each export takes the model file text and returns a JSON string; errors
//! become thrown JS exceptions carrying the diagnostic.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use qpn::dominance::{admissible_set, AdmissibleOptions};
use qpn::dot::network_dot;
use qpn::format::{parse, serialize};
use qpn::order::{induced_probability_order, induced_utility_order};
use qpn::reduction::reduce;
use qpn::Network;

fn load(text: &str) -> Result<Network, String> {
    let net = parse(text).map_err(|e| e.to_string())?;
    net.ensure_valid().map_err(|e| e.to_string())?;
    Ok(net)
}

pub fn reduce_json(text: &str) -> Result<Value, String> {
    let net = load(text)?;
    let (reduced, log) = reduce(&net).map_err(|e| e.to_string())?;
    Ok(json!({
        "steps": log.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "model": serialize(&reduced),
        "dot": network_dot(&reduced),
        "input_dot": network_dot(&net),
    }))
}

/// Utility order when `node` is empty, else the node's probability order.
pub fn order_json(text: &str, node: &str) -> Result<Value, String> {
    let net = load(text)?;
    let po = if node.is_empty() {
        induced_utility_order(&net)
    } else {
        induced_probability_order(&net, node)
    }
    .map_err(|e| e.to_string())?;
    Ok(json!({
        "text": po.render(),
        "dot": po.to_dot(),
        "classes": po.class_count(),
        "elements": po.element_count(),
    }))
}

pub fn admissible_json(text: &str, samples: usize, seed: u64, kway: bool, mixed: bool) -> Result<Value, String> {
    let net = load(text)?;
    let options = AdmissibleOptions {
        kway,
        mixed,
        samples,
        seed,
        ..Default::default()
    };
    let report = admissible_set(&net, &options).map_err(|e| e.to_string())?;
    let describe = |set: &[qpn::strategy::Strategy]| {
        set.iter().map(|s| s.describe(&report.analysis)).collect::<Vec<_>>()
    };
    Ok(json!({
        "strategies": describe(&report.strategies),
        "admissible": describe(&report.admissible),
        "proofs": report.proofs.len(),
        "report": report.render(),
    }))
}

fn finish(result: Result<Value, String>) -> Result<String, JsError> {
    result.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn example_model() -> String {
    qpn::models::TEST_TREAT_MODEL.to_string()
}

#[wasm_bindgen]
pub fn reduce_model(text: &str) -> Result<String, JsError> {
    finish(reduce_json(text))
}

#[wasm_bindgen]
pub fn utility_order(text: &str, node: &str) -> Result<String, JsError> {
    finish(order_json(text, node))
}

#[wasm_bindgen]
pub fn admissible(text: &str, samples: u32, seed: u32, kway: bool, mixed: bool) -> Result<String, JsError> {
    finish(admissible_json(text, samples as usize, seed as u64, kway, mixed))
}
