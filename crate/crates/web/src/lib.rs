//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Three operations on the bundled codes: draw a code, draw the deformed
//! code measuring a logical, and paint that deformed code.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use codecraft_core::bb::bundled_spec;
use codecraft_core::pipeline::{paint_measurement, Session, Target};
use codecraft_core::{render_svg, SearchConfig};
use wasm_bindgen::prelude::*;

thread_local! {
    static SESSIONS: RefCell<HashMap<String, Rc<Session>>> = RefCell::new(HashMap::new());
}

fn search() -> SearchConfig {
    SearchConfig { budget: 2000, ..SearchConfig::default() }
}

fn session(name: &str) -> Result<Rc<Session>, String> {
    if let Some(s) = SESSIONS.with(|m| m.borrow().get(name).cloned()) {
        return Ok(s);
    }
    let spec = bundled_spec(name).ok_or_else(|| format!("no bundled code named `{name}`"))?;
    let s = Rc::new(Session::new(spec, &search()).map_err(|e| e.to_string())?);
    SESSIONS.with(|m| m.borrow_mut().insert(name.to_string(), s.clone()));
    Ok(s)
}

/// Names of the bundled codes.
pub fn codes() -> Vec<String> {
    codecraft_core::bb::BUNDLED.iter().map(|(n, _)| n.to_string()).collect()
}

/// SVG of a bundled code.
pub fn code_svg(name: &str) -> Result<String, String> {
    let spec = bundled_spec(name).ok_or_else(|| format!("no bundled code named `{name}`"))?;
    let (code, _) = codecraft_core::build_planar_bb(&spec).map_err(|e| e.to_string())?;
    render_svg(code.coords.as_ref().ok_or("code has no coordinates")?, None).map_err(|e| e.to_string())
}

/// SVG of the deformed code measuring `target`; elements removed by the
/// cut are gray. `ancilla = 0` picks the shortest stretch.
pub fn measurement_svg(name: &str, target: &str, ancilla: usize) -> Result<String, String> {
    let s = session(name)?;
    let t: Target = target.parse().map_err(|e: codecraft_core::Error| e.to_string())?;
    let shape = s.shape(&t, (ancilla > 0).then_some(ancilla), None).map_err(|e| e.to_string())?;
    let m = s.measure(&t, shape).map_err(|e| e.to_string())?;
    let inter = s.intermediate(&t, shape).map_err(|e| e.to_string())?;
    let coords = m.deformed.coords.as_ref().ok_or("deformed code has no coordinates")?;
    render_svg(coords, inter.coords.as_ref()).map_err(|e| e.to_string())
}

/// Paint report, as JSON, for `target` at the given ancilla size.
pub fn paint_json(name: &str, target: &str, ancilla: usize, d_th: usize) -> Result<String, String> {
    let s = session(name)?;
    let t: Target = target.parse().map_err(|e: codecraft_core::Error| e.to_string())?;
    let shape = s.shape(&t, (ancilla > 0).then_some(ancilla), None).map_err(|e| e.to_string())?;
    let m = s.measure(&t, shape).map_err(|e| e.to_string())?;
    let report = paint_measurement(&m, &t, d_th, &search()).map_err(|e| e.to_string())?;
    serde_json::to_string_pretty(&report).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = codes)]
pub fn js_codes() -> Vec<String> {
    codes()
}

#[wasm_bindgen(js_name = codeSvg)]
pub fn js_code_svg(name: &str) -> Result<String, JsValue> {
    code_svg(name).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = measurementSvg)]
pub fn js_measurement_svg(name: &str, target: &str, ancilla: usize) -> Result<String, JsValue> {
    measurement_svg(name, target, ancilla).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = paintJson)]
pub fn js_paint_json(name: &str, target: &str, ancilla: usize, d_th: usize) -> Result<String, JsValue> {
    paint_json(name, target, ancilla, d_th).map_err(|e| JsValue::from_str(&e))
}
