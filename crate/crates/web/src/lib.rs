//! wasm-bindgen entry points for the static page in `www/`. Each export takes
//! the configuration as JSON `{"p", "m", "e"}` and returns JSON or SVG text.

use std::fmt::Write as _;

use ggs_core::bigserde::Big;
use ggs_core::quotients::element_order_mod_level;
use ggs_core::vectors::classify_vector;
use ggs_core::{Params, Portrait, WordExpr};
use serde::Deserialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest number of labelled vertices drawn.
const MAX_VERTICES: usize = 2_000;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    p: u64,
    m: Vec<u32>,
    e: Vec<i64>,
    #[allow(dead_code)]
    default_depth: Option<usize>,
}

fn params(config: &str) -> Result<Params, String> {
    let c: Config = serde_json::from_str(config).map_err(|e| format!("INVALID_CONFIG: {e}"))?;
    Params::new(c.p, c.m, c.e).map_err(describe)
}

fn describe(e: ggs_core::Error) -> String {
    format!("{}: {e}", e.code())
}

fn portrait(config: &str, expr: &str, depth: usize) -> Result<Portrait, String> {
    let p = params(config)?;
    let w = WordExpr::parse(expr).and_then(|x| x.normalize(&p, 0)).map_err(describe)?;
    w.evaluate(&p, depth).map_err(describe)
}

pub fn classify_json(config: &str) -> Result<String, String> {
    Ok(serde_json::to_string_pretty(&classify_vector(&params(config)?)).expect("serialisable"))
}

pub fn order_json(config: &str, expr: &str, level: usize) -> Result<String, String> {
    let p = params(config)?;
    let w = WordExpr::parse(expr).and_then(|x| x.normalize(&p, 0)).map_err(describe)?;
    let o = element_order_mod_level(&p, &w, level).map_err(describe)?;
    let out = json!({"expr": w.to_string(), "level": level, "order": Big(o.into())});
    Ok(out.to_string())
}

/// Layered drawing: one row per level, each labelled vertex coloured by its
/// label as a fraction of the modulus (grey for 0).
pub fn portrait_svg(config: &str, expr: &str, depth: usize) -> Result<String, String> {
    let f = portrait(config, expr, depth)?;
    let total: usize = (0..f.depth()).map(|l| f.level(l).len()).sum();
    if total > MAX_VERTICES {
        return Err(format!("portrait has {total} labelled vertices; the limit is {MAX_VERTICES}"));
    }
    let (width, row) = (960.0, 90.0);
    let height = row * f.depth() as f64 + 40.0;
    let mut svg = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" font-family="monospace" font-size="11">"#
    );
    let x_of = |l: usize, i: usize| (i as f64 + 0.5) * width / f.level(l).len() as f64;
    let y_of = |l: usize| 30.0 + row * l as f64;
    for l in 1..f.depth() {
        let fan = f.degrees()[l - 1] as usize;
        for i in 0..f.level(l).len() {
            let _ = write!(
                svg,
                r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#bbb"/>"##,
                x_of(l - 1, i / fan),
                y_of(l - 1),
                x_of(l, i),
                y_of(l)
            );
        }
    }
    for l in 0..f.depth() {
        let labels = f.level(l);
        let modulus = f.degrees()[l];
        let r = (width / labels.len() as f64 / 2.5).clamp(1.5, 14.0);
        for (i, &lab) in labels.iter().enumerate() {
            let fill = if lab == 0 {
                "#ddd".to_string()
            } else {
                format!("hsl({:.0},70%,50%)", 360.0 * lab as f64 / modulus as f64)
            };
            let _ = write!(
                svg,
                r#"<circle cx="{:.1}" cy="{:.1}" r="{r:.1}" fill="{fill}"><title>level {l}, vertex {}: {lab} mod {modulus}</title></circle>"#,
                x_of(l, i),
                y_of(l),
                i + 1
            );
            if r >= 9.0 {
                let _ = write!(
                    svg,
                    r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{lab}</text>"#,
                    x_of(l, i),
                    y_of(l) + 4.0
                );
            }
        }
    }
    svg.push_str("</svg>");
    Ok(svg)
}

#[wasm_bindgen]
pub fn classify(config: &str) -> Result<String, JsError> {
    classify_json(config).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn order(config: &str, expr: &str, level: usize) -> Result<String, JsError> {
    order_json(config, expr, level).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn draw(config: &str, expr: &str, depth: usize) -> Result<String, JsError> {
    portrait_svg(config, expr, depth).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const P0: &str = r#"{"p":3,"m":[1,2,3,4],"e":[1,-1]}"#;

    #[test]
    fn classify_reports_route() {
        let v: serde_json::Value = serde_json::from_str(&classify_json(P0).unwrap()).unwrap();
        assert_eq!(v["branch_route"], "VIA_GAMMA3_SYMMETRIC");
        assert!(classify_json(r#"{"p":3}"#).unwrap_err().starts_with("INVALID_CONFIG"));
    }

    #[test]
    fn order_of_ab() {
        let v: serde_json::Value = serde_json::from_str(&order_json(P0, "a*b", 3).unwrap()).unwrap();
        assert_eq!(v["order"], 81);
        assert!(order_json(P0, "a*(", 3).unwrap_err().starts_with("PARSE_ERROR"));
    }

    #[test]
    fn svg_has_one_circle_per_labelled_vertex() {
        let svg = portrait_svg(P0, "b", 3).unwrap();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 1 + 3 + 27);
        assert!(portrait_svg(P0, "b", 4).is_ok());
        assert!(portrait_svg(P0, "b", 5).unwrap_err().starts_with("OUT_OF_PREFIX"));
    }
}
