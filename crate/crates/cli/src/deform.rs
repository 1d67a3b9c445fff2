//! User-supplied vertex maps written as expressions in `x`, `y` and `z`
//! (evalexpr syntax, e.g. `x * (1 + 0.2 * math::sin(y))`).

use std::cell::RefCell;

use evalexpr::{build_operator_tree, ContextWithMutableVariables, DefaultNumericTypes, HashMapContext, Node, Value};
use modeiso::Mesh64;

use crate::config::DeformationExpr;

#[derive(Debug, Clone)]
pub struct ExprMap {
    components: [Option<Node<DefaultNumericTypes>>; 3],
}

impl ExprMap {
    pub fn new(spec: &DeformationExpr) -> Result<Self, String> {
        let parse = |name: &str, text: &Option<String>| -> Result<Option<Node<DefaultNumericTypes>>, String> {
            let Some(text) = text else { return Ok(None) };
            let node = build_operator_tree::<DefaultNumericTypes>(text).map_err(|e| format!("{name} = `{text}`: {e}"))?;
            if let Some(v) = node.iter_variable_identifiers().find(|v| !matches!(*v, "x" | "y" | "z")) {
                return Err(format!("{name} = `{text}`: unknown variable `{v}`"));
            }
            Ok(Some(node))
        };
        let map = Self {
            components: [parse("x", &spec.x)?, parse("y", &spec.y)?, parse("z", &spec.z)?],
        };
        map.apply([0.1, 0.2, 0.3])?;
        Ok(map)
    }

    pub fn apply(&self, p: [f64; 3]) -> Result<[f64; 3], String> {
        let mut ctx = HashMapContext::<DefaultNumericTypes>::new();
        for (name, v) in ["x", "y", "z"].iter().zip(p) {
            ctx.set_value((*name).to_string(), Value::Float(v)).map_err(|e| e.to_string())?;
        }
        let mut out = p;
        for (k, node) in self.components.iter().enumerate() {
            if let Some(node) = node {
                let v = node.eval_number_with_context(&ctx).map_err(|e| e.to_string())?;
                if !v.is_finite() {
                    return Err(format!("non-finite image at ({}, {}, {})", p[0], p[1], p[2]));
                }
                out[k] = v;
            }
        }
        Ok(out)
    }

    pub fn deform(&self, mesh: &Mesh64) -> Result<Mesh64, String> {
        let failure = RefCell::new(None);
        let mapped = mesh.map_vertices(|p| match self.apply(p) {
            Ok(q) => q,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                p
            }
        });
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        mapped.map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(x: Option<&str>, y: Option<&str>, z: Option<&str>) -> DeformationExpr {
        DeformationExpr {
            x: x.map(Into::into),
            y: y.map(Into::into),
            z: z.map(Into::into),
        }
    }

    #[test]
    fn evaluates_components() {
        let m = ExprMap::new(&spec(Some("2 * x"), None, Some("z + x^2"))).unwrap();
        assert_eq!(m.apply([1.5, -1.0, 0.25]).unwrap(), [3.0, -1.0, 2.5]);
        let m = ExprMap::new(&spec(None, Some("y * math::exp(0)"), None)).unwrap();
        assert_eq!(m.apply([1.0, 2.0, 3.0]).unwrap(), [1.0, 2.0, 3.0]);
    }

    #[test]
    fn rejects_bad_expressions() {
        assert!(ExprMap::new(&spec(Some("2 *"), None, None)).is_err());
        assert!(ExprMap::new(&spec(Some("w + 1"), None, None)).is_err());
    }

    #[test]
    fn deforms_a_mesh() {
        let mesh = modeiso::mesh::generate_rectangle(1.0, 1.0, 3, 3).unwrap();
        let m = ExprMap::new(&spec(Some("3 * x"), None, None)).unwrap();
        let big = m.deform(&mesh).unwrap();
        assert!((big.total_measure() - 3.0).abs() < 1e-12);
        let collapse = ExprMap::new(&spec(Some("0"), Some("0"), None)).unwrap();
        assert!(collapse.deform(&mesh).is_err());
    }
}
