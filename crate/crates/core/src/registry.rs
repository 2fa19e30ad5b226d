//! Built-in surface models, shipped as embedded JSON.

use num_bigint::BigInt;

use crate::ellsurf::{is_square_integer, SurfaceModel};
use crate::error::{Error, Result};

const MODELS: [(&str, &str); 6] = [
    ("d19", include_str!("../models/d19.json")),
    ("d7-tate", include_str!("../models/d7-tate.json")),
    ("d27", include_str!("../models/d27.json")),
    ("d4", include_str!("../models/d4.json")),
    ("d3", include_str!("../models/d3.json")),
    ("d11", include_str!("../models/d11.json")),
];

pub fn builtin_names() -> Vec<&'static str> {
    MODELS.iter().map(|(n, _)| *n).collect()
}

/// A built-in model by name. `d4:<delta>` selects `y^2 = x^3 - delta t^3 (t-1)^2 x`,
/// flagged rank 20 over `Q` exactly when `delta` is a square.
pub fn builtin(name: &str) -> Result<SurfaceModel> {
    if let Some(arg) = name.strip_prefix("d4:") {
        let delta: i64 = arg.parse().map_err(|_| Error::Model(format!("bad d4 parameter {arg:?}")))?;
        if delta == 0 {
            return Err(Error::Model("d4 parameter must be nonzero".into()));
        }
        let mut m = builtin("d4")?;
        m.name = name.to_string();
        m.a[3] = m.a[3].scale(&BigInt::from(delta));
        m.rank20_over_q = is_square_integer(delta);
        m.validate()?;
        return Ok(m);
    }
    let (_, text) = MODELS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Model(format!("no built-in model named {name:?}")))?;
    SurfaceModel::from_json(text)
}
