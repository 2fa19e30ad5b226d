use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::kodaira::KodairaType;
use crate::error::{Error, Result};
use crate::poly::Poly;

/// Weierstrass coefficient indices, in storage order.
pub const A_INDEX: [usize; 5] = [1, 2, 3, 4, 6];

/// A section `(x_num / x_den, y_num / y_den)` of the fibration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionData {
    pub x_num: Poly,
    pub x_den: Poly,
    pub y_num: Poly,
    pub y_den: Poly,
    /// 0 for infinite order; 1 denotes the zero section.
    pub torsion_order: u32,
    pub component_hits: Vec<(String, u32)>,
}

/// Weierstrass data `y^2 + a1 x y + a3 y = x^3 + a2 x^2 + a4 x + a6` over `Q(t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceModel {
    pub name: String,
    pub d: i64,
    pub rank20_over_q: bool,
    /// `a1, a2, a3, a4, a6`.
    pub a: [Poly; 5],
    pub sections: Vec<SectionData>,
    pub expected_config: Vec<(String, KodairaType)>,
}

#[derive(Serialize, Deserialize)]
struct CoeffFile {
    #[serde(default)]
    a1: Vec<i64>,
    #[serde(default)]
    a2: Vec<i64>,
    #[serde(default)]
    a3: Vec<i64>,
    #[serde(default)]
    a4: Vec<i64>,
    #[serde(default)]
    a6: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct SectionFile {
    x_num: Vec<i64>,
    #[serde(default = "one")]
    x_den: Vec<i64>,
    y_num: Vec<i64>,
    #[serde(default = "one")]
    y_den: Vec<i64>,
    torsion_order: u32,
    #[serde(default)]
    component_hits: Vec<(String, u32)>,
}

fn one() -> Vec<i64> {
    vec![1]
}

#[derive(Serialize, Deserialize)]
#[allow(non_snake_case)]
struct ModelFile {
    name: String,
    d: i64,
    rank20_over_Q: bool,
    a: CoeffFile,
    #[serde(default)]
    sections: Vec<SectionFile>,
    #[serde(default)]
    expected_config: Vec<(String, KodairaType)>,
}

fn to_vec(p: &Poly) -> Vec<i64> {
    p.coeffs().iter().map(|c| c.to_i64().expect("model coefficients fit in i64")).collect()
}

impl SurfaceModel {
    pub fn from_json(text: &str) -> Result<Self> {
        let f: ModelFile = serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
        let sections = f
            .sections
            .into_iter()
            .map(|s| SectionData {
                x_num: Poly::from_i64(&s.x_num),
                x_den: Poly::from_i64(&s.x_den),
                y_num: Poly::from_i64(&s.y_num),
                y_den: Poly::from_i64(&s.y_den),
                torsion_order: s.torsion_order,
                component_hits: s.component_hits,
            })
            .collect();
        let model = Self {
            name: f.name,
            d: f.d,
            rank20_over_q: f.rank20_over_Q,
            a: [&f.a.a1, &f.a.a2, &f.a.a3, &f.a.a4, &f.a.a6].map(|c| Poly::from_i64(c)),
            sections,
            expected_config: f.expected_config,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let [a1, a2, a3, a4, a6] = &self.a;
        let file = ModelFile {
            name: self.name.clone(),
            d: self.d,
            rank20_over_Q: self.rank20_over_q,
            a: CoeffFile { a1: to_vec(a1), a2: to_vec(a2), a3: to_vec(a3), a4: to_vec(a4), a6: to_vec(a6) },
            sections: self
                .sections
                .iter()
                .map(|s| SectionFile {
                    x_num: to_vec(&s.x_num),
                    x_den: to_vec(&s.x_den),
                    y_num: to_vec(&s.y_num),
                    y_den: to_vec(&s.y_den),
                    torsion_order: s.torsion_order,
                    component_hits: s.component_hits.clone(),
                })
                .collect(),
            expected_config: self.expected_config.clone(),
        };
        serde_json::to_value(file).expect("model serializes")
    }

    pub fn a(&self, i: usize) -> &Poly {
        &self.a[A_INDEX.iter().position(|&k| k == i).expect("Weierstrass index")]
    }

    /// Degree bounds, nonzero discriminant, and every section on the curve.
    pub fn validate(&self) -> Result<()> {
        for (k, p) in A_INDEX.iter().zip(&self.a) {
            if p.degree().is_some_and(|d| d > 2 * k) {
                return Err(Error::Model(format!("deg a{k} = {} exceeds {}", p.degree().unwrap(), 2 * k)));
            }
        }
        if self.invariants().delta.is_zero() {
            return Err(Error::Model("discriminant vanishes identically".into()));
        }
        for (i, s) in self.sections.iter().enumerate() {
            if s.x_den.is_zero() || s.y_den.is_zero() {
                return Err(Error::Model(format!("section {i} has a zero denominator")));
            }
            if !self.on_curve(s) {
                return Err(Error::Model(format!("section {i} does not satisfy the Weierstrass equation")));
            }
        }
        Ok(())
    }

    /// The equation cleared of denominators vanishes identically.
    pub fn on_curve(&self, s: &SectionData) -> bool {
        let (x, u, y, v) = (&s.x_num, &s.x_den, &s.y_num, &s.y_den);
        let [a1, a2, a3, a4, a6] = &self.a;
        let u2 = u * u;
        let u3 = &u2 * u;
        let v2 = v * v;
        let lhs = &(&(&(y * y) * &u3) + &(&(&(a1 * x) * y) * &(&u2 * v))) + &(&(a3 * y) * &(&u3 * v));
        let x2 = x * x;
        let rhs = &(&(&(&(&x2 * x) * &v2) + &(&(a2 * &x2) * &(u * &v2))) + &(&(a4 * x) * &(&u2 * &v2)))
            + &(a6 * &(&u3 * &v2));
        (&lhs - &rhs).is_zero()
    }

    pub fn invariants(&self) -> Invariants {
        Invariants::new(&self.a)
    }

    /// The same model in the chart `s = 1/t`: `a_i -> s^{2i} a_i(1/s)`.
    pub fn at_infinity(&self) -> [Poly; 5] {
        let mut out = self.a.clone();
        for (k, p) in A_INDEX.iter().zip(out.iter_mut()) {
            *p = p.reversed(2 * k);
        }
        out
    }
}

/// Standard Weierstrass invariants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invariants {
    pub b2: Poly,
    pub b4: Poly,
    pub b6: Poly,
    pub b8: Poly,
    pub c4: Poly,
    pub c6: Poly,
    pub delta: Poly,
}

impl Invariants {
    pub fn new(a: &[Poly; 5]) -> Self {
        let [a1, a2, a3, a4, a6] = a;
        let k = |n: i64| Poly::constant(n);
        let b2 = &(a1 * a1) + &(&k(4) * a2);
        let b4 = &(&k(2) * a4) + &(a1 * a3);
        let b6 = &(a3 * a3) + &(&k(4) * a6);
        let b8 = &(&(&(&(&(a1 * a1) * a6) + &(&(&k(4) * a2) * a6)) - &(&(a1 * a3) * a4)) + &(&(a2 * a3) * a3))
            - &(a4 * a4);
        let c4 = &(&b2 * &b2) - &(&k(24) * &b4);
        let c6 = &(&(&k(36) * &(&b2 * &b4)) - &(&(&b2 * &b2) * &b2)) - &(&k(216) * &b6);
        let b2b2b8 = &(&b2 * &b2) * &b8;
        let b4cubed = &(&b4 * &b4) * &b4;
        let b6sq = &b6 * &b6;
        let cross = &(&b2 * &b4) * &b6;
        // -b2^2 b8 - 8 b4^3 - 27 b6^2 + 9 b2 b4 b6
        let delta = &(&(&(&k(9) * &cross) - &b2b2b8) - &(&k(8) * &b4cubed)) - &(&k(27) * &b6sq);
        Self { b2, b4, b6, b8, c4, c6, delta }
    }
}
