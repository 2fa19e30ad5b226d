//! Elliptic K3 surfaces over `Q(t)`: fiber classification, reduction mod `p`, point counts.
//!
//! Places of `P^1` are found from a squarefree decomposition of the discriminant, refined
//! so that `(v(c4), v(c6), v(Delta))` is constant on each piece. Rational roots become
//! individual places; any remaining nonlinear piece is kept as one grouped place whose
//! geometric fiber count is its degree.

mod count;
mod kodaira;
mod model;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

pub use count::{count_fiber, surface_count, trace_ap, PrimeCounter, Point};
pub use kodaira::KodairaType;
pub use model::{Invariants, SectionData, SurfaceModel, A_INDEX};

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::poly::Poly;

/// Label used in expected configurations for places that are not rational over `Q`.
pub const OTHER_PLACE: &str = "other";
pub const INFINITY_LABEL: &str = "t=inf";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlaceKind {
    Rational(BigRational),
    /// A squarefree factor of `Delta` without rational roots.
    Grouped,
    Infinity,
}

/// A place (or a group of conjugate places) carrying one singular fiber type.
#[derive(Debug, Clone)]
pub struct Place {
    pub kind: PlaceKind,
    /// Primitive defining polynomial; zero for the place at infinity.
    pub poly: Poly,
    pub kodaira: KodairaType,
    pub v4: Option<u32>,
    pub v6: Option<u32>,
    pub vd: u32,
    /// `c4 / poly^v4` and `c6 / poly^v6`, for the reduction test.
    cofactors: [Option<Poly>; 2],
}

impl Place {
    pub fn label(&self) -> String {
        place_label(&self.kind, &self.poly)
    }

    /// Number of geometric fibers represented.
    pub fn multiplicity(&self) -> u32 {
        match self.kind {
            PlaceKind::Grouped => self.poly.degree().unwrap() as u32,
            _ => 1,
        }
    }

    pub fn is_rational(&self) -> bool {
        !matches!(self.kind, PlaceKind::Grouped)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberDatum {
    pub place: String,
    pub kodaira_type: KodairaType,
    pub component_count: u32,
    pub euler_number: u32,
    pub multiplicity: u32,
}

/// A model together with its precomputed invariants and places.
#[derive(Debug, Clone)]
pub struct Surface {
    model: SurfaceModel,
    inv: Invariants,
    places: Vec<Place>,
    delta_unit: BigInt,
}

/// Pieces of `s` on which the order of vanishing of `f` is constant.
fn level_pieces(s: &Poly, f: &Poly) -> Vec<Poly> {
    if f.is_zero() {
        return vec![s.clone()];
    }
    let mut out = Vec::new();
    let mut cur = s.clone();
    let mut deriv = f.clone();
    loop {
        let next = cur.gcd(&deriv);
        if next.is_constant() {
            out.push(cur);
            break;
        }
        let exact = cur.div_exact(&next).expect("gcd divides");
        if !exact.is_constant() {
            out.push(exact);
        }
        cur = next;
        deriv = deriv.derivative();
    }
    out
}

fn place_label(kind: &PlaceKind, poly: &Poly) -> String {
    match kind {
        PlaceKind::Rational(r) => format!("t={r}"),
        PlaceKind::Grouped => format!("{poly}=0"),
        PlaceKind::Infinity => INFINITY_LABEL.to_string(),
    }
}

fn infinity_valuation(f: &Poly, weight: usize) -> Option<u32> {
    f.degree().map(|d| (weight - d) as u32)
}

impl Surface {
    pub fn new(model: SurfaceModel) -> Result<Self> {
        model.validate()?;
        let inv = model.invariants();
        let mut places = Vec::new();
        let mut delta_unit = Poly::constant(inv.delta.content() * inv.delta.lead().unwrap().signum());
        let mut rest = inv.delta.primitive_part();
        for (s, k) in inv.delta.squarefree_decomposition() {
            let mut pieces = Vec::new();
            for g4 in level_pieces(&s, &inv.c4) {
                for g6 in level_pieces(&s, &inv.c6) {
                    let g = g4.gcd(&g6);
                    if !g.is_constant() {
                        pieces.push(g);
                    }
                }
            }
            for g in pieces {
                let mut nonlinear = g.clone();
                let mut found = Vec::new();
                for r in g.rational_roots() {
                    let lin = Poly::new(vec![-r.numer().clone(), r.denom().clone()]);
                    nonlinear = nonlinear.div_exact(&lin).expect("rational root");
                    found.push((PlaceKind::Rational(r), lin));
                }
                if !nonlinear.is_constant() {
                    found.push((PlaceKind::Grouped, nonlinear.primitive_part()));
                }
                for (kind, poly) in found {
                    places.push(Self::finite_place(&inv, kind, poly, k)?);
                }
            }
            rest = rest.div_exact(&s.pow(k)).expect("squarefree factor divides");
        }
        debug_assert!(rest.is_constant());
        delta_unit = &delta_unit * &rest;
        let v4 = infinity_valuation(&inv.c4, 8);
        let v6 = infinity_valuation(&inv.c6, 12);
        let vd = infinity_valuation(&inv.delta, 24).unwrap();
        if let Some(kodaira) = KodairaType::from_valuations(v4, v6, vd).map_err(|e| at_place(e, INFINITY_LABEL))? {
            places.push(Place {
                kind: PlaceKind::Infinity,
                poly: Poly::zero(),
                kodaira,
                v4,
                v6,
                vd,
                cofactors: [None, None],
            });
        }
        places.sort_by_key(place_order);
        let euler: u32 = places.iter().map(|p| p.kodaira.euler_number() * p.multiplicity()).sum();
        if euler != 24 {
            return Err(Error::NotK3(euler));
        }
        Ok(Self { model, inv, places, delta_unit: delta_unit.coeff(0) })
    }

    fn finite_place(inv: &Invariants, kind: PlaceKind, poly: Poly, vd: u32) -> Result<Place> {
        let v4 = inv.c4.valuation_at(&poly);
        let v6 = inv.c6.valuation_at(&poly);
        let label = place_label(&kind, &poly);
        let kodaira = KodairaType::from_valuations(v4, v6, vd)
            .map_err(|e| at_place(e, &label))?
            .expect("discriminant vanishes here");
        let cof = |f: &Poly, v: Option<u32>| v.map(|v| f.div_exact(&poly.pow(v)).expect("valuation"));
        Ok(Place { kind, kodaira, v4, v6, vd, cofactors: [cof(&inv.c4, v4), cof(&inv.c6, v6)], poly })
    }

    pub fn model(&self) -> &SurfaceModel {
        &self.model
    }

    pub fn invariants(&self) -> &Invariants {
        &self.inv
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn place(&self, label: &str) -> Option<&Place> {
        self.places.iter().find(|p| p.label() == label)
    }

    pub fn fibers(&self) -> Vec<FiberDatum> {
        self.places
            .iter()
            .map(|p| FiberDatum {
                place: p.label(),
                kodaira_type: p.kodaira,
                component_count: p.kodaira.components(),
                euler_number: p.kodaira.euler_number(),
                multiplicity: p.multiplicity(),
            })
            .collect()
    }

    pub fn euler_sum(&self) -> u32 {
        self.places.iter().map(|p| p.kodaira.euler_number() * p.multiplicity()).sum()
    }

    /// Compares against the declared configuration; non-rational places count as `other`.
    pub fn matches_expected(&self) -> bool {
        config_multiset(self.places.iter().map(|p| {
            let label = if p.is_rational() { p.label() } else { OTHER_PLACE.to_string() };
            (label, p.kodaira, p.multiplicity())
        })) == config_multiset(self.model.expected_config.iter().map(|(l, t)| (l.clone(), *t, 1)))
    }

    /// Reduction mod `p` keeps every place, its multiplicity in `Delta`, and its valuation triple.
    pub fn good_prime(&self, p: u64) -> bool {
        if p <= 3 || !is_prime(p) || self.model.d % p as i64 == 0 {
            return false;
        }
        let pb = BigInt::from(p);
        let unit_ok = |c: &BigInt| !c.mod_floor(&pb).is_zero();
        let inv = &self.inv;
        for f in [&inv.c4, &inv.c6, &inv.delta] {
            if let Some(l) = f.lead() {
                if !unit_ok(l) {
                    return false;
                }
            }
        }
        if !unit_ok(&self.delta_unit) {
            return false;
        }
        let finite: Vec<&Place> = self.places.iter().filter(|pl| pl.kind != PlaceKind::Infinity).collect();
        let reduced: Vec<_> = finite.iter().map(|pl| pl.poly.reduce_mod(p)).collect();
        for (pl, g) in finite.iter().zip(&reduced) {
            if g.degree() != pl.poly.degree() || !g.is_squarefree() {
                return false;
            }
            for q in pl.cofactors.iter().flatten() {
                if !q.reduce_mod(p).is_coprime(g) {
                    return false;
                }
            }
        }
        for i in 0..reduced.len() {
            for j in i + 1..reduced.len() {
                if !reduced[i].is_coprime(&reduced[j]) {
                    return false;
                }
            }
        }
        true
    }
}

fn at_place(e: Error, label: &str) -> Error {
    match e {
        Error::NonMinimal(t) => Error::NonMinimal(format!("{label} {t}")),
        Error::Unclassifiable(t) => Error::Unclassifiable(format!("{t} at {label}")),
        other => other,
    }
}

fn place_order(p: &Place) -> (u8, Option<BigRational>, usize, String) {
    match &p.kind {
        PlaceKind::Rational(r) => (0, Some(r.clone()), 1, String::new()),
        PlaceKind::Grouped => (1, None, p.poly.degree().unwrap(), p.label()),
        PlaceKind::Infinity => (2, None, 0, String::new()),
    }
}

fn config_multiset(it: impl Iterator<Item = (String, KodairaType, u32)>) -> BTreeMap<(String, KodairaType), u32> {
    let mut m = BTreeMap::new();
    for (l, t, k) in it {
        *m.entry((l, t)).or_insert(0) += k;
    }
    m
}

pub fn classify_fibers(model: &SurfaceModel) -> Result<Vec<FiberDatum>> {
    Ok(Surface::new(model.clone())?.fibers())
}

pub fn good_prime(model: &SurfaceModel, p: u64) -> Result<bool> {
    Ok(Surface::new(model.clone())?.good_prime(p))
}

/// The quadratic twist `y^2 = x^3 + delta a2 x^2 + delta^2 a4 x + delta^3 a6`.
///
/// Only 2-torsion sections `(x, 0)` survive, as `(delta x, 0)`. The rank-20 flag is kept
/// only when every fiber type has its components fixed by the twist.
pub fn twist_model(model: &SurfaceModel, delta: i64) -> Result<SurfaceModel> {
    if !model.a(1).is_zero() || !model.a(3).is_zero() {
        return Err(Error::UnsupportedShape("twisting needs a1 = a3 = 0".into()));
    }
    if delta == 0 {
        return Err(Error::Precondition("twist parameter must be nonzero".into()));
    }
    if delta == 1 {
        return Ok(model.clone());
    }
    let surface = Surface::new(model.clone())?;
    let stable = surface.places().iter().all(|p| {
        matches!(
            p.kodaira,
            KodairaType::I(1) | KodairaType::II | KodairaType::III | KodairaType::IStar(0) | KodairaType::IIIStar | KodairaType::IIStar
        )
    });
    let dl = BigInt::from(delta);
    let mut out = model.clone();
    out.name = format!("{}^({delta})", model.name);
    out.a[1] = model.a[1].scale(&dl);
    out.a[3] = model.a[3].scale(&(&dl * &dl));
    out.a[4] = model.a[4].scale(&(&dl * &dl * &dl));
    out.rank20_over_q = model.rank20_over_q && stable;
    out.sections = model
        .sections
        .iter()
        .filter(|s| s.y_num.is_zero())
        .map(|s| SectionData { x_num: s.x_num.scale(&dl), ..s.clone() })
        .collect();
    Ok(out)
}

/// `true` when `n` is a perfect square (including 1), as used for the `d4` family flag.
pub fn is_square_integer(n: i64) -> bool {
    n > 0 && crate::arith::exact_sqrt(n as u128).is_some()
}

/// Numerator of a rational root as an `i64`, for callers who know the place is integral.
pub fn rational_place_value(p: &Place) -> Option<i64> {
    match &p.kind {
        PlaceKind::Rational(r) if r.is_integer() => r.numer().to_i64(),
        _ => None,
    }
}
