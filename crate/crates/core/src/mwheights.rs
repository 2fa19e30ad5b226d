//! Height pairing on the Mordell-Weil group and the discriminant of the Néron-Severi lattice.
//!
//! For a K3 surface the height of a section `P` is `4 + 2 (P.O) - sum_v contr_v(P)`, where
//! `contr_v` depends only on the fiber type at `v` and the component met by `P`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::ellsurf::{KodairaType, PlaceKind, SectionData, Surface};
use crate::error::{Error, Result};
use crate::poly::Poly;

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Correction term of a fiber of type `t` for a section meeting component `index`.
/// Index 0 is the identity component. For `I_b^*`, index 1 is the near simple component
/// and indices 2, 3 are the far ones.
pub fn contribution(t: KodairaType, index: u32) -> Result<BigRational> {
    let invalid = || Error::InvalidComponent { kodaira: t.to_string(), index };
    if index == 0 {
        return Ok(BigRational::zero());
    }
    let v = match t {
        KodairaType::I(m) if index < m => {
            let (n, m) = (index as i64, m as i64);
            ratio(n * (m - n), m)
        }
        KodairaType::III | KodairaType::IIIStar if index == 1 => {
            if t == KodairaType::III {
                ratio(1, 2)
            } else {
                ratio(3, 2)
            }
        }
        KodairaType::IV if index <= 2 => ratio(2, 3),
        KodairaType::IVStar if index <= 2 => ratio(4, 3),
        KodairaType::IStar(_) if index == 1 => BigRational::one(),
        KodairaType::IStar(b) if index <= 3 => ratio(4 + b as i64, 4),
        _ => return Err(invalid()),
    };
    Ok(v)
}

/// Trivial-lattice data, Mordell-Weil rank and torsion, and optionally the Gram matrix
/// of a Mordell-Weil basis modulo torsion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigLattice {
    pub fibers: Vec<(KodairaType, u32)>,
    pub mw_rank: u32,
    pub torsion_order: u32,
    pub mw_gram: Option<Vec<Vec<BigRational>>>,
}

impl ConfigLattice {
    pub fn new(
        fibers: Vec<(KodairaType, u32)>,
        mw_rank: u32,
        torsion_order: u32,
        mw_gram: Option<Vec<Vec<BigRational>>>,
    ) -> Result<Self> {
        if torsion_order == 0 {
            return Err(Error::Precondition("torsion order must be positive".into()));
        }
        if let Some(g) = &mw_gram {
            if g.len() != mw_rank as usize || g.iter().any(|r| r.len() != mw_rank as usize) {
                return Err(Error::Precondition(format!("Gram matrix must be {mw_rank} x {mw_rank}")));
            }
        }
        Ok(Self { fibers, mw_rank, torsion_order, mw_gram })
    }

    /// Root lattice discriminants, one entry per geometric fiber with a nontrivial root lattice.
    pub fn root_discs(&self) -> Vec<u64> {
        self.fibers
            .iter()
            .filter(|(t, _)| t.root_rank() > 0)
            .flat_map(|&(t, m)| std::iter::repeat_n(t.root_discriminant(), m as usize))
            .collect()
    }

    pub fn root_rank(&self) -> u32 {
        self.fibers.iter().map(|&(t, m)| t.root_rank() * m).sum()
    }

    pub fn euler_sum(&self) -> u32 {
        self.fibers.iter().map(|&(t, m)| t.euler_number() * m).sum()
    }

    /// `2 + rank(roots) + rank(MW)`.
    pub fn picard_number(&self) -> u32 {
        2 + self.root_rank() + self.mw_rank
    }

    /// Configuration of a surface with Picard number 20, from its fibers and declared sections.
    /// The torsion order is the lcm of declared torsion orders; for rank 1 the Gram matrix is
    /// the height of the first declared section of infinite order.
    pub fn from_surface(s: &Surface) -> Result<Self> {
        let fibers: Vec<(KodairaType, u32)> = s.fibers().iter().map(|f| (f.kodaira_type, f.multiplicity)).collect();
        let roots: u32 = fibers.iter().map(|&(t, m)| t.root_rank() * m).sum();
        let mw_rank = 18u32
            .checked_sub(roots)
            .ok_or_else(|| Error::Precondition(format!("root rank {roots} exceeds 18")))?;
        let torsion_order = s
            .model()
            .sections
            .iter()
            .filter(|p| p.torsion_order > 1)
            .fold(1u32, |acc, p| acc.lcm(&p.torsion_order));
        let mw_gram = match mw_rank {
            0 => Some(Vec::new()),
            1 => match s.model().sections.iter().find(|p| p.torsion_order == 0) {
                Some(p) => Some(vec![vec![surface_height(s, p)?]]),
                None => None,
            },
            _ => None,
        };
        Self::new(fibers, mw_rank, torsion_order, mw_gram)
    }
}

/// Exact determinant by fraction-field elimination.
pub fn determinant(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            let f = &a[r][col] / &p;
            if f.is_zero() {
                continue;
            }
            let (top, rest) = a.split_at_mut(r);
            for (x, y) in rest[0][col..].iter_mut().zip(&top[col][col..]) {
                *x -= &f * y;
            }
        }
    }
    det
}

/// `-prod(root discs) det(MW gram) / |MW_tors|^2`, which must be an integer.
pub fn ns_discriminant(cfg: &ConfigLattice) -> Result<i64> {
    let det = match &cfg.mw_gram {
        Some(g) => determinant(g),
        None if cfg.mw_rank == 0 => BigRational::one(),
        None => return Err(Error::Precondition("a Gram matrix is required for positive Mordell-Weil rank".into())),
    };
    let prod: BigInt = cfg.root_discs().iter().map(|&d| BigInt::from(d)).product();
    let tors = BigInt::from(cfg.torsion_order);
    let v = -(BigRational::from_integer(prod) * det) / BigRational::from_integer(&tors * &tors);
    if !v.is_integer() {
        return Err(Error::NonIntegral(v.to_string()));
    }
    v.to_integer().to_i64().ok_or(Error::Overflow("discriminant"))
}

/// `4 + 2 PO - sum of contributions`; zero for the zero section (`torsion_order == 1`).
/// `fibers` maps place labels to fiber types.
pub fn height(section: &SectionData, fibers: &[(String, KodairaType)], po: u64) -> Result<BigRational> {
    if section.torsion_order == 1 {
        return Ok(BigRational::zero());
    }
    let mut h = BigRational::from_integer(BigInt::from(4 + 2 * po));
    for (label, index) in &section.component_hits {
        let t = fibers
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, t)| *t)
            .ok_or_else(|| Error::Precondition(format!("no reducible fiber at {label}")))?;
        h -= contribution(t, *index)?;
    }
    Ok(h)
}

/// Height of a section of `s`, with `P.O` from [`compute_po`].
pub fn surface_height(s: &Surface, section: &SectionData) -> Result<BigRational> {
    let fibers: Vec<(String, KodairaType)> = s.places().iter().map(|p| (p.label(), p.kodaira)).collect();
    let po = compute_po(section)?;
    height(section, &fibers, po)
}

/// Intersection number of a section with the zero section: half the pole order of `x`
/// at finite places, plus `max(0, ceil((deg x - 4) / 2))` at infinity.
pub fn compute_po(section: &SectionData) -> Result<u64> {
    let g = section.x_num.gcd(&section.x_den);
    let num = section.x_num.div_exact(&g).unwrap_or_else(|| section.x_num.clone());
    let den = section.x_den.div_exact(&g).unwrap_or_else(|| section.x_den.clone());
    let mut po = 0u64;
    for (piece, k) in den.squarefree_decomposition() {
        if k % 2 == 1 {
            return Err(Error::OddPoleOrder(format!("{piece}=0 (order {k})")));
        }
        po += piece.degree().unwrap() as u64 * k as u64 / 2;
    }
    if let Some(dn) = num.degree() {
        let degx = dn as i64 - den.degree().unwrap() as i64;
        if degx > 4 {
            po += (degx - 3) as u64 / 2;
        }
    }
    Ok(po)
}

fn rational_valuation(num: &Poly, den: &Poly, g: &Poly) -> Option<i64> {
    Some(num.valuation_at(g)? as i64 - den.valuation_at(g).unwrap() as i64)
}

/// Valuation at infinity of a weight-`w` function `num / den`.
fn infinity_valuation(num: &Poly, den: &Poly, w: i64) -> Option<i64> {
    Some(w - num.degree()? as i64 + den.degree().unwrap() as i64)
}

/// Component of an `I_n` fiber met by `section`, up to the symmetry `i <-> n - i`:
/// `min(v(2y + a1 x + a3), n/2)` when the section passes through the node, else 0.
/// `None` when the fiber at `label` is not multiplicative.
pub fn infer_component(s: &Surface, section: &SectionData, label: &str) -> Option<u32> {
    let place = s.place(label)?;
    let KodairaType::I(n) = place.kodaira else {
        return None;
    };
    let [a1, a2, a3, a4, _] = &s.model().a;
    let (x, u, y, v) = (&section.x_num, &section.x_den, &section.y_num, &section.y_den);
    // psi2 = (2y u + (a1 x + a3 u) v) / (u v), phi = (3x^2 v + 2 a2 x u v + a4 u^2 v - a1 y u^2) / (u^2 v)
    let two = Poly::constant(2);
    let three = Poly::constant(3);
    let psi_num = &(&(&two * y) * u) + &(&(&(a1 * x) + &(a3 * u)) * v);
    let psi_den = u * v;
    let phi_num = &(&(&(&(&three * &(x * x)) * v) + &(&(&(&two * a2) * x) * &(u * v))) + &(&(a4 * &(u * u)) * v))
        - &(&(a1 * y) * &(u * u));
    let phi_den = &(u * u) * v;
    let (vx, vpsi, vphi) = match place.kind {
        PlaceKind::Infinity => (
            infinity_valuation(x, u, 4),
            infinity_valuation(&psi_num, &psi_den, 6),
            infinity_valuation(&phi_num, &phi_den, 8),
        ),
        PlaceKind::Rational(_) => (
            rational_valuation(x, u, &place.poly),
            rational_valuation(&psi_num, &psi_den, &place.poly),
            rational_valuation(&phi_num, &phi_den, &place.poly),
        ),
        PlaceKind::Grouped => return None,
    };
    let vx = vx.unwrap_or(i64::MAX);
    if vx < 0 {
        return Some(0);
    }
    let vpsi = vpsi.unwrap_or(i64::MAX);
    let vphi = vphi.unwrap_or(i64::MAX);
    if vpsi <= 0 || vphi <= 0 {
        return Some(0);
    }
    Some(vpsi.min(n as i64 / 2) as u32)
}

/// Every correction term lies in `[0, 4)`.
pub fn contribution_in_range(c: &BigRational) -> bool {
    !c.is_negative() && c < &BigRational::from_integer(BigInt::from(4))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::builtin;
    use KodairaType::*;

    fn surface(name: &str) -> Surface {
        Surface::new(builtin(name).unwrap()).unwrap()
    }

    #[test]
    fn contribution_table() {
        assert_eq!(contribution(I(7), 1).unwrap(), ratio(6, 7));
        assert_eq!(contribution(I(7), 0).unwrap(), ratio(0, 1));
        assert_eq!(contribution(I(7), 3).unwrap(), ratio(12, 7));
        assert_eq!(contribution(III, 1).unwrap(), ratio(1, 2));
        assert_eq!(contribution(IV, 2).unwrap(), ratio(2, 3));
        assert_eq!(contribution(IVStar, 1).unwrap(), ratio(4, 3));
        assert_eq!(contribution(IIIStar, 1).unwrap(), ratio(3, 2));
        assert_eq!(contribution(IStar(0), 1).unwrap(), ratio(1, 1));
        assert_eq!(contribution(IStar(4), 3).unwrap(), ratio(2, 1));
        for (t, i) in [(I(7), 7), (II, 1), (IIStar, 1), (III, 2), (IStar(2), 4), (IV, 3)] {
            assert_eq!(contribution(t, i).unwrap_err().code(), "INVALID_COMPONENT", "{t} {i}");
        }
    }

    #[test]
    fn torsion_sections_have_height_zero() {
        for name in ["d7-tate", "d27", "d4"] {
            let s = surface(name);
            for sec in s.model().sections.iter().filter(|p| p.torsion_order > 1) {
                assert_eq!(surface_height(&s, sec).unwrap(), BigRational::zero(), "{name}");
            }
        }
    }

    #[test]
    fn section_of_infinite_order() {
        let s = surface("d27");
        let p = s.model().sections.iter().find(|p| p.torsion_order == 0).unwrap();
        assert_eq!(compute_po(p).unwrap(), 0);
        assert_eq!(surface_height(&s, p).unwrap(), ratio(3, 2));
    }

    #[test]
    fn intersection_with_zero_section() {
        let sec = |num: &[i64], den: &[i64]| SectionData {
            x_num: Poly::from_i64(num),
            x_den: Poly::from_i64(den),
            y_num: Poly::from_i64(&[0]),
            y_den: Poly::from_i64(&[1]),
            torsion_order: 0,
            component_hits: vec![],
        };
        assert_eq!(compute_po(&sec(&[0], &[1])).unwrap(), 0);
        assert_eq!(compute_po(&sec(&[1], &[4, -4, 1])).unwrap(), 1);
        assert_eq!(compute_po(&sec(&[0, 0, 0, 0, 0, 0, 1], &[1])).unwrap(), 1);
        assert_eq!(compute_po(&sec(&[1], &[0, 1])).unwrap_err().code(), "ODD_POLE_ORDER");
        // common factors cancel before counting poles
        assert_eq!(compute_po(&sec(&[-2, 1], &[4, -4, 1])).unwrap_err().code(), "ODD_POLE_ORDER");
    }

    #[test]
    fn declared_hits_agree_with_node_valuations() {
        for name in ["d7-tate", "d27"] {
            let s = surface(name);
            for sec in &s.model().sections {
                for p in s.places().iter().filter(|p| p.is_rational() && matches!(p.kodaira, I(n) if n > 1)) {
                    let label = p.label();
                    let KodairaType::I(n) = p.kodaira else { unreachable!() };
                    let declared = sec.component_hits.iter().find(|(l, _)| *l == label).map_or(0, |h| h.1);
                    let inferred = infer_component(&s, sec, &label).unwrap();
                    assert_eq!(inferred, declared.min(n - declared), "{name} {label}");
                }
            }
        }
    }

    #[test]
    fn ns_discriminants_of_builtins() {
        for (name, d) in [("d19", -19), ("d7-tate", -7), ("d27", -27), ("d4", -4), ("d3", -3), ("d11", -11)] {
            let cfg = ConfigLattice::from_surface(&surface(name)).unwrap();
            assert_eq!(cfg.picard_number(), 20);
            assert_eq!(ns_discriminant(&cfg).unwrap(), d, "{name}");
        }
    }

    #[test]
    fn ns_discriminant_examples_and_errors() {
        let cfg = ConfigLattice::new(vec![(I(1), 3), (I(7), 3)], 0, 7, None).unwrap();
        assert_eq!(ns_discriminant(&cfg).unwrap(), -7);
        let cfg = ConfigLattice::new(vec![(I(1), 4), (I(2), 1), (I(9), 2)], 1, 3, Some(vec![vec![ratio(3, 2)]])).unwrap();
        assert_eq!(ns_discriminant(&cfg).unwrap(), -27);
        let cfg = ConfigLattice::new(vec![(I(1), 3), (IV, 1), (IStar(12), 1)], 0, 4, None).unwrap();
        assert_eq!(ns_discriminant(&cfg).unwrap_err().code(), "NON_INTEGRAL");
        let cfg = ConfigLattice::new(vec![(I(1), 4), (I(20), 1)], 1, 1, None).unwrap();
        assert_eq!(ns_discriminant(&cfg).unwrap_err().code(), "PRECONDITION");
    }

    #[test]
    fn determinant_of_small_matrices() {
        let m = vec![vec![ratio(2, 1), ratio(1, 2)], vec![ratio(1, 2), ratio(3, 2)]];
        assert_eq!(determinant(&m), ratio(11, 4));
        let m = vec![vec![ratio(0, 1), ratio(1, 1)], vec![ratio(1, 1), ratio(0, 1)]];
        assert_eq!(determinant(&m), ratio(-1, 1));
    }
}
