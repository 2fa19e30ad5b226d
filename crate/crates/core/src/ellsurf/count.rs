//! Point counts of the smooth (resolved) surface over `F_p`.
//!
//! Smooth fibers are counted by a character sum over the Weierstrass cubic. A singular
//! fiber of type `T` with all components rational contributes `m p + 1` points for a tree
//! of `m` lines and `m p` for a cycle.

use rayon::prelude::*;

use super::{KodairaType, PlaceKind, Surface, SurfaceModel};
use crate::arith::{kronecker, mul_mod};
use crate::error::{Error, Result};
use crate::poly::{FpPoly, Poly};

const MAX_COUNT_PRIME: u64 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Point {
    Finite(u64),
    Infinity,
}

/// Everything needed to count fibers at one prime; read-only once built.
pub struct PrimeCounter<'a> {
    surface: &'a Surface,
    p: u64,
    chi: Vec<i8>,
    a: [FpPoly; 5],
    a_inf: [u64; 5],
    delta: FpPoly,
    delta_inf: u64,
    c4: [FpPoly; 2],
    c6: [FpPoly; 2],
    finite: Vec<(usize, FpPoly)>,
    infinite: Option<usize>,
}

fn top_coeff(f: &Poly, k: usize, p: u64) -> u64 {
    Poly::constant(f.coeff(k)).reduce_mod(p).eval(0)
}

impl<'a> PrimeCounter<'a> {
    pub fn new(surface: &'a Surface, p: u64) -> Result<Self> {
        if p >= MAX_COUNT_PRIME || !surface.good_prime(p) {
            return Err(Error::BadPrime(p));
        }
        let mut chi = vec![-1i8; p as usize];
        chi[0] = 0;
        for x in 1..p {
            chi[(x * x % p) as usize] = 1;
        }
        let model = surface.model();
        let inv = surface.invariants();
        let a = model.a.clone().map(|f| f.reduce_mod(p));
        let mut a_inf = [0u64; 5];
        for (slot, (k, f)) in a_inf.iter_mut().zip(super::A_INDEX.iter().zip(&model.a)) {
            *slot = top_coeff(f, 2 * k, p);
        }
        let mut finite = Vec::new();
        let mut infinite = None;
        for (i, pl) in surface.places().iter().enumerate() {
            match pl.kind {
                PlaceKind::Infinity => infinite = Some(i),
                _ => finite.push((i, pl.poly.reduce_mod(p))),
            }
        }
        Ok(Self {
            surface,
            p,
            chi,
            a,
            a_inf,
            delta: inv.delta.reduce_mod(p),
            delta_inf: top_coeff(&inv.delta, 24, p),
            c4: [inv.c4.reduce_mod(p), inv.c4.reversed(8).reduce_mod(p)],
            c6: [inv.c6.reduce_mod(p), inv.c6.reversed(12).reduce_mod(p)],
            finite,
            infinite,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `sum_x chi(4x^3 + b2 x^2 + 2 b4 x + b6)` for the fiber over `pt`.
    fn char_sum(&self, pt: Point) -> i64 {
        let p = self.p;
        let [a1, a2, a3, a4, a6] = match pt {
            Point::Finite(t) => [0, 1, 2, 3, 4].map(|i| self.a[i].eval(t)),
            Point::Infinity => self.a_inf,
        };
        let b2 = (mul_mod(a1, a1, p) + 4 * a2) % p;
        let b4 = (2 * a4 + mul_mod(a1, a3, p)) % p;
        let b6 = (mul_mod(a3, a3, p) + 4 * a6) % p;
        let (c3, c1) = (4 % p, 2 * b4 % p);
        let mut s = 0i64;
        for x in 0..p {
            let v = (((c3 * x + b2) % p * x + c1) % p * x + b6) % p;
            s += self.chi[v as usize] as i64;
        }
        s
    }

    fn taylor(&self, f: &[FpPoly; 2], pt: Point, k: usize) -> u64 {
        match pt {
            Point::Finite(t) => f[0].taylor_coeff(t, k),
            Point::Infinity => f[1].taylor_coeff(0, k),
        }
    }

    /// Points on the fiber of the smooth model over `pt`.
    pub fn count(&self, pt: Point) -> Result<u64> {
        let p = self.p;
        let disc = match pt {
            Point::Finite(t) => self.delta.eval(t),
            Point::Infinity => self.delta_inf,
        };
        let direct = || (p as i64 + 1 + self.char_sum(pt)) as u64;
        if disc != 0 {
            return Ok(direct());
        }
        let idx = match pt {
            Point::Finite(t) => self.finite.iter().find(|(_, g)| g.eval(t) == 0).map(|(i, _)| *i),
            Point::Infinity => self.infinite,
        }
        .ok_or(Error::BadPrime(p))?;
        let place = &self.surface.places()[idx];
        let kodaira = place.kodaira;
        let m = kodaira.components() as u64;
        let not_rational = || Error::ComponentsNotRational {
            p,
            place: match pt {
                Point::Finite(t) => format!("t={t} ({})", place.label()),
                Point::Infinity => "t=inf".into(),
            },
        };
        let tree = m * p + 1;
        match kodaira {
            KodairaType::I(1) => Ok(direct()),
            KodairaType::I(n) => {
                if direct() == p {
                    Ok(n as u64 * p)
                } else {
                    Err(not_rational())
                }
            }
            KodairaType::II | KodairaType::III | KodairaType::IIIStar | KodairaType::IIStar => Ok(tree),
            KodairaType::IV | KodairaType::IVStar => {
                let order = if kodaira == KodairaType::IV { 2 } else { 4 };
                let c = self.taylor(&self.c6, pt, order);
                let b = mul_mod((p - 54 % p) % p, c, p);
                if self.chi[b as usize] == 1 {
                    Ok(tree)
                } else {
                    Err(not_rational())
                }
            }
            KodairaType::IStar(0) => {
                let c4 = self.taylor(&self.c4, pt, 2);
                let c6 = self.taylor(&self.c6, pt, 3);
                // z^3 - 27 c4 z - 54 c6 splits completely
                let lin = (p - mul_mod(27 % p, c4, p)) % p;
                let cst = (p - mul_mod(54 % p, c6, p)) % p;
                let roots = (0..p).filter(|&z| (mul_mod(mul_mod(z, z, p), z, p) + mul_mod(lin, z, p) + cst).is_multiple_of(p)).count();
                if roots == 3 {
                    Ok(tree)
                } else {
                    Err(not_rational())
                }
            }
            KodairaType::IStar(_) => {
                if self.surface.model().rank20_over_q {
                    Ok(tree)
                } else {
                    Err(not_rational())
                }
            }
        }
    }

    /// Sum over all `p + 1` fibers. The first failing fiber (in order) determines the error.
    pub fn total(&self) -> Result<u64> {
        let finite: Vec<Result<u64>> = (0..self.p).into_par_iter().map(|t| self.count(Point::Finite(t))).collect();
        let mut sum = self.count(Point::Infinity)?;
        for r in finite {
            sum += r?;
        }
        Ok(sum)
    }
}

impl Surface {
    pub fn counter(&self, p: u64) -> Result<PrimeCounter<'_>> {
        PrimeCounter::new(self, p)
    }

    pub fn count_fiber(&self, p: u64, pt: Point) -> Result<u64> {
        self.counter(p)?.count(pt)
    }

    pub fn surface_count(&self, p: u64) -> Result<u64> {
        self.counter(p)?.total()
    }

    /// `#X(F_p) - 1 - p^2 - 20p`.
    pub fn trace_ap(&self, p: u64) -> Result<i64> {
        let model = self.model();
        if !model.rank20_over_q {
            return Err(Error::Precondition(format!("{} is not flagged rank 20 over Q", model.name)));
        }
        if kronecker(model.d, p) != 1 {
            return Err(Error::Precondition(format!("{p} is not split for d = {}", model.d)));
        }
        let n = self.surface_count(p)? as i64;
        let p = p as i64;
        Ok(n - 1 - p * p - 20 * p)
    }
}

pub fn count_fiber(model: &SurfaceModel, p: u64, pt: Point) -> Result<u64> {
    Surface::new(model.clone())?.count_fiber(p, pt)
}

pub fn surface_count(model: &SurfaceModel, p: u64) -> Result<u64> {
    Surface::new(model.clone())?.surface_count(p)
}

pub fn trace_ap(model: &SurfaceModel, p: u64) -> Result<i64> {
    Surface::new(model.clone())?.trace_ap(p)
}
