use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Singular fiber types in residue characteristic 0 (or `p > 3`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KodairaType {
    /// `I_n`, `n >= 1`.
    I(u32),
    II,
    III,
    IV,
    /// `I_n^*`, `n >= 0`.
    IStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl KodairaType {
    pub fn components(self) -> u32 {
        match self {
            Self::I(n) => n,
            Self::II => 1,
            Self::III => 2,
            Self::IV => 3,
            Self::IStar(n) => n + 5,
            Self::IVStar => 7,
            Self::IIIStar => 8,
            Self::IIStar => 9,
        }
    }

    pub fn euler_number(self) -> u32 {
        match self {
            Self::I(n) => n,
            Self::II => 2,
            Self::III => 3,
            Self::IV => 4,
            Self::IStar(n) => n + 6,
            Self::IVStar => 8,
            Self::IIIStar => 9,
            Self::IIStar => 10,
        }
    }

    /// Rank of the root lattice spanned by the non-identity components.
    pub fn root_rank(self) -> u32 {
        self.components() - 1
    }

    /// Discriminant of that root lattice (1 for the empty lattice).
    pub fn root_discriminant(self) -> u64 {
        match self {
            Self::I(n) => n as u64,
            Self::II | Self::IIStar => 1,
            Self::III | Self::IIIStar => 2,
            Self::IV | Self::IVStar => 3,
            Self::IStar(_) => 4,
        }
    }

    /// Exponent of the discriminant group of the root lattice.
    pub fn discriminant_exponent(self) -> u64 {
        match self {
            Self::I(n) => n as u64,
            Self::II | Self::IIStar => 1,
            Self::III | Self::IIIStar => 2,
            Self::IV | Self::IVStar => 3,
            Self::IStar(n) if n % 2 == 0 => 2,
            Self::IStar(_) => 4,
        }
    }

    /// Multiplicative fibers have a cycle as dual graph; all others are trees.
    pub fn is_tree(self) -> bool {
        !matches!(self, Self::I(_))
    }

    /// Type from `(v(c4), v(c6), v(Delta))`; `None` for a vanishing invariant, `Ok(None)` for a good fiber.
    pub fn from_valuations(v4: Option<u32>, v6: Option<u32>, vd: u32) -> Result<Option<Self>> {
        let inf = u32::MAX;
        let (a, b) = (v4.unwrap_or(inf), v6.unwrap_or(inf));
        let triple = || format!("({}, {}, {vd})", fmt_val(v4), fmt_val(v6));
        if a >= 4 && vd >= 12 {
            return Err(Error::NonMinimal(triple()));
        }
        let t = match (a, b, vd) {
            (_, _, 0) => return Ok(None),
            (0, 0, n) => Self::I(n),
            (a, 1, 2) if a >= 1 => Self::II,
            (1, b, 3) if b >= 2 => Self::III,
            (a, 2, 4) if a >= 2 => Self::IV,
            (2, b, 6) if b >= 3 => Self::IStar(0),
            (a, 3, 6) if a >= 2 => Self::IStar(0),
            (2, 3, n) if n > 6 => Self::IStar(n - 6),
            (a, 4, 8) if a >= 3 => Self::IVStar,
            (3, b, 9) if b >= 5 => Self::IIIStar,
            (a, 5, 10) if a >= 4 => Self::IIStar,
            _ => return Err(Error::Unclassifiable(triple())),
        };
        Ok(Some(t))
    }
}

fn fmt_val(v: Option<u32>) -> String {
    v.map_or("inf".into(), |v| v.to_string())
}

impl fmt::Display for KodairaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::I(n) => write!(f, "I{n}"),
            Self::II => write!(f, "II"),
            Self::III => write!(f, "III"),
            Self::IV => write!(f, "IV"),
            Self::IStar(n) => write!(f, "I{n}*"),
            Self::IVStar => write!(f, "IV*"),
            Self::IIIStar => write!(f, "III*"),
            Self::IIStar => write!(f, "II*"),
        }
    }
}

impl FromStr for KodairaType {
    type Err = Error;

    /// Accepts `I7`, `I_7`, `I0*`, `I_0*`, `II`, `III`, `IV`, `IV*`, `III*`, `II*`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Model(format!("unknown Kodaira symbol {s:?}"));
        let t = s.trim();
        let (body, star) = match t.strip_suffix('*') {
            Some(b) => (b, true),
            None => (t, false),
        };
        Ok(match (body, star) {
            ("II", false) => Self::II,
            ("III", false) => Self::III,
            ("IV", false) => Self::IV,
            ("IV", true) => Self::IVStar,
            ("III", true) => Self::IIIStar,
            ("II", true) => Self::IIStar,
            _ => {
                let digits = body.strip_prefix('I').ok_or_else(bad)?;
                let n: u32 = digits.trim_start_matches('_').parse().map_err(|_| bad())?;
                match (n, star) {
                    (n, true) => Self::IStar(n),
                    (0, false) => return Err(bad()),
                    (n, false) => Self::I(n),
                }
            }
        })
    }
}

impl Serialize for KodairaType {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for KodairaType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use KodairaType::*;

    #[test]
    fn component_and_euler_table() {
        let rows = [
            (I(7), 7, 7),
            (II, 1, 2),
            (III, 2, 3),
            (IV, 3, 4),
            (IStar(0), 5, 6),
            (IStar(3), 8, 9),
            (IVStar, 7, 8),
            (IIIStar, 8, 9),
            (IIStar, 9, 10),
        ];
        for (t, m, e) in rows {
            assert_eq!((t.components(), t.euler_number()), (m, e), "{t}");
        }
    }

    #[test]
    fn valuation_table() {
        let v = |a: Option<u32>, b: Option<u32>, d| KodairaType::from_valuations(a, b, d);
        assert_eq!(v(Some(0), Some(0), 0).unwrap(), None);
        assert_eq!(v(Some(0), Some(0), 19).unwrap(), Some(I(19)));
        assert_eq!(v(Some(1), Some(1), 2).unwrap(), Some(II));
        assert_eq!(v(None, Some(1), 2).unwrap(), Some(II));
        assert_eq!(v(Some(1), Some(2), 3).unwrap(), Some(III));
        assert_eq!(v(Some(1), None, 3).unwrap(), Some(III));
        assert_eq!(v(None, Some(2), 4).unwrap(), Some(IV));
        assert_eq!(v(Some(2), Some(3), 6).unwrap(), Some(IStar(0)));
        assert_eq!(v(Some(2), None, 6).unwrap(), Some(IStar(0)));
        assert_eq!(v(Some(2), Some(3), 8).unwrap(), Some(IStar(2)));
        assert_eq!(v(Some(3), Some(4), 8).unwrap(), Some(IVStar));
        assert_eq!(v(Some(3), None, 9).unwrap(), Some(IIIStar));
        assert_eq!(v(None, Some(5), 10).unwrap(), Some(IIStar));
        assert_eq!(v(Some(4), Some(6), 12).unwrap_err().code(), "NON_MINIMAL");
        assert_eq!(v(Some(1), Some(1), 5).unwrap_err().code(), "UNCLASSIFIABLE");
    }

    #[test]
    fn symbols_roundtrip() {
        for t in [I(1), I(19), II, III, IV, IStar(0), IStar(12), IVStar, IIIStar, IIStar] {
            assert_eq!(t.to_string().parse::<KodairaType>().unwrap(), t);
        }
        assert_eq!("I_19".parse::<KodairaType>().unwrap(), I(19));
        assert_eq!("I_0*".parse::<KodairaType>().unwrap(), IStar(0));
        assert!("I0".parse::<KodairaType>().is_err());
        assert!("V".parse::<KodairaType>().is_err());
    }
}
