use std::fmt;

use serde::{Deserialize, Serialize};

/// A closed connected surface encoded by one integer.
///
/// `r >= 0` is the orientable surface of genus `r`; `r < 0` is the
/// non-orientable surface of genus `-r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SurfaceLabel(pub i64);

impl SurfaceLabel {
    pub const SPHERE: SurfaceLabel = SurfaceLabel(0);
    pub const TORUS: SurfaceLabel = SurfaceLabel(1);
    pub const PROJECTIVE_PLANE: SurfaceLabel = SurfaceLabel(-1);
    pub const KLEIN_BOTTLE: SurfaceLabel = SurfaceLabel(-2);

    pub fn euler_char(self) -> i64 {
        euler_char(self)
    }

    pub fn is_orientable(self) -> bool {
        self.0 >= 0
    }

    /// Odd Euler characteristic, which happens exactly for odd non-orientable genus.
    pub fn is_odd_chi(self) -> bool {
        self.0 < 0 && self.0 % 2 != 0
    }

    /// Inverse of [`euler_char`] given orientability. `None` when no closed
    /// connected surface has these invariants.
    pub fn from_invariants(chi: i64, orientable: bool) -> Option<SurfaceLabel> {
        if chi > 2 {
            return None;
        }
        if orientable {
            if chi % 2 != 0 {
                return None;
            }
            Some(SurfaceLabel((2 - chi) / 2))
        } else {
            if chi == 2 {
                return None;
            }
            Some(SurfaceLabel(-(2 - chi)))
        }
    }
}

impl fmt::Display for SurfaceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r={}", self.0)
    }
}

pub fn euler_char(label: SurfaceLabel) -> i64 {
    if label.0 >= 0 {
        2 - 2 * label.0
    } else {
        2 + label.0
    }
}

/// Label of the connected sum. Mixing orientable and non-orientable summands
/// trades each handle for two cross-caps.
pub fn connected_sum_label(a: SurfaceLabel, b: SurfaceLabel) -> SurfaceLabel {
    match (a.0 >= 0, b.0 >= 0) {
        (true, true) | (false, false) => SurfaceLabel(a.0 + b.0),
        (false, true) => SurfaceLabel(a.0 - 2 * b.0),
        (true, false) => SurfaceLabel(b.0 - 2 * a.0),
    }
}

/// Number of odd-chi labels in a multiset.
pub fn odd_count<'a>(labels: impl IntoIterator<Item = &'a SurfaceLabel>) -> usize {
    labels.into_iter().filter(|l| l.is_odd_chi()).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn euler_examples() {
        assert_eq!(euler_char(SurfaceLabel(0)), 2);
        assert_eq!(euler_char(SurfaceLabel(1)), 0);
        assert_eq!(euler_char(SurfaceLabel(-2)), 0);
        assert_eq!(euler_char(SurfaceLabel(-1)), 1);
    }

    #[test]
    fn odd_chi_iff_odd_negative() {
        for r in -9..=9 {
            let l = SurfaceLabel(r);
            assert_eq!(euler_char(l) % 2 != 0, l.is_odd_chi(), "r={r}");
            assert_eq!(l.is_odd_chi(), r < 0 && r % 2 != 0);
        }
    }

    #[test]
    fn sum_examples() {
        assert_eq!(
            connected_sum_label(SurfaceLabel(1), SurfaceLabel(2)),
            SurfaceLabel(3)
        );
        assert_eq!(
            connected_sum_label(SurfaceLabel(-1), SurfaceLabel(1)),
            SurfaceLabel(-3)
        );
        assert_eq!(
            connected_sum_label(SurfaceLabel(-1), SurfaceLabel(-1)),
            SurfaceLabel(-2)
        );
        assert_eq!(
            connected_sum_label(SurfaceLabel(0), SurfaceLabel(-5)),
            SurfaceLabel(-5)
        );
    }

    #[test]
    fn invariants_round_trip() {
        for r in -12..=12 {
            let l = SurfaceLabel(r);
            assert_eq!(
                SurfaceLabel::from_invariants(l.euler_char(), l.is_orientable()),
                Some(l)
            );
        }
        assert_eq!(SurfaceLabel::from_invariants(3, true), None);
        assert_eq!(SurfaceLabel::from_invariants(1, true), None);
        assert_eq!(SurfaceLabel::from_invariants(2, false), None);
    }

    proptest! {
        #[test]
        fn sum_is_additive_in_chi(a in -20i64..20, b in -20i64..20) {
            let (a, b) = (SurfaceLabel(a), SurfaceLabel(b));
            let s = connected_sum_label(a, b);
            prop_assert_eq!(s.euler_char(), a.euler_char() + b.euler_char() - 2);
            prop_assert_eq!(s.is_orientable(), a.is_orientable() && b.is_orientable());
            prop_assert_eq!(s, connected_sum_label(b, a));
        }
    }
}
