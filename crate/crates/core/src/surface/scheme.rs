use serde::{Deserialize, Serialize};

use crate::model::SurfaceLabel;
use crate::unionfind::UnionFind;

/// Side-identification word of the standard fundamental polygon.
///
/// Orientable genus `g` uses `a1 b1 a1^-1 b1^-1 ...`, non-orientable genus `k`
/// uses `a1 a1 a2 a2 ...`, the sphere uses `a a^-1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolygonScheme {
    pub label: SurfaceLabel,
    /// `(symbol, exponent)` with exponent `+1` or `-1`.
    pub word: Vec<(u32, i8)>,
    /// Interior disks kept free for surgery.
    pub spare_disks: u8,
}

impl PolygonScheme {
    pub fn canonical(label: SurfaceLabel) -> Self {
        let mut word = Vec::new();
        if label.0 == 0 {
            word = vec![(0, 1), (0, -1)];
        } else if label.0 > 0 {
            for i in 0..label.0 as u32 {
                let (a, b) = (2 * i, 2 * i + 1);
                word.extend([(a, 1), (b, 1), (a, -1), (b, -1)]);
            }
        } else {
            for i in 0..(-label.0) as u32 {
                word.extend([(i, 1), (i, 1)]);
            }
        }
        PolygonScheme {
            label,
            word,
            spare_disks: 2,
        }
    }

    /// Counts cells after identification: `V - E + 1`.
    pub fn euler_characteristic(&self) -> i64 {
        let n = self.word.len();
        // side i runs from corner i to corner i+1; exponent -1 reverses it
        let ends = |i: usize| {
            let (s, e) = (i, (i + 1) % n);
            if self.word[i].1 > 0 {
                (s, e)
            } else {
                (e, s)
            }
        };
        let mut uf = UnionFind::new(n);
        let mut first: std::collections::HashMap<u32, (usize, usize)> = Default::default();
        for i in 0..n {
            let (s, e) = ends(i);
            match first.get(&self.word[i].0) {
                Some(&(s0, e0)) => {
                    uf.union(s, s0);
                    uf.union(e, e0);
                }
                None => {
                    first.insert(self.word[i].0, (s, e));
                }
            }
        }
        let (_, v) = uf.labels();
        v as i64 - first.len() as i64 + 1
    }

    pub fn is_orientable(&self) -> bool {
        // a symbol appearing twice with the same exponent forces a cross-cap
        let mut seen: std::collections::HashMap<u32, i8> = Default::default();
        for &(s, e) in &self.word {
            if let Some(&prev) = seen.get(&s) {
                if prev == e {
                    return false;
                }
            }
            seen.insert(s, e);
        }
        true
    }
}
