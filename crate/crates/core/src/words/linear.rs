//! Exact linear images of words: the Tits reflection representation of the
//! Coxeter quotient `W_Γ`, and a one-parameter deformation of it that is a
//! representation of `A_Γ` itself.
//!
//! Generator `s` acts as the identity except on row `s`, which is
//! `(-q) e_s + Σ_{t≠s} c_st w_st e_t` with `c_st = 2cos(π/m_st)` (zero for
//! non-edges), `w_st = 1` when `s < t` and `w_st = q` otherwise. For `q = 1`
//! this is the Tits representation; for any `q` the braid relations hold, so
//! distinct images certify distinct group elements.

use std::collections::HashSet;
use std::sync::Arc;

use num_integer::Integer;

use super::ring::{CyclotomicRing, RingElement};
use super::Word;
use crate::presentation::PresentationGraph;

/// Deformation parameter of the non-Coxeter representation.
pub const DEFORMATION: i128 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum RepKind {
    /// Tits representation of `W_Γ` (`q = 1`).
    Coxeter,
    /// Deformed representation of `A_Γ` (`q = DEFORMATION`).
    Deformed,
}

impl RepKind {
    pub fn q(self) -> i128 {
        match self {
            RepKind::Coxeter => 1,
            RepKind::Deformed => DEFORMATION,
        }
    }
}

/// Precomputed generator data for one graph and one representation.
#[derive(Debug)]
pub struct Representation {
    pub kind: RepKind,
    pub ring: Arc<CyclotomicRing>,
    dim: usize,
    // off_diag[s][t] = c_st * w_st (ignored for t == s)
    off_diag: Vec<Vec<RingElement>>,
}

/// `matrix / q^scale`, with `scale` minimal. Row-major entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearImage {
    pub kind: RepKind,
    pub dim: usize,
    pub scale: u32,
    pub entries: Vec<RingElement>,
}

fn ring_order(graph: &PresentationGraph) -> usize {
    graph.label_set().into_iter().fold(2usize, |acc, m| acc.lcm(&(2 * m as usize)))
}

impl Representation {
    pub fn new(graph: &PresentationGraph, kind: RepKind) -> Self {
        let ring = CyclotomicRing::new(ring_order(graph));
        let n = graph.rank();
        let q = kind.q();
        let off_diag = (0..n)
            .map(|s| {
                (0..n)
                    .map(|t| match graph.label(s, t) {
                        Some(m) if s != t => {
                            let c = ring.two_cos_pi_over(m);
                            if s < t {
                                c
                            } else {
                                ring.scale(&c, q).expect("small scalar")
                            }
                        }
                        _ => ring.zero(),
                    })
                    .collect()
            })
            .collect();
        Self { kind, ring, dim: n, off_diag }
    }

    pub fn identity(&self) -> LinearImage {
        let n = self.dim;
        let mut entries = vec![self.ring.zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = self.ring.from_int(1);
        }
        LinearImage { kind: self.kind, dim: n, scale: 0, entries }
    }

    /// Right-multiplies by the image of one letter.
    pub fn mul_letter(&self, m: &LinearImage, gen: usize, inv: bool) -> Option<LinearImage> {
        let n = self.dim;
        let q = self.kind.q();
        let r = &self.ring;
        // X = d·I except row `gen`, which is `row`.
        let (d, diag, scale_inc) = if !inv || q == 1 {
            (1, -q, 0)
        } else {
            (q, -1, 1)
        };
        let row: Vec<RingElement> = (0..n)
            .map(|t| if t == gen { r.from_int(diag) } else { self.off_diag[gen][t].clone() })
            .collect();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            let mis = &m.entries[i * n + gen];
            for j in 0..n {
                let mut v = r.mul(mis, &row[j])?;
                if j != gen {
                    let base = r.scale(&m.entries[i * n + j], d)?;
                    v = r.add(&v, &base)?;
                }
                out.push(v);
            }
        }
        let mut img = LinearImage { kind: self.kind, dim: n, scale: m.scale + scale_inc, entries: out };
        img.normalize();
        Some(img)
    }

    /// Image of a word, or `None` if an intermediate coefficient overflows.
    pub fn image(&self, w: &Word) -> Option<LinearImage> {
        let mut m = self.identity();
        for l in w.letters() {
            m = self.mul_letter(&m, l.gen, l.inv)?;
        }
        Some(m)
    }

    pub fn mul(&self, a: &LinearImage, b: &LinearImage) -> Option<LinearImage> {
        let n = self.dim;
        let r = &self.ring;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = r.zero();
                for k in 0..n {
                    acc = r.add(&acc, &r.mul(&a.entries[i * n + k], &b.entries[k * n + j])?)?;
                }
                out.push(acc);
            }
        }
        let mut img = LinearImage { kind: self.kind, dim: n, scale: a.scale + b.scale, entries: out };
        img.normalize();
        Some(img)
    }

    /// All elements of the finite group generated by the images of `gens`
    /// (for the Coxeter representation and a spherical `gens`), or `None`
    /// once more than `cap` elements have been produced.
    pub fn finite_subgroup(&self, gens: &[usize], cap: usize) -> Option<Vec<LinearImage>> {
        let id = self.identity();
        let mut seen: HashSet<LinearImage> = HashSet::from([id.clone()]);
        let mut order = vec![id];
        let mut i = 0;
        while i < order.len() {
            for &g in gens {
                let next = self.mul_letter(&order[i], g, false)?;
                if seen.insert(next.clone()) {
                    order.push(next);
                    if order.len() > cap {
                        return None;
                    }
                }
            }
            i += 1;
        }
        Some(order)
    }
}

impl LinearImage {
    fn normalize(&mut self) {
        let q = self.kind.q();
        if q == 1 {
            self.scale = 0;
            return;
        }
        while self.scale > 0 && self.entries.iter().all(|e| e.divisible_by(q)) {
            for e in &mut self.entries {
                *e = e.div_exact(q);
            }
            self.scale -= 1;
        }
    }

    pub fn is_identity(&self) -> bool {
        self.scale == 0
            && self.entries.iter().enumerate().all(|(k, e)| {
                let (i, j) = (k / self.dim, k % self.dim);
                let mut want = vec![0i128; e.0.len()];
                if i == j {
                    want[0] = 1;
                }
                e.0 == want
            })
    }

    /// Rows outside `gens` must be unit rows for any element of the standard
    /// parabolic subgroup `A_gens`.
    pub fn fixes_complement_rows(&self, gens: &[usize]) -> bool {
        let n = self.dim;
        let q = self.kind.q();
        let unit = q.pow(self.scale);
        (0..n).filter(|t| !gens.contains(t)).all(|t| {
            (0..n).all(|j| {
                let e = &self.entries[t * n + j];
                let expect = if j == t { unit } else { 0 };
                e.0[0] == expect && e.0[1..].iter().all(|&c| c == 0)
            })
        })
    }

    /// Approximate real matrix, for display.
    pub fn approx(&self, ring: &CyclotomicRing) -> Vec<Vec<f64>> {
        let n = self.dim;
        let denom = (self.kind.q() as f64).powi(self.scale as i32);
        (0..n)
            .map(|i| (0..n).map(|j| ring.approx(&self.entries[i * n + j]) / denom).collect())
            .collect()
    }
}

/// Image of `w` in `W_Γ` under the Tits representation (signs ignored).
pub fn coxeter_image(graph: &PresentationGraph, w: &Word) -> Option<LinearImage> {
    Representation::new(graph, RepKind::Coxeter).image(w)
}

/// Image of `w` under the deformed representation of `A_Γ`.
pub fn deformed_image(graph: &PresentationGraph, w: &Word) -> Option<LinearImage> {
    Representation::new(graph, RepKind::Deformed).image(w)
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::*;

    #[test]
    fn squares_vanish_in_coxeter() {
        let g = g333();
        let rep = Representation::new(&g, RepKind::Coxeter);
        assert!(rep.image(&w(&g, "a a")).unwrap().is_identity());
        assert!(rep.image(&w(&g, "a a^-1")).unwrap().is_identity());
        assert_ne!(rep.image(&w(&g, "a b")), rep.image(&w(&g, "b a")));
        assert_eq!(rep.image(&w(&g, "a b a")), rep.image(&w(&g, "b a b")));
    }

    #[test]
    fn braid_relations_hold_in_both_representations() {
        for g in [g333(), g345(), PresentationGraph::complete(&["a", "b", "c", "d"], |i, j| 3 + ((i + j) % 3) as u32)] {
            for kind in [RepKind::Coxeter, RepKind::Deformed] {
                let rep = Representation::new(&g, kind);
                for (s, t, m) in g.edges() {
                    let lhs = rep.image(&Word::alternating(s, t, m as usize)).unwrap();
                    let rhs = rep.image(&Word::alternating(t, s, m as usize)).unwrap();
                    assert_eq!(lhs, rhs, "{kind:?} braid relation {s}{t} m={m}");
                }
            }
        }
    }

    #[test]
    fn deformed_inverse_letters() {
        let g = g345();
        let rep = Representation::new(&g, RepKind::Deformed);
        for s in 0..3 {
            let x = Word::from_letters([super::super::Letter::pos(s), super::super::Letter::neg(s)]);
            assert!(rep.image(&x).unwrap().is_identity());
        }
        // a² is not trivial in A_Γ and the deformation sees it.
        assert!(!rep.image(&w(&g, "a a")).unwrap().is_identity());
        let ab = rep.image(&w(&g, "a b^-1 c")).unwrap();
        let back = rep.mul(&ab, &rep.image(&w(&g, "c^-1 b a^-1")).unwrap()).unwrap();
        assert!(back.is_identity());
    }

    #[test]
    fn dihedral_coxeter_subgroups_have_order_2m() {
        let g = g345();
        let rep = Representation::new(&g, RepKind::Coxeter);
        for (s, t, m) in g.edges() {
            assert_eq!(rep.finite_subgroup(&[s, t], 100).unwrap().len(), 2 * m as usize);
        }
    }

    #[test]
    fn parabolic_row_structure() {
        let g = g333();
        let rep = Representation::new(&g, RepKind::Deformed);
        let x = rep.image(&w(&g, "a b^-1 a b")).unwrap();
        assert!(x.fixes_complement_rows(&[0, 1]));
        assert!(!rep.image(&w(&g, "c c")).unwrap().fixes_complement_rows(&[0, 1]));
    }
}
