//! Seeded random rational sample points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::{Poly, Rat};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small rational `p/q` with `|p| ≤ 9`, `1 ≤ q ≤ 4`.
pub fn random_rat(rng: &mut SampleRng) -> Rat {
    let p: i64 = rng.gen_range(-9..=9);
    let q: i64 = rng.gen_range(1..=4);
    Rat::new(p.into(), q.into())
}

/// `count` points in ℚⁿ avoiding the zero sets of `avoid`.
pub fn random_points(n: usize, count: usize, rng: &mut SampleRng, avoid: &[Poly]) -> Vec<Vec<Rat>> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p: Vec<Rat> = (0..n).map(|_| random_rat(rng)).collect();
        if avoid.iter().all(|f| !f.eval(&p).eq(&Rat::from_integer(0.into()))) {
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_points_are_reproducible_and_avoid_loci() {
        let x = Poly::var(0, 2);
        let a = random_points(2, 30, &mut rng(7), std::slice::from_ref(&x));
        let b = random_points(2, 30, &mut rng(7), std::slice::from_ref(&x));
        assert_eq!(a, b);
        assert!(a.iter().all(|p| p[0] != Rat::from_integer(0.into())));
    }
}
