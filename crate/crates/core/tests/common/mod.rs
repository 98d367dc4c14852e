#![allow(dead_code)]

use num_rational::BigRational;

use layoutsearch_core::geometry::{Direction, Rect};

fn overlap(a: (f64, f64), b: (f64, f64)) -> f64 {
    a.1.min(b.1) - a.0.max(b.0)
}

/// Straight from the definition, in O(n³): `b` is right of `a` when their
/// vertical spans overlap, `b` starts at or past `a`'s centre, and no third
/// rectangle pokes into the gap between them within the shared rows.
pub fn right_of(rs: &[Rect], a: usize, b: usize) -> bool {
    let (ra, rb) = (rs[a], rs[b]);
    if a == b || overlap((ra.top(), ra.bottom()), (rb.top(), rb.bottom())) <= 0.0 {
        return false;
    }
    if rb.left() < ra.cx() {
        return false;
    }
    if rb.left() <= ra.right() {
        return true; // nothing fits in an empty gap
    }
    let shared = (ra.top().max(rb.top()), ra.bottom().min(rb.bottom()));
    !rs.iter().enumerate().any(|(c, rc)| {
        c != a
            && c != b
            && rc.left() < rb.left()
            && rc.right() > ra.right()
            && overlap((rc.top(), rc.bottom()), shared) > 0.0
    })
}

fn transpose(r: &Rect) -> Rect {
    Rect::new(r.y, r.x, r.h, r.w)
}

pub fn below(rs: &[Rect], a: usize, b: usize) -> bool {
    let t: Vec<Rect> = rs.iter().map(transpose).collect();
    right_of(&t, a, b)
}

/// Sorted neighbor sets per direction for every rectangle.
pub fn oracle_table(rs: &[Rect]) -> Vec<[Vec<usize>; 4]> {
    let n = rs.len();
    (0..n)
        .map(|a| {
            let mut slots: [Vec<usize>; 4] = Default::default();
            for b in 0..n {
                for d in Direction::ALL {
                    let hit = match d {
                        Direction::Right => right_of(rs, a, b),
                        Direction::Left => right_of(rs, b, a),
                        Direction::Bottom => below(rs, a, b),
                        Direction::Top => below(rs, b, a),
                    };
                    if hit {
                        slots[d.index()].push(b);
                    }
                }
            }
            slots
        })
        .collect()
}

/// Exhaustive between-class variance argmax with exact rationals.
pub fn otsu_oracle(hist: &[u64; 256]) -> u8 {
    let n: u64 = hist.iter().sum();
    let mut best: Option<(BigRational, u8)> = None;
    for t in 0..256usize {
        let w0: u64 = hist[..=t].iter().sum();
        let w1 = n - w0;
        if w0 == 0 || w1 == 0 {
            continue;
        }
        let s0: u64 = hist[..=t].iter().enumerate().map(|(i, &c)| i as u64 * c).sum();
        let s1: u64 = hist[t + 1..].iter().enumerate().map(|(i, &c)| (i + t + 1) as u64 * c).sum();
        let r = |a: u64, b: u64| BigRational::new(a.into(), b.into());
        let diff = r(s0, w0) - r(s1, w1);
        let var = r(w0, n) * r(w1, n) * diff.clone() * diff;
        if best.as_ref().is_none_or(|(b, _)| var > *b) {
            best = Some((var, t as u8));
        }
    }
    match best {
        Some((v, t)) if v > BigRational::from_integer(0.into()) => t,
        _ => hist.iter().position(|&c| c > 0).unwrap_or(0) as u8,
    }
}
