//! Newton polygon interior point count.

use super::bilaurent::BiLaurent;

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Convex hull of lattice points, counter-clockwise, collinear points dropped.
pub fn convex_hull(mut pts: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    pts.sort_unstable();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Number of lattice points strictly inside the convex hull of the exponent
/// vectors of `p` (after shifting `y`-degrees to start at zero), by a direct
/// scan of the bounding box.
pub fn newton_interior(p: &BiLaurent) -> usize {
    let y0 = p.y_min().unwrap_or(0) as i64;
    let pts: Vec<(i64, i64)> = p.terms().map(|(a, b, _)| (a as i64, b as i64 - y0)).collect();
    let hull = convex_hull(pts);
    if hull.len() < 3 {
        return 0;
    }
    let (xmin, xmax) = hull.iter().fold((i64::MAX, i64::MIN), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)));
    let (ymin, ymax) = hull.iter().fold((i64::MAX, i64::MIN), |(lo, hi), p| (lo.min(p.1), hi.max(p.1)));
    let k = hull.len();
    let mut count = 0;
    for x in xmin..=xmax {
        for y in ymin..=ymax {
            let inside = (0..k).all(|i| cross(hull[i], hull[(i + 1) % k], (x, y)) > 0);
            if inside {
                count += 1;
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    fn support(pts: &[(u32, i32)]) -> BiLaurent {
        pts.iter()
            .fold(BiLaurent::zero(), |acc, &(a, b)| acc + BiLaurent::monomial(int(1), a, b))
    }

    #[test]
    fn monomial_has_no_interior() {
        assert_eq!(newton_interior(&BiLaurent::monomial(int(3), 4, 2)), 0);
    }

    #[test]
    fn standard_triangle_of_size_three() {
        let mut pts = Vec::new();
        for a in 0..=3u32 {
            for b in 0..=(3 - a as i32) {
                pts.push((a, b));
            }
        }
        assert_eq!(newton_interior(&support(&pts)), 1);
    }

    #[test]
    fn laurent_support_is_shifted() {
        // square [0,2]x[-1,1] has one interior point
        let p = support(&[(0, -1), (2, -1), (0, 1), (2, 1)]);
        assert_eq!(newton_interior(&p), 1);
    }

    #[test]
    fn collinear_support_is_degenerate() {
        assert_eq!(newton_interior(&support(&[(0, 0), (1, 1), (2, 2)])), 0);
    }
}
