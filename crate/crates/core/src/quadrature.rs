//! Symmetric Gaussian rules on the reference triangle and Gauss-Legendre
//! rules on `[0, 1]`.
//!
//! Triangle rules are stored in barycentric form with weights normalised
//! to sum to one, so `∫_K f ≈ |K| Σ_p w_p f(x_p)`. All weights are positive.

use crate::{Error, Result};

pub const MAX_TRIANGLE_ORDER: usize = 8;
pub const MAX_SEGMENT_ORDER: usize = 9;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule2d {
    pub lambda: Vec<[f64; 3]>,
    pub weight: Vec<f64>,
}

impl QuadRule2d {
    pub fn len(&self) -> usize {
        self.weight.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weight.is_empty()
    }

    /// Quadrature points mapped onto the triangle with vertices `z`.
    pub fn points_on(&self, z: &[[f64; 2]; 3]) -> impl Iterator<Item = [f64; 2]> + '_ {
        let z = *z;
        self.lambda.iter().map(move |l| {
            [
                l[0] * z[0][0] + l[1] * z[1][0] + l[2] * z[2][0],
                l[0] * z[0][1] + l[1] * z[1][1] + l[2] * z[2][1],
            ]
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule1d {
    pub points: Vec<f64>,
    pub weight: Vec<f64>,
}

impl QuadRule1d {
    pub fn len(&self) -> usize {
        self.weight.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weight.is_empty()
    }
}

/// Symmetry orbits of the triangle.
enum Orbit {
    Centroid(f64),
    /// `(a, a, 1 - 2a)` and its rotations.
    S21(f64, f64),
    /// `(a, b, 1 - a - b)` and all six permutations.
    S111(f64, f64, f64),
}

use Orbit::*;

const DEGREE_2: &[Orbit] = &[S21(1.0 / 6.0, 1.0 / 3.0)];

const DEGREE_4: &[Orbit] = &[
    S21(0.445_948_490_915_964_89, 0.223_381_589_678_011_47),
    S21(0.091_576_213_509_770_743, 0.109_951_743_655_321_87),
];

const DEGREE_5: &[Orbit] = &[
    Centroid(0.225),
    S21(0.470_142_064_105_115_09, 0.132_394_152_788_506_18),
    S21(0.101_286_507_323_456_34, 0.125_939_180_544_827_15),
];

const DEGREE_6: &[Orbit] = &[
    S21(0.249_286_745_170_910_42, 0.116_786_275_726_379_37),
    S21(0.063_089_014_491_502_228, 0.050_844_906_370_206_817),
    S111(0.053_145_049_844_816_947, 0.310_352_451_033_784_41, 0.082_851_075_618_373_575),
];

const DEGREE_8: &[Orbit] = &[
    Centroid(0.144_315_607_677_787_17),
    S21(0.459_292_588_292_723_16, 0.095_091_634_267_284_625),
    S21(0.170_569_307_751_760_21, 0.103_217_370_534_718_25),
    S21(0.050_547_228_317_030_975, 0.032_458_497_623_198_08),
    S111(0.008_394_777_409_957_605_3, 0.263_112_829_634_638_11, 0.027_230_314_174_434_994),
];

fn expand(orbits: &[Orbit]) -> QuadRule2d {
    let mut lambda = Vec::new();
    let mut weight = Vec::new();
    for orbit in orbits {
        match *orbit {
            Centroid(w) => {
                lambda.push([1.0 / 3.0; 3]);
                weight.push(w);
            }
            S21(a, w) => {
                let b = 1.0 - 2.0 * a;
                lambda.extend([[a, a, b], [a, b, a], [b, a, a]]);
                weight.extend([w; 3]);
            }
            S111(a, b, w) => {
                let c = 1.0 - a - b;
                lambda.extend([[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]]);
                weight.extend([w; 6]);
            }
        }
    }
    QuadRule2d { lambda, weight }
}

/// Rule exact for polynomials of total degree `order` on triangles.
pub fn triangle_rule(order: usize) -> Result<QuadRule2d> {
    let orbits: &[Orbit] = match order {
        1 => &[Centroid(1.0)],
        2 => DEGREE_2,
        3 | 4 => DEGREE_4,
        5 => DEGREE_5,
        6 => DEGREE_6,
        7 | 8 => DEGREE_8,
        _ => {
            return Err(Error::QuadratureOrder {
                order,
                max: MAX_TRIANGLE_ORDER,
            })
        }
    };
    Ok(expand(orbits))
}

/// Gauss-Legendre rule on `[0, 1]` exact for degree `order`.
pub fn segment_rule(order: usize) -> Result<QuadRule1d> {
    if !(1..=MAX_SEGMENT_ORDER).contains(&order) {
        return Err(Error::QuadratureOrder {
            order,
            max: MAX_SEGMENT_ORDER,
        });
    }
    let n = order / 2 + 1;
    let (nodes, weights) = gauss_legendre(n);
    Ok(QuadRule1d {
        points: nodes.iter().map(|t| 0.5 * (t + 1.0)).collect(),
        weight: weights.iter().map(|w| 0.5 * w).collect(),
    })
}

/// Nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pnm1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    /// Closed form of ∫ x^a y^b over the unit right triangle.
    fn monomial_integral(a: u32, b: u32) -> f64 {
        factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    #[test]
    fn triangle_rules_are_exact() {
        let z = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        for order in 1..=MAX_TRIANGLE_ORDER {
            let rule = triangle_rule(order).unwrap();
            assert!((rule.weight.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            assert!(rule.weight.iter().all(|&w| w > 0.0));
            for l in &rule.lambda {
                assert!((l.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            }
            for a in 0..=order as u32 {
                for b in 0..=(order as u32 - a) {
                    let q: f64 = rule
                        .points_on(&z)
                        .zip(&rule.weight)
                        .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32))
                        .sum::<f64>()
                        * 0.5;
                    let exact = monomial_integral(a, b);
                    assert!((q - exact).abs() < 1e-12, "order {order}: x^{a} y^{b}: {q} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn centroid_and_x_squared() {
        let r = triangle_rule(1).unwrap();
        assert_eq!(r.lambda, vec![[1.0 / 3.0; 3]]);
        assert_eq!(r.weight, vec![1.0]);
        let r = triangle_rule(2).unwrap();
        let z = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let q: f64 = r.points_on(&z).zip(&r.weight).map(|(p, w)| w * p[0] * p[0]).sum::<f64>() * 0.5;
        assert!((q - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn affine_invariance() {
        // ∫_T f over an arbitrary triangle equals |det J| ∫_ref f∘A.
        let z = [[0.3, -0.2], [2.1, 0.4], [0.7, 1.9]];
        let f = |x: f64, y: f64| x.powi(3) * y - 2.0 * x * y * y + y.powi(4);
        let area = 0.5 * ((z[1][0] - z[0][0]) * (z[2][1] - z[0][1]) - (z[2][0] - z[0][0]) * (z[1][1] - z[0][1]));
        let r = triangle_rule(4).unwrap();
        let direct: f64 = area * r.points_on(&z).zip(&r.weight).map(|(p, w)| w * f(p[0], p[1])).sum::<f64>();
        // reference-side evaluation with a higher rule
        let r8 = triangle_rule(8).unwrap();
        let refz = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let mapped: f64 = r8
            .points_on(&refz)
            .zip(&r8.weight)
            .map(|(s, w)| {
                let x = z[0][0] + (z[1][0] - z[0][0]) * s[0] + (z[2][0] - z[0][0]) * s[1];
                let y = z[0][1] + (z[1][1] - z[0][1]) * s[0] + (z[2][1] - z[0][1]) * s[1];
                w * f(x, y)
            })
            .sum::<f64>()
            * 0.5
            * (2.0 * area);
        assert!((direct - mapped).abs() < 1e-12 * mapped.abs().max(1.0));
    }

    #[test]
    fn segment_rules() {
        let r = segment_rule(1).unwrap();
        assert_eq!(r.points, vec![0.5]);
        assert_eq!(r.weight, vec![1.0]);
        for order in 1..=MAX_SEGMENT_ORDER {
            let r = segment_rule(order).unwrap();
            assert!((r.weight.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            for (t, s) in r.points.iter().zip(r.points.iter().rev()) {
                assert!((t + s - 1.0).abs() < 1e-15);
            }
            for d in 0..=order as i32 {
                let q: f64 = r.points.iter().zip(&r.weight).map(|(t, w)| w * t.powi(d)).sum();
                assert!((q - 1.0 / (d as f64 + 1.0)).abs() < 1e-15, "order {order} degree {d}");
            }
        }
        let r = segment_rule(3).unwrap();
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn unsupported_orders() {
        assert!(triangle_rule(0).is_err());
        assert!(triangle_rule(9).is_err());
        assert!(segment_rule(0).is_err());
        assert!(segment_rule(10).is_err());
    }
}
