//! Manufactured solutions given by value, gradient and Hessian.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::ScalarFn;

pub type GradFn = Arc<dyn Fn(f64, f64) -> [f64; 2] + Send + Sync>;
/// `[f_xx, f_xy, f_yy]`.
pub type HessFn = Arc<dyn Fn(f64, f64) -> [f64; 3] + Send + Sync>;

/// A smooth scalar field with its first and second derivatives.
#[derive(Clone)]
pub struct Field {
    pub value: ScalarFn,
    pub grad: GradFn,
    pub hess: HessFn,
}

impl Field {
    pub fn new<U, G, H>(value: U, grad: G, hess: H) -> Self
    where
        U: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64, f64) -> [f64; 2] + Send + Sync + 'static,
        H: Fn(f64, f64) -> [f64; 3] + Send + Sync + 'static,
    {
        Self {
            value: Arc::new(value),
            grad: Arc::new(grad),
            hess: Arc::new(hess),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_, _| c, |_, _| [0.0; 2], |_, _| [0.0; 3])
    }

    /// `a + b x + c y`.
    pub fn linear(a: f64, b: f64, c: f64) -> Self {
        Self::new(move |x, y| a + b * x + c * y, move |_, _| [b, c], |_, _| [0.0; 3])
    }

    pub fn laplacian(&self) -> ScalarFn {
        let h = self.hess.clone();
        Arc::new(move |x, y| {
            let [xx, _, yy] = h(x, y);
            xx + yy
        })
    }

    /// Normal flux data for edge coefficients: `x, y -> [f_x, f_y]`.
    pub fn grad_vec(&self) -> impl Fn(f64, f64) -> Vec<f64> + Send + Sync + 'static {
        let g = self.grad.clone();
        move |x, y| g(x, y).to_vec()
    }

    pub fn scaled(&self, s: f64) -> Self {
        let (v, g, h) = (self.value.clone(), self.grad.clone(), self.hess.clone());
        Self::new(
            move |x, y| s * v(x, y),
            move |x, y| g(x, y).map(|d| s * d),
            move |x, y| h(x, y).map(|d| s * d),
        )
    }
}

/// `sin(πx) cos(πy)`.
pub fn sin_cos() -> Field {
    Field::new(
        |x, y| (PI * x).sin() * (PI * y).cos(),
        |x, y| [PI * (PI * x).cos() * (PI * y).cos(), -PI * (PI * x).sin() * (PI * y).sin()],
        |x, y| {
            let (sx, cx, sy, cy) = ((PI * x).sin(), (PI * x).cos(), (PI * y).sin(), (PI * y).cos());
            let p2 = PI * PI;
            [-p2 * sx * cy, -p2 * cx * sy, -p2 * sx * cy]
        },
    )
}

/// `1 + x y`, a variable diffusion coefficient.
pub fn one_plus_xy() -> Field {
    Field::new(|x, y| 1.0 + x * y, |x, y| [y, x], |_, _| [0.0, 1.0, 0.0])
}

/// `t²(1-t)²` and its first three derivatives.
fn bump(t: f64) -> [f64; 4] {
    [
        t * t - 2.0 * t.powi(3) + t.powi(4),
        2.0 * t - 6.0 * t * t + 4.0 * t.powi(3),
        2.0 - 12.0 * t + 12.0 * t * t,
        -12.0 + 24.0 * t,
    ]
}

/// Divergence-free velocity and mean-zero pressure on the unit square:
/// `u = 2⁸(-φ(x)φ'(y), φ'(x)φ(y))`, `p = -2⁸ φ''(x) φ(y)` with
/// `φ(t) = t²(1-t)²`.
pub fn stokes_example() -> [Field; 3] {
    const S: f64 = 256.0;
    let u1 = Field::new(
        |x, y| -S * bump(x)[0] * bump(y)[1],
        |x, y| {
            let (a, b) = (bump(x), bump(y));
            [-S * a[1] * b[1], -S * a[0] * b[2]]
        },
        |x, y| {
            let (a, b) = (bump(x), bump(y));
            [-S * a[2] * b[1], -S * a[1] * b[2], -S * a[0] * b[3]]
        },
    );
    let u2 = Field::new(
        |x, y| S * bump(x)[1] * bump(y)[0],
        |x, y| {
            let (a, b) = (bump(x), bump(y));
            [S * a[2] * b[0], S * a[1] * b[1]]
        },
        |x, y| {
            let (a, b) = (bump(x), bump(y));
            [S * a[3] * b[0], S * a[2] * b[1], S * a[1] * b[2]]
        },
    );
    let p = Field::new(
        |x, y| -S * bump(x)[2] * bump(y)[0],
        |x, y| {
            let (a, b) = (bump(x), bump(y));
            [-S * a[3] * b[0], -S * a[2] * b[1]]
        },
        |x, y| {
            let (a, b) = (bump(x), bump(y));
            [-S * 24.0 * b[0], -S * a[3] * b[1], -S * a[2] * b[2]]
        },
    );
    [u1, u2, p]
}

/// Smooth displacement for elasticity tests:
/// `u1 = sin(πx) sin(πy) + x²`, `u2 = e^x cos(y)`.
pub fn elasticity_example() -> [Field; 2] {
    let u1 = Field::new(
        |x, y| (PI * x).sin() * (PI * y).sin() + x * x,
        |x, y| {
            [
                PI * (PI * x).cos() * (PI * y).sin() + 2.0 * x,
                PI * (PI * x).sin() * (PI * y).cos(),
            ]
        },
        |x, y| {
            let p2 = PI * PI;
            let s = (PI * x).sin() * (PI * y).sin();
            [-p2 * s + 2.0, p2 * (PI * x).cos() * (PI * y).cos(), -p2 * s]
        },
    );
    let u2 = Field::new(
        |x, y| x.exp() * y.cos(),
        |x, y| [x.exp() * y.cos(), -x.exp() * y.sin()],
        |x, y| [x.exp() * y.cos(), -x.exp() * y.sin(), -x.exp() * y.cos()],
    );
    [u1, u2]
}

/// Biharmonic data: `u = eˣ sin(πy) + x²y²`, `w = -Δu` and `f = Δ²u`.
pub struct BiharmonicExample {
    pub u: Field,
    pub w: Field,
    pub f: ScalarFn,
}

/// `sin²(πt)` and its first four derivatives.
fn sin_sq(t: f64) -> [f64; 5] {
    let (s, c) = ((2.0 * PI * t).sin(), (2.0 * PI * t).cos());
    [(PI * t).sin().powi(2), PI * s, 2.0 * PI * PI * c, -4.0 * PI.powi(3) * s, -8.0 * PI.powi(4) * c]
}

/// Clamped plate data: `u = sin²(πx) sin²(πy)`, so `u = ∂ₙu = 0` on the
/// boundary of the unit square.
pub fn biharmonic_clamped() -> BiharmonicExample {
    let u = Field::new(
        |x, y| sin_sq(x)[0] * sin_sq(y)[0],
        |x, y| {
            let (a, b) = (sin_sq(x), sin_sq(y));
            [a[1] * b[0], a[0] * b[1]]
        },
        |x, y| {
            let (a, b) = (sin_sq(x), sin_sq(y));
            [a[2] * b[0], a[1] * b[1], a[0] * b[2]]
        },
    );
    let w = Field::new(
        |x, y| {
            let (a, b) = (sin_sq(x), sin_sq(y));
            -(a[2] * b[0] + a[0] * b[2])
        },
        |x, y| {
            let (a, b) = (sin_sq(x), sin_sq(y));
            [-(a[3] * b[0] + a[1] * b[2]), -(a[2] * b[1] + a[0] * b[3])]
        },
        |x, y| {
            let (a, b) = (sin_sq(x), sin_sq(y));
            [-(a[4] * b[0] + a[2] * b[2]), -(a[3] * b[1] + a[1] * b[3]), -(a[2] * b[2] + a[0] * b[4])]
        },
    );
    let f = Arc::new(|x: f64, y: f64| {
        let (a, b) = (sin_sq(x), sin_sq(y));
        a[4] * b[0] + 2.0 * a[2] * b[2] + a[0] * b[4]
    });
    BiharmonicExample { u, w, f }
}

/// Data with nonzero boundary values and normal derivative.
pub fn biharmonic_example() -> BiharmonicExample {
    let p2 = PI * PI;
    let a = |x: f64, y: f64| x.exp() * (PI * y).sin();
    let ax = a;
    let ay = |x: f64, y: f64| PI * x.exp() * (PI * y).cos();
    let u = Field::new(
        move |x, y| a(x, y) + x * x * y * y,
        move |x, y| [ax(x, y) + 2.0 * x * y * y, ay(x, y) + 2.0 * x * x * y],
        move |x, y| [a(x, y) + 2.0 * y * y, ay(x, y) + 4.0 * x * y, -p2 * a(x, y) + 2.0 * x * x],
    );
    // w = -Δu = (π² - 1) a - 2(x² + y²)
    let c = p2 - 1.0;
    let w = Field::new(
        move |x, y| c * a(x, y) - 2.0 * (x * x + y * y),
        move |x, y| [c * ax(x, y) - 4.0 * x, c * ay(x, y) - 4.0 * y],
        move |x, y| [c * a(x, y) - 4.0, c * ay(x, y), -c * p2 * a(x, y) - 4.0],
    );
    let f = Arc::new(move |x: f64, y: f64| (1.0 - p2).powi(2) * a(x, y) + 8.0);
    BiharmonicExample { u, w, f }
}

/// Polynomial Navier-Stokes solution `u = (x² - y², -2xy)`,
/// `p = x + y - 1`; divergence free, velocity in P2 and pressure in P1.
pub fn ns_polynomial() -> [Field; 3] {
    [
        Field::new(|x, y| x * x - y * y, |x, y| [2.0 * x, -2.0 * y], |_, _| [2.0, 0.0, -2.0]),
        Field::new(|x, y| -2.0 * x * y, |x, y| [-2.0 * y, -2.0 * x], |_, _| [0.0, -2.0, 0.0]),
        Field::linear(-1.0, 1.0, 1.0),
    ]
}
