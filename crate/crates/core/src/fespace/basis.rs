//! Lagrange shape functions on the reference triangle, written in
//! barycentric coordinates.
//!
//! Local numbering: vertices `0..3`, then edge dofs by local edge (edge `i`
//! is opposite vertex `i`, running from vertex `i+1` to vertex `i+2`), then
//! the P3 bubble. For P3 the two dofs of edge `i` are ordered from vertex
//! `i+1` towards vertex `i+2`.

use super::FeSpace;

pub const MAX_LOCAL_DOFS: usize = 10;

/// Barycentric coordinates of the local dof points.
pub fn local_dof_lambdas(space: FeSpace) -> Vec<[f64; 3]> {
    let mut out = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    match space {
        FeSpace::P1 => {}
        FeSpace::P2 => {
            for i in 0..3 {
                let mut l = [0.0; 3];
                l[(i + 1) % 3] = 0.5;
                l[(i + 2) % 3] = 0.5;
                out.push(l);
            }
        }
        FeSpace::P3 => {
            for i in 0..3 {
                for (near, far) in [(2.0 / 3.0, 1.0 / 3.0), (1.0 / 3.0, 2.0 / 3.0)] {
                    let mut l = [0.0; 3];
                    l[(i + 1) % 3] = near;
                    l[(i + 2) % 3] = far;
                    out.push(l);
                }
            }
            out.push([1.0 / 3.0; 3]);
        }
    }
    out
}

/// Values of all local basis functions at barycentric point `l`.
pub fn shape_values(space: FeSpace, l: [f64; 3]) -> [f64; MAX_LOCAL_DOFS] {
    let mut phi = [0.0; MAX_LOCAL_DOFS];
    match space {
        FeSpace::P1 => phi[..3].copy_from_slice(&l),
        FeSpace::P2 => {
            for i in 0..3 {
                phi[i] = l[i] * (2.0 * l[i] - 1.0);
                phi[3 + i] = 4.0 * l[(i + 1) % 3] * l[(i + 2) % 3];
            }
        }
        FeSpace::P3 => {
            for i in 0..3 {
                phi[i] = 0.5 * l[i] * (3.0 * l[i] - 1.0) * (3.0 * l[i] - 2.0);
                let (a, b) = (l[(i + 1) % 3], l[(i + 2) % 3]);
                phi[3 + 2 * i] = 4.5 * a * b * (3.0 * a - 1.0);
                phi[4 + 2 * i] = 4.5 * a * b * (3.0 * b - 1.0);
            }
            phi[9] = 27.0 * l[0] * l[1] * l[2];
        }
    }
    phi
}

/// Partial derivatives `∂φ_j/∂λ_m` of all local basis functions.
pub fn shape_lambda_derivatives(space: FeSpace, l: [f64; 3]) -> [[f64; 3]; MAX_LOCAL_DOFS] {
    let mut d = [[0.0; 3]; MAX_LOCAL_DOFS];
    match space {
        FeSpace::P1 => {
            for i in 0..3 {
                d[i][i] = 1.0;
            }
        }
        FeSpace::P2 => {
            for i in 0..3 {
                d[i][i] = 4.0 * l[i] - 1.0;
                let (a, b) = ((i + 1) % 3, (i + 2) % 3);
                d[3 + i][a] = 4.0 * l[b];
                d[3 + i][b] = 4.0 * l[a];
            }
        }
        FeSpace::P3 => {
            for i in 0..3 {
                let t = l[i];
                d[i][i] = 0.5 * (27.0 * t * t - 18.0 * t + 2.0);
                let (a, b) = ((i + 1) % 3, (i + 2) % 3);
                let (la, lb) = (l[a], l[b]);
                // 4.5 la lb (3 la - 1)
                d[3 + 2 * i][a] = 4.5 * lb * (6.0 * la - 1.0);
                d[3 + 2 * i][b] = 4.5 * la * (3.0 * la - 1.0);
                // 4.5 la lb (3 lb - 1)
                d[4 + 2 * i][a] = 4.5 * lb * (3.0 * lb - 1.0);
                d[4 + 2 * i][b] = 4.5 * la * (6.0 * lb - 1.0);
            }
            d[9] = [27.0 * l[1] * l[2], 27.0 * l[0] * l[2], 27.0 * l[0] * l[1]];
        }
    }
    d
}

/// Local indices of the dofs lying on local edge `i`: the two endpoints
/// (in edge direction) followed by the edge-interior dofs.
pub fn trace_local_dofs(space: FeSpace, i: usize) -> Vec<usize> {
    let mut out = vec![(i + 1) % 3, (i + 2) % 3];
    match space {
        FeSpace::P1 => {}
        FeSpace::P2 => out.push(3 + i),
        FeSpace::P3 => out.extend([3 + 2 * i, 4 + 2 * i]),
    }
    out
}
