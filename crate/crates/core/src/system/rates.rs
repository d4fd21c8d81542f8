use crate::fespace::{Deriv, DofMap, Domain, QuadGeometry};
use crate::mesh::{Mesh2d, MeshTopology};
use crate::{Error, Result};

/// `‖u − u_h‖_{L²}` by quadrature.
pub fn error_l2<F>(mesh: &Mesh2d, topo: &MeshTopology, dofmap: &DofMap, quad_order: usize, exact: &F, dofs: &[f64]) -> Result<f64>
where
    F: Fn(f64, f64) -> f64 + ?Sized,
{
    let geom = QuadGeometry::new(mesh, topo, Domain::Interior, quad_order)?;
    let uh = geom.fe_values(mesh, dofmap, dofs, Deriv::Val)?;
    let u = geom.eval(exact);
    Ok(integrate_sq(&geom, |c, p| u.get(c, p) - uh.get(c, p)).sqrt())
}

/// `|u − u_h|_{H¹}` by quadrature, given the exact gradient.
pub fn error_h1_semi<F>(
    mesh: &Mesh2d,
    topo: &MeshTopology,
    dofmap: &DofMap,
    quad_order: usize,
    exact_grad: &F,
    dofs: &[f64],
) -> Result<f64>
where
    F: Fn(f64, f64) -> [f64; 2] + ?Sized,
{
    let geom = QuadGeometry::new(mesh, topo, Domain::Interior, quad_order)?;
    let dx = geom.fe_values(mesh, dofmap, dofs, Deriv::Dx)?;
    let dy = geom.fe_values(mesh, dofmap, dofs, Deriv::Dy)?;
    let gx = geom.eval(&|x, y| exact_grad(x, y)[0]);
    let gy = geom.eval(&|x, y| exact_grad(x, y)[1]);
    let ex = integrate_sq(&geom, |c, p| gx.get(c, p) - dx.get(c, p));
    let ey = integrate_sq(&geom, |c, p| gy.get(c, p) - dy.get(c, p));
    Ok((ex + ey).sqrt())
}

fn integrate_sq(geom: &QuadGeometry, f: impl Fn(usize, usize) -> f64) -> f64 {
    (0..geom.n_cells())
        .map(|c| {
            geom.measure[c]
                * geom
                    .weights
                    .iter()
                    .enumerate()
                    .map(|(p, w)| {
                        let d = f(c, p);
                        w * d * d
                    })
                    .sum::<f64>()
        })
        .sum()
}

/// Least-squares slope of `log(err)` against `log(h)`.
pub fn fit_rate(h: &[f64], err: &[f64]) -> Result<f64> {
    if h.len() != err.len() {
        return Err(Error::Length {
            expected: h.len(),
            got: err.len(),
        });
    }
    if h.len() < 2 {
        return Err(Error::InvalidArgument("a rate needs at least two levels".into()));
    }
    if h.iter().chain(err).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument("h and errors must be positive".into()));
    }
    let n = h.len() as f64;
    let lx: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = err.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("all h values are equal".into()));
    }
    Ok(sxy / sxx)
}

/// Errors over a sequence of meshes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RateReport {
    /// Triangle count per level.
    pub n_elems: Vec<usize>,
    pub h: Vec<f64>,
    /// Named error columns, one value per level.
    pub columns: Vec<(String, Vec<f64>)>,
}

impl RateReport {
    pub fn new(names: &[&str]) -> Self {
        Self {
            n_elems: Vec::new(),
            h: Vec::new(),
            columns: names.iter().map(|n| (n.to_string(), Vec::new())).collect(),
        }
    }

    pub fn push(&mut self, n_elems: usize, h: f64, errors: &[f64]) -> Result<()> {
        if errors.len() != self.columns.len() {
            return Err(Error::Length {
                expected: self.columns.len(),
                got: errors.len(),
            });
        }
        self.n_elems.push(n_elems);
        self.h.push(h);
        for ((_, col), &e) in self.columns.iter_mut().zip(errors) {
            col.push(e);
        }
        Ok(())
    }

    pub fn levels(&self) -> usize {
        self.h.len()
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_slice())
    }

    pub fn names(&self) -> Vec<&str> {
        self.columns.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn slope(&self, name: &str) -> Result<f64> {
        let col = self
            .column(name)
            .ok_or_else(|| Error::InvalidArgument(format!("no column `{name}`")))?;
        fit_rate(&self.h, col)
    }

    pub fn slopes(&self) -> Result<Vec<f64>> {
        self.columns.iter().map(|(_, c)| fit_rate(&self.h, c)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fespace::{interpolate_nodal, FeSpace};
    use crate::mesh::{square_mesh, uniform_refine};

    #[test]
    fn exact_slope() {
        let h = [0.5, 0.25, 0.125, 0.0625];
        let e: Vec<f64> = h.iter().map(|h| h * h).collect();
        assert!((fit_rate(&h, &e).unwrap() - 2.0).abs() < 1e-12);
        assert!(fit_rate(&h[..1], &e[..1]).is_err());
        assert!(fit_rate(&[0.5, 0.25], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn zero_against_one() {
        let m = square_mesh([0.0, 1.0, 0.0, 1.0], 0.5).unwrap();
        let t = MeshTopology::new(&m).unwrap();
        let dm = DofMap::new(&m, &t, FeSpace::P1);
        let e = error_l2(&m, &t, &dm, 3, &|_, _| 1.0, &vec![0.0; dm.n_dof]).unwrap();
        assert!((e - 1.0).abs() < 1e-14);
    }

    #[test]
    fn own_interpolant_has_no_error() {
        let m = square_mesh([0.0, 1.0, 0.0, 1.0], 0.5).unwrap();
        let t = MeshTopology::new(&m).unwrap();
        let dm = DofMap::new(&m, &t, FeSpace::P2);
        let f = |x: f64, y: f64| x * x + x * y - y;
        let g = |x: f64, y: f64| [2.0 * x + y, x - 1.0];
        let u = interpolate_nodal(&f, &dm);
        assert!(error_l2(&m, &t, &dm, 5, &f, &u).unwrap() < 1e-13);
        assert!(error_h1_semi(&m, &t, &dm, 5, &g, &u).unwrap() < 1e-12);
    }

    #[test]
    fn p1_interpolation_of_x_squared_is_second_order() {
        let m1 = square_mesh([0.0, 1.0, 0.0, 1.0], 0.5).unwrap();
        let m2 = uniform_refine(&m1).unwrap();
        let f = |x: f64, _: f64| x * x;
        let err = |m: &Mesh2d| {
            let t = MeshTopology::new(m).unwrap();
            let dm = DofMap::new(m, &t, FeSpace::P1);
            error_l2(m, &t, &dm, 6, &f, &interpolate_nodal(&f, &dm)).unwrap()
        };
        let ratio = err(&m1) / err(&m2);
        assert!((ratio - 4.0).abs() < 0.1, "{ratio}");
    }
}
