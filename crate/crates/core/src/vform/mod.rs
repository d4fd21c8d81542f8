//! Variational forms as `(Coef, Test, Trial)` triples.

mod term;

pub use term::{parse_term_sum, Tag, Term, TermSum};

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::fespace::{DofMap, Deriv, Domain, FeSpace, QuadGeometry, QuadTable};
use crate::mesh::{Mesh2d, MeshTopology};
use crate::{Error, Result, ScalarFn};

/// A form coefficient.
#[derive(Clone)]
pub enum Coef {
    Const(f64),
    Func(ScalarFn),
    /// A finite element function given by its dofs.
    Dofs { values: Arc<[f64]>, space: FeSpace },
    /// Values at every quadrature point, `cells x points`.
    Matrix(Arc<QuadTable>),
    /// Vector-valued coefficient, expanded componentwise by
    /// [`expand_extended`].
    Components(Vec<Coef>),
}

impl Coef {
    pub fn func<F: Fn(f64, f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Coef::Func(Arc::new(f))
    }

    pub fn dofs(values: impl Into<Arc<[f64]>>, space: FeSpace) -> Self {
        Coef::Dofs {
            values: values.into(),
            space,
        }
    }

    pub fn matrix(m: QuadTable) -> Self {
        Coef::Matrix(Arc::new(m))
    }

    pub fn components(parts: impl IntoIterator<Item = Coef>) -> Self {
        Coef::Components(parts.into_iter().collect())
    }

    /// Coefficient matrix on the cells of `geom`.
    pub fn to_matrix(&self, mesh: &Mesh2d, topo: &MeshTopology, geom: &QuadGeometry) -> Result<QuadTable> {
        let (nc, ng) = (geom.n_cells(), geom.n_points());
        match self {
            Coef::Const(c) => Ok(QuadTable::filled(nc, ng, *c)),
            Coef::Func(f) => Ok(geom.eval(f.as_ref())),
            Coef::Dofs { values, space } => {
                let dofmap = DofMap::new(mesh, topo, *space);
                geom.fe_values(mesh, &dofmap, values, Deriv::Val)
            }
            Coef::Matrix(m) => {
                if m.shape() != (nc, ng) {
                    return Err(Error::Shape {
                        expected: format!("{nc}x{ng}"),
                        got: format!("{}x{}", m.nrows(), m.ncols()),
                    });
                }
                Ok(QuadTable::clone(m))
            }
            Coef::Components(_) => Err(Error::InvalidForm(
                "vector coefficient must be expanded before evaluation".into(),
            )),
        }
    }
}

impl From<f64> for Coef {
    fn from(c: f64) -> Self {
        Coef::Const(c)
    }
}

impl From<ScalarFn> for Coef {
    fn from(f: ScalarFn) -> Self {
        Coef::Func(f)
    }
}

impl From<QuadTable> for Coef {
    fn from(m: QuadTable) -> Self {
        Coef::matrix(m)
    }
}

impl fmt::Debug for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coef::Const(c) => write!(f, "Const({c})"),
            Coef::Func(_) => f.write_str("Func(..)"),
            Coef::Dofs { values, space } => write!(f, "Dofs({space}, {} values)", values.len()),
            Coef::Matrix(m) => write!(f, "Matrix({}x{})", m.nrows(), m.ncols()),
            Coef::Components(c) => f.debug_tuple("Components").field(c).finish(),
        }
    }
}

/// Evaluates a coefficient on a fresh quadrature geometry.
pub fn coef_to_matrix(
    c: &Coef,
    mesh: &Mesh2d,
    topo: &MeshTopology,
    quad_order: usize,
    domain: Domain<'_>,
) -> Result<QuadTable> {
    let geom = QuadGeometry::new(mesh, topo, domain, quad_order)?;
    c.to_matrix(mesh, topo, &geom)
}

#[derive(Debug, Clone)]
pub struct FormEntry {
    pub coef: Coef,
    pub test: TermSum,
    /// `None` for linear forms.
    pub trial: Option<TermSum>,
}

#[derive(Debug, Clone, Default)]
pub struct VarForm {
    pub entries: Vec<FormEntry>,
}

impl VarForm {
    pub fn bilinear(coefs: Vec<Coef>, test: &[&str], trial: &[&str]) -> Result<Self> {
        check_lengths(coefs.len(), test.len())?;
        check_lengths(coefs.len(), trial.len())?;
        let entries = coefs
            .into_iter()
            .zip(test.iter().zip(trial))
            .map(|(coef, (t, u))| {
                Ok(FormEntry {
                    coef,
                    test: parse_term_sum(t)?,
                    trial: Some(parse_term_sum(u)?),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { entries })
    }

    pub fn linear(coefs: Vec<Coef>, test: &[&str]) -> Result<Self> {
        check_lengths(coefs.len(), test.len())?;
        let entries = coefs
            .into_iter()
            .zip(test)
            .map(|(coef, t)| {
                Ok(FormEntry {
                    coef,
                    test: parse_term_sum(t)?,
                    trial: None,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// True when no entry has a trial term.
    pub fn is_linear(&self) -> bool {
        self.entries.iter().all(|e| e.trial.is_none())
    }

    /// Rejects forms mixing linear and bilinear entries.
    pub fn check(&self) -> Result<()> {
        let bilinear = self.entries.iter().filter(|e| e.trial.is_some()).count();
        if bilinear != 0 && bilinear != self.entries.len() {
            return Err(Error::InvalidForm("form mixes linear and bilinear entries".into()));
        }
        Ok(())
    }

    pub fn is_elementary(&self) -> bool {
        self.entries.iter().all(|e| {
            e.test.len() == 1
                && e.test.0[0].tag != Tag::Grad
                && !matches!(e.coef, Coef::Components(_))
                && e.trial.as_ref().is_none_or(|u| u.len() == 1 && u.0[0].tag != Tag::Grad)
        })
    }
}

fn check_lengths(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Length { expected, got });
    }
    Ok(())
}

fn split_grad(t: &Term) -> [Term; 2] {
    [Term::new(t.symbol.clone(), Tag::Dx), Term::new(t.symbol.clone(), Tag::Dy)]
}

/// Distributes `+`-sums into elementary `(test, trial)` pairs, each
/// carrying the entry's coefficient. `grad x grad` becomes
/// `dx x dx + dy x dy`.
///
/// For linear entries a [`Coef::Components`] coefficient is spread over
/// the components: `v.val` against `n` components gives `v1.val .. vn.val`,
/// and `v.grad` against two components gives `c1 v.dx + c2 v.dy`.
pub fn expand_extended(form: &VarForm) -> Result<VarForm> {
    form.check()?;
    let mut out = Vec::new();
    for entry in &form.entries {
        match &entry.trial {
            Some(trial) => {
                if let Coef::Components(_) = entry.coef {
                    return Err(Error::InvalidForm("vector coefficient in a bilinear entry".into()));
                }
                for t in entry.test.terms() {
                    for u in trial.terms() {
                        match (t.tag == Tag::Grad, u.tag == Tag::Grad) {
                            (false, false) => out.push(elementary(&entry.coef, t.clone(), Some(u.clone()))),
                            (true, true) => {
                                for (ti, ui) in split_grad(t).into_iter().zip(split_grad(u)) {
                                    out.push(elementary(&entry.coef, ti, Some(ui)));
                                }
                            }
                            _ => {
                                return Err(Error::InvalidForm(format!(
                                    "cannot pair `{t}` with `{u}`: grad needs grad on the other side"
                                )))
                            }
                        }
                    }
                }
            }
            None => expand_linear(entry, &mut out)?,
        }
    }
    Ok(VarForm { entries: out })
}

fn elementary(coef: &Coef, test: Term, trial: Option<Term>) -> FormEntry {
    FormEntry {
        coef: coef.clone(),
        test: TermSum::single(test),
        trial: trial.map(TermSum::single),
    }
}

fn expand_linear(entry: &FormEntry, out: &mut Vec<FormEntry>) -> Result<()> {
    let parts = match &entry.coef {
        Coef::Components(parts) => parts,
        coef => {
            for t in entry.test.terms() {
                if t.tag == Tag::Grad {
                    return Err(Error::InvalidForm(format!(
                        "`{t}` in a linear form needs a two-component coefficient"
                    )));
                }
                out.push(elementary(coef, t.clone(), None));
            }
            return Ok(());
        }
    };
    let [t] = entry.test.terms() else {
        return Err(Error::InvalidForm(format!(
            "vector coefficient needs a single test term, got `{}`",
            entry.test
        )));
    };
    if parts.iter().any(|c| matches!(c, Coef::Components(_))) {
        return Err(Error::InvalidForm("nested vector coefficient".into()));
    }
    match t.tag {
        Tag::Grad => {
            let [cx, cy] = parts.as_slice() else {
                return Err(Error::InvalidForm(format!(
                    "`{t}` needs 2 coefficient components, got {}",
                    parts.len()
                )));
            };
            let [dx, dy] = split_grad(t);
            out.push(elementary(cx, dx, None));
            out.push(elementary(cy, dy, None));
        }
        tag => {
            if t.symbol != "v" {
                return Err(Error::InvalidForm(format!(
                    "vector shorthand needs the symbol `v`, got `{t}`"
                )));
            }
            for (i, c) in parts.iter().enumerate() {
                out.push(elementary(c, Term::new(format!("v{}", i + 1), tag), None));
            }
        }
    }
    Ok(())
}

/// Renames symbols: test symbols through `test_map`, trial symbols through
/// `trial_map`. Symbols missing from the relevant map are an error.
pub fn rename_symbols(
    form: &VarForm,
    test_map: &HashMap<String, String>,
    trial_map: &HashMap<String, String>,
) -> Result<VarForm> {
    let rename = |sum: &TermSum, map: &HashMap<String, String>| -> Result<TermSum> {
        sum.terms()
            .iter()
            .map(|t| match map.get(&t.symbol) {
                Some(s) => Ok(Term::new(s.clone(), t.tag)),
                None => Err(Error::UnknownSymbol(t.symbol.clone())),
            })
            .collect::<Result<Vec<_>>>()
            .map(TermSum)
    };
    let entries = form
        .entries
        .iter()
        .map(|e| {
            Ok(FormEntry {
                coef: e.coef.clone(),
                test: rename(&e.test, test_map)?,
                trial: e.trial.as_ref().map(|u| rename(u, trial_map)).transpose()?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(VarForm { entries })
}

fn standard_map(user: &[&str], prefix: char) -> HashMap<String, String> {
    user.iter()
        .enumerate()
        .map(|(i, s)| (s.to_string(), format!("{prefix}{}", i + 1)))
        .collect()
}

/// Maps the `i`-th test symbol in `vstr` to `v{i+1}` and the `i`-th trial
/// symbol in `ustr` to `u{i+1}`.
pub fn standardize_symbols(vstr: &[&str], ustr: &[&str], form: &VarForm) -> Result<VarForm> {
    rename_symbols(form, &standard_map(vstr, 'v'), &standard_map(ustr, 'u'))
}

/// Inverse of [`standardize_symbols`] for the same symbol lists.
pub fn unstandardize_symbols(vstr: &[&str], ustr: &[&str], form: &VarForm) -> Result<VarForm> {
    let invert = |m: HashMap<String, String>| m.into_iter().map(|(k, v)| (v, k)).collect();
    rename_symbols(form, &invert(standard_map(vstr, 'v')), &invert(standard_map(ustr, 'u')))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::square_mesh;

    fn pairs(form: &VarForm) -> Vec<(String, String)> {
        form.entries
            .iter()
            .map(|e| (e.test.to_string(), e.trial.as_ref().map(|u| u.to_string()).unwrap_or_default()))
            .collect()
    }

    fn elasticity_short() -> VarForm {
        VarForm::bilinear(
            vec![1.0.into(), 1.0.into(), 0.5.into()],
            &["v1.dx", "v2.dy", "v1.dy + v2.dx"],
            &["u1.dx", "u2.dy", "u1.dy + u2.dx"],
        )
        .unwrap()
    }

    #[test]
    fn strain_form_expands_to_six_products() {
        let e = expand_extended(&elasticity_short()).unwrap();
        let got = pairs(&e);
        let want = [
            ("v1.dx", "u1.dx"),
            ("v2.dy", "u2.dy"),
            ("v1.dy", "u1.dy"),
            ("v1.dy", "u2.dx"),
            ("v2.dx", "u1.dy"),
            ("v2.dx", "u2.dx"),
        ];
        assert_eq!(got.len(), 6);
        for (g, w) in got.iter().zip(want) {
            assert_eq!((g.0.as_str(), g.1.as_str()), w);
        }
        for entry in &e.entries[2..] {
            assert!(matches!(entry.coef, Coef::Const(c) if c == 0.5));
        }
    }

    #[test]
    fn grad_grad_and_identity() {
        let f = VarForm::bilinear(vec![1.0.into()], &["v.grad"], &["u.grad"]).unwrap();
        let e = expand_extended(&f).unwrap();
        assert_eq!(
            pairs(&e),
            vec![("v.dx".into(), "u.dx".into()), ("v.dy".into(), "u.dy".into())]
        );
        let single = VarForm::bilinear(vec![2.0.into()], &["v.val"], &["u.dx"]).unwrap();
        assert_eq!(pairs(&expand_extended(&single).unwrap()), pairs(&single));
    }

    #[test]
    fn expansion_is_idempotent() {
        let once = expand_extended(&elasticity_short()).unwrap();
        let twice = expand_extended(&once).unwrap();
        assert_eq!(pairs(&once), pairs(&twice));
        assert!(once.is_elementary());
        assert!(!elasticity_short().is_elementary());
    }

    #[test]
    fn grad_against_val_is_rejected() {
        let f = VarForm::bilinear(vec![1.0.into()], &["v.grad"], &["u.val"]).unwrap();
        assert!(matches!(expand_extended(&f), Err(Error::InvalidForm(_))));
        let lin = VarForm::linear(vec![1.0.into()], &["v.grad"]).unwrap();
        assert!(expand_extended(&lin).is_err());
    }

    #[test]
    fn vector_linear_shorthand() {
        let f = VarForm::linear(vec![Coef::components([1.0.into(), 2.0.into()])], &["v.val"]).unwrap();
        let e = expand_extended(&f).unwrap();
        assert_eq!(pairs(&e), vec![("v1.val".into(), String::new()), ("v2.val".into(), String::new())]);
        let g = VarForm::linear(vec![Coef::components([1.0.into(), 2.0.into()])], &["w.grad"]).unwrap();
        assert_eq!(
            pairs(&expand_extended(&g).unwrap()),
            vec![("w.dx".into(), String::new()), ("w.dy".into(), String::new())]
        );
    }

    #[test]
    fn mismatched_lists() {
        assert!(matches!(
            VarForm::bilinear(vec![1.0.into()], &["v.val", "v.dx"], &["u.val"]),
            Err(Error::Length { .. })
        ));
    }

    #[test]
    fn standardize_stokes_and_newton_symbols() {
        let f = VarForm::bilinear(vec![1.0.into(), 1.0.into()], &["q.val", "v1.grad"], &["p.val", "u1.grad"]).unwrap();
        let s = standardize_symbols(&["v1", "v2", "q"], &["u1", "u2", "p"], &f).unwrap();
        assert_eq!(pairs(&s)[0], ("v3.val".into(), "u3.val".into()));
        assert_eq!(pairs(&s)[1], ("v1.grad".into(), "u1.grad".into()));

        let g = VarForm::bilinear(vec![1.0.into()], &["v1.val"], &["dp.val"]).unwrap();
        let s = standardize_symbols(&["v1", "v2", "q"], &["du1", "du2", "dp"], &g).unwrap();
        assert_eq!(pairs(&s)[0].1, "u3.val");
        let back = unstandardize_symbols(&["v1", "v2", "q"], &["du1", "du2", "dp"], &s).unwrap();
        assert_eq!(pairs(&back), pairs(&g));

        assert!(matches!(
            standardize_symbols(&["v"], &["u"], &g),
            Err(Error::UnknownSymbol(s)) if s == "v1"
        ));
    }

    #[test]
    fn coefficient_matrices() {
        let m = Mesh2d::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]]).unwrap();
        let t = MeshTopology::new(&m).unwrap();
        let c = coef_to_matrix(&Coef::func(|x, y| x + y), &m, &t, 1, Domain::Interior).unwrap();
        assert_eq!(c.shape(), (1, 1));
        assert!((c.get(0, 0) - 2.0 / 3.0).abs() < 1e-15);

        let m = square_mesh([0.0, 1.0, 0.0, 1.0], 0.25).unwrap();
        let t = MeshTopology::new(&m).unwrap();
        let ones = coef_to_matrix(&1.0.into(), &m, &t, 3, Domain::Interior).unwrap();
        assert_eq!(ones.nrows(), 32);
        assert!(ones.as_slice().iter().all(|&v| v == 1.0));

        // a P2 function is the same coefficient either way
        let f = |x: f64, y: f64| x * x - 3.0 * x * y + y;
        let dm = DofMap::new(&m, &t, FeSpace::P2);
        let dofs = crate::fespace::interpolate_nodal(&f, &dm);
        let a = coef_to_matrix(&Coef::dofs(dofs, FeSpace::P2), &m, &t, 4, Domain::Interior).unwrap();
        let b = coef_to_matrix(&Coef::func(f), &m, &t, 4, Domain::Interior).unwrap();
        let diff = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-13);

        let passed = coef_to_matrix(&Coef::matrix(b.clone()), &m, &t, 4, Domain::Interior).unwrap();
        assert_eq!(passed, b);
        assert!(matches!(
            coef_to_matrix(&Coef::matrix(b), &m, &t, 2, Domain::Interior),
            Err(Error::Shape { .. })
        ));
    }
}
