//! Sparse assembly of bilinear and linear forms over triangles and
//! boundary edges, for scalar and block (multi-component) systems.

mod sparse;

pub use sparse::{compress, CsrMatrix, SparseTriples};

use std::collections::HashMap;

use crate::fespace::{Deriv, DofMap, Domain, FeSpace, QuadGeometry, QuadTable};
use crate::mesh::{BoundaryEdge, Mesh2d, MeshTopology};
use crate::vform::{expand_extended, FormEntry, Tag, Term, VarForm};
use crate::{Error, Result};

/// Result of a scalar assembly: triples for a bilinear form, a dense
/// vector for a linear one.
#[derive(Debug, Clone, PartialEq)]
pub enum Contribution {
    Matrix(SparseTriples),
    Vector(Vec<f64>),
}

impl Contribution {
    pub fn into_matrix(self) -> Result<SparseTriples> {
        match self {
            Contribution::Matrix(t) => Ok(t),
            Contribution::Vector(_) => Err(Error::InvalidForm("expected a bilinear form".into())),
        }
    }

    pub fn into_vector(self) -> Result<Vec<f64>> {
        match self {
            Contribution::Vector(v) => Ok(v),
            Contribution::Matrix(_) => Err(Error::InvalidForm("expected a linear form".into())),
        }
    }
}

fn deriv_of(t: &Term) -> Result<Deriv> {
    match t.tag {
        Tag::Val => Ok(Deriv::Val),
        Tag::Dx => Ok(Deriv::Dx),
        Tag::Dy => Ok(Deriv::Dy),
        Tag::Grad => Err(Error::InvalidForm(format!("`{t}` must be expanded first"))),
    }
}

/// Basis tables of one geometry, tabulated on demand.
struct TableCache<'a> {
    mesh: &'a Mesh2d,
    geom: &'a QuadGeometry,
    tables: HashMap<(FeSpace, Deriv), Vec<QuadTable>>,
}

impl<'a> TableCache<'a> {
    fn new(mesh: &'a Mesh2d, geom: &'a QuadGeometry) -> Self {
        Self {
            mesh,
            geom,
            tables: HashMap::new(),
        }
    }

    fn get(&mut self, space: FeSpace, deriv: Deriv) -> &[QuadTable] {
        let (mesh, geom) = (self.mesh, self.geom);
        self.tables
            .entry((space, deriv))
            .or_insert_with(|| geom.tabulate(mesh, space, deriv))
    }
}

/// Core kernel: local blocks `|K| Σ_p w_p c v_i u_j` summed over `entries`
/// and scattered through the dof maps. Entries must be elementary.
fn assemble_block(
    topo: &MeshTopology,
    cache: &mut TableCache<'_>,
    entries: &[&FormEntry],
    test: &DofMap,
    trial: Option<&DofMap>,
) -> Result<Contribution> {
    let (mesh, geom) = (cache.mesh, cache.geom);
    let (nc, ng) = (geom.n_cells(), geom.n_points());
    let nlv = geom.n_local(test.space);
    let nlu = trial.map_or(1, |dm| geom.n_local(dm.space));
    let block = nlv * nlu;
    let mut local = vec![0.0; nc * block];
    let mut wc = vec![0.0; ng];

    for entry in entries {
        let [t] = entry.test.terms() else {
            return Err(Error::InvalidForm(format!("`{}` is not elementary", entry.test)));
        };
        let cc = entry.coef.to_matrix(mesh, topo, geom)?;
        let vt = cache.get(test.space, deriv_of(t)?).to_vec();
        let ut = match (trial, &entry.trial) {
            (Some(dm), Some(sum)) => {
                let [u] = sum.terms() else {
                    return Err(Error::InvalidForm(format!("`{sum}` is not elementary")));
                };
                Some(cache.get(dm.space, deriv_of(u)?).to_vec())
            }
            (None, None) => None,
            _ => return Err(Error::InvalidForm("form mixes linear and bilinear entries".into())),
        };
        for c in 0..nc {
            let m = geom.measure[c];
            for ((w, &ccp), &gw) in wc.iter_mut().zip(cc.row(c)).zip(&geom.weights) {
                *w = m * gw * ccp;
            }
            let out = &mut local[c * block..(c + 1) * block];
            for (i, vi) in vt.iter().enumerate() {
                let vi = vi.row(c);
                match &ut {
                    Some(ut) => {
                        for (j, uj) in ut.iter().enumerate() {
                            let uj = uj.row(c);
                            let mut s = 0.0;
                            for p in 0..ng {
                                s += wc[p] * vi[p] * uj[p];
                            }
                            out[i * nlu + j] += s;
                        }
                    }
                    None => {
                        out[i] += wc.iter().zip(vi).map(|(w, v)| w * v).sum::<f64>();
                    }
                }
            }
        }
    }

    match trial {
        Some(trial) => {
            let mut triples = SparseTriples::with_capacity(test.n_dof, trial.n_dof, nc * block);
            for c in 0..nc {
                let vd = geom.cell_dofs(test, c);
                let ud = geom.cell_dofs(trial, c);
                for (i, &gi) in vd.iter().enumerate() {
                    for (j, &gj) in ud.iter().enumerate() {
                        triples.push(gi, gj, local[c * block + i * nlu + j]);
                    }
                }
            }
            Ok(Contribution::Matrix(triples))
        }
        None => {
            let mut rhs = vec![0.0; test.n_dof];
            for c in 0..nc {
                for (i, &gi) in geom.cell_dofs(test, c).iter().enumerate() {
                    rhs[gi] += local[c * block + i];
                }
            }
            Ok(Contribution::Vector(rhs))
        }
    }
}

fn assemble_scalar(
    mesh: &Mesh2d,
    topo: &MeshTopology,
    domain: Domain<'_>,
    form: &VarForm,
    test_space: FeSpace,
    trial_space: FeSpace,
    quad_order: usize,
) -> Result<Contribution> {
    let form = expand_extended(form)?;
    let symbols = |f: &dyn Fn(&FormEntry) -> Option<&str>| {
        let mut s: Vec<&str> = form.entries.iter().filter_map(f).collect();
        s.dedup();
        s.len()
    };
    if symbols(&|e| Some(e.test.0[0].symbol.as_str())) > 1
        || symbols(&|e| e.trial.as_ref().map(|u| u.0[0].symbol.as_str())) > 1
    {
        return Err(Error::InvalidForm(
            "scalar assembly takes one test and one trial symbol; use a system assembler".into(),
        ));
    }
    let geom = QuadGeometry::new(mesh, topo, domain, quad_order)?;
    let mut cache = TableCache::new(mesh, &geom);
    let test = DofMap::new(mesh, topo, test_space);
    let entries: Vec<&FormEntry> = form.entries.iter().collect();
    if form.is_linear() {
        assemble_block(topo, &mut cache, &entries, &test, None)
    } else {
        let trial = DofMap::new(mesh, topo, trial_space);
        assemble_block(topo, &mut cache, &entries, &test, Some(&trial))
    }
}

/// Scalar assembly over all triangles.
pub fn assemble_scalar_2d(
    mesh: &Mesh2d,
    topo: &MeshTopology,
    form: &VarForm,
    test_space: FeSpace,
    trial_space: FeSpace,
    quad_order: usize,
) -> Result<Contribution> {
    assemble_scalar(mesh, topo, Domain::Interior, form, test_space, trial_space, quad_order)
}

/// Scalar assembly over boundary edges, using the trace of the 2D basis.
/// An empty edge set gives an all-zero result.
pub fn assemble_scalar_1d(
    mesh: &Mesh2d,
    topo: &MeshTopology,
    edges: &[BoundaryEdge],
    form: &VarForm,
    test_space: FeSpace,
    trial_space: FeSpace,
    quad_order: usize,
) -> Result<Contribution> {
    assemble_scalar(mesh, topo, Domain::Boundary(edges), form, test_space, trial_space, quad_order)
}

/// Assembled matrix and right-hand side of a (possibly multi-component)
/// system. Component `i` occupies dofs `offsets()[i]..offsets()[i+1]`.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub nndofu: Vec<usize>,
    pub spaces: Vec<FeSpace>,
}

impl AssembledSystem {
    pub fn n_dof(&self) -> usize {
        self.nndofu.iter().sum()
    }

    pub fn offsets(&self) -> Vec<usize> {
        offsets(&self.nndofu)
    }

    /// Splits a global vector into per-component pieces.
    pub fn split(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        split_components(&self.nndofu, x)
    }
}

fn offsets(nndofu: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(nndofu.len() + 1);
    out.push(0);
    for n in nndofu {
        out.push(out.last().unwrap() + n);
    }
    out
}

pub fn split_components(nndofu: &[usize], x: &[f64]) -> Result<Vec<Vec<f64>>> {
    let off = offsets(nndofu);
    if x.len() != *off.last().unwrap() {
        return Err(Error::Length {
            expected: *off.last().unwrap(),
            got: x.len(),
        });
    }
    Ok(off.windows(2).map(|w| x[w[0]..w[1]].to_vec()).collect())
}

/// Accumulates contributions of several forms into one system, keeping
/// the matrix uncompressed until [`Assembler::finish`].
///
/// Forms use standard symbols: `v1..vm` for test and `u1..um` for trial
/// components (`v` and `u` alone mean component 1).
pub struct Assembler<'a> {
    mesh: &'a Mesh2d,
    topo: &'a MeshTopology,
    dofmaps: Vec<DofMap>,
    offsets: Vec<usize>,
    quad_order: usize,
    triples: SparseTriples,
    rhs: Vec<f64>,
}

impl<'a> Assembler<'a> {
    pub fn new(mesh: &'a Mesh2d, topo: &'a MeshTopology, spaces: &[FeSpace], quad_order: usize) -> Result<Self> {
        if spaces.is_empty() {
            return Err(Error::InvalidArgument("at least one space is required".into()));
        }
        let dofmaps: Vec<DofMap> = spaces.iter().map(|&s| DofMap::new(mesh, topo, s)).collect();
        let nndofu: Vec<usize> = dofmaps.iter().map(|d| d.n_dof).collect();
        let offsets = offsets(&nndofu);
        let n = *offsets.last().unwrap();
        Ok(Self {
            mesh,
            topo,
            dofmaps,
            offsets,
            quad_order,
            triples: SparseTriples::new(n, n),
            rhs: vec![0.0; n],
        })
    }

    pub fn n_dof(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn dofmaps(&self) -> &[DofMap] {
        &self.dofmaps
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn nndofu(&self) -> Vec<usize> {
        self.dofmaps.iter().map(|d| d.n_dof).collect()
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order
    }

    fn component(&self, t: &Term, prefix: char) -> Result<usize> {
        let c = t.component(prefix).ok_or_else(|| Error::UnknownSymbol(t.symbol.clone()))?;
        if c >= self.dofmaps.len() {
            return Err(Error::InvalidForm(format!(
                "`{t}` refers to component {} but only {} spaces were given",
                c + 1,
                self.dofmaps.len()
            )));
        }
        Ok(c)
    }

    /// Adds a bilinear or linear form integrated over `domain`.
    pub fn add(&mut self, form: &VarForm, domain: Domain<'_>) -> Result<()> {
        let form = expand_extended(form)?;
        if form.is_empty() {
            return Ok(());
        }
        // group entries by block, in order of first appearance
        let mut blocks: Vec<((usize, Option<usize>), Vec<&FormEntry>)> = Vec::new();
        for e in &form.entries {
            let i = self.component(&e.test.0[0], 'v')?;
            let j = match &e.trial {
                Some(u) => Some(self.component(&u.0[0], 'u')?),
                None => None,
            };
            match blocks.iter_mut().find(|(k, _)| *k == (i, j)) {
                Some((_, list)) => list.push(e),
                None => blocks.push(((i, j), vec![e])),
            }
        }
        let geom = QuadGeometry::new(self.mesh, self.topo, domain, self.quad_order)?;
        let mut cache = TableCache::new(self.mesh, &geom);
        for ((i, j), entries) in blocks {
            let trial = j.map(|j| &self.dofmaps[j]);
            match assemble_block(self.topo, &mut cache, &entries, &self.dofmaps[i], trial)? {
                Contribution::Matrix(t) => {
                    self.triples.append_offset(&t, self.offsets[i], self.offsets[j.unwrap()]);
                }
                Contribution::Vector(v) => {
                    for (r, x) in self.rhs[self.offsets[i]..].iter_mut().zip(v) {
                        *r += x;
                    }
                }
            }
        }
        Ok(())
    }

    /// Adds a raw block at component `(i, j)`.
    pub fn add_block(&mut self, i: usize, j: usize, block: &SparseTriples) -> Result<()> {
        let (ni, nj) = (self.dofmaps[i].n_dof, self.dofmaps[j].n_dof);
        if (block.nrows, block.ncols) != (ni, nj) {
            return Err(Error::Shape {
                expected: format!("{ni}x{nj}"),
                got: format!("{}x{}", block.nrows, block.ncols),
            });
        }
        self.triples.append_offset(block, self.offsets[i], self.offsets[j]);
        Ok(())
    }

    pub fn finish(self) -> Result<AssembledSystem> {
        Ok(AssembledSystem {
            matrix: self.triples.compress()?,
            rhs: self.rhs,
            nndofu: self.dofmaps.iter().map(|d| d.n_dof).collect(),
            spaces: self.dofmaps.iter().map(|d| d.space).collect(),
        })
    }
}

/// One-shot system assembly of a single form.
pub fn assemble_system(
    mesh: &Mesh2d,
    topo: &MeshTopology,
    form: &VarForm,
    spaces: &[FeSpace],
    quad_order: usize,
    domain: Domain<'_>,
) -> Result<AssembledSystem> {
    let mut asm = Assembler::new(mesh, topo, spaces, quad_order)?;
    asm.add(form, domain)?;
    asm.finish()
}

/// Compressed matrix of a scalar bilinear form.
pub fn assemble_matrix(
    mesh: &Mesh2d,
    topo: &MeshTopology,
    form: &VarForm,
    test_space: FeSpace,
    trial_space: FeSpace,
    quad_order: usize,
    domain: Domain<'_>,
) -> Result<CsrMatrix> {
    assemble_scalar(mesh, topo, domain, form, test_space, trial_space, quad_order)?
        .into_matrix()?
        .compress()
}

/// Load vector of a scalar linear form.
pub fn assemble_vector(
    mesh: &Mesh2d,
    topo: &MeshTopology,
    form: &VarForm,
    space: FeSpace,
    quad_order: usize,
    domain: Domain<'_>,
) -> Result<Vec<f64>> {
    assemble_scalar(mesh, topo, domain, form, space, space, quad_order)?.into_vector()
}
