//! FreeFEM mesh and solution files, CSV result tables.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::mesh::{BoundaryPartition, Mesh2d, MeshTopology};
use crate::{Error, Result};

/// Contents of a FreeFEM `.msh` file, converted to 0-based indices.
#[derive(Debug, Clone, PartialEq)]
pub struct MshData {
    pub mesh: Mesh2d,
    pub node_label: Vec<i32>,
    pub elem_label: Vec<i32>,
    /// Boundary edges as given in the file, with their labels.
    pub edges: Vec<([usize; 2], i32)>,
}

impl MshData {
    /// Boundary partition with one region per label in `order`, plus a
    /// trailing region for the rest.
    pub fn partition(&self, topo: &MeshTopology, order: &[i32]) -> Result<BoundaryPartition> {
        BoundaryPartition::from_labels(topo, &self.edges, order)
    }

    /// Distinct edge labels in order of first appearance.
    pub fn edge_labels(&self) -> Vec<i32> {
        let mut out = Vec::new();
        for &(_, l) in &self.edges {
            if !out.contains(&l) {
                out.push(l);
            }
        }
        out
    }
}

struct Tokens<'a> {
    path: PathBuf,
    items: Vec<(&'a str, usize)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str, path: &Path) -> Self {
        let items = text
            .lines()
            .enumerate()
            .flat_map(|(i, l)| l.split_whitespace().map(move |t| (t, i + 1)))
            .collect();
        Self {
            path: path.to_path_buf(),
            items,
            pos: 0,
            last_line: 1,
        }
    }

    fn err(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line,
            msg: msg.into(),
        }
    }

    fn next(&mut self, what: &str) -> Result<(&'a str, usize)> {
        match self.items.get(self.pos) {
            Some(&(t, line)) => {
                self.pos += 1;
                self.last_line = line;
                Ok((t, line))
            }
            None => Err(self.err(self.last_line, format!("unexpected end of file while reading {what}"))),
        }
    }

    fn parse<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let (t, line) = self.next(what)?;
        t.parse().map_err(|_| self.err(line, format!("invalid {what} `{t}`")))
    }

    fn index(&mut self, what: &str, n: usize) -> Result<usize> {
        let (t, line) = self.next(what)?;
        match t.parse::<usize>() {
            Ok(i) if (1..=n).contains(&i) => Ok(i - 1),
            Ok(i) => Err(self.err(line, format!("{what} {i} out of range 1..={n}"))),
            Err(_) => Err(self.err(line, format!("invalid {what} `{t}`"))),
        }
    }

    fn finish(&self) -> Result<()> {
        match self.items.get(self.pos) {
            Some(&(t, line)) => Err(self.err(line, format!("unexpected trailing data `{t}`"))),
            None => Ok(()),
        }
    }
}

/// Parses `.msh` text: a header `nv nt ne`, then `nv` lines `x y label`,
/// `nt` lines `i j k label` and `ne` lines `i j label` with 1-based
/// indices. Clockwise triangles are reoriented.
pub fn parse_freefem_msh(text: &str, path: &Path) -> Result<MshData> {
    let mut tk = Tokens::new(text, path);
    let nv: usize = tk.parse("header vertex count")?;
    let nt: usize = tk.parse("header triangle count")?;
    let ne: usize = tk.parse("header edge count")?;
    let mut node = Vec::with_capacity(nv);
    let mut node_label = Vec::with_capacity(nv);
    for _ in 0..nv {
        let x: f64 = tk.parse("vertex x coordinate")?;
        let y: f64 = tk.parse("vertex y coordinate")?;
        node.push([x, y]);
        node_label.push(tk.parse("vertex label")?);
    }
    let mut elem = Vec::with_capacity(nt);
    let mut elem_label = Vec::with_capacity(nt);
    for _ in 0..nt {
        let a = tk.index("triangle vertex", nv)?;
        let b = tk.index("triangle vertex", nv)?;
        let c = tk.index("triangle vertex", nv)?;
        elem.push([a, b, c]);
        elem_label.push(tk.parse("triangle label")?);
    }
    let mut edges = Vec::with_capacity(ne);
    for _ in 0..ne {
        let a = tk.index("edge vertex", nv)?;
        let b = tk.index("edge vertex", nv)?;
        edges.push(([a, b], tk.parse("edge label")?));
    }
    tk.finish()?;
    let mut mesh = Mesh2d { node, elem };
    mesh.orient_counterclockwise();
    mesh.validate()?;
    Ok(MshData {
        mesh,
        node_label,
        elem_label,
        edges,
    })
}

pub fn read_freefem_msh(path: impl AsRef<Path>) -> Result<MshData> {
    let path = path.as_ref();
    parse_freefem_msh(&fs::read_to_string(path)?, path)
}

/// Formats a mesh in `.msh` layout. Coordinates use the shortest text
/// that reads back to the same `f64`.
pub fn format_freefem_msh(data: &MshData) -> String {
    let m = &data.mesh;
    let mut s = String::new();
    let _ = writeln!(s, "{} {} {}", m.n_nodes(), m.n_elems(), data.edges.len());
    for (p, l) in m.node.iter().zip(&data.node_label) {
        let _ = writeln!(s, "{} {} {}", p[0], p[1], l);
    }
    for (t, l) in m.elem.iter().zip(&data.elem_label) {
        let _ = writeln!(s, "{} {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1, l);
    }
    for ([a, b], l) in &data.edges {
        let _ = writeln!(s, "{} {} {}", a + 1, b + 1, l);
    }
    s
}

pub fn write_freefem_msh(path: impl AsRef<Path>, data: &MshData) -> Result<()> {
    fs::write(path, format_freefem_msh(data))?;
    Ok(())
}

/// Wraps a generated mesh for writing: boundary edges get label 1, all
/// other labels are 0.
pub fn msh_from_mesh(mesh: &Mesh2d, topo: &MeshTopology) -> MshData {
    let mut node_label = vec![0; mesh.n_nodes()];
    for b in &topo.bd_edge {
        for &v in &b.nodes {
            node_label[v] = 1;
        }
    }
    MshData {
        mesh: mesh.clone(),
        node_label,
        elem_label: vec![0; mesh.n_elems()],
        edges: topo.bd_edge.iter().map(|b| (b.nodes, 1)).collect(),
    }
}

/// Parses a FreeFEM array dump: the length, then that many reals.
pub fn parse_freefem_solution(text: &str, path: &Path) -> Result<Vec<f64>> {
    let mut tk = Tokens::new(text, path);
    let n: usize = tk.parse("array length")?;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        match tk.parse::<f64>("value") {
            Ok(v) => out.push(v),
            Err(_) if tk.pos >= tk.items.len() => {
                return Err(Error::Length { expected: n, got: i });
            }
            Err(e) => return Err(e),
        }
    }
    if tk.items.len() > tk.pos {
        return Err(Error::Length {
            expected: n,
            got: tk.items.len() - 1,
        });
    }
    Ok(out)
}

pub fn read_freefem_solution(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    parse_freefem_solution(&fs::read_to_string(path)?, path)
}

/// Array dump with five values per line.
pub fn format_freefem_solution(values: &[f64]) -> String {
    let mut s = format!("{}\n", values.len());
    for chunk in values.chunks(5) {
        let line: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
        s.push_str(&line.join("\t"));
        s.push('\n');
    }
    s
}

pub fn write_freefem_solution(path: impl AsRef<Path>, values: &[f64]) -> Result<()> {
    fs::write(path, format_freefem_solution(values))?;
    Ok(())
}

/// Rectangular numeric table with named columns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ResultTable {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Self {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.headers.len() {
            return Err(Error::Length {
                expected: self.headers.len(),
                got: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    /// Cell text: integers for `#`-prefixed count columns, six significant
    /// digits otherwise.
    pub fn format_cell(&self, col: usize, v: f64) -> String {
        if self.headers[col].starts_with('#') && v.fract() == 0.0 && v.abs() < 1e15 {
            format!("{}", v as i64)
        } else {
            format_sci(v)
        }
    }
}

/// Scientific notation with six significant digits and a signed
/// two-digit exponent, e.g. `2.53816e-05`.
pub fn format_sci(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let s = format!("{v:.5e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

pub fn write_results(path: impl AsRef<Path>, table: &ResultTable) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&table.headers)?;
    for row in &table.rows {
        if row.len() != table.headers.len() {
            return Err(Error::Length {
                expected: table.headers.len(),
                got: row.len(),
            });
        }
        w.write_record(row.iter().enumerate().map(|(c, &v)| table.format_cell(c, v)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results(path: impl AsRef<Path>) -> Result<ResultTable> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path)?;
    let mut table = ResultTable::new(r.headers()?.iter().map(str::to_string));
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|cell| {
                cell.trim().parse::<f64>().map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 2,
                    msg: format!("invalid number `{cell}`"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        table.push_row(row)?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("test.msh")
    }

    #[test]
    fn single_triangle() {
        let d = parse_freefem_msh("3 1 3\n0 0 1\n1 0 1\n0 1 1\n1 2 3 0\n1 2 1\n2 3 2\n3 1 1\n", p()).unwrap();
        assert_eq!(d.mesh.n_nodes(), 3);
        assert_eq!(d.mesh.elem, vec![[0, 1, 2]]);
        assert_eq!(d.edges[1], ([1, 2], 2));
        assert_eq!(d.edge_labels(), vec![1, 2]);
    }

    #[test]
    fn clockwise_is_flipped() {
        let d = parse_freefem_msh("3 1 0\n0 0 0\n1 0 0\n0 1 0\n1 3 2 0\n", p()).unwrap();
        assert!(d.mesh.signed_area(0) > 0.0);
    }

    #[test]
    fn errors_carry_lines() {
        let e = parse_freefem_msh("3 1 0\n0 0 0\n1 0 0\n", p()).unwrap_err();
        match e {
            Error::Parse { line, msg, .. } => {
                assert_eq!(line, 3);
                assert!(msg.contains("vertex"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
        let e = parse_freefem_msh("3 1 0\n0 0 0\n1 0 0\n0 1 0\n1 2 4 0\n", p()).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 5, .. }));
        let e = parse_freefem_msh("x 1 0\n", p()).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = parse_freefem_msh("3 1 0\n0 0 0\n1 0 0\n0 1 0\n1 2 3 0\n7\n", p()).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 6, .. }));
    }

    #[test]
    fn solution_files() {
        assert_eq!(parse_freefem_solution("3\n1 2 3", p()).unwrap(), vec![1.0, 2.0, 3.0]);
        assert!(matches!(
            parse_freefem_solution("4\n1 2 3", p()),
            Err(Error::Length { expected: 4, got: 3 })
        ));
        assert!(matches!(
            parse_freefem_solution("2\n1 2 3", p()),
            Err(Error::Length { expected: 2, got: 3 })
        ));
        let v = vec![0.1, -2.5e-300, std::f64::consts::PI, 1.0 / 3.0, 7.0, 1e22, -0.0];
        let text = format_freefem_solution(&v);
        assert_eq!(text.lines().count(), 3);
        let back = parse_freefem_solution(&text, p()).unwrap();
        assert_eq!(
            back.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            v.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn sci_format() {
        assert_eq!(format_sci(2.53816e-05), "2.53816e-05");
        assert_eq!(format_sci(1.59802), "1.59802e+00");
        assert_eq!(format_sci(-1234.5678), "-1.23457e+03");
        assert_eq!(format_sci(0.0), "0.00000e+00");
        assert_eq!(format_sci(1e-123), "1.00000e-123");
    }
}
