//! Structured simplicial meshes of the unit square and cube.
//!
//! Meshes are built once and then shared immutably by every downstream stage.
//! Faces are extracted with a deterministic orientation convention: the first
//! incident element (the one with the smaller id) is the "plus" side and the
//! stored unit normal points from plus to minus, or outward on the boundary.
//! All jump and average terms in the assembly rely on this convention.

use std::collections::HashMap;

use nalgebra::Vector3;

use crate::{Error, Result};

/// Points are padded to three components; `z = 0` in 2D.
pub type Point = Vector3<f64>;

/// A simplex: `dim + 1` vertex ids plus cached geometry.
#[derive(Debug, Clone)]
pub struct Element {
    pub vertices: Vec<usize>,
    pub barycenter: Point,
    /// Diameter, the maximum pairwise vertex distance.
    pub h: f64,
    pub volume: f64,
    /// Face ids, one per facet of the simplex.
    pub faces: Vec<usize>,
}

/// A codimension-one facet: `dim` vertex ids plus cached geometry.
#[derive(Debug, Clone)]
pub struct Face {
    pub vertices: Vec<usize>,
    /// Unit normal pointing from the plus element to the minus element
    /// (outward on the boundary).
    pub normal: Vector3<f64>,
    /// Diameter of the face.
    pub h: f64,
    /// Length in 2D, area in 3D.
    pub area: f64,
    pub plus: usize,
    pub minus: Option<usize>,
}

impl Face {
    pub fn is_boundary(&self) -> bool {
        self.minus.is_none()
    }
}

/// Conforming simplicial partition of the unit square/cube.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub dim: usize,
    pub vertices: Vec<Point>,
    pub elements: Vec<Element>,
    pub faces: Vec<Face>,
}

impl Mesh {
    /// Builds the structured mesh of `(0,1)^dim` with `n` cells per side.
    ///
    /// In 2D every grid square is split into two triangles along the same
    /// diagonal; in 3D every grid cube is split into six tetrahedra sharing
    /// the main diagonal, so faces of neighboring cubes match.
    pub fn structured(dim: usize, n: usize) -> Result<Self> {
        if !(dim == 2 || dim == 3) {
            return Err(Error::InvalidParameter(format!("dim must be 2 or 3, got {dim}")));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        let mut vertices = Vec::new();
        let mut cells = Vec::new();
        let hstep = 1.0 / n as f64;
        if dim == 2 {
            let np = n + 1;
            for j in 0..np {
                for i in 0..np {
                    vertices.push(Vector3::new(i as f64 * hstep, j as f64 * hstep, 0.0));
                }
            }
            let vid = |i: usize, j: usize| j * np + i;
            for j in 0..n {
                for i in 0..n {
                    let (v00, v10) = (vid(i, j), vid(i + 1, j));
                    let (v01, v11) = (vid(i, j + 1), vid(i + 1, j + 1));
                    cells.push(vec![v00, v10, v11]);
                    cells.push(vec![v00, v11, v01]);
                }
            }
        } else {
            let np = n + 1;
            for k in 0..np {
                for j in 0..np {
                    for i in 0..np {
                        vertices.push(Vector3::new(
                            i as f64 * hstep,
                            j as f64 * hstep,
                            k as f64 * hstep,
                        ));
                    }
                }
            }
            let vid = |i: usize, j: usize, k: usize| (k * np + j) * np + i;
            // Kuhn split: one tetrahedron per vertex permutation, each a path
            // of edge steps from the low corner to the high corner.
            const PERMS: [[usize; 3]; 6] = [
                [0, 1, 2],
                [0, 2, 1],
                [1, 0, 2],
                [1, 2, 0],
                [2, 0, 1],
                [2, 1, 0],
            ];
            for k in 0..n {
                for j in 0..n {
                    for i in 0..n {
                        for perm in PERMS {
                            let mut c = [i, j, k];
                            let mut tet = vec![vid(c[0], c[1], c[2])];
                            for axis in perm {
                                c[axis] += 1;
                                tet.push(vid(c[0], c[1], c[2]));
                            }
                            cells.push(tet);
                        }
                    }
                }
            }
        }
        Self::from_cells(dim, vertices, cells)
    }

    /// Builds a mesh from raw vertices and element connectivity, extracting
    /// faces and validating the partition.
    pub fn from_cells(dim: usize, vertices: Vec<Point>, cells: Vec<Vec<usize>>) -> Result<Self> {
        if !(dim == 2 || dim == 3) {
            return Err(Error::MeshImport(format!("dim must be 2 or 3, got {dim}")));
        }
        for v in &vertices {
            if !v.iter().all(|c| c.is_finite()) {
                return Err(Error::MeshImport("non-finite vertex coordinate".into()));
            }
        }
        let mut elements = Vec::with_capacity(cells.len());
        for (eid, cell) in cells.iter().enumerate() {
            if cell.len() != dim + 1 {
                return Err(Error::MeshImport(format!(
                    "element {eid} has {} vertices, expected {}",
                    cell.len(),
                    dim + 1
                )));
            }
            for &v in cell {
                if v >= vertices.len() {
                    return Err(Error::MeshImport(format!(
                        "element {eid} references vertex {v} out of range"
                    )));
                }
            }
            let pts: Vec<Point> = cell.iter().map(|&v| vertices[v]).collect();
            let volume = simplex_volume(dim, &pts);
            if !(volume.is_finite() && volume > 0.0) {
                return Err(Error::MeshImport(format!("element {eid} is degenerate")));
            }
            let barycenter = pts.iter().sum::<Point>() / (dim as f64 + 1.0);
            elements.push(Element {
                vertices: cell.clone(),
                barycenter,
                h: diameter(&pts),
                volume,
                faces: Vec::new(),
            });
        }
        if elements.is_empty() {
            return Err(Error::MeshImport("mesh has no elements".into()));
        }

        // Face extraction keyed on sorted vertex ids; elements are visited in
        // id order so the plus side is always the smaller element id.
        let mut key_to_face: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut faces: Vec<Face> = Vec::new();
        for eid in 0..elements.len() {
            for skip in 0..=dim {
                let facet: Vec<usize> = elements[eid]
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|&(l, _)| l != skip)
                    .map(|(_, &v)| v)
                    .collect();
                let mut key = facet.clone();
                key.sort_unstable();
                match key_to_face.get(&key) {
                    Some(&fid) => {
                        if faces[fid].minus.is_some() {
                            return Err(Error::MeshImport(format!(
                                "face shared by more than two elements (face {fid})"
                            )));
                        }
                        faces[fid].minus = Some(eid);
                        elements[eid].faces.push(fid);
                    }
                    None => {
                        let fid = faces.len();
                        let pts: Vec<Point> = facet.iter().map(|&v| vertices[v]).collect();
                        let (normal, area) = face_normal_area(dim, &pts)?;
                        faces.push(Face {
                            vertices: facet,
                            normal,
                            h: diameter(&pts),
                            area,
                            plus: eid,
                            minus: None,
                        });
                        key_to_face.insert(key, fid);
                        elements[eid].faces.push(fid);
                    }
                }
            }
        }
        // Orient normals outward from the plus element.
        for face in faces.iter_mut() {
            let centroid = face.vertices.iter().map(|&v| vertices[v]).sum::<Point>()
                / face.vertices.len() as f64;
            if (centroid - elements[face.plus].barycenter).dot(&face.normal) < 0.0 {
                face.normal = -face.normal;
            }
        }
        Ok(Mesh {
            dim,
            vertices,
            elements,
            faces,
        })
    }

    /// Parses the plain ASCII mesh format: a header line `dim nv ne`, then
    /// `nv` coordinate lines and `ne` element lines of 0-based vertex ids.
    pub fn parse_ascii(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::MeshImport("empty input".into()))?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 3 {
            return Err(Error::MeshImport("header must be `dim nv ne`".into()));
        }
        let dim: usize = head[0]
            .parse()
            .map_err(|_| Error::MeshImport("bad dim in header".into()))?;
        if !(dim == 2 || dim == 3) {
            return Err(Error::MeshImport(format!("dim must be 2 or 3, got {dim}")));
        }
        let nv: usize = head[1]
            .parse()
            .map_err(|_| Error::MeshImport("bad vertex count in header".into()))?;
        let ne: usize = head[2]
            .parse()
            .map_err(|_| Error::MeshImport("bad element count in header".into()))?;
        let mut vertices = Vec::new();
        for _ in 0..nv {
            let line = lines
                .next()
                .ok_or_else(|| Error::MeshImport("unexpected end of input in vertices".into()))?;
            let coords: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::MeshImport(format!("bad coordinate line `{line}`")))?;
            if coords.len() != dim {
                return Err(Error::MeshImport(format!(
                    "expected {dim} coordinates, got {} in `{line}`",
                    coords.len()
                )));
            }
            let mut p = Vector3::zeros();
            p[0] = coords[0];
            p[1] = coords[1];
            if dim == 3 {
                p[2] = coords[2];
            }
            vertices.push(p);
        }
        let mut cells = Vec::new();
        for _ in 0..ne {
            let line = lines
                .next()
                .ok_or_else(|| Error::MeshImport("unexpected end of input in elements".into()))?;
            let ids: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::MeshImport(format!("bad element line `{line}`")))?;
            cells.push(ids);
        }
        // Imported elements may come with either vertex ordering; flip to a
        // positive-volume ordering before validation.
        let mut cells_fixed = Vec::with_capacity(cells.len());
        for mut cell in cells {
            if cell.len() == dim + 1 && cell.iter().all(|&v| v < vertices.len()) {
                let pts: Vec<Point> = cell.iter().map(|&v| vertices[v]).collect();
                if signed_volume(dim, &pts) < 0.0 {
                    cell.swap(0, 1);
                }
            }
            cells_fixed.push(cell);
        }
        Self::from_cells(dim, vertices, cells_fixed)
    }

    /// Mesh size `h`, the maximum element diameter.
    pub fn h(&self) -> f64 {
        self.elements.iter().map(|e| e.h).fold(0.0, f64::max)
    }

    /// Shape-regularity ratio `max h_K / min rho_K` with `rho_K` the inradius.
    pub fn quasi_uniformity(&self) -> f64 {
        let min_rho = self
            .elements
            .iter()
            .map(|e| self.inradius(e))
            .fold(f64::INFINITY, f64::min);
        self.h() / min_rho
    }

    fn inradius(&self, e: &Element) -> f64 {
        if self.dim == 2 {
            let perim: f64 = e
                .faces
                .iter()
                .map(|&f| self.faces[f].area)
                .sum();
            2.0 * e.volume / perim
        } else {
            let surf: f64 = e.faces.iter().map(|&f| self.faces[f].area).sum();
            3.0 * e.volume / surf
        }
    }

    /// Deterministic side assignment of a face: the plus element, the minus
    /// element (`None` on the boundary), and the unit normal pointing from
    /// plus to minus (outward on the boundary).
    pub fn face_orientation(&self, face_id: usize) -> (usize, Option<usize>, Vector3<f64>) {
        let f = &self.faces[face_id];
        (f.plus, f.minus, f.normal)
    }

    /// Elements sharing a face with `elem`.
    pub fn face_neighbors(&self, elem: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for &fid in &self.elements[elem].faces {
            let f = &self.faces[fid];
            if f.plus != elem {
                out.push(f.plus);
            } else if let Some(m) = f.minus {
                out.push(m);
            }
        }
        out
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }
}

fn diameter(pts: &[Point]) -> f64 {
    let mut d = 0.0f64;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            d = d.max((pts[i] - pts[j]).norm());
        }
    }
    d
}

fn signed_volume(dim: usize, pts: &[Point]) -> f64 {
    if dim == 2 {
        let a = pts[1] - pts[0];
        let b = pts[2] - pts[0];
        0.5 * (a.x * b.y - a.y * b.x)
    } else {
        let a = pts[1] - pts[0];
        let b = pts[2] - pts[0];
        let c = pts[3] - pts[0];
        a.cross(&b).dot(&c) / 6.0
    }
}

fn simplex_volume(dim: usize, pts: &[Point]) -> f64 {
    signed_volume(dim, pts).abs()
}

fn face_normal_area(dim: usize, pts: &[Point]) -> Result<(Vector3<f64>, f64)> {
    if dim == 2 {
        let t = pts[1] - pts[0];
        let len = t.norm();
        if !(len.is_finite() && len > 0.0) {
            return Err(Error::MeshImport("degenerate face".into()));
        }
        Ok((Vector3::new(t.y, -t.x, 0.0) / len, len))
    } else {
        let c = (pts[1] - pts[0]).cross(&(pts[2] - pts[0]));
        let n2 = c.norm();
        if !(n2.is_finite() && n2 > 0.0) {
            return Err(Error::MeshImport("degenerate face".into()));
        }
        Ok((c / n2, 0.5 * n2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_single_cell() {
        let mesh = Mesh::structured(2, 1).unwrap();
        assert_eq!(mesh.elements.len(), 2);
        assert_eq!(mesh.faces.len(), 5);
        let boundary = mesh.faces.iter().filter(|f| f.is_boundary()).count();
        assert_eq!(boundary, 4);

        // the single interior face is the diagonal; its normal is unit and
        // orthogonal to the diagonal direction
        let diag = mesh.faces.iter().find(|f| !f.is_boundary()).unwrap();
        let t = mesh.vertices[diag.vertices[1]] - mesh.vertices[diag.vertices[0]];
        assert!((diag.normal.norm() - 1.0).abs() < 1e-14);
        assert!(diag.normal.dot(&t).abs() < 1e-14);
    }

    #[test]
    fn unit_cube_single_cell() {
        let mesh = Mesh::structured(3, 1).unwrap();
        assert_eq!(mesh.elements.len(), 6);
        let boundary = mesh.faces.iter().filter(|f| f.is_boundary()).count();
        assert_eq!(boundary, 12);
    }

    #[test]
    fn mesh_size_matches_grid_diagonal() {
        let mesh = Mesh::structured(2, 10).unwrap();
        assert!((mesh.h() - 2.0f64.sqrt() / 10.0).abs() < 1e-14);
    }

    #[test]
    fn volume_and_boundary_measures() {
        for (dim, n) in [(2usize, 4usize), (3, 2)] {
            let mesh = Mesh::structured(dim, n).unwrap();
            let vol: f64 = mesh.elements.iter().map(|e| e.volume).sum();
            assert!((vol - 1.0).abs() < 1e-12, "dim {dim}: volume sum {vol}");
            let bsurf: f64 = mesh
                .faces
                .iter()
                .filter(|f| f.is_boundary())
                .map(|f| f.area)
                .sum();
            assert!(
                (bsurf - 2.0 * dim as f64).abs() < 1e-12,
                "dim {dim}: boundary measure {bsurf}"
            );
        }
    }

    #[test]
    fn interior_face_vertices_belong_to_both_elements() {
        for (dim, n) in [(2usize, 3usize), (3, 2)] {
            let mesh = Mesh::structured(dim, n).unwrap();
            for f in mesh.faces.iter().filter(|f| !f.is_boundary()) {
                let km = f.minus.unwrap();
                for &v in &f.vertices {
                    assert!(mesh.elements[f.plus].vertices.contains(&v));
                    assert!(mesh.elements[km].vertices.contains(&v));
                }
            }
        }
    }

    #[test]
    fn refinement_halves_h() {
        for dim in [2usize, 3] {
            let coarse = Mesh::structured(dim, 2).unwrap();
            let fine = Mesh::structured(dim, 4).unwrap();
            assert!((fine.h() - 0.5 * coarse.h()).abs() <= 1e-14 * coarse.h());
        }
    }

    #[test]
    fn normals_unit_and_outward_on_boundary() {
        let mesh = Mesh::structured(3, 2).unwrap();
        for f in &mesh.faces {
            assert!((f.normal.norm() - 1.0).abs() < 1e-14);
            let hmax = mesh.elements[f.plus].h.max(
                f.minus.map(|m| mesh.elements[m].h).unwrap_or(0.0),
            );
            assert!(f.h <= hmax + 1e-14);
        }
        // a boundary face lying on x = 0 must have normal (-1, 0, 0)
        let f = mesh
            .faces
            .iter()
            .find(|f| f.is_boundary() && f.vertices.iter().all(|&v| mesh.vertices[v].x == 0.0))
            .unwrap();
        assert!((f.normal - Vector3::new(-1.0, 0.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn plus_side_has_smaller_id() {
        let mesh = Mesh::structured(2, 4).unwrap();
        for f in mesh.faces.iter().filter(|f| !f.is_boundary()) {
            assert!(f.plus < f.minus.unwrap());
        }
    }

    #[test]
    fn barycenter_is_vertex_average() {
        let mesh = Mesh::structured(2, 2).unwrap();
        for e in &mesh.elements {
            let avg: Point =
                e.vertices.iter().map(|&v| mesh.vertices[v]).sum::<Point>() / 3.0;
            assert!((avg - e.barycenter).norm() < 1e-15);
        }
    }

    #[test]
    fn quasi_uniformity_is_modest_for_structured_meshes() {
        for (dim, n) in [(2usize, 5usize), (3, 2)] {
            let mesh = Mesh::structured(dim, n).unwrap();
            let nu = mesh.quasi_uniformity();
            assert!(nu.is_finite() && nu > 1.0 && nu < 20.0, "nu = {nu}");
        }
    }

    #[test]
    fn ascii_import_matches_structured() {
        let text = "2 4 2\n0 0\n1 0\n1 1\n0 1\n0 1 2\n0 2 3\n";
        let mesh = Mesh::parse_ascii(text).unwrap();
        assert_eq!(mesh.elements.len(), 2);
        assert_eq!(mesh.faces.len(), 5);
        let vol: f64 = mesh.elements.iter().map(|e| e.volume).sum();
        assert!((vol - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ascii_import_fixes_inverted_elements() {
        let text = "2 4 2\n0 0\n1 0\n1 1\n0 1\n1 0 2\n0 2 3\n";
        let mesh = Mesh::parse_ascii(text).unwrap();
        assert!(mesh.elements.iter().all(|e| e.volume > 0.0));
    }

    #[test]
    fn ascii_import_rejects_malformed_input() {
        for bad in [
            "",
            "2 4",
            "4 1 1\n0 0\n0 0 0\n",
            "2 3 1\n0 0\n1 0\nnope 1\n0 1 2\n",
            "2 3 1\n0 0\n1 0\n0 1\n0 1 7\n",
            "2 3 1\n0 0\n1 0\n0 1\n0 1\n",
            "2 3 2\n0 0\n1 0\n0 1\n0 1 2\n",
            "2 3 1\n0 0\n1 0\n1 0\n0 1 2\n",
        ] {
            assert!(Mesh::parse_ascii(bad).is_err(), "accepted: {bad:?}");
        }
    }
}
