//! Spherical Voronoi diagrams on S^2.
//!
//! The convex hull of points on the sphere is their Delaunay triangulation;
//! each hull facet's outward normal is the Voronoi vertex dual to it. The
//! hull is built incrementally with exact orientation predicates.

use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use robust::{orient3d, Coord3D};
use serde::Serialize;

use crate::config::{Configuration, Weights};
use crate::error::{invalid, require_dim, Error, Result};
use crate::frames::{cross, dot3, fp_bound_report, BoundReport};

/// Facets whose neighbours' apex lies within this volume of their plane
/// are treated as four cocircular points.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

type Vec3 = [f64; 3];

fn c3(p: &Vec3) -> Coord3D<f64> {
    Coord3D { x: p[0], y: p[1], z: p[2] }
}

/// Exact sign convention: negative when `d` lies on the side of the plane
/// `(a, b, c)` that sees the triangle counterclockwise.
fn orient(a: &Vec3, b: &Vec3, c: &Vec3, d: &Vec3) -> f64 {
    orient3d(c3(a), c3(b), c3(c), c3(d))
}

fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn normalized(v: Vec3) -> Vec3 {
    let n = dot3(&v, &v).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn degenerate(points: Vec<usize>, message: impl Into<String>) -> Error {
    Error::Degenerate { points, message: message.into() }
}

/// Triangles of the convex hull, each counterclockwise seen from outside.
fn convex_hull(p: &[Vec3]) -> Result<Vec<[usize; 3]>> {
    let n = p.len();
    let i1 = 1;
    let i2 = (2..n)
        .find(|&k| {
            let c = cross(&sub(&p[i1], &p[0]), &sub(&p[k], &p[0]));
            dot3(&c, &c) > 0.0
        })
        .ok_or_else(|| degenerate(vec![0, 1], "all points are collinear or coincide"))?;
    let i3 = (2..n)
        .find(|&k| k != i2 && orient(&p[0], &p[i1], &p[i2], &p[k]) != 0.0)
        .ok_or_else(|| degenerate(vec![0, i1, i2], "all points lie on one great or small circle"))?;

    let mut faces: Vec<Option<[usize; 3]>> = Vec::new();
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    fn add(faces: &mut Vec<Option<[usize; 3]>>, edges: &mut HashMap<(usize, usize), usize>, f: [usize; 3]) {
        let id = faces.len();
        for k in 0..3 {
            edges.insert((f[k], f[(k + 1) % 3]), id);
        }
        faces.push(Some(f));
    }
    let (a, mut b, mut c, d) = (0, i1, i2, i3);
    if orient(&p[a], &p[b], &p[c], &p[d]) < 0.0 {
        std::mem::swap(&mut b, &mut c);
    }
    for f in [[a, b, c], [a, d, b], [b, d, c], [c, d, a]] {
        add(&mut faces, &mut edges, f);
    }

    for k in 0..n {
        if k == a || k == b || k == c || k == d {
            continue;
        }
        let visible: Vec<bool> = faces
            .iter()
            .map(|f| match f {
                Some([x, y, z]) => orient(&p[*x], &p[*y], &p[*z], &p[k]) < 0.0,
                None => false,
            })
            .collect();
        if !visible.iter().any(|&v| v) {
            let on = faces
                .iter()
                .flatten()
                .find(|[x, y, z]| orient(&p[*x], &p[*y], &p[*z], &p[k]) == 0.0)
                .map(|f| f.to_vec())
                .unwrap_or_default();
            let mut pts = on;
            pts.push(k);
            return Err(degenerate(pts, format!("point {k} is not in general position")));
        }
        let mut horizon = Vec::new();
        for (id, f) in faces.iter().enumerate() {
            let Some(f) = f else { continue };
            if !visible[id] {
                continue;
            }
            for e in 0..3 {
                let (u, v) = (f[e], f[(e + 1) % 3]);
                let twin = edges[&(v, u)];
                if !visible[twin] {
                    horizon.push((u, v));
                }
            }
        }
        for (id, v) in visible.iter().enumerate() {
            if *v {
                let f = faces[id].take().expect("visible face is live");
                for e in 0..3 {
                    let key = (f[e], f[(e + 1) % 3]);
                    if edges.get(&key) == Some(&id) {
                        edges.remove(&key);
                    }
                }
            }
        }
        for (u, v) in horizon {
            add(&mut faces, &mut edges, [u, v, k]);
        }
    }

    let faces: Vec<[usize; 3]> = faces.into_iter().flatten().collect();
    let owner: HashMap<(usize, usize), usize> =
        faces.iter().enumerate().flat_map(|(id, f)| (0..3).map(move |e| ((f[e], f[(e + 1) % 3]), id))).collect();
    for f in &faces {
        for e in 0..3 {
            let (u, v) = (f[e], f[(e + 1) % 3]);
            let Some(g) = owner.get(&(v, u)).map(|&g| faces[g]) else {
                return Err(Error::Internal("hull is not closed".into()));
            };
            let apex = g.iter().copied().find(|&x| x != u && x != v).expect("triangle has three vertices");
            let det = dot3(&cross(&sub(&p[f[1]], &p[f[0]]), &sub(&p[f[2]], &p[f[0]])), &sub(&p[apex], &p[f[0]]));
            if det.abs() <= DEGENERACY_TOLERANCE {
                let mut pts = f.to_vec();
                pts.push(apex);
                pts.sort_unstable();
                return Err(degenerate(pts, "four points are cocircular"));
            }
        }
    }
    Ok(faces)
}

/// How the cell centroid enters the strain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StrainMode {
    /// Vertex mean projected radially onto the sphere before differencing.
    #[default]
    Projected,
    /// Raw vertex mean in R^3.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Strain {
    pub scalar: f64,
    pub vector: Vec3,
    /// `1 - |c_i|` for the raw vertex mean `c_i`.
    pub radial_offset: f64,
}

#[derive(Debug, Clone)]
pub struct VoronoiDiagram {
    generators: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    vertices: Vec<Vec3>,
    cells: Vec<Vec<usize>>,
    energies: Vec<f64>,
}

/// Builds the diagram. Needs d = 3, N >= 4 and no four cocircular points.
pub fn spherical_voronoi(config: &Configuration) -> Result<VoronoiDiagram> {
    require_dim(config.dim(), 3)?;
    if config.len() < 4 {
        return invalid(format!("a spherical Voronoi diagram needs at least 4 points, got {}", config.len()));
    }
    let generators = config.to_vec3()?;
    let triangles = convex_hull(&generators)?;
    let vertices: Vec<Vec3> = triangles
        .iter()
        .map(|[a, b, c]| {
            let (pa, pb, pc) = (&generators[*a], &generators[*b], &generators[*c]);
            normalized(cross(&sub(pb, pa), &sub(pc, pa)))
        })
        .collect();
    let mut corner: HashMap<(usize, usize), usize> = HashMap::new();
    let mut first = vec![usize::MAX; generators.len()];
    for (id, f) in triangles.iter().enumerate() {
        for e in 0..3 {
            corner.insert((f[e], f[(e + 1) % 3]), id);
            first[f[e]] = id;
        }
    }
    let mut cells = Vec::with_capacity(generators.len());
    for (i, &start) in first.iter().enumerate() {
        if start == usize::MAX {
            return Err(degenerate(vec![i], format!("point {i} is not a hull vertex")));
        }
        // Face (i, b, c) is followed counterclockwise by the face holding i -> c.
        let mut loop_ = vec![start];
        let mut face = start;
        loop {
            let f = triangles[face];
            let pos = f.iter().position(|&x| x == i).expect("face contains generator");
            let next = corner[&(i, f[(pos + 2) % 3])];
            if next == start {
                break;
            }
            loop_.push(next);
            face = next;
            if loop_.len() > triangles.len() {
                return Err(Error::Internal("cell walk did not close".into()));
            }
        }
        cells.push(loop_);
    }
    let energies = cell_energies(config)?;
    Ok(VoronoiDiagram { generators, triangles, vertices, cells, energies })
}

/// Signed solid angle of the spherical triangle (a, b, c).
fn solid_angle(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let num = dot3(a, &cross(b, c));
    let den = 1.0 + dot3(a, b) + dot3(b, c) + dot3(c, a);
    2.0 * num.atan2(den)
}

impl VoronoiDiagram {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generator(&self, i: usize) -> Vec3 {
        self.generators[i]
    }

    /// Delaunay triangles (hull facets), counterclockwise from outside.
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Voronoi vertices, one per triangle.
    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    /// Vertex indices of cell `i`, counterclockwise seen from outside.
    pub fn cell(&self, i: usize) -> &[usize] {
        &self.cells[i]
    }

    pub fn cell_vertices(&self, i: usize) -> Vec<Vec3> {
        self.cells[i].iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn sides(&self, i: usize) -> usize {
        self.cells[i].len()
    }

    pub fn charge(&self, i: usize) -> i64 {
        6 - self.sides(i) as i64
    }

    pub fn total_charge(&self) -> i64 {
        (0..self.len()).map(|i| self.charge(i)).sum()
    }

    pub fn cell_area(&self, i: usize) -> f64 {
        let g = &self.generators[i];
        let v = &self.cells[i];
        (0..v.len()).map(|k| solid_angle(g, &self.vertices[v[k]], &self.vertices[v[(k + 1) % v.len()]])).sum()
    }

    pub fn cell_areas(&self) -> Vec<f64> {
        (0..self.len()).into_par_iter().map(|i| self.cell_area(i)).collect()
    }

    pub fn total_area(&self) -> f64 {
        self.cell_areas().iter().sum()
    }

    /// Whether the unit vector `p` lies in cell `i` (boundary included).
    pub fn contains(&self, i: usize, p: &[f64]) -> bool {
        let p = [p[0], p[1], p[2]];
        let v = &self.cells[i];
        (0..v.len()).all(|k| dot3(&p, &cross(&self.vertices[v[k]], &self.vertices[v[(k + 1) % v.len()]])) >= -1e-14)
    }

    pub fn strain(&self, mode: StrainMode) -> Vec<Strain> {
        (0..self.len())
            .into_par_iter()
            .map(|i| {
                let verts = self.cell_vertices(i);
                let k = verts.len() as f64;
                let mut c = [0.0; 3];
                for v in &verts {
                    for a in 0..3 {
                        c[a] += v[a] / k;
                    }
                }
                let norm = dot3(&c, &c).sqrt();
                let target = match mode {
                    StrainMode::Projected => [c[0] / norm, c[1] / norm, c[2] / norm],
                    StrainMode::Raw => c,
                };
                let vector = sub(&self.generators[i], &target);
                Strain { scalar: dot3(&vector, &vector).sqrt(), vector, radial_offset: 1.0 - norm }
            })
            .collect()
    }

    /// Per-cell Coulomb energies `U_i`, summing to the total energy.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// 0 for hexagonal cells, 1 for every other cell.
    pub fn defect_weights(&self) -> Weights {
        Weights::Scalar((0..self.len()).map(|i| if self.sides(i) == 6 { 0.0 } else { 1.0 }).collect())
    }

    pub fn export(&self, mode: StrainMode) -> DiagramExport {
        let strains = self.strain(mode);
        let areas = self.cell_areas();
        let cells = (0..self.len())
            .map(|i| CellExport {
                index: i,
                generator: self.generators[i],
                vertices: self.cell_vertices(i),
                sides: self.sides(i),
                charge: self.charge(i),
                area: areas[i],
                strain: strains[i].scalar,
                strain_vector: strains[i].vector,
                radial_offset: strains[i].radial_offset,
                energy: self.energies[i],
            })
            .collect();
        DiagramExport {
            points: self.len(),
            total_charge: self.total_charge(),
            total_area: areas.iter().sum(),
            strain_mode: mode,
            cells,
        }
    }
}

/// Serializable snapshot of a diagram.
#[derive(Debug, Clone, Serialize)]
pub struct DiagramExport {
    pub points: usize,
    pub total_charge: i64,
    pub total_area: f64,
    pub strain_mode: StrainMode,
    pub cells: Vec<CellExport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CellExport {
    pub index: usize,
    pub generator: Vec3,
    pub vertices: Vec<Vec3>,
    pub sides: usize,
    pub charge: i64,
    pub area: f64,
    pub strain: f64,
    pub strain_vector: Vec3,
    pub radial_offset: f64,
    pub energy: f64,
}

/// Weighted frame potentials of one configuration with its cell strains and
/// cell energies as weights, each against its lower bound.
#[derive(Debug, Clone, Serialize)]
pub struct StrainEnergySummary {
    pub l: usize,
    pub energy: f64,
    pub total_strain: f64,
    pub defects: usize,
    pub strain: BoundReport,
    pub energy_weighted: BoundReport,
    pub strain_vector: BoundReport,
}

pub fn strain_energy_summary(config: &Configuration, l: usize, mode: StrainMode) -> Result<StrainEnergySummary> {
    let diagram = spherical_voronoi(config)?;
    let strains = diagram.strain(mode);
    let scalars: Vec<f64> = strains.iter().map(|s| s.scalar).collect();
    let vectors = Weights::vector(strains.iter().map(|s| s.vector.to_vec()).collect())?;
    let energies = Weights::Scalar(diagram.energies().to_vec());
    Ok(StrainEnergySummary {
        l,
        energy: diagram.energies().iter().sum(),
        total_strain: scalars.iter().sum(),
        defects: (0..diagram.len()).filter(|&i| diagram.sides(i) != 6).count(),
        strain: fp_bound_report(config, Some(&Weights::Scalar(scalars)), l)?,
        energy_weighted: fp_bound_report(config, Some(&energies), l)?,
        strain_vector: fp_bound_report(config, Some(&vectors), l)?,
    })
}

pub fn strain(diagram: &VoronoiDiagram) -> Vec<Strain> {
    diagram.strain(StrainMode::Projected)
}

pub fn defect_weights(diagram: &VoronoiDiagram) -> Weights {
    diagram.defect_weights()
}

/// `U_i = 1/2 sum_{j != i} 1/r_ij`.
pub fn cell_energies(config: &Configuration) -> Result<Vec<f64>> {
    let n = config.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let pi = config.point(i);
            let mut u = 0.0;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let r2: f64 = pi.iter().zip(config.point(j)).map(|(a, b)| (a - b) * (a - b)).sum();
                if r2 == 0.0 {
                    return Err(Error::InfiniteEnergy(i.min(j), i.max(j)));
                }
                u += 0.5 / r2.sqrt();
            }
            Ok(u)
        })
        .collect()
}

/// Area of the unit sphere, the sum every diagram's cells must reach.
pub const SPHERE_AREA: f64 = 4.0 * PI;
