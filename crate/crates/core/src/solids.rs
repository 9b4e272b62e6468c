//! Vertex sets of the Platonic solids inscribed in the unit sphere, plus a
//! couple of other fixed reference configurations.

use crate::config::Configuration;

fn build(points: &[[f64; 3]]) -> Configuration {
    Configuration::from_vec3(points).expect("reference solids are valid")
}

pub fn tetrahedron() -> Configuration {
    build(&[[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]])
}

pub fn octahedron() -> Configuration {
    build(&[
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ])
}

pub fn cube() -> Configuration {
    let mut pts = Vec::with_capacity(8);
    for x in [-1.0, 1.0] {
        for y in [-1.0, 1.0] {
            for z in [-1.0, 1.0] {
                pts.push([x, y, z]);
            }
        }
    }
    build(&pts)
}

pub fn icosahedron() -> Configuration {
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pts = Vec::with_capacity(12);
    for a in [-1.0, 1.0] {
        for b in [-g, g] {
            pts.push([0.0, a, b]);
            pts.push([a, b, 0.0]);
            pts.push([b, 0.0, a]);
        }
    }
    build(&pts)
}

/// `n` equally spaced points on the equator.
pub fn equator(n: usize) -> Configuration {
    let pts: Vec<[f64; 3]> = (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            [t.cos(), t.sin(), 0.0]
        })
        .collect();
    build(&pts)
}

/// `n` copies of the north pole.
pub fn north_pole(n: usize) -> Configuration {
    build(&vec![[0.0, 0.0, 1.0]; n])
}
