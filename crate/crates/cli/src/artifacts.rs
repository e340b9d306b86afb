use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{Number, Value};
use supportshape_core::sphere::sphere_normal;
use supportshape_core::{FourierSupport2D, SphericalSupport3D, DEFAULT_POLE_MARGIN};

use crate::RunError;

pub const BOUNDARY_SAMPLES: usize = 2048;
pub const MESH_PHI: usize = 128;
pub const MESH_PSI: usize = 64;

/// Floats with 17 significant digits, shortest-round-trip integers.
pub fn float_17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty JSON in which every float carries 17 significant digits.
pub fn to_json_17(value: &impl Serialize) -> Result<String, RunError> {
    let mut v = serde_json::to_value(value).map_err(|e| RunError::Io(format!("serialize: {e}")))?;
    reformat_floats(&mut v);
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| RunError::Io(format!("serialize: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn reformat_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                // arbitrary_precision keeps the digits as written
                if let Ok(m) = float_17(x).parse::<Number>() {
                    *n = m;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(reformat_floats),
        Value::Object(map) => map.values_mut().for_each(reformat_floats),
        _ => {}
    }
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial artifact.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), RunError> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let io = |e: std::io::Error| RunError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644)).map_err(io)?;
    }
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// `θ,x,y` rows of the boundary point with outward normal angle `θ`.
pub fn boundary_csv(p: &FourierSupport2D) -> String {
    let mut s = String::from("theta,x,y\n");
    for i in 0..BOUNDARY_SAMPLES {
        let t = 2.0 * PI * i as f64 / BOUNDARY_SAMPLES as f64;
        let [x, y] = p.boundary_point(t);
        let _ = writeln!(s, "{},{},{}", float_17(t), float_17(x), float_17(y));
    }
    s
}

/// Triangulated boundary of a spatial body.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    /// Counter-clockwise seen from outside.
    pub faces: Vec<[usize; 3]>,
}

impl Mesh {
    /// Boundary points on an `n_phi × n_psi` longitude–latitude grid with
    /// `ψ` in `[margin, π − margin]`. The pole bands, where the
    /// parametrization is singular, are closed by triangle fans at
    /// `p(pole) n(pole)`, which is exact only when the pole is an umbilic
    /// point of zero surface gradient.
    pub fn from_support(p: &SphericalSupport3D, n_phi: usize, n_psi: usize, margin: f64) -> Result<Self, RunError> {
        if n_phi < 3 || n_psi < 2 {
            return Err(RunError::Config(format!("mesh grid {n_phi}×{n_psi} is too small")));
        }
        let mut vertices = Vec::with_capacity(n_phi * n_psi + 2);
        for j in 0..n_psi {
            let psi = margin + (PI - 2.0 * margin) * j as f64 / (n_psi - 1) as f64;
            for i in 0..n_phi {
                let phi = 2.0 * PI * i as f64 / n_phi as f64;
                vertices.push(p.boundary_point(phi, psi).map_err(|e| RunError::Io(e.to_string()))?);
            }
        }
        let pole = |psi: f64| {
            let n = sphere_normal(0.0, psi);
            let h = p.eval_direction(n);
            [h * n[0], h * n[1], h * n[2]]
        };
        let north = vertices.len();
        vertices.push(pole(0.0));
        let south = vertices.len();
        vertices.push(pole(PI));

        // φ runs clockwise about +z (n = (sin φ sin ψ, cos φ sin ψ, cos ψ))
        // and ψ runs from north to south
        let at = |i: usize, j: usize| j * n_phi + i % n_phi;
        let mut faces = Vec::with_capacity(2 * n_phi * n_psi);
        for i in 0..n_phi {
            faces.push([north, at(i + 1, 0), at(i, 0)]);
        }
        for j in 0..n_psi - 1 {
            for i in 0..n_phi {
                let (a, b, c, d) = (at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1));
                faces.push([a, b, d]);
                faces.push([a, d, c]);
            }
        }
        for i in 0..n_phi {
            faces.push([south, at(i, n_psi - 1), at(i + 1, n_psi - 1)]);
        }
        Ok(Self { vertices, faces })
    }

    pub fn default_for(p: &SphericalSupport3D) -> Result<Self, RunError> {
        Self::from_support(p, MESH_PHI, MESH_PSI, DEFAULT_POLE_MARGIN)
    }

    pub fn edge_count(&self) -> usize {
        let mut edges: Vec<(usize, usize)> = self
            .faces
            .iter()
            .flat_map(|f| [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])])
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_count() as i64 + self.faces.len() as i64
    }

    /// Every edge is shared by exactly two faces, traversed in opposite
    /// directions.
    pub fn is_closed_and_oriented(&self) -> bool {
        let mut directed: Vec<(usize, usize)> =
            self.faces.iter().flat_map(|f| [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])]).collect();
        directed.sort_unstable();
        if directed.windows(2).any(|w| w[0] == w[1]) {
            return false;
        }
        directed.iter().all(|&(a, b)| directed.binary_search(&(b, a)).is_ok())
    }

    pub fn face_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.faces[f].map(|i| self.vertices[i]);
        let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
        let n = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
        0.5 * (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt()
    }

    /// Signed enclosed volume; positive for outward orientation.
    pub fn volume(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                let [a, b, c] = f.map(|i| self.vertices[i]);
                a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
            })
            .sum::<f64>()
            / 6.0
    }

    pub fn to_obj(&self) -> String {
        let mut s = String::from("# support-function boundary; pole caps closed by fans at p(pole) n(pole)\n");
        for v in &self.vertices {
            let _ = writeln!(s, "v {} {} {}", float_17(v[0]), float_17(v[1]), float_17(v[2]));
        }
        for f in &self.faces {
            let _ = writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
        }
        s
    }
}
