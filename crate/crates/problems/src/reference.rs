use std::f64::consts::PI;

use serde::Serialize;

/// Where a reference value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    /// Closed form of a known optimizer.
    Exact,
    /// Derived by hand from a characterization of the optimizer.
    Derived,
    /// Published numerical optimum; an upper bound at best.
    Published,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reference {
    pub key: &'static str,
    pub value: f64,
    /// Relative tolerance at which a desk-scale run is compared.
    pub tolerance: f64,
    pub kind: SourceKind,
    pub source: &'static str,
}

impl Reference {
    pub fn relative_error(&self, value: f64) -> f64 {
        (value - self.value).abs() / self.value.abs()
    }

    pub fn matches(&self, value: f64) -> bool {
        self.relative_error(value) <= self.tolerance
    }

    /// Same entry for a body scaled so that the value scales by `factor`.
    pub fn rescaled(mut self, factor: f64) -> Self {
        self.value *= factor;
        self
    }
}

/// Volume of the Meissner bodies of unit width.
pub fn meissner_volume() -> f64 {
    (2.0 / 3.0 - 3f64.sqrt() / 4.0 * (1.0f64 / 3.0).acos()) * PI
}

/// Area of the Reuleaux triangle of width `w`.
pub fn reuleaux_area(w: f64) -> f64 {
    (PI - 3f64.sqrt()) / 2.0 * w * w
}

/// `J_γ` of the unit-width Reuleaux triangle (perimeter `π`).
pub fn j_gamma_reuleaux(gamma: f64) -> f64 {
    gamma * reuleaux_area(1.0) - PI
}

/// Cheeger constant of the unit square, `2 + √π`; the Cheeger set is the
/// square with corners rounded at radius `1 / (2 + √π)`.
pub fn cheeger_unit_square() -> f64 {
    2.0 + PI.sqrt()
}

pub fn reference_table() -> Vec<Reference> {
    use SourceKind::*;
    vec![
        Reference {
            key: "min_area_cw_2d",
            value: reuleaux_area(2.0),
            tolerance: 5e-3,
            kind: Exact,
            source: "Reuleaux triangle of width 2, area 2(π − √3) = 2.8191",
        },
        Reference {
            key: "min_area_cw_2d_published",
            value: 2.8196,
            tolerance: 5e-3,
            kind: Published,
            source: "support-function optimization with 501 Fourier coefficients, width 2",
        },
        Reference {
            key: "min_vol_cw_3d",
            value: meissner_volume(),
            tolerance: 6e-3,
            kind: Exact,
            source: "Meissner bodies of width 1, V = (2/3 − (√3/4) arccos(1/3)) π = 0.419860",
        },
        Reference {
            key: "min_vol_cw_3d_published",
            value: 0.4224,
            tolerance: 1e-3,
            kind: Published,
            source: "support-function optimization to harmonic degree 28, width 1",
        },
        Reference {
            key: "eig_convex_2d_k2",
            value: 38.00,
            tolerance: 2e-2,
            kind: Published,
            source: "λ₂ under convexity and unit area, support-function optimization (rounded up)",
        },
        Reference {
            key: "eig_convex_2d_k2_literature",
            value: 37.987,
            tolerance: 2e-2,
            kind: Published,
            source: "λ₂ under convexity and unit area, parametric search",
        },
        Reference {
            key: "eig_convex_3d_k2",
            value: 43.07,
            tolerance: 2e-2,
            kind: Published,
            source: "λ₂ under convexity and unit volume, support-function optimization",
        },
        Reference {
            key: "eig_cw_3d_k10",
            value: 39.41,
            tolerance: 1e-2,
            kind: Published,
            source: "λ₁₀ under constant width 2 (ball: (2π)² = 39.48), support-function optimization",
        },
        Reference {
            key: "rotor_tetra",
            value: 0.3936,
            tolerance: 2e-2,
            kind: Published,
            source: "minimal-volume rotor of the regular tetrahedron with inradius 1/2",
        },
        Reference {
            key: "rotor_octa",
            value: 0.5041,
            tolerance: 1e-2,
            kind: Published,
            source: "minimal-volume rotor of the regular octahedron with inradius 1/2",
        },
        Reference {
            key: "rotor_tetra_deg2",
            value: 0.4024,
            tolerance: 1e-2,
            kind: Published,
            source: "tetrahedron rotor restricted to harmonics of degree ≤ 2, inradius 1/2",
        },
        Reference {
            key: "min_area_width_3d",
            value: 2.9154,
            tolerance: 1.5e-2,
            kind: Published,
            source: "minimal area under width ≥ 1, 250 spherical harmonics",
        },
        Reference {
            key: "min_area_width_3d_ceiling",
            value: 2.9249,
            tolerance: 1.5e-2,
            kind: Published,
            source: "minimal area under width ≥ 1 from an earlier, independent method",
        },
        Reference {
            key: "cheeger_square",
            value: cheeger_unit_square(),
            tolerance: 5e-3,
            kind: Derived,
            source: "unit square with corners rounded at r = 1/(2 + √π): ratio 1/r = 2 + √π",
        },
        Reference {
            key: "j_gamma_reuleaux",
            value: j_gamma_reuleaux(0.4),
            tolerance: 1e-3,
            kind: Derived,
            source: "Reuleaux triangle of diameter 1 at γ = 0.4: γ(π − √3)/2 − π",
        },
    ]
}

pub fn reference(key: &str) -> Option<Reference> {
    reference_table().into_iter().find(|r| r.key == key)
}
