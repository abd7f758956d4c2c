//! Built-in domains, automorphism catalogs, the symmetric-cone catalog and
//! JSON domain descriptions.

use nalgebra::{DMatrix, DVector, Matrix3};
use serde::{Deserialize, Serialize};

use super::{psd, ConvexDomain, DomainKind, Membership, Polytope};
use crate::error::{GeomError, Result};
use crate::projlin::{ProjMap, ProjPoint};
use crate::sampling;

/// Number of interior samples used when validating catalog maps on load.
const VALIDATION_SAMPLES: usize = 200;

fn map(m: DMatrix<f64>) -> ProjMap {
    ProjMap::new(m).expect("catalog map is invertible")
}

/// `diag(2^k, …, 2, 1)` and the cyclic coordinate permutation.
pub(super) fn simplex_automorphisms(dim: usize) -> Vec<ProjMap> {
    let d = dim + 1;
    if d < 2 {
        return Vec::new();
    }
    let diag: Vec<f64> = (0..d).map(|i| 2f64.powi((d - 1 - i) as i32)).collect();
    let cyclic = DMatrix::from_fn(d, d, |i, j| if (j + 1) % d == i { 1.0 } else { 0.0 });
    vec![
        map(DMatrix::from_diagonal(&DVector::from_vec(diag))),
        map(cyclic),
    ]
}

/// Lorentz boost of rapidity `r` mixing chart axis `axis` with the last
/// coordinate.
fn boost(dim: usize, axis: usize, r: f64) -> DMatrix<f64> {
    let mut m = DMatrix::identity(dim + 1, dim + 1);
    m[(axis, axis)] = r.cosh();
    m[(dim, dim)] = r.cosh();
    m[(axis, dim)] = r.sinh();
    m[(dim, axis)] = r.sinh();
    m
}

fn rotation(d: usize, i: usize, j: usize, theta: f64) -> DMatrix<f64> {
    let mut m = DMatrix::identity(d, d);
    m[(i, i)] = theta.cos();
    m[(j, j)] = theta.cos();
    m[(i, j)] = -theta.sin();
    m[(j, i)] = theta.sin();
    m
}

/// Boosts, an elliptic rotation and (for `n ≥ 3`) a loxodromic element.
pub(super) fn ellipsoid_automorphisms(dim: usize) -> Vec<ProjMap> {
    let d = dim + 1;
    let mut out = vec![map(boost(dim, 0, 1.0))];
    if dim >= 2 {
        out.push(map(rotation(d, 0, 1, 17f64.to_radians())));
        out.push(map(boost(dim, 1, 0.5)));
    }
    if dim >= 3 {
        out.push(map(boost(dim, 0, 1.0) * rotation(d, 1, 2, 0.7)));
    }
    out
}

pub(super) fn psd_automorphisms() -> Vec<ProjMap> {
    let diag = Matrix3::from_diagonal(&nalgebra::Vector3::new(2.0, 1.0, 0.5));
    let upper = Matrix3::new(2.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.5);
    let rot =
        nalgebra::Rotation3::from_axis_angle(&nalgebra::Vector3::z_axis(), 17f64.to_radians())
            .into_inner();
    [diag, upper, rot]
        .iter()
        .map(|m| psd::congruence(m).expect("congruence is invertible"))
        .collect()
}

fn block_diagonal(blocks: &[DMatrix<f64>]) -> DMatrix<f64> {
    let d: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut m = DMatrix::zeros(d, d);
    let mut off = 0;
    for b in blocks {
        m.view_mut((off, off), (b.nrows(), b.ncols())).copy_from(b);
        off += b.nrows();
    }
    m
}

/// One factor map at a time (others fixed) and a relative scaling.
pub(super) fn product_automorphisms(factors: &[ConvexDomain]) -> Vec<ProjMap> {
    let ids: Vec<DMatrix<f64>> = factors
        .iter()
        .map(|f| DMatrix::identity(f.ambient_dim(), f.ambient_dim()))
        .collect();
    let mut out = Vec::new();
    for (i, f) in factors.iter().enumerate() {
        for g in f.automorphisms() {
            let mut blocks = ids.clone();
            blocks[i] = g.matrix().clone();
            out.push(map(block_diagonal(&blocks)));
        }
    }
    let scaled: Vec<DMatrix<f64>> = ids
        .iter()
        .enumerate()
        .map(|(i, b)| b * 2f64.powi(i as i32))
        .collect();
    out.push(map(block_diagonal(&scaled)));
    out
}

/// Identifiers accepted by [`builtin`].
pub fn builtin_ids() -> &'static [&'static str] {
    &[
        "disk",
        "ball3",
        "simplex2",
        "simplex3",
        "square",
        "psd3",
        "cone_disk",
    ]
}

/// A built-in domain by identifier. Besides the listed ids, `simplexK` and
/// `ballN` are accepted for any dimension.
pub fn builtin(id: &str) -> Result<ConvexDomain> {
    let parse = |prefix: &str| {
        id.strip_prefix(prefix)
            .and_then(|s| s.parse::<usize>().ok())
    };
    match id {
        "disk" => Ok(ConvexDomain::ellipsoid(2)?.with_name("disk")),
        "square" => {
            let mut d = ConvexDomain::polytope("square", Polytope::square());
            let rot =
                DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
            let refl =
                DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
            d.automorphisms = vec![map(rot), map(refl)];
            Ok(d)
        }
        "psd3" => Ok(ConvexDomain::psd_cone3()),
        "cone_disk" => {
            Ok(
                ConvexDomain::product(vec![ConvexDomain::ellipsoid(2)?, ConvexDomain::simplex(0)])?
                    .with_name("cone_disk"),
            )
        }
        _ => {
            if let Some(k) = parse("simplex") {
                Ok(ConvexDomain::simplex(k))
            } else if let Some(n) = parse("ball") {
                ConvexDomain::ellipsoid(n)
            } else {
                Err(GeomError::InvalidInput(format!(
                    "unknown domain '{id}' (builtins: {})",
                    builtin_ids().join(", ")
                )))
            }
        }
    }
}

/// Known structure of a catalog domain.
#[derive(Clone, Debug, Serialize)]
pub struct DomainMeta {
    pub symmetric: bool,
    pub reducible: bool,
    pub real_rank: Option<usize>,
    pub group: Option<String>,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub domain: ConvexDomain,
    pub meta: DomainMeta,
}

/// Constructed symmetric domains with their rank and automorphism group,
/// plus the simplex as the reducible reference.
pub fn symmetric_catalog() -> Vec<CatalogEntry> {
    let meta = |symmetric, reducible, rank, group: &str| DomainMeta {
        symmetric,
        reducible,
        real_rank: rank,
        group: Some(group.to_string()),
    };
    vec![
        CatalogEntry {
            domain: ConvexDomain::ellipsoid(2)
                .expect("ellipsoid")
                .with_name("disk"),
            meta: meta(true, false, Some(1), "SO(1,2)"),
        },
        CatalogEntry {
            domain: ConvexDomain::ellipsoid(3).expect("ellipsoid"),
            meta: meta(true, false, Some(1), "SO(1,3)"),
        },
        CatalogEntry {
            domain: ConvexDomain::psd_cone3(),
            meta: meta(true, false, Some(2), "SL(3,R)"),
        },
        CatalogEntry {
            domain: ConvexDomain::simplex(2),
            meta: DomainMeta {
                symmetric: true,
                reducible: true,
                real_rank: Some(2),
                group: Some("(R_{>0})^2 ⋊ S_3".into()),
            },
        },
    ]
}

/// An irreducible symmetric cone family, described by metadata only.
#[derive(Clone, Debug, Serialize)]
pub struct ConeFamily {
    pub name: &'static str,
    pub group: &'static str,
    /// Ambient dimension of the cone for parameter `m`.
    #[serde(skip)]
    pub ambient_dim: fn(usize) -> usize,
    #[serde(skip)]
    pub real_rank: fn(usize) -> usize,
    /// Whether a concrete domain exists in this crate.
    pub constructed: bool,
}

pub fn koecher_vinberg_families() -> Vec<ConeFamily> {
    vec![
        ConeFamily {
            name: "Sym_m(R)_+",
            group: "SL(m,R)",
            ambient_dim: |m| m * (m + 1) / 2,
            real_rank: |m| m - 1,
            constructed: true,
        },
        ConeFamily {
            name: "Herm_m(C)_+",
            group: "SL(m,C)",
            ambient_dim: |m| m * m,
            real_rank: |m| m - 1,
            constructed: false,
        },
        ConeFamily {
            name: "Herm_m(H)_+",
            group: "SL(m,H)",
            ambient_dim: |m| m * (2 * m - 1),
            real_rank: |m| m - 1,
            constructed: false,
        },
        ConeFamily {
            name: "Herm_3(O)_+",
            group: "E6(-26)",
            ambient_dim: |_| 27,
            real_rank: |_| 2,
            constructed: false,
        },
        ConeFamily {
            name: "Lorentz cone",
            group: "SO(1,m)",
            ambient_dim: |m| m + 1,
            real_rank: |_| 1,
            constructed: true,
        },
    ]
}

/// JSON description of a domain.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
    /// Rows `[a…, b]` meaning `a·x ≤ b`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halfspaces: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<DomainSpec>>,
    /// Replaces the default catalog when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub automorphisms: Option<Vec<Vec<Vec<f64>>>>,
}

impl DomainSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| GeomError::InvalidInput(format!("domain JSON: {e}")))
    }

    fn require_dim(&self) -> Result<usize> {
        self.dimension
            .ok_or_else(|| GeomError::InvalidDomain(format!("{} needs a dimension", self.kind)))
    }

    /// Builds and validates the domain. Violations are reported with indices.
    pub fn build(&self) -> Result<ConvexDomain> {
        let mut dom = match self.kind.as_str() {
            "simplex" => ConvexDomain::simplex(self.require_dim()?),
            "ellipsoid" => ConvexDomain::ellipsoid(self.require_dim()?)?,
            "psd3" => ConvexDomain::psd_cone3(),
            "polytope" => {
                let verts = self
                    .vertices
                    .as_ref()
                    .ok_or_else(|| GeomError::InvalidDomain("polytope needs vertices".into()))?;
                let hs = self
                    .halfspaces
                    .as_ref()
                    .ok_or_else(|| GeomError::InvalidDomain("polytope needs halfspaces".into()))?;
                let vertices: Vec<DVector<f64>> =
                    verts.iter().map(|v| DVector::from_vec(v.clone())).collect();
                let mut halfspaces = Vec::with_capacity(hs.len());
                for (j, row) in hs.iter().enumerate() {
                    let Some((b, a)) = row.split_last() else {
                        return Err(GeomError::InvalidDomain(format!("halfspace {j} is empty")));
                    };
                    halfspaces.push((DVector::from_vec(a.to_vec()), *b));
                }
                let p = Polytope::new(vertices, halfspaces)?;
                validate_polytope(&p, self.dimension)?;
                ConvexDomain::polytope("polytope", p)
            }
            "product" => {
                let fs = self
                    .factors
                    .as_ref()
                    .ok_or_else(|| GeomError::InvalidDomain("product needs factors".into()))?;
                let built = fs.iter().map(|f| f.build()).collect::<Result<Vec<_>>>()?;
                ConvexDomain::product(built)?
            }
            other => {
                return Err(GeomError::InvalidDomain(format!(
                    "unknown kind '{other}' (simplex, ellipsoid, polytope, psd3, product)"
                )))
            }
        };
        if let Some(name) = &self.name {
            dom.name = name.clone();
        }
        if let Some(autos) = &self.automorphisms {
            let mut maps = Vec::with_capacity(autos.len());
            for (i, rows) in autos.iter().enumerate() {
                let g = ProjMap::from_rows(rows)
                    .map_err(|e| GeomError::InvalidDomain(format!("automorphism {i}: {e}")))?;
                dom.verify_automorphism(&g, VALIDATION_SAMPLES, sampling::derive_seed(0, i as u64))
                    .map_err(|e| GeomError::InvalidDomain(format!("automorphism {i}: {e}")))?;
                maps.push(g);
            }
            dom.automorphisms = maps;
        }
        Ok(dom)
    }
}

/// V/H agreement, boundedness and nondegeneracy.
fn validate_polytope(p: &Polytope, dimension: Option<usize>) -> Result<()> {
    let n = p.affine_dim();
    let mut problems = Vec::new();
    if let Some(d) = dimension {
        if d != n {
            problems.push(format!("dimension {d} does not match vertex length {n}"));
        }
    }
    for (i, v) in p.vertices.iter().enumerate() {
        for (j, (a, b)) in p.halfspaces.iter().enumerate() {
            if a.dot(v) > b + Polytope::INCIDENCE_TOL {
                problems.push(format!("vertex {i} violates halfspace {j}"));
            }
        }
        let on = p.incidence.iter().filter(|s| s.contains(&i)).count();
        if on < n {
            problems.push(format!(
                "vertex {i} lies on {on} facets (< {n}), not a vertex"
            ));
        }
    }
    for (j, s) in p.incidence.iter().enumerate() {
        if s.len() < n {
            problems.push(format!(
                "halfspace {j} touches {} vertices (< {n}), not a facet",
                s.len()
            ));
        }
    }
    let centroid =
        p.vertices.iter().fold(DVector::zeros(n), |acc, v| acc + v) / p.vertices.len() as f64;
    if p.halfspaces
        .iter()
        .any(|(a, b)| b - a.dot(&centroid) <= 1e-9)
    {
        problems.push("polytope has empty interior".into());
    }
    // Bounded iff the outward normals positively span R^n: no direction has
    // a·u ≤ 0 for every facet. Checked against the lifted-vertex hull.
    let lifted = DMatrix::from_fn(n + 1, p.vertices.len(), |r, c| {
        if r < n {
            p.vertices[c][r]
        } else {
            1.0
        }
    });
    if lifted.rank(1e-9) < n + 1 {
        problems.push("vertices do not span the chart".into());
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(GeomError::InvalidDomain(problems.join("; ")))
    }
}

impl ConvexDomain {
    /// Reconstructs a spec for domains built from closed-form kinds.
    pub fn to_spec(&self) -> DomainSpec {
        let mut spec = DomainSpec {
            name: Some(self.name.clone()),
            automorphisms: Some(self.automorphisms.iter().map(|g| g.rows()).collect()),
            ..Default::default()
        };
        match &self.kind {
            DomainKind::Simplex { dim } => {
                spec.kind = "simplex".into();
                spec.dimension = Some(*dim);
            }
            DomainKind::Ellipsoid { dim } => {
                spec.kind = "ellipsoid".into();
                spec.dimension = Some(*dim);
            }
            DomainKind::PsdCone3 => spec.kind = "psd3".into(),
            DomainKind::Polytope(p) => {
                spec.kind = "polytope".into();
                spec.dimension = Some(p.affine_dim());
                spec.vertices = Some(
                    p.vertices
                        .iter()
                        .map(|v| v.iter().copied().collect())
                        .collect(),
                );
                spec.halfspaces = Some(
                    p.halfspaces
                        .iter()
                        .map(|(a, b)| a.iter().copied().chain([*b]).collect())
                        .collect(),
                );
            }
            DomainKind::Product(fs) => {
                spec.kind = "product".into();
                spec.factors = Some(fs.iter().map(|f| f.to_spec()).collect());
            }
        }
        spec
    }

    /// Checks the catalog against sampled membership. Returns one message per
    /// violation.
    pub fn validate(&self, seed: u64) -> Vec<String> {
        let mut out = Vec::new();
        let mut rng = sampling::rng(seed);
        for i in 0..VALIDATION_SAMPLES {
            let x = self.sample_interior(&mut rng);
            let y = self.sample_interior(&mut rng);
            let mid = chart_midpoint(self, &x, &y);
            if self.membership(&mid) != Membership::Interior {
                out.push(format!("sample pair {i}: midpoint not interior"));
            }
        }
        for (i, g) in self.automorphisms.iter().enumerate() {
            if let Err(e) = self.verify_automorphism(
                g,
                VALIDATION_SAMPLES,
                sampling::derive_seed(seed, i as u64),
            ) {
                out.push(format!("automorphism {i}: {e}"));
            }
        }
        out
    }
}

fn chart_midpoint(dom: &ConvexDomain, x: &ProjPoint, y: &ProjPoint) -> ProjPoint {
    let u = dom.chart_lift(x).expect("interior sample");
    let w = dom.chart_lift(y).expect("interior sample");
    ProjPoint::new((u + w) * 0.5).expect("nonzero midpoint")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_have_valid_catalogs() {
        for id in builtin_ids() {
            let d = builtin(id).unwrap();
            assert!(d.validate(3).is_empty(), "{id}: {:?}", d.validate(3));
        }
        assert!(builtin("nope").is_err());
        assert_eq!(builtin("simplex4").unwrap().ambient_dim(), 5);
    }

    #[test]
    fn symmetric_catalog_dimensions() {
        let cat = symmetric_catalog();
        let psd = cat.iter().find(|e| e.domain.name() == "psd3").unwrap();
        assert_eq!(psd.domain.ambient_dim(), (3 * 3 + 3) / 2);
        assert_eq!(psd.meta.real_rank, Some(2));
        for e in cat.iter().filter(|e| e.domain.is_strictly_convex()) {
            assert_eq!(e.meta.real_rank, Some(1));
        }
        let sym = &koecher_vinberg_families()[0];
        assert_eq!((sym.ambient_dim)(3), 6);
    }

    #[test]
    fn domain_json_roundtrip_and_errors() {
        let sq = builtin("square").unwrap();
        let json = serde_json::to_string(&sq.to_spec()).unwrap();
        let back = DomainSpec::from_json(&json).unwrap().build().unwrap();
        assert_eq!(back.ambient_dim(), 3);
        assert_eq!(back.automorphisms().len(), 2);

        let bad = r#"{"kind":"polytope","vertices":[[0,0],[1,0],[0,1]],
                      "halfspaces":[[-1,0,0],[0,-1,0],[1,1,0.5]]}"#;
        let err = DomainSpec::from_json(bad).unwrap().build().unwrap_err();
        let GeomError::InvalidDomain(msg) = err else {
            panic!()
        };
        assert!(msg.contains("vertex 1 violates halfspace 2"), "{msg}");

        let not_auto = r#"{"kind":"ellipsoid","dimension":2,
                           "automorphisms":[[[2,0,0],[0,1,0],[0,0,1]]]}"#;
        assert!(matches!(
            DomainSpec::from_json(not_auto).unwrap().build(),
            Err(GeomError::InvalidDomain(m)) if m.starts_with("automorphism 0")
        ));
        assert!(DomainSpec::from_json(r#"{"kind":"torus"}"#)
            .unwrap()
            .build()
            .is_err());
    }
}
