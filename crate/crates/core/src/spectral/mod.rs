//! Reading eigenvectors as functions on the surface: nodal domains,
//! spectral position, Courant sharpness, partition energies and the gauge
//! transform between homologous cuts.

mod nodal;
mod partition;

pub use nodal::{
    nodal_domains, nodal_partition, split_along_nodal_set, NodalDomains, NodalPartition,
};
pub use partition::{
    partition_energy, partition_energy_with, read_partition, verify_min_inequality,
    write_partition, EnergyOptions, EnergyReport, InequalityEntry, InequalityReport, PartEnergy,
    Partition,
};

use serde::{Deserialize, Serialize};

use crate::eigen::{same_eigenvalue, Spectrum};
use crate::error::{Error, Result};
use crate::geometry::SurfaceMesh;
use crate::homology::{Cut, Sign, TriangleColoring};
use crate::operator::{element_mass, element_stiffness, DofMap};

/// Default nodal threshold, relative to the field's largest magnitude.
pub const DEFAULT_ZERO_TOL: f64 = 1e-6;

/// A P1 function given by its value at every (triangle, corner).
#[derive(Clone, Debug, PartialEq)]
pub struct CornerField {
    mesh_id: u64,
    pub values: Vec<[f64; 3]>,
    pub eigenvalue: Option<f64>,
}

impl CornerField {
    /// Expand a dof vector: `s · x[dof]` at free corners, zero at pinned ones.
    pub fn from_dofs(
        mesh: &SurfaceMesh,
        dofs: &DofMap,
        x: &[f64],
        eigenvalue: Option<f64>,
    ) -> Result<Self> {
        dofs.check_mesh(mesh)?;
        if x.len() != dofs.n_dofs() {
            return Err(Error::InvalidParameter(format!(
                "vector has {} entries, dof map has {}",
                x.len(),
                dofs.n_dofs()
            )));
        }
        let values = (0..mesh.num_triangles())
            .map(|t| [0, 1, 2].map(|c| dofs.corner_value(x, t, c)))
            .collect();
        Ok(CornerField {
            mesh_id: mesh.fingerprint(),
            values,
            eigenvalue,
        })
    }

    /// Field of the `index`-th (0-based) eigenvector of a spectrum.
    pub fn from_spectrum(
        mesh: &SurfaceMesh,
        dofs: &DofMap,
        spectrum: &Spectrum,
        index: usize,
    ) -> Result<Self> {
        let x = spectrum.eigenvectors.get(index).ok_or_else(|| {
            Error::OutOfRange(format!("eigenvector {} of {}", index + 1, spectrum.len()))
        })?;
        Self::from_dofs(mesh, dofs, x, Some(spectrum.eigenvalues[index]))
    }

    pub fn belongs_to(&self, mesh: &SurfaceMesh) -> bool {
        self.mesh_id == mesh.fingerprint() && self.values.len() == mesh.num_triangles()
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Recover the dof vector, failing if the field is not in the space of `dofs`.
    pub fn to_dofs(&self, mesh: &SurfaceMesh, dofs: &DofMap, tol: f64) -> Result<Vec<f64>> {
        dofs.check_mesh(mesh)?;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut x = vec![f64::NAN; dofs.n_dofs()];
        for t in 0..mesh.num_triangles() {
            for c in 0..3 {
                let v = self.values[t][c];
                match dofs.corner(t, c).dof() {
                    None if v.abs() > tol * scale => {
                        return Err(Error::InvalidParameter(format!(
                            "field is nonzero at pinned corner {c} of triangle {t}"
                        )))
                    }
                    None => {}
                    Some((d, s)) => {
                        let xv = s * v;
                        if x[d].is_nan() {
                            x[d] = xv;
                        } else if (x[d] - xv).abs() > tol * scale {
                            return Err(Error::InvalidParameter(format!(
                                "field does not match the sign structure at dof {d}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(x.into_iter()
            .map(|v| if v.is_nan() { 0.0 } else { v })
            .collect())
    }
}

/// Dirichlet energy over L² norm, computed triangle by triangle.
pub fn rayleigh_quotient(mesh: &SurfaceMesh, field: &CornerField) -> Result<f64> {
    if !field.belongs_to(mesh) {
        return Err(Error::MismatchedMesh);
    }
    let (mut num, mut den) = (0.0, 0.0);
    for t in 0..mesh.num_triangles() {
        let u = field.values[t];
        let k = element_stiffness(mesh.corner_positions(t));
        let m = element_mass(mesh.triangle_area(t));
        for i in 0..3 {
            for j in 0..3 {
                num += u[i] * k[i][j] * u[j];
                den += u[i] * m[i][j] * u[j];
            }
        }
    }
    if den == 0.0 {
        return Err(Error::ZeroField);
    }
    Ok(num / den)
}

/// Φ: negate the field on minus-colored triangles.
pub fn gauge_transform(
    mesh: &SurfaceMesh,
    coloring: &TriangleColoring,
    field: &CornerField,
) -> Result<CornerField> {
    if !field.belongs_to(mesh) || coloring.colors.len() != mesh.num_triangles() {
        return Err(Error::MismatchedMesh);
    }
    let values = field
        .values
        .iter()
        .zip(&coloring.colors)
        .map(|(v, c)| match c {
            Sign::Plus => *v,
            Sign::Minus => v.map(|x| -x),
        })
        .collect();
    Ok(CornerField {
        mesh_id: field.mesh_id,
        values,
        eigenvalue: field.eigenvalue,
    })
}

/// 1-based index of the first computed eigenvalue equal to `lambda`
/// (within the multiplicity gap).
pub fn spectral_position(spectrum: &Spectrum, lambda: f64) -> Result<usize> {
    let all = spectrum.all_eigenvalues();
    if let Some(i) = all.iter().position(|&v| same_eigenvalue(v, lambda)) {
        return Ok(i + 1);
    }
    match all.last() {
        Some(&top) if lambda < top => Err(Error::OutOfRange(format!(
            "{lambda} matches no computed eigenvalue"
        ))),
        _ => Err(Error::OutOfRange(format!(
            "{lambda} lies above the computed range"
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CourantReport {
    /// 1-based eigenvector index.
    pub index: usize,
    pub eigenvalue: f64,
    pub nodal_count: usize,
    pub spectral_position: usize,
    pub sharp: bool,
}

/// Compare the nodal count of eigenvector `index` (1-based) with its spectral position.
pub fn is_courant_sharp(
    mesh: &SurfaceMesh,
    cut: &Cut,
    dofs: &DofMap,
    spectrum: &Spectrum,
    index: usize,
    zero_tol: f64,
) -> Result<CourantReport> {
    if index == 0 || index > spectrum.len() {
        return Err(Error::OutOfRange(format!(
            "eigenvector {index} of {}",
            spectrum.len()
        )));
    }
    let field = CornerField::from_spectrum(mesh, dofs, spectrum, index - 1)?;
    let nodal = nodal_domains(mesh, cut, &field, zero_tol)?;
    let lambda = spectrum.eigenvalues[index - 1];
    let pos = spectral_position(spectrum, lambda)?;
    Ok(CourantReport {
        index,
        eigenvalue: lambda,
        nodal_count: nodal.count,
        spectral_position: pos,
        sharp: nodal.count == pos,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::SolverStats;

    fn spec(vals: &[f64]) -> Spectrum {
        Spectrum {
            eigenvalues: vals.to_vec(),
            eigenvectors: vec![],
            residuals: vec![0.0; vals.len()],
            trailing: vec![],
            stats: SolverStats::default(),
        }
    }

    #[test]
    fn positions() {
        let s = spec(&[1.0, 2.0, 2.0, 3.0]);
        assert_eq!(spectral_position(&s, 2.0).unwrap(), 2);
        assert_eq!(spectral_position(&s, 3.0).unwrap(), 4);
        assert!(spectral_position(&s, 9.0).is_err());
        let split = spec(&[1.0, 5.0, 5.0 + 5e-9]);
        assert_eq!(spectral_position(&split, split.eigenvalues[2]).unwrap(), 2);
        assert_eq!(spectral_position(&split, split.eigenvalues[1]).unwrap(), 2);
    }
}
