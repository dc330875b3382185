//! Smallest eigenvalues of the partition Laplacian for a few cuts, against closed forms.

use std::f64::consts::PI;

use cutlap::eigen::smallest_eigenpairs;
use cutlap::geometry::{build_disk_graded, build_rectangle, snap_curve, Identify, SurfaceMesh};
use cutlap::homology::Cut;
use cutlap::operator::assemble_cut_operator;

fn report(
    name: &str,
    mesh: &SurfaceMesh,
    cut: &Cut,
    k: usize,
    exact: &[f64],
) -> cutlap::Result<()> {
    let (km, mm, dofs) = assemble_cut_operator(mesh, cut)?;
    let s = smallest_eigenpairs(&km, &mm, k, 1e-9, 1)?;
    println!(
        "{name}: {} dofs, {} iterations",
        dofs.n_dofs(),
        s.stats.iterations
    );
    for (i, lam) in s.eigenvalues.iter().enumerate() {
        let reference = exact
            .get(i)
            .map(|e| format!("exact {e:>9.4}  rel err {:+.2e}", (lam - e) / e));
        println!(
            "  λ{} = {lam:>9.4}  residual {:.1e}  {}",
            i + 1,
            s.residuals[i],
            reference.unwrap_or_default()
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let b = 1.0;
    let cyl = build_rectangle(1.0, b, 96, 96, Identify::Horizontal)?;
    // periodic in x: (2mπ)² + (nπ/b)²
    report(
        "cylinder, no cut",
        &cyl,
        &Cut::empty(&cyl),
        4,
        &[PI * PI, 4.0 * PI * PI, 5.0 * PI * PI, 5.0 * PI * PI],
    )?;

    let seam = snap_curve(&cyl, &[[0.5, 0.0, 0.0], [0.5, b, 0.0]])?;
    let vertical = Cut::from_paths(&cyl, [&seam]);
    // anti-periodic in x: (2m+1)π horizontally, nπ vertically
    let lam = |m: f64, n: f64| ((2.0 * m + 1.0) * PI).powi(2) + (n * PI / b).powi(2);
    report(
        "cylinder, vertical cut",
        &cyl,
        &vertical,
        3,
        &[lam(0.0, 1.0), lam(0.0, 1.0), lam(0.0, 2.0)],
    )?;

    let disk = build_disk_graded(4, 3)?;
    let spoke = snap_curve(&disk, &[[0.0, 0.0, 0.0], [0.0, 1.0, 0.0]])?;
    report(
        "graded disk, one spoke",
        &disk,
        &Cut::from_paths(&disk, [&spoke]),
        4,
        &[],
    )?;
    Ok(())
}
