//! Compare λ_k of a cut operator with the energies of perturbed member partitions.

use cutlap::eigen::smallest_eigenpairs;
use cutlap::geometry::{build_disk_graded, snap_curve};
use cutlap::homology::Cut;
use cutlap::operator::assemble_cut_operator;
use cutlap::scenarios::{perturbed_partitions, Family};
use cutlap::spectral::{verify_min_inequality, EnergyOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = 3;
    let disk = build_disk_graded(4, 3)?;
    let spoke = Cut::from_paths(
        &disk,
        [&snap_curve(&disk, &[[0.0, 0.0, 0.0], [0.0, 1.0, 0.0]])?],
    );
    let (km, mm, _) = assemble_cut_operator(&disk, &spoke)?;
    let lambda_k = smallest_eigenpairs(&km, &mm, k, 1e-9, 0)?.eigenvalues[k - 1];
    println!("disk with one spoke: λ{k} = {lambda_k:.4}");

    let partitions = perturbed_partitions(&disk, Family::Star, k, 8, 3, 12.0, 0.0)?;
    let report = verify_min_inequality(
        &disk,
        &spoke,
        lambda_k,
        &partitions,
        0.01,
        &EnergyOptions::default(),
    )?;
    for (i, e) in report.entries.iter().enumerate() {
        println!(
            "  star partition {i}: Λ = {:.4}  margin {:+.3}%  member {}  violation {}",
            e.energy,
            100.0 * e.margin,
            e.member,
            e.violation
        );
    }
    println!("violations: {}", report.violations());
    Ok(())
}
