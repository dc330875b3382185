//! Energy of explicit partitions, and whether their walls carry a given cut class.

use std::collections::BTreeSet;

use cutlap::geometry::{build_disk_graded, build_rectangle, snap_curve, Identify};
use cutlap::homology::{exists_homologous_subset, Cut};
use cutlap::spectral::{partition_energy_with, EnergyOptions, Partition};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let opts = EnergyOptions {
        jobs: 0,
        ..EnergyOptions::default()
    };

    let disk = build_disk_graded(5, 3)?;
    let mut walls = BTreeSet::new();
    for deg in [90.0f64, 210.0, 330.0] {
        let (s, c) = deg.to_radians().sin_cos();
        walls.extend(snap_curve(&disk, &[[0.0, 0.0, 0.0], [c, s, 0.0]])?.edges());
    }
    let mercedes = Partition::from_walls(&disk, &walls)?;
    let e = partition_energy_with(&disk, &mercedes, &opts)?;
    println!(
        "Mercedes partition of the unit disk: Λ = {:.4} (three equal sectors: 20.1907)",
        e.energy
    );
    for p in &e.parts {
        println!(
            "  part {}: area {:.4}, λ₁ = {:.4}, {} dofs",
            p.label, p.area, p.lambda1, p.n_dofs
        );
    }

    let spoke = Cut::from_paths(
        &disk,
        [&snap_curve(&disk, &[[0.0, 0.0, 0.0], [0.0, 1.0, 0.0]])?],
    );
    let walls = mercedes.boundary_set(&disk)?;
    let subset = exists_homologous_subset(&disk, &walls, &spoke)?;
    println!(
        "  walls contain a cut homologous to one spoke: {}",
        subset.is_some()
    );

    let square = build_rectangle(1.0, 1.0, 64, 64, Identify::None)?;
    for k in [2usize, 4] {
        let labels = (0..square.num_triangles())
            .map(|t| ((square.triangle_centroid(t)[0] * k as f64).floor() as usize).min(k - 1) + 1)
            .collect();
        let strips = Partition::new(&square, labels)?;
        let e = partition_energy_with(&square, &strips, &opts)?;
        let exact = (k * k + 1) as f64 * std::f64::consts::PI.powi(2);
        println!(
            "unit square in {k} vertical strips: Λ = {:.4} (exact {exact:.4})",
            e.energy
        );
    }
    Ok(())
}
