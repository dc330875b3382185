//! Nodal counts and Courant sharpness of the eigenvectors of a cut operator.

use cutlap::eigen::smallest_eigenpairs;
use cutlap::geometry::{build_rectangle, snap_curve, Identify};
use cutlap::homology::Cut;
use cutlap::operator::assemble_cut_operator;
use cutlap::spectral::{
    is_courant_sharp, nodal_domains, nodal_partition, partition_energy, CornerField,
    DEFAULT_ZERO_TOL,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (w, h) = (1.0, 0.65);
    let torus = build_rectangle(w, h, 96, 64, Identify::Both)?;
    let loop_path = snap_curve(
        &torus,
        &[[0.0, 0.0, 0.0], [0.0, h / 2.0, 0.0], [0.0, h, 0.0]],
    )?;
    let cut = Cut::from_paths(&torus, [&loop_path]);

    let (km, mm, dofs) = assemble_cut_operator(&torus, &cut)?;
    let spectrum = smallest_eigenpairs(&km, &mm, 6, 1e-9, 0)?;
    println!("torus {w}×{h} cut along one vertical loop");
    for i in 1..=spectrum.len() {
        let r = is_courant_sharp(&torus, &cut, &dofs, &spectrum, i, DEFAULT_ZERO_TOL)?;
        println!(
            "  u{i}: λ = {:>8.4}  nodal domains {}  spectral position {}  sharp {}",
            r.eigenvalue, r.nodal_count, r.spectral_position, r.sharp
        );
    }

    let field = CornerField::from_spectrum(&torus, &dofs, &spectrum, 2)?;
    let domains = nodal_domains(&torus, &cut, &field, DEFAULT_ZERO_TOL)?;
    let signs: Vec<&str> = domains
        .signs
        .iter()
        .map(|&s| if s > 0 { "+" } else { "-" })
        .collect();
    println!("\nu3 domain signs: {}", signs.join(" "));

    let np = nodal_partition(&torus, &cut, &field, DEFAULT_ZERO_TOL)?;
    let energy = partition_energy(&np.split.mesh, &np.partition)?;
    let areas = np.partition.part_areas(&np.split.mesh)?;
    println!(
        "nodal partition of u3 on the split mesh ({} triangles):",
        np.split.mesh.num_triangles()
    );
    for (p, a) in energy.parts.iter().zip(&areas) {
        println!("  part {}: area {a:.4}  λ₁ = {:.4}", p.label, p.lambda1);
    }
    println!(
        "Λ = {:.4} vs λ3 = {:.4}",
        energy.energy, spectrum.eigenvalues[2]
    );
    Ok(())
}
