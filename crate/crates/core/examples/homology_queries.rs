//! Odd points, relative cycles and homology certificates for cuts on a disk and an annulus.

use std::collections::BTreeSet;

use cutlap::geometry::{build_annulus, build_disk, snap_curve, SurfaceMesh};
use cutlap::homology::{
    are_homologous, exists_homologous_subset, h1_rank, is_relative_cycle, odd_points,
    verify_certificate, Cut,
};

fn cut(mesh: &SurfaceMesh, curves: &[&[[f64; 3]]]) -> Result<Cut, cutlap::Error> {
    let paths = curves
        .iter()
        .map(|c| snap_curve(mesh, c))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Cut::from_paths(mesh, paths.iter()))
}

fn ray(deg: f64, r0: f64, r1: f64) -> [[f64; 3]; 2] {
    let (s, c) = deg.to_radians().sin_cos();
    [[r0 * c, r0 * s, 0.0], [r1 * c, r1 * s, 0.0]]
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let disk = build_disk(4)?;
    let mercedes = cut(
        &disk,
        &[
            &ray(90.0, 0.0, 1.0),
            &ray(210.0, 0.0, 1.0),
            &ray(330.0, 0.0, 1.0),
        ],
    )?;
    let spoke = cut(&disk, &[&ray(90.0, 0.0, 1.0)])?;
    let offset = cut(&disk, &[&[[0.0, -0.25, 0.0], [0.0, -1.0, 0.0]]])?;

    println!("disk: rank H1(M, ∂M) = {}", h1_rank(&disk));
    for (name, c) in [
        ("mercedes", &mercedes),
        ("spoke", &spoke),
        ("offset", &offset),
    ] {
        let odd: Vec<_> = odd_points(&disk, c)?
            .into_iter()
            .map(|v| disk.vertex(v))
            .collect();
        println!("  {name:<9} {} edges, odd points at {odd:?}", c.len());
    }

    for (a, b, an, bn) in [
        (&mercedes, &spoke, "mercedes", "spoke"),
        (&mercedes, &offset, "mercedes", "offset"),
    ] {
        let cert = are_homologous(&disk, a, b)?;
        let diff = a.symmetric_difference(b)?;
        println!(
            "  {an} ~ {bn}: relative cycle {}, homologous {}, certificate checks {}",
            is_relative_cycle(&disk, a, b)?,
            cert.verdict,
            verify_certificate(&disk, &diff, &cert)
        );
        if let Some(note) = &cert.obstruction_note {
            println!("    obstruction: {note}");
        }
    }

    let walls: BTreeSet<usize> = mercedes.edges().clone();
    let subset = exists_homologous_subset(&disk, &walls, &spoke)?;
    println!(
        "  the Mercedes walls contain a cut homologous to the spoke: {:?} edges",
        subset.map(|s| s.len())
    );

    let annulus = build_annulus(1.0, 2.0, 96, 16)?;
    let one = cut(&annulus, &[&ray(90.0, 1.0, 2.0)])?;
    let two = cut(&annulus, &[&ray(90.0, 1.0, 2.0), &ray(270.0, 1.0, 2.0)])?;
    let three = cut(
        &annulus,
        &[
            &ray(0.0, 1.0, 2.0),
            &ray(120.0, 1.0, 2.0),
            &ray(240.0, 1.0, 2.0),
        ],
    )?;
    println!("\nannulus: rank H1(M, ∂M) = {}", h1_rank(&annulus));
    println!(
        "  one radial ~ two radials:   {}",
        are_homologous(&annulus, &one, &two)?.verdict
    );
    println!(
        "  one radial ~ three radials: {}",
        are_homologous(&annulus, &one, &three)?.verdict
    );
    Ok(())
}
