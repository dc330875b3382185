//! Build every canonical surface, refine it, and write one to disk.

use cutlap::geometry::{
    build_annulus, build_disk, build_disk_graded, build_rectangle, build_sphere, read_mesh,
    refine_with_map, write_mesh, Identify, SurfaceMesh,
};

fn describe(name: &str, m: &SurfaceMesh) {
    println!(
        "{name:<10} V={:<6} E={:<6} F={:<6} χ={:<2} boundary loops={} area={:.6}",
        m.num_vertices(),
        m.num_edges(),
        m.num_triangles(),
        m.euler_characteristic(),
        m.boundary_loops().len(),
        m.total_area()
    );
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    describe("disk", &build_disk(4)?);
    describe("graded", &build_disk_graded(4, 3)?);
    describe("sphere", &build_sphere(4)?);
    describe(
        "square",
        &build_rectangle(1.0, 1.0, 32, 32, Identify::None)?,
    );
    describe(
        "cylinder",
        &build_rectangle(1.0, 0.5, 48, 24, Identify::Horizontal)?,
    );
    describe(
        "torus",
        &build_rectangle(1.0, 0.65, 48, 32, Identify::Both)?,
    );
    describe("annulus", &build_annulus(1.0, 2.0, 96, 24)?);

    println!(
        "\nsphere area under refinement (target 4π = {:.6}):",
        4.0 * std::f64::consts::PI
    );
    for level in 0..=5 {
        println!("  level {level}: {:.6}", build_sphere(level)?.total_area());
    }

    let coarse = build_disk(2)?;
    let fine = refine_with_map(&coarse);
    let split = (0..coarse.num_edges())
        .filter(|&e| fine.edge_lift.children(e).len() == 2)
        .count();
    println!(
        "
uniform refinement of {} triangles gives {}; {split} edges split in two",
        coarse.num_triangles(),
        fine.mesh.num_triangles()
    );

    let path = std::env::temp_dir().join("cutlap-example-disk.mesh");
    write_mesh(&build_disk(3)?, std::fs::File::create(&path)?)?;
    let back = read_mesh(std::fs::File::open(&path)?)?;
    println!(
        "\nwrote {} and read back {} triangles",
        path.display(),
        back.num_triangles()
    );
    Ok(())
}
