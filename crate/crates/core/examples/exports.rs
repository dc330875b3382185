//! Write eigenvectors and a partition as VTK and SVG files.

use std::fs::File;

use cutlap::eigen::smallest_eigenpairs;
use cutlap::export::{write_svg, write_vtk, write_vtk_edges, SvgScene, VtkData};
use cutlap::geometry::{build_annulus, snap_curve};
use cutlap::homology::Cut;
use cutlap::operator::assemble_cut_operator;
use cutlap::spectral::{nodal_partition, CornerField, DEFAULT_ZERO_TOL};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map_or_else(|| std::env::temp_dir().join("cutlap-exports"), Into::into);
    std::fs::create_dir_all(&dir)?;

    let annulus = build_annulus(1.0, 2.0, 128, 24)?;
    let radial = Cut::from_paths(
        &annulus,
        [&snap_curve(&annulus, &[[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])?],
    );
    let (km, mm, dofs) = assemble_cut_operator(&annulus, &radial)?;
    let spectrum = smallest_eigenpairs(&km, &mm, 4, 1e-9, 0)?;
    let fields = (0..4)
        .map(|i| CornerField::from_spectrum(&annulus, &dofs, &spectrum, i))
        .collect::<Result<Vec<_>, _>>()?;
    let names = ["u1", "u2", "u3", "u4"];
    let data: Vec<VtkData> = names
        .iter()
        .zip(&fields)
        .map(|(n, f)| VtkData::Corner(n, f))
        .collect();
    write_vtk(
        &annulus,
        "annulus with one radial cut",
        &data,
        File::create(dir.join("annulus.vtk"))?,
    )?;
    write_vtk_edges(
        &annulus,
        "cut",
        radial.edges().iter().copied(),
        File::create(dir.join("annulus-cut.vtk"))?,
    )?;

    for (n, f) in names.iter().zip(&fields) {
        let scene = SvgScene {
            field: Some(f),
            cut: Some(&radial),
            ..SvgScene::default()
        };
        write_svg(
            &annulus,
            &scene,
            File::create(dir.join(format!("annulus-{n}.svg")))?,
        )?;
    }
    let np = nodal_partition(&annulus, &radial, &fields[1], DEFAULT_ZERO_TOL)?;
    let scene = SvgScene {
        partition: Some(&np.partition),
        wireframe: true,
        ..SvgScene::default()
    };
    write_svg(
        &np.split.mesh,
        &scene,
        File::create(dir.join("annulus-u2-nodal.svg"))?,
    )?;

    println!("λ = {:.4?}", spectrum.eigenvalues);
    println!("wrote VTK and SVG files to {}", dir.display());
    Ok(())
}
