//! Compare the ellipsoid gravity field against a point mass along each
//! body axis, moving outward from the surface.

use asteroid_gnc::asteroid::{ellipsoid_gravity, ellipsoid_potential, sphere_gravity, AsteroidModel};
use asteroid_gnc::math::Vec3;

fn main() -> asteroid_gnc::Result<()> {
    let model = AsteroidModel::reference();
    println!(
        "ellipsoid {} x {} x {} m, mass {:.3e} kg",
        model.a,
        model.b,
        model.c,
        model.mass()
    );
    println!("{:>4} {:>10} {:>14} {:>14} {:>10} {:>14}", "axis", "r (m)", "|g| (m/s2)", "point mass", "ratio", "potential");
    for (name, axis, semi) in [("x", Vec3::x(), model.a), ("y", Vec3::y(), model.b), ("z", Vec3::z(), model.c)] {
        for k in [1.05, 1.5, 2.0, 5.0, 20.0] {
            let r = axis * semi * k;
            let g = ellipsoid_gravity(&r, &model)?;
            let g0 = sphere_gravity(&r, model.mass())?;
            println!(
                "{name:>4} {:>10.1} {:>14.6e} {:>14.6e} {:>10.5} {:>14.6e}",
                r.norm(),
                g.norm(),
                g0.norm(),
                g.norm() / g0.norm(),
                ellipsoid_potential(&r, &model)?
            );
        }
    }
    Ok(())
}
