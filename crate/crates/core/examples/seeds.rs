//! Builds every tabulated seed on its natural cell, prints its energy at
//! (-0.28, 0.32) and writes the fields as dumps under `out/seeds`.

use std::path::Path;

use landau_tr::io::write_spectral_dump;
use landau_tr::model::energy;
use landau_tr::phases::{PhaseSeed, SeedName};
use landau_tr::ModelParams;

fn main() -> landau_tr::Result<()> {
    let p = ModelParams::new(-0.28, 0.32)?;
    let dir = Path::new("out/seeds");
    std::fs::create_dir_all(dir)?;
    for name in SeedName::ALL {
        let s = PhaseSeed::standard(name, 0.3);
        let grid = s.natural_grid(16)?.shared();
        let u = s.to_field(&grid, 0)?;
        let e = energy(&u, &p)?;
        println!("{:6} box {:7.4}  modes {:3}  E = {e:+.6e}", name.as_str(), s.box_length(), s.modes.len());
        write_spectral_dump(&dir.join(name.as_str().to_lowercase()), &u, &p, Some(e))?;
    }
    Ok(())
}
