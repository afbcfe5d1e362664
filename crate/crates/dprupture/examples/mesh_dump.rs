//! Build both blocks of a curved two-block mesh, check free-stream
//! preservation and dump the node coordinates.
//!
//! cargo run --example mesh_dump -- /tmp/mesh

use std::fs::File;
use std::path::PathBuf;

use dprupture::mesh::{CurvilinearBlock, InterfaceShape, Mapping, MetricMethod, Side};
use dprupture::sbp::{Family, SbpOperatorSet};

fn main() -> dprupture::Result<()> {
    let dir = std::env::args().nth(1).map_or_else(std::env::temp_dir, PathBuf::from);
    std::fs::create_dir_all(&dir)?;
    let n = 24;
    let ops = SbpOperatorSet::build(Family::Traditional, 4, n, None)?;
    let interface = InterfaceShape { offset: 0.0, slope: 0.3, bump: 0.05 };
    for side in [Side::Minus, Side::Plus] {
        let map = Mapping::TwoBlock { side, outer: 1.0, depth: 1.0, half_width: 0.5, interface };
        for method in [MetricMethod::Analytic, MetricMethod::Discrete] {
            let block = CurvilinearBlock::build(&map, [n + 1; 3], method)?;
            let jmin = block.jacobian().iter().cloned().fold(f64::INFINITY, f64::min);
            let residual = block.free_stream_residual(&[&ops; 3], false);
            println!("{side:?} {method:?}: min J {jmin:.4e}, free-stream residual {residual:.3e}");
        }
        let block = CurvilinearBlock::build(&map, [n + 1; 3], MetricMethod::Analytic)?;
        let path = dir.join(format!("block_{side:?}.csv").to_lowercase());
        block.write_csv(File::create(&path)?)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
