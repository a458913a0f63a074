//! Gaussian localizable-entanglement bound on a uniform bond grid.

use gpeps::network::{le_gaussian_bound, partition_along_path, BondGraph};
use gpeps::SqueezeParam;

fn main() -> gpeps::Result<()> {
    let g = BondGraph::grid(8, 8, SqueezeParam::new(1.0)?)?;
    let far = 8 * 8 - 1;
    let part = partition_along_path(&g, 0, far)?;
    part.verify(&g)?;
    println!("{} regions between the corners", part.num_regions());

    for y in 0..8 {
        let row: Vec<String> = (0..8)
            .map(|x| {
                let v = y * 8 + x;
                if v == 0 {
                    "    -   ".into()
                } else {
                    format!("{:8.2e}", le_gaussian_bound(&g, 0, v).unwrap().bound)
                }
            })
            .collect();
        println!("{}", row.join(" "));
    }

    // A weaker parallel bond never lowers the bound.
    let mut edges: Vec<_> = g.edges().collect();
    edges.push(gpeps::network::EdgeRecord { u: 0, v: 1, r: 0.3 });
    let g2 = BondGraph::from_edges(&edges)?;
    println!(
        "corner-to-corner: {:.6e}, with an extra weak bond {:.6e}",
        le_gaussian_bound(&g, 0, far)?.bound,
        le_gaussian_bound(&g2, 0, far)?.bound
    );
    Ok(())
}
