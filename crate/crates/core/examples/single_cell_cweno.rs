//! One 1D CWENO reconstruction by hand: smooth data keeps the optimal
//! weights, a jump pushes the weight to the smooth side.

use cweno_amr::reconstruction::{reconstruct_1d, CwenoConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = CwenoConfig::default();
    let h = [0.1, 0.05, 0.05];
    for (label, u) in [("smooth", [0.30, 0.36, 0.40]), ("jump right", [1.0, 1.0, 0.1])] {
        let r = reconstruct_1d(u, h, &cfg)?;
        println!(
            "{label:>10}: weights {:.3?}, face values {:.4} / {:.4}",
            r.weights,
            r.poly.eval(h[1], [-0.5 * h[1], 0.0]),
            r.poly.eval(h[1], [0.5 * h[1], 0.0])
        );
    }
    Ok(())
}
