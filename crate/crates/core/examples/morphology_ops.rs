// Dilation, erosion and connected components on a small voxel grid.

use lanestyle::morphology::{dilate, erode, label_components, BinaryVolume, Connectivity, SphericalKernel};

pub fn run_example() -> lanestyle::Result<()> {
    // two dots and a short bar
    let mut grid = BinaryVolume::new([21, 21, 21]);
    grid.set([4, 4, 4], true);
    grid.set([6, 4, 4], true);
    for x in 12..17 {
        grid.set([x, 15, 10], true);
    }
    let kernel = SphericalKernel::new(2);
    let grown = dilate(&grid, &kernel)?;
    let closed = erode(&grown, &SphericalKernel::new(1))?;
    println!("set cells: input {}, dilated {}, closed {}", grid.count(), grown.count(), closed.count());

    for (name, vol) in [("input", &grid), ("dilated", &grown)] {
        let c = label_components(vol, Connectivity::TwentySix);
        println!("{name}: {} components, sizes {:?}", c.count(), c.sizes);
    }
    assert!(grid.is_subset_of(&grown));
    Ok(())
}

#[allow(dead_code)]
fn main() -> lanestyle::Result<()> {
    run_example()
}
