// Lloyd's k-means with a seeded start and the SSE trace.

use lanestyle::kmeans::{kmeans_assign, kmeans_fit, DEFAULT_MAX_ITER};

pub fn run_example() -> lanestyle::Result<()> {
    let points: Vec<[f64; 2]> = vec![
        [0.0, 0.0], [0.2, 0.1], [0.1, 0.3],
        [5.0, 5.0], [5.2, 4.9], [4.8, 5.1],
        [9.0, 0.0], [9.1, 0.2],
    ];
    let model = kmeans_fit(&points, 3, 11, DEFAULT_MAX_ITER)?;
    println!("converged: {} after {} iterations", model.converged, model.iterations);
    println!("centers: {:?}", model.centers);
    println!("SSE trace: {:?}", model.sse_history);
    println!("[4.5, 4.5] belongs to cluster {}", kmeans_assign(&model, &[4.5, 4.5]));
    Ok(())
}

#[allow(dead_code)]
fn main() -> lanestyle::Result<()> {
    run_example()
}
