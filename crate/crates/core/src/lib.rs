//! Incidence geometry engine for the near hexagon L3 × GQ(2,2): construction,
//! exhaustive hyperplane enumeration and classification, and Veldkamp spaces.

pub mod automorphism;
pub mod check;
pub mod error;
pub mod expected;
pub mod geometries;
pub mod gf2;
pub mod hyperplanes;
pub mod incidence;
pub mod pointset;
pub mod report;
pub mod veldkamp;

pub use error::{Error, Result};
pub use incidence::IncidenceStructure;
pub use pointset::PointSet;

/// Runs `f` on a dedicated pool of `threads` workers; results do not depend
/// on the thread count.
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
