//! Stability of pairs under SL(N+1): exact weight-polytope tests, Kempf-Ness descent,
//! Chow and Hurwitz forms of curves and hypersurfaces, Mahler measures and energy functionals.

pub mod algebraic;
pub mod descent;
pub mod energy;
pub mod elim;
pub mod error;
pub mod group;
pub mod json;
pub mod lattice;
pub mod lp;
pub mod norms;
pub mod oracle;
pub mod pair;
pub mod poly;
pub mod scalar;
pub mod variety;

pub use error::{Error, Result};

/// Run `f` on a dedicated pool of `threads` workers, or on the global pool for `None`.
///
/// Sampling streams are tied to chunk indices, so results do not depend on the worker count.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        Some(0) => Err(Error::precondition("threads must be at least 1")),
        #[cfg(feature = "parallel")]
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::precondition(format!("thread pool: {e}")))
            .map(|pool| pool.install(f)),
        _ => Ok(f()),
    }
}
