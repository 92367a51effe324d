use rayon::prelude::*;

/// Order-preserving map, parallel unless `workers == Some(1)`.
///
/// `None` uses rayon's global pool; `Some(n)` runs on a dedicated pool of `n`
/// threads. The output never depends on the worker count.
pub fn par_map<T, R, F>(workers: Option<usize>, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match workers {
        Some(0) | Some(1) => items.iter().map(f).collect(),
        None => items.par_iter().map(f).collect(),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
            Err(_) => items.iter().map(f).collect(),
        },
    }
}
