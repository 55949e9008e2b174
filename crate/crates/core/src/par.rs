//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the helpers dispatch to rayon unless the
//! process-wide mode has been switched to [`Exec::Sequential`]. Without the
//! feature every helper runs sequentially. Results are always returned in
//! input order, so switching modes never changes an answer.

use std::sync::atomic::{AtomicBool, Ordering};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution strategy for the enumeration-heavy loops.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

static SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Select the execution strategy. `Parallel` is a no-op request when the
/// crate was built without the `parallel` feature.
pub fn set_exec(exec: Exec) {
    SEQUENTIAL.store(exec == Exec::Sequential, Ordering::Relaxed);
}

pub fn current_exec() -> Exec {
    if cfg!(feature = "parallel") && !SEQUENTIAL.load(Ordering::Relaxed) {
        Exec::Parallel
    } else {
        Exec::Sequential
    }
}

/// Map `f` over `0..n`, keeping every `Some` result in index order.
pub fn filter_map_range<T, F>(n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if current_exec() == Exec::Parallel {
        return (0..n).into_par_iter().filter_map(f).collect();
    }
    (0..n).filter_map(f).collect()
}

/// Map `f` over a slice, preserving order.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if current_exec() == Exec::Parallel {
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// First element (in slice order) for which `f` returns `Some`.
pub fn find_map_first<S, T, F>(items: &[S], f: F) -> Option<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if current_exec() == Exec::Parallel {
        return items.par_iter().find_map_first(f);
    }
    items.iter().find_map(f)
}

/// First index in `0..n` for which `f` returns `Some`.
pub fn find_map_range<T, F>(n: u64, f: F) -> Option<T>
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if current_exec() == Exec::Parallel {
        return (0..n).into_par_iter().find_map_first(f);
    }
    (0..n).find_map(f)
}
