//! Scoped-thread parallel map honoring the FINSLEROID_THREADS cap.

/// Worker count: FINSLEROID_THREADS if set (minimum 1), else the machine's
/// available parallelism.
pub fn thread_count() -> usize {
    if let Ok(s) = std::env::var("FINSLEROID_THREADS") {
        if let Ok(n) = s.trim().parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Order-preserving parallel map over a slice.
pub fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync) -> Vec<U> {
    let n = thread_count().min(items.len().max(1));
    if n <= 1 || items.len() < 2 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(n);
    let mut out: Vec<Option<U>> = Vec::with_capacity(items.len());
    out.resize_with(items.len(), || None);
    std::thread::scope(|scope| {
        let f = &f;
        let mut rest: &mut [Option<U>] = &mut out;
        let mut handles = Vec::new();
        for c in items.chunks(chunk) {
            let (head, tail) = rest.split_at_mut(c.len());
            rest = tail;
            handles.push(scope.spawn(move || {
                for (slot, item) in head.iter_mut().zip(c) {
                    *slot = Some(f(item));
                }
            }));
        }
        for h in handles {
            h.join().expect("worker panicked");
        }
    });
    out.into_iter().map(|v| v.expect("slot filled")).collect()
}
