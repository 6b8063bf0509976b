//! Memoization of expensive per-base-point values (Gram matrices, fiber
//! integrals), keyed by the exact bits of the chart coordinate.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::base::{BasePoint, Chart};
use crate::scalar::{to_f64, Real};

type Key = (Chart, u64, u64);

pub(crate) struct PointCache<V> {
    map: Mutex<HashMap<Key, V>>,
}

impl<V: Clone> PointCache<V> {
    pub(crate) fn new() -> Self {
        Self {
            map: Mutex::new(HashMap::new()),
        }
    }

    pub(crate) fn get_or_try<T: Real, E>(
        &self,
        at: &BasePoint<T>,
        compute: impl FnOnce() -> Result<V, E>,
    ) -> Result<V, E> {
        let key = (
            at.chart,
            to_f64(at.z.re).to_bits(),
            to_f64(at.z.im).to_bits(),
        );
        if let Some(v) = self.map.lock().expect("cache lock").get(&key) {
            return Ok(v.clone());
        }
        let v = compute()?;
        self.map.lock().expect("cache lock").insert(key, v.clone());
        Ok(v)
    }
}
