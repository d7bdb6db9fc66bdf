//! Problem data as shareable closures of `(x, y, t)`.
//!
//! One-dimensional problems evaluate with `y = 0`; initial data with `t = 0`.

use std::fmt;
use std::sync::Arc;

#[derive(Clone)]
pub struct DataFn(Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>);

impl DataFn {
    pub fn new(f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn zero() -> Self {
        Self::new(|_, _, _| 0.0)
    }

    /// Data depending on time only.
    pub fn of_t(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(move |_, _, t| f(t))
    }

    /// Data depending on space only.
    pub fn of_x(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(move |x, _, _| f(x))
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64, t: f64) -> f64 {
        (self.0)(x, y, t)
    }
}

impl fmt::Debug for DataFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("DataFn")
    }
}
