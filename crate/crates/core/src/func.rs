use std::fmt;
use std::sync::Arc;

use crate::series::SchauderSeries;

/// A shareable real function on `[0,1]`. Compositions build new closures and
/// never mutate shared state, so a `Func` can be evaluated from any thread.
#[derive(Clone)]
pub struct Func(Arc<dyn Fn(f64) -> f64 + Send + Sync>);

impl Func {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Func(Arc::new(f))
    }

    pub fn constant(c: f64) -> Self {
        Func::new(move |_| c)
    }

    pub fn identity() -> Self {
        Func::new(|x| x)
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.0)(x)
    }

    /// `x ↦ g(self(x))`.
    pub fn map(&self, g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Func {
        let f = self.clone();
        Func::new(move |x| g(f.eval(x)))
    }
}

impl From<SchauderSeries> for Func {
    fn from(s: SchauderSeries) -> Self {
        Func::new(move |x| s.eval_unchecked(x.clamp(0.0, 1.0)))
    }
}

impl fmt::Debug for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Func(..)")
    }
}
