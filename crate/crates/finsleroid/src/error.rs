use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An input violates a domain inequality; the message names the violated condition.
    #[error("domain error: {0}")]
    Domain(String),

    /// The tangent vector has b <= 0 and lies outside the b-like region.
    #[error("outside b-like region: b = {b}")]
    OutsideBLikeRegion { b: f64 },

    /// The tangent vector lies on the two-axes section (w_perp = 0 or w3 <= 0),
    /// where the metric is not differentiable.
    #[error("on axis section: wperp = {wperp}, w3 = {w3}")]
    OnAxisSection { wperp: f64, w3: f64 },

    /// Root bracketing or iteration failed; carries bracket diagnostics.
    #[error("convergence failure solving {what}: target {target}, bracket [{lo}, {hi}]")]
    Convergence {
        what: &'static str,
        target: f64,
        lo: f64,
        hi: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
