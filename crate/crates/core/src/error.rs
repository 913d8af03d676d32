use thiserror::Error;

/// Errors raised by the physics pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("divergent blockade radius: coupling Rabi frequency is zero")]
    DivergentRadius,

    #[error("singular system in {context}")]
    Singular { context: String },

    #[error("non-finite value propagated from {0}")]
    NonFinite(&'static str),

    #[error("quadrature not converged: {nodes} -> {doubled} nodes changed the integral by {change:.3e} (relative)")]
    Convergence {
        nodes: usize,
        doubled: usize,
        change: f64,
    },

    #[error("Brewster search failed: {0}")]
    Search(String),

    #[error("undefined centroid: total power is zero")]
    ZeroPower,

    #[error("transverse window too small: outer 5% holds {fraction:.3e} of the power")]
    Window { fraction: f64 },

    #[error("invalid beam: {0}")]
    InvalidBeam(String),
}

pub type Result<T> = std::result::Result<T, Error>;
