use thiserror::Error;

use crate::kinematics::Zone;

pub type Result<T> = std::result::Result<T, TunnelError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TunnelError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation too close to a zone edge for the requested path.
    #[error("zone edge at nsq = {nsq}: {detail}")]
    Edge { nsq: f64, detail: String },

    /// Only the tunneling zone is computed.
    #[error("{zone:?} zone is not supported (nsq = {nsq})")]
    NotSupported { zone: Zone, nsq: f64 },

    /// The 4x4 matching system had no usable pivot.
    #[error("singular matching system (rho*L = {rho_l}); use the series path")]
    SingularSystem { rho_l: f64 },

    /// Inconsistent wave-packet specification.
    #[error("packet spec error: {0}")]
    Spec(String),

    /// The peak search found no interior maximum in the time bracket.
    #[error("no interior maximum of |psi(L,t)|^2 in [{lo}, {hi}]\n{scan}")]
    Bracket { lo: f64, hi: f64, scan: String },

    /// CSV does not carry the expected columns.
    #[error("schema error: {0}")]
    Schema(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl TunnelError {
    /// Whether the error stems from bad input rather than a numerical failure.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            TunnelError::Domain(_)
                | TunnelError::Spec(_)
                | TunnelError::Schema(_)
                | TunnelError::Io(_)
        )
    }
}
