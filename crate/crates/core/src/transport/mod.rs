//! Quantile transport between instrument arms and the outcome transports
//! built on its orbits.

mod map;
mod orbit;
mod tilde;

pub use map::MonotoneMap;
pub use orbit::{orbit, pi, Direction, PiOrbit, ORBIT_CAP};
pub use tilde::{t_hat_check, t_tilde, transport_family, StepKind, TransportFamily};
