//! Covariant quantum error correction with shared reference frames.

pub mod bounds;
pub mod channels;
pub mod codes;
pub mod harness;
pub mod linalg;
pub mod optim;
pub mod protocol;
pub mod refframe;
pub mod rep;
pub mod sdp;
