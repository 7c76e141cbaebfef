//! Cycle-accurate, digit-level model of an MSDF (online) arithmetic CNN
//! accelerator with early termination of negative activations, together
//! with a bit-serial (LSB-first) baseline and a critical-path model.
//!
//! Layering, bottom up:
//!
//! * [`sdnum`]: signed digits, digit streams, exact values.
//! * [`online`]: the online adder and serial-parallel multiplier.
//! * [`relu`]: sign monitor over the redundant SOP digits.
//! * [`pe`]: processing engines, processing blocks, max pooling.
//! * [`sip`]: bit-serial inner-product baseline.
//! * [`timing`]: critical paths from component delays.

pub mod online;
pub mod pe;
pub mod record;
pub mod relu;
pub mod sdnum;
pub mod sip;
pub mod timing;

pub use record::{ConvRunRecord, Engine};
