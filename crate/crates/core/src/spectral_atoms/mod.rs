//! Modulated band-limited atoms at arbitrary dyadic scale.

pub mod atom;
pub mod carrier;
pub mod envelope;
pub mod eval;
pub mod symbol;

pub use atom::{
    apply_symbol, atom_product, classify_ball, dyadic_block, heat_flow, make_atom, Atom, AtomError,
    AtomField, AtomVectorField, BlockClass, DyadicBlock, EnvelopeGrid, EnvelopeSymbol,
    ProductOutcome, ProductPolicy, TailBound,
};
pub use carrier::Carrier;
pub use envelope::Envelope;
pub use eval::{atom_sample, eval_probe, eval_tensor, sup_norm, Probe, SamplingSpec, SupNorm};
pub use symbol::{CarrierInfo, FreqPoint, Multiplier, Singularity};
