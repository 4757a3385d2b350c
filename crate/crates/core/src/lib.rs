//! Harmonic analysis on the ring of integers of a local field.
//!
//! Two backends share one code path: the p-adic field Q_p and the Laurent
//! series field F_q((X)). Functions live on D = {|x| <= 1} and are sampled on
//! cosets of P^k.

pub mod bank;
pub mod characters;
pub mod error;
pub mod field;
pub mod function;
pub mod kernels;
pub mod maximal;
pub mod probes;
pub mod shift_invariant;
pub mod tiling;
pub mod transform;
pub mod weights;

pub use error::{Error, Result};
pub use field::{
    ball_relation, haar_measure, u_of, Ball, BallRelation, Characteristic, CosetIndex,
    FieldParams, Fq, FqElem, LocalElement, LocalField, Precision, Window,
};
pub use characters::CharacterSystem;
pub use function::{Domain, SampledFunction};
pub use transform::{fourier, inverse_fourier, FourierCoeffs};
pub use weights::{ApReport, Weight};
pub use kernels::{KernelOperator, OperatorKind};
