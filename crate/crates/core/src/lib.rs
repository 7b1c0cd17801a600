//! Compilation of global entangling gates (GMS and GCZ) into distributed
//! circuits, with branch-exhaustive simulation, oracle verification and
//! entanglement-resource accounting.
//!
//! * [`state`], [`unitary`], [`gates`]: dense mixed-dimension statevectors
//!   and the gate set.
//! * [`ir`]: the distributed circuit format, validation and tallies.
//! * [`qubit`], [`qudit`]: protocol builders.
//! * [`sim`], [`verify`]: execution over all measurement branches and
//!   comparison with oracle gates.
//! * [`resources`]: closed-form costs and the time model.
//!
//! ```
//! use dqc_core::qubit::{build_dgms, GmsSpec, GmsStrategy};
//! use dqc_core::verify::{standard_inputs, verify, OracleKind, OracleSpec, VerifyOptions};
//! use dqc_core::{tally, Angle, NodeLayout};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let labels: Vec<String> = (1..=4).map(|i| format!("q{i}")).collect();
//! let layout = NodeLayout::uniform(&labels, 4, 1, 2);
//! let spec = GmsSpec::new(labels.clone(), Angle::pi_frac(1, 2))?;
//! let circuit = build_dgms(&spec, &layout, GmsStrategy::Fanout)?;
//! assert_eq!(tally(&circuit).to_string(), "1 ghz(4), 1 ghz(3), 1 ep");
//!
//! let oracle = OracleSpec::new(OracleKind::Gms(Angle::pi_frac(1, 2)), labels)?;
//! let report = verify(&circuit, &oracle, &standard_inputs(&circuit, 20, 7), &VerifyOptions::default())?;
//! assert!(report.passed);
//! # Ok(())
//! # }
//! ```

pub mod angle;
mod builder;
pub mod encoding;
pub mod gates;
pub mod identities;
pub mod ir;
pub mod qubit;
pub mod qudit;
pub mod resources;
pub mod sim;
pub mod state;
pub mod unitary;
pub mod verify;

pub use angle::Angle;
pub use gates::Gate;
pub use ir::{tally, validate, DistCircuit, NodeLayout, ResourceTally};
pub use state::{BranchResult, MixedRegister};
pub use unitary::Unitary;
