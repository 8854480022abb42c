pub mod algebra;
pub mod complex;
pub mod corpus;
pub mod error;
pub mod realization;
pub mod report;
pub mod return_lattice;
pub mod spectral;
pub mod substitution;

pub use algebra::{AlgebraicNumber, IntMatrix, IntPolynomial, ModulePresentation, NumberField};
pub use complex::{ApComplex, Edge, EdgeMap, HomologyAction, Tile};
pub use corpus::{example, parse_input, Example, Input, CORPUS};
pub use error::{Error, Result};
pub use realization::{Kernel, Realizer, TilingPoint, ToralPoint};
pub use report::{analyze, AnalysisReport, Options, Pipeline, Status};
pub use return_lattice::{HypRefinement, ReturnHom, ReturnLattice};
pub use spectral::{DegreeReport, ExpansionFlags, ExpansionSpec, Family};
pub use substitution::{Language, PerronData, PeriodicSeed, Substitution, Word};
