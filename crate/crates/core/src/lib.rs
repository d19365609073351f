//! Exact computations with free-field realizations of affine vertex
//! algebras over `F_p`.

pub mod characters;
pub mod error;
pub mod field;
pub mod fock;
pub mod linalg;
pub mod pcenter;
pub mod report;
pub mod root_data;
pub mod scalars;
pub mod suite;
pub mod wakimoto;
pub mod wff;

pub use characters::{AffineWeight, CharSeries};
pub use error::{Error, Result};
pub use fock::{
    Factor, Generator, GeneratorMode, ModuleKind, ModuleSpec, Monomial, SparseVector, Truncation,
};
pub use pcenter::{IotaState, PCharacter, RestrictedQuotient};
pub use report::{CheckReport, SuiteReport, TermJson, Witness};
pub use root_data::{affine_bracket, p_power, AffineElement, BasisKind, FiniteLieData};
pub use scalars::{fp_binom, fp_falling, fp_pow, Fp, KappaPoly, Prime, Scalar};
pub use suite::{run_suite, Level, Suite, SuiteConfig};
pub use wakimoto::{BabyWakimoto, WakimotoCharacter};
pub use wff::{WffRealization, WffTables};
