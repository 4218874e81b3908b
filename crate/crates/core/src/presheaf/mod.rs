//! Finite presheaf topoi, bounded host universes inside them, and the checks
//! run against the code universe built over those hosts.

pub mod cat;
pub mod checks;
pub mod host;
pub mod sheaf;

pub use cat::{CatError, Elements, FinCat, RawArrow, RawCat};
pub use host::{Code, Elem, HostConfig, Mode, Point, PresheafHost, Slice};
pub use sheaf::{enumerate_presheaves, Presheaf};
