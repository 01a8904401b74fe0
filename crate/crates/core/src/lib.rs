pub mod catalog;
pub mod conv;
pub mod ktheory;
pub mod scenario;
pub mod spaces;
