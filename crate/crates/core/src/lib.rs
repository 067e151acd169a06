pub mod bloch;
pub mod cli;
pub mod criteria;
pub mod error;
pub mod media;
pub mod oracle;
pub mod quadrature;
pub mod tridiag;
pub mod variational;
