//! Explicit solutions of the open SU(N+1) Toda system from rational curves.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cartan;
pub mod curves;
pub mod error;
pub mod hermitian;
pub mod field;
pub mod quadrature;
pub mod gauge;
