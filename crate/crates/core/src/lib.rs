//! Exact certificates for conjugated families of probability distributions
//! and the mixed-mean inequalities they imply.
//!
//! Two sequences `(P_1..P_k)`, `(Q_1..Q_m)` of rational distributions over
//! `{1..n}` are conjugated when a `k × m` grid of distributions `R_{i,j}`
//! averages to `P_i` along rows and to `Q_j` along columns. Given such a grid
//! for `P_i = D_{F_i}`, `Q_j = D_{G_j}` and an Ingham–Jessen pair `(M, N)`,
//!
//! ```text
//! N(M_{F_1}(x), …, M_{F_k}(x)) ≤ M(N_{G_1}(x), …, N_{G_m}(x))
//! ```
//!
//! holds for every `x`. The modules build such grids explicitly
//! ([`constructions`]), find them by exact linear programming ([`solver`]),
//! verify them with rational arithmetic ([`distributions`]), turn them into
//! integer repetition matrices ([`gridexpand`]) and evaluate the resulting
//! inequalities ([`verify`]).

pub mod cli;
pub mod constructions;
pub mod distributions;
pub mod error;
pub mod gridexpand;
pub mod means;
pub mod rational;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use rug::Rational;
