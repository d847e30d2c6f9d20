//! Analytics for burst-driven collective-action ecosystems — hackathons and
//! the open-source activity they set off.
//!
//! The crate ingests hackathon/project/participant metadata together with
//! GitHub-Archive-style event streams, links repositories to projects, and
//! quantifies the ecosystem three ways:
//!
//! * **Thematic reach** — keyword-lexicon tagging of hackathon themes
//!   against the 17 Sustainable Development Goals, with a bias-correction
//!   vector and yearly coverage trends ([`sdg`]).
//! * **Shock-response dynamics** — activity stacked around event start
//!   dates, power-law relaxation fits of the post-peak decay with a
//!   criticality classification, and the superlinear scaling of output with
//!   team size ([`dynamics`]).
//! * **Participation structure** — discrete power-law fits of heavy-tailed
//!   engagement distributions ([`tails`]), newcomer inflow and growth
//!   statistics, and theme×technology enrichment clustering.
//!
//! Everything downstream of ingest is deterministic: fits are pure
//! functions, parallel passes reduce in a fixed order, and simulation
//! utilities take explicit seeds.

pub mod community;
pub mod dynamics;
pub mod emit;
pub mod enrich;
pub mod error;
pub mod ingest;
pub mod model;
pub mod sdg;
pub mod stats;
pub mod synth;
pub mod tails;

pub use error::{Error, Result};
