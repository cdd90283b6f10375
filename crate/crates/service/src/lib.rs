//! Interactive elicitation sessions over HTTP/JSON.
//!
//! Each session runs its elicitation on a worker thread whose decision maker
//! blocks until an answer is posted. Sessions are stored as their creation
//! request plus the answers given so far and are rebuilt by replay.

pub mod api;
pub mod context;
pub mod error;
pub mod session;
pub mod store;

pub use api::router;
pub use context::ObjectiveContext;
pub use error::ApiError;
pub use session::{
    CreateRequest, GenerateSpec, Method, Session, SessionRecord, SessionState, SessionView,
};
pub use store::Store;
