//! Session driver, configuration, transcripts, the plaintext oracle and
//! benchmarking.

pub mod bench;
pub mod config;
pub mod oracle;
pub mod session;
pub mod transcript;

pub use config::{QuerySpec, SessionConfig};
pub use session::{run_session, SessionOutput};
pub use transcript::{verify_transcript, verify_transcript_bytes, verify_transcript_file, Transcript, Verdict};
