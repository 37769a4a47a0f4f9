//! Process exit codes and the mapping from errors to them.

use std::fmt;

use croissant_forge::health::HealthError;
use croissant_forge::records::RecordsError;
use croissant_forge::resources::ResourceError;

pub const SUCCESS: u8 = 0;
/// The document has validation errors.
pub const INVALID: u8 = 1;
/// Bad arguments, or a plan that cannot be built.
pub const USAGE: u8 = 2;
/// A document, resource or data file could not be read or verified.
pub const FETCH: u8 = 3;
pub const INTERNAL: u8 = 4;

/// A problem the user fixes by changing the invocation.
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// A document that failed validation where a valid one was required.
#[derive(Debug)]
pub struct Invalid(pub String);

impl fmt::Display for Invalid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

fn records_code(e: &RecordsError) -> u8 {
    match e {
        RecordsError::InvalidDocument(_) => INVALID,
        RecordsError::Resource(_)
        | RecordsError::Io { .. }
        | RecordsError::Table { .. }
        | RecordsError::CoercionFailed { .. }
        | RecordsError::AtRecord { .. } => FETCH,
        _ => USAGE,
    }
}

/// Exit code for an error, judged by the first recognised cause.
pub fn code_of(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Usage>() || cause.is::<clap::Error>() {
            return USAGE;
        }
        if cause.is::<Invalid>() {
            return INVALID;
        }
        if let Some(e) = cause.downcast_ref::<RecordsError>() {
            return records_code(e);
        }
        if cause.is::<ResourceError>() || cause.is::<HealthError>() || cause.is::<std::io::Error>() {
            return FETCH;
        }
    }
    INTERNAL
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        assert_eq!(code_of(&anyhow::Error::new(Usage("x".into()))), USAGE);
        let missing = std::io::Error::new(std::io::ErrorKind::NotFound, "gone");
        assert_eq!(code_of(&anyhow::Error::new(missing).context("reading x")), FETCH);
        let checksum =
            ResourceError::ChecksumMismatch { resource: "a".into(), expected: "0".into(), actual: "1".into() };
        assert_eq!(code_of(&anyhow::Error::new(RecordsError::Resource(checksum))), FETCH);
        assert_eq!(code_of(&anyhow::Error::new(RecordsError::RecordSetUnknown("r".into()))), USAGE);
        assert_eq!(code_of(&anyhow::anyhow!("boom")), INTERNAL);
    }
}
