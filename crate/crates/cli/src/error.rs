use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] bii_core::Error),
}

impl CliError {
    /// 2 for bad flags, 3 for load failures, 4 for capacity limits.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(bii_core::Error::Capacity { .. }) => 4,
            CliError::Core(e) if e.is_load_error() => 3,
            CliError::Core(_) => 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bii_core::Error;

    #[test]
    fn exit_codes_follow_the_error_kind() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(CliError::from(Error::Argument("x".into())).exit_code(), 2);
        assert_eq!(CliError::from(Error::Model("x".into())).exit_code(), 3);
        let cap = Error::Capacity {
            what: "n",
            requested: 30,
            limit: 24,
        };
        assert_eq!(CliError::from(cap).exit_code(), 4);
    }
}
