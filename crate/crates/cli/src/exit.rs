use std::fmt;

pub(crate) const OK: u8 = 0;
pub(crate) const CERTIFICATION: u8 = 2;
pub(crate) const PARSE: u8 = 3;
pub(crate) const CONFIG: u8 = 4;

#[derive(Debug)]
pub(crate) struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn parse(message: impl Into<String>) -> Self {
        CliError { code: PARSE, message: message.into() }
    }

    pub fn config(message: impl Into<String>) -> Self {
        CliError { code: CONFIG, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<qstlab::Error> for CliError {
    fn from(e: qstlab::Error) -> Self {
        let code = match e {
            qstlab::Error::CertificationFailed { .. } => CERTIFICATION,
            qstlab::Error::Parse(_) | qstlab::Error::Json(_) => PARSE,
            _ => CONFIG,
        };
        CliError { code, message: e.to_string() }
    }
}
