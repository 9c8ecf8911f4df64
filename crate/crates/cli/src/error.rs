use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorClass {
    Validation,
    Accuracy,
}

/// A failure reported as JSON on stderr.
#[derive(Debug, Clone, Serialize)]
pub struct CliError {
    pub class: ErrorClass,
    #[serde(rename = "type")]
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn validation(kind: &str, message: impl Into<String>) -> Self {
        Self { class: ErrorClass::Validation, kind: kind.into(), message: message.into() }
    }

    pub fn accuracy(kind: &str, message: impl Into<String>) -> Self {
        Self { class: ErrorClass::Accuracy, kind: kind.into(), message: message.into() }
    }

    pub fn exit_code(&self) -> u8 {
        match self.class {
            ErrorClass::Validation => 1,
            ErrorClass::Accuracy => 2,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self, "exit_code": self.exit_code() }).to_string()
    }
}

impl From<utm_heat::Error> for CliError {
    fn from(e: utm_heat::Error) -> Self {
        use utm_heat::Error as E;
        let kind = match &e {
            E::DomainViolation { .. } => "DomainViolation",
            E::TruncationUnreliable(_) => "TruncationUnreliable",
            E::Horizon { .. } => "Horizon",
            E::Overflow { .. } => "Overflow",
            E::Accuracy(_) => "Accuracy",
            E::Parameter(_) => "Parameter",
            E::UnknownEntry(_) => "UnknownEntry",
            E::PoleProximity { .. } => "PoleProximity",
            E::NonFinite { .. } => "NonFinite",
            E::MissingTrace(_) => "MissingTrace",
            E::RankCollapse { .. } => "RankCollapse",
            E::Refused(_) => "Refused",
        };
        let class = if e.is_accuracy() { ErrorClass::Accuracy } else { ErrorClass::Validation };
        Self { class, kind: kind.into(), message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::validation("Io", e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::validation("Io", e.to_string())
    }
}
