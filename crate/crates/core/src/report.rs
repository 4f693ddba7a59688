use std::fmt;

/// One failed check: the axiom or identity that broke, and the tuple that
/// breaks it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub axiom: String,
    pub witness: Vec<usize>,
    pub detail: String,
}

/// Outcome of a validation pass. `is_ok()` holds iff no failure was recorded.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub failures: Vec<Failure>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn fail(&mut self, axiom: &str, witness: Vec<usize>, detail: impl Into<String>) {
        self.failures.push(Failure {
            axiom: axiom.to_string(),
            witness,
            detail: detail.into(),
        });
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.failures.extend(other.failures);
    }

    pub fn first(&self) -> Option<&Failure> {
        self.failures.first()
    }

    pub fn has(&self, axiom: &str) -> bool {
        self.failures.iter().any(|f| f.axiom == axiom)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {:?}", self.axiom, self.witness)?;
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for (i, fail) in self.failures.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{fail}")?;
        }
        Ok(())
    }
}
