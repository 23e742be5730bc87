use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SourceLocation {
    pub file: String,
    pub decl: String,
    /// Instruction index within `decl`.
    pub pc: usize,
}

/// A report raised through the language's error channel.
///
/// Renders as exactly three lines:
///
/// ```text
/// Error at S1
/// Cannot terminate
/// reported at H1 in s1.gcl
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ErrorReport {
    /// Innermost interpreted declaration when the error was raised.
    pub site: String,
    pub message: String,
    /// Intrinsic or declaration that raised it.
    pub reporter: String,
    pub location: SourceLocation,
}

impl fmt::Display for ErrorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Error at {}\n{}\nreported at {} in {}",
            self.site, self.message, self.reporter, self.location.file
        )
    }
}
