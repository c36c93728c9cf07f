//! Input and output plumbing shared by the subcommands.

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

/// Fetch an input document. `-` reads stdin to the end, a string starting
/// with `{` is taken as inline JSON, and anything else is read as a file
/// path.
pub fn read_document(spec: &str) -> io::Result<String> {
    let trimmed = spec.trim();
    if trimmed == "-" {
        let mut buf = String::new();
        io::stdin().read_to_string(&mut buf)?;
        Ok(buf)
    } else if trimmed.starts_with('{') {
        Ok(trimmed.to_string())
    } else {
        fs::read_to_string(trimmed)
    }
}

/// Write a document to `path`, or to stdout when no path is given.
pub fn write_document(path: Option<&Path>, content: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, content),
        None => io::stdout().write_all(content.as_bytes()),
    }
}
