use std::io::Write;
use std::path::Path;

use anyhow::Context;

/// Writes `text` to `path`, or to standard output when there is none.
pub fn emit(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .context("writing to standard output")?;
            stdout.flush().context("writing to standard output")
        }
    }
}
