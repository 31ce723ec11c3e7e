use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let result = horncat_cli::run(std::env::args_os());
    for line in &result.diagnostics {
        eprintln!("{line}");
    }
    let text = result.render();
    let written = match &result.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| format!("cannot write to stdout: {e}")),
    };
    if let Err(msg) = written {
        eprintln!("{msg}");
        return ExitCode::from(2);
    }
    ExitCode::from(result.status.exit_code())
}
