use std::io::Write;

fn main() {
    match ssmg::cli::run_args(std::env::args_os()) {
        Ok(report) => {
            let _ = writeln!(std::io::stdout(), "{}", report.to_json());
            eprintln!("{}: {}", report.verdict, report.summary);
            std::process::exit(report.exit_code());
        }
        Err(text) => {
            let _ = write!(std::io::stdout(), "{text}");
        }
    }
}
