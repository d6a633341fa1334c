//! Drives the command-line front end in-process and prints its JSON report.

fn main() {
    let args = ["ssmg", "segment-check", "--label", "inc1", "--c", "2", "--c-next", "3"];
    match ssmg::cli::run_args(args) {
        Ok(report) => {
            println!("{}", report.to_json());
            println!("exit code {}", report.exit_code());
        }
        Err(help) => print!("{help}"),
    }
}
