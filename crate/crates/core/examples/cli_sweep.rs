//! Drives the command-line front end in-process: a long-format CSV sweep of
//! the Dyson error over time.
fn main() {
    let code = crda::cli::main_with([
        "crda",
        "errors",
        "--which",
        "dyson",
        "--n",
        "3",
        "--delta",
        "10",
        "--sweep",
        "t",
        "--range",
        "0:0.6283185307179586",
        "--points",
        "6",
        "--format",
        "csv",
    ]);
    std::process::exit(code);
}
