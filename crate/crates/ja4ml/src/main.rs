use clap::Parser;

fn main() {
    let cli = ja4ml::cli::Cli::parse();
    match ja4ml::cli::run(cli) {
        Ok(code) => std::process::exit(code as i32),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(ja4ml::cli::EXIT_ERROR as i32);
        }
    }
}
