use clap::Parser;

fn main() {
    let cli = rdst::cli::Cli::parse();
    if let Err(e) = rdst::cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
