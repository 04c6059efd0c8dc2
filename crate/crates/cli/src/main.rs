use clap::Parser;

fn main() {
    let cli = cryptoherm_cli::Cli::parse();
    std::process::exit(cryptoherm_cli::execute(&cli));
}
