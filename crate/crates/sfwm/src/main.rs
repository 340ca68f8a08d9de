use clap::Parser;
use sfwm::Cli;

fn main() {
    let cli = Cli::parse();
    match sfwm::run(cli.command, &cli.flags) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            std::process::exit(e.stage.exit_code());
        }
    }
}
