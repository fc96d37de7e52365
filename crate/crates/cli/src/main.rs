use clap::Parser;
use geomgate_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            if let Some(path) = &cli.output {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error[Io]: cannot write {}: {e}", path.display());
                    std::process::exit(1);
                }
            } else {
                print!("{text}");
            }
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            std::process::exit(e.exit_code());
        }
    }
}
