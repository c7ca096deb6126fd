use std::io::{self, BufRead, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::Parser;

use disco::oeis::{FixtureFetcher, HttpFetcher, OfflineFetcher, SequenceFetcher};
use disco::prop::GenConfig;
use disco::repl::{OutputBlock, ReplState, PROMPT};
use disco::server::{self, ServerConfig};

#[derive(Parser, Debug)]
#[command(name = "disco", version, about = "The Disco language REPL")]
struct Cli {
    /// Files to load before the prompt appears.
    files: Vec<PathBuf>,

    /// Seed for randomized property testing.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Print types and values with ASCII syntax.
    #[arg(long)]
    ascii: bool,

    /// Inputs tried per property when it cannot be checked exhaustively.
    #[arg(long, default_value_t = 100)]
    samples: u64,

    /// Largest domain a property is checked on exhaustively.
    #[arg(long, default_value_t = 10_000)]
    exhaustive_threshold: u64,

    /// Serve the HTTP session API on this port instead of running a REPL.
    #[arg(long, value_name = "PORT")]
    serve: Option<u16>,

    /// Address to bind when serving.
    #[arg(long, default_value = "127.0.0.1")]
    serve_host: IpAddr,

    /// Directory of static files served at `/`.
    #[arg(long, default_value = "static")]
    static_dir: PathBuf,

    /// Never touch the network; OEIS lookups fail softly.
    #[arg(long)]
    offline: bool,

    /// Answer OEIS queries from recorded `<query>.json` files in this directory.
    #[arg(long, value_name = "DIR")]
    oeis_fixtures: Option<PathBuf>,

    /// Load the files, run their tests, and exit (1 if any test fails).
    #[arg(long)]
    check: bool,
}

fn print_blocks(out: &mut impl Write, blocks: &[OutputBlock]) -> io::Result<()> {
    for b in blocks {
        writeln!(out, "{}", b.text)?;
    }
    Ok(())
}

fn fetcher(cli: &Cli) -> Result<Arc<dyn SequenceFetcher>, String> {
    if let Some(dir) = &cli.oeis_fixtures {
        return FixtureFetcher::from_dir(dir)
            .map(|f| Arc::new(f) as Arc<dyn SequenceFetcher>)
            .map_err(|e| e.to_string());
    }
    if cli.offline {
        Ok(Arc::new(OfflineFetcher))
    } else {
        Ok(Arc::new(HttpFetcher::new(Duration::from_secs(5))))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let fetcher = match fetcher(&cli) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("disco: {e}");
            return ExitCode::FAILURE;
        }
    };
    let gen = GenConfig {
        seed: cli.seed,
        samples: cli.samples.max(1),
        exhaustive_threshold: cli.exhaustive_threshold,
        ..GenConfig::default()
    };
    let paths: Vec<String> = cli.files.iter().map(|p| p.display().to_string()).collect();

    if let Some(port) = cli.serve {
        let mut config = ServerConfig::new(fetcher);
        config.gen = gen;
        config.unicode = !cli.ascii;
        config.static_dir = cli.static_dir.clone();
        for p in &paths {
            match std::fs::read_to_string(p) {
                Ok(src) => config.prelude.push((p.clone(), src)),
                Err(e) => {
                    eprintln!("disco: could not read {p}: {e}");
                    return ExitCode::FAILURE;
                }
            }
        }
        let addr = SocketAddr::new(cli.serve_host, port);
        let rt = tokio::runtime::Runtime::new().expect("tokio runtime");
        eprintln!("disco: serving on http://{addr}");
        return match rt.block_on(server::serve(addr, config)) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("disco: {e}");
                ExitCode::FAILURE
            }
        };
    }

    let mut st = ReplState::new(fetcher);
    st.config = gen;
    st.unicode = !cli.ascii;
    let stdout = io::stdout();
    let mut out = stdout.lock();

    if !paths.is_empty() {
        let report = st.load_paths(&paths);
        let _ = print_blocks(&mut out, &report.blocks);
        if cli.check {
            return if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    } else if cli.check {
        return ExitCode::SUCCESS;
    }

    let stdin = io::stdin();
    let mut lines = stdin.lock().lines();
    loop {
        let _ = write!(out, "{PROMPT}");
        let _ = out.flush();
        let Some(Ok(line)) = lines.next() else {
            let _ = writeln!(out);
            break;
        };
        let blocks = st.exec(&line);
        let _ = print_blocks(&mut out, &blocks);
        if st.quit_requested() {
            break;
        }
    }
    ExitCode::SUCCESS
}
