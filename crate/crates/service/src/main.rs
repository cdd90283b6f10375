use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use clap::Parser;

use riga_service::{router, Store};

/// Serves interactive elicitation sessions.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    /// Address to listen on.
    #[arg(long, env = "RIGA_LISTEN", default_value = "127.0.0.1:8080")]
    listen: SocketAddr,
    /// Directory holding one replayable record per session; sessions live
    /// in memory only when unset.
    #[arg(long, env = "RIGA_DATA_DIR")]
    data_dir: Option<PathBuf>,
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args = Args::parse();
    let store = match &args.data_dir {
        Some(dir) => {
            let (store, skipped) = Store::open(dir)?;
            for (path, reason) in skipped {
                eprintln!("skipping {}: {reason}", path.display());
            }
            eprintln!("restored {} sessions from {}", store.len(), dir.display());
            store
        }
        None => Store::in_memory(),
    };
    let listener = tokio::net::TcpListener::bind(args.listen).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(store)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
