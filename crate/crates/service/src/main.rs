use std::net::SocketAddr;

use clap::Parser;
use votesim_service::{router, AppState, ServiceConfig};

#[derive(Parser)]
#[command(name = "simserve", version, about = "Serve live simulation sessions over WebSocket")]
struct Args {
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    /// Default per-connection snapshot cap; 0 disables throttling.
    #[arg(long, default_value_t = 30.0)]
    max_snapshots_per_sec: f64,
}

#[tokio::main]
async fn main() -> std::io::Result<()> {
    let args = Args::parse();
    let state = AppState::new(ServiceConfig {
        max_snapshots_per_sec: args.max_snapshots_per_sec.max(0.0),
    });
    let listener = tokio::net::TcpListener::bind(args.addr).await?;
    eprintln!("simserve listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
