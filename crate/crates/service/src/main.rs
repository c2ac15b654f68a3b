use std::net::SocketAddr;

use draftgame_service::{resume_stalled, router, AppState, Config, DEFAULT_PORT};

#[tokio::main]
async fn main() -> std::io::Result<()> {
    let port = match std::env::var("DRAFTGAME_PORT") {
        Ok(v) => v.parse().map_err(|_| std::io::Error::other(format!("DRAFTGAME_PORT={v:?} is not a port")))?,
        Err(_) => DEFAULT_PORT,
    };
    let state = AppState::new(Config::from_env());
    let restored = state.restore()?;
    if restored > 0 {
        eprintln!("restored {restored} sessions");
    }
    resume_stalled(&state).await;
    let addr = SocketAddr::from(([0, 0, 0, 0], port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("draftgame service listening on {addr}");
    axum::serve(listener, router(state)).await
}
