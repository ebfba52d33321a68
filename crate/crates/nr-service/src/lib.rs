//! HTTP/JSON service exposing the resource-mapping engine: codec endpoints
//! for RIV/SLIV/DCI and a scenario runner with grid rendering.

use std::net::SocketAddr;

use axum::extract::Json;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tokio::net::TcpListener;
use tokio::task::JoinHandle;

use nr_core::bits::BitString;
use nr_core::dci::{self, DciConfig, DciFormatId, DciRequest, DecodedDci, FreqAlloc};
use nr_core::fdra;
use nr_core::grid::{BwpConfig, Direction, Numerology};
use nr_core::render::{render_grid, RenderFormat};
use nr_core::scenario::{run_scenario, RunError, RunReport, Scenario};
use nr_core::tdra;

/// Machine-readable error category, stable across releases. Clients map
/// these onto exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Config,
    Reschedule,
    Codec,
    NotAddressed,
}

#[derive(Debug, Error)]
#[error("{kind:?}: {message}")]
pub struct ApiError {
    pub kind: ErrorKind,
    pub message: String,
}

impl ApiError {
    fn codec(err: impl std::fmt::Display) -> Self {
        Self {
            kind: ErrorKind::Codec,
            message: err.to_string(),
        }
    }

    fn config(err: impl std::fmt::Display) -> Self {
        Self {
            kind: ErrorKind::Config,
            message: err.to_string(),
        }
    }

    fn status(&self) -> StatusCode {
        match self.kind {
            ErrorKind::Config | ErrorKind::Codec => StatusCode::UNPROCESSABLE_ENTITY,
            ErrorKind::Reschedule => StatusCode::CONFLICT,
            ErrorKind::NotAddressed => StatusCode::NOT_FOUND,
        }
    }
}

/// Wire form of an error response.
#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub kind: ErrorKind,
    pub error: String,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = self.status();
        let body = ErrorBody {
            kind: self.kind,
            error: self.message,
        };
        (status, Json(body)).into_response()
    }
}

impl From<dci::DciError> for ApiError {
    fn from(err: dci::DciError) -> Self {
        match err {
            dci::DciError::NotAddressed => Self {
                kind: ErrorKind::NotAddressed,
                message: err.to_string(),
            },
            other => Self::codec(other),
        }
    }
}

impl From<RunError> for ApiError {
    fn from(err: RunError) -> Self {
        if err.is_reschedule() {
            Self {
                kind: ErrorKind::Reschedule,
                message: err.to_string(),
            }
        } else {
            Self::config(err)
        }
    }
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FormatInfo {
    pub name: String,
    pub usage: String,
    pub field_modeled: bool,
}

async fn dci_formats() -> Json<Vec<FormatInfo>> {
    Json(
        DciFormatId::ALL
            .iter()
            .map(|f| FormatInfo {
                name: f.name().to_string(),
                usage: f.usage().to_string(),
                field_modeled: f.is_field_modeled(),
            })
            .collect(),
    )
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RivEncodeRequest {
    pub rb_start: u16,
    pub l_rbs: u16,
    pub n_size: u16,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RivEncodeResponse {
    pub riv: u32,
    pub field_bits: u32,
}

async fn riv_encode(
    Json(req): Json<RivEncodeRequest>,
) -> Result<Json<RivEncodeResponse>, ApiError> {
    let riv = fdra::riv_encode(req.rb_start, req.l_rbs, req.n_size).map_err(ApiError::codec)?;
    Ok(Json(RivEncodeResponse {
        riv,
        field_bits: fdra::type1_field_bits(req.n_size),
    }))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RivDecodeRequest {
    pub riv: u32,
    pub n_size: u16,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RivDecodeResponse {
    pub rb_start: u16,
    pub l_rbs: u16,
}

async fn riv_decode(
    Json(req): Json<RivDecodeRequest>,
) -> Result<Json<RivDecodeResponse>, ApiError> {
    let (rb_start, l_rbs) = fdra::riv_decode(req.riv, req.n_size).map_err(ApiError::codec)?;
    Ok(Json(RivDecodeResponse { rb_start, l_rbs }))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SlivEncodeRequest {
    pub start_symbol: u8,
    pub length: u8,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SlivEncodeResponse {
    pub sliv: u8,
}

async fn sliv_encode(
    Json(req): Json<SlivEncodeRequest>,
) -> Result<Json<SlivEncodeResponse>, ApiError> {
    let sliv = tdra::sliv_encode(req.start_symbol, req.length).map_err(ApiError::codec)?;
    Ok(Json(SlivEncodeResponse { sliv }))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SlivDecodeRequest {
    pub sliv: u8,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SlivDecodeResponse {
    pub start_symbol: u8,
    pub length: u8,
}

async fn sliv_decode(
    Json(req): Json<SlivDecodeRequest>,
) -> Result<Json<SlivDecodeResponse>, ApiError> {
    let (start_symbol, length) = tdra::sliv_decode(req.sliv).map_err(ApiError::codec)?;
    Ok(Json(SlivDecodeResponse { start_symbol, length }))
}

/// The BWP context a codec operation runs in; only geometry matters here.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BwpContext {
    pub crb_start: u16,
    pub size_rb: u16,
    #[serde(default)]
    pub mu: u8,
}

impl BwpContext {
    fn to_config(self) -> Result<BwpConfig, ApiError> {
        let numerology = Numerology::normal(self.mu).map_err(ApiError::config)?;
        BwpConfig::new(0, self.crb_start, self.size_rb, Direction::Dl, numerology)
            .map_err(ApiError::config)
    }
}

fn default_rbg_p() -> u16 {
    4
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DciBuildRequest {
    pub format: DciFormatId,
    pub freq: FreqAlloc,
    pub tdra_index: u8,
    #[serde(default)]
    pub bwp_indicator: Option<u8>,
    pub rnti: u16,
    pub bwp: BwpContext,
    #[serde(default = "default_rbg_p")]
    pub rbg_p: u16,
    #[serde(default)]
    pub dynamic_switch: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DciFieldInfo {
    pub name: String,
    pub width: u32,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DciBuildResponse {
    pub bits: String,
    pub hex: String,
    pub payload_bits: usize,
    pub total_bits: usize,
    pub fields: Vec<DciFieldInfo>,
}

async fn dci_build(Json(req): Json<DciBuildRequest>) -> Result<Json<DciBuildResponse>, ApiError> {
    let bwp = req.bwp.to_config()?;
    let config = DciConfig {
        rbg_p: req.rbg_p,
        dynamic_switch: req.dynamic_switch,
    };
    let request = DciRequest {
        format: req.format,
        freq: req.freq,
        tdra_index: req.tdra_index,
        bwp_indicator: req.bwp_indicator,
        rnti: req.rnti,
    };
    let message = dci::build_dci(&request, &bwp, &config)?;
    let full = message.full_bits();
    Ok(Json(DciBuildResponse {
        bits: full.to_string(),
        hex: message.to_hex(),
        payload_bits: message.payload.len(),
        total_bits: full.len(),
        fields: message
            .fields
            .iter()
            .map(|f| DciFieldInfo {
                name: f.name.clone(),
                width: f.width,
            })
            .collect(),
    }))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DciParseRequest {
    pub bits: String,
    pub format: DciFormatId,
    pub rnti: u16,
    pub bwp: BwpContext,
    #[serde(default = "default_rbg_p")]
    pub rbg_p: u16,
    #[serde(default)]
    pub dynamic_switch: bool,
}

async fn dci_parse(Json(req): Json<DciParseRequest>) -> Result<Json<DecodedDci>, ApiError> {
    let bwp = req.bwp.to_config()?;
    let config = DciConfig {
        rbg_p: req.rbg_p,
        dynamic_switch: req.dynamic_switch,
    };
    let bits: BitString = req.bits.parse().map_err(ApiError::codec)?;
    let decoded = dci::parse_dci(&bits, req.format, &bwp, &config, req.rnti)?;
    Ok(Json(decoded))
}

async fn scenario_run(Json(scenario): Json<Scenario>) -> Result<Json<RunReport>, ApiError> {
    Ok(Json(run_scenario(&scenario)?))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RenderRequest {
    pub scenario: Scenario,
    pub format: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RenderResponse {
    pub format: String,
    pub artifact: String,
    pub report: RunReport,
}

async fn scenario_render(
    Json(req): Json<RenderRequest>,
) -> Result<Json<RenderResponse>, ApiError> {
    let format: RenderFormat = req.format.parse().map_err(ApiError::config)?;
    let report = run_scenario(&req.scenario)?;
    Ok(Json(RenderResponse {
        format: req.format,
        artifact: render_grid(&report, format),
        report,
    }))
}

pub fn router() -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/dci/formats", get(dci_formats))
        .route("/codec/riv/encode", post(riv_encode))
        .route("/codec/riv/decode", post(riv_decode))
        .route("/codec/sliv/encode", post(sliv_encode))
        .route("/codec/sliv/decode", post(sliv_decode))
        .route("/codec/dci/build", post(dci_build))
        .route("/codec/dci/parse", post(dci_parse))
        .route("/scenario/run", post(scenario_run))
        .route("/scenario/render", post(scenario_render))
}

/// Serve on the given address until the task is dropped or the process exits.
pub async fn serve(addr: SocketAddr) -> std::io::Result<()> {
    let listener = TcpListener::bind(addr).await?;
    axum::serve(listener, router()).await
}

/// Bind an ephemeral port and serve in a background task. Used by tests and
/// by clients that embed the service in-process.
pub async fn bind_ephemeral() -> std::io::Result<(SocketAddr, JoinHandle<()>)> {
    let listener = TcpListener::bind(("127.0.0.1", 0)).await?;
    let addr = listener.local_addr()?;
    let handle = tokio::spawn(async move {
        let _ = axum::serve(listener, router()).await;
    });
    Ok((addr, handle))
}
