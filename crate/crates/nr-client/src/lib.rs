//! Thin async HTTP client for the resource-mapping service.
//!
//! The wire types here mirror the service's JSON contract; the integration
//! tests run both ends against each other to catch drift.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use nr_core::dci::{DciFormatId, DecodedDci, FreqAlloc};
use nr_core::scenario::{RunReport, Scenario};

/// Error category reported by the service.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApiErrorKind {
    Config,
    Reschedule,
    Codec,
    NotAddressed,
}

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("{kind:?}: {message}")]
    Api { kind: ApiErrorKind, message: String },
    #[error("service returned status {status}: {body}")]
    UnexpectedStatus { status: u16, body: String },
    #[error(transparent)]
    Transport(#[from] reqwest::Error),
}

impl ClientError {
    pub fn kind(&self) -> Option<ApiErrorKind> {
        match self {
            Self::Api { kind, .. } => Some(*kind),
            _ => None,
        }
    }
}

#[derive(Debug, Deserialize)]
struct ErrorBody {
    kind: ApiErrorKind,
    error: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormatInfo {
    pub name: String,
    pub usage: String,
    pub field_modeled: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RivEncodeResponse {
    pub riv: u32,
    pub field_bits: u32,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RivDecodeResponse {
    pub rb_start: u16,
    pub l_rbs: u16,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SlivEncodeResponse {
    pub sliv: u8,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SlivDecodeResponse {
    pub start_symbol: u8,
    pub length: u8,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BwpContext {
    pub crb_start: u16,
    pub size_rb: u16,
    #[serde(default)]
    pub mu: u8,
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

#[derive(Debug, Serialize, Deserialize)]
pub struct RenderResponse {
    pub format: String,
    pub artifact: String,
    pub report: RunReport,
}

#[derive(Debug, Clone)]
pub struct Client {
    base: String,
    http: reqwest::Client,
}

impl Client {
    pub fn new(base_url: impl Into<String>) -> Self {
        let mut base = base_url.into();
        while base.ends_with('/') {
            base.pop();
        }
        Self {
            base,
            http: reqwest::Client::new(),
        }
    }

    async fn decode<T: DeserializeOwned>(resp: reqwest::Response) -> Result<T, ClientError> {
        let status = resp.status();
        if status.is_success() {
            return Ok(resp.json().await?);
        }
        let body = resp.text().await?;
        match serde_json::from_str::<ErrorBody>(&body) {
            Ok(e) => Err(ClientError::Api {
                kind: e.kind,
                message: e.error,
            }),
            Err(_) => Err(ClientError::UnexpectedStatus {
                status: status.as_u16(),
                body,
            }),
        }
    }

    async fn get<T: DeserializeOwned>(&self, path: &str) -> Result<T, ClientError> {
        let resp = self.http.get(format!("{}{path}", self.base)).send().await?;
        Self::decode(resp).await
    }

    async fn post<B: Serialize, T: DeserializeOwned>(
        &self,
        path: &str,
        body: &B,
    ) -> Result<T, ClientError> {
        let resp = self
            .http
            .post(format!("{}{path}", self.base))
            .json(body)
            .send()
            .await?;
        Self::decode(resp).await
    }

    pub async fn health(&self) -> Result<(), ClientError> {
        let _: serde_json::Value = self.get("/health").await?;
        Ok(())
    }

    pub async fn dci_formats(&self) -> Result<Vec<FormatInfo>, ClientError> {
        self.get("/dci/formats").await
    }

    pub async fn riv_encode(
        &self,
        rb_start: u16,
        l_rbs: u16,
        n_size: u16,
    ) -> Result<RivEncodeResponse, ClientError> {
        self.post(
            "/codec/riv/encode",
            &serde_json::json!({ "rb_start": rb_start, "l_rbs": l_rbs, "n_size": n_size }),
        )
        .await
    }

    pub async fn riv_decode(&self, riv: u32, n_size: u16) -> Result<RivDecodeResponse, ClientError> {
        self.post(
            "/codec/riv/decode",
            &serde_json::json!({ "riv": riv, "n_size": n_size }),
        )
        .await
    }

    pub async fn sliv_encode(
        &self,
        start_symbol: u8,
        length: u8,
    ) -> Result<SlivEncodeResponse, ClientError> {
        self.post(
            "/codec/sliv/encode",
            &serde_json::json!({ "start_symbol": start_symbol, "length": length }),
        )
        .await
    }

    pub async fn sliv_decode(&self, sliv: u8) -> Result<SlivDecodeResponse, ClientError> {
        self.post("/codec/sliv/decode", &serde_json::json!({ "sliv": sliv }))
            .await
    }

    pub async fn dci_build(&self, request: &DciBuildRequest) -> Result<DciBuildResponse, ClientError> {
        self.post("/codec/dci/build", request).await
    }

    pub async fn dci_parse(&self, request: &DciParseRequest) -> Result<DecodedDci, ClientError> {
        self.post("/codec/dci/parse", request).await
    }

    pub async fn run_scenario(&self, scenario: &Scenario) -> Result<RunReport, ClientError> {
        self.post("/scenario/run", scenario).await
    }

    pub async fn render(
        &self,
        scenario: &Scenario,
        format: &str,
    ) -> Result<RenderResponse, ClientError> {
        self.post(
            "/scenario/render",
            &serde_json::json!({ "scenario": scenario, "format": format }),
        )
        .await
    }
}
