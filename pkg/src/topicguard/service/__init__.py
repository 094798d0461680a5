"""Scoring service: decision engine, wire schemas, FastAPI app factory."""

from topicguard.service.app import create_app
from topicguard.service.engine import (
    DEFAULT_THRESHOLD,
    DEFAULT_UNCERTAINTY_BAND,
    CascadeConfig,
    GuardrailDecision,
    ModelNotLoadedError,
    ServiceState,
    decide,
)
from topicguard.service.schemas import (
    DecisionResponse,
    HealthResponse,
    ScoreRequest,
    ThresholdAck,
    ThresholdUpdate,
)

__all__ = [
    "DEFAULT_THRESHOLD",
    "DEFAULT_UNCERTAINTY_BAND",
    "CascadeConfig",
    "GuardrailDecision",
    "ModelNotLoadedError",
    "ServiceState",
    "decide",
    "create_app",
    "DecisionResponse",
    "HealthResponse",
    "ScoreRequest",
    "ThresholdAck",
    "ThresholdUpdate",
]
