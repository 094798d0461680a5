"""Wire schemas for the scoring service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class ScoreRequest(BaseModel):
    system_prompt: str
    user_prompt: str


class DecisionResponse(BaseModel):
    p: float = Field(ge=0.0, le=1.0)
    off_topic: bool
    threshold: float = Field(ge=0.0, le=1.0)
    model_id: str
    cascade_stage: str


class ThresholdUpdate(BaseModel):
    threshold: float


class ThresholdAck(BaseModel):
    previous: float
    threshold: float


class HealthResponse(BaseModel):
    status: str
    ready: bool
    model_id: str | None = None
    secondary_model_id: str | None = None
    threshold: float | None = None
    cascade_enabled: bool = False
    uncertainty_band: tuple[float, float] | None = None
