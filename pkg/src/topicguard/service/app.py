"""HTTP surface: scoring, threshold administration, health.

The app is a thin adapter over ServiceState: domain errors map to HTTP status
codes (InputError -> 422, missing model -> 503) and nothing here mutates
anything except through ServiceState's atomic operations.
"""

from __future__ import annotations

from fastapi import Depends, FastAPI, HTTPException, Request

from topicguard.core.errors import InputError
from topicguard.service.engine import ModelNotLoadedError, ServiceState
from topicguard.service.schemas import (
    DecisionResponse,
    HealthResponse,
    ScoreRequest,
    ThresholdAck,
    ThresholdUpdate,
)

__all__ = ["create_app"]

ADMIN_TOKEN_HEADER = "x-admin-token"


def create_app(state: ServiceState | None, admin_token: str | None = None) -> FastAPI:
    """Build the service around one ServiceState (None = nothing loaded yet)."""
    app = FastAPI(title="topicguard", docs_url=None, redoc_url=None)

    def _state() -> ServiceState:
        if state is None:
            raise HTTPException(status_code=503, detail="no model loaded")
        return state

    @app.post("/v1/score", response_model=DecisionResponse)
    def score(request: ScoreRequest, live: ServiceState = Depends(_state)) -> DecisionResponse:
        try:
            decision = live.score(request.system_prompt, request.user_prompt)
        except ModelNotLoadedError as exc:
            raise HTTPException(status_code=503, detail=str(exc)) from exc
        except InputError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return DecisionResponse(**decision.to_dict())

    @app.post("/v1/admin/threshold", response_model=ThresholdAck)
    def reload_threshold(
        update: ThresholdUpdate,
        request: Request,
        live: ServiceState = Depends(_state),
    ) -> ThresholdAck:
        if admin_token is not None:
            provided = request.headers.get(ADMIN_TOKEN_HEADER)
            if provided != admin_token:
                raise HTTPException(status_code=403, detail="invalid admin token")
        try:
            previous, current = live.reload_threshold(update.threshold)
        except InputError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return ThresholdAck(previous=previous, threshold=current)

    @app.get("/healthz", response_model=HealthResponse)
    def healthz() -> HealthResponse:
        if state is None or state.cascade is None:
            return HealthResponse(status="degraded", ready=False)
        cascade = state.cascade
        secondary = cascade.secondary_model
        return HealthResponse(
            status="ok",
            ready=True,
            model_id=cascade.primary_model.model_id,
            secondary_model_id=None if secondary is None else secondary.model_id,
            threshold=state.threshold,
            cascade_enabled=cascade.enabled,
            uncertainty_band=cascade.uncertainty_band if cascade.enabled else None,
        )

    return app
