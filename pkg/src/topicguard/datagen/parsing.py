"""Parsing of provider generations into labeled pairs.

Providers are asked for a bare JSON array but real models often wrap it in
prose, so extraction scans for the first balanced bracket payload. Individual
bad records are dropped; only an unusable payload fails the batch.
"""

from __future__ import annotations

import json
import logging
from typing import Any

from topicguard.core.records import LabeledPair, PairValidationError, validate_pair

logger = logging.getLogger(__name__)

_CLOSERS = {"[": "]", "{": "}"}


class GenerationParseError(ValueError):
    """The provider payload does not contain a usable JSON payload."""


def extract_json_payload(raw: str, opener: str = "[") -> Any:
    """Return the first balanced `opener...closer` JSON value found in `raw`.

    Tracks string literals and escapes, so brackets inside strings do not
    count toward nesting. Raises GenerationParseError when no balanced
    payload exists or it is not valid JSON.
    """
    closer = _CLOSERS[opener]
    start = raw.find(opener)
    if start < 0:
        raise GenerationParseError(f"no {opener!r} found in provider output")

    depth = 0
    in_string = False
    escaped = False
    for idx in range(start, len(raw)):
        ch = raw[idx]
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == opener:
            depth += 1
        elif ch == closer:
            depth -= 1
            if depth == 0:
                candidate = raw[start : idx + 1]
                try:
                    return json.loads(candidate)
                except json.JSONDecodeError as exc:
                    raise GenerationParseError(f"balanced payload is not valid JSON: {exc.msg}") from exc
    raise GenerationParseError("provider output ended before the payload closed (truncated?)")


def _coerce_flag(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.strip().lower() in ("true", "false"):
        return value.strip().lower() == "true"
    raise PairValidationError(f"off_topic flag is not a boolean: {value!r}")


def parse_generation(raw: str, generator_id: str | None = None) -> list[LabeledPair]:
    """Extract and validate labeled pairs from one provider generation.

    Each array element must carry `system_prompt`, `user_prompt`, and an
    `off_topic` marker (off-topic maps to label 1). Invalid records are
    logged and skipped.
    """
    payload = extract_json_payload(raw, "[")
    if not isinstance(payload, list):
        raise GenerationParseError("payload is not a JSON array")

    pairs: list[LabeledPair] = []
    dropped = 0
    for record in payload:
        if not isinstance(record, dict):
            dropped += 1
            continue
        try:
            flag = _coerce_flag(record.get("off_topic"))
            pairs.append(
                validate_pair(
                    {
                        "system_prompt": record.get("system_prompt", ""),
                        "user_prompt": record.get("user_prompt", ""),
                        "label": 1 if flag else 0,
                        "generator_id": generator_id,
                    }
                )
            )
        except PairValidationError as exc:
            dropped += 1
            logger.debug("dropping invalid generated record: %s", exc)
    if dropped:
        logger.warning("dropped %d invalid record(s) from a generation batch", dropped)
    return pairs
