"""Model artifact format: parameter blob + manifest + self-verification probe.

Layout of an artifact directory:
- params.bin      raw little-endian tensor data, concatenated in sorted
                  parameter-name order
- manifest.json   format version, kind, config, checksums, parameter index
- probe.json      32 fixed (system prompt, user prompt) pairs with the
                  model's expected probabilities

Loading re-verifies both checksums and replays the probe pairs; any mismatch
is an error, never a warning.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

import numpy as np
import torch

from topicguard.classifiers.models import (
    KINDS,
    GuardrailModel,
    build_model,
    config_from_dict,
)

FORMAT_VERSION = 1
PROBE_TOLERANCE = 1e-6

_PARAMS_FILE = "params.bin"
_MANIFEST_FILE = "manifest.json"
_PROBE_FILE = "probe.json"


class ArtifactError(RuntimeError):
    """A model artifact is missing, corrupt, or from an incompatible version."""


_PROBE_SYSTEMS = (
    "You are a cooking assistant. Only answer questions about recipes and ingredients.",
    "You summarize quarterly financial reports for analysts.",
    "You are a travel visa helpdesk. Answer questions about applications and documents.",
    "You tutor high-school algebra. Stay on equations, factoring, and graphs.",
    "You are a pharmacy information bot covering dosages and interactions.",
    "You handle telecom billing questions: plans, charges, and refunds.",
    "You are a museum guide describing the exhibits in this building.",
    "You advise on vegetable gardening: soil, watering, and pests.",
)

_PROBE_USERS = (
    "How long should I simmer the sauce before serving?",
    "Can you recommend a good horror movie for tonight?",
    "What documents do I need to renew my application?",
    "Write a rap song about my cat wearing sunglasses.",
)

PROBE_PAIRS = tuple((s, u) for s in _PROBE_SYSTEMS for u in _PROBE_USERS)


def _canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _config_checksum(kind: str, config_dict: dict[str, Any]) -> str:
    return hashlib.sha256(
        _canonical_json({"kind": kind, "config": config_dict}).encode("utf-8")
    ).hexdigest()


def _write_json(path: Path, obj: Any) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def probe_predictions(model: GuardrailModel) -> list[float]:
    """The model's probabilities on the fixed probe pairs, one pair at a time."""
    return [model.predict(s, u) for s, u in PROBE_PAIRS]


def save_model(model: GuardrailModel, path: str | Path) -> Path:
    """Write the artifact directory; returns its path."""
    target = Path(path)
    target.mkdir(parents=True, exist_ok=True)

    state = model.net.state_dict()
    index = []
    blob = bytearray()
    for name in sorted(state):
        tensor = state[name].detach().cpu().contiguous()
        array = tensor.numpy()
        data = array.tobytes()
        index.append(
            {
                "name": name,
                "shape": list(array.shape),
                "dtype": str(array.dtype),
                "offset": len(blob),
                "n_bytes": len(data),
            }
        )
        blob.extend(data)
    (target / _PARAMS_FILE).write_bytes(bytes(blob))

    config_dict = model.config.to_dict()
    manifest = {
        "format_version": FORMAT_VERSION,
        "kind": model.kind,
        "config": config_dict,
        "config_checksum": _config_checksum(model.kind, config_dict),
        "params_checksum": hashlib.sha256(bytes(blob)).hexdigest(),
        "params_index": index,
    }
    _write_json(target / _MANIFEST_FILE, manifest)

    probe = {
        "pairs": [{"system_prompt": s, "user_prompt": u} for s, u in PROBE_PAIRS],
        "expected": probe_predictions(model),
    }
    _write_json(target / _PROBE_FILE, probe)
    return target


def load_model(path: str | Path) -> GuardrailModel:
    """Load and self-verify an artifact directory."""
    source = Path(path)
    manifest_path = source / _MANIFEST_FILE
    if not manifest_path.is_file():
        raise ArtifactError(f"no model manifest at {manifest_path}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))

    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise ArtifactError(f"unsupported artifact format version {version!r} (want {FORMAT_VERSION})")
    kind = manifest.get("kind")
    if kind not in KINDS:
        raise ArtifactError(f"unknown model kind tag {kind!r}")
    config_dict = manifest["config"]
    if _config_checksum(kind, config_dict) != manifest.get("config_checksum"):
        raise ArtifactError("config checksum mismatch: manifest was modified or is corrupt")

    blob = (source / _PARAMS_FILE).read_bytes()
    if hashlib.sha256(blob).hexdigest() != manifest.get("params_checksum"):
        raise ArtifactError("parameter blob checksum mismatch")

    model = build_model(kind, config_from_dict(kind, config_dict))
    state = {}
    for entry in manifest["params_index"]:
        raw = blob[entry["offset"] : entry["offset"] + entry["n_bytes"]]
        array = np.frombuffer(raw, dtype=np.dtype(entry["dtype"])).reshape(entry["shape"])
        state[entry["name"]] = torch.from_numpy(array.copy())
    try:
        model.net.load_state_dict(state, strict=True)
    except RuntimeError as exc:
        raise ArtifactError(f"parameter blob does not match the {kind} architecture: {exc}") from exc

    probe = json.loads((source / _PROBE_FILE).read_text(encoding="utf-8"))
    expected = probe["expected"]
    actual = probe_predictions(model)
    worst = max(abs(a - e) for a, e in zip(actual, expected))
    if len(expected) != len(PROBE_PAIRS) or worst > PROBE_TOLERANCE:
        raise ArtifactError(
            f"probe verification failed: max deviation {worst:.3e} exceeds {PROBE_TOLERANCE}"
        )
    return model
