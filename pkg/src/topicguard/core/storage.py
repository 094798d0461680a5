"""Line-delimited JSON persistence for prompt datasets.

File format: UTF-8, one JSON object per line with required keys
`system_prompt`, `user_prompt`, `label` (0/1) and optional `source`,
`generator_id`, `split`. Unknown keys on a line are preserved through a
round-trip. Dataset-level metadata lives in a `<path>.meta.json` sidecar so
the data file itself stays plain records.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from topicguard.core.records import (
    LabeledPair,
    PairValidationError,
    PromptDataset,
    validate_pair,
)
from topicguard.core.splitting import SPLIT_NAMES

_KNOWN_KEYS = ("system_prompt", "user_prompt", "label", "source", "generator_id", "split")


class DatasetFormatError(ValueError):
    """A dataset file violates the line-delimited record schema."""


def _meta_path(path: Path) -> Path:
    return path.with_name(path.name + ".meta.json")


def write_dataset(dataset: PromptDataset, path: str | Path) -> None:
    """Write the dataset as JSONL, plus a metadata sidecar when needed.

    Output bytes are a pure function of the dataset, so writing the same
    dataset twice produces identical files.
    """
    path = Path(path)
    extra_fields: dict[str, Any] = dict(dataset.metadata.get("extra_fields", {}))
    lines = []
    for pair in dataset.pairs:
        record = pair.to_dict()
        split = dataset.split_assignment.get(pair.pair_id)
        if split is not None:
            record["split"] = split
        for key, value in sorted(extra_fields.get(pair.pair_id, {}).items()):
            record[key] = value
        lines.append(json.dumps(record, ensure_ascii=False))
    path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")

    sidecar = {k: v for k, v in dataset.metadata.items() if k != "extra_fields"}
    meta_path = _meta_path(path)
    if sidecar:
        meta_path.write_text(
            json.dumps(sidecar, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
            encoding="utf-8",
        )
    elif meta_path.exists():
        meta_path.unlink()


def read_dataset(path: str | Path) -> PromptDataset:
    """Read a JSONL dataset file written by `write_dataset` or by hand.

    Raises DatasetFormatError naming the 1-based line number for malformed
    lines, invalid records, duplicate pair ids, or bad split names.
    """
    path = Path(path)
    pairs: list[LabeledPair] = []
    assignment: dict[str, str] = {}
    extra_fields: dict[str, dict[str, Any]] = {}
    seen: set[str] = set()

    with path.open("r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetFormatError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(record, dict):
                raise DatasetFormatError(f"line {lineno}: expected a JSON object")
            try:
                pair = validate_pair(record)
            except PairValidationError as exc:
                raise DatasetFormatError(f"line {lineno}: {exc}") from exc
            if pair.pair_id in seen:
                raise DatasetFormatError(
                    f"line {lineno}: duplicate pair_id {pair.pair_id} violates the "
                    "dedup invariant"
                )
            seen.add(pair.pair_id)
            pairs.append(pair)

            split = record.get("split")
            if split is not None:
                if split not in SPLIT_NAMES:
                    raise DatasetFormatError(f"line {lineno}: unknown split {split!r}")
                assignment[pair.pair_id] = split

            extras = {k: v for k, v in record.items() if k not in _KNOWN_KEYS}
            if extras:
                extra_fields[pair.pair_id] = extras

    metadata: dict[str, Any] = {}
    meta_path = _meta_path(path)
    if meta_path.exists():
        metadata.update(json.loads(meta_path.read_text(encoding="utf-8")))
    if extra_fields:
        metadata["extra_fields"] = extra_fields

    return PromptDataset(pairs=tuple(pairs), split_assignment=assignment, metadata=metadata)
