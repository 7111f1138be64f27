"""Loader for the shipped scenario fixtures (submissions keyed by scenario)."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from .submission import Submission


@lru_cache(maxsize=1)
def _load() -> dict:
    raw = resources.files("uwflow.fixtures").joinpath("fixture_submissions.json").read_text("utf-8")
    return json.loads(raw)


def list_scenarios() -> list[str]:
    return sorted(_load())


def fixture_submission(scenario_id: str) -> Submission:
    payloads = _load()
    if scenario_id not in payloads:
        raise KeyError(f"no fixture submission for scenario {scenario_id!r}")
    return Submission.from_dict(payloads[scenario_id])
