"""Small shared helpers."""

from __future__ import annotations

import json


def stable_json(payload) -> str:
    """Canonical JSON used by both the CLI and the HTTP API, so identical
    queries produce byte-identical documents on either surface."""
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
