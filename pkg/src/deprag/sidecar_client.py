"""Client for an external dependency-parser process.

The sidecar speaks a line protocol: one JSON object {"sent_id", "text"} per
stdin line, CoNLL-U on stdout with "# sent_id = ..." comments echoing the
input ids. Any parser that honors the protocol can back the engine.
"""

from __future__ import annotations

import json
import subprocess

from .conllu import ParsedSentence, parse_conllu
from .errors import EngineError


class SidecarError(EngineError):
    """The sidecar process failed or produced unusable output."""


def run_sidecar(
    command: list[str],
    sentences: list[tuple[str, str]],
    timeout: float = 300.0,
) -> list[ParsedSentence]:
    """Parse (sent_id, text) pairs through the configured sidecar command."""
    if not sentences:
        return []
    payload = "".join(
        json.dumps({"sent_id": sid, "text": text}, ensure_ascii=False) + "\n"
        for sid, text in sentences
    )
    try:
        proc = subprocess.run(
            command,
            input=payload,
            capture_output=True,
            text=True,
            timeout=timeout,
        )
    except OSError as exc:
        raise SidecarError(f"cannot start sidecar {command!r}: {exc}") from exc
    except subprocess.TimeoutExpired as exc:
        raise SidecarError(f"sidecar timed out after {timeout}s") from exc
    if proc.returncode != 0:
        stderr = proc.stderr.strip()[:500]
        raise SidecarError(f"sidecar exited {proc.returncode}: {stderr}")
    parsed = parse_conllu(proc.stdout)
    by_id = {p.sent_id: p for p in parsed}
    # Sentences the sidecar flagged as unparseable simply drop out here;
    # the caller decides whether missing parses are an error.
    return [by_id[sid] for sid, _ in sentences if sid in by_id]
