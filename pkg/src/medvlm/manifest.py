"""Run manifests: content digests of a command's inputs and outputs.

JSON artifacts are digested structurally with volatile keys (timings,
timestamps) stripped, so two runs of the same seeded command produce
manifests with equal fingerprints even though wall-clock fields differ.
"""

from __future__ import annotations

from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping

from medvlm import __version__
from medvlm.util import digest_file, digest_obj, read_json, read_jsonl, write_json

MANIFEST_NAME = "manifest.json"


def artifact_digest(path: str | Path) -> str:
    """Digest a file; structured formats are digested timing-free."""
    path = Path(path)
    if path.suffix == ".json":
        return digest_obj(read_json(path))
    if path.suffix == ".jsonl":
        return digest_obj(read_jsonl(path))
    return digest_file(path)


def build_manifest(command: str, config: Mapping,
                   inputs: Mapping[str, str | Path],
                   outputs: Mapping[str, str | Path]) -> dict:
    config = dict(config)
    manifest: dict = {
        "tool": "medvlm",
        "version": __version__,
        "command": command,
        "config": config,
        "config_digest": digest_obj(config),
        "inputs": {name: artifact_digest(p) for name, p in sorted(inputs.items())},
        "outputs": {name: artifact_digest(p) for name, p in sorted(outputs.items())},
        "created_at": datetime.now(timezone.utc).isoformat(),
    }
    manifest["fingerprint"] = digest_obj(manifest)
    return manifest


def write_manifest(out_dir: str | Path, command: str, config: Mapping,
                   inputs: Mapping[str, str | Path],
                   outputs: Mapping[str, str | Path]) -> dict:
    manifest = build_manifest(command, config, inputs, outputs)
    write_json(Path(out_dir) / MANIFEST_NAME, manifest)
    return manifest
