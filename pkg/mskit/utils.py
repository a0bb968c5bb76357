"""Utility functions for the mskit package."""

import hashlib
import json
import logging
import os
import sys
import zlib
from typing import Any

import numpy as np
from platformdirs import user_log_dir

from mskit.exceptions import ValidationError

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"


def configure_logging(quiet: bool = False, log_file: str | None = None) -> None:
    """Configure root logging for command-line use.

    Records go to stderr, since stdout carries the JSONL report, and to a log
    file in the user log directory.
    """
    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file is None:
        log_file = os.path.join(user_log_dir("mskit", ensure_exists=True), "mskit.log")
    try:
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))
    except OSError:
        # Read-only home directories still get stderr logging
        pass
    logging.basicConfig(
        level=logging.WARNING if quiet else logging.INFO,
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )


def make_rng(seed: int, *keys: str) -> np.random.Generator:
    """Return a generator determined by the run seed and a stream label.

    Independent labels give statistically independent streams, so adding a
    task to a scenario never shifts the draws of another task.
    """
    entropy = [int(seed) & 0xFFFFFFFF] + [zlib.crc32(key.encode("utf-8")) for key in keys]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def digest(payload: Any, length: int = 12) -> str:
    """Stable short digest of a JSON-compatible payload."""
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:length]


def array_digest(array: np.ndarray, length: int = 12) -> str:
    """Stable short digest of an array's raw bytes."""
    return hashlib.sha256(np.ascontiguousarray(array).tobytes()).hexdigest()[:length]


def matrix_to_json(matrix: np.ndarray) -> dict[str, list[list[float]]]:
    """Encode a complex matrix as {"re": rows, "im": rows}."""
    mat = np.atleast_2d(np.asarray(matrix, dtype=np.complex128))
    return {"re": mat.real.tolist(), "im": mat.imag.tolist()}


def matrix_from_json(payload: Any, where: str = "matrix") -> np.ndarray:
    """Decode a matrix given as {"re": rows, "im": rows} or as nested real rows."""
    try:
        if isinstance(payload, dict):
            if "re" not in payload:
                raise ValidationError(f"{where}: object form needs an 're' member")
            real = np.asarray(payload["re"], dtype=np.float64)
            imag = np.asarray(payload.get("im", np.zeros_like(real)), dtype=np.float64)
            if real.shape != imag.shape:
                raise ValidationError(f"{where}: 're' and 'im' shapes differ")
            mat = real + 1j * imag
        else:
            mat = np.asarray(payload, dtype=np.complex128)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"{where}: not a numeric matrix", str(e)) from e
    if mat.ndim != 2 or mat.size == 0:
        raise ValidationError(f"{where}: expected a nonempty two-dimensional matrix, got shape {mat.shape}")
    return mat.astype(np.complex128)


def complex_to_json(value: complex) -> list[float]:
    return [float(value.real), float(value.imag)]


def complex_from_json(payload: Any, where: str = "complex") -> complex:
    """Decode [re, im] or a bare real number."""
    if isinstance(payload, int | float):
        return complex(payload)
    if isinstance(payload, list) and len(payload) == 2 and all(isinstance(p, int | float) for p in payload):
        return complex(payload[0], payload[1])
    raise ValidationError(f"{where}: expected [re, im] or a number")
