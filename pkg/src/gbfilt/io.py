"""Signal file I/O: CSV and WAV, with atomic writes.

CSV files carry one sample per line (UTF-8, ``.`` decimal separator, LF
line endings); a single non-numeric first line is accepted as a header.
Values are written with ``repr`` so they round-trip exactly and the files
are reproducible byte for byte.

WAV files are mono PCM via :mod:`scipy.io.wavfile`: 16-bit integer
(scaled to amplitude in [-1, 1)) and 32/64-bit float are read; writes go
out as 16-bit or 32-bit float depending on the requested kind. Every
writer lands atomically (temporary file, then rename), so a failed
command never leaves a partial output behind.
"""

from __future__ import annotations

import io as _io
import os
import tempfile

import numpy as np
import scipy.io.wavfile

from .errors import DataError
from .signals import Signal

__all__ = [
    "read_signal",
    "write_signal",
    "atomic_write_text",
    "atomic_write_bytes",
]

#: Signal file kinds: plain text, 16-bit PCM WAV, 32-bit float WAV.
KINDS = ("csv", "wav16", "wav32")


def atomic_write_bytes(path, data: bytes) -> None:
    """Write ``data`` to ``path`` through a same-directory temp file."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".gbfilt-", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def _read_csv(path) -> Signal:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().split("\n")
    except UnicodeDecodeError as exc:
        raise DataError(f"{path}: not a text file: {exc}") from exc
    values = []
    header_ok = True
    for lineno, raw in enumerate(lines, start=1):
        token = raw.strip().rstrip(",")
        if not token:
            continue
        try:
            value = float(token)
        except ValueError:
            # One leading non-numeric line is treated as a column header.
            if header_ok and not values:
                header_ok = False
                continue
            raise DataError(
                f"{path}: line {lineno}: not a number: {token!r}"
            ) from None
        if not np.isfinite(value):
            raise DataError(f"{path}: line {lineno}: non-finite sample {token!r}")
        values.append(value)
    if not values:
        raise DataError(f"{path}: no samples found")
    return Signal(np.array(values, dtype=np.float64))


def _read_wav(path) -> tuple[Signal, str]:
    try:
        rate, data = scipy.io.wavfile.read(path)
    except ValueError as exc:
        raise DataError(f"{path}: unreadable WAV file: {exc}") from exc
    if data.ndim != 1:
        raise DataError(
            f"{path}: only mono WAV is supported, file has {data.shape[1]} channels"
        )
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
        kind = "wav16"
    elif data.dtype == np.int32:
        samples = data.astype(np.float64) / 2147483648.0
        kind = "wav32"
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
        kind = "wav32"
    else:
        raise DataError(f"{path}: unsupported WAV sample format {data.dtype}")
    if len(samples) == 0:
        raise DataError(f"{path}: no samples found")
    if not np.all(np.isfinite(samples)):
        bad = int(np.flatnonzero(~np.isfinite(samples))[0])
        raise DataError(f"{path}: non-finite sample at index {bad}")
    return Signal(samples, sample_rate=float(rate)), kind


def read_signal(path) -> tuple[Signal, str]:
    """Read a signal file; returns the signal and its kind.

    ``.wav`` paths are parsed as WAV, everything else as CSV. The kind is
    one of ``"csv"``, ``"wav16"``, ``"wav32"`` and can be passed back to
    :func:`write_signal` to mirror the input format.
    """
    if not os.path.exists(path):
        raise DataError(f"{path}: no such file")
    if os.fspath(path).lower().endswith(".wav"):
        return _read_wav(path)
    return _read_csv(path), "csv"


def write_signal(path, signal: Signal, kind: str = "csv", header: str | None = None) -> None:
    """Write a signal in the requested kind (see :data:`KINDS`).

    CSV output gets an optional one-line header. WAV output requires the
    signal to carry a sample rate; 16-bit output is clipped to the
    representable amplitude range.
    """
    if kind == "csv":
        lines = [] if header is None else [header]
        lines.extend(repr(float(v)) for v in signal.samples)
        atomic_write_text(path, "\n".join(lines) + "\n")
        return
    if kind not in KINDS:
        raise DataError(f"unknown signal format {kind!r}")
    if signal.sample_rate is None:
        raise DataError("writing WAV needs a signal with a sample rate")
    rate = int(round(signal.sample_rate))
    if kind == "wav16":
        scaled = np.clip(np.rint(signal.samples * 32768.0), -32768, 32767)
        data = scaled.astype(np.int16)
    else:
        data = signal.samples.astype(np.float32)
    buf = _io.BytesIO()
    scipy.io.wavfile.write(buf, rate, data)
    atomic_write_bytes(path, buf.getvalue())
