"""On-disk table cache.

A table file looks like::

    # powerpart-table {"format_version": 1, "d": 2, "N": 10, "ring": "exact", "modulus": null, "method": "staged"}
    1
    1
    ...
    # sha256 <hex digest of the value lines>

Values are canonical decimal integers, one per line for n = 0..N. The digest
covers exactly the bytes of the value lines, newlines included. Readers verify
it before handing out any value.

Long builds write a checkpoint next to the table after DP stages complete, so
an interrupted run resumes from the last saved stage.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import pickle
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np
from filelock import FileLock

from .partitions import PartitionTable, StagedBuilder
from .series import EXACT, CoefficientRing, TruncatedSeries, ring_for

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
MAGIC = "# powerpart-table "
CHECKSUM_PREFIX = "# sha256 "
CACHE_ENV = "POWERPART_CACHE_DIR"
_CHUNK = 1 << 14


class CacheError(Exception):
    """Cache file missing, unreadable or malformed."""


class CacheCorruptError(CacheError):
    """Checksum or structure mismatch in a cache file."""


@dataclass(frozen=True)
class TableHeader:
    d: int
    order: int
    modulus: int | None
    method: str
    format_version: int = FORMAT_VERSION

    @property
    def ring_kind(self) -> str:
        return "exact" if self.modulus is None else "modular"

    def to_line(self) -> str:
        meta = {
            "format_version": self.format_version,
            "d": self.d,
            "N": self.order,
            "ring": self.ring_kind,
            "modulus": self.modulus,
            "method": self.method,
        }
        return MAGIC + json.dumps(meta) + "\n"

    @classmethod
    def from_line(cls, line: str) -> "TableHeader":
        if not line.startswith(MAGIC):
            raise CacheCorruptError("missing table header")
        try:
            meta = json.loads(line[len(MAGIC):])
            header = cls(
                d=int(meta["d"]),
                order=int(meta["N"]),
                modulus=None if meta["modulus"] is None else int(meta["modulus"]),
                method=str(meta["method"]),
                format_version=int(meta["format_version"]),
            )
        except (ValueError, KeyError, TypeError) as exc:
            raise CacheCorruptError(f"bad table header: {exc}") from exc
        if header.format_version != FORMAT_VERSION:
            raise CacheCorruptError(f"unsupported format version {header.format_version}")
        if (meta["ring"] == "exact") != (header.modulus is None):
            raise CacheCorruptError("ring kind and modulus disagree")
        return header

    def serves(self, d: int, order: int, modulus: int | None) -> bool:
        """Whether this table can answer a request for p_d(0..order) in that ring."""
        if self.d != d or self.order < order:
            return False
        if self.modulus is None:
            return True
        return modulus is not None and self.modulus % modulus == 0


def default_cache_dir() -> Path:
    return Path(os.environ.get(CACHE_ENV, "powerpart-cache"))


def table_filename(d: int, order: int, modulus: int | None) -> str:
    ring = "exact" if modulus is None else f"mod{modulus}"
    return f"p{d}_N{order}_{ring}.txt"


def table_path(cache_dir: Path, d: int, order: int, modulus: int | None) -> Path:
    return Path(cache_dir) / table_filename(d, order, modulus)


def _value_lines(values, start: int, stop: int) -> str:
    return "".join(f"{int(v)}\n" for v in values[start:stop])


def write_table(path: Path, table: PartitionTable) -> str:
    """Write ``table`` atomically and return the payload digest."""
    path = Path(path)
    header = TableHeader(table.d, table.order, table.ring.modulus, table.method)
    buf = table.series._buf
    digest = hashlib.sha256()
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="ascii", newline="\n") as fh:
        fh.write(header.to_line())
        for start in range(0, len(buf), _CHUNK):
            chunk = _value_lines(buf, start, start + _CHUNK)
            digest.update(chunk.encode("ascii"))
            fh.write(chunk)
        fh.write(f"{CHECKSUM_PREFIX}{digest.hexdigest()}\n")
    os.replace(tmp, path)
    return digest.hexdigest()


def read_header(path: Path) -> TableHeader:
    try:
        with open(path, "r", encoding="ascii", newline="\n") as fh:
            return TableHeader.from_line(fh.readline())
    except FileNotFoundError as exc:
        raise CacheError(f"no cache file at {path}") from exc
    except UnicodeDecodeError as exc:
        raise CacheCorruptError(f"{path}: not an ASCII table file") from exc


def _iter_payload(path: Path) -> Iterator[tuple[TableHeader, list[str], str | None]]:
    # yields (header, value lines, None) chunks and finally (header, [], checksum line)
    with open(path, "rb") as fh:
        first = fh.readline()
        try:
            header = TableHeader.from_line(first.decode("ascii"))
        except UnicodeDecodeError as exc:
            raise CacheCorruptError(f"{path}: header is not ASCII") from exc
        while True:
            lines = fh.readlines(1 << 20)
            if not lines:
                raise CacheCorruptError(f"{path}: missing checksum line")
            if lines[-1].startswith(CHECKSUM_PREFIX.encode()):
                yield header, lines[:-1], lines[-1].decode("ascii", "replace")
                if fh.read(1):
                    raise CacheCorruptError(f"{path}: data after checksum line")
                return
            yield header, lines, None


def read_table(path: Path) -> PartitionTable:
    """Load and verify a cache file. Raises :class:`CacheCorruptError` on any mismatch."""
    return _load(path)[0]


def _load(path: Path) -> tuple[PartitionTable, str]:
    path = Path(path)
    if not path.exists():
        raise CacheError(f"no cache file at {path}")
    digest = hashlib.sha256()
    raw: list[bytes] = []
    header = None
    stored = None
    for header, lines, checksum in _iter_payload(path):
        for line in lines:
            digest.update(line)
        raw.extend(lines)
        stored = checksum
    assert header is not None and stored is not None
    if not stored.endswith("\n") or stored[len(CHECKSUM_PREFIX):-1] != digest.hexdigest():
        raise CacheCorruptError(f"{path}: checksum mismatch")
    if len(raw) != header.order + 1:
        raise CacheCorruptError(f"{path}: expected {header.order + 1} values, found {len(raw)}")
    values = []
    for line in raw:
        text = line.decode("ascii").rstrip("\n")
        if not text or (text != "0" and text.lstrip("-").startswith("0")):
            raise CacheCorruptError(f"{path}: non-canonical value {text!r}")
        values.append(int(text))
    ring = ring_for(header.modulus)
    if ring.modulus is not None and any(v < 0 or v >= ring.modulus for v in values):
        raise CacheCorruptError(f"{path}: residue outside [0, {ring.modulus})")
    series = TruncatedSeries(ring, values)
    return PartitionTable(header.d, series, header.method), digest.hexdigest()


def verify_file(path: Path) -> str:
    """Return the payload digest after checking it against the stored one."""
    return _load(path)[1]


def find_table(cache_dir: Path, d: int, order: int, modulus: int | None) -> Path | None:
    """Locate a cache file able to serve the request, preferring the exact name."""
    cache_dir = Path(cache_dir)
    exact_name = table_path(cache_dir, d, order, modulus)
    if exact_name.exists():
        return exact_name
    if not cache_dir.is_dir():
        return None
    candidates = []
    for path in sorted(cache_dir.glob(f"p{d}_N*_*.txt")):
        try:
            header = read_header(path)
        except CacheError:
            continue
        if header.serves(d, order, modulus):
            # smallest sufficient table first; exact rings last since they are heaviest
            candidates.append((header.modulus is None, header.order, path.name, path))
    return min(candidates)[-1] if candidates else None


def restrict(table: PartitionTable, order: int, modulus: int | None) -> PartitionTable:
    """Prefix of ``table`` up to ``order``, reduced mod ``modulus`` if given."""
    series = table.series
    if order < table.order:
        series = series.truncate(order)
    if modulus is not None and series.ring.modulus != modulus:
        series = series.reduce(modulus)
    return PartitionTable(table.d, series, table.method)


# -- checkpoints -----------------------------------------------------------

def checkpoint_path(table_file: Path) -> Path:
    return Path(table_file).with_name(Path(table_file).name + ".ckpt")


def save_checkpoint(path: Path, builder: StagedBuilder) -> None:
    state = {
        "format_version": FORMAT_VERSION,
        "d": builder.d,
        "N": builder.order,
        "modulus": builder.ring.modulus,
        "completed": builder.completed,
        "buf": builder.buf,
    }
    blob = pickle.dumps(state, protocol=pickle.HIGHEST_PROTOCOL)
    tmp = Path(str(path) + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(hashlib.sha256(blob).digest())
        fh.write(blob)
    os.replace(tmp, path)


def load_checkpoint(path: Path, d: int, order: int, ring: CoefficientRing) -> StagedBuilder | None:
    """Resume state from ``path``, or ``None`` if absent, stale or damaged."""
    path = Path(path)
    if not path.exists():
        return None
    data = path.read_bytes()
    digest, blob = data[:32], data[32:]
    if hashlib.sha256(blob).digest() != digest:
        log.warning("discarding damaged checkpoint %s", path)
        return None
    state = pickle.loads(blob)
    if (state.get("format_version"), state["d"], state["N"], state["modulus"]) != (
        FORMAT_VERSION, d, order, ring.modulus
    ):
        log.warning("discarding checkpoint %s for a different build", path)
        return None
    buf = state["buf"]
    if ring.modulus is not None:
        buf = np.ascontiguousarray(buf, dtype=np.int64)
    return StagedBuilder(d, order, ring, buf=buf, completed=state["completed"])


@dataclass(frozen=True)
class BuildResult:
    path: Path
    table: PartitionTable | None
    status: str  # "cache-hit", "built" or "resumed"
    checksum: str
    seconds: float
    stages: int


def build_table(cache_dir: Path, d: int, order: int, modulus: int | None = None, *,
                checkpoint_every: float | None = 300.0, load: bool = True) -> BuildResult:
    """Compute p_d(0..order) into the cache unless a valid file already exists.

    A lock file next to the table keeps concurrent writers apart. An existing
    file with a bad checksum raises :class:`CacheCorruptError` and is left in
    place for inspection.
    """
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    path = table_path(cache_dir, d, order, modulus)
    ring = ring_for(modulus) if modulus is not None else EXACT
    started = time.perf_counter()
    with FileLock(str(path) + ".lock"):
        if path.exists():
            table, checksum = _load(path)
            if (table.d, table.order, table.ring.modulus) != (d, order, modulus):
                raise CacheCorruptError(f"{path}: header does not match its file name")
            return BuildResult(path, table if load else None, "cache-hit", checksum,
                               time.perf_counter() - started, 0)

        ckpt = checkpoint_path(path)
        builder = load_checkpoint(ckpt, d, order, ring)
        status = "resumed" if builder is not None else "built"
        if builder is None:
            builder = StagedBuilder(d, order, ring)
        else:
            log.info("resuming p_%d to N=%d at stage %d of %d",
                     d, order, builder.completed, builder.stages)
        first_stage = builder.completed
        last_save = time.monotonic()

        def on_stage(b: StagedBuilder) -> None:
            nonlocal last_save
            if checkpoint_every is not None and time.monotonic() - last_save >= checkpoint_every:
                save_checkpoint(ckpt, b)
                last_save = time.monotonic()
                log.info("checkpoint after stage %d of %d", b.completed, b.stages)

        builder.run(on_stage)
        table = builder.table()
        checksum = write_table(path, table)
        if ckpt.exists():
            ckpt.unlink()
        return BuildResult(path, table if load else None, status, checksum,
                           time.perf_counter() - started, builder.stages - first_stage)
