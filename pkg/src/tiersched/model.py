"""Cluster topology and traffic matrices for two-tier GPU clusters.

A cluster is ``n_servers`` machines with ``gpus_per_server`` GPUs each.  GPUs
inside a server talk over a fast scale-up fabric (bandwidth B1 per GPU); GPUs
in different servers talk over a slower scale-out network (bandwidth B2 per
GPU/NIC).  An All-to-All(v) workload is a square matrix of bytes, entry (g, h)
being what GPU g sends to GPU h.

The matrix splits into m x m *tiles*, one per ordered server pair.  Same-server
tiles hold intra-server traffic (total S_i per server); cross-server tiles hold
the bytes the scale-out network must carry (total T_ij per pair).  Collapsing
tiles to their totals yields the server-level matrix, whose largest
off-diagonal row or column sum (``max_rc``) divided by the server's aggregate
NIC bandwidth lower-bounds any schedule's scale-out completion time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

# Sum guard: every aggregate this package computes stays below 2^62, leaving
# int64 arithmetic exact with headroom.
MAX_SAFE_TOTAL = 1 << 62


class ValidationError(ValueError):
    """Invalid user-supplied input (topology, matrix, file, flag)."""


class InternalInvariantError(RuntimeError):
    """An internal algorithm invariant broke; the result must not be used."""


@dataclass(frozen=True)
class Topology:
    """Cluster shape and link speeds.

    scaleup_bw / scaleout_bw are bytes-per-second per GPU, full duplex.
    wakeup_delay is the fixed per-transfer-step latency in seconds.
    """

    n_servers: int
    gpus_per_server: int
    scaleup_bw: float
    scaleout_bw: float
    wakeup_delay: float = 0.0

    @property
    def gpu_count(self) -> int:
        return self.n_servers * self.gpus_per_server


def validate_topology(t: Topology) -> Topology:
    if t.n_servers < 2:
        raise ValidationError(f"n_servers must be >= 2, got {t.n_servers}")
    if t.gpus_per_server < 1:
        raise ValidationError(
            f"gpus_per_server must be >= 1, got {t.gpus_per_server}"
        )
    if not t.scaleout_bw > 0:
        raise ValidationError(f"scaleout_bw must be > 0, got {t.scaleout_bw}")
    if t.scaleup_bw < t.scaleout_bw:
        raise ValidationError(
            "scaleup_bw must be >= scaleout_bw "
            f"(got B1={t.scaleup_bw}, B2={t.scaleout_bw})"
        )
    if t.wakeup_delay < 0:
        raise ValidationError(f"wakeup_delay must be >= 0, got {t.wakeup_delay}")
    return t


@dataclass(frozen=True, eq=False)
class DemandMatrix:
    """GPU-to-GPU byte demands for one cluster shape.

    ``sizes`` is an (n*m) x (n*m) int64 array, non-negative, zero diagonal.
    """

    n_servers: int
    gpus_per_server: int
    sizes: np.ndarray

    def __post_init__(self) -> None:
        g = self.n_servers * self.gpus_per_server
        s = self.sizes
        if s.shape != (g, g):
            raise ValidationError(
                f"matrix shape {s.shape} does not match {g} GPUs"
            )
        if s.dtype != np.int64:
            raise ValidationError(f"matrix dtype must be int64, got {s.dtype}")
        if (s < 0).any():
            raise ValidationError("matrix entries must be non-negative")
        if np.diagonal(s).any():
            raise ValidationError("matrix diagonal must be zero")
        if int(s.sum()) >= MAX_SAFE_TOTAL:
            raise ValidationError("matrix total exceeds the safe integer range")

    @property
    def gpu_count(self) -> int:
        return self.n_servers * self.gpus_per_server

    def total_bytes(self) -> int:
        return int(self.sizes.sum())


@dataclass(frozen=True, eq=False)
class TileView:
    """One m x m sub-block of a DemandMatrix (a server pair's traffic).

    ``entries`` is a live view into the parent matrix: same-pair totals are
    S_i when src == dst and T_ij otherwise.
    """

    src_server: int
    dst_server: int
    entries: np.ndarray

    @property
    def is_intra(self) -> bool:
        return self.src_server == self.dst_server

    def total(self) -> int:
        return int(self.entries.sum())


@dataclass(frozen=True, eq=False)
class ServerMatrix:
    """Server-level byte totals: off-diagonal (i,j) = T_ij, diagonal = S_i.

    The diagonal is carried for reporting only; inter-server scheduling reads
    it as zero (see ``off_diagonal``).
    """

    totals: np.ndarray

    def __post_init__(self) -> None:
        t = self.totals
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise ValidationError(f"server matrix must be square, got {t.shape}")
        if t.dtype != np.int64:
            raise ValidationError(f"server matrix dtype must be int64, got {t.dtype}")
        if (t < 0).any():
            raise ValidationError("server matrix entries must be non-negative")

    @property
    def n_servers(self) -> int:
        return self.totals.shape[0]

    def off_diagonal(self) -> np.ndarray:
        """Copy of totals with the diagonal (S_i) forced to zero."""
        out = self.totals.copy()
        np.fill_diagonal(out, 0)
        return out


def tile(d: DemandMatrix, i: int, j: int) -> TileView:
    """The m x m sub-block for rows of server i, columns of server j."""
    n, m = d.n_servers, d.gpus_per_server
    if not (0 <= i < n and 0 <= j < n):
        raise ValidationError(f"server index out of range: ({i},{j}) with n={n}")
    block = d.sizes[i * m : (i + 1) * m, j * m : (j + 1) * m]
    return TileView(src_server=i, dst_server=j, entries=block)


def reduce_to_server_level(d: DemandMatrix, t: Topology) -> ServerMatrix:
    """Collapse every tile to its total: T_ij off-diagonal, S_i on it."""
    n, m = t.n_servers, t.gpus_per_server
    if (d.n_servers, d.gpus_per_server) != (n, m):
        raise ValidationError(
            f"matrix is {d.n_servers}x{d.gpus_per_server} GPUs but topology "
            f"is {n}x{m}"
        )
    totals = d.sizes.reshape(n, m, n, m).sum(axis=(1, 3))
    return ServerMatrix(totals=totals)


def max_rc(s: ServerMatrix) -> int:
    """Largest off-diagonal row or column sum — the scale-out bound witness."""
    off = s.off_diagonal()
    if off.size == 0:
        return 0
    return int(max(off.sum(axis=1).max(), off.sum(axis=0).max()))


# ---------------------------------------------------------------------------
# Matrix file formats: CSV with a "# n=<n> m=<m>" header line, or JSON
# {"n":..., "m":..., "sizes": [[...]]}.  Both reject negative entries via the
# DemandMatrix constructor.

def save_matrix(d: DemandMatrix, path: str) -> None:
    if path.endswith(".json"):
        payload = {
            "n": d.n_servers,
            "m": d.gpus_per_server,
            "sizes": d.sizes.tolist(),
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, separators=(",", ":"), sort_keys=True)
            fh.write("\n")
        return
    with open(path, "w") as fh:
        fh.write(f"# n={d.n_servers} m={d.gpus_per_server}\n")
        for row in d.sizes:
            fh.write(",".join(str(int(v)) for v in row))
            fh.write("\n")


def load_matrix(path: str) -> DemandMatrix:
    if path.endswith(".json"):
        try:
            with open(path) as fh:
                payload = json.load(fh)
        except OSError as exc:
            raise ValidationError(f"cannot read matrix file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ValidationError(f"bad matrix JSON: {exc}") from exc
        try:
            n = int(payload["n"])
            m = int(payload["m"])
            sizes = np.array(payload["sizes"], dtype=np.int64)
        except (KeyError, TypeError, OverflowError, ValueError) as exc:
            raise ValidationError(f"bad matrix JSON: {exc}") from exc
        return DemandMatrix(n_servers=n, gpus_per_server=m, sizes=sizes)
    try:
        fh = open(path)
    except OSError as exc:
        raise ValidationError(f"cannot read matrix file: {exc}") from exc
    with fh:
        header = fh.readline().strip()
        if not header.startswith("#"):
            raise ValidationError("matrix CSV must start with '# n=<n> m=<m>'")
        fields = dict(
            part.split("=") for part in header.lstrip("#").split() if "=" in part
        )
        try:
            n = int(fields["n"])
            m = int(fields["m"])
        except (KeyError, ValueError) as exc:
            raise ValidationError(f"bad matrix CSV header {header!r}") from exc
        try:
            rows = [
                [int(v) for v in line.split(",")]
                for line in fh
                if line.strip()
            ]
            sizes = np.array(rows, dtype=np.int64)
        except ValueError as exc:
            raise ValidationError(f"bad matrix CSV body: {exc}") from exc
    if sizes.ndim != 2:
        raise ValidationError("matrix CSV rows have uneven lengths")
    return DemandMatrix(n_servers=n, gpus_per_server=m, sizes=sizes)
