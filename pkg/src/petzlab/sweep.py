"""Grid sweeps over dimension, noise strength and reference state, emitted as CSV."""

from __future__ import annotations

import csv
import io
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from . import metrics, zoo
from .petz import petz_map, verify_petz
from .qubit import accessible_ellipsoid

log = logging.getLogger(__name__)

EXPERIMENTS = (
    "distance_vs_p",
    "distance_vs_d",
    "volume_vs_p",
    "nonunitality_vs_d",
    "bloch_ellipsoids",
    "appendix_grid",
)
CHANNELS = ("dephasing", "ad", "ad_nonuniform")
MAXIMALLY_MIXED = "maximally_mixed"
HEAVY_DIM = 40
CSV_HEADER = ("experiment", "channel", "d", "p", "p2", "epsilon", "metric", "value")

Reference = Union[str, float]


class ConfigError(ValueError):
    pass


class NumericFailure(RuntimeError):
    pass


def p_range(start: float, stop: float, step: float) -> tuple[float, ...]:
    """Inclusive grid ``start, start + step, ..., stop`` rounded to 12 decimals."""
    if step <= 0:
        raise ConfigError("grid step must be positive")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    if n < 1:
        raise ConfigError(f"empty grid {start}:{stop}:{step}")
    return tuple(round(start + i * step, 12) for i in range(n))


DEFAULT_P = p_range(0.0, 1.0, 0.02)
DEFAULTS = {
    "distance_vs_p": dict(dims=(2, 3, 5, 10, 20), p_grid=DEFAULT_P),
    "distance_vs_d": dict(dims=tuple(range(2, 21)) + (30, 40), p_grid=(1.0,)),
    "volume_vs_p": dict(dims=(2,), p_grid=DEFAULT_P),
    "nonunitality_vs_d": dict(dims=tuple(range(2, 21)), p_grid=(0.3,)),
    "bloch_ellipsoids": dict(dims=(2,), p_grid=(0.3, 0.5)),
    "appendix_grid": dict(dims=(3,), p_grid=p_range(0.0, 1.0, 0.1)),
}


@dataclass(frozen=True)
class SweepConfig:
    experiment: str
    channel: str
    dims: tuple[int, ...] = ()
    p_grid: tuple[float, ...] = ()
    reference: Reference = MAXIMALLY_MIXED
    out_path: str | None = None
    heavy: bool = False
    tol: float = 1e-9
    threads: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
        if self.channel not in CHANNELS:
            raise ConfigError(f"unknown channel {self.channel!r}; choose from {', '.join(CHANNELS)}")
        defaults = DEFAULTS[self.experiment]
        dims = tuple(self.dims) or defaults["dims"]
        if self.heavy and not self.dims and self.experiment == "distance_vs_d":
            dims = dims + (60,)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "p_grid", tuple(float(p) for p in self.p_grid) or defaults["p_grid"])
        self._validate()

    def _validate(self) -> None:
        if any(int(d) != d or d < 2 for d in self.dims):
            raise ConfigError(f"dimensions must be integers >= 2, got {self.dims}")
        if any(not 0.0 <= p <= 1.0 for p in self.p_grid):
            raise ConfigError("noise strengths must lie in [0, 1]")
        big = [d for d in self.dims if d > HEAVY_DIM]
        if big and not self.heavy:
            raise ConfigError(f"dimensions {big} exceed {HEAVY_DIM}; pass --heavy to run them")
        if isinstance(self.reference, str):
            if self.reference != MAXIMALLY_MIXED:
                raise ConfigError(f"unknown reference {self.reference!r}")
        elif not 0.0 <= float(self.reference) <= 1.0:
            raise ConfigError("reference epsilon must lie in [0, 1]")
        if (self.experiment == "appendix_grid") != (self.channel == "ad_nonuniform"):
            raise ConfigError("the ad_nonuniform channel goes with (and only with) the appendix_grid experiment")
        if self.experiment == "appendix_grid" and self.dims != (3,):
            raise ConfigError("appendix_grid is defined for d = 3 only")
        if self.experiment == "bloch_ellipsoids" and set(self.dims) != {2}:
            raise ConfigError("bloch_ellipsoids is defined for d = 2 only")
        if self.tol <= 0:
            raise ConfigError("tol must be positive")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")

    def epsilon(self, d: int) -> float:
        if self.reference == MAXIMALLY_MIXED:
            return zoo.maximally_mixed_epsilon(d)
        return float(self.reference)


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    channel: str
    d: int
    p: float
    p2: float | None
    epsilon: float
    metric: str
    value: float


def _grid(cfg: SweepConfig) -> list[tuple[int, float, float | None]]:
    if cfg.experiment == "appendix_grid":
        return [(d, p, q) for d in cfg.dims for p in cfg.p_grid for q in cfg.p_grid]
    return [(d, p, None) for d in cfg.dims for p in cfg.p_grid]


def _build_channel(cfg: SweepConfig, d: int, p: float, p2: float | None):
    if cfg.channel == "dephasing":
        return zoo.dephasing(d, p)
    if cfg.channel == "ad":
        return zoo.amplitude_damping(d, p)
    return zoo.amplitude_damping_nonuniform([p, p2])


def _metrics(cfg: SweepConfig, channel, petz, composed) -> list[tuple[str, float]]:
    d = channel.dim
    exp = cfg.experiment
    if exp in ("distance_vs_p", "distance_vs_d", "appendix_grid"):
        return [("choi_distance", metrics.choi_distance(composed, zoo.identity_channel(d)))]
    if exp == "volume_vs_p":
        return [("volume_channel", metrics.volume(channel)), ("volume_composed", metrics.volume(composed))]
    if exp == "nonunitality_vs_d":
        return [
            ("nonunitality_channel", metrics.non_unitality(channel)),
            ("nonunitality_petz", metrics.non_unitality(petz.channel)),
            ("nonunitality_composed", metrics.non_unitality(composed)),
        ]
    out = []
    for label, ch in (("channel", channel), ("composed", composed)):
        ell = accessible_ellipsoid(ch)
        out += [(f"{label}_semi_axis_{i + 1}", a) for i, a in enumerate(ell.semi_axes)]
        out += [(f"{label}_center_{ax}", c) for ax, c in zip("xyz", ell.center)]
    return out


def evaluate_point(cfg: SweepConfig, d: int, p: float, p2: float | None = None) -> list[ResultRow]:
    eps = cfg.epsilon(d)
    try:
        channel = _build_channel(cfg, d, p, p2)
        petz = petz_map(channel, zoo.reference_state(d, eps))
        report = verify_petz(petz, cfg.tol)
        if not report.ok:
            raise NumericFailure(f"Petz map is not CPTP within tol={cfg.tol}: {report}")
        values = _metrics(cfg, channel, petz, petz.composed())
    except NumericFailure as exc:
        raise NumericFailure(f"{cfg.experiment} at d={d}, p={p}, p2={p2}, eps={eps}: {exc}") from exc
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        raise NumericFailure(f"{cfg.experiment} at d={d}, p={p}, p2={p2}, eps={eps}: {exc}") from exc
    rows = []
    for name, value in values:
        if not np.isfinite(value):
            raise NumericFailure(f"{cfg.experiment} at d={d}, p={p}, p2={p2}: {name} is not finite")
        rows.append(ResultRow(cfg.experiment, cfg.channel, d, p, p2, eps, name, float(value)))
    return rows


def run_sweep(cfg: SweepConfig) -> list[ResultRow]:
    """Evaluate every grid point; rows come back ordered by ``(d, p, p2, epsilon)``.

    Points are independent and run on ``cfg.threads`` worker threads. The first
    failing point aborts the sweep with a :class:`NumericFailure` naming it.
    """
    points = _grid(cfg)
    log.info("sweep %s/%s: %d points on %d thread(s)", cfg.experiment, cfg.channel, len(points), cfg.threads)
    if cfg.threads == 1:
        chunks = [evaluate_point(cfg, *pt) for pt in points]
    else:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            chunks = list(pool.map(lambda pt: evaluate_point(cfg, *pt), points))
    order = sorted(range(len(points)), key=lambda i: (points[i][0], points[i][1],
                                                      -1.0 if points[i][2] is None else points[i][2],
                                                      cfg.epsilon(points[i][0])))
    return [row for i in order for row in chunks[i]]


def _fmt(x: float | None) -> str:
    return "" if x is None else format(float(x), ".12g")


def format_csv(rows: Iterable[ResultRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([r.experiment, r.channel, r.d, _fmt(r.p), _fmt(r.p2), _fmt(r.epsilon), r.metric, _fmt(r.value)])
    return buf.getvalue()


def emit_csv(rows: Sequence[ResultRow], out_path) -> Path:
    path = Path(out_path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_csv(rows))
    return path


def resolve_threads(cli_threads: int | None) -> int:
    """``PETZLAB_THREADS`` wins over the command line; default is one thread."""
    env = os.environ.get("PETZLAB_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"PETZLAB_THREADS must be an integer, got {env!r}") from None
    return cli_threads or 1
