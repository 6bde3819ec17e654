"""Monte Carlo verification campaigns.

Each mode draws independent samples and evaluates one family of checks per
sample. Every sample yields a signed margin to its tolerance (negative means
a violated invariant); the summary's ``max_violation`` is the smallest margin. Sample ``i`` is generated from ``numpy.random.default_rng([seed, i])``
so results do not depend on scheduling; rows are always ordered by index.
"""

from __future__ import annotations

import csv
import io
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .contextuality import chsh_full_value, chsh_oracle_value
from .convex_roof import optimize_convex_roof
from .entanglement import (
    f_closed,
    f_oracle,
    monogamy_check,
    pure_monotone,
    threshold_x,
)
from .qlinalg import DensityMatrix, ValidationError, eigenvalues_desc, partial_trace
from .sampling import haar_unitary, majorizing_pair, sample_bipartite_mixed, sample_mixed
from .serialization import dumps_strict

MODES = ("monogamy", "oracle-chsh", "f-agreement", "prop1", "prop3", "threshold")

BOUND_COLUMNS = [
    "index", "p1", "p2", "p3", "p4", "chsh_prime", "chsh_full", "neg", "ccnr",
    "x", "cof_x", "ecr_est", "slack_cof", "slack_tdi",
]

# per-mode acceptance tolerances
TOLERANCES = {
    "monogamy": 1e-8,
    "prop3": 1e-5,
    "oracle-chsh": 1e-4,
    "f-agreement": 1e-4,
    "prop1": 1e-12,
    "threshold": 1e-9,
}


@dataclass
class CampaignConfig:
    mode: str
    dims: tuple = (4, 4)
    n: int = 100
    seed: int = 0
    budget: int | None = None
    out: str | None = None
    format: str = "csv"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"unknown mode {self.mode!r}; choose from {MODES}")
        self.dims = tuple(int(d) for d in self.dims)
        if len(self.dims) != 2 or min(self.dims) < 1:
            raise ValidationError(f"dims must be two positive integers, got {self.dims}")
        if self.n < 1:
            raise ValidationError("sample count must be at least 1")
        if self.mode in ("monogamy", "prop3") and self.dims[0] != 4:
            raise ValidationError("CHSH modes need dA = 4")
        if self.format not in ("csv", "json"):
            raise ValidationError(f"unknown format {self.format!r}")


@dataclass
class CampaignResult:
    config: CampaignConfig
    columns: list
    rows: list
    summary: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.summary.get("failures", 0) == 0

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow(["" if row.get(c) is None else _fmt(row.get(c)) for c in self.columns])
        return buf.getvalue()

    def to_json(self) -> str:
        return dumps_strict({"config": asdict(self.config), "summary": self.summary, "rows": self.rows})


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def worker_count() -> int:
    env = os.environ.get("MONOGAMY_THREADS")
    cap = os.cpu_count() or 1
    if env:
        try:
            cap = max(1, int(env))
        except ValueError as exc:
            raise ValidationError(f"MONOGAMY_THREADS must be an integer, got {env!r}") from exc
    return cap


def _rng(cfg: CampaignConfig, i: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed & (2**64 - 1), i])


def _bound_state(cfg: CampaignConfig, i: int) -> DensityMatrix:
    dA, dB = cfg.dims
    rank = 1 + i % 4
    return sample_bipartite_mixed(dA, dB, min(rank, dA * dB), _rng(cfg, i))


def _row_monogamy(cfg, i):
    rep = monogamy_check(_bound_state(cfg, i))
    return dict(index=i, **rep.to_row()), rep.slack_cof + TOLERANCES["monogamy"]


def _row_prop3(cfg, i):
    rho = _bound_state(cfg, i)
    rep = monogamy_check(rho)
    res = optimize_convex_roof(rho, restarts=cfg.budget or 20, seed=int(_rng(cfg, i).integers(2**63)))
    rep.ecr_est = res.value
    rep.slack_tdi = 2**0.5 - res.value - rep.chsh_prime
    s_local = pure_monotone(partial_trace(rho, 0).spectrum())
    # bracket co(f)(x) <= E <= s(rho_A)
    slack = min(res.value - rep.cof_x + 1e-5, s_local + 1e-6 - res.value)
    return dict(index=i, **rep.to_row()), slack


def _row_oracle(cfg, i):
    rng = _rng(cfg, i)
    rho = sample_mixed(4, 4, rng)
    p = rho.spectrum()
    closed = chsh_full_value(p)
    oracle = chsh_oracle_value(rho, cfg.budget or 100_000, seed=int(rng.integers(2**63)))
    row = dict(index=i, p1=p[0], p2=p[1], p3=p[2], p4=p[3], chsh_full=closed, oracle=oracle,
               diff=oracle - closed)
    return row, TOLERANCES["oracle-chsh"] - abs(oracle - closed)


def _row_f(cfg, i):
    y = 1.0 + 3.0 * i / max(cfg.n - 1, 1)
    fc, fo = f_closed(y), f_oracle(y, grid=max(cfg.budget or 200, 200))
    return dict(index=i, y=y, f_closed=fc, f_oracle=fo, diff=fo - fc), TOLERANCES["f-agreement"] - abs(fo - fc)


# Schur comparisons use at most four levels: keeping the four largest entries
# of a longer spectrum does not preserve majorization order.
PROP1_MAX_LEVELS = 4


def _row_prop1(cfg, i):
    rng = _rng(cfg, i)
    d = int(rng.integers(1, PROP1_MAX_LEVELS + 1))
    q, p = majorizing_pair(d, rng)
    sp, sq = pure_monotone(p), pure_monotone(q)
    expans = abs(pure_monotone(np.append(p, 0.0)) - sp)
    U = haar_unitary(d, rng)
    rotated = eigenvalues_desc(U @ np.diag(p) @ U.conj().T)
    unitary = abs(pure_monotone(np.clip(rotated, 0, None) / np.clip(rotated, 0, None).sum()) - sp)
    pure_zero = abs(pure_monotone(np.eye(d)[0]))
    slack = min(sp - sq + 1e-12, 1e-10 - expans, 1e-10 - unitary, 1e-12 - pure_zero)
    row = dict(index=i, d=d, s_p=sp, s_q=sq, schur_gap=sp - sq, expans_err=expans,
               unitary_err=unitary, pure_zero=pure_zero)
    return row, slack


def _row_threshold(cfg, i):
    x = threshold_x()
    fx = f_closed(x)
    target = 2**0.5 - 1
    fo = f_oracle(x)
    row = dict(index=i, x_star=x, f_closed=fx, f_oracle=fo)
    slack = min(1e-9 - abs(fx - target), 1e-4 - abs(fo - target),
                min(x - 2.945, 2.955 - x))
    return row, slack


_ROWS = {
    "monogamy": (_row_monogamy, BOUND_COLUMNS),
    "prop3": (_row_prop3, BOUND_COLUMNS),
    "oracle-chsh": (_row_oracle, ["index", "p1", "p2", "p3", "p4", "chsh_full", "oracle", "diff"]),
    "f-agreement": (_row_f, ["index", "y", "f_closed", "f_oracle", "diff"]),
    "prop1": (_row_prop1, ["index", "d", "s_p", "s_q", "schur_gap", "expans_err", "unitary_err", "pure_zero"]),
    "threshold": (_row_threshold, ["index", "x_star", "f_closed", "f_oracle"]),
}


def run_campaign(config: CampaignConfig) -> CampaignResult:
    """Run every sample of ``config``, write the output file if requested."""
    func, columns = _ROWS[config.mode]
    n = 1 if config.mode == "threshold" else config.n
    t0 = time.perf_counter()
    with ThreadPoolExecutor(max_workers=min(worker_count(), n)) as pool:
        results = list(pool.map(lambda i: func(config, i), range(n)))
    rows = [r for r, _ in results]
    slacks = np.array([s for _, s in results], dtype=float)
    summary = {
        "mode": config.mode,
        "samples": n,
        "passed": int(np.sum(slacks >= 0)),
        "failures": int(np.sum(slacks < 0)),
        "max_violation": float(slacks.min()),
        "runtime_s": time.perf_counter() - t0,
    }
    if config.mode == "threshold":
        summary["x_star"] = rows[0]["x_star"]
    result = CampaignResult(config, columns, rows, summary)
    if config.out:
        text = result.to_csv() if config.format == "csv" else result.to_json()
        Path(config.out).write_text(text)
    return result


def summary_json(result: CampaignResult) -> str:
    return json.dumps(result.summary, indent=2)
