"""Parameter sweeps comparing numeric, analytic, and linear-model curves.

A sweep evaluates one model family along a grid of couplings or
nonlinearity coefficients and emits one row per grid point with every
requested method.  Rows are computed in a thread pool (the propagation
kernel releases the GIL) and assembled in grid order, so output files
are byte-identical across runs.
"""

from __future__ import annotations

import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import ddp
from .integrator import IntegratorConfig, solve
from .models import ModelKind, ModelSpec

#: numeric integration is skipped where the analytic estimate falls below
#: this floor; accumulated integration error would dominate such values
NUMERIC_FLOOR = 1e-10

CSV_HEADER = ("model,a,eps_or_n,p_numeric,p_ddp,ddp_branch,p_lz,"
              "p_asymptotic,rel_diff,tau_stop,cross_order_gap,warnings")

_METHODS = ("numeric", "ddp", "lz", "asymptotic")


@dataclass(frozen=True)
class SweepConfig:
    model_kind: ModelKind
    var: str                      # "a" or "eps"
    grid: tuple[float, ...]
    a: Optional[float] = None     # fixed coupling when var == "eps"
    eps: float = 0.0              # fixed nonlinearity when var == "a"
    n_power: int = 3
    methods: tuple[str, ...] = ("numeric", "ddp", "lz")
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    workers: int = 4

    def __post_init__(self):
        if self.var not in ("a", "eps"):
            raise ValueError("sweep variable must be 'a' or 'eps'")
        if len(self.grid) < 2:
            raise ValueError("grid needs at least 2 points")
        if list(self.grid) != sorted(self.grid):
            raise ValueError("grid must be ascending")
        if not self.methods or any(m not in _METHODS for m in self.methods):
            raise ValueError(f"methods must be a nonempty subset of {_METHODS}")
        if self.var == "eps":
            if self.model_kind not in (ModelKind.SUPERLINEAR, ModelKind.SUBLINEAR):
                raise ValueError("eps sweeps need a superlinear or sublinear model")
            if self.a is None:
                raise ValueError("eps sweeps need a fixed coupling a")

    @classmethod
    def from_range(cls, model_kind, var, lo, hi, count, **kw):
        if not lo < hi:
            raise ValueError("grid min must be < max")
        grid = tuple(float(x) for x in np.linspace(lo, hi, count))
        return cls(model_kind, var, grid, **kw)

    def model_at(self, value: float) -> ModelSpec:
        if self.var == "a":
            a, eps = value, self.eps
        else:
            a, eps = self.a, value
        kind = self.model_kind
        if kind is ModelKind.LZ:
            return ModelSpec.lz(a)
        if kind is ModelKind.SUPERLINEAR:
            return ModelSpec.superlinear(a, eps)
        if kind is ModelKind.SUBLINEAR:
            return ModelSpec.sublinear(a, eps)
        if kind is ModelKind.ESSENTIAL:
            return ModelSpec.essential(a, self.n_power)
        raise ValueError(f"cannot sweep model kind {kind}")


@dataclass
class SweepRow:
    model: str
    a: float
    eps_or_n: float
    p_numeric: Optional[float] = None
    p_ddp: Optional[float] = None
    ddp_branch: str = ""
    p_lz: Optional[float] = None
    p_asymptotic: Optional[float] = None
    rel_diff: Optional[float] = None
    tau_stop: Optional[float] = None
    cross_order_gap: Optional[float] = None
    warnings: tuple[str, ...] = ()


def _asymptotic_probability(model: ModelSpec) -> Optional[float]:
    """The perturbative/asymptotic branch curve for a model, if any."""
    if model.kind is ModelKind.SUPERLINEAR:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ddp.ValidityWarning)
            return ddp.superlinear_small_xi_expansion(model.a, model.eps)
    if model.kind is ModelKind.SUBLINEAR:
        a, eps = model.a, model.eps
        if eps == 0 or math.sqrt(2.0) * a * eps <= 1.0:
            return math.exp(-math.pi * a * a * (1.0 - 0.75 * a * a * eps * eps))
        return math.exp(-2.0 * a / eps + math.pi / (16.0 * a * eps**3))
    return None


def _compute_row(cfg: SweepConfig, value: float) -> SweepRow:
    model = cfg.model_at(value)
    n_col = float(model.n_power) if model.kind is ModelKind.ESSENTIAL else model.eps
    row = SweepRow(model=model.label, a=model.a, eps_or_n=n_col)
    warns: list[str] = []

    analytic = None
    try:
        analytic = ddp.analytic_probability(model)
    except Exception as exc:  # pragma: no cover - defensive per-row guard
        warns.append(f"error:ddp:{exc}")

    if "lz" in cfg.methods:
        row.p_lz = ddp.p_lz(model.a)
    if "ddp" in cfg.methods and analytic is not None:
        row.p_ddp = analytic.probability
        row.ddp_branch = analytic.branch.value
        warns.extend(analytic.warnings)
    if "asymptotic" in cfg.methods:
        row.p_asymptotic = _asymptotic_probability(model)

    if "numeric" in cfg.methods:
        predicted = analytic.probability if analytic is not None else ddp.p_lz(model.a)
        if predicted < NUMERIC_FLOOR:
            warns.append("below-floor")
        else:
            try:
                with warnings.catch_warnings(record=True) as caught:
                    warnings.simplefilter("always")
                    res = solve(model, cfg.integrator)
                for w in caught:
                    warns.append(f"integrator:{w.message}")
                if not res.converged:
                    warns.append("not-converged")
                row.p_numeric = res.probability
                row.tau_stop = res.stop_time
                row.cross_order_gap = res.cross_order_gap
            except Exception as exc:
                warns.append(f"error:numeric:{exc}")

    if row.p_numeric is not None and row.p_ddp is not None and row.p_numeric > 0:
        row.rel_diff = abs(row.p_numeric - row.p_ddp) / row.p_numeric
    row.warnings = tuple(warns)
    return row


def run_sweep(cfg: SweepConfig) -> list[SweepRow]:
    """One row per grid point, in grid order; per-row failures become
    warnings rather than aborting the sweep."""
    if cfg.workers <= 1:
        return [_compute_row(cfg, v) for v in cfg.grid]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        futures = [pool.submit(_compute_row, cfg, v) for v in cfg.grid]
        return [f.result() for f in futures]


def compare_report(rows: Sequence[SweepRow]) -> dict:
    """Numeric-vs-analytic deviation summary, split by analytic branch."""
    if not rows:
        raise ValueError("compare_report needs at least one row")
    by_branch: dict[str, list[float]] = {}
    for row in rows:
        if (row.p_numeric is not None and row.p_ddp is not None
                and row.p_numeric >= NUMERIC_FLOOR and row.rel_diff is not None):
            by_branch.setdefault(row.ddp_branch, []).append(row.rel_diff)
    report = {
        "n_rows": len(rows),
        "n_warned": sum(1 for r in rows if r.warnings),
        "no_comparable_rows": not by_branch,
        "branches": {},
    }
    for branch, devs in sorted(by_branch.items()):
        report["branches"][branch] = {
            "count": len(devs),
            "max_rel_diff": max(devs),
            "median_rel_diff": float(np.median(devs)),
        }
    return report


def _fmt(x: Optional[float]) -> str:
    return "" if x is None else f"{x:.16e}"


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join([
            r.model, _fmt(r.a), _fmt(r.eps_or_n), _fmt(r.p_numeric),
            _fmt(r.p_ddp), r.ddp_branch, _fmt(r.p_lz), _fmt(r.p_asymptotic),
            _fmt(r.rel_diff), _fmt(r.tau_stop), _fmt(r.cross_order_gap),
            ";".join(r.warnings),
        ]))
    return "\n".join(lines) + "\n"


def rows_to_jsonl(rows: Sequence[SweepRow]) -> str:
    lines = []
    for r in rows:
        lines.append(json.dumps({
            "model": r.model, "a": r.a, "eps_or_n": r.eps_or_n,
            "p_numeric": r.p_numeric, "p_ddp": r.p_ddp,
            "ddp_branch": r.ddp_branch, "p_lz": r.p_lz,
            "p_asymptotic": r.p_asymptotic, "rel_diff": r.rel_diff,
            "tau_stop": r.tau_stop, "cross_order_gap": r.cross_order_gap,
            "warnings": list(r.warnings),
        }))
    return "\n".join(lines) + "\n"


def write_rows(rows: Sequence[SweepRow], path: str, fmt: str = "csv") -> None:
    if fmt == "csv":
        text = rows_to_csv(rows)
    elif fmt == "jsonl":
        text = rows_to_jsonl(rows)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    with open(path, "w", newline="") as fh:
        fh.write(text)


# -- named figure-reproduction presets ----------------------------------------

def preset_configs(name: str, workers: int = 4) -> list[SweepConfig]:
    """Grids behind the named comparison datasets.

    fig2/fig3 sweep the coupling for the superlinear/sublinear models at
    eps = 0.25; fig4 sweeps the nonlinearity for both perturbative models
    at a = 1; fig5 sweeps the coupling for the power-law models with
    N = 3, 5, 7.  Grid endpoints and counts are this package's choices.
    """
    methods = ("numeric", "ddp", "lz", "asymptotic")
    if name == "fig2":
        return [SweepConfig.from_range(
            ModelKind.SUPERLINEAR, "a", 0.05, 3.0, 60,
            eps=0.25, methods=methods, workers=workers)]
    if name == "fig3":
        return [SweepConfig.from_range(
            ModelKind.SUBLINEAR, "a", 0.05, 3.0, 60,
            eps=0.25, methods=methods, workers=workers)]
    if name == "fig4":
        return [
            SweepConfig.from_range(kind, "eps", 0.0, 0.5, 26,
                                   a=1.0, methods=methods, workers=workers)
            for kind in (ModelKind.SUPERLINEAR, ModelKind.SUBLINEAR)
        ]
    if name == "fig5":
        return [
            SweepConfig.from_range(ModelKind.ESSENTIAL, "a", 0.05, 3.0, 60,
                                   n_power=n, methods=methods, workers=workers)
            for n in (3, 5, 7)
        ]
    raise ValueError(f"unknown preset {name!r}")


def run_preset(name: str, workers: int = 4) -> list[SweepRow]:
    rows: list[SweepRow] = []
    for cfg in preset_configs(name, workers):
        rows.extend(run_sweep(cfg))
    return rows
