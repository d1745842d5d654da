"""Reproduction harness: the limiting payoff-sampling tables and the
(g, theta, dynamics) parameter sweep."""
from __future__ import annotations

import csv
import io
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Optional, Sequence

import numpy as np

from .equilibria import (
    GridResolutionWarning,
    Label,
    PureStability,
    Verdict,
    find_stationary_states,
    pure_state_stability,
    symmetric_state,
    theorem1_verdict,
)
from .flow import estimate_basins
from .game import Game
from .response import build_limit_payoff_response, build_response
from .sampling import SWEEP_G, Dynamics, SampleDistribution, sweep_distributions

TABLE_TOL = 5e-4

# printed 3-decimal values, k = 1..20
GOLDEN_FIXED_POINTS = (
    0.500, 0.579, 0.620, 0.649, 0.672, 0.690, 0.706, 0.720, 0.731, 0.741,
    0.750, 0.758, 0.765, 0.773, 0.778, 0.784, 0.789, 0.794, 0.799, 0.803,
)
GOLDEN_SLOPES = (
    1.0, 0.690, 0.618, 0.645, 0.690, 0.730, 0.763, 0.793, 0.818, 0.840,
    0.861, 0.880, 0.899, 0.916, 0.932, 0.948, 0.963, 0.978, 0.991, 1.001,
)
# |w_k'(p^(j))|, rows k = 1..5, columns j = 1..5
GOLDEN_CROSS = (
    (1.0, 1.0, 1.0, 1.0, 1.0),
    (0.5, 0.690, 0.812, 0.905, 0.981),
    (0.562, 0.560, 0.618, 0.687, 0.759),
    (0.625, 0.616, 0.623, 0.645, 0.679),
    (0.605, 0.642, 0.659, 0.673, 0.690),
)


@dataclass
class TableEntry:
    name: str
    computed: float
    golden: float

    @property
    def error(self) -> float:
        return abs(self.computed - self.golden)

    @property
    def ok(self) -> bool:
        # printed values are exact decimals; allow float noise at the band edge
        return self.error <= TABLE_TOL + 1e-12


def limit_table(kmax: int = 20) -> list[tuple[int, float, float]]:
    """``(k, p^(k), |w_k'(p^(k))|)`` for the limiting payoff-sampling polynomial."""
    rows = []
    for k in range(1, kmax + 1):
        f = build_limit_payoff_response(k)
        p = f.fixed_point()
        rows.append((k, p, abs(f.derivative(p))))
    return rows


def cross_table(n: int = 5) -> np.ndarray:
    """``out[k-1, j-1] = |w_k'(p^(j))|``."""
    fs = [build_limit_payoff_response(k) for k in range(1, n + 1)]
    ps = [f.fixed_point() for f in fs]
    return np.array([[abs(f.derivative(p)) for p in ps] for f in fs])


def table_entries() -> list[TableEntry]:
    out = []
    for (k, p, s), gp, gs in zip(limit_table(len(GOLDEN_FIXED_POINTS)), GOLDEN_FIXED_POINTS,
                                 GOLDEN_SLOPES):
        out.append(TableEntry(f"p({k})", p, gp))
        out.append(TableEntry(f"|w'_{k}(p({k}))|", s, gs))
    cross = cross_table(len(GOLDEN_CROSS))
    for k, row in enumerate(GOLDEN_CROSS, start=1):
        for j, gold in enumerate(row, start=1):
            out.append(TableEntry(f"|w'_{k}(p({j}))|", float(cross[k - 1, j - 1]), gold))
    return out


def format_tables(entries: Sequence[TableEntry]) -> str:
    lines = [f"{'entry':<18}{'computed':>12}{'printed':>10}{'error':>12}  status"]
    for e in entries:
        lines.append(f"{e.name:<18}{e.computed:>12.6f}{e.golden:>10.3f}{e.error:>12.2e}  "
                     + ("ok" if e.ok else "MISMATCH"))
    bad = sum(not e.ok for e in entries)
    lines.append(f"{len(entries) - bad}/{len(entries)} entries within {TABLE_TOL:g}")
    return "\n".join(lines) + "\n"


# sweep ---------------------------------------------------------------------

SWEEP_VERDICTS = ("GlobalPure", "GlobalMixedSymmetric", "MixedOther", "Multistable", "Boundary")
GLOBAL_SHARE = 0.99
MULTI_SHARE = 0.05


@dataclass
class SweepRow:
    g: float
    distribution: str
    dynamics: str
    n_states: int
    pure_label: str
    symmetric_label: str
    theorem1: str
    basin_pure: float
    basin_symmetric: float
    basin_other: float
    basin_unattributed: float
    verdict: str
    error: str = ""

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]


def sweep_verdict(theorem1: str, pure: float, symmetric: float, others: Iterable[float]) -> str:
    """Classify a cell from its basin shares.

    `others` are the shares of the remaining attractor classes (each pair of
    mirror-image asymmetric states counts as one class, as do the two pure
    states).
    """
    if theorem1 == Verdict.BOUNDARY.value:
        return "Boundary"
    if theorem1 == Verdict.GLOBAL_MIXED.value and symmetric >= GLOBAL_SHARE:
        return "GlobalMixedSymmetric"
    if pure >= GLOBAL_SHARE:
        return "GlobalPure"
    classes = [pure, symmetric, *others]
    if sum(c >= MULTI_SHARE for c in classes) >= 2:
        return "Multistable"
    return "MixedOther"


def _class_key(s) -> tuple:
    a, b = s.location.as_tuple()
    return (round(min(a, b), 6), round(max(a, b), 6))


def sweep_cell(g: float, theta: SampleDistribution, kind: str, basins: bool = True,
               n: int = 400, seed: int = 0) -> SweepRow:
    nan = float("nan")
    try:
        kind = Dynamics(kind).value
        game = Game(g, g)
        f = build_response(game, theta, kind)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", GridResolutionWarning)
            states = find_stationary_states(f)
        pure = pure_state_stability(game, theta, kind)
        t1 = theorem1_verdict(game, theta, kind).value
        sym = symmetric_state(states)
        row = SweepRow(g, theta.label, kind, len(states), pure.value,
                       sym.label.value if sym else "", t1, nan, nan, nan, nan, "")
        if pure is PureStability.BOUNDARY:
            row.verdict = "Boundary"
        if basins:
            est = estimate_basins(f, n=n, seed=seed, states=states)
            other: dict[tuple, float] = {}
            row.basin_pure = row.basin_symmetric = 0.0
            for s, fr in zip(states, est.fractions):
                if s.pure:
                    row.basin_pure += fr
                elif s.location.symmetric and s.location.interior:
                    row.basin_symmetric += fr
                elif s.label is Label.STABLE:
                    key = _class_key(s)
                    other[key] = other.get(key, 0.0) + fr
            row.basin_other = float(sum(other.values()))
            row.basin_unattributed = est.unattributed
            row.basin_pure = float(row.basin_pure)
            row.basin_symmetric = float(row.basin_symmetric)
            row.verdict = sweep_verdict(t1, row.basin_pure, row.basin_symmetric, other.values())
        return row
    except Exception as exc:  # one bad cell must not sink the sweep
        return SweepRow(g, theta.label, kind, 0, "", "", "", nan, nan, nan, nan, "",
                        f"{type(exc).__name__}: {exc}")


def sweep_cells(gs: Sequence[float] = SWEEP_G,
                distributions: Optional[Sequence[SampleDistribution]] = None,
                kinds: Sequence[str] = ("action", "payoff")) -> list[tuple]:
    distributions = distributions or sweep_distributions()
    return [(g, d, k) for k in kinds for g in gs for d in distributions]


def _run_cell(args):
    return sweep_cell(*args)


def run_sweep(gs: Sequence[float] = SWEEP_G,
              distributions: Optional[Sequence[SampleDistribution]] = None,
              kinds: Sequence[str] = ("action", "payoff"), basins: bool = True,
              n: int = 400, seed: int = 0, workers: int = 1) -> list[SweepRow]:
    """Evaluate every cell; rows come back in cell order whatever the pool does."""
    jobs = [(g, d, k, basins, n, seed) for g, d, k in sweep_cells(gs, distributions, kinds)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_cell, jobs, chunksize=4))
    return [_run_cell(j) for j in jobs]


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SweepRow.columns(), lineterminator="\n")
    writer.writeheader()
    for r in rows:
        d = asdict(r)
        for key, val in d.items():
            if isinstance(val, float):
                d[key] = "" if np.isnan(val) else f"{val:.6g}"
        writer.writerow(d)
    return buf.getvalue()
