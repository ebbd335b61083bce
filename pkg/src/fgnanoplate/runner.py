"""
Batch drivers: single solves, parameter sweeps and mesh convergence studies.

Rows are produced in a deterministic order whatever the worker count, so two
runs of the same config give identical CSV apart from the ``wall_ms`` column.
"""
from __future__ import annotations

import csv
import itertools
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, TextIO

from .assembly import apply_bcs, assemble
from .config import AnalysisConfig
from .material import ConstituentPair, FgmProfile, section_constants
from .modal import ModalResult, frequency_ratio, solve_modes
from .nurbs import make_patch

log = logging.getLogger(__name__)

CSV_HEADER = ("a_b_ratio", "a_h_ratio", "n", "mu", "bc", "mode", "omega_nd", "freq_ratio", "dofs", "wall_ms")
CONVERGENCE_HEADER = ("n_u", "n_v", "dofs", "omega_nd", "rel_change")


@dataclass(frozen=True)
class ResultRow:
    a_b_ratio: float
    a_h_ratio: float
    n: float
    mu: float
    bc: str
    mode: int
    omega_nd: float
    freq_ratio: float | None
    dofs: int
    wall_ms: float
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class ConvergenceRow:
    n_u: int
    n_v: int
    dofs: int
    omega_nd: float
    rel_change: float | None


def _num(x: float) -> str:
    return f"{x:g}"


def format_row(row: ResultRow) -> list[str]:
    return [
        _num(row.a_b_ratio),
        _num(row.a_h_ratio),
        _num(row.n),
        _num(row.mu),
        row.bc,
        str(row.mode),
        "nan" if not row.ok else f"{row.omega_nd:.6g}",
        "" if row.freq_ratio is None else f"{row.freq_ratio:.6g}",
        str(row.dofs),
        f"{row.wall_ms:.1f}",
    ]


def write_csv(rows: Iterable[ResultRow], stream: TextIO) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        w.writerow(format_row(row))


def write_convergence_csv(rows: Iterable[ConvergenceRow], stream: TextIO) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(CONVERGENCE_HEADER)
    for r in rows:
        change = "" if r.rel_change is None else f"{r.rel_change:.6e}"
        w.writerow([r.n_u, r.n_v, r.dofs, f"{r.omega_nd:.6g}", change])


def build_profile(config: AnalysisConfig) -> FgmProfile:
    m = config.material
    pair = ConstituentPair(m.E_c, m.E_m, m.rho_c, m.rho_m, m.nu_c, m.nu_m)
    return FgmProfile(pair, m.n, config.geometry.h, m.nu_override)


class PlateModel:
    """
    Constrained plate system for one configuration, reusable for any ``mu``.

    Stiffness is independent of the nonlocal parameter, so sweeps over ``mu``
    assemble once and re-solve with ``M0 + mu * Mg``.
    """

    def __init__(self, config: AnalysisConfig):
        t0 = time.perf_counter()
        g, d = config.geometry, config.discretization
        self.config = config
        self.patch = make_patch(g.a, g.b, d.p, d.n_u, d.n_v)
        self.profile = build_profile(config)
        self.section = section_constants(self.profile, kappa=config.kappa)
        self.system = apply_bcs(assemble(self.patch, self.section), config.bc)
        self.assembly_ms = 1e3 * (time.perf_counter() - t0)

    @property
    def dofs(self) -> int:
        return self.system.dof_map.n_dofs

    def solve(self, mu: float, k: int | None = None) -> ModalResult:
        return solve_modes(self.system.with_mu(mu), k or self.config.modes)


def _rows_for(config: AnalysisConfig, result: ModalResult | None, local: ModalResult | None,
              dofs: int, wall_ms: float, error: str | None = None) -> list[ResultRow]:
    g = config.geometry
    rows = []
    for k in range(config.modes):
        if result is None:
            omega, ratio = math.nan, None
        else:
            omega = float(result.Omegas[k])
            ratio = None if local is None else float(frequency_ratio(omega, local.Omegas[k]))
        rows.append(
            ResultRow(
                a_b_ratio=g.a / g.b,
                a_h_ratio=g.a / g.h,
                n=config.material.n,
                mu=config.mu,
                bc=config.bc,
                mode=k + 1,
                omega_nd=omega,
                freq_ratio=ratio,
                dofs=dofs,
                wall_ms=wall_ms,
                error=error,
            )
        )
    return rows


def run_solve(config: AnalysisConfig) -> list[ResultRow]:
    """make_patch -> section_constants -> assemble -> apply_bcs -> solve_modes."""
    model = PlateModel(config)
    t0 = time.perf_counter()
    res = model.solve(config.mu)
    wall = model.assembly_ms + 1e3 * (time.perf_counter() - t0)
    # the frequency ratio needs a mu = 0 companion; a single local run is its own twin
    local = res if config.mu == 0 else None
    return _rows_for(config, res, local, model.dofs, wall)


def sweep_configs(config: AnalysisConfig) -> list[AnalysisConfig]:
    """Cartesian product of the sweep axes, lexicographic in n, mu, a/b, a/h, bc."""
    grid = config.sweep
    g = config.geometry
    axes = {
        "n": [config.material.n],
        "mu": [config.mu],
        "a_b_ratio": [g.a / g.b],
        "a_h_ratio": [g.a / g.h],
        "bc": [config.bc],
    }
    if grid is not None:
        for name in axes:
            vals = getattr(grid, name)
            if vals is not None:
                axes[name] = list(vals)
    single = all(len(v) == 1 for v in axes.values())
    out = []
    for n, mu, ab, ah, bc in itertools.product(*axes.values()):
        if single:
            # keep the base geometry bit-for-bit for a degenerate grid
            out.append(config.with_updates(n=n, mu=mu, bc=bc, sweep=None))
            break
        out.append(config.with_updates(n=n, mu=mu, b=g.a / ab, h=g.a / ah, bc=bc, sweep=None))
    return out


@dataclass
class SweepResult:
    rows: list[ResultRow]

    @property
    def failures(self) -> list[ResultRow]:
        return [r for r in self.rows if not r.ok]

    @property
    def ok(self) -> bool:
        return not self.failures


def _group_key(config: AnalysisConfig) -> str:
    return repr(sorted(config.with_updates(mu=0.0).to_dict().items()))


def _solve_group(base: AnalysisConfig, mus: list[float]) -> dict[float, tuple]:
    """Assemble once and solve every requested ``mu``; failures are captured per ``mu``."""
    out: dict[float, tuple] = {}
    try:
        model = PlateModel(base)
    except Exception as exc:  # noqa: BLE001 - flagged in the output, sweep continues
        log.error("assembly failed for %s: %s", base.to_dict(), exc)
        dofs = 5 * base.discretization.n_u * base.discretization.n_v
        return {mu: (None, dofs, 0.0, f"{type(exc).__name__}: {exc}") for mu in mus}
    share = model.assembly_ms / len(mus)
    for mu in mus:
        t0 = time.perf_counter()
        try:
            res = model.solve(mu)
            err = None
        except Exception as exc:  # noqa: BLE001
            log.error("solve failed at mu=%g: %s", mu, exc)
            res, err = None, f"{type(exc).__name__}: {exc}"
        out[mu] = (res, model.dofs, share + 1e3 * (time.perf_counter() - t0), err)
    return out


def run_sweep(config: AnalysisConfig, workers: int = 1) -> SweepResult:
    """
    Solve every grid point; ``mu > 0`` rows get a frequency ratio when the grid
    also holds the matching ``mu = 0`` point.
    """
    configs = sweep_configs(config)
    groups: dict[str, tuple[AnalysisConfig, list[float]]] = {}
    for c in configs:
        key = _group_key(c)
        if key not in groups:
            groups[key] = (c.with_updates(mu=0.0), [])
        if c.mu not in groups[key][1]:
            groups[key][1].append(c.mu)

    if workers > 1 and len(groups) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {k: pool.submit(_solve_group, base, mus) for k, (base, mus) in groups.items()}
            solved = {k: f.result() for k, f in futures.items()}
    else:
        solved = {k: _solve_group(base, mus) for k, (base, mus) in groups.items()}

    rows: list[ResultRow] = []
    for c in configs:
        results = solved[_group_key(c)]
        res, dofs, wall, err = results[c.mu]
        local = results.get(0.0, (None,))[0]
        rows.extend(_rows_for(c, res, local, dofs, wall, err))
    return SweepResult(rows)


def run_converge(config: AnalysisConfig, nets: list[tuple[int, int]] | None = None) -> list[ConvergenceRow]:
    """Fundamental frequency on successively finer control nets."""
    if nets is None:
        conv = config.convergence
        nets = conv.pairs() if conv is not None else [(config.discretization.n_u, config.discretization.n_v)]
    rows: list[ConvergenceRow] = []
    prev = None
    for n_u, n_v in nets:
        c = config.with_updates(n_u=n_u, n_v=n_v, modes=1)
        model = PlateModel(c)
        omega = float(model.solve(c.mu, 1).Omegas[0])
        change = None if prev is None else (omega - prev) / prev
        rows.append(ConvergenceRow(n_u, n_v, model.dofs, omega, change))
        log.info("net %dx%d: %d dofs, Omega_1 = %.6g", n_u, n_v, model.dofs, omega)
        prev = omega
    return rows


def deltas_shrinking(rows: list[ConvergenceRow]) -> bool:
    d = [abs(r.rel_change) for r in rows if r.rel_change is not None]
    return all(b < a for a, b in zip(d, d[1:]))
