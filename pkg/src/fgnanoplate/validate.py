"""Regression checks against the published frequency tables shipped in ``data/``."""
from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources

from .config import AnalysisConfig, Discretization, Geometry, Material
from .material import ISOTROPIC_BENCHMARK
from .modal import frequency_ratio
from .navier import navier_spectrum, nonlocal_ratio
from .runner import PlateModel

TABLE2_RTOL = 0.01
TABLE3_RTOL = 0.02
RATIO_RTOL = 0.005
# The closed-form ratio is exact for sinusoidal modes; with u0 fixed on the
# x-edges and bending-extension coupling, higher modes such as (3, 1) deviate
# slightly, so the ratio suite covers the lowest wave-number modes only.
RATIO_MODES = {(1, 1), (1, 2), (2, 1)}


def _read(name: str) -> list[dict]:
    text = resources.files(__package__).joinpath("data", name).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def load_table2() -> list[dict]:
    out = []
    for r in _read("table2.csv"):
        out.append(
            {
                "a_b_ratio": int(r["a_b_ratio"]),
                "thickness_label": int(r["thickness_label"]),
                "mu": float(r["mu"]),
                "a": float(r["a"]),
                "b": float(r["b"]),
                "h": float(r["h"]),
                "omega": float(r["omega_ref"]),
            }
        )
    return out


def load_table3() -> list[dict]:
    """Long format: one dict per (bc, a/b, a/h, mu, mode)."""
    out = []
    for r in _read("table3.csv"):
        for mode in (1, 2, 3):
            out.append(
                {
                    "bc": r["bc"],
                    "a_b_ratio": int(r["a_b_ratio"]),
                    "a_h_ratio": int(r["a_h_ratio"]),
                    "mu": float(r["mu"]),
                    "mode": mode,
                    "omega": float(r[f"mode{mode}"]),
                }
            )
    return out


@dataclass(frozen=True)
class Check:
    suite: str
    label: str
    expected: float
    computed: float
    tol: float
    residual: float = 0.0  # eigen residual of the computed mode(s)

    @property
    def rel_err(self) -> float:
        return float((self.computed - self.expected) / self.expected)

    @property
    def passed(self) -> bool:
        return bool(abs(self.rel_err) <= self.tol)

    def to_dict(self) -> dict:
        d = {k: (v if isinstance(v, str) else float(v)) for k, v in asdict(self).items()}
        d.update(rel_err=self.rel_err, passed=self.passed)
        return d


@dataclass
class ValidationReport:
    checks: list[Check] = field(default_factory=list)
    settings: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def suite(self, name: str) -> list[Check]:
        return [c for c in self.checks if c.suite == name]

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        suites = {}
        for c in self.checks:
            s = suites.setdefault(c.suite, {"total": 0, "passed": 0})
            s["total"] += 1
            s["passed"] += int(c.passed)
        return {
            "passed": self.passed,
            "settings": self.settings,
            "suites": suites,
            "failures": [c.to_dict() for c in self.failures],
            "checks": [c.to_dict() for c in self.checks],
        }

    def summary(self) -> str:
        lines = []
        for name, s in self.to_dict()["suites"].items():
            status = "PASS" if s["passed"] == s["total"] else "FAIL"
            lines.append(f"{status} {name}: {s['passed']}/{s['total']}")
        for c in self.failures:
            lines.append(
                f"  {c.suite} {c.label}: expected {c.expected:.4f}, got {c.computed:.4f} "
                f"({100 * c.rel_err:+.2f}%, tol {100 * c.tol:.1f}%)"
            )
        return "\n".join(lines)


def _table2_config(row: dict, kappa: float, p: int, net: int) -> AnalysisConfig:
    iso = ISOTROPIC_BENCHMARK
    return AnalysisConfig(
        geometry=Geometry(a=row["a"], b=row["b"], h=row["h"]),
        material=Material(E_c=iso.E_c, E_m=iso.E_m, rho_c=iso.rho_c, rho_m=iso.rho_m, n=0.0),
        discretization=Discretization(p=p, n_u=net, n_v=net),
        bc="SSSS",
        modes=1,
        kappa=kappa,
    )


def _table3_config(bc: str, ab: int, ah: int, kappa: float, p: int, net: int) -> AnalysisConfig:
    a = 10.0
    return AnalysisConfig(
        geometry=Geometry(a=a, b=a / ab, h=a / ah),
        material=Material(n=5.0),
        discretization=Discretization(p=p, n_u=net, n_v=net),
        bc=bc,
        modes=3,
        kappa=kappa,
    )


def _solve_all(config: AnalysisConfig, mus: list[float]):
    model = PlateModel(config)
    return model, {mu: model.solve(mu) for mu in mus}


def run_validate(
    kappa: float = 5.0 / 6.0,
    p: int = 3,
    net: int = 13,
    workers: int = 1,
    tables: tuple[str, ...] = ("table2", "table3"),
) -> ValidationReport:
    """
    Suites ``table2`` (isotropic SSSS, 1 %), ``table3`` (graded plate, both
    boundary conditions, 2 %) and ``table3_ratio`` (SSSS frequency ratios
    against the closed-form nonlocal ratio, 0.5 %).

    ``tables`` selects a subset; the ratio suite runs with ``table3``.
    """
    unknown = set(tables) - {"table2", "table3"}
    if unknown:
        raise ValueError(f"unknown tables: {sorted(unknown)}")
    t2 = load_table2() if "table2" in tables else []
    t3 = load_table3() if "table3" in tables else []

    jobs = {}
    for r in t2:
        key = ("t2", r["a"], r["b"], r["h"])
        jobs.setdefault(key, (_table2_config(r, kappa, p, net), set()))[1].add(r["mu"])
    for r in t3:
        key = ("t3", r["bc"], r["a_b_ratio"], r["a_h_ratio"])
        cfg = _table3_config(r["bc"], r["a_b_ratio"], r["a_h_ratio"], kappa, p, net)
        jobs.setdefault(key, (cfg, {0.0}))[1].add(r["mu"])

    def work(item):
        key, (cfg, mus) = item
        return key, _solve_all(cfg, sorted(mus))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            solved = dict(pool.map(work, jobs.items()))
    else:
        solved = dict(map(work, jobs.items()))

    report = ValidationReport(settings={"kappa": kappa, "p": p, "net": net, "tables": list(tables)})
    for r in t2:
        _, res = solved[("t2", r["a"], r["b"], r["h"])]
        label = f"a/b={r['a_b_ratio']} a/h={r['thickness_label']} mu={r['mu']:g}"
        m = res[r["mu"]]
        report.checks.append(Check("table2", label, r["omega"], float(m.Omegas[0]), TABLE2_RTOL, float(m.residuals[0])))

    for r in t3:
        model, res = solved[("t3", r["bc"], r["a_b_ratio"], r["a_h_ratio"])]
        k = r["mode"] - 1
        label = f"{r['bc']} a/b={r['a_b_ratio']} a/h={r['a_h_ratio']} mu={r['mu']:g} mode {r['mode']}"
        m = res[r["mu"]]
        report.checks.append(Check("table3", label, r["omega"], float(m.Omegas[k]), TABLE3_RTOL, float(m.residuals[k])))

        if r["bc"] == "SSSS" and r["mu"] > 0:
            g = model.config.geometry
            mode = navier_spectrum(model.section, g.a, g.b, 3)[k][1]
            if (mode.m, mode.n) not in RATIO_MODES:
                continue
            expected = nonlocal_ratio(mode, r["mu"], g.a, g.b)
            computed = frequency_ratio(res[r["mu"]].Omegas[k], res[0.0].Omegas[k])
            label = f"{label} ({mode.m},{mode.n})"
            residual = max(res[r["mu"]].residuals[k], res[0.0].residuals[k])
            report.checks.append(Check("table3_ratio", label, expected, float(computed), RATIO_RTOL, float(residual)))
    return report
