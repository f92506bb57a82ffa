"""End-to-end pipelines: sample, solve, bound, and report over N-sweeps.

A sweep draws one observation stream per master seed and reuses prefixes
of it for every N in the list, so the per-N sample sets are nested and
identical to what a fresh draw at that N under the same seed would
produce.  All confidence levels at a given N share the same samples and
the same solved candidate — only the closed-form bound changes — which
makes the level curves comparable pointwise.

Solving is the only expensive stage, so sweep points are solved once per
N in a bounded worker pool (optional) and the rows are assembled in a
deterministic (N, level) order regardless of completion order.
"""

from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .bounds import (
    BoundsReport,
    ConfidenceSpec,
    corollary_upper,
    deterministic_lower,
    support_threshold,
    theorem2_norm_bound,
)
from .config import parse_system_config
from .samples import SampleSet, eta_sampled
from .solver import MqlfCandidate, SolverConfig, solve_sampled
from .system import draw_observations
from .whitebox import cjsr_lower_bruteforce

CSV_FIELDS = [
    "N", "level", "beta", "beta_prime", "epsilon", "epsilon_prime",
    "gamma_hat", "eta_hat", "d_eps", "lower_sdp", "lower_cycles", "upper",
    "degenerate", "certified", "seed", "elapsed_ms",
]
CSV_HEADER = ",".join(CSV_FIELDS)

_NAN = math.nan


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep's worth of inputs.

    ``beta_share`` is the confidence split rule: the slack 1 - level is
    divided as beta = 1 - share * slack, beta' = 1 - (1 - share) * slack
    (share 0.5 gives the symmetric default beta = beta' = (1 + level)/2).
    ``cycle_max_length`` = 0 disables the cycle lower bound column.
    """

    system_path: str
    N_list: tuple[int, ...]
    confidence_levels: tuple[float, ...]
    seed: int
    solver: SolverConfig = field(default_factory=SolverConfig)
    out_dir: str = "."
    corollary_form: bool = False
    beta_share: float = 0.5
    workers: int = 1
    cycle_max_length: int = 8
    timing: bool = False

    def __post_init__(self):
        object.__setattr__(self, "N_list", tuple(int(N) for N in self.N_list))
        object.__setattr__(self, "confidence_levels",
                           tuple(float(l) for l in self.confidence_levels))
        if not self.N_list:
            raise ValueError("N_list must be nonempty")
        if any(b >= a for a, b in zip(self.N_list[1:], self.N_list)):
            raise ValueError(f"N_list must be strictly ascending, got {self.N_list}")
        if self.N_list[0] < 1:
            raise ValueError("sample counts must be >= 1")
        if not self.confidence_levels:
            raise ValueError("confidence_levels must be nonempty")
        for l in self.confidence_levels:
            if not (0.0 < l < 1.0):
                raise ValueError(f"confidence levels must lie in (0, 1), got {l}")
        if not (0.0 < self.beta_share < 1.0):
            raise ValueError(f"beta_share must lie in (0, 1), got {self.beta_share}")
        if not (0 <= int(self.seed) < 2 ** 64):
            raise ValueError("seed must fit in 64 bits")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.cycle_max_length < 0:
            raise ValueError("cycle_max_length must be >= 0")

    def split(self, level: float) -> ConfidenceSpec:
        slack = 1.0 - level
        return ConfidenceSpec(1.0 - self.beta_share * slack,
                              1.0 - (1.0 - self.beta_share) * slack)


def point_report(candidate: MqlfCandidate, samples: SampleSet, eta_hat: float,
                 spec: ConfidenceSpec, corollary_form: bool = False,
                 lower_cycles: float | None = None) -> BoundsReport:
    """One (samples, level) cell of a sweep, tolerant of tiny N.

    Below the support threshold the sensitivity bound has no validity
    domain; the report is flagged degenerate with an unavailable upper
    bound while both lower bounds are still emitted.
    """
    N = len(samples)
    if N < support_threshold(samples.v_count, samples.n):
        t2 = theorem2_norm_bound(eta_hat, spec.beta_prime, samples.m,
                                 samples.v_count, samples.n, N,
                                 corollary_form=corollary_form)
        return BoundsReport(
            N=N, n=samples.n, v_count=samples.v_count, m=samples.m,
            gamma_hat=candidate.gamma, eta_hat=eta_hat,
            beta=spec.beta, beta_prime=spec.beta_prime,
            epsilon=_NAN, epsilon_prime=t2.epsilon_prime,
            delta_eps=_NAN, d_eps=_NAN, delta_eps_prime_arg=t2.delta_arg,
            lower_bound_sdp=deterministic_lower(candidate, samples.n),
            lower_bound_cycles=lower_cycles,
            upper_bound=math.inf, confidence_level=spec.level,
            degenerate=True, stability_certified=False,
        )
    return corollary_upper(candidate, samples, eta_hat, spec,
                           corollary_form=corollary_form, lower_cycles=lower_cycles)


def run_pipeline(cfg: ExperimentConfig, N: int, level: float | None = None) -> BoundsReport:
    """Draw N observations, solve, and bound at one confidence level.

    Deterministic given (config, seed).  ``level`` defaults to the first
    configured confidence level.
    """
    csls = parse_system_config(cfg.system_path)
    samples = draw_observations(csls, N, cfg.seed)
    candidate = solve_sampled(samples, cfg.solver)
    eta = eta_sampled(samples)
    lower_cycles = (cjsr_lower_bruteforce(csls, cfg.cycle_max_length)
                    if cfg.cycle_max_length > 0 else None)
    spec = cfg.split(cfg.confidence_levels[0] if level is None else level)
    return point_report(candidate, samples, eta, spec,
                        corollary_form=cfg.corollary_form, lower_cycles=lower_cycles)


# ---------------------------------------------------------------------------
# sweep machinery
# ---------------------------------------------------------------------------

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def report_row(report: BoundsReport, seed: int, elapsed_ms: int) -> list[str]:
    return [
        str(report.N), _fmt(report.confidence_level), _fmt(report.beta),
        _fmt(report.beta_prime), _fmt(report.epsilon), _fmt(report.epsilon_prime),
        _fmt(report.gamma_hat), _fmt(report.eta_hat), _fmt(report.d_eps),
        _fmt(report.lower_bound_sdp), _fmt(report.lower_bound_cycles),
        _fmt(report.upper_bound), _fmt(report.degenerate),
        _fmt(report.stability_certified), str(seed), str(elapsed_ms),
    ]


def parse_report_row(row: dict, n: int, v_count: int, m: int) -> BoundsReport:
    """Rebuild a BoundsReport from one CSV row plus structural constants.

    The two cap-geometry diagnostics not stored in the CSV are recomputed
    from epsilon and the norm-bound argument.
    """
    from .special import cap_geometry

    eps = float(row["epsilon"])
    if math.isnan(eps):
        delta_eps = _NAN
        d_eps = _NAN
    else:
        geom = cap_geometry(eps, n)
        delta_eps, d_eps = geom.delta, geom.d
    beta_prime = float(row["beta_prime"])
    N = int(row["N"])
    t2_arg = theorem2_norm_bound(max(float(row["eta_hat"]), 0.0), beta_prime,
                                 m, v_count, n, N).delta_arg
    lc = row["lower_cycles"]
    return BoundsReport(
        N=N, n=n, v_count=v_count, m=m,
        gamma_hat=float(row["gamma_hat"]), eta_hat=float(row["eta_hat"]),
        beta=float(row["beta"]), beta_prime=beta_prime,
        epsilon=eps, epsilon_prime=float(row["epsilon_prime"]),
        delta_eps=delta_eps, d_eps=d_eps, delta_eps_prime_arg=t2_arg,
        lower_bound_sdp=float(row["lower_sdp"]),
        lower_bound_cycles=float(lc) if lc not in ("", None) else None,
        upper_bound=float(row["upper"]),
        confidence_level=float(row["level"]),
        degenerate=row["degenerate"] == "true",
        stability_certified=row["certified"] == "true",
    )


def read_sweep_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _solve_point(N: int, samples: SampleSet, solver_cfg: SolverConfig, timing: bool):
    t0 = time.perf_counter()
    candidate = solve_sampled(samples, solver_cfg)
    eta = eta_sampled(samples)
    ms = int(round((time.perf_counter() - t0) * 1000.0)) if timing else 0
    return N, candidate, eta, ms


@dataclass(frozen=True)
class SweepResult:
    csv_path: Path
    plot_script_path: Path
    svg_path: Path
    summary_path: Path
    reports: tuple  # ((N, level, BoundsReport), ...) in emission order


def _write_rows(path: Path, rows: list[list[str]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_FIELDS)
        w.writerows(rows)


def run_sweep(cfg: ExperimentConfig) -> SweepResult:
    """Solve every N in the sweep, bound every level, emit artifacts.

    Writes ``sweep.csv``, ``plot_bounds.py`` (matplotlib companion),
    ``bounds.svg`` (self-contained render) and ``summary.txt`` (first
    certification per level) into the output directory.  Partial CSV rows
    are flushed if a sweep point fails.
    """
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "sweep.csv"

    csls = parse_system_config(cfg.system_path)
    N_max = cfg.N_list[-1]
    samples_full = draw_observations(csls, N_max, cfg.seed)
    lower_cycles = (cjsr_lower_bruteforce(csls, cfg.cycle_max_length)
                    if cfg.cycle_max_length > 0 else None)

    solved: dict[int, tuple[MqlfCandidate, float, int]] = {}
    rows: list[list[str]] = []
    reports: list[tuple[int, float, BoundsReport]] = []
    try:
        if cfg.workers == 1:
            for N in cfg.N_list:
                N, cand, eta, ms = _solve_point(N, samples_full.prefix(N),
                                                cfg.solver, cfg.timing)
                solved[N] = (cand, eta, ms)
        else:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                futs = [pool.submit(_solve_point, N, samples_full.prefix(N),
                                    cfg.solver, cfg.timing)
                        for N in cfg.N_list]
                for fut in futs:
                    N, cand, eta, ms = fut.result()
                    solved[N] = (cand, eta, ms)
        for N in cfg.N_list:
            cand, eta, ms = solved[N]
            for level in cfg.confidence_levels:
                rep = point_report(cand, samples_full.prefix(N), eta,
                                   cfg.split(level), cfg.corollary_form,
                                   lower_cycles)
                rows.append(report_row(rep, cfg.seed, ms))
                reports.append((N, level, rep))
    except Exception as exc:
        _write_rows(csv_path, rows)
        raise RuntimeError(
            f"sweep failed after {len(rows)} rows (partial CSV flushed to {csv_path})"
        ) from exc

    _write_rows(csv_path, rows)
    plot_path = out / "plot_bounds.py"
    plot_path.write_text(_plot_script(csv_path.name))
    svg_path = out / "bounds.svg"
    svg_path.write_text(render_svg(reports))
    summary_path = out / "summary.txt"
    summary_path.write_text(_summary_text(cfg, reports))
    return SweepResult(csv_path, plot_path, svg_path, summary_path, tuple(reports))


def first_certification(reports, level: float) -> int | None:
    """Smallest N whose report at this level certifies stability."""
    hits = [N for (N, l, rep) in reports if l == level and rep.stability_certified]
    return min(hits) if hits else None


def _summary_text(cfg: ExperimentConfig, reports) -> str:
    lines = [
        f"system: {cfg.system_path}",
        f"seed: {cfg.seed}",
        f"N sweep: {list(cfg.N_list)}",
        "",
    ]
    for level in cfg.confidence_levels:
        first = first_certification(reports, level)
        if first is None:
            lines.append(f"level {level}: never certified in this sweep")
        else:
            lines.append(f"level {level}: first certified (upper bound < 1) at N = {first}")
    return "\n".join(lines) + "\n"


def _plot_script(csv_name: str) -> str:
    return f'''#!/usr/bin/env python3
"""Render the bound curves from {csv_name} (requires matplotlib)."""

import csv
import math
from collections import defaultdict

import matplotlib.pyplot as plt

with open("{csv_name}", newline="") as fh:
    rows = list(csv.DictReader(fh))

levels = sorted({{row["level"] for row in rows}})
upper = defaultdict(list)
lower_sdp = []
lower_cyc = []
for row in rows:
    N = int(row["N"])
    u = float(row["upper"])
    if math.isfinite(u):
        upper[row["level"]].append((N, u))
    if row["level"] == levels[0]:
        lower_sdp.append((N, float(row["lower_sdp"])))
        if row["lower_cycles"]:
            lower_cyc.append((N, float(row["lower_cycles"])))

fig, ax = plt.subplots(figsize=(7, 4.5))
for level in levels:
    pts = sorted(upper[level])
    ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o",
            label=f"upper bound, level {{level}}")
ax.plot([p[0] for p in sorted(lower_sdp)], [p[1] for p in sorted(lower_sdp)],
        marker="s", color="gray", label="lower bound (certificate / sqrt(n))")
if lower_cyc:
    ax.plot([p[0] for p in sorted(lower_cyc)], [p[1] for p in sorted(lower_cyc)],
            linestyle=":", color="black", label="lower bound (cycles)")
ax.axhline(1.0, color="red", linewidth=0.8, linestyle="--")
ax.set_xscale("log")
ax.set_xlabel("number of observations N")
ax.set_ylabel("growth-rate bound")
ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig("bounds.png", dpi=150)
print("wrote bounds.png")
'''


def render_svg(reports) -> str:
    """Small self-contained SVG of the bound curves (no dependencies)."""
    pts_upper: dict[float, list[tuple[int, float]]] = {}
    pts_lower: list[tuple[int, float]] = []
    cyc_value = None
    for (N, level, rep) in reports:
        if math.isfinite(rep.upper_bound):
            pts_upper.setdefault(level, []).append((N, rep.upper_bound))
        if not any(p[0] == N for p in pts_lower):
            pts_lower.append((N, rep.lower_bound_sdp))
        if rep.lower_bound_cycles is not None:
            cyc_value = rep.lower_bound_cycles

    all_N = sorted({N for (N, _, _) in reports})
    if not all_N:
        return "<svg xmlns='http://www.w3.org/2000/svg'/>"
    finite_vals = [v for pts in pts_upper.values() for (_, v) in pts]
    finite_vals += [v for (_, v) in pts_lower]
    y_hi = max(1.15, min(max(finite_vals + [1.0]) * 1.1, 4.0))
    x_lo, x_hi = math.log10(all_N[0]), math.log10(all_N[-1])
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0

    W, H, ML, MB = 640, 420, 60, 40

    def sx(N):
        return ML + (math.log10(N) - x_lo) / (x_hi - x_lo) * (W - ML - 20)

    def sy(v):
        v = min(v, y_hi)
        return (H - MB) - v / y_hi * (H - MB - 20)

    colors = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"]
    parts = [
        f"<svg xmlns='http://www.w3.org/2000/svg' width='{W}' height='{H}' "
        f"viewBox='0 0 {W} {H}' font-family='sans-serif' font-size='11'>",
        f"<rect width='{W}' height='{H}' fill='white'/>",
        f"<line x1='{ML}' y1='{H - MB}' x2='{W - 20}' y2='{H - MB}' stroke='black'/>",
        f"<line x1='{ML}' y1='20' x2='{ML}' y2='{H - MB}' stroke='black'/>",
        f"<line x1='{ML}' y1='{sy(1.0):.1f}' x2='{W - 20}' y2='{sy(1.0):.1f}' "
        "stroke='red' stroke-dasharray='6,4'/>",
        f"<text x='{W - 100}' y='{sy(1.0) - 5:.1f}' fill='red'>bound = 1</text>",
    ]
    for N in all_N:
        parts.append(f"<text x='{sx(N) - 12:.1f}' y='{H - MB + 16}'>{N}</text>")
    for tick in (0.5, 1.0, y_hi):
        parts.append(f"<text x='8' y='{sy(tick) + 4:.1f}'>{tick:.2f}</text>")

    legend_y = 34
    for i, level in enumerate(sorted(pts_upper)):
        pts = sorted(pts_upper[level])
        path = " ".join(f"{sx(N):.1f},{sy(v):.1f}" for (N, v) in pts)
        c = colors[i % len(colors)]
        if path:
            parts.append(f"<polyline points='{path}' fill='none' stroke='{c}' stroke-width='1.5'/>")
        parts.append(f"<text x='{ML + 10}' y='{legend_y}' fill='{c}'>upper, level {level}</text>")
        legend_y += 14
    path = " ".join(f"{sx(N):.1f},{sy(v):.1f}" for (N, v) in sorted(pts_lower))
    parts.append(f"<polyline points='{path}' fill='none' stroke='gray' stroke-width='1.5'/>")
    parts.append(f"<text x='{ML + 10}' y='{legend_y}' fill='gray'>lower (certificate)</text>")
    legend_y += 14
    if cyc_value is not None:
        parts.append(
            f"<line x1='{ML}' y1='{sy(cyc_value):.1f}' x2='{W - 20}' y2='{sy(cyc_value):.1f}' "
            "stroke='black' stroke-dasharray='2,3'/>"
        )
        parts.append(f"<text x='{ML + 10}' y='{legend_y}' fill='black'>lower (cycles)</text>")
    parts.append("</svg>")
    return "\n".join(parts)
