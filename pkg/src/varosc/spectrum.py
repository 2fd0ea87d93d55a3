"""Spectrum pipeline: potential -> PMS parameters -> Hamiltonian -> eigenpairs.

Also provides centered blocks for highly excited states and self-referential
convergence studies (errors measured against a larger reference block), plus
the CSV emitters for levels, convergence tables, and trace scans.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .eigen import EigenSolution, diagonalize
from .oscbasis import BasisConfig, assemble_hamiltonian
from .pms import PmsResult, pms_optimize
from .potential import PolynomialPotential

__all__ = [
    "SpectrumReport",
    "ConvergenceStudy",
    "solve_spectrum",
    "solve_centered",
    "convergence_study",
    "write_levels_csv",
    "write_convergence_csv",
    "write_trace_scan_csv",
]

_FMT = "{:.17g}"


@dataclass(frozen=True)
class ConvergenceStudy:
    """Per-dimension energies and deviations from a reference block.

    rows holds (dim, level, energy, delta) with delta = |E_n(dim) - E_n(ref)|;
    pms_omegas maps each dim to the frequency the trace criterion picked.
    """

    n_ref: int
    rows: tuple[tuple[int, int, float, float], ...]
    pms_omegas: dict[int, float] = field(default_factory=dict)


@dataclass(frozen=True)
class SpectrumReport:
    pms: PmsResult
    solution: EigenSolution
    requested_levels: range
    convergence: ConvergenceStudy | None = None

    def __post_init__(self):
        cfg = self.solution.config
        lo, hi = cfg.center, cfg.center + cfg.dim
        for n in (self.requested_levels.start, self.requested_levels.stop - 1):
            if not (lo <= n < hi):
                raise ValueError(
                    f"requested level {n} lies outside the diagonalized block [{lo}, {hi})"
                )

    def energy(self, level: int) -> float:
        """Energy of the given global level index."""
        cfg = self.solution.config
        if not (cfg.center <= level < cfg.center + cfg.dim):
            raise ValueError(
                f"level {level} lies outside the diagonalized block "
                f"[{cfg.center}, {cfg.center + cfg.dim})"
            )
        return float(self.energies[level - cfg.center])

    @property
    def energies(self) -> np.ndarray:
        return self.solution.energies


def solve_spectrum(pot: PolynomialPotential, N: int,
                   optimize_sigma: bool = False) -> SpectrumReport:
    """PMS-optimized spectrum of the first N levels.

    Runs the trace optimization, assembles the Hamiltonian at the optimal
    (omega, sigma), and diagonalizes.
    """
    pms = pms_optimize(pot, N, optimize_sigma=optimize_sigma)
    cfg = BasisConfig(dim=N, omega=pms.omega, sigma=pms.sigma)
    sol = diagonalize(assemble_hamiltonian(pot, cfg))
    return SpectrumReport(pms=pms, solution=sol, requested_levels=range(N))


def solve_centered(pot: PolynomialPotential, target_level: int, N: int) -> SpectrumReport:
    """Spectrum of an N-dimensional block centered on a target level.

    The block spans basis indices [center, center+N) with
    center = max(0, target_level - N//2), so the target sits mid-block and is
    shielded from border contamination.  The trace criterion is re-applied to
    this block's own diagonal.  Level k of the block is labelled center+k;
    the labelling is an approximation validated against uncentered runs in
    tests, not assumed exact.
    """
    if target_level < 0:
        raise ValueError(f"target level must be >= 0, got {target_level}")
    center = max(0, target_level - N // 2)
    pms = pms_optimize(pot, N, center=center)
    cfg = BasisConfig(dim=N, omega=pms.omega, sigma=0.0, center=center)
    sol = diagonalize(assemble_hamiltonian(pot, cfg))
    return SpectrumReport(pms=pms, solution=sol,
                          requested_levels=range(center, center + N))


def convergence_study(pot: PolynomialPotential, level_set, N_list,
                      N_ref: int | None = None,
                      optimize_sigma: bool = False) -> SpectrumReport:
    """Tabulate level errors against a large reference block.

    delta(N, n) = |E_n(N) - E_n(N_ref)|.  N_ref defaults to 2.5x the largest
    requested dimension and must exceed it.  The per-N PMS frequencies are
    recorded as diagnostics.
    """
    N_list = sorted(int(n) for n in N_list)
    levels = sorted(int(n) for n in level_set)
    if N_ref is None:
        N_ref = int(math.ceil(2.5 * max(N_list)))
    if N_ref < max(N_list):
        raise ValueError(
            f"reference dimension {N_ref} must be at least every studied dimension"
        )
    if levels and levels[-1] >= min(N_list):
        raise ValueError(
            f"level {levels[-1]} is outside the smallest block N={min(N_list)}"
        )
    ref = solve_spectrum(pot, N_ref, optimize_sigma=optimize_sigma)
    rows = []
    omegas = {N_ref: ref.pms.omega}
    for n_dim in N_list:
        rep = solve_spectrum(pot, n_dim, optimize_sigma=optimize_sigma)
        omegas[n_dim] = rep.pms.omega
        for lvl in levels:
            e = float(rep.energies[lvl])
            delta = abs(e - float(ref.energies[lvl]))
            rows.append((n_dim, lvl, e, delta))
    study = ConvergenceStudy(n_ref=N_ref, rows=tuple(rows), pms_omegas=omegas)
    return SpectrumReport(pms=ref.pms, solution=ref.solution,
                          requested_levels=range(N_ref), convergence=study)


def write_levels_csv(path, report: SpectrumReport, levels: range | None = None):
    """Write (n, E_n) rows; floats carry 17 significant digits."""
    levels = levels if levels is not None else report.requested_levels
    lines = ["n,energy"]
    for n in levels:
        lines.append(f"{n},{_FMT.format(report.energy(n))}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_convergence_csv(path, study: ConvergenceStudy):
    """Write (N, n, delta) rows from a convergence study."""
    lines = ["N,n,delta"]
    for n_dim, lvl, _e, delta in study.rows:
        lines.append(f"{n_dim},{lvl},{_FMT.format(delta)}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_trace_scan_csv(path, dim: int, omegas: np.ndarray, values: np.ndarray,
                         omega_pms: float | None):
    """Write (omega, trace_over_n, is_pms) rows for one block dimension.

    is_pms flags the grid point closest to the stationary frequency, when one
    was found inside the grid.
    """
    mark = -1
    if omega_pms is not None:
        mark = int(np.argmin(np.abs(np.asarray(omegas) - omega_pms)))
    lines = [f"# dim={dim}", "omega,trace_over_n,is_pms"]
    for i, (w, v) in enumerate(zip(omegas, values)):
        lines.append(f"{_FMT.format(w)},{_FMT.format(v)},{1 if i == mark else 0}")
    Path(path).write_text("\n".join(lines) + "\n")
