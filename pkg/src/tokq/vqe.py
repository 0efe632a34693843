"""H2 VQE with the single-parameter UCC ansatz and sequential parameter transfer.

The molecule is a 2-qubit reduced Hamiltonian

    H(r) = g0 I + g1 Z0 + g2 Z1 + g3 Z0 Z1 + g4 X0 X1 + g5 Y0 Y1

tabulated over bond lengths ``r`` (Angstrom, energies in Hartree). The ansatz
``exp(-i theta X0 Y1)`` acts on the Hartree-Fock state |01>.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

from .errors import InvalidArgumentError, ParseError
from .optimizers import OptTrace, Spsa, SpsaConfig
from .seeding import split_seed
from .simulator import (
    PauliSum,
    PauliTerm,
    apply_xy_exponential,
    exact_ground_energy,
    expectation,
    init_basis_state,
)

CHEMICAL_ACCURACY = 0.0016  # Ha, ~1 kcal/mol
HF_BITSTRING = "01"
HEADER = ["r", "g0", "g1", "g2", "g3", "g4", "g5"]
PAULI_LABELS = ["I", "Z0", "Z1", "Z0 Z1", "X0 X1", "Y0 Y1"]
_OPS = [{}, {0: "Z"}, {1: "Z"}, {0: "Z", 1: "Z"}, {0: "X", 1: "X"}, {0: "Y", 1: "Y"}]


@dataclass(frozen=True)
class H2Row:
    r: float
    g: tuple[float, float, float, float, float, float]

    def __post_init__(self):
        g = tuple(float(x) for x in self.g)
        if len(g) != 6:
            raise InvalidArgumentError(f"need 6 coefficients, got {len(g)}")
        if not (math.isfinite(self.r) and self.r > 0):
            raise InvalidArgumentError(f"bond length must be positive, got {self.r}")
        if not all(math.isfinite(x) for x in g):
            raise InvalidArgumentError(f"non-finite coefficient at r={self.r}")
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "g", g)


@dataclass(frozen=True)
class H2Table:
    rows: tuple[H2Row, ...]

    def __post_init__(self):
        rows = tuple(self.rows)
        if not rows:
            raise InvalidArgumentError("H2 table is empty")
        for a, b in zip(rows, rows[1:]):
            if not b.r > a.r:
                raise InvalidArgumentError(f"bond lengths must be strictly increasing ({a.r} then {b.r})")
        object.__setattr__(self, "rows", rows)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def index_of(self, r: float, tol: float = 1e-9) -> int:
        for i, row in enumerate(self.rows):
            if abs(row.r - r) <= tol:
                return i
        raise KeyError(f"no row at r={r}")

    def row_at(self, r: float) -> H2Row:
        return self.rows[self.index_of(r)]


def load_h2_table(path: str | Path) -> H2Table:
    path = Path(path)
    with path.open(newline="") as fh:
        return _read_table(fh, str(path))


def _read_table(fh, source: str) -> H2Table:
    reader = csv.reader(fh)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ParseError("empty file", None, source) from None
    missing = [h for h in HEADER if h not in header]
    if missing:
        raise ParseError(f"missing columns {missing}", 1, source)
    cols = [header.index(h) for h in HEADER]
    rows = []
    for lineno, rec in enumerate(reader, start=2):
        if not rec or all(not x.strip() for x in rec):
            continue
        try:
            vals = [float(rec[c]) for c in cols]
        except (IndexError, ValueError):
            raise ParseError(f"malformed row {rec!r}", lineno, source) from None
        if rows and not vals[0] > rows[-1].r:
            raise ParseError(f"bond length {vals[0]} is not greater than {rows[-1].r}", lineno, source)
        try:
            rows.append(H2Row(vals[0], tuple(vals[1:])))
        except InvalidArgumentError as exc:
            raise ParseError(str(exc), lineno, source) from None
    if not rows:
        raise ParseError("no data rows", None, source)
    return H2Table(tuple(rows))


def save_h2_table(table: H2Table, path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(HEADER)
        for row in table:
            w.writerow([f"{row.r:.2f}" if round(row.r, 2) == row.r else repr(row.r)]
                       + [repr(x) for x in row.g])


def default_table_path() -> Path:
    return Path(str(resources.files("tokq") / "data" / "h2_coefficients.csv"))


def default_h2_table() -> H2Table:
    return load_h2_table(default_table_path())


def h2_hamiltonian(row: H2Row) -> PauliSum:
    return PauliSum(PauliTerm(c, ops) for c, ops in zip(row.g, _OPS))


def ansatz_state(theta: float):
    return apply_xy_exponential(init_basis_state(2, HF_BITSTRING), 0, 1, theta)


def vqe_energy(row: H2Row, theta: float) -> float:
    """<H(r)> in ``exp(-i theta X0 Y1)|01>``."""
    return expectation(ansatz_state(float(theta)), h2_hamiltonian(row))


def exact_energy(row: H2Row) -> float:
    return exact_ground_energy(h2_hamiltonian(row), 2)


class EnergyFunction:
    """Fast ``theta -> energy`` for one row.

    The ansatz state is ``cos(theta)|01> - sin(theta)|10>`` (indices 2 and 1
    in little-endian order); the Hamiltonian matrix is built once.
    """

    def __init__(self, row: H2Row):
        self.row = row
        m = h2_hamiltonian(row).to_matrix(2)
        self.h_hf = m[2, 2].real
        self.h_de = m[1, 1].real
        self.h_mix = m[1, 2].real

    def __call__(self, theta) -> float:
        t = float(np.asarray(theta).reshape(-1)[0])
        c, s = math.cos(t), math.sin(t)
        return c * c * self.h_hf + s * s * self.h_de - 2.0 * c * s * self.h_mix


def grid_minimum(row: H2Row, step: float = 1e-3) -> tuple[float, float]:
    """Scan theta over [-pi, pi) and return ``(theta*, E*)``."""
    thetas = np.arange(-math.pi, math.pi, step)
    e = EnergyFunction(row)
    c, s = np.cos(thetas), np.sin(thetas)
    vals = c * c * e.h_hf + s * s * e.h_de - 2.0 * c * s * e.h_mix
    i = int(np.argmin(vals))
    return float(thetas[i]), float(vals[i])


def wrap_angle(theta):
    """Map into (-pi, pi]."""
    t = np.asarray(theta, dtype=float)
    return math.pi - np.mod(math.pi - t, 2.0 * math.pi)


def vqe_solve(row: H2Row, theta0: float, spsa: SpsaConfig, wrap: bool = False):
    """SPSA over theta; returns ``(theta, energy, trace)`` at the best traced iterate."""
    opt = Spsa(EnergyFunction(row), [theta0], spsa, post_step=wrap_angle if wrap else None)
    opt.step(spsa.iterations)
    tr = opt.trace
    return float(tr.best_params[0]), tr.best_value, tr


def ica(trace: OptTrace | Sequence[float], exact: float, tol: float = CHEMICAL_ACCURACY) -> int | None:
    """First iteration whose energy is within ``tol`` of ``exact``; None if never."""
    values = trace.objective if isinstance(trace, OptTrace) else list(trace)
    if len(values) == 0:
        raise InvalidArgumentError("empty trace")
    for k, v in enumerate(values):
        if abs(v - exact) < tol:
            return k
    return None


@dataclass
class SweepPoint:
    r: float
    theta0: float
    theta_final: float
    energy: float
    exact_energy: float
    ica: int | None
    trace: OptTrace = field(repr=False)


@dataclass
class SweepResult:
    mode: str
    points: list[SweepPoint]

    def at(self, r: float, tol: float = 1e-9) -> SweepPoint:
        for p in self.points:
            if abs(p.r - r) <= tol:
                return p
        raise KeyError(r)


def row_spsa(spsa: SpsaConfig, seed: int, index: int) -> SpsaConfig:
    return SpsaConfig(iterations=spsa.iterations, a=spsa.a, c=spsa.c, A=spsa.A, alpha=spsa.alpha,
                      gamma_exp=spsa.gamma_exp, seed=split_seed(seed, "row", index),
                      target_step=spsa.target_step)


def run_sweep(table: H2Table, spsa: SpsaConfig, mode: Literal["transfer", "cold-start"],
              seed: int, wrap: bool = False, tol: float = CHEMICAL_ACCURACY) -> SweepResult:
    """Solve every row in order of increasing ``r``.

    ``transfer`` starts row ``i`` from the best theta found at row ``i-1``
    (theta=0 for the first row); ``cold-start`` starts every row at theta=0,
    the Hartree-Fock point. Row seeds depend on the row index only, so both
    modes see the same perturbation streams.
    """
    if mode not in ("transfer", "cold-start"):
        raise InvalidArgumentError(f"unknown mode {mode!r}")
    points = []
    prev = 0.0
    for i, row in enumerate(table):
        theta0 = prev if mode == "transfer" else 0.0
        theta, e, tr = vqe_solve(row, theta0, row_spsa(spsa, seed, i), wrap)
        exact = exact_energy(row)
        points.append(SweepPoint(row.r, theta0, theta, e, exact, ica(tr, exact, tol), tr))
        prev = theta
    return SweepResult(mode, points)
