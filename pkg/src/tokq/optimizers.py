"""SPSA minimizer with a full per-iteration trace."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidArgumentError, NonFiniteObjectiveError


@dataclass(frozen=True)
class SpsaConfig:
    """Gain schedule ``a_k = a/(k+1+A)**alpha``, ``c_k = c/(k+1)**gamma_exp``.

    ``a=None`` calibrates ``a`` from the first gradient estimate so that the
    first step moves each parameter by about ``target_step`` on average.
    ``A=None`` means ``0.1 * iterations``.
    """

    iterations: int = 100
    a: Optional[float] = None
    c: float = 0.1
    A: Optional[float] = None
    alpha: float = 0.602
    gamma_exp: float = 0.101
    seed: int = 0
    target_step: float = 0.1

    def __post_init__(self):
        if self.iterations < 1:
            raise InvalidArgumentError(f"iterations must be positive, got {self.iterations}")
        if self.a is not None and not self.a > 0:
            raise InvalidArgumentError(f"a must be positive, got {self.a}")
        if not self.c > 0:
            raise InvalidArgumentError(f"c must be positive, got {self.c}")
        if self.A is not None and self.A < 0:
            raise InvalidArgumentError(f"A must be non-negative, got {self.A}")
        if not 0.5 < self.alpha <= 1.0:
            raise InvalidArgumentError(f"alpha must lie in (0.5, 1], got {self.alpha}")
        if not 0.0 < self.gamma_exp <= 0.5:
            raise InvalidArgumentError(f"gamma_exp must lie in (0, 0.5], got {self.gamma_exp}")
        if not self.target_step > 0:
            raise InvalidArgumentError(f"target_step must be positive, got {self.target_step}")

    @property
    def stability(self) -> float:
        return 0.1 * self.iterations if self.A is None else self.A


@dataclass
class OptTrace:
    params: list[np.ndarray] = field(default_factory=list)
    objective: list[float] = field(default_factory=list)
    n_evaluations: int = 0
    gain_a: float = float("nan")

    def append(self, theta: np.ndarray, value: float) -> None:
        self.params.append(np.array(theta, dtype=float))
        self.objective.append(float(value))

    def __len__(self):
        return len(self.objective)

    @property
    def best_so_far(self) -> np.ndarray:
        return np.minimum.accumulate(np.asarray(self.objective))

    @property
    def best_index(self) -> int:
        return int(np.argmin(self.objective))

    @property
    def best_params(self) -> np.ndarray:
        return self.params[self.best_index].copy()

    @property
    def best_value(self) -> float:
        return self.objective[self.best_index]


class Spsa:
    """Resumable SPSA iteration state.

    Holds the iterate, the perturbation stream and the iteration counter so a
    run can be advanced in blocks, forked (``copy.deepcopy``) or have its
    iterate replaced between blocks without disturbing the gain schedule.
    """

    def __init__(self, objective: Callable[[np.ndarray], float], theta0, config: SpsaConfig,
                 post_step: Callable[[np.ndarray], np.ndarray] | None = None):
        self.objective = objective
        self.config = config
        self.post_step = post_step
        self.theta = np.array(theta0, dtype=float).reshape(-1)
        self.rng = np.random.default_rng(config.seed)
        self.k = 0
        self.a = config.a
        self.trace = OptTrace()
        self.trace.append(self.theta, self._eval(self.theta))

    def __deepcopy__(self, memo):
        twin = object.__new__(Spsa)
        twin.objective = self.objective
        twin.config = self.config
        twin.post_step = self.post_step
        twin.theta = self.theta.copy()
        twin.rng = np.random.default_rng()
        twin.rng.bit_generator.state = self.rng.bit_generator.state
        twin.k = self.k
        twin.a = self.a
        twin.trace = OptTrace(list(self.trace.params), list(self.trace.objective),
                              self.trace.n_evaluations, self.trace.gain_a)
        return twin

    @property
    def value(self) -> float:
        """Objective at the current nominal iterate."""
        return self.trace.objective[-1]

    def _eval(self, x: np.ndarray) -> float:
        val = float(self.objective(x))
        self.trace.n_evaluations += 1
        if not math.isfinite(val):
            raise NonFiniteObjectiveError(f"objective returned {val} at theta={x.tolist()}")
        return val

    def step(self, n: int = 1) -> None:
        cfg = self.config
        A = cfg.stability
        for _ in range(n):
            k = self.k
            ck = cfg.c / (k + 1) ** cfg.gamma_exp
            delta = self.rng.integers(0, 2, size=self.theta.size) * 2.0 - 1.0
            diff = self._eval(self.theta + ck * delta) - self._eval(self.theta - ck * delta)
            ghat = diff / (2.0 * ck * delta)
            if self.a is None:
                scale = float(np.mean(np.abs(ghat)))
                self.a = cfg.target_step * (A + 1) ** cfg.alpha / scale if scale > 0 else None
            ak = 0.0 if self.a is None else self.a / (k + 1 + A) ** cfg.alpha
            theta = self.theta - ak * ghat
            if self.post_step is not None:
                theta = np.asarray(self.post_step(theta), dtype=float)
            self.theta = theta
            self.k += 1
            self.trace.gain_a = float("nan") if self.a is None else self.a
            self.trace.append(theta, self._eval(theta))

    def replace(self, theta, value: float | None = None) -> None:
        """Swap in an external iterate (e.g. transferred parameters).

        The new point is appended to the trace; pass ``value`` to reuse a
        known objective value instead of re-evaluating.
        """
        self.theta = np.array(theta, dtype=float).reshape(-1)
        v = self._eval(self.theta) if value is None else float(value)
        self.trace.append(self.theta, v)


def spsa_minimize(objective: Callable[[np.ndarray], float], theta0, config: SpsaConfig,
                  post_step: Callable[[np.ndarray], np.ndarray] | None = None):
    """Minimize ``objective`` with SPSA; returns ``(theta_final, trace)``.

    Each iteration spends two probe evaluations on the gradient estimate and
    one on the new nominal iterate, so a run costs ``3*iterations + 1`` calls.
    Gains: ``a_k = a/(k+1+A)**alpha`` and ``c_k = c/(k+1)**gamma_exp`` with
    Rademacher perturbations. Raises ``NonFiniteObjectiveError`` if the
    objective returns inf/nan.
    """
    opt = Spsa(objective, theta0, config, post_step)
    opt.step(config.iterations)
    return opt.theta.copy(), opt.trace
