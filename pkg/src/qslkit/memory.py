"""Environmental memory functions for an exponential bath correlation.

The bath correlation is the Ornstein-Uhlenbeck kernel
``G(t, s) = (Gamma * gamma / 2) exp(-gamma |t - s|)``: ``Gamma`` sets the
overall system-bath coupling rate and ``gamma`` the inverse memory time
(``gamma >> Gamma`` is effectively memoryless, ``gamma << Gamma``
strongly non-Markovian).

Pure dephasing only needs the accumulated kernel ``gbar`` and its time
integral.  Energy dissipation needs the auxiliary function ``P(t)``
obeying the scalar Riccati equation

    dP/dt = Gamma*gamma/2 - gamma*P + P^2,   P(0) = 0,

together with its running integral ``xi(t)``.  ``P`` is kept complex even
though this kernel makes it real, so the code path matches the general
complex case; for ``gamma < 2*Gamma`` the Riccati solution diverges at a
finite time, which is detected and reported rather than integrated
through.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

#: Integration aborts once |P| exceeds this multiple of the coupling rate.
BLOWUP_FACTOR = 1e3

#: Hard upper bound on the Riccati integration step, in units of 1/gamma.
MAX_GAMMA_STEP = 0.1

#: Relative tolerance for matching query times against a stored grid.
GRID_MATCH_TOL = 1e-9


class RiccatiBlowupError(RuntimeError):
    """Finite-time divergence of the Riccati memory function."""

    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = time


@dataclass(frozen=True)
class OUParams:
    """Rates of the exponential bath kernel.

    ``coupling`` is the overall rate (Gamma), ``memory_rate`` the inverse
    correlation time (gamma).  Both must be positive; ``memory_rate`` may
    be ``inf`` as a marker for the exact memoryless limit.
    """

    coupling: float
    memory_rate: float

    def __post_init__(self):
        if not self.coupling > 0.0:
            raise ValueError(f"coupling rate must be positive, got {self.coupling}")
        if not self.memory_rate > 0.0:
            raise ValueError(f"memory rate must be positive, got {self.memory_rate}")


@dataclass(frozen=True)
class MarkovLimits:
    """Asymptotic memoryless-limit constants used by closed-form branches."""

    f_inf: float
    p_inf: float


def markov_limits(p: OUParams) -> MarkovLimits:
    """Memoryless-limit values: dephasing rate ``Gamma``, dissipation ``Gamma/2``."""
    return MarkovLimits(f_inf=p.coupling, p_inf=0.5 * p.coupling)


def ou_kernel(t: float, s: float, p: OUParams) -> complex:
    """Bath correlation ``(Gamma*gamma/2) exp(-gamma |t-s|)`` (real for this kernel)."""
    return complex(0.5 * p.coupling * p.memory_rate * math.exp(-p.memory_rate * abs(t - s)))


def gbar(t: float, p: OUParams) -> complex:
    """Accumulated kernel ``integral_0^t G(t, s) ds = (Gamma/2)(1 - exp(-gamma t))``."""
    if t < 0.0:
        raise ValueError(f"time must be nonnegative, got {t}")
    return complex(0.5 * p.coupling * -math.expm1(-p.memory_rate * t))


def f_rate(t: float, p: OUParams) -> float:
    """Instantaneous dephasing rate ``gbar + gbar* = Gamma (1 - exp(-gamma t))``."""
    return 2.0 * gbar(t, p).real


def beta_integral(tau: float, p: OUParams) -> float:
    """Dephasing exponent ``2 integral_0^tau f(t) dt``.

    Closed form ``2 Gamma [tau - (1 - exp(-gamma tau)) / gamma]``; monotone
    nondecreasing in ``tau`` and bounded above by the memoryless line
    ``2 Gamma tau``.
    """
    if tau < 0.0:
        raise ValueError(f"time must be nonnegative, got {tau}")
    g = p.memory_rate
    return 2.0 * p.coupling * (tau + math.expm1(-g * tau) / g)


class MemoryFunctions:
    """Dephasing memory: closed-form kernel integrals, with a memoryless branch.

    With ``markov=True`` the exact limit ``f = Gamma`` (hence exponent
    ``beta = 2 Gamma tau``) is used and ``memory_rate`` is ignored.
    """

    def __init__(self, params: OUParams, markov: bool = False):
        self.params = params
        self.markov = bool(markov)

    @classmethod
    def markov_limit(cls, coupling: float) -> "MemoryFunctions":
        return cls(OUParams(coupling=coupling, memory_rate=math.inf), markov=True)

    @property
    def coupling(self) -> float:
        return self.params.coupling

    def gbar(self, t: float) -> complex:
        if self.markov:
            if t < 0.0:
                raise ValueError(f"time must be nonnegative, got {t}")
            return complex(0.5 * self.params.coupling)
        return gbar(t, self.params)

    def f(self, t: float) -> float:
        """Instantaneous coherence-decay rate at time ``t``."""
        if self.markov:
            if t < 0.0:
                raise ValueError(f"time must be nonnegative, got {t}")
            return self.params.coupling
        return f_rate(t, self.params)

    def beta(self, tau: float) -> float:
        """Accumulated coherence-decay exponent up to time ``tau``."""
        if self.markov:
            if tau < 0.0:
                raise ValueError(f"time must be nonnegative, got {tau}")
            return 2.0 * self.params.coupling * tau
        return beta_integral(tau, self.params)

    def __repr__(self) -> str:
        tag = "markov" if self.markov else f"gamma={self.params.memory_rate}"
        return f"MemoryFunctions(Gamma={self.params.coupling}, {tag})"


@dataclass
class DissipationMemory:
    """Sampled dissipation memory on a uniform time grid.

    Stores ``P(t)``, its running integral ``xi(t)`` and the derived real
    quantities ``b = Re xi``, ``c = Im xi`` and
    ``d = Im[P(t) exp(-xi(t))]``.  Samples are immutable after
    construction; queries off the grid are rejected rather than
    interpolated so that propagation stays at full integrator order.
    """

    params: OUParams
    grid: np.ndarray
    p_samples: np.ndarray
    xi_samples: np.ndarray
    b: np.ndarray = field(init=False)
    c: np.ndarray = field(init=False)
    d: np.ndarray = field(init=False)
    markov: bool = False

    def __post_init__(self):
        self.b = self.xi_samples.real.copy()
        self.c = self.xi_samples.imag.copy()
        self.d = (self.p_samples * np.exp(-self.xi_samples)).imag.copy()

    # -- construction-time diagnostics (flagged, never clipped) --------

    @property
    def b_monotone(self) -> bool:
        return bool(np.all(np.diff(self.b) >= -1e-12))

    @property
    def max_abs_im_p(self) -> float:
        return float(np.max(np.abs(self.p_samples.imag)))

    @property
    def max_re_p(self) -> float:
        return float(np.max(self.p_samples.real))

    # -- grid queries ---------------------------------------------------

    def index_of(self, t: float) -> int:
        """Index of grid time ``t``; rejects times off or beyond the grid."""
        h = self.grid[1] - self.grid[0]
        idx = int(round((t - self.grid[0]) / h))
        if idx < 0 or idx >= len(self.grid):
            raise ValueError(f"time {t} outside memory grid [0, {self.grid[-1]}]")
        tol = GRID_MATCH_TOL * max(1.0, float(self.grid[-1]))
        if abs(self.grid[idx] - t) > tol:
            raise ValueError(f"time {t} is not on the memory grid (step {h})")
        return idx

    def p_at(self, t: float) -> complex:
        return complex(self.p_samples[self.index_of(t)])

    def xi_at(self, t: float) -> complex:
        return complex(self.xi_samples[self.index_of(t)])

    def b_at(self, t: float) -> float:
        return float(self.b[self.index_of(t)])

    def c_at(self, t: float) -> float:
        return float(self.c[self.index_of(t)])

    def d_at(self, t: float) -> float:
        return float(self.d[self.index_of(t)])


def default_riccati_step(p: OUParams) -> float:
    """Default integration step: both rates bound the stiffness."""
    return min(1.0 / (50.0 * p.memory_rate), 1.0 / (50.0 * p.coupling))


def _check_uniform_grid(grid: np.ndarray) -> float:
    if grid.ndim != 1 or len(grid) < 2:
        raise ValueError("grid must contain at least two times")
    if abs(grid[0]) > 1e-12:
        raise ValueError(f"grid must start at 0, got {grid[0]}")
    h = float(grid[1] - grid[0])
    if h <= 0.0 or not np.allclose(np.diff(grid), h, rtol=0.0, atol=GRID_MATCH_TOL * max(1.0, float(grid[-1]))):
        raise ValueError("grid must be uniformly increasing")
    return h


def riccati_p(grid, p: OUParams) -> DissipationMemory:
    """Integrate the Riccati memory equation on a uniform grid.

    Fourth-order fixed-step integration of the pair ``(P, xi)`` with
    ``dxi/dt = P``, so the running integral carries the same order as
    ``P`` itself (the ``xi`` update is a Simpson-type rule over the
    integrator substeps).  Divergence is detected via ``BLOWUP_FACTOR``.
    """
    grid = np.asarray(grid, dtype=float)
    h = _check_uniform_grid(grid)
    if p.memory_rate * h > MAX_GAMMA_STEP * (1.0 + 1e-12):
        raise ValueError(
            f"step {h} too large for memory rate {p.memory_rate}: "
            f"need gamma*step <= {MAX_GAMMA_STEP}"
        )

    drive = 0.5 * p.coupling * p.memory_rate
    gamma = p.memory_rate
    limit = BLOWUP_FACTOR * p.coupling

    def rhs(y: np.ndarray) -> np.ndarray:
        pv = y[0]
        return np.array([drive - gamma * pv + pv * pv, pv], dtype=complex)

    n = len(grid)
    p_samples = np.zeros(n, dtype=complex)
    xi_samples = np.zeros(n, dtype=complex)
    y = np.zeros(2, dtype=complex)
    for k in range(n - 1):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.isfinite(y[0]) or abs(y[0]) > limit:
            raise RiccatiBlowupError(
                f"memory function diverged near t = {grid[k + 1]:.6g} "
                f"(|P| > {limit:.3g}); finite-time divergence is expected for "
                f"memory_rate < 2*coupling",
                time=float(grid[k + 1]),
            )
        p_samples[k + 1] = y[0]
        xi_samples[k + 1] = y[1]
    return DissipationMemory(params=p, grid=grid, p_samples=p_samples, xi_samples=xi_samples)


def markov_dissipation(grid, p: OUParams) -> DissipationMemory:
    """Exact memoryless branch: ``P = Gamma/2`` constant, ``xi = Gamma t / 2``."""
    grid = np.asarray(grid, dtype=float)
    _check_uniform_grid(grid)
    half = 0.5 * p.coupling
    p_samples = np.full(len(grid), half, dtype=complex)
    xi_samples = (half * grid).astype(complex)
    return DissipationMemory(
        params=p, grid=grid, p_samples=p_samples, xi_samples=xi_samples, markov=True
    )
