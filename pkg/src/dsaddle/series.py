"""Dirichlet series in two representations, with coefficient arithmetic.

A series F(s) = sum_{n>=1} f(n) n^{-s} is held either as a dense truncated
coefficient vector (:class:`CoefficientSeries`, the exact-arithmetic
backbone) or as closed-form evaluators for H = log F and its first three
derivatives (:class:`ClosedFormSeries`, the analytic backbone).

Coefficient arrays are 1-indexed: ``coeffs[0]`` is unused and zero, so a
vector of length N+1 covers n = 1..N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .errors import DomainError, RangeError

#: evaluation of a truncated series this close to its abscissa is refused;
#: the tail of the missing terms would silently dominate.
DEFAULT_EVAL_MARGIN = 0.05

_LOGN_CACHE: dict[int, np.ndarray] = {}


def log_indices(N: int) -> np.ndarray:
    """log(n) for n = 0..N with the unused slot 0 set to 0; cached."""
    arr = _LOGN_CACHE.get(N)
    if arr is None:
        arr = np.zeros(N + 1)
        arr[1:] = np.log(np.arange(1, N + 1, dtype=float))
        if len(_LOGN_CACHE) > 8:
            _LOGN_CACHE.clear()
        _LOGN_CACHE[N] = arr
    return arr


def _as_coeff_array(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise ValueError("coefficient array must be 1-d with slot 0 unused and N >= 1")
    if arr[0] != 0.0:
        raise ValueError("coefficient slot 0 must be zero (arrays are 1-indexed)")
    if not np.all(np.isfinite(arr)):
        raise ValueError("coefficients must be finite")
    return arr


@dataclass
class CoefficientSeries:
    """Truncated coefficient vector f(1..N) with a declared abscissa.

    ``a1`` records whether the series satisfies the nonnegativity/positivity
    assumptions (all f(n) >= 0 and f(1) > 0); exponentials of unrestricted
    log-series can violate them, so the flag is data, not a hard invariant.
    """

    coeffs: np.ndarray
    alpha: float
    label: str = ""
    a1: bool = True

    def __post_init__(self):
        self.coeffs = _as_coeff_array(self.coeffs)
        self.alpha = float(self.alpha)
        if self.a1:
            if self.coeffs[1] <= 0.0:
                raise ValueError("f(1) must be positive (flagged a1)")
            if np.any(self.coeffs[1:] < 0.0):
                raise ValueError("coefficients must be nonnegative (flagged a1)")
        self._sums = None
        self._log_coeffs = None

    @property
    def N(self) -> int:
        return self.coeffs.size - 1

    def f(self, n: int) -> float:
        if not 1 <= n <= self.N:
            raise DomainError(f"n={n} outside 1..{self.N}")
        return float(self.coeffs[n])

    @property
    def logn(self) -> np.ndarray:
        return log_indices(self.N)

    def _prefix_sums(self):
        # single-assignment cache: safe under concurrent readers
        sums = self._sums
        if sums is None:
            sums = (np.cumsum(self.coeffs),
                    np.cumsum(self.coeffs * np.arange(self.N + 1)))
            self._sums = sums
        return sums

    def log_series(self) -> "LogCoefficients":
        """dirichlet_log of this series, computed once and cached."""
        if self._log_coeffs is None:
            self._log_coeffs = dirichlet_log(self)
        return self._log_coeffs


@dataclass
class LogCoefficients:
    """Coefficients h(1..N) of H(s) = log F(s); signs unconstrained."""

    coeffs: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.coeffs = _as_coeff_array(self.coeffs)

    @property
    def N(self) -> int:
        return self.coeffs.size - 1


@dataclass
class ClosedFormSeries:
    """Closed-form evaluators for H(s), a = H', b = H'', c = H'''.

    All four evaluators accept complex s with Re(s) > alpha.  ``eval_H_delta``
    (optional) computes H(sigma+it) - H(sigma) without cancellation; methods
    fall back to naive subtraction when it is absent.  ``period``, when set,
    asserts exact periodicity of H(sigma + it) in t; ``factors`` carries the
    component series of a product.
    """

    alpha: float
    evalH: Callable[[complex], complex]
    evalA: Callable[[complex], complex]
    evalB: Callable[[complex], complex]
    evalC: Callable[[complex], complex]
    coeff_gen: Optional[Callable[[int], CoefficientSeries]] = None
    label: str = ""
    eval_H_delta: Optional[Callable[[float, float], complex]] = None
    eval_H_delta_vec: Optional[Callable[[float, np.ndarray], np.ndarray]] = None
    period: Optional[float] = None
    factors: tuple = ()
    eval_t_cap: float = math.inf  # |t| beyond which the evaluators degrade

    def H(self, s) -> complex:
        self._check_domain(s)
        return complex(self.evalH(complex(s)))

    def H_delta(self, sigma: float, t: float) -> complex:
        """H(sigma + it) - H(sigma), cancellation-safe when supported."""
        self._check_domain(sigma)
        if self.eval_H_delta is not None:
            return complex(self.eval_H_delta(float(sigma), float(t)))
        return complex(self.evalH(complex(sigma, t)) - self.evalH(complex(sigma)))

    def _check_domain(self, s):
        if complex(s).real <= self.alpha:
            raise DomainError(
                f"Re(s)={complex(s).real} not above abscissa alpha={self.alpha}"
            )


@dataclass(frozen=True)
class Remainder:
    """Taylor remainder R(sigma+it) of H about t = 0."""

    sigma: float
    t: float
    value: complex


@dataclass(frozen=True)
class EvalReport:
    """Value of a truncated evaluation plus its crude tail bound.

    ``tail_bound`` is None when no bound is available (Re(s) <= 1, where the
    integral comparison diverges); ``note`` says so.
    """

    value: complex
    tail_bound: Optional[float]
    note: str = ""


# ---------------------------------------------------------------------------
# coefficient arithmetic
# ---------------------------------------------------------------------------


def dirichlet_mul(f: CoefficientSeries, g: CoefficientSeries) -> CoefficientSeries:
    """Dirichlet convolution: coefficients of F(s)*G(s), truncated to min(N)."""
    N = min(f.N, g.N)
    out = _kernels.conv(np.ascontiguousarray(f.coeffs[: N + 1]),
                        np.ascontiguousarray(g.coeffs[: N + 1]), N)
    label = f"({f.label})*({g.label})" if f.label or g.label else ""
    a1 = bool(out[1] > 0.0 and np.all(out[1:] >= 0.0))
    return CoefficientSeries(out, alpha=max(f.alpha, g.alpha), label=label, a1=a1)


def dirichlet_exp(h: LogCoefficients, alpha: float = 0.0, label: str = "") -> CoefficientSeries:
    """Coefficients of exp(H) for a log-series H, truncated at the same N.

    Raises :class:`RangeError` if e^{h(1)} or any later coefficient overflows.
    """
    if h.coeffs[1] > 709.0:
        raise RangeError(f"exp(h(1)) overflows: h(1)={h.coeffs[1]}")
    N = h.N
    out = _kernels.exp_transform(np.ascontiguousarray(h.coeffs), log_indices(N), N)
    if not np.all(np.isfinite(out)):
        bad = int(np.flatnonzero(~np.isfinite(out))[0])
        raise RangeError(f"exp-transform overflowed at n={bad}")
    a1 = bool(out[1] > 0.0 and np.all(out[1:] >= 0.0))
    return CoefficientSeries(out, alpha=alpha, label=label or h.label, a1=a1)


def dirichlet_log(f: CoefficientSeries) -> LogCoefficients:
    """Inverse of :func:`dirichlet_exp`; requires f(1) > 0."""
    if f.coeffs[1] <= 0.0:
        raise DomainError("dirichlet_log requires f(1) > 0")
    out = _kernels.log_transform(np.ascontiguousarray(f.coeffs), log_indices(f.N), f.N)
    return LogCoefficients(out, label=f"log({f.label})" if f.label else "")


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def _coeff_tail_bound(f: CoefficientSeries, sigma: float):
    fmax = float(np.max(np.abs(f.coeffs[1:])))
    if sigma > 1.0:
        return fmax * f.N ** (1.0 - sigma) / (sigma - 1.0), ""
    return None, "tail bound unavailable (Re(s) <= 1)"


def eval_F_report(series, s, margin: float = DEFAULT_EVAL_MARGIN) -> EvalReport:
    """Evaluate F(s) with the truncation tail bound attached.

    Coefficient-backed: truncated sum, refused within ``margin`` of alpha.
    Closed-form: exp(H(s)), no tail.
    """
    s = complex(s)
    if isinstance(series, ClosedFormSeries):
        if s.real <= series.alpha:
            raise DomainError(f"Re(s)={s.real} <= alpha={series.alpha}")
        return EvalReport(np.exp(series.evalH(s)), 0.0)
    if s.real <= series.alpha:
        raise DomainError(f"Re(s)={s.real} <= alpha={series.alpha}")
    if s.real < series.alpha + margin:
        raise DomainError(
            f"Re(s)={s.real} within margin {margin} of alpha={series.alpha}; "
            "truncated tail would dominate"
        )
    logn = series.logn
    value = complex(np.sum(series.coeffs[1:] * np.exp(-s * logn[1:])))
    bound, note = _coeff_tail_bound(series, s.real)
    return EvalReport(value, bound, note)


def eval_F(series, s, margin: float = DEFAULT_EVAL_MARGIN) -> complex:
    """F(s); see :func:`eval_F_report` for the tail-bound variant."""
    return eval_F_report(series, s, margin=margin).value


def eval_derivatives(series, sigma: float, margin: float = DEFAULT_EVAL_MARGIN):
    """(a, b, c) = (H', H'', H''') at real sigma > alpha.

    Coefficient-backed series use the log-coefficients h = dirichlet_log(f):
    a = -sum h(n) log n n^{-sigma}, b with (log n)^2, c with -(log n)^3.
    """
    sigma = float(sigma)
    if isinstance(series, ClosedFormSeries):
        series._check_domain(sigma)
        a = series.evalA(complex(sigma))
        b = series.evalB(complex(sigma))
        c = series.evalC(complex(sigma))
        return (float(np.real(a)), float(np.real(b)), float(np.real(c)))
    if sigma <= series.alpha:
        raise DomainError(f"sigma={sigma} <= alpha={series.alpha}")
    if sigma < series.alpha + margin:
        raise DomainError(f"sigma={sigma} within margin {margin} of alpha")
    h = series.log_series().coeffs
    logn = series.logn
    weights = h[1:] * np.exp(-sigma * logn[1:])
    a = -float(np.sum(weights * logn[1:]))
    b = float(np.sum(weights * logn[1:] ** 2))
    c = -float(np.sum(weights * logn[1:] ** 3))
    return a, b, c


def eval_H(series, s, margin: float = DEFAULT_EVAL_MARGIN) -> complex:
    """H(s) = log F(s) via the series' own representation."""
    s = complex(s)
    if isinstance(series, ClosedFormSeries):
        return series.H(s)
    if s.real <= series.alpha:
        raise DomainError(f"Re(s)={s.real} <= alpha={series.alpha}")
    if s.real < series.alpha + margin:
        raise DomainError(f"Re(s)={s.real} within margin {margin} of alpha")
    h = series.log_series().coeffs
    logn = series.logn
    return complex(np.sum(h[1:] * np.exp(-s * logn[1:])))


def _expim1(theta):
    """e^{i theta} - 1 without cancellation: (-2 sin^2(t/2), sin t)."""
    return -2.0 * np.sin(theta / 2.0) ** 2 + 1j * np.sin(theta)


def eval_H_delta(series, sigma: float, t: float, margin: float = DEFAULT_EVAL_MARGIN) -> complex:
    """H(sigma+it) - H(sigma), cancellation-safe.

    Coefficient-backed series sum h(n) n^{-sigma} (e^{-it log n} - 1) directly;
    closed forms delegate to their stable delta when provided.
    """
    if isinstance(series, ClosedFormSeries):
        return series.H_delta(sigma, t)
    if sigma <= series.alpha:
        raise DomainError(f"sigma={sigma} <= alpha={series.alpha}")
    if sigma < series.alpha + margin:
        raise DomainError(f"sigma={sigma} within margin {margin} of alpha")
    h = series.log_series().coeffs
    logn = series.logn
    weights = h[1:] * np.exp(-sigma * logn[1:])
    return complex(np.sum(weights * _expim1(-t * logn[1:])))


def eval_H_delta_many(series, sigma: float, ts, margin: float = DEFAULT_EVAL_MARGIN) -> np.ndarray:
    """H(sigma+it) - H(sigma) over an array of t values (cancellation-safe)."""
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if isinstance(series, ClosedFormSeries):
        series._check_domain(sigma)
        if series.eval_H_delta_vec is not None:
            return np.asarray(series.eval_H_delta_vec(float(sigma), ts), dtype=complex)
        return np.array([series.H_delta(sigma, t) for t in ts], dtype=complex)
    if sigma <= series.alpha:
        raise DomainError(f"sigma={sigma} <= alpha={series.alpha}")
    if sigma < series.alpha + margin:
        raise DomainError(f"sigma={sigma} within margin {margin} of alpha")
    h = series.log_series().coeffs
    logn = series.logn
    weights = h[1:] * np.exp(-sigma * logn[1:])
    out = np.empty(ts.shape, dtype=complex)
    rows = max(1, 4_000_000 // max(1, logn.size))
    for lo in range(0, ts.size, rows):
        hi = min(lo + rows, ts.size)
        theta = np.multiply.outer(-ts[lo:hi], logn[1:])
        out[lo:hi] = (-2.0 * np.sin(theta / 2.0) ** 2 + 1j * np.sin(theta)) @ weights
    return out


def remainder(series, sigma: float, t: float) -> complex:
    """Taylor remainder R(sigma+it) = H(sigma+it) - H(sigma) - i a t + b t^2/2."""
    sigma, t = float(sigma), float(t)
    if t == 0.0:
        # touch the domain check even in the trivial case
        eval_derivatives(series, sigma)
        return 0.0 + 0.0j
    a, b, _ = eval_derivatives(series, sigma)
    return eval_H_delta(series, sigma, t) - 1j * a * t + 0.5 * b * t * t


def remainder_record(series, sigma: float, t: float) -> Remainder:
    return Remainder(float(sigma), float(t), remainder(series, sigma, t))


# ---------------------------------------------------------------------------
# exact oracles
# ---------------------------------------------------------------------------


def partial_sum(f: CoefficientSeries, x: float) -> float:
    """F(x) = sum_{n<=x} f(n), exact for 1 <= x <= N."""
    if not 1.0 <= x <= f.N:
        raise DomainError(f"x={x} outside [1, N={f.N}]")
    prefix, _ = f._prefix_sums()
    return float(prefix[int(math.floor(x))])


def hat_F(f: CoefficientSeries, x: float) -> float:
    """Integral of the partial-sum step function over [1, x].

    F(u) is a right-continuous step function, so the integral is exactly
    sum_{n<=x} f(n) (x - n); no quadrature is involved.
    """
    if not 1.0 <= x <= f.N:
        raise DomainError(f"x={x} outside [1, N={f.N}]")
    prefix, weighted = f._prefix_sums()
    m = int(math.floor(x))
    return float(x * prefix[m] - weighted[m])


def estimate_alpha(f: CoefficientSeries):
    """Cahen-style abscissa estimate: max of log F(x)/log x over x in [N/2, N].

    Returns (estimate, caveat).  Crude by construction; the declared alpha is
    always preferred when known.
    """
    xs = np.unique(np.linspace(max(2, f.N // 2), f.N, 32, dtype=int))
    vals = []
    for x in xs:
        Fx = partial_sum(f, float(x))
        if Fx > 0:
            vals.append(math.log(Fx) / math.log(x))
    if not vals:
        raise DomainError("partial sums nonpositive; cannot estimate alpha")
    return max(vals), "limsup surrogate over one octave; treat as a hint"


# ---------------------------------------------------------------------------
# coefficient file format
# ---------------------------------------------------------------------------


def write_coefficient_file(path_or_file, series: CoefficientSeries, keep_zeros: bool = False):
    """Write the 'n value' text format with an '# alpha=... label=...' header."""
    own = isinstance(path_or_file, (str, bytes))
    fh = open(path_or_file, "w", encoding="utf-8") if own else path_or_file
    try:
        fh.write(f"# alpha={float(series.alpha)!r} label={series.label}\n")
        for n in range(1, series.N + 1):
            v = float(series.coeffs[n])
            if keep_zeros or v != 0.0:
                fh.write(f"{n} {v!r}\n")
    finally:
        if own:
            fh.close()


def read_coefficient_file(path_or_file, N: Optional[int] = None) -> CoefficientSeries:
    """Parse the text format: 1-based, strictly increasing n, missing n = 0."""
    own = isinstance(path_or_file, (str, bytes))
    fh = open(path_or_file, "r", encoding="utf-8") if own else path_or_file
    try:
        alpha = 0.0
        label = ""
        pairs = []
        last_n = 0
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("alpha="):
                    head, _, rest = body.partition(" label=")
                    alpha = float(head[len("alpha="):])
                    label = rest
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 'n value', got {line!r}")
            n = int(parts[0])
            if n <= last_n:
                raise ValueError(f"line {lineno}: n must be strictly increasing")
            last_n = n
            pairs.append((n, float(parts[1])))
        size = N if N is not None else (last_n if last_n else 1)
        coeffs = np.zeros(size + 1)
        for n, v in pairs:
            if n <= size:
                coeffs[n] = v
        a1 = bool(coeffs[1] > 0.0 and np.all(coeffs[1:] >= 0.0))
        return CoefficientSeries(coeffs, alpha=alpha, label=label, a1=a1)
    finally:
        if own:
            fh.close()
