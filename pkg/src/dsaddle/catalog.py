"""Built-in series with closed forms and exact coefficient generators.

Keys:
    exp_zeta                 exp(zeta(s)),            alpha = 1
    exp_zeta_shift:<lam>     exp(zeta(s - lam)),      alpha = 1 + lam
    exp_zeta_pow:<k>         exp(zeta(s)^k),          alpha = 1
    exp_geom:<k>             exp(1/(1 - k^{-s})),     alpha = 0
    zeta_y:<y>               prod_{p<=y} (1-p^{-s})^{-1}, alpha = 0
    zeta_pow:<k>             zeta(s)^k,               alpha = 1
    fg:<n1^m1,n2^m2,...>     prod (1-n_j^{-s})^{-m_j}, alpha = 0

Each entry carries the expected classification, a witness factory, a
coefficient generator for the exact oracles, and a recommended grid depth
for the trend audits (the zeta-family conditions turn around late, so their
grids go much deeper than the generic default).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .admissibility import Witness, WitnessedSeries, default_delta, tenenbaum_witness
from .errors import DomainError, RangeError
from .jets import Jet, cexpm1, one_minus_power_jet
from .series import ClosedFormSeries, CoefficientSeries, LogCoefficients, dirichlet_exp, dirichlet_mul
from .zeta import zeta_delta, zeta_delta_vec, zeta_jet

_ZETA_T_CAP = 4000.0

ADMISSIBLE = "ADMISSIBLE"
T_ADMISSIBLE = "T_ADMISSIBLE"
NOT_ADMISSIBLE = "NOT_ADMISSIBLE"
CONDITIONAL = "CONDITIONAL"


@dataclass
class CatalogEntry:
    key: str
    closed: ClosedFormSeries
    expected: str
    grid_K: int
    witness_factory: Callable[[], Witness]
    coeff_factory: Callable[[int], CoefficientSeries]
    notes: str = ""
    _coeff_cache: dict = field(default_factory=dict, repr=False)

    @property
    def label(self):
        return self.closed.label

    @property
    def alpha(self):
        return self.closed.alpha

    def coeffs(self, N: int) -> CoefficientSeries:
        if N not in self._coeff_cache:
            if len(self._coeff_cache) > 4:
                self._coeff_cache.clear()
            self._coeff_cache[N] = self.coeff_factory(N)
        return self._coeff_cache[N]

    def witness(self) -> Witness:
        return self.witness_factory()

    def witnessed(self, N: Optional[int] = None) -> WitnessedSeries:
        return WitnessedSeries(series=self.closed, witness=self.witness(),
                               coeffs=self.coeffs(N) if N else None)


def _clog1p(z):
    """log(1+z) for complex arrays, series-accurate near 0."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-4
    safe = np.where(small, 0.0, z)  # keep log's argument away from -1 on the unused lane
    return np.where(
        small,
        z * (1 - z * (0.5 - z * (1.0 / 3.0 - z * 0.25))),
        np.log(1.0 + safe),
    )


def _jet_evaluators(jet_fn):
    return dict(
        evalH=lambda s: jet_fn(s).f0,
        evalA=lambda s: jet_fn(s).f1,
        evalB=lambda s: jet_fn(s).f2,
        evalC=lambda s: jet_fn(s).f3,
    )


# ---------------------------------------------------------------------------
# exp(zeta(s - lam))
# ---------------------------------------------------------------------------


def make_exp_zeta(lam: float = 0.0) -> CatalogEntry:
    if lam < 0:
        raise DomainError("lambda must be >= 0")
    alpha = 1.0 + lam

    def jet_fn(s):
        return zeta_jet(complex(s) - lam)

    closed = ClosedFormSeries(
        alpha=alpha,
        **_jet_evaluators(jet_fn),
        label="exp_zeta" if lam == 0 else f"exp_zeta_shift:{lam:g}",
        eval_H_delta=lambda sigma, t: zeta_delta(sigma - lam, t),
        eval_H_delta_vec=lambda sigma, ts: zeta_delta_vec(sigma - lam, ts),
        eval_t_cap=_ZETA_T_CAP,
    )

    def coeff_factory(N):
        if lam * math.log(max(N, 2)) > 709.0:
            raise RangeError(f"n^lambda overflows for lambda={lam}, N={N}")
        h = np.zeros(N + 1)
        h[1:] = np.arange(1, N + 1, dtype=float) ** lam
        return dirichlet_exp(LogCoefficients(h), alpha=alpha, label=closed.label)

    closed.coeff_gen = coeff_factory
    return CatalogEntry(
        key=closed.label, closed=closed, expected=T_ADMISSIBLE, grid_K=44,
        witness_factory=lambda: tenenbaum_witness(closed, beta=alpha + 1.0),
        coeff_factory=coeff_factory,
        notes="T-witness T(sigma)=b(sigma); conditions turn late, grid goes deep",
    )


# ---------------------------------------------------------------------------
# exp(zeta(s)^k)
# ---------------------------------------------------------------------------


def _dk_log_coeffs(N, k):
    ones = np.ones(N + 1)
    ones[0] = 0.0
    acc = CoefficientSeries(ones.copy(), alpha=1.0, label="zeta")
    base = CoefficientSeries(ones, alpha=1.0, label="zeta")
    for _ in range(k - 1):
        acc = dirichlet_mul(acc, base)
    return acc.coeffs


def make_exp_zeta_pow(k: int = 1) -> CatalogEntry:
    if not 1 <= int(k) <= 8:
        raise DomainError("k must be in 1..8")
    k = int(k)
    if k == 1:
        entry = make_exp_zeta(0.0)
        return CatalogEntry(key="exp_zeta_pow:1", closed=entry.closed,
                            expected=entry.expected, grid_K=entry.grid_K,
                            witness_factory=entry.witness_factory,
                            coeff_factory=entry.coeff_factory, notes=entry.notes)

    def jet_fn(s):
        return zeta_jet(complex(s)).ipow(k)

    def hdelta_vec(sigma, ts):
        z0 = zeta_jet(sigma).f0
        zd = zeta_delta_vec(sigma, ts)
        out = np.zeros(np.shape(ts), dtype=complex)
        for j in range(1, k + 1):
            out = out + math.comb(k, j) * zd ** j * z0 ** (k - j)
        return out

    closed = ClosedFormSeries(
        alpha=1.0,
        **_jet_evaluators(jet_fn),
        label=f"exp_zeta_pow:{k}",
        eval_H_delta=lambda sigma, t: complex(hdelta_vec(sigma, np.array([t]))[0]),
        eval_H_delta_vec=hdelta_vec,
        eval_t_cap=_ZETA_T_CAP,
    )

    def coeff_factory(N):
        h = _dk_log_coeffs(N, k)
        return dirichlet_exp(LogCoefficients(h), alpha=1.0, label=closed.label)

    closed.coeff_gen = coeff_factory
    return CatalogEntry(
        key=closed.label, closed=closed, expected=T_ADMISSIBLE, grid_K=28,
        witness_factory=lambda: tenenbaum_witness(closed, beta=2.0),
        coeff_factory=coeff_factory,
    )


# ---------------------------------------------------------------------------
# exp(1/(1 - k^{-s}))
# ---------------------------------------------------------------------------


def make_exp_geometric(k: int) -> CatalogEntry:
    if int(k) < 2:
        raise DomainError("k must be >= 2")
    k = int(k)
    lnk = math.log(k)

    def jet_fn(s):
        return one_minus_power_jet(k, s).reciprocal()

    def hdelta_vec(sigma, ts):
        ts = np.asarray(ts, dtype=float)
        one_w = -float(np.real(cexpm1(-complex(sigma) * lnk)))  # 1 - k^{-sigma}
        w = 1.0 - one_w
        e = cexpm1(-1j * np.asarray(ts) * lnk)  # k^{-it} - 1
        return w * e / ((one_w - w * e) * one_w)

    def witness():
        def delta(sigma):
            u = -float(np.real(cexpm1(-sigma * lnk)))
            return min(max(u ** 1.4, 5e-324), 1.0 - 1e-9)

        def T(sigma):
            u = -float(np.real(cexpm1(-sigma * lnk)))
            return u ** -3.0

        return Witness(delta=delta, beta=1.0, T=T, source="user")

    closed = ClosedFormSeries(
        alpha=0.0,
        **_jet_evaluators(jet_fn),
        label=f"exp_geom:{k}",
        eval_H_delta=lambda sigma, t: complex(hdelta_vec(sigma, np.array([t]))[0]),
        eval_H_delta_vec=hdelta_vec,
        period=2.0 * math.pi / lnk,
    )

    def coeff_factory(N):
        h = np.zeros(N + 1)
        h[1] = 1.0
        m = k
        while m <= N:
            h[m] = 1.0
            m *= k
        return dirichlet_exp(LogCoefficients(h), alpha=0.0, label=closed.label)

    closed.coeff_gen = coeff_factory
    return CatalogEntry(
        key=closed.label, closed=closed, expected=ADMISSIBLE, grid_K=40,
        witness_factory=witness, coeff_factory=coeff_factory,
        notes="|F(sigma+it)|/F(sigma) is periodic in t: T3 fails, A-conditions hold",
    )


# ---------------------------------------------------------------------------
# partial Euler products and finitely generated systems
# ---------------------------------------------------------------------------


def _primes_upto(y: int):
    if y < 2:
        return []
    sieve = np.ones(y + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(math.isqrt(y)) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return [int(p) for p in np.flatnonzero(sieve)]


def _euler_factor_jets(bases_mults, s):
    total = Jet.const(0.0)
    for base, mult in bases_mults:
        total = total + (-float(mult)) * one_minus_power_jet(base, s).log()
    return total


def _euler_hdelta_vec(bases_mults):
    def hdelta_vec(sigma, ts):
        ts = np.asarray(ts, dtype=float)
        out = np.zeros(ts.shape, dtype=complex)
        for base, mult in bases_mults:
            lnb = math.log(base)
            one_w = -float(np.real(cexpm1(-complex(sigma) * lnb)))
            w = 1.0 - one_w
            e = cexpm1(-1j * ts * lnb)
            out = out - mult * _clog1p(-w * e / one_w)
        return out

    return hdelta_vec


def make_partial_euler(y: float) -> CatalogEntry:
    if y < 2:
        raise DomainError("y must be >= 2")
    primes = _primes_upto(int(y))
    if int(y) > 10 ** 6:
        raise DomainError("y capped at 1e6")
    bases = [(p, 1) for p in primes]

    closed = ClosedFormSeries(
        alpha=0.0,
        **_jet_evaluators(lambda s: _euler_factor_jets(bases, s)),
        label=f"zeta_y:{int(y)}",
        eval_H_delta_vec=_euler_hdelta_vec(bases),
        period=(2.0 * math.pi / math.log(primes[0])) if len(primes) == 1 else None,
    )

    def coeff_factory(N):
        smooth = np.zeros(N + 1)
        smooth[1] = 1.0
        for p in primes:
            for m in range(p, N + 1, p):
                if smooth[m // p]:
                    smooth[m] = 1.0
        return CoefficientSeries(smooth, alpha=0.0, label=closed.label)

    closed.coeff_gen = coeff_factory
    return CatalogEntry(
        key=closed.label, closed=closed, expected=NOT_ADMISSIBLE, grid_K=20,
        witness_factory=lambda: default_delta(closed),
        coeff_factory=coeff_factory,
        notes="pole of order pi(y) at alpha=0: growth trends fail",
    )


def make_fg_multiplicative(generators) -> CatalogEntry:
    gens = [(int(n), int(m)) for n, m in generators]
    if not gens:
        raise DomainError("at least one generator required")
    if any(n < 2 or m < 1 for n, m in gens):
        raise DomainError("generators need n >= 2 and multiplicity >= 1")
    if len({n for n, _ in gens}) != len(gens):
        raise DomainError("generator bases must be distinct")

    key = "fg:" + ",".join(f"{n}^{m}" for n, m in gens)
    closed = ClosedFormSeries(
        alpha=0.0,
        **_jet_evaluators(lambda s: _euler_factor_jets(gens, s)),
        label=key,
        eval_H_delta_vec=_euler_hdelta_vec(gens),
        period=(2.0 * math.pi / math.log(gens[0][0])) if len(gens) == 1 else None,
    )

    def coeff_factory(N):
        out = None
        for n, m in gens:
            c = np.zeros(N + 1)
            c[1] = 1.0
            e = 1
            while n ** e <= N:
                c[n ** e] = math.comb(e + m - 1, m - 1)
                e += 1
            part = CoefficientSeries(c, alpha=0.0, label=f"(1-{n}^-s)^-{m}")
            out = part if out is None else dirichlet_mul(out, part)
        out.alpha = 0.0
        out.label = key
        return out

    closed.coeff_gen = coeff_factory
    return CatalogEntry(
        key=key, closed=closed, expected=NOT_ADMISSIBLE, grid_K=20,
        witness_factory=lambda: default_delta(closed),
        coeff_factory=coeff_factory,
        notes="pole of order sum(m_j) at alpha=0",
    )


# ---------------------------------------------------------------------------
# zeta(s)^k itself
# ---------------------------------------------------------------------------


def make_zeta_pow(k: int = 1) -> CatalogEntry:
    if int(k) < 1:
        raise DomainError("k must be >= 1")
    k = int(k)

    def jet_fn(s):
        return float(k) * zeta_jet(complex(s)).log()

    def hdelta_vec(sigma, ts):
        z0 = zeta_jet(sigma).f0
        zd = zeta_delta_vec(sigma, ts)
        return k * _clog1p(zd / z0)

    closed = ClosedFormSeries(
        alpha=1.0,
        **_jet_evaluators(jet_fn),
        label=f"zeta_pow:{k}",
        eval_H_delta=lambda sigma, t: complex(hdelta_vec(sigma, np.array([t]))[0]),
        eval_H_delta_vec=hdelta_vec,
        eval_t_cap=_ZETA_T_CAP,
    )

    def coeff_factory(N):
        coeffs = _dk_log_coeffs(N, k)
        return CoefficientSeries(coeffs, alpha=1.0, label=closed.label)

    closed.coeff_gen = coeff_factory
    return CatalogEntry(
        key=closed.label, closed=closed, expected=NOT_ADMISSIBLE, grid_K=20,
        witness_factory=lambda: default_delta(closed),
        coeff_factory=coeff_factory,
        notes=f"pole of order {k} at alpha=1 (detectable for k <= 5 by the r-powers; "
              "a^2/b stays bounded for every k)",
    )


# ---------------------------------------------------------------------------
# key parser and regression set
# ---------------------------------------------------------------------------


def get(key: str) -> CatalogEntry:
    """Build the entry named by a catalog key."""
    name, _, arg = key.partition(":")
    try:
        if name == "exp_zeta" and not arg:
            return make_exp_zeta(0.0)
        if name == "exp_zeta_shift":
            return make_exp_zeta(float(arg))
        if name == "exp_zeta_pow":
            return make_exp_zeta_pow(int(arg))
        if name == "exp_geom":
            return make_exp_geometric(int(arg))
        if name == "zeta_y":
            return make_partial_euler(float(arg))
        if name == "zeta_pow":
            return make_zeta_pow(int(arg))
        if name == "fg":
            gens = []
            for part in arg.split(","):
                n, _, m = part.partition("^")
                gens.append((int(n), int(m) if m else 1))
            return make_fg_multiplicative(gens)
    except (ValueError, TypeError) as exc:
        raise DomainError(f"bad catalog key {key!r}: {exc}") from None
    raise DomainError(f"unknown catalog key {key!r}")


#: keys exercised by the classification regression (cmd_diagnose --regression)
REGRESSION_KEYS = (
    "exp_zeta",
    "exp_geom:2",
    "exp_geom:3",
    "zeta_pow:1",
    "zeta_pow:2",
    "zeta_y:5",
    "fg:2^1,3^1",
    "exp_zeta_pow:2",
)
