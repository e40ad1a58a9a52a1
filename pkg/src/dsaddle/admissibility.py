"""Numerical audits of the admissibility conditions.

The conditions are asymptotic statements as sigma -> alpha+; a finite audit
can only sample a grid sigma_k = alpha + (beta-alpha) 2^{-k} and judge the
trend.  The verdict rule is deterministic and conservative (see
``trend_verdict``), values are carried in log space so nothing saturates
near the abscissa, and verdicts are labeled TREND: they are evidence, not
proof.

The off-axis condition (A8) is the only one that needs a genuinely infinite
integral.  Series with an exactly periodic H get the full integral through
the digamma comb (no truncation); everything else gets a truncated statistic
over [delta, T(sigma)] plus the crude peak-bound tail reported alongside,
with T capped where the evaluator stops being trustworthy.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError
from .perron import (
    off_axis_abs_integral,
    off_axis_periodic_integral,
    off_axis_phased_integral,
)
from .series import (
    ClosedFormSeries,
    CoefficientSeries,
    dirichlet_mul,
    eval_derivatives,
    eval_H,
    eval_H_delta_many,
)

DEFAULT_GRID_K = 20
_LN10 = math.log(10.0)
_T_EVAL_CAP = 4000.0   # beyond this |t| the zeta-family evaluators degrade
_A7_POINTS = 64
_A8_X_PANEL = (2.0, 10.0, 100.0, 1000.0, 10000.0)
_POLE_POWERS = (1, 2, 5)

PASS_TREND = "PASS_TREND"
FAIL_TREND = "FAIL_TREND"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class Witness:
    """delta: (alpha, beta) -> (0,1); T present for the T-conditions."""

    delta: Callable[[float], float]
    beta: float
    T: Optional[Callable[[float], float]] = None
    source: str = "user"


@dataclass
class WitnessedSeries:
    series: object
    witness: Witness
    coeffs: Optional[CoefficientSeries] = None


@dataclass
class ConditionSeries:
    values: list
    log_values: list
    verdict: str
    target: str
    note: str = ""


@dataclass
class ConditionReport:
    label: str
    alpha: float
    grid: list
    conditions: dict
    notes: list = field(default_factory=list)

    @property
    def verdicts(self):
        return {name: cs.verdict for name, cs in self.conditions.items()}

    def all_pass(self):
        return all(cs.verdict == PASS_TREND for cs in self.conditions.values()
                   if cs.target != "report")

    def to_json_dict(self):
        def clean(v):
            if v is None or isinstance(v, str):
                return v
            v = float(v)
            if math.isnan(v):
                return "nan"
            if math.isinf(v):
                return "inf" if v > 0 else "-inf"
            return v

        return {
            "schema": "1",
            "label": self.label,
            "alpha": self.alpha,
            "grid": [float(s) for s in self.grid],
            "conditions": {
                name: {
                    "values": [clean(v) for v in cs.values],
                    "log_values": [clean(v) for v in cs.log_values],
                    "verdict": cs.verdict,
                    "target": cs.target,
                    "note": cs.note,
                }
                for name, cs in self.conditions.items()
            },
            "notes": list(self.notes),
        }

    def to_json(self, indent=None):
        return json.dumps(self.to_json_dict(), indent=indent, sort_keys=True)


# ---------------------------------------------------------------------------
# trend rule
# ---------------------------------------------------------------------------


def _strictly_decreasing(vals):
    """Strict descent; a trailing run that underflowed to -inf still counts."""
    seen_ninf = False
    for prev, cur in zip(vals, vals[1:]):
        if cur == -math.inf:
            if prev == -math.inf:
                seen_ninf = True  # tie between underflows: tolerated
            continue
        if seen_ninf or not cur < prev:
            return False
    return True


def _strictly_increasing(vals):
    return all(cur > prev for prev, cur in zip(vals, vals[1:])
               if math.isfinite(prev) and math.isfinite(cur))


def trend_verdict(log_values, target, tail=5):
    """Deterministic trend rule on log-scale values.

    'zero': PASS iff the last `tail` values are strictly decreasing and the
    final is below first + log(0.1); FAIL iff the tail rises monotonically;
    otherwise INCONCLUSIVE.  'inf' is the mirror image.
    """
    logs = [v for v in log_values if v is not None]
    if len(logs) < tail + 1 or any(isinstance(v, float) and math.isnan(v) for v in logs):
        return INCONCLUSIVE
    tv = logs[-tail:]
    first, final = logs[0], tv[-1]
    if target == "zero":
        if _strictly_decreasing(tv) and final <= first - _LN10:
            return PASS_TREND
        if all(math.isfinite(v) for v in tv) and _strictly_increasing(tv) and tv[-1] > tv[0]:
            return FAIL_TREND
        return INCONCLUSIVE
    if target == "inf":
        if all(math.isfinite(v) for v in tv) and _strictly_increasing(tv) and final >= first + _LN10:
            return PASS_TREND
        if _strictly_decreasing(tv) and tv[-1] < tv[0]:
            return FAIL_TREND
        return INCONCLUSIVE
    raise ValueError(f"unknown target {target!r}")


def _bound_verdict(stats, tol=1e-9, tail=5):
    """For sup-style conditions (T3, T5): the statistic must sit <= 1."""
    if len(stats) < tail:
        return INCONCLUSIVE
    tv = stats[-tail:]
    if all(v <= 1.0 + tol for v in tv):
        return PASS_TREND
    if all(v > 1.0 + tol for v in tv):
        return FAIL_TREND
    return INCONCLUSIVE


def _liminf_verdict(vals, tail=5):
    if len(vals) < tail:
        return INCONCLUSIVE
    tv = vals[-tail:]
    final = tv[-1]
    if final <= 1e-12:
        return FAIL_TREND
    if all(b < a for a, b in zip(tv, tv[1:])) and final < 1e-9:
        return FAIL_TREND
    if min(tv) > 1e-9:
        return PASS_TREND
    return INCONCLUSIVE


# ---------------------------------------------------------------------------
# grids, beta, witnesses
# ---------------------------------------------------------------------------


def grid_sigmas(alpha, beta, K):
    """alpha + (beta-alpha) 2^{-k}, k = 0..K, strictly decreasing to alpha."""
    span = beta - alpha
    if span <= 0:
        raise DomainError("beta must exceed alpha")
    return [alpha + span * 2.0 ** -k for k in range(K + 1)]


def default_grid(series, beta, K):
    """Audit grid for a series; truncated series stop at their margin.

    Coefficient-backed evaluation is refused near alpha (the missing tail
    would dominate), so their grids are shallow and their verdicts lean
    INCONCLUSIVE: that is the honest answer at finite N.
    """
    grid = grid_sigmas(series.alpha, beta, K)
    if isinstance(series, CoefficientSeries):
        from .series import DEFAULT_EVAL_MARGIN

        grid = [s for s in grid if s - series.alpha > DEFAULT_EVAL_MARGIN]
    if len(grid) < 2:
        raise DomainError("grid collapsed: beta too close to the evaluation floor")
    return grid


def select_beta(series, span=1.0, K=20):
    """Largest grid point below alpha+span from which b>0 and a<0 hold down to alpha."""
    alpha = series.alpha
    ok_from = None
    for j in range(K + 1):
        sigma = alpha + span * 2.0 ** -j
        try:
            a, b, _ = eval_derivatives(series, sigma)
        except (DomainError, OverflowError):
            break
        if b > 0 and a < 0:
            if ok_from is None:
                ok_from = j
        else:
            ok_from = None
    if ok_from is None:
        raise DomainError("no grid region with b > 0 and a < 0; diagnostics need growth")
    return alpha + span * 2.0 ** -ok_from


def default_delta(series, beta=None):
    """Witness delta(sigma) = |b c|^{-1/5}, clipped into (0, 1)."""
    if beta is None:
        beta = select_beta(series)

    def delta(sigma):
        _, b, c = eval_derivatives(series, sigma)
        bc = abs(b * c)
        if bc == 0.0:
            raise DomainError(f"b*c vanishes at sigma={sigma}; no default delta")
        d = bc ** -0.2
        return min(max(d, 5e-324), 1.0 - 1e-9)

    return Witness(delta=delta, beta=beta, T=None, source="default_bc_power")


def tenenbaum_witness(series, beta=None):
    """delta = |bc|^{-1/5} with T(sigma) = b(sigma)."""
    w = default_delta(series, beta=beta)
    return Witness(delta=w.delta, beta=w.beta,
                   T=lambda sigma: eval_derivatives(series, sigma)[1],
                   source="tenenbaum")


def _canonical_delta(series, sigma):
    """The T-condition band edge |b c|^{-1/5} (independent of the witness)."""
    _, b, c = eval_derivatives(series, sigma)
    bc = abs(b * c)
    if bc == 0.0:
        raise DomainError(f"b*c vanishes at sigma={sigma}")
    return min(max(bc ** -0.2, 5e-324), 1.0 - 1e-9)


def _periods_of(series):
    if getattr(series, "period", None):
        return (series.period,)
    return tuple(f.period for f in getattr(series, "factors", ()) if f.period)


def _t_eval_cap(series):
    """Height up to which the series' evaluators are trustworthy."""
    if isinstance(series, CoefficientSeries):
        return _T_EVAL_CAP
    if getattr(series, "factors", ()):
        return min(_t_eval_cap(f) for f in series.factors)
    return getattr(series, "eval_t_cap", math.inf)


# ---------------------------------------------------------------------------
# condition quantity evaluators
# ---------------------------------------------------------------------------


def _a7_max_R(series, sigma, delta, a, b):
    ts = np.unique(np.concatenate([np.linspace(-delta, delta, _A7_POINTS),
                                   [-delta, 0.0, delta]]))
    hd = eval_H_delta_many(series, sigma, ts)
    R = hd - 1j * a * ts + 0.5 * b * ts * ts
    return float(np.max(np.abs(R)))


def _a8_T_int(series, sigma, b):
    return max(min(sigma * max(b, 4.0), _t_eval_cap(series)), 16.0 * sigma, 1.0)


def _a8_statistic(series, sigma, delta, b):
    """(value, log_value, tail_stat, note) of the (A8) quantity."""
    pre_log = math.log(sigma) + 0.5 * math.log(b)
    peak_w = 1.0 / math.sqrt(b)
    if getattr(series, "period", None) and delta < series.period / 2:
        res = off_axis_periodic_integral(series, sigma, delta, peak_w)
        tail_stat = 0.0
        note = res.note
    else:
        T = _a8_T_int(series, sigma, b)
        if T <= delta:
            return 0.0, -math.inf, 0.0, "delta beyond integration cap"
        res = off_axis_abs_integral(series, sigma, delta, T,
                                    periods=_periods_of(series), peak_width=peak_w)
        tail_stat = math.exp(pre_log) * res.tail_raw
        note = f"truncated at T={T:.6g}; tail bound reported separately"
    logv = pre_log + res.log_value
    value = math.exp(logv) if logv < 700 and math.isfinite(logv) else (
        0.0 if logv == -math.inf else math.inf)
    if not res.converged:
        note = (note + "; quadrature unconverged").strip("; ")
        return value, math.nan, tail_stat, note
    return value, logv, tail_stat, note


def _check_grid(grid, alpha, beta):
    arr = list(grid)
    if not arr or any(s <= alpha for s in arr):
        raise DomainError("grid must lie strictly above alpha")
    if any(b >= a for a, b in zip(arr, arr[1:])):
        raise DomainError("grid must be strictly decreasing")
    if arr[0] > beta + 1e-12:
        raise DomainError("grid must start at or below beta")
    return arr


def check_A(series, witness, grid=None, K=None, tail=5) -> ConditionReport:
    """Audit (A4)-(A8) on a sigma-grid decreasing to alpha."""
    K = DEFAULT_GRID_K if K is None else K
    grid = _check_grid(grid or default_grid(series, witness.beta, K),
                       series.alpha, witness.beta)
    cols = {name: [] for name in ("A4", "A5", "A6", "A7", "A8")}
    logs = {name: [] for name in cols}
    tails = []
    notes = []
    for sigma in grid:
        d = witness.delta(sigma)
        if not 0.0 < d < 1.0:
            raise DomainError(f"witness delta({sigma}) = {d} outside (0,1)")
        a, b, c = eval_derivatives(series, sigma)
        if b <= 0:
            notes.append(f"b({sigma}) <= 0: skipping grid point")
            for name in cols:
                cols[name].append(math.nan)
                logs[name].append(math.nan)
            tails.append(math.nan)
            continue
        logs["A4"].append(math.log(d))
        cols["A4"].append(d)
        l5 = 2 * math.log(sigma) + math.log(b)
        logs["A5"].append(l5)
        cols["A5"].append(math.exp(l5) if l5 < 700 else math.inf)
        l6 = math.log(b) - b * d * d
        logs["A6"].append(l6)
        cols["A6"].append(math.exp(l6) if -700 < l6 < 700 else (0.0 if l6 <= -700 else math.inf))
        r7 = _a7_max_R(series, sigma, d, a, b)
        logs["A7"].append(math.log(r7) if r7 > 0 else -math.inf)
        cols["A7"].append(r7)
        v8, l8, t8, n8 = _a8_statistic(series, sigma, d, b)
        logs["A8"].append(l8)
        cols["A8"].append(v8)
        tails.append(t8)
        if n8 and n8 not in notes:
            notes.append(n8)

    targets = {"A4": "zero", "A5": "inf", "A6": "zero", "A7": "zero", "A8": "zero"}
    conditions = {
        name: ConditionSeries(values=cols[name], log_values=logs[name],
                              verdict=trend_verdict(logs[name], targets[name], tail=tail),
                              target=targets[name])
        for name in cols
    }
    conditions["A8_tail_bound"] = ConditionSeries(
        values=tails, log_values=[math.log(t) if t and t > 0 else -math.inf for t in tails],
        verdict=INCONCLUSIVE, target="report",
        note="crude |F(s)| <= F(sigma) bound on the |t| > T remainder; "
             "reported, not part of the A8 verdict",
    )
    return ConditionReport(label=getattr(series, "label", ""), alpha=series.alpha,
                           grid=grid, conditions=conditions, notes=notes)


def check_A_minus(series, witness, grid=None, K=None, tail=5,
                  x_panel=_A8_X_PANEL) -> ConditionReport:
    """The weaker pair: (A6-) b delta^2 -> inf and (A8-) with the phased kernel."""
    K = DEFAULT_GRID_K if K is None else K
    grid = _check_grid(grid or default_grid(series, witness.beta, K),
                       series.alpha, witness.beta)
    logs6, vals6, logs8, vals8 = [], [], [], []
    notes = []
    cap = _t_eval_cap(series)
    for sigma in grid:
        d = witness.delta(sigma)
        _, b, _ = eval_derivatives(series, sigma)
        if b <= 0:
            for seq in (logs6, vals6, logs8, vals8):
                seq.append(math.nan)
            continue
        l6 = math.log(b) + 2 * math.log(d)
        logs6.append(l6)
        vals6.append(math.exp(l6) if l6 < 700 else math.inf)
        pre_log = math.log(sigma) + 0.5 * math.log(b)
        T = min(_a8_T_int(series, sigma, b), cap, 200.0)
        worst = -math.inf
        if T > d:
            for x in x_panel:
                res = off_axis_phased_integral(series, sigma, x, d, T,
                                               periods=_periods_of(series),
                                               peak_width=1.0 / math.sqrt(b))
                if not res.converged and "unconverged" not in " ".join(notes):
                    notes.append(f"A8- quadrature wobbly at sigma={sigma:.6g}, x={x}")
                worst = max(worst, pre_log + res.log_value)
        logs8.append(worst)
        vals8.append(math.exp(worst) if math.isfinite(worst) and worst < 700 else
                     (0.0 if worst == -math.inf else math.inf))
    conditions = {
        "A6-": ConditionSeries(vals6, logs6, trend_verdict(logs6, "inf", tail=tail), "inf"),
        "A8-": ConditionSeries(
            vals8, logs8, trend_verdict(logs8, "zero", tail=tail), "zero",
            note=f"max over x panel {list(x_panel)}; truncated quadrature on the "
                 "magnitude grid (phase under-sampling only inflates the modulus)",
        ),
    }
    return ConditionReport(label=getattr(series, "label", ""), alpha=series.alpha,
                           grid=grid, conditions=conditions, notes=notes)


def _t_grid_for_sup(series, delta, T_sigma, b):
    """Log grid on [delta, T] plus period-comb probes so recurrences show up."""
    cap = _t_eval_cap(series)
    T = min(T_sigma, cap)
    if T <= delta:
        return np.array([delta])
    base = np.geomspace(delta, T, 96)
    pts = [base]
    for P in _periods_of(series):
        k = np.arange(1, min(int(T / P), 96) + 1)
        if k.size:
            centers = k * P
            w = 1.0 / math.sqrt(b)
            pts.append((centers[:, None] +
                        np.array([-w, 0.0, w])[None, :]).ravel())
    ts = np.unique(np.concatenate(pts))
    return ts[(ts >= delta) & (ts <= T)]


def check_T(series, witness, grid=None, K=None, tail=5) -> ConditionReport:
    """Audit (T1)-(T6); requires witness.T."""
    if witness.T is None:
        raise DomainError("check_T needs a witness with T(sigma)")
    K = DEFAULT_GRID_K if K is None else K
    grid = _check_grid(grid or default_grid(series, witness.beta, K),
                       series.alpha, witness.beta)
    names = ("T1", "T2", "T3", "T4", "T5", "T6")
    cols = {n: [] for n in names}
    logs = {n: [] for n in names}
    notes = []
    cap = _t_eval_cap(series)
    for sigma in grid:
        a, b, c = eval_derivatives(series, sigma)
        if b <= 0:
            # T6 only needs |c|; the rest are meaningless without b > 0
            for n in names[:-1]:
                cols[n].append(math.nan)
                logs[n].append(math.nan)
            cols["T6"].append(abs(c))
            logs["T6"].append(math.log(abs(c)) if c != 0.0 else -math.inf)
            continue
        Tval = witness.T(sigma)
        d = _canonical_delta(series, sigma)
        l1 = 2 * math.log(sigma) + math.log(b)
        logs["T1"].append(l1)
        cols["T1"].append(math.exp(l1) if l1 < 700 else math.inf)
        if c == 0.0:
            logs["T2"].append(math.inf)
            cols["T2"].append(math.inf)
        else:
            l2 = 3 * math.log(b) - 2 * math.log(abs(c))
            logs["T2"].append(l2)
            cols["T2"].append(math.exp(l2) if abs(l2) < 700 else (math.inf if l2 > 0 else 0.0))
        # T3: worst of T(sigma) |F(sigma+it)|/F(sigma) over the t band
        ts = _t_grid_for_sup(series, d, Tval, b)
        ratio_logs = np.real(eval_H_delta_many(series, sigma, ts))
        worst_log = math.log(Tval) + float(np.max(ratio_logs))
        logs["T3"].append(worst_log)
        cols["T3"].append(math.exp(worst_log) if abs(worst_log) < 700 else
                          (math.inf if worst_log > 0 else 0.0))
        l4 = 0.5 * math.log(b) - math.log(Tval)
        logs["T4"].append(l4)
        cols["T4"].append(math.exp(l4) if abs(l4) < 700 else (math.inf if l4 > 0 else 0.0))
        # T5: |c(sigma+it)| <= |c(sigma)| sampled on a log t-grid
        t5 = np.geomspace(max(d * 1e-3, 1e-12), min(max(Tval, 16.0), cap), 64)
        cvals = np.array([abs(series.evalC(complex(sigma, t))) for t in t5]) \
            if isinstance(series, ClosedFormSeries) else _coeff_c_band(series, sigma, t5)
        worst5 = float(np.max(cvals)) / abs(c) if c != 0.0 else math.inf
        logs["T5"].append(math.log(worst5) if worst5 > 0 else -math.inf)
        cols["T5"].append(worst5)
        cols["T6"].append(abs(c))
        logs["T6"].append(math.log(abs(c)) if c != 0.0 else -math.inf)
    if cap < math.inf:
        notes.append(f"t-bands capped at |t| <= {cap:g} (evaluator validity)")
    conditions = {
        "T1": ConditionSeries(cols["T1"], logs["T1"], trend_verdict(logs["T1"], "inf", tail=tail), "inf"),
        "T2": ConditionSeries(cols["T2"], logs["T2"], trend_verdict(logs["T2"], "inf", tail=tail), "inf"),
        "T3": ConditionSeries(cols["T3"], logs["T3"], _bound_verdict(cols["T3"], tail=tail), "bound",
                              note="worst T(sigma)|F(sigma+it)|/F(sigma) over the sampled band"),
        "T4": ConditionSeries(cols["T4"], logs["T4"], trend_verdict(logs["T4"], "zero", tail=tail), "zero"),
        "T5": ConditionSeries(cols["T5"], logs["T5"], _bound_verdict(cols["T5"], tail=tail), "bound",
                              note="worst |c(sigma+it)|/|c(sigma)| over the sampled band"),
        "T6": ConditionSeries(cols["T6"], logs["T6"], _liminf_verdict(cols["T6"], tail=tail), "liminf"),
    }
    return ConditionReport(label=getattr(series, "label", ""), alpha=series.alpha,
                           grid=grid, conditions=conditions, notes=notes)


def _coeff_c_band(series, sigma, ts):
    h = series.log_series().coeffs
    logn = series.logn
    w = h[1:] * np.exp(-sigma * logn[1:]) * logn[1:] ** 3
    out = np.empty(ts.size)
    for i, t in enumerate(ts):
        out[i] = abs(-np.sum(w * np.exp(-1j * t * logn[1:])))
    return out


def check_corollary_trends(series, grid=None, K=None, beta=None, tail=5) -> ConditionReport:
    """Consequences of admissibility usable as non-admissibility detectors.

    a -> -inf, a^2/b -> inf, (sigma-alpha) a -> -inf, F/(sigma sqrt(b)) -> inf,
    and the pole detector (sigma-alpha)^r F(sigma) -> inf at r in {1, 2, 5}.
    A pole of order <= 5 at alpha forces a FAIL here.
    """
    if beta is None:
        beta = select_beta(series)
    K = DEFAULT_GRID_K if K is None else K
    grid = _check_grid(grid or default_grid(series, beta, K), series.alpha, beta)
    names = ["neg_a", "a_sq_over_b", "neg_u_a"] + [f"pole_r{r}" for r in _POLE_POWERS] \
        + ["F_over_sigma_sqrt_b"]
    cols = {n: [] for n in names}
    logs = {n: [] for n in names}
    for sigma in grid:
        a, b, _ = eval_derivatives(series, sigma)
        u = sigma - series.alpha
        H = eval_H(series, sigma).real
        entries = {
            "neg_a": -a,
            "a_sq_over_b": (a * a / b) if b > 0 else math.nan,
            "neg_u_a": -u * a,
        }
        for n, v in entries.items():
            cols[n].append(v)
            logs[n].append(math.log(v) if v > 0 else (-math.inf if v == 0 else math.nan))
        for r in _POLE_POWERS:
            lv = r * math.log(u) + H
            logs[f"pole_r{r}"].append(lv)
            cols[f"pole_r{r}"].append(math.exp(lv) if abs(lv) < 700 else
                                      (math.inf if lv > 0 else 0.0))
        lf = H - math.log(sigma) - 0.5 * math.log(b) if b > 0 else math.nan
        logs["F_over_sigma_sqrt_b"].append(lf)
        cols["F_over_sigma_sqrt_b"].append(
            math.exp(lf) if math.isfinite(lf) and abs(lf) < 700 else
            (math.inf if lf == math.inf or (math.isfinite(lf) and lf > 0) else math.nan))
    conditions = {
        n: ConditionSeries(cols[n], logs[n], trend_verdict(logs[n], "inf", tail=tail), "inf")
        for n in names
    }
    return ConditionReport(label=getattr(series, "label", ""), alpha=series.alpha,
                           grid=grid, conditions=conditions,
                           notes=["targets are growth; FAIL on any line signals a pole "
                                  "or other non-admissible behavior at alpha"])


def classify(a_report, t_report, trends_report):
    """Combined verdict per the catalog's expectation vocabulary."""
    if any(cs.verdict == FAIL_TREND for cs in trends_report.conditions.values()):
        return "NOT_ADMISSIBLE"
    a_ok = all(cs.verdict == PASS_TREND for name, cs in a_report.conditions.items()
               if name in ("A4", "A5", "A6", "A7", "A8"))
    t_ok = t_report is not None and all(
        cs.verdict == PASS_TREND for cs in t_report.conditions.values())
    if a_ok and t_ok:
        return "T_ADMISSIBLE"
    if a_ok:
        return "ADMISSIBLE"
    return "CONDITIONAL"


# ---------------------------------------------------------------------------
# product closure
# ---------------------------------------------------------------------------


def _sum_closed(s1: ClosedFormSeries, s2: ClosedFormSeries, label) -> ClosedFormSeries:
    def hdelta(sigma, t):
        return s1.H_delta(sigma, t) + s2.H_delta(sigma, t)

    def hdelta_vec(sigma, ts):
        return (eval_H_delta_many(s1, sigma, ts) + eval_H_delta_many(s2, sigma, ts))

    period = s1.period if (s1.period and s1.period == s2.period) else None
    factors = tuple(s1.factors or (s1,)) + tuple(s2.factors or (s2,))
    return ClosedFormSeries(
        alpha=s1.alpha,
        evalH=lambda s: s1.evalH(s) + s2.evalH(s),
        evalA=lambda s: s1.evalA(s) + s2.evalA(s),
        evalB=lambda s: s1.evalB(s) + s2.evalB(s),
        evalC=lambda s: s1.evalC(s) + s2.evalC(s),
        label=label,
        eval_H_delta=hdelta,
        eval_H_delta_vec=hdelta_vec,
        period=period,
        factors=factors,
    )


def product(ws1: WitnessedSeries, ws2: WitnessedSeries) -> WitnessedSeries:
    """Product of two witnessed series: H sums, delta = pointwise min.

    Rejects mismatched abscissas (the closure statement needs them equal).
    """
    s1, s2 = ws1.series, ws2.series
    if abs(s1.alpha - s2.alpha) > 1e-9:
        raise DomainError(
            f"product needs equal abscissas: {s1.alpha} vs {s2.alpha}")
    label = f"({getattr(s1, 'label', '?')})*({getattr(s2, 'label', '?')})"
    if isinstance(s1, ClosedFormSeries) and isinstance(s2, ClosedFormSeries):
        series = _sum_closed(s1, s2, label)
    elif isinstance(s1, CoefficientSeries) and isinstance(s2, CoefficientSeries):
        series = dirichlet_mul(s1, s2)
    else:
        raise DomainError("product needs two series of the same representation")
    w1, w2 = ws1.witness, ws2.witness
    witness = Witness(
        delta=lambda sigma: min(w1.delta(sigma), w2.delta(sigma)),
        beta=min(w1.beta, w2.beta),
        T=None,
        source="product_min",
    )
    coeffs = None
    if ws1.coeffs is not None and ws2.coeffs is not None:
        coeffs = dirichlet_mul(ws1.coeffs, ws2.coeffs)
    return WitnessedSeries(series=series, witness=witness, coeffs=coeffs)
