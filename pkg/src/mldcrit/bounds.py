"""Bounds and approximations on the ML word error rate of BPSK over AWGN.

All evaluators return natural-log probabilities.  Bounds that exceed one are
clamped to ``0.0`` and reported with status ``"vacuous"`` by :func:`evaluate`.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np
from scipy import optimize, special

from .numkernel import (
    LN2,
    LOG10E,
    binary_entropy,
    ln_binomial,
    ln_q,
    ln_q_array,
    log_betainc_array,
    log_diff_exp,
    log_gammainc_array,
    log_gammaincc_array,
    log_sum_exp,
)
from .spectrum import CodeParams, LogWeightSpectrum

__all__ = [
    "SnrPoint",
    "BoundCurve",
    "BoundValue",
    "NumericalError",
    "METHODS",
    "union_bound",
    "first_term_bound",
    "f_eval",
    "dominant_weight",
    "max_term_approx",
    "tangential_sphere_bound",
    "tsb_detail",
    "evaluate",
    "sweep",
    "db_grid",
]


class NumericalError(ArithmeticError):
    """A numerical invariant was violated while evaluating a bound."""


@dataclass(frozen=True)
class SnrPoint:
    """E_b/N_0 as a linear ratio; use :meth:`from_db` for decibels."""

    ebn0_linear: float

    def __post_init__(self):
        if not self.ebn0_linear >= 0.0 or math.isinf(self.ebn0_linear):
            raise ValueError(f"ebn0_linear must be finite and >= 0, got {self.ebn0_linear}")

    @classmethod
    def from_db(cls, db: float) -> "SnrPoint":
        return cls(10.0 ** (db / 10.0))

    @property
    def ebn0_db(self) -> float:
        if self.ebn0_linear == 0.0:
            return -math.inf
        return 10.0 * math.log10(self.ebn0_linear)


SnrLike = Union[SnrPoint, float]


def _rho(snr: SnrLike) -> float:
    # bare floats are linear E_b/N_0
    if isinstance(snr, SnrPoint):
        return snr.ebn0_linear
    return SnrPoint(float(snr)).ebn0_linear


def _check_match(spectrum: LogWeightSpectrum, params: CodeParams) -> None:
    if spectrum.n != params.n:
        raise ValueError(f"spectrum length {spectrum.n} does not match code length {params.n}")


# ---------------------------------------------------------------- union bound


def _ub_terms(spectrum: LogWeightSpectrum, params: CodeParams, rho: float) -> tuple[np.ndarray, np.ndarray]:
    ws, lna = spectrum.support()
    args = np.sqrt(2.0 * params.rate * ws * rho)
    return ws, lna + ln_q_array(args)


def _union_bound_raw(spectrum, params, rho) -> float:
    _, terms = _ub_terms(spectrum, params, rho)
    if terms.size == 0:
        return -math.inf
    return log_sum_exp(terms)


def union_bound(spectrum: LogWeightSpectrum, params: CodeParams, snr: SnrLike) -> float:
    """ln of ``sum_i A_i Q(sqrt(2 R i Eb/N0))``, clamped at 0."""
    _check_match(spectrum, params)
    return min(0.0, _union_bound_raw(spectrum, params, _rho(snr)))


def first_term_bound(params: CodeParams, spectrum: LogWeightSpectrum, snr: SnrLike) -> float:
    """The d_min term of the union bound alone, in natural log."""
    _check_match(spectrum, params)
    d = spectrum.d_min
    val = spectrum.ln_coeff(d) + ln_q(math.sqrt(2.0 * params.rate * d * _rho(snr)))
    return min(0.0, val)


# ------------------------------------------------------- max-term machinery


def f_eval(params: CodeParams, i: float, snr: SnrLike) -> float:
    """log2 of ``2^{-n(1-R-H(i/n))} exp(-R i Eb/N0)`` for ``0 < i < n``."""
    n = params.n
    if not 0 < i < n:
        raise ValueError(f"f_eval requires 0 < i < n, got i={i}, n={n}")
    return _log2_f(params, i, _rho(snr))


def _log2_f(params: CodeParams, i: float, rho: float) -> float:
    n, r = params.n, params.rate
    return -n * (1.0 - r - binary_entropy(i / n)) - r * i * rho / LN2


def dominant_weight(params: CodeParams, snr: SnrLike) -> float:
    """Real maximizer ``n / (exp(R Eb/N0) + 1)`` of the max-term exponent."""
    rho = _rho(snr)
    return params.n * float(special.expit(-params.rate * rho))


def max_term_approx(params: CodeParams, snr: SnrLike, prefactor: bool = False) -> float:
    """ln of the largest union-bound term under the random-code model.

    The default evaluates ``max_i f(i)`` over integers ``i`` in
    ``[d_H, n-1]`` using the floor and ceiling of :func:`dominant_weight`
    (the exponent is concave in ``i``).  With ``prefactor=True`` the exact
    binomial and the ``(4 pi R i Eb/N0)^{-1/2}`` factor are kept and every
    integer in ``[d_H, n]`` is scanned.
    """
    rho = _rho(snr)
    if prefactor:
        return _max_term_prefactor(params, rho)
    lo, hi = params.d, max(params.d, params.n - 1)
    x = dominant_weight(params, rho)
    cands = {min(max(math.floor(x), lo), hi), min(max(math.ceil(x), lo), hi)}
    return max(_log2_f(params, i, rho) for i in cands) * LN2


def _max_term_prefactor(params: CodeParams, rho: float) -> float:
    if rho <= 0.0:
        raise ValueError("the prefactor form needs Eb/N0 > 0")
    n, k, r = params.n, params.k, params.rate
    i = np.arange(params.d, n + 1)
    lnc = np.array([ln_binomial(n, int(j)) for j in i])
    vals = lnc - (n - k) * LN2 - 0.5 * np.log(4.0 * math.pi * r * i * rho) - r * i * rho
    return float(np.max(vals))


# ------------------------------------------------------ tangential sphere bound
#
# Poltyrev's TSB for BPSK/AWGN, noise variance 1 per dimension, energy per
# symbol Es = 2 R Eb/N0 and S = sqrt(n Es) the distance of every codeword from
# the origin.  With z1 the noise component along the axis towards the origin,
# w = S - z1 and the cone of half-angle atan(u) around the transmitted word:
#
#   TSB(r) = int_{-inf}^{S} phi(z1) [ sum_{k: t_k < u} A_k G_k(w) + Pout(w) ] dz1 + Q(S)
#   G_k(w) = int_{w t_k}^{w u} phi(z2) P((n-2)/2, ((w u)^2 - z2^2)/2) dz2
#   Pout(w) = 1 - P((n-1)/2, (w u)^2 / 2)
#
# where u = r / S, t_k = sqrt(k / (n - k)) (so w t_k is the distance to the
# pairwise decision plane of a weight-k neighbour) and P is the regularized
# lower incomplete gamma.  The optimal radius solves
#
#   sum_{k: t_k < u} A_k I_{1 - (t_k/u)^2}((n-2)/2, 1/2) = 2
#
# (regularized incomplete beta), i.e. d TSB / d r = 0.  The z1 = S .. inf
# half-line is counted entirely as error, which only loosens the bound.

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)
_Z2_STEP = 0.02
_OUTER_PANEL = 0.5
_OUTER_SPAN = 50.0
_PRUNE = 46.0
_LN_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class TsbResult:
    ln_value: float
    status: str
    radius: float  # optimal cone radius at the transmitted point; inf when degraded


def tsb_detail(spectrum: LogWeightSpectrum, params: CodeParams, snr: SnrLike) -> TsbResult:
    """TSB together with its status (``ok``/``vacuous``/``degraded``) and radius."""
    _check_match(spectrum, params)
    rho = _rho(snr)
    if rho <= 0.0:
        raise ValueError("the tangential sphere bound needs Eb/N0 > 0")
    ub = _union_bound_raw(spectrum, params, rho)
    geo = _TsbGeometry(spectrum, params, rho)
    if geo.ks.size == 0 or params.n < 3:
        return _clamped(ub, "degraded", math.inf)
    u = geo.solve_radius()
    if u is None:
        return _clamped(ub, "degraded", math.inf)
    val = geo.bound_at(u)
    if not math.isfinite(val) and val != -math.inf:
        return _clamped(ub, "degraded", math.inf)
    # r = inf gives the union bound exactly, so the optimum never exceeds it
    val = min(val, ub)
    return _clamped(val, "ok", u * geo.S)


def _clamped(val: float, status: str, radius: float) -> TsbResult:
    if val > 0.0:
        return TsbResult(0.0, "vacuous" if status == "ok" else status, radius)
    return TsbResult(val, status, radius)


def tangential_sphere_bound(spectrum: LogWeightSpectrum, params: CodeParams, snr: SnrLike) -> float:
    """ln of Poltyrev's tangential sphere bound on the ML word error rate."""
    return tsb_detail(spectrum, params, snr).ln_value


class _TsbGeometry:
    def __init__(self, spectrum: LogWeightSpectrum, params: CodeParams, rho: float):
        n = params.n
        self.n = n
        self.S = math.sqrt(n * 2.0 * params.rate * rho)
        ws, lna = spectrum.support()
        # the antipodal word (k = n) lies on the axis and never enters the cone
        keep = ws < n
        self.ks = ws[keep].astype(float)
        self.lna = lna[keep]
        self.t = np.sqrt(self.ks / (n - self.ks))
        self.a_in = (n - 2) / 2.0
        self.a_out = (n - 1) / 2.0

    def root_fn(self, u: float) -> float:
        act = self.t < u
        if not np.any(act):
            return -1e300
        x = 1.0 - (self.t[act] / u) ** 2
        lb = log_betainc_array(self.a_in, 0.5, x)
        return log_sum_exp(self.lna[act] + lb) - LN2

    def solve_radius(self) -> float | None:
        lo = float(self.t.min())
        hi = lo * 2.0
        while self.root_fn(hi) < 0.0:
            hi *= 2.0
            if hi > lo * 1e8:
                return None
        # tolerance is on the radius r = u S
        return optimize.brentq(self.root_fn, lo, hi, xtol=1e-10 / self.S, rtol=4 * np.finfo(float).eps)

    def bound_at(self, u: float) -> float:
        """ln TSB(r) for cone radius r = u S (not optimized)."""
        S = self.S
        act = self.t < u
        t_act, lna_act = self.t[act], self.lna[act]
        lo_edge, hi_edge = self._outer_support(u, t_act, lna_act)
        nodes, lnw = self._panels(lo_edge, hi_edge)
        vals = np.array([self._outer_integrand(z1, u, t_act, lna_act) for z1 in nodes])
        outer = log_sum_exp(vals + lnw) if nodes.size else -math.inf
        return float(np.logaddexp(outer, ln_q(S)))

    def _outer_support(self, u, t_act, lna_act) -> tuple[float, float]:
        # coarse scan to find where the outer integrand is within e^-50 of its peak
        S = self.S
        left = -15.0
        if S <= left:
            return S, S
        step = max(0.75, (S - left) / 80.0)
        grid = np.arange(left, S, step)
        coarse = np.array([self._outer_integrand(z, u, t_act, lna_act) for z in grid])
        top = np.max(coarse)
        if top == -math.inf:
            return left, left
        keep = np.nonzero(coarse >= top - _OUTER_SPAN)[0]
        a = grid[max(keep[0] - 1, 0)] if keep[0] > 0 else -15.0
        b = grid[keep[-1] + 1] if keep[-1] + 1 < grid.size else S
        return float(a), float(min(b, S))

    @staticmethod
    def _panels(a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
        if b <= a:
            return np.empty(0), np.empty(0)
        m = max(1, int(math.ceil((b - a) / _OUTER_PANEL)))
        edges = np.linspace(a, b, m + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
        lnw = (np.log(half)[:, None] + np.log(_GL_WEIGHTS)[None, :]).ravel()
        return nodes, lnw

    def _outer_integrand(self, z1: float, u: float, t_act: np.ndarray, lna_act: np.ndarray) -> float:
        w = self.S - z1
        if w <= 0.0:
            return -0.5 * z1 * z1 - _LN_SQRT_2PI
        c = w * u
        ln_out = float(log_gammaincc_array(self.a_out, np.array([0.5 * c * c]))[0])
        ln_in = -math.inf
        if t_act.size:
            betas = w * t_act
            # weights far below the largest pairwise term keep their pairwise
            # term, which can only loosen the bound
            ub_terms = lna_act + ln_q_array(betas)
            keep = ub_terms >= np.max(ub_terms) - _PRUNE
            ln_g = self._inner(w, c, betas[keep])
            ln_in = log_sum_exp(lna_act[keep] + ln_g)
            if not np.all(keep):
                ln_in = float(np.logaddexp(ln_in, log_sum_exp(ub_terms[~keep])))
        return -0.5 * z1 * z1 - _LN_SQRT_2PI + float(np.logaddexp(ln_in, ln_out))

    def _inner(self, w: float, c: float, betas: np.ndarray) -> np.ndarray:
        """ln G(beta) = ln int_beta^c phi(z) P(a, (c^2 - z^2)/2) dz for each beta < c."""
        b0 = float(betas.min())
        bmax = float(betas.max())
        # beyond top the Gaussian factor has fallen by e^-50 relative to every beta
        top = min(c, math.sqrt(bmax * bmax + 2.0 * _OUTER_SPAN) + 1.0)
        if top < c:
            tail = ln_q(top)
        else:
            tail = -math.inf
        c_int = top
        npts = max(65, int(math.ceil((c_int - b0) / _Z2_STEP)) + 1)
        z = np.linspace(b0, c_int, npts)
        h = z[1] - z[0]
        xg = np.maximum(0.5 * (c * c - z * z), 0.0)
        lphi = -0.5 * z * z - _LN_SQRT_2PI
        l_lo = lphi + log_gammainc_array(self.a_in, xg)
        l_up = lphi + log_gammaincc_array(self.a_in, xg)
        cum_lo = _cumulative_from_top(l_lo, h)
        cum_up = _cumulative_from_top(l_up, h)

        pos = np.clip((betas - b0) / h, 0.0, npts - 1 - 1e-9)
        j = np.floor(pos).astype(int)
        frac = pos - j
        part_lo = _partial_interval(l_lo[j], l_lo[j + 1], frac, h, _curvature(l_lo, h)[j])
        part_up = _partial_interval(l_up[j], l_up[j + 1], frac, h, _curvature(l_up, h)[j])
        # the dropped tail above top is bounded by Q(top) and kept in both forms
        g_lo = np.logaddexp(np.logaddexp(part_lo, cum_lo[j + 1]), tail)
        g_up = np.logaddexp(part_up, cum_up[j + 1])

        # Q(beta) - Q(c) minus the part outside the ball is accurate when that part is small
        main = log_diff_exp(ln_q_array(betas), ln_q(c))
        use_main = g_up < main - LN2
        out = np.where(use_main, log_diff_exp(main, np.minimum(g_up, main)), g_lo)
        return out


def _interval_log_integral(la: np.ndarray, lb: np.ndarray, h) -> np.ndarray:
    # exact integral of exp(linear) between endpoint log-values la, lb over width h
    hi = np.maximum(la, lb)
    lo = np.minimum(la, lb)
    with np.errstate(invalid="ignore", divide="ignore"):
        diff = hi - lo
        ln_h = np.log(h)
        linear = hi + ln_h + np.log(-np.expm1(-diff)) - np.log(diff)
        flat = hi + ln_h
        trap = hi + ln_h - LN2
    out = np.where(diff < 1e-8, flat, linear)
    out = np.where(np.isneginf(lo), trap, out)
    out = np.where(np.isneginf(hi), -np.inf, out)
    return out


def _curvature(lvals: np.ndarray, h: float) -> np.ndarray:
    """Second derivative of the log-integrand per interval, 0 where undefined."""
    with np.errstate(invalid="ignore"):
        d2 = np.zeros_like(lvals)
        if lvals.size >= 3:
            d2[1:-1] = (lvals[2:] - 2.0 * lvals[1:-1] + lvals[:-2]) / (h * h)
            d2[0], d2[-1] = d2[1], d2[-2]
        per = 0.5 * (d2[:-1] + d2[1:])
    return np.where(np.isfinite(per), per, 0.0)


def _curvature_correction(la, lb, curv, width) -> np.ndarray:
    """ln of the first-order factor for a quadratic log-integrand.

    With l = linear + (curv/2) x (x - h), the integral gains the factor
    ``1 + (curv/2) h^2 E[y (y - 1)]``, y ~ density e^{tau y} on [0, 1].
    """
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        tau = np.where(np.isfinite(la) & np.isfinite(lb), lb - la, 0.0)
        at = np.abs(tau)
        # E[y(y-1)] = Var(y) - E[y](1 - E[y]), symmetric in tau
        big = at > 1e-3
        ta = np.where(big, at, 1.0)
        e1 = np.where(big, 1.0 / (-np.expm1(-ta)) - 1.0 / ta, 0.5)
        em = np.exp(-ta)
        var = np.where(big, 1.0 / (ta * ta) - em / (np.expm1(-ta) ** 2), 1.0 / 12.0)
        eyy = np.where(big, var - e1 * (1.0 - e1), -1.0 / 6.0 + at * at / 360.0)
        fac = 0.5 * curv * width * width * eyy
    return np.log1p(np.clip(fac, -0.5, 0.5))


def _cumulative_from_top(lvals: np.ndarray, h: float) -> np.ndarray:
    """cum[j] = ln int_{z_j}^{z_last} of exp(l) on the uniform grid."""
    seg = _interval_log_integral(lvals[:-1], lvals[1:], h)
    seg = seg + _curvature_correction(lvals[:-1], lvals[1:], _curvature(lvals, h), h)
    cum = np.empty_like(lvals)
    cum[-1] = -np.inf
    cum[:-1] = np.logaddexp.accumulate(seg[::-1])[::-1]
    return cum


def _partial_interval(la: np.ndarray, lb: np.ndarray, frac: np.ndarray, h: float, curv=0.0) -> np.ndarray:
    # integral from the interior point up to the right node; the start value
    # is the quadratic interpolant when a curvature is supplied
    with np.errstate(invalid="ignore"):
        lm = la + frac * (lb - la) + 0.5 * curv * (frac * h) * (frac * h - h)
        lm = np.where(np.isneginf(la) | np.isneginf(lb), np.maximum(la, lb), lm)
    width = np.maximum((1.0 - frac) * h, 1e-300)
    return _interval_log_integral(lm, lb, width) + _curvature_correction(lm, lb, curv, width)


# -------------------------------------------------------------------- sweeps


@dataclass(frozen=True)
class BoundValue:
    ln_value: float
    status: str = "ok"

    @property
    def log10(self) -> float:
        return self.ln_value * LOG10E


METHODS = ("ub", "first", "approx", "tsb")


def evaluate(
    method: str,
    spectrum: LogWeightSpectrum,
    params: CodeParams,
    snr: SnrLike,
    prefactor: bool = False,
) -> BoundValue:
    """One bound at one SNR, with its vacuous/degraded status."""
    rho = _rho(snr)
    _check_match(spectrum, params)
    if method == "ub":
        raw = _union_bound_raw(spectrum, params, rho)
    elif method == "first":
        d = spectrum.d_min
        raw = spectrum.ln_coeff(d) + ln_q(math.sqrt(2.0 * params.rate * d * rho))
    elif method == "approx":
        raw = max_term_approx(params, rho, prefactor=prefactor)
    elif method == "tsb":
        res = tsb_detail(spectrum, params, rho)
        return BoundValue(res.ln_value, res.status)
    else:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if raw > 0.0:
        return BoundValue(0.0, "vacuous")
    return BoundValue(raw, "ok")


@dataclass(frozen=True)
class BoundCurve:
    """Samples ``(ebn0_db, log10_wer)`` of one bound, sorted by SNR."""

    method: str
    d_min: int
    points: tuple[tuple[float, float], ...]
    statuses: tuple[str, ...] = field(default=())

    @property
    def label(self) -> str:
        return f"{self.method}[d>={self.d_min}]"

    @property
    def ebn0_db(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def log10_wer(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])


def db_grid(start: float, stop: float, step: float) -> list[float]:
    """``start:stop:step`` in dB, inclusive of ``stop`` within half a step."""
    if not step > 0 or not start < stop:
        raise ValueError(f"need start < stop and step > 0, got {start}:{stop}:{step}")
    count = int(math.floor((stop - start) / step + 0.5)) + 1
    return [round(start + i * step, 10) for i in range(count)]


def _eval_point(args):
    method, spectrum, params, db, prefactor = args
    return evaluate(method, spectrum, params, SnrPoint.from_db(db), prefactor)


def sweep(
    method: str,
    spectrum: LogWeightSpectrum,
    params: CodeParams,
    grid: Sequence[Union[SnrPoint, float]],
    prefactor: bool = False,
    workers: int = 1,
) -> BoundCurve:
    """Evaluate ``method`` on a strictly increasing grid.

    Bare floats in ``grid`` are dB values.  Points may be farmed out to
    ``workers`` processes; results are merged in grid order.
    """
    dbs = [g.ebn0_db if isinstance(g, SnrPoint) else float(g) for g in grid]
    if not dbs:
        raise ValueError("empty SNR grid")
    if any(b <= a for a, b in zip(dbs, dbs[1:])):
        raise ValueError("SNR grid must be strictly increasing")
    jobs = [(method, spectrum, params, db, prefactor) for db in dbs]
    results: list[BoundValue] = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for idx, res in enumerate(_guarded(pool.map(_eval_point, jobs), dbs)):
                results.append(res)
    else:
        for idx, job in enumerate(jobs):
            try:
                results.append(_eval_point(job))
            except Exception as exc:
                raise type(exc)(f"grid point {idx} ({dbs[idx]} dB): {exc}") from exc
    pts = tuple((db, r.log10) for db, r in zip(dbs, results))
    for idx in range(1, len(pts)):
        if pts[idx][1] > pts[idx - 1][1] + 1e-9:
            raise NumericalError(
                f"{method} increased from {pts[idx - 1][1]:.6f} to {pts[idx][1]:.6f} "
                f"at grid point {idx} ({dbs[idx]} dB)"
            )
    return BoundCurve(method, spectrum.d_min, pts, tuple(r.status for r in results))


def _guarded(it: Iterable[BoundValue], dbs: list[float]):
    idx = 0
    try:
        for idx, res in enumerate(it):
            yield res
    except Exception as exc:
        raise type(exc)(f"grid point near index {idx} ({dbs[min(idx, len(dbs) - 1)]} dB): {exc}") from exc
