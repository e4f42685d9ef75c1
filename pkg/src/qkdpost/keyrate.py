"""Closed-form asymptotic key rates for Bell-diagonal channels.

The proposed rate is the larger of two bracket arguments:

    first  = 1 - H(P_XZ) + (P_Xbar(1)/2) h((p00 p10 + p01 p11) / (r0 r1))
    second = (P_Xbar(0)/2) (1 - H(P'_XZ))

with r0 = p00+p01, r1 = p10+p11 the bit-flip marginal and P_Xbar, P'_XZ the
derived two-copy laws. Comparison curves: the Vollbrecht-Verstraete style
correction (first argument with the entropy of the mean replaced by the
mean of entropies), the plain advantage-distillation rate (the second
argument alone), and the one-way baseline 1 - H(P_XZ). Zero-denominator
terms vanish with their prefactors; that convention lives in
channel.derived_dists and is reused here.

Six-state curves substitute p = six_state_point(e). BB84 curves minimize
over the free parameter p11 in [0, e] (the channel family the estimate
leaves undetermined), by a dense grid plus golden-section refinement; the
objective is not assumed unimodal, the refinement only polishes the best
grid bracket. Minimizing the raw rate and clamping afterwards equals
minimizing the clamped rate, since clamping is monotone.

Scalar entry points take a validated BellDiagonal; the BB84 grid runs on a
private vectorized core kept consistent with the scalar path by tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import BellDiagonal, bb84_family, derived_dists, six_state_point
from .entropy import binary_entropy, shannon_entropy

__all__ = [
    "CURVES",
    "RatePoint",
    "ThresholdResult",
    "rate_first_arg",
    "rate_second_arg",
    "rate_proposed",
    "rate_vollbrecht",
    "rate_bstep",
    "rate_oneway",
    "rate_point",
    "sixstate_curve",
    "bb84_rate",
    "bb84_curve",
    "tolerable_rate",
    "sweep",
    "render_csv",
    "render_json_rows",
]

CURVES = ("proposed", "first_arg", "second_arg", "vollbrecht", "bstep", "oneway")

_GRID_POINTS = 2001
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _entropy_xz(p: BellDiagonal) -> float:
    return shannon_entropy(p.as_dist())


def rate_first_arg(p: BellDiagonal) -> float:
    """1 - H(P_XZ) plus the two-way alignment correction."""
    r0 = p.p00 + p.p01
    r1 = p.p10 + p.p11
    base = 1.0 - _entropy_xz(p)
    denom = r0 * r1
    if denom <= 0.0:
        return base
    arg = (p.p00 * p.p10 + p.p01 * p.p11) / denom
    return base + denom * binary_entropy(min(max(arg, 0.0), 1.0))


def rate_second_arg(p: BellDiagonal) -> float:
    """Surviving-block fraction times the rate of the transformed channel."""
    d = derived_dists(p)
    pbar0 = d.pbar(0)
    if pbar0 <= 0.0 or d.pprime is None:
        return 0.0
    return 0.5 * pbar0 * (1.0 - _entropy_xz(d.pprime))


def rate_proposed(p: BellDiagonal) -> float:
    """max of the two bracket arguments; callers clamp at 0 for curves."""
    return max(rate_first_arg(p), rate_second_arg(p))


def rate_vollbrecht(p: BellDiagonal) -> float:
    """Correction with per-row entropies in place of the entropy of the mix."""
    r0 = p.p00 + p.p01
    r1 = p.p10 + p.p11
    base = 1.0 - _entropy_xz(p)
    if r0 * r1 <= 0.0:
        return base
    mean_h = binary_entropy(p.p01 / r0) + binary_entropy(p.p11 / r1)
    return base + 0.5 * r0 * r1 * mean_h


def rate_bstep(p: BellDiagonal) -> float:
    """Advantage distillation alone: identically the second argument."""
    return rate_second_arg(p)


def rate_oneway(p: BellDiagonal) -> float:
    return 1.0 - _entropy_xz(p)


_RATE_FNS = {
    "proposed": rate_proposed,
    "first_arg": rate_first_arg,
    "second_arg": rate_second_arg,
    "vollbrecht": rate_vollbrecht,
    "bstep": rate_bstep,
    "oneway": rate_oneway,
}


@dataclass(frozen=True)
class RatePoint:
    """All curves at one error rate; raw values, clamps via accessors.

    For BB84 rows, first_arg/second_arg are evaluated at the p11 minimizing
    the proposed rate (kept in p11_star), so the max invariant holds
    exactly; the comparison curves are each minimized over their own p11.
    """

    e: float
    first_arg: float
    second_arg: float
    vollbrecht: float
    bstep: float
    oneway: float
    p11_star: float | None = None

    @property
    def proposed(self) -> float:
        return max(self.first_arg, self.second_arg)

    def raw(self, curve: str) -> float:
        if curve not in CURVES:
            raise ValueError(f"unknown curve {curve!r}")
        return self.proposed if curve == "proposed" else getattr(self, curve)

    def clamped(self, curve: str) -> float:
        return max(0.0, self.raw(curve))


def rate_point(p: BellDiagonal, e: float, p11_star: float | None = None) -> RatePoint:
    return RatePoint(
        e=e,
        first_arg=rate_first_arg(p),
        second_arg=rate_second_arg(p),
        vollbrecht=rate_vollbrecht(p),
        bstep=rate_bstep(p),
        oneway=rate_oneway(p),
        p11_star=p11_star,
    )


def sixstate_curve(e_grid, which: str = "proposed") -> list[RatePoint]:
    """RatePoint rows along the six-state family; the selector is validated
    for interface symmetry with BB84, where the minimized objective depends
    on it, but every row carries all curves."""
    if which not in CURVES:
        raise ValueError(f"unknown curve {which!r}")
    return [rate_point(six_state_point(float(e)), float(e)) for e in e_grid]


# --- vectorized core for the BB84 family grid ---


def _h_vec(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 1e-300, 1.0)
    y = np.clip(1.0 - x, 1e-300, 1.0)
    out = -(x * np.log2(x) + y * np.log2(y))
    return np.where((x <= 1e-12) | (y <= 1e-12), 0.0, out)


def _plogp(x: np.ndarray) -> np.ndarray:
    return np.where(x > 0.0, -x * np.log2(np.clip(x, 1e-300, None)), 0.0)


def _curves_vec(p00, p10, p01, p11) -> dict[str, np.ndarray]:
    """Raw curve values on arrays of Bell-diagonal entries."""
    h_xz = _plogp(p00) + _plogp(p10) + _plogp(p01) + _plogp(p11)
    base = 1.0 - h_xz
    r0 = p00 + p01
    r1 = p10 + p11
    denom = r0 * r1
    safe = denom > 0.0
    arg = np.where(safe, (p00 * p10 + p01 * p11) / np.where(safe, denom, 1.0), 0.0)
    first = base + np.where(safe, denom * _h_vec(arg), 0.0)
    pbar0 = r0 * r0 + r1 * r1
    q = np.stack(
        [p00 * p00 + p01 * p01, 2.0 * p00 * p01, p10 * p10 + p11 * p11, 2.0 * p10 * p11]
    ) / np.where(pbar0 > 0.0, pbar0, 1.0)
    h_prime = _plogp(q).sum(axis=0)
    second = np.where(pbar0 > 0.0, 0.5 * pbar0 * (1.0 - h_prime), 0.0)
    voll_h = np.where(r0 > 0.0, _h_vec(np.where(r0 > 0.0, p01 / np.where(r0 > 0, r0, 1), 0.0)), 0.0)
    voll_h = voll_h + np.where(
        r1 > 0.0, _h_vec(np.where(r1 > 0.0, p11 / np.where(r1 > 0, r1, 1), 0.0)), 0.0
    )
    voll = base + np.where(safe, 0.5 * denom * voll_h, 0.0)
    return {
        "proposed": np.maximum(first, second),
        "first_arg": first,
        "second_arg": second,
        "vollbrecht": voll,
        "bstep": second,
        "oneway": base,
    }


def _bb84_entries(e: float, t: np.ndarray):
    return 1.0 - 2.0 * e + t, e - t, e - t, t


def bb84_rate(e: float, which: str = "proposed") -> tuple[float, float]:
    """(min over p11 in [0, e] of the raw selected curve, argmin p11).

    Dense grid then golden-section refinement in the best grid bracket.
    Clamping the returned value equals minimizing the clamped curve.
    """
    if which not in CURVES:
        raise ValueError(f"unknown curve {which!r}")
    if not 0.0 <= e <= 0.5:
        raise ValueError(f"BB84 error rate {e} outside [0, 1/2]")
    if e == 0.0:
        return _RATE_FNS[which](bb84_family(0.0, 0.0)), 0.0
    grid = np.linspace(0.0, e, _GRID_POINTS)
    vals = _curves_vec(*_bb84_entries(e, grid))[which]
    best = int(np.argmin(vals))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, grid.size - 1)]

    def f(t: float) -> float:
        return _RATE_FNS[which](bb84_family(e, t))

    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > 1e-12:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
    t_star = x1 if f1 <= f2 else x2
    val = float(min(f(t_star), float(vals[best])))
    if float(vals[best]) <= val:
        t_star = float(grid[best])
    return val, float(t_star)


def bb84_curve(e_grid, which: str = "proposed") -> list[RatePoint]:
    """RatePoint rows for BB84: first/second at the proposed argmin, the
    comparison curves each minimized over their own p11."""
    if which not in CURVES:
        raise ValueError(f"unknown curve {which!r}")
    rows = []
    for e in e_grid:
        e = float(e)
        _, t_star = bb84_rate(e, "proposed")
        member = bb84_family(e, t_star)
        rows.append(
            RatePoint(
                e=e,
                first_arg=rate_first_arg(member),
                second_arg=rate_second_arg(member),
                vollbrecht=bb84_rate(e, "vollbrecht")[0],
                bstep=bb84_rate(e, "bstep")[0],
                oneway=bb84_rate(e, "oneway")[0],
                p11_star=t_star,
            )
        )
    return rows


@dataclass(frozen=True)
class ThresholdResult:
    """Zero crossing of a rate curve; found is False when the curve stays
    positive on the scanned interval."""

    e_star: float | None
    found: bool
    scanned_to: float


def tolerable_rate(
    curve, e_max: float = 0.5, step: float = 1e-3, refine: float = 1e-4
) -> ThresholdResult:
    """Smallest zero of a raw rate curve on [0, e_max], bisected to refine.

    curve maps an error rate to the raw (unclamped) rate; the clamped curve
    reaches zero exactly where the raw one changes sign.
    """
    lo = 0.0
    val = curve(lo)
    if val <= 0.0:
        raise ValueError("rate curve must be positive at e = 0")
    steps = int(math.floor(e_max / step + 1e-9))
    hi = None
    for i in range(1, steps + 1):
        e = min(i * step, e_max)
        if curve(e) <= 0.0:
            hi = e
            lo = e - step
            break
    if hi is None:
        return ThresholdResult(e_star=None, found=False, scanned_to=e_max)
    while hi - lo > refine:
        mid = 0.5 * (lo + hi)
        if curve(mid) <= 0.0:
            hi = mid
        else:
            lo = mid
    return ThresholdResult(e_star=0.5 * (lo + hi), found=True, scanned_to=e_max)


def sweep(emin: float, emax: float, step: float, protocol: str, which: str = "proposed"):
    """Deterministic RatePoint rows on the inclusive grid."""
    if emin >= emax:
        raise ValueError("emin must be below emax")
    if step <= 0.0:
        raise ValueError("step must be positive")
    count = int(math.floor((emax - emin) / step + 1e-9)) + 1
    grid = [emin + i * step for i in range(count)]
    if protocol == "six-state":
        return sixstate_curve(grid, which)
    if protocol == "bb84":
        return bb84_curve(grid, which)
    raise ValueError(f"unknown protocol {protocol!r}")


def render_csv(rows, curves=("proposed", "vollbrecht", "bstep", "oneway"), include_raw=True):
    """CSV text: e, clamped curve columns, raw bracket arguments, and the
    minimizing p11 column whenever the rows carry one (constrained families)."""
    for c in curves:
        if c not in CURVES:
            raise ValueError(f"unknown curve {c!r}")
    rows = list(rows)
    with_p11 = bool(rows) and rows[0].p11_star is not None
    header = ["e", *curves]
    if include_raw:
        header += ["first_arg_raw", "second_arg_raw"]
    if with_p11:
        header.append("p11_star")
    lines = [",".join(header)]
    for row in rows:
        cells = [f"{row.e:.12g}"] + [f"{row.clamped(c):.12g}" for c in curves]
        if include_raw:
            cells += [f"{row.first_arg:.12g}", f"{row.second_arg:.12g}"]
        if with_p11:
            cells.append(f"{row.p11_star:.12g}")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def render_json_rows(rows, curves=("proposed", "vollbrecht", "bstep", "oneway")):
    """JSON-ready list of dicts mirroring render_csv."""
    for c in curves:
        if c not in CURVES:
            raise ValueError(f"unknown curve {c!r}")
    out = []
    for row in rows:
        rec = {"e": row.e}
        rec.update({c: row.clamped(c) for c in curves})
        rec["first_arg_raw"] = row.first_arg
        rec["second_arg_raw"] = row.second_arg
        if row.p11_star is not None:
            rec["p11_star"] = row.p11_star
        out.append(rec)
    return out
