"""Bracketing root-finding helpers shared by the analysis modules."""

from __future__ import annotations

__all__ = ["bisect", "scan_roots", "grow_upper"]


def bisect(f, lo: float, hi: float, xtol: float, flo: float | None = None) -> float:
    """Root of f on [lo, hi] by bisection, assuming a sign change.

    ``xtol`` is the absolute half-width at which iteration stops. ``flo``
    may carry a precomputed f(lo) to save one evaluation.
    """
    if flo is None:
        flo = f(lo)
    if flo == 0.0:
        return lo
    fhi = f(hi)
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0.0) == (flo > 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
        if hi - lo <= 2.0 * xtol:
            break
    return 0.5 * (lo + hi)


def scan_roots(
    f,
    lo: float,
    hi: float,
    n: int,
    xtol: float,
) -> tuple[list[float], list[float]]:
    """Locate roots of f on (lo, hi) from a uniform n-point scan.

    Every sign change between adjacent grid points is refined by
    bisection. Grid points where f vanishes to rounding without a sign
    change on either side (the curve touches zero tangentially) are
    reported in the second list instead of the first, so callers can
    flag them rather than treat them as transversal crossings.

    Returns (roots, tangential_touches), each ascending.
    """
    if n < 3:
        raise ValueError(f"scan needs at least 3 points, got {n}")
    step = (hi - lo) / (n - 1)
    xs = [lo + i * step for i in range(n)]
    fs = [f(x) for x in xs]
    touch_tol = 1e-12 * max(abs(v) for v in fs)

    roots: list[float] = []
    touches: list[float] = []
    for i in range(1, n - 1):
        if abs(fs[i]) <= touch_tol:
            left, right = fs[i - 1], fs[i + 1]
            if abs(left) > touch_tol and abs(right) > touch_tol and (left > 0.0) == (right > 0.0):
                touches.append(xs[i])
    for i in range(n - 1):
        a, b = fs[i], fs[i + 1]
        if a == 0.0:
            roots.append(xs[i])
        elif b != 0.0 and (a > 0.0) != (b > 0.0):
            roots.append(bisect(f, xs[i], xs[i + 1], xtol, flo=a))
    if fs[-1] == 0.0:
        roots.append(xs[-1])
    # an exact grid-point zero flanked by same-sign values is a touch, not a crossing
    roots = [r for r in roots if all(abs(r - t) > 2.0 * step for t in touches)]
    # collapse refinements that landed on the same root
    dedup: list[float] = []
    for r in roots:
        if not dedup or r - dedup[-1] > 4.0 * xtol:
            dedup.append(r)
    return dedup, touches


def grow_upper(pred, seed: float, factor: float = 2.0, max_grow: int = 200) -> float:
    """Smallest tested hi with pred(hi) true, growing geometrically from seed."""
    hi = seed
    for _ in range(max_grow):
        if pred(hi):
            return hi
        hi *= factor
    raise ValueError("could not grow bracket: predicate never became true")
