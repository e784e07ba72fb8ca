"""Lag kernel descriptions for the five delayed pathways.

Pathway names follow the variable they delay and the equation they feed:
h1 delays CRH into ACTH synthesis, h2 delays ACTH into cortisol
synthesis, and h31/h32/h34 delay cortisol into CRH synthesis, ACTH
synthesis, and receptor expression respectively.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["KernelSpec", "PATHWAYS", "composite_delays", "check_composition"]

PATHWAYS = ("h1", "h2", "h31", "h32", "h34")


@dataclass(frozen=True)
class KernelSpec:
    """One pathway's lag kernel: a discrete lag or an Erlang density.

    family "dirac": a pure lag of ``tau`` minutes (tau = 0 means the
    pathway acts instantaneously).
    family "gamma": an Erlang kernel of integer ``order`` >= 1 and scale
    ``theta``, mean lag order * theta; order = 0 again degenerates to an
    instantaneous pathway.
    """

    family: str
    tau: float = 0.0
    order: int = 0
    theta: float = 0.0

    def __post_init__(self) -> None:
        if self.family not in ("dirac", "gamma"):
            raise ValueError(f"kernel family must be dirac or gamma, got {self.family!r}")
        if self.family == "dirac":
            if self.tau < 0.0:
                raise ValueError(f"lag must be nonnegative, got {self.tau}")
            if self.order != 0 or self.theta != 0.0:
                raise ValueError("dirac kernels take only a lag")
        else:
            if self.tau != 0.0:
                raise ValueError("gamma kernels take order and scale, not a lag")
            if self.order < 0 or self.order != int(self.order):
                raise ValueError(f"order must be a nonnegative integer, got {self.order}")
            if self.order > 0 and self.theta <= 0.0:
                raise ValueError(f"scale must be positive, got {self.theta}")

    @staticmethod
    def dirac(tau: float) -> "KernelSpec":
        return KernelSpec(family="dirac", tau=tau)

    @staticmethod
    def gamma(order: int, theta: float) -> "KernelSpec":
        return KernelSpec(family="gamma", order=int(order), theta=theta)

    @property
    def instantaneous(self) -> bool:
        return self.tau == 0.0 if self.family == "dirac" else self.order == 0

    @property
    def average_delay(self) -> float:
        return self.tau if self.family == "dirac" else self.order * self.theta


def composite_delays(kernels: dict[str, KernelSpec]) -> dict[str, float]:
    """Mean total lag around each of the three feedback loops.

    crh: cortisol -> CRH -> ACTH -> cortisol (h31 + h1 + h2)
    acth: cortisol -> ACTH -> cortisol (h32 + h2)
    gr: cortisol -> receptor -> ACTH -> cortisol (h34 + h2)
    """
    d = {name: kernels[name].average_delay for name in PATHWAYS}
    return {
        "crh": d["h31"] + d["h1"] + d["h2"],
        "acth": d["h32"] + d["h2"],
        "gr": d["h34"] + d["h2"],
    }


def check_composition(kernels: dict[str, KernelSpec], rel_tol: float = 1e-9) -> float:
    """The common loop lag, requiring all three loops to agree.

    The onset analysis treats the lag structure through a single
    composite kernel, which is only valid when every feedback loop
    accumulates the same mean lag; configurations violating that are
    rejected here. Returns the common value.
    """
    loops = composite_delays(kernels)
    values = list(loops.values())
    scale = max(abs(v) for v in values) or 1.0
    if max(values) - min(values) > rel_tol * scale:
        detail = ", ".join(f"{k}={v:g}" for k, v in loops.items())
        raise ValueError(f"feedback loops accumulate unequal mean lags: {detail}")
    return values[0]
