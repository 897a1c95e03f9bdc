"""Factories for the exact vibrating-cavity solution families.

Each factory builds an immutable :class:`CavityModel` that couples the
geometry of the cavity (static length ``L``, wall period ``T``) to the
fundamental map ``delta1`` acting on the phase variable
``v = tan(omega tau / 2)``.  Four oscillating families are provided,
plus a trivial static model used as a regression anchor:

``linear-finite``
    ``delta1(v) = v - 2 v0`` with ``v0 = tan(theta)`` finite; the wall
    oscillates at the cavity resonance of order ``2 M``.
``linear-odd``
    unit-slope shift map at the odd resonance ``omega = (2M - 1) omega_1``;
    the natural phase variable sits at its pole, so all formulas use the
    dedicated closed forms and no ``v0`` is stored.
``inversion``
    ``delta1(v) = -v0**2 / v``; bounded, quasi-periodic energy.
``homographic``
    full Moebius ``delta1`` with an extra parameter ``v1``; contains the
    other families as limits and is the one that can be exponentially
    unstable.

All angles are radians; units follow hbar = c = 1.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

from . import mobius
from .mobius import Homography

__all__ = [
    "Family",
    "CavityModel",
    "CheckResult",
    "ValidationReport",
    "make_linear_finite",
    "make_linear_odd",
    "make_inversion",
    "make_homographic",
    "make_static",
    "validate",
    "model_to_dict",
    "model_from_dict",
    "model_to_json",
    "model_from_json",
]


class Family(str, Enum):
    LINEAR_FINITE = "linear-finite"
    LINEAR_ODD = "linear-odd"
    INVERSION = "inversion"
    HOMOGRAPHIC = "homographic"
    STATIC = "static"


@dataclass(frozen=True)
class CavityModel:
    """Validated description of one exact cavity solution.

    Attributes
    ----------
    family : Family
        Which solution family the model belongs to.
    L : float
        Static cavity length (the wall rests at ``L`` for t < 0).
    T : float
        Period of the wall motion.
    omega : float
        Angular frequency ``2 pi / T`` of the wall.
    M : int
        Resonance order; fixes ``L`` in units of ``T`` per family.
    theta : float
        Angle parameter; its meaning differs between families and is
        interpreted through the family tag only.
    v0 : float or None
        ``tan(omega L / 2)``; None for the linear-odd family where the
        phase variable sits at its pole.
    v1 : float or None
        Second map parameter (homographic family only).
    vmax : float
        Closed-form maximal wall speed, strictly below 1.
    delta1 : Homography
        The fundamental map of the family.
    note : str
        Non-fatal flags such as "degenerate: static".
    """

    family: Family
    L: float
    T: float
    omega: float
    M: int
    theta: float
    v0: float | None
    v1: float | None
    vmax: float
    delta1: Homography
    note: str = ""

    @property
    def omega1(self) -> float:
        """Fundamental resonance pi / L of the static cavity."""
        return math.pi / self.L

    @property
    def amplitude(self) -> float:
        """Peak-to-peak wall stroke Delta L = (2/omega) asin(vmax)."""
        return 2.0 * math.asin(self.vmax) / self.omega


def _check_angle(theta: float) -> None:
    if theta == 0.0:
        raise ValueError("static cavity (theta = 0): use make_static")
    if not abs(theta) < math.pi / 2:
        raise ValueError("parameter out of range: need 0 < |theta| < pi/2")


def make_linear_finite(M: int, theta: float, T: float = math.pi) -> CavityModel:
    """Shift map delta1(v) = v - 2 tan(theta) at resonance order 2M.

    The cavity length is L = (M + theta/pi) T, the wall speed bound is
    |sin(theta)|, and the wall sweeps between M*T and L.
    """
    if M < 1:
        raise ValueError("parameter out of range: need M >= 1")
    _check_angle(theta)
    if T <= 0.0:
        raise ValueError("parameter out of range: need T > 0")
    v0 = math.tan(theta)
    L = (M + theta / math.pi) * T
    return CavityModel(
        family=Family.LINEAR_FINITE,
        L=L,
        T=T,
        omega=2.0 * math.pi / T,
        M=M,
        theta=theta,
        v0=v0,
        v1=None,
        vmax=abs(math.sin(theta)),
        delta1=Homography(1.0, -2.0 * v0, 0.0, 1.0),
    )


def make_linear_odd(M: int, theta: float, T: float = math.pi) -> CavityModel:
    """Unit-slope map delta1(v) = v + 2 tan(theta) at the odd resonance.

    Here L = (M - 1/2) T, so omega = (2M - 1) omega_1 exactly.  The
    amplitude 2|theta|/omega is adjustable independently of frequency.
    """
    if M < 1:
        raise ValueError("parameter out of range: need M >= 1")
    _check_angle(theta)
    if T <= 0.0:
        raise ValueError("parameter out of range: need T > 0")
    L = (M - 0.5) * T
    return CavityModel(
        family=Family.LINEAR_ODD,
        L=L,
        T=T,
        omega=2.0 * math.pi / T,
        M=M,
        theta=theta,
        v0=None,
        v1=None,
        vmax=abs(math.sin(theta)),
        delta1=Homography(1.0, 2.0 * math.tan(theta), 0.0, 1.0),
    )


def make_inversion(M: int, theta: float, T: float = math.pi) -> CavityModel:
    """Inversion map delta1(v) = -v0**2 / v, v0 = tan(theta).

    Valid for M >= 1, or M = 0 with theta > 0 (wall slower than the
    fundamental).  |theta| = pi/4 gives vmax = 0 and is flagged as a
    degenerate static solution.  All resonance frequencies are excluded
    by construction.
    """
    if theta == 0.0:
        raise ValueError("degenerate inversion (theta = 0)")
    if not abs(theta) < math.pi / 2:
        raise ValueError("parameter out of range: need 0 < |theta| < pi/2")
    if M < 0 or (M == 0 and theta <= 0.0):
        raise ValueError("parameter out of range: need M >= 1, or M = 0 with theta > 0")
    if T <= 0.0:
        raise ValueError("parameter out of range: need T > 0")
    v0 = math.tan(theta)
    note = "degenerate: static" if abs(abs(theta) - math.pi / 4) < 1e-15 else ""
    return CavityModel(
        family=Family.INVERSION,
        L=(M + theta / math.pi) * T,
        T=T,
        omega=2.0 * math.pi / T,
        M=M,
        theta=theta,
        v0=v0,
        v1=None,
        vmax=abs(math.cos(2.0 * theta)),
        delta1=Homography(0.0, -v0 * v0, 1.0, 0.0),
        note=note,
    )


def make_homographic(M: int, v0: float, v1: float, T: float = math.pi) -> CavityModel:
    """Full Moebius family; v1 = 0 delegates to make_inversion.

    delta1(v) = -(v1 v + v0 (v0 - 2 v1)) / (v - v1) with
    tan(theta) = (1 + v0**2)/(2 v1) - v0 and L = (M + atan(v0)/pi) T.
    The wall speed bound is |sin(omega L + theta)|.
    """
    if M < 1:
        raise ValueError("parameter out of range: need M >= 1")
    if T <= 0.0:
        raise ValueError("parameter out of range: need T > 0")
    if v1 == 0.0:
        return make_inversion(M, math.atan(v0), T)
    if v0 == v1:
        raise ValueError("no physical solution (v0 = v1)")
    theta = math.atan((1.0 + v0 * v0) / (2.0 * v1) - v0)
    L = (M + math.atan(v0) / math.pi) * T
    omega = 2.0 * math.pi / T
    vmax = abs(math.sin(omega * L + theta))
    if vmax >= 1.0:
        raise ValueError("luminal wall (|sin(omega L + theta)| = 1)")
    note = ""
    cls = mobius.classify(Homography(-v1, -v0 * (v0 - 2.0 * v1), 1.0, -v1))
    if cls.kind is mobius.MapKind.PARABOLIC:
        note = "power-like (parabolic map, v0 = 2 v1)"
    return CavityModel(
        family=Family.HOMOGRAPHIC,
        L=L,
        T=T,
        omega=omega,
        M=M,
        theta=theta,
        v0=v0,
        v1=v1,
        vmax=vmax,
        delta1=Homography(-v1, -v0 * (v0 - 2.0 * v1), 1.0, -v1),
        note=note,
    )


def make_static(M: int = 1, T: float = math.pi) -> CavityModel:
    """Motionless wall at L = M T; identity fundamental map."""
    if M < 1:
        raise ValueError("parameter out of range: need M >= 1")
    if T <= 0.0:
        raise ValueError("parameter out of range: need T > 0")
    return CavityModel(
        family=Family.STATIC,
        L=float(M) * T,
        T=T,
        omega=2.0 * math.pi / T,
        M=M,
        theta=0.0,
        v0=0.0,
        v1=None,
        vmax=0.0,
        delta1=mobius.identity(),
    )


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    threshold: float
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    model: CavityModel
    checks: tuple[CheckResult, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "model": model_to_dict(self.model),
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "value": c.value,
                    "threshold": c.threshold,
                    "passed": c.passed,
                    "detail": c.detail,
                }
                for c in self.checks
            ],
        }


def validate(model: CavityModel, samples: int = 512) -> ValidationReport:
    """Admissibility audit of a constructed model.

    Samples the auxiliary map over a few periods and checks, with
    per-check margins: the static-region form f(tau) = tau - 2L, the
    derivative bounds (1 -+ vmax)/(1 +- vmax), strict decrease
    f(tau) < tau, periodicity f(tau + T) = f(tau) + T, continuity at
    branch points, and the sewing conditions on delta1 and the wall.
    """
    from .moore import MooreEvaluator

    import numpy as np

    ev = MooreEvaluator(model)
    L, T = model.L, model.T
    checks = []

    def add(name, value, threshold, detail=""):
        checks.append(CheckResult(name, float(value), float(threshold), bool(value <= threshold), detail))

    # (i) static region
    tau_s = np.linspace(-T, L * (1.0 - 1e-12), samples)
    res = np.max(np.abs(ev.f_eval(tau_s) - (tau_s - 2.0 * L)))
    add("static_region_form", res, 1e-10 * L)

    # (ii) derivative bounds from the stored vmax
    tau = np.linspace(L, L + 3.0 * T, 3 * samples)
    h = 1e-7 * T
    fdot = (ev.f_eval(tau + h) - ev.f_eval(tau - h)) / (2.0 * h)
    lo_bound = (1.0 - model.vmax) / (1.0 + model.vmax)
    hi_bound = (1.0 + model.vmax) / (1.0 - model.vmax)
    tol_fd = 1e-5 * (1.0 + hi_bound)
    add("derivative_lower_bound", lo_bound - fdot.min(), tol_fd,
        detail=f"min fdot = {fdot.min():.12g}")
    add("derivative_upper_bound", fdot.max() - hi_bound, tol_fd,
        detail=f"max fdot = {fdot.max():.12g}")

    # (iii) strict decrease: f(tau) - tau = -2 L(t) stays below zero
    tau_all = np.concatenate([tau_s, tau])
    add("f_below_identity", np.max(ev.f_eval(tau_all) - tau_all), -1e-9 * L,
        detail="max of f(tau) - tau")
    # periodicity
    res = np.max(np.abs(ev.f_eval(tau + T) - ev.f_eval(tau) - T))
    add("periodicity", res, 1e-9 * T)

    # continuity at branch points (half-periods) and milestones
    eps = 1e-9 * T
    marks = [0.5 * k * T for k in range(int(2 * L / T) + 1, int(2 * (L + 3 * T) / T))]
    marks += [m for m in ev.milestones(6) if L < m < L + 3.0 * T]
    if marks:
        b = np.array(marks)
        jump = np.max(np.abs(ev.f_eval(b + eps) - ev.f_eval(b - eps)))
        add("branch_continuity", jump, 1e-6 * T)

    # sewing conditions on the fundamental map
    if model.family is Family.LINEAR_ODD:
        # unit-slope shift map: conditions hold in the pole limit
        slope = mobius.derivative_at(model.delta1, 0.0)
        add("delta1_unit_slope", abs(slope - 1.0), 1e-12)
    elif model.family is Family.STATIC:
        add("delta1_identity", abs(mobius.apply(model.delta1, 0.7) - 0.7), 1e-12)
    else:
        v0 = model.v0
        add("delta1_fixed_point", abs(mobius.apply(model.delta1, v0) + v0), 1e-12 * (1.0 + abs(v0)))
        add("delta1_unit_slope", abs(mobius.derivative_at(model.delta1, v0) - 1.0), 1e-12)
        add("delta1_schwarzian", abs(mobius.schwarzian_at(lambda x: mobius.apply(model.delta1, x), v0)), 1e-6)

    # wall sewing and speed bound
    add("wall_start", abs(ev.trajectory(0.0) - L), 1e-9 * L)
    add("wall_start_velocity", abs(ev.wall_velocity(0.0)), 1e-9)
    tgrid = np.linspace(0.0, T, samples, endpoint=False)
    vmax_obs = np.max(np.abs(ev.wall_velocity(tgrid)))
    add("velocity_bound", vmax_obs - model.vmax, 1e-6)

    return ValidationReport(model=model, checks=tuple(checks))


_FACTORIES = {
    Family.LINEAR_FINITE: lambda d: make_linear_finite(d["M"], d["theta"], d.get("T", math.pi)),
    Family.LINEAR_ODD: lambda d: make_linear_odd(d["M"], d["theta"], d.get("T", math.pi)),
    Family.INVERSION: lambda d: make_inversion(d["M"], d["theta"], d.get("T", math.pi)),
    Family.HOMOGRAPHIC: lambda d: make_homographic(d["M"], d["v0"], d["v1"], d.get("T", math.pi)),
    Family.STATIC: lambda d: make_static(d.get("M", 1), d.get("T", math.pi)),
}


def model_to_dict(model: CavityModel) -> dict:
    """JSON-ready description; the schema consumed by the CLI."""
    out: dict = {"family": model.family.value, "M": model.M, "T": model.T}
    if model.family in (Family.LINEAR_FINITE, Family.LINEAR_ODD, Family.INVERSION):
        out["theta"] = model.theta
    if model.family is Family.HOMOGRAPHIC:
        out["v0"] = model.v0
        out["v1"] = model.v1
    return out


def model_from_dict(d: dict) -> CavityModel:
    try:
        fam = Family(d["family"])
    except (KeyError, ValueError) as exc:
        raise ValueError(f"unknown model family in {d!r}") from exc
    try:
        return _FACTORIES[fam](d)
    except KeyError as exc:
        raise ValueError(f"missing model parameter: {exc}") from exc


def model_to_json(model: CavityModel) -> str:
    return json.dumps(model_to_dict(model), sort_keys=True)


def model_from_json(text: str) -> CavityModel:
    return model_from_dict(json.loads(text))
