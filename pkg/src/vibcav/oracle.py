"""Trajectory-only numerical solver and cross-verification harness.

Solves the wall equation f(t + L(t)) = t - L(t) by bracketed bisection
using nothing but the trajectory L(t), then builds R by the downward
recursion.  Because it never touches the closed-form branch algebra,
it is an independent referee for the exact evaluators: the two paths
share no code beyond the trajectory itself.
"""
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning
from scipy.interpolate import PchipInterpolator

from .catalog import CavityModel, CheckResult, Family, model_to_dict
from .moore import MooreEvaluator

__all__ = [
    "TrajectoryHandle",
    "VerificationReport",
    "f_from_trajectory",
    "moore_from_trajectory",
    "verify_model",
]

_ITER_CAP = 10**6


class TrajectoryHandle:
    """Wall trajectory L(t) plus the metadata the solver needs.

    Parameters
    ----------
    fn : callable
        Vectorized t -> L(t).
    T : float
        Period of the motion.
    L : float
        Static length (value for t < 0).
    vmax : float
        Reported wall speed bound, < 1.
    label : str
        Free-form origin tag.
    """

    def __init__(self, fn, T: float, L: float, vmax: float, label: str = ""):
        self.fn = fn
        self.T = float(T)
        self.L = float(L)
        self.vmax = float(vmax)
        self.label = label
        self._bounds: tuple[float, float] | None = None

    def __call__(self, t):
        return self.fn(t)

    @classmethod
    def from_model(cls, model: CavityModel) -> "TrajectoryHandle":
        ev = MooreEvaluator(model)
        return cls(ev.trajectory, model.T, model.L, model.vmax,
                   label=model.family.value)

    @classmethod
    def from_csv(cls, path, period: float | None = None) -> "TrajectoryHandle":
        """Monotone-cubic interpolant of a (t, L) sample file.

        Rows are comma-separated t, L(t); '#' lines are ignored.  The
        period must be supplied (sampled data does not carry it); the
        static length is the first sample's L, used for all t below the
        first sample.  vmax is measured by central differences at
        spacing T/10^4.
        """
        data = np.genfromtxt(path, delimiter=",", comments="#")
        data = np.atleast_2d(data)
        if data.shape[1] < 2 or data.shape[0] < 4:
            raise ValueError("trajectory CSV needs at least 4 rows of t,L")
        if period is None:
            raise ValueError("period must be provided for a CSV trajectory")
        t, lv = data[:, 0], data[:, 1]
        if np.any(np.diff(t) <= 0):
            raise ValueError("trajectory samples must be strictly increasing in t")
        interp = PchipInterpolator(t, lv, extrapolate=False)
        t0, t1 = float(t[0]), float(t[-1])
        L = float(lv[0])

        def fn(tt):
            arr = np.asarray(tt, dtype=np.float64)
            if np.any(arr > t1 + 1e-9 * period):
                raise ValueError("time outside sampled trajectory range")
            out = np.where(arr < t0, L, interp(np.clip(arr, t0, t1)))
            return float(out) if np.ndim(tt) == 0 else out

        h = period / 1e4
        g = np.linspace(max(t0, 0.0) + h, t1 - h, 4096)
        vmax = float(np.max(np.abs((fn(g + h) - fn(g - h)) / (2.0 * h))))
        return cls(fn, period, L, vmax, label=f"csv:{path}")

    def bounds(self) -> tuple[float, float]:
        """Padded (min, max) wall excursion over one period."""
        if self._bounds is None:
            g = np.linspace(0.0, self.T, 8193)
            lv = np.asarray(self.fn(g))
            pad = 2.0 * (self.T / 8192.0)  # one grid step, |Ldot| < 1
            self._bounds = (float(lv.min()) - pad, float(lv.max()) + pad)
        return self._bounds


def f_from_trajectory(traj: TrajectoryHandle, tau, tol: float | None = None):
    """Auxiliary map from the trajectory alone; scalar in, scalar out.

    Solves t + L(t) = tau by bisection on the guaranteed bracket
    [tau - Lmax, tau - Lmin] (monotone because 1 + Ldot > 0), then
    returns t - L(t).  Below the static milestone returns tau - 2L
    directly.  Absolute error is bounded by ~2 tol.
    """
    if tol is None:
        tol = 1e-10 * traj.T
    if tol <= 0.0:
        raise ValueError("parameter out of range: need tol > 0")
    arr = np.atleast_1d(np.asarray(tau, dtype=np.float64))
    out = np.empty_like(arr)
    below = arr < traj.L
    out[below] = arr[below] - 2.0 * traj.L
    sel = ~below
    if np.any(sel):
        ts = arr[sel]
        lmin, lmax = traj.bounds()
        lo = ts - lmax
        hi = ts - lmin
        glo = lo + traj(lo) - ts
        ghi = hi + traj(hi) - ts
        if np.any(glo > 0.0) or np.any(ghi < 0.0):
            raise RuntimeError("root bracket failed; trajectory is not "
                               "admissible (needs |Ldot| < 1 and L > 0)")
        for _ in range(200):
            if float(np.max(hi - lo)) <= tol:
                break
            mid = 0.5 * (lo + hi)
            g = mid + traj(mid) - ts
            pos = g > 0.0
            hi = np.where(pos, mid, hi)
            lo = np.where(pos, lo, mid)
        root = 0.5 * (lo + hi)
        out[sel] = root - traj(root)
    return float(out[0]) if np.ndim(tau) == 0 else out


def moore_from_trajectory(traj: TrajectoryHandle, tau,
                          tol: float | None = None):
    """Numeric R(tau): iterate f_from_trajectory to the static region.

    Accumulates +2L per step; error grows like tol x iteration count.
    Raises RuntimeError beyond 10^6 iterations.
    """
    arr = np.atleast_1d(np.asarray(tau, dtype=np.float64)).copy()
    n = np.zeros(arr.shape, dtype=np.int64)
    for _ in range(_ITER_CAP):
        act = arr >= traj.L
        if not act.any():
            break
        arr[act] = f_from_trajectory(traj, arr[act], tol)
        n[act] += 1
    else:
        raise RuntimeError("iteration cap exceeded")
    out = arr - 2.0 * traj.L + 2.0 * traj.L * n
    return float(out[0]) if np.ndim(tau) == 0 else out


@dataclass(frozen=True)
class VerificationReport:
    """Consolidated residuals for one model; pass = every check passed."""

    model: CavityModel
    t_max: float
    samples: int
    seed: int
    checks: tuple[CheckResult, ...]
    max_moore_residual: float
    max_f_residual: float
    max_oracle_deviation: float
    max_trajectory_error: float
    max_energy_deviation: float | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "model": model_to_dict(self.model),
            "t_max": self.t_max,
            "samples": self.samples,
            "seed": self.seed,
            "passed": self.passed,
            "max_moore_residual": self.max_moore_residual,
            "max_f_residual": self.max_f_residual,
            "max_oracle_deviation": self.max_oracle_deviation,
            "max_trajectory_error": self.max_trajectory_error,
            "max_energy_deviation": self.max_energy_deviation,
            "checks": [
                {"name": c.name, "value": c.value, "threshold": c.threshold,
                 "passed": c.passed, "detail": c.detail}
                for c in self.checks
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def verify_model(model: CavityModel, t_max: float | None = None,
                 samples: int = 1000, seed: int = 0) -> VerificationReport:
    """Cross-verify one model's closed forms against the numeric oracle.

    Draws `samples` random times in [0, t_max] (default 50 T), then
    checks: the functional equation and Moore's equation for the exact
    evaluator, agreement of exact R with the trajectory-only R, wall
    reconstruction from f, the sewing conditions, the velocity bound,
    and (family permitting) closed-vs-quadrature energy, the plateau
    level, and the exponential growth rate.  Failures are report rows,
    never exceptions.
    """
    from . import mobius
    from .observables import Observables, QuadratureError
    from .stability import Verdict, classify_model

    if t_max is None:
        t_max = 50.0 * model.T
    if samples < 2:
        raise ValueError("parameter out of range: need samples >= 2")
    rng = np.random.default_rng(seed)
    ev = MooreEvaluator(model)
    L, T = model.L, model.T

    t = np.sort(rng.uniform(0.0, t_max, samples))
    Lt = ev.trajectory(t)
    tau_p = t + Lt
    tau_m = t - Lt

    checks: list[CheckResult] = []

    def add(name, value, threshold, detail=""):
        checks.append(CheckResult(name, float(value), float(threshold),
                                  bool(value <= threshold), detail))

    moore_res = float(np.max(np.abs(ev.moore_eval(tau_p)
                                    - ev.moore_eval(tau_m) - 2.0 * L)))
    add("moore_residual", moore_res, 1e-9 * L)

    f_res = float(np.max(np.abs(ev.f_eval(tau_p) - tau_m)))
    add("f_equation_residual", f_res, 1e-9 * L)

    traj = TrajectoryHandle.from_model(model)
    R_num = moore_from_trajectory(traj, tau_p)
    oracle_dev = float(np.max(np.abs(R_num - ev.moore_eval(tau_p))))
    add("oracle_equivalence", oracle_dev, 1e-7 * L)

    fv = ev.f_eval(tau_p)
    t_rec = 0.5 * (tau_p + fv)
    L_rec = 0.5 * (tau_p - fv)
    traj_err = float(np.max(np.abs(ev.trajectory(t_rec) - L_rec)))
    add("trajectory_roundtrip", traj_err, 1e-9 * L)

    # sewing conditions
    if model.family is Family.LINEAR_ODD:
        add("sewing_slope", abs(mobius.derivative_at(model.delta1, 0.0) - 1.0),
            1e-12)
    elif model.family is not Family.STATIC:
        v0 = model.v0
        add("sewing_fixed_point", abs(mobius.apply(model.delta1, v0) + v0),
            1e-12 * (1.0 + abs(v0)))
        add("sewing_slope",
            abs(mobius.derivative_at(model.delta1, v0) - 1.0), 1e-12)
        add("sewing_schwarzian",
            abs(mobius.schwarzian_at(
                lambda x: mobius.apply(model.delta1, x), v0)), 1e-6)
    add("wall_start", abs(ev.trajectory(0.0) - L), 1e-9 * L)
    add("wall_start_velocity", abs(ev.wall_velocity(0.0)), 1e-9)

    # velocity bound: the speed peaks exactly at quarter period
    vpeak = abs(ev.wall_velocity(0.25 * T))
    vgrid = np.max(np.abs(ev.wall_velocity(
        rng.uniform(0.0, T, max(256, samples // 4)))))
    add("velocity_peak", abs(vpeak - model.vmax), 1e-9)
    add("velocity_bound", float(vgrid) - model.vmax, 1e-9)

    # Energy checks can only certify on an internally consistent model;
    # on a corrupted one the quadrature certificate itself fails.  Such
    # failures must become report rows, never exceptions, so they are
    # recorded as infinite residuals (and scipy's integration chatter on
    # those hopeless integrands is silenced).
    energy_dev: float | None = None
    obs = Observables(model, ev)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        if model.family is Family.LINEAR_ODD:
            tE = rng.uniform(0.0, t_max, 5)
            try:
                devs = []
                for x in tE:
                    q = obs.total_energy_quadrature(float(x), 1e-9)
                    c = obs.total_energy_closed(float(x))
                    devs.append(abs(c - q) / max(abs(q), 1e-30))
                energy_dev = float(np.max(devs))
            except QuadratureError as exc:
                energy_dev = math.inf
                add("energy_closed_vs_quadrature", energy_dev, 1e-6,
                    detail=f"quadrature not certifiable: {exc}")
            else:
                add("energy_closed_vs_quadrature", energy_dev, 1e-6)

        if model.family is Family.LINEAR_FINITE:
            # plateau level in rho0 units at a late snapshot
            ts = 40.0 * T
            xg = np.linspace(0.0, ev.trajectory(ts), 2001)
            dens = obs.energy_density_2d(ts, xg) / obs.rho0
            target = -(2.0 * model.M + 2.0 * model.theta / math.pi) ** 2
            med = float(np.median(dens))
            add("plateau_level", abs(med / target - 1.0), 0.01,
                detail=f"median {med:.6g} vs {target:.6g}")

        if model.family is Family.HOMOGRAPHIC:
            rep = classify_model(model)
            if rep.verdict is Verdict.EXPONENTIAL:
                marks = np.array([3.0, 4.0, 5.0]) * 2.0 * model.M * T
                try:
                    logs = [math.log(obs.total_energy_quadrature(float(x),
                                                                 1e-6))
                            for x in marks]
                    slope = ((logs[-1] - logs[0]) / (marks[-1] - marks[0]))
                    add("growth_rate_fit",
                        abs(slope / rep.growth_rate - 1.0), 0.1,
                        detail=f"fitted {slope:.6g} vs {rep.growth_rate:.6g}")
                except (QuadratureError, ValueError) as exc:
                    add("growth_rate_fit", math.inf, 0.1,
                        detail=f"quadrature not certifiable: {exc}")

    return VerificationReport(
        model=model, t_max=float(t_max), samples=samples, seed=seed,
        checks=tuple(checks),
        max_moore_residual=moore_res,
        max_f_residual=f_res,
        max_oracle_deviation=oracle_dev,
        max_trajectory_error=traj_err,
        max_energy_deviation=energy_dev,
    )
