"""Exact evaluation of the cavity phase function R and its auxiliary map.

The wall motions in the catalog are built so that the auxiliary map

    f(t + L(t)) = t - L(t)

is a Moebius transformation of v = tan(omega tau / 2) on each branch.
R follows by iterating f down to the static region:

    R(tau) = f^n(tau) - 2 L + 2 L n,      f^n(tau) < L,

with R(tau) = tau - 2L exactly below the first milestone L_0 = L.
Milestones L_n (images of L under the inverse map) split the tau axis
into half-open regions [L_{n-1}, L_n) on which R is a single smooth
branch; map_index returns that region number.
"""
import numpy as np

from . import _kernels as kern
from .catalog import CavityModel, Family

_MAX_MILESTONES = 10**6


def _canon(a: float, b: float, c: float, d: float):
    """Fix the projective sign so that c > 0, or c = 0 and d > 0.

    The kernels evaluate (a v + b)/(c v + d) with IEEE semantics; at
    v = +0.0 the sign of the denominator must be the sign of d (or of
    c v at a pole through the origin), which a global factor of -1
    would silently destroy (-0.0 + 0.0 is +0.0).
    """
    if c < 0.0 or (c == 0.0 and d < 0.0):
        return (-a, -b, -c, -d)
    return (a, b, c, d)


class MooreEvaluator:
    """Closed-form evaluator for one cavity model.

    Parameters
    ----------
    model : CavityModel
        Catalog entry describing the wall motion.

    Notes
    -----
    The map parameters are derived from ``model.delta1`` at
    construction, so a model carrying a corrupted fundamental matrix
    produces an evaluator whose f genuinely disagrees with the wall
    trajectory (the verification oracle relies on this).
    """

    def __init__(self, model: CavityModel):
        self.model = model
        m = model
        d1 = m.delta1
        fam = m.family

        half = fam is not Family.INVERSION
        if fam is Family.LINEAR_FINITE or fam is Family.STATIC:
            c0f, c0i = -2.0 * m.M, 2.0 * m.M
            c1f = c1i = qf = qi = 0.0
        elif fam is Family.LINEAR_ODD:
            c0f, c0i = -2.0 * m.M + 1.0, 2.0 * m.M - 1.0
            c1f = c1i = qf = qi = 0.0
        elif fam is Family.INVERSION:
            neg = 1.0 if m.theta <= 0.0 else 0.0
            c0f, c0i = -2.0 * m.M + neg, 2.0 * m.M + (1.0 - neg)
            c1f = c1i = qf = qi = 0.0
        elif fam is Family.HOMOGRAPHIC:
            # Heaviside with H(0) = 1; v0 == v1 is excluded by the catalog.
            up = 1.0 if m.v0 >= m.v1 else 0.0
            dn = 1.0 if m.v1 >= m.v0 else 0.0
            c0f, c0i = -2.0 * m.M - up, 2.0 * m.M - dn
            c1f = c1i = 1.0
            qf, qi = m.v1, -m.v1
        else:  # pragma: no cover
            raise ValueError(f"unknown family {fam!r}")

        self._fpar = _canon(d1.a, d1.b, d1.c, d1.d) + (half, c0f, c1f, qf)
        # inverse map: adjugate matrix, mirrored branch constants
        self._ipar = _canon(d1.d, -d1.b, -d1.c, d1.a) + (half, c0i, c1i, qi)
        self._ms = [m.L]

    # -- basic handles -------------------------------------------------

    @property
    def L(self) -> float:
        return self.model.L

    @property
    def T(self) -> float:
        return self.model.T

    @property
    def omega(self) -> float:
        return self.model.omega

    # -- auxiliary map -------------------------------------------------

    def f_eval(self, tau):
        """f(tau); scalar in, scalar out."""
        arr = np.atleast_1d(np.asarray(tau, dtype=np.float64))
        a, b, c, d, half, c0, c1, q = self._fpar
        out = kern.phase_map(arr, self.T, a, b, c, d, half, c0, c1, q,
                             self.L, -2.0 * self.L)
        return float(out[0]) if np.ndim(tau) == 0 else out

    def f_inverse_eval(self, tau):
        """Inverse of f; exact adjugate of the branch Moebius map."""
        arr = np.atleast_1d(np.asarray(tau, dtype=np.float64))
        a, b, c, d, half, c0, c1, q = self._ipar
        out = kern.phase_map(arr, self.T, a, b, c, d, half, c0, c1, q,
                             -self.L, 2.0 * self.L)
        return float(out[0]) if np.ndim(tau) == 0 else out

    # -- milestones and regions ----------------------------------------

    def _ensure_milestones(self, tau_max: float) -> None:
        ms = self._ms
        while ms[-1] <= tau_max:
            if len(ms) >= _MAX_MILESTONES:
                raise RuntimeError("milestone cache limit exceeded")
            ms.append(self.f_inverse_eval(ms[-1]))

    def milestones(self, n: int) -> np.ndarray:
        """Milestones L_0 .. L_n as an array (L_0 = L)."""
        if n < 0:
            raise ValueError("milestone index must be >= 0")
        ms = self._ms
        while len(ms) <= n:
            ms.append(self.f_inverse_eval(ms[-1]))
        return np.array(ms[: n + 1])

    def map_index(self, tau):
        """Region number n(tau): 0 below L, else searchsorted milestone.

        Regions are half-open, [L_{n-1}, L_n), so tau exactly at a
        milestone belongs to the region above it.
        """
        arr = np.atleast_1d(np.asarray(tau, dtype=np.float64))
        self._ensure_milestones(float(arr.max(initial=0.0)) + self.T)
        idx = np.searchsorted(np.array(self._ms), arr, side="right")
        return int(idx[0]) if np.ndim(tau) == 0 else idx.astype(np.int64)

    # -- phase function ------------------------------------------------

    def moore_eval(self, tau):
        """R(tau) by exact branch iteration; R(tau) = tau - 2L below L."""
        arr = np.atleast_1d(np.asarray(tau, dtype=np.float64))
        a, b, c, d, half, c0, c1, q = self._fpar
        R, _ = kern.moore_map(arr, self.L, self.T, a, b, c, d,
                              half, c0, c1, q)
        return float(R[0]) if np.ndim(tau) == 0 else R

    # -- wall trajectory -----------------------------------------------

    def trajectory(self, t):
        """Wall position L(t); constant L for t < 0."""
        m = self.model
        arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
        w = m.omega
        if m.family is Family.STATIC:
            out = np.full(arr.shape, m.L)
        elif m.family in (Family.LINEAR_FINITE, Family.LINEAR_ODD):
            s = np.sin(m.theta)
            out = m.L + (np.arcsin(s * np.cos(w * arr)) - m.theta) / w
        elif m.family is Family.INVERSION:
            sg = 1.0 if m.theta > 0 else -1.0
            c2 = np.cos(2.0 * m.theta)
            out = (m.L - 2.0 * m.theta / w
                   + sg * (0.5 * np.pi - np.arcsin(c2 * np.cos(w * arr))) / w)
        else:  # homographic
            s = np.sin(w * m.L + m.theta)
            out = m.L + (np.arcsin(s * np.cos(w * arr)) - np.arcsin(s)) / w
        out = np.where(arr < 0.0, m.L, out)
        return float(out[0]) if np.ndim(t) == 0 else out

    def wall_velocity(self, t):
        """dL/dt; zero for t < 0 and for the static family."""
        m = self.model
        arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
        w = m.omega
        if m.family is Family.STATIC:
            out = np.zeros(arr.shape)
        elif m.family in (Family.LINEAR_FINITE, Family.LINEAR_ODD):
            s = np.sin(m.theta)
            cw = np.cos(w * arr)
            out = -s * np.sin(w * arr) / np.sqrt(1.0 - s * s * cw * cw)
        elif m.family is Family.INVERSION:
            sg = 1.0 if m.theta > 0 else -1.0
            c2 = np.cos(2.0 * m.theta)
            cw = np.cos(w * arr)
            out = sg * c2 * np.sin(w * arr) / np.sqrt(1.0 - c2 * c2 * cw * cw)
        else:
            s = np.sin(w * m.L + m.theta)
            cw = np.cos(w * arr)
            out = -s * np.sin(w * arr) / np.sqrt(1.0 - s * s * cw * cw)
        out = np.where(arr < 0.0, 0.0, out)
        return float(out[0]) if np.ndim(t) == 0 else out
