"""Vacuum energy density and radiated energy of the vibrating cavity.

Everything here reduces to the chiral density

    rho(tau) = -omega**2/(48 pi) + (omega**2 - omega1**2)/(48 pi) * B(tau)**2

where B = R'(tau) is evaluated in a pole-free form: with H the matrix
of the n(tau)-fold composition of the fundamental map and
phi = pi (tau/T - floor(tau/T + 1/2)),

    B = det(H) / | H (sin phi, cos phi) |**2.

This is algebraically the usual Moebius-derivative chain rule but stays
finite at the tan poles and needs no large-|v| cutoff, because the
matrix acts on the direction (sin phi, cos phi) instead of on
v = tan(phi) itself.  Numerically the denominator is evaluated through
the SVD of H, den = (s0 v0.u)^2 + (s1 v1.u)^2, a sum of two squares
that suffers no cancellation even where |H u| is many orders below the
matrix scale.  The physical density is the sum of the two chiralities,
<T00(t,x)> = rho(t+x) + rho(t-x).

Hyperbolically unstable models squeeze the density into packets whose
width shrinks like |lambda2/lambda1|**n.  Once that width falls below
the double-precision grid around the packet position, the collar
points that pin the quadrature all round to the same float and the
peak mass can no longer be bracketed; the quadrature refuses to bluff
and raises ResolutionError instead.
"""
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import _kernels as kern
from .catalog import CavityModel, Family
from .moore import MooreEvaluator

__all__ = [
    "DensityProfile",
    "EnergySeries",
    "Observables",
    "QuadratureError",
    "ResolutionError",
    "coefficient_table",
]

_EPS = float(np.finfo(np.float64).eps)
# packet collars are inserted only for strongly squeezed regions
_COLLAR_COND = 30.0
# a packet narrower than this many float spacings cannot be integrated
_FLOOR_ULPS = 64.0


class QuadratureError(RuntimeError):
    """Requested tolerance could not be certified.

    Carries the best estimate and its error bound when one exists.
    """

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class ResolutionError(QuadratureError):
    """Integrand structure is finer than double precision can resolve."""


@dataclass(frozen=True, eq=False)
class DensityProfile:
    """Sampled chiral density rho(tau) with region bookkeeping."""

    model: CavityModel
    tau: np.ndarray
    rho: np.ndarray
    region: np.ndarray
    rho0: float


@dataclass(frozen=True, eq=False)
class EnergySeries:
    """Total energy E(t) sampled on a grid by one method."""

    model: CavityModel
    t: np.ndarray
    energy: np.ndarray
    method: str
    rel_tol: float | None = None


def coefficient_table(M_max: int) -> list[tuple[int, float, float, float]]:
    """Rows (M, quantum, classical, sum) of the large-t energy growth.

    In units pi tan(theta)**2 / (12 L): quantum = 4M(M-1)/(2M-1)**2,
    classical = 1/(2M-1)**2.  The sum is identically 1; the quantum
    coefficient vanishes for M = 1 (no resonance in the first channel).
    """
    if M_max < 1:
        raise ValueError("parameter out of range: need M_max >= 1")
    rows = []
    for M in range(1, M_max + 1):
        den = float((2 * M - 1) ** 2)
        q = 4.0 * M * (M - 1) / den
        c = 1.0 / den
        rows.append((M, q, c, q + c))
    return rows


class Observables:
    """Density and energy observables for one cavity model.

    Parameters
    ----------
    model : CavityModel
    evaluator : MooreEvaluator, optional
        Reuse an existing evaluator (shares its milestone cache).
    """

    def __init__(self, model: CavityModel, evaluator: MooreEvaluator | None = None):
        self.model = model
        self.ev = evaluator if evaluator is not None else MooreEvaluator(model)
        d1 = model.delta1
        D = np.array([[d1.a, d1.b], [d1.c, d1.d]], dtype=np.float64)
        self._D = D / np.max(np.abs(D))
        self._Hmats = [np.eye(2)]
        self._svdtab = np.array([[1.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0]])
        self._packets: dict[int, tuple[float, float, float]] = {}
        w2 = model.omega ** 2
        self._rho_inf = -w2 / (48.0 * math.pi)
        self._C = (w2 - model.omega1 ** 2) / (48.0 * math.pi)
        self._mean_cache: float | None = None

    # -- region tables ---------------------------------------------------

    @property
    def rho0(self) -> float:
        """Magnitude pi/(24 L^2) of the static Casimir density."""
        return math.pi / (24.0 * self.model.L ** 2)

    def _region_table(self, nmax: int) -> np.ndarray:
        """Per-region singular data of the normalized n-fold map.

        Rows (s0, s1, v00, v01, v10, v11, dsign) for n = 0..nmax, where
        H_n = U diag(s0, s1) V^T, (v00, v01) and (v10, v11) are the rows
        of V^T and dsign = sign(det H_n).  The bracket kernel consumes
        this table directly.
        """
        H = self._Hmats
        if len(H) <= nmax:
            while len(H) <= nmax:
                nxt = H[-1] @ self._D
                nxt = nxt / np.max(np.abs(nxt))
                H.append(nxt)
            rows = []
            for h in H:
                _, S, Vh = np.linalg.svd(h)
                dsign = 1.0 if h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0] >= 0 \
                    else -1.0
                rows.append((float(S[0]), float(S[1]),
                             float(Vh[0, 0]), float(Vh[0, 1]),
                             float(Vh[1, 0]), float(Vh[1, 1]), dsign))
            self._svdtab = np.ascontiguousarray(np.array(rows))
        return self._svdtab

    def _packet_info(self, n: int) -> tuple[float, float, float]:
        """Packet phase in [-pi/2, pi/2), width in tau, and condition number.

        The packet core of region n sits where (sin phi, cos phi) lines
        up with the right singular vector of the smallest singular value
        of H_n; the squeezing ratio smin/smax fixes the width.
        """
        hit = self._packets.get(n)
        if hit is not None:
            return hit
        row = self._region_table(n)[n]
        smax, smin = float(row[0]), float(row[1])
        phi = math.atan2(float(row[4]), float(row[5]))
        if phi >= 0.5 * math.pi:
            phi -= math.pi
        elif phi < -0.5 * math.pi:
            phi += math.pi
        width = (self.model.T / math.pi) * smin / smax
        info = (phi, width, smax / smin)
        self._packets[n] = info
        return info

    # -- densities ---------------------------------------------------------

    def density_profile(self, tau):
        """Chiral density rho(tau); scalar in, scalar out."""
        arr = np.atleast_1d(np.asarray(tau, dtype=np.float64))
        idx = np.atleast_1d(self.ev.map_index(arr))
        tab = self._region_table(int(idx.max(initial=0)))
        B = kern.bracket_vals(np.ascontiguousarray(arr), self.model.T,
                              np.ascontiguousarray(idx, dtype=np.int64), tab)
        rho = self._rho_inf + self._C * B * B
        return float(rho[0]) if np.ndim(tau) == 0 else rho

    def profile(self, tau) -> DensityProfile:
        """DensityProfile container for a tau grid (CLI helper)."""
        arr = np.asarray(tau, dtype=np.float64)
        return DensityProfile(model=self.model, tau=arr,
                              rho=np.atleast_1d(self.density_profile(arr)),
                              region=np.atleast_1d(self.ev.map_index(arr)),
                              rho0=self.rho0)

    def energy_density_2d(self, t: float, x):
        """Physical density <T00(t, x)> = rho(t+x) + rho(t-x).

        Requires 0 <= x <= L(t); raises ValueError outside the cavity.
        """
        t = float(t)
        Lt = self.ev.trajectory(t)
        xa = np.asarray(x, dtype=np.float64)
        pad = 1e-12 * self.model.L
        if np.any(xa < -pad) or np.any(xa > Lt + pad):
            raise ValueError("position outside cavity (need 0 <= x <= L(t))")
        out = self.density_profile(t + xa) + self.density_profile(t - xa)
        return float(out) if np.ndim(x) == 0 else out

    # -- quadrature machinery ----------------------------------------------

    def _window_points(self, a: float, b: float) -> list[float]:
        """Mandatory breakpoints in [a, b]: milestones, half periods,
        packet cores with geometric collars.  Raises ResolutionError when
        a packet inside the window is too narrow to bracket in doubles.
        """
        ev, T = self.ev, self.model.T
        na, nb = ev.map_index(a), ev.map_index(b)
        ms = ev.milestones(nb)
        pts = [a, b]
        pts += [float(m) for m in ms if a < m < b]
        k0 = int(math.floor(2.0 * a / T)) - 1
        k1 = int(math.ceil(2.0 * b / T)) + 1
        pts += [0.5 * k * T for k in range(k0, k1 + 1) if a < 0.5 * k * T < b]

        for n in range(max(na, 1), nb + 1):
            lo = max(a, float(ms[n - 1]))
            hi = min(b, float(ms[n])) if n < nb else b
            if hi <= lo:
                continue
            phi, width, cond = self._packet_info(n)
            if cond < _COLLAR_COND:
                continue
            kmin = int(math.ceil(lo / T - phi / math.pi - 1.0))
            kmax = int(math.floor(hi / T - phi / math.pi + 1.0))
            for k in range(kmin, kmax + 1):
                tp = (k + phi / math.pi) * T
                if not (lo <= tp <= hi):
                    continue
                if width < _FLOOR_ULPS * _EPS * max(abs(tp), T):
                    raise ResolutionError(
                        f"energy packet at tau = {tp:.6g} has width "
                        f"{width:.3e}, below the double-precision grid "
                        f"({_FLOOR_ULPS:.0f} ulp); the window is not "
                        "integrable in double precision")
                pts.append(tp)
                scale = width
                for _ in range(60):
                    if scale >= hi - lo:
                        break
                    for s in (tp - scale, tp + scale):
                        if lo < s < hi:
                            pts.append(s)
                    scale *= 8.0

        arr = np.unique(np.asarray(pts, dtype=np.float64))
        keep = [float(arr[0])]
        for x in arr[1:]:
            if x - keep[-1] > 32.0 * _EPS * max(abs(x), T):
                keep.append(float(x))
        keep[-1] = b
        return keep

    def _reduced_phase(self, anchor: float, beta0: float) -> float:
        """pi anchor / T + beta0 reduced mod pi to [-pi/2, pi/2].

        Computed in extended precision where the platform has it, so the
        offset keeps meaning even when the nearest packet core is many
        orders closer than one ulp of anchor itself.
        """
        f = getattr(np, "float128", np.float64)
        pif = f(np.pi)
        psi = pif * f(anchor) / f(self.model.T) + f(beta0)
        return float(psi - np.rint(psi / pif) * pif)

    def _integrate_window(self, a: float, b: float, rel_tol: float,
                          scale: float, c_const: float,
                          c_quad: float) -> float:
        """Integral of c_const + c_quad B(tau)^2 over [a, b], certified.

        Each inter-breakpoint segment lies inside a single region n, so
        there B is exactly the pi-periodic function
        s0 s1 / (s0^2 sin^2 psi + s1^2 cos^2 psi) of the phase psi.  The
        segment is integrated in the offset sigma = tau - midpoint with
        psi = delta + pi sigma / T and the midpoint phase delta reduced
        in extended precision: near a squeezed packet both delta and
        sigma are tiny, so the integrand is evaluated to full relative
        precision right through the peak.  Raises QuadratureError when
        the summed error bound exceeds the requested tolerance.
        """
        if rel_tol < 1e-12:
            raise ValueError("parameter out of range: need rel_tol >= 1e-12")
        pts = self._window_points(a, b)
        tab = self._region_table(int(self.ev.map_index(b)))
        eprel = float(np.clip(0.1 * rel_tol, 1e-13, 1e-10))
        epabs = 0.1 * rel_tol * scale / max(len(pts) - 1, 1)
        slope = math.pi / self.model.T
        total = 0.0
        errsum = 0.0
        for q0, q1 in zip(pts[:-1], pts[1:]):
            mid = 0.5 * (q0 + q1)
            row = tab[int(self.ev.map_index(mid))]
            A = float(row[0]) ** 2
            B = float(row[1]) ** 2
            ss = float(row[0]) * float(row[1])
            delta = self._reduced_phase(mid, math.atan2(row[3], row[2]))

            def g(sig, A=A, B=B, ss=ss, delta=delta):
                psi = delta + slope * sig
                sn = math.sin(psi)
                cs = math.cos(psi)
                Bv = ss / (A * sn * sn + B * cs * cs)
                return c_const + c_quad * Bv * Bv

            val, err = quad(g, q0 - mid, q1 - mid,
                            epsabs=epabs, epsrel=eprel, limit=200)
            total += val
            errsum += err
        if errsum > rel_tol * max(abs(total), scale):
            raise QuadratureError(
                f"quadrature error bound {errsum:.3e} exceeds rel_tol = "
                f"{rel_tol:.1e} (estimate {total:.17g})",
                estimate=total, error_bound=errsum)
        return total

    # -- energies ------------------------------------------------------------

    def total_energy_quadrature(self, t: float, rel_tol: float = 1e-9) -> float:
        """E(t) = integral of rho over [t - L(t), t + L(t)].

        Adaptive quadrature with mandatory subdivision at milestones,
        half-period points and packet collars; certified to rel_tol or
        raises QuadratureError / ResolutionError.
        """
        t = float(t)
        Lt = self.ev.trajectory(t)
        scale = math.pi / (24.0 * self.model.L)
        return self._integrate_window(t - Lt, t + Lt, rel_tol, scale,
                                      self._rho_inf, self._C)

    def _phi_lo(self, tau: float, n: int) -> float:
        """Antiderivative of B_n^2 (up to T/pi) on the linear-odd branch n.

        With c = 2 n tan(theta) and u = tan(pi (x - k)) + c:
        integral (1 + (u - c)^2) / (1 + u^2)^2 du
          = (1 + c^2/2) atan(u) + (c + (c^2/2) u) / (1 + u^2),
        made continuous across periods by atan(u) -> atan(u) + pi k.
        """
        c = 2.0 * n * math.tan(self.model.theta)
        x = tau / self.model.T
        k = math.floor(x + 0.5)
        u = math.tan(math.pi * (x - k)) + c
        A = math.atan(u) + math.pi * k
        return (1.0 + 0.5 * c * c) * A + (c + 0.5 * c * c * u) / (1.0 + u * u)

    def total_energy_closed(self, t: float) -> float:
        """Exact closed-form E(t) for the linear-odd family.

        The window [t - L(t), t + L(t)] straddles at most one milestone
        (2 n1 + 1) L, so E splits into two single-branch pieces, each an
        exact antiderivative evaluation; no quadrature involved.
        """
        if self.model.family is not Family.LINEAR_ODD:
            raise ValueError("closed form unavailable for family "
                             f"'{self.model.family.value}'")
        t = float(t)
        m = self.model
        Lt = self.ev.trajectory(t)
        ta, tb = t - Lt, t + Lt
        n1 = self.ev.map_index(ta)
        tstar = min(max((2.0 * n1 + 1.0) * m.L, ta), tb)
        piece = (self._phi_lo(tstar, n1) - self._phi_lo(ta, n1)
                 + self._phi_lo(tb, n1 + 1) - self._phi_lo(tstar, n1 + 1))
        return (self._rho_inf * (tb - ta)
                + self._C * (m.T / math.pi) * piece)

    def classical_energy(self, t: float, rel_tol: float = 1e-9) -> float:
        """Classical analogue: E_cl(t) = (rho0/2) integral of R'(tau)^2.

        The initial condition is a uniform classical energy density of
        magnitude rho0 = pi/(24 L^2) split evenly between the two
        chiralities, so E_cl(0) = rho0 L; evolution squares the exact
        R' along each characteristic.  Defined for the linear-odd and
        static families, where the density stays resolvable forever.
        """
        if self.model.family not in (Family.LINEAR_ODD, Family.STATIC):
            raise ValueError("classical energy requires the linear-odd "
                             "or static family")
        t = float(t)
        Lt = self.ev.trajectory(t)
        scale = self.rho0 * self.model.L
        return self._integrate_window(t - Lt, t + Lt, rel_tol, scale,
                                      0.0, 0.5 * self.rho0)

    def asymptotic_energy(self, t):
        """Large-t energy estimate; family dispatch, scalar or array.

        linear-finite : quadratic law omega (omega^2 - omega1^2)
                        tan(theta)^2 t^2 / (24 M pi)
        linear-odd    : staircase [M(M-1) pi tan(theta)^2 /
                        (3 (2M-1)^2 L)] (floor(t/T) + H(theta))^2
        homographic   : hyperbolic maps grow like cosh(rate t) with
                        rate = ln|lambda1/lambda2| / (2 M T); elliptic
                        ones return a long-window mean
        inversion     : exactly periodic, returns the period mean
        static        : -pi/(24 L)

        Emits a UserWarning when any t < 20 T (outside validity).
        """
        m = self.model
        arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
        if np.any(arr < 20.0 * m.T):
            warnings.warn("asymptotic energy requested below t = 20 T; "
                          "the formula is unreliable there", stacklevel=2)
        fam = m.family
        if fam is Family.LINEAR_FINITE:
            coef = (m.omega * (m.omega ** 2 - m.omega1 ** 2)
                    * math.tan(m.theta) ** 2 / (24.0 * math.pi * m.M))
            out = coef * arr * arr
        elif fam is Family.LINEAR_ODD:
            step = 1.0 if m.theta >= 0.0 else 0.0
            coef = (m.M * (m.M - 1) * math.pi * math.tan(m.theta) ** 2
                    / (3.0 * (2 * m.M - 1) ** 2 * m.L))
            out = coef * (np.floor(arr / m.T) + step) ** 2
        elif fam is Family.STATIC:
            out = np.full(arr.shape, -math.pi / (24.0 * m.L))
        elif fam is Family.INVERSION:
            out = np.full(arr.shape, self._period_mean())
        else:
            from . import mobius
            cls = mobius.classify(m.delta1)
            if cls.kind is mobius.MapKind.HYPERBOLIC:
                rate = (math.log(abs(cls.lambda1) / abs(cls.lambda2))
                        / (2.0 * m.M * m.T))
                pref = (4.0 * m.M ** 2 - 1.0) / 96.0 * (m.v1 + 1.0 / m.v1) ** 2
                out = pref * np.cosh(rate * arr)
            elif cls.kind is mobius.MapKind.ELLIPTIC:
                out = np.full(arr.shape, self._period_mean())
            else:
                raise ValueError("asymptotic form unavailable for a "
                                 "parabolic homographic map")
        return float(out[0]) if np.ndim(t) == 0 else out

    def _period_mean(self) -> float:
        """Mean energy over one recurrence window (cached).

        The inversion family is exactly periodic with period
        (4M + sign(theta)) T; elliptic homographic maps are only
        quasi-periodic, so an 8MT window stands in.
        """
        if self._mean_cache is None:
            m = self.model
            if m.family is Family.INVERSION:
                P = (4.0 * m.M + (1.0 if m.theta > 0 else -1.0)) * m.T
            else:
                P = 8.0 * m.M * m.T
            t0 = 24.0 * m.T
            grid = t0 + P * (np.arange(16) + 0.5) / 16.0
            vals = [self.total_energy_quadrature(float(x), 1e-8) for x in grid]
            self._mean_cache = float(np.mean(vals))
        return self._mean_cache

    def period_energy_integral(self, n: int) -> float:
        """One-period integral of the oscillatory density term, region n.

        Returns (omega^2 - omega1^2)/(48 pi) * Tr(H^T H)/det(H) with H
        the matrix of the n-fold map; scale-invariant, so the normalized
        cached powers are used directly.  The tau-integral of the B^2
        term over one full period equals T/2 times Tr(H^T H)/det(H);
        the returned normalization follows the half-period convention
        (identity map gives exactly 2 C).
        """
        if n < 0:
            raise ValueError("parameter out of range: need n >= 0")
        self._region_table(n)
        H = self._Hmats[n]
        det = abs(float(H[0, 0] * H[1, 1] - H[0, 1] * H[1, 0]))
        tr = float(np.sum(H * H))
        return self._C * tr / det

    def energy_series(self, t, method: str = "quadrature",
                      rel_tol: float = 1e-9) -> EnergySeries:
        """Sample E(t) on a grid with one method; see EnergySeries."""
        grid = np.atleast_1d(np.asarray(t, dtype=np.float64))
        if method == "quadrature":
            vals = np.array([self.total_energy_quadrature(x, rel_tol)
                             for x in grid])
        elif method == "closed":
            vals = np.array([self.total_energy_closed(x) for x in grid])
        elif method == "classical":
            vals = np.array([self.classical_energy(x, rel_tol)
                             for x in grid])
        elif method == "asymptotic":
            vals = np.atleast_1d(self.asymptotic_energy(grid))
        else:
            raise ValueError(f"unknown energy method '{method}'")
        tol = rel_tol if method in ("quadrature", "classical") else None
        return EnergySeries(model=self.model, t=grid, energy=vals,
                            method=method, rel_tol=tol)
