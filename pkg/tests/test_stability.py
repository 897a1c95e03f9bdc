"""Stability verdicts and the frequency-amplitude chart functions."""
import math
import random

import numpy as np
import pytest

from vibcav import catalog, mobius, stability
from vibcav.mobius import MapKind
from vibcav.observables import Observables
from vibcav.stability import (Verdict, amplitude_frequency_curve,
                              classify_model, instability_threshold,
                              max_amplitude, phase_diagram_scan)


def test_chart_anchors():
    assert instability_threshold(2.5) == 0.2
    assert max_amplitude(2.5) == 0.4
    assert abs(amplitude_frequency_curve(4.5) - 1.0 / 9.0) < 2e-16
    assert instability_threshold(3.0) == 0.0
    assert amplitude_frequency_curve(4.0) == 0.0
    # between even integers the resonant curve touches the threshold
    for x in (2.5, 4.5, 6.5):
        assert amplitude_frequency_curve(x) == pytest.approx(
            instability_threshold(x), rel=1e-15)


def test_chart_domain_errors():
    for fn in (instability_threshold, max_amplitude, amplitude_frequency_curve):
        with pytest.raises(ValueError, match="need omega_ratio > 0"):
            fn(0.0)
        with pytest.raises(ValueError, match="need omega_ratio > 0"):
            fn(-1.3)


def test_threshold_tongue_symmetry():
    # the tongue around each integer k is symmetric in the numerator:
    # thr(k + d) (k + d) = thr(k - d) (k - d) = d
    rng = random.Random(31)
    for _ in range(200):
        k = rng.randint(1, 9)
        d = rng.uniform(1e-6, 0.49)
        lhs = instability_threshold(k + d) * (k + d)
        rhs = instability_threshold(k - d) * (k - d)
        assert abs(lhs - d) < 1e-14 and abs(rhs - d) < 1e-14


def test_classify_families(lf, lo, inv, hom, static):
    assert classify_model(static).verdict is Verdict.STABLE
    rep = classify_model(lf)
    assert rep.verdict is Verdict.POWER_LIKE
    assert rep.energy_exponent == 2.0
    assert rep.growth_rate is None
    rep = classify_model(lo)
    assert rep.verdict is Verdict.POWER_LIKE
    assert classify_model(catalog.make_linear_odd(1, 0.3)).verdict is Verdict.STABLE
    assert classify_model(inv).verdict is Verdict.STABLE
    rep = classify_model(hom)
    assert rep.verdict is Verdict.EXPONENTIAL
    lam = (2.0 + math.sqrt(3.0)) / (2.0 - math.sqrt(3.0))
    assert rep.growth_rate == pytest.approx(math.log(lam) / (2.0 * math.pi),
                                            rel=1e-14)
    assert rep.map_class.kind is MapKind.HYPERBOLIC


def test_classify_homographic_subkinds():
    par = classify_model(catalog.make_homographic(1, 1.0, 0.5))
    assert par.verdict is Verdict.POWER_LIKE
    assert par.map_class.kind is MapKind.PARABOLIC
    ell = classify_model(catalog.make_homographic(1, 1.0, 0.3))
    assert ell.verdict is Verdict.STABLE
    assert ell.map_class.kind is MapKind.ELLIPTIC


def test_hyperbolic_iff_discriminant():
    # the map is hyperbolic exactly when v0 (2 v1 - v0) > 0
    rng = random.Random(37)
    n_hyp = 0
    for _ in range(200):
        v0 = rng.uniform(-2.0, 2.0)
        v1 = rng.uniform(-2.0, 2.0)
        if abs(v1) < 1e-3 or abs(v0 - v1) < 1e-3:
            continue
        disc = v0 * (2.0 * v1 - v0)
        if abs(disc) < 1e-6:
            continue
        try:
            m = catalog.make_homographic(1, v0, v1)
        except ValueError:
            continue
        kind = mobius.classify(m.delta1).kind
        if disc > 0.0:
            assert kind is MapKind.HYPERBOLIC, (v0, v1)
            n_hyp += 1
        else:
            assert kind is MapKind.ELLIPTIC, (v0, v1)
    assert n_hyp > 30


def test_measured_rate_matches_verdict():
    # one spot check that the eigenvalue rate is the observed one
    m = catalog.make_homographic(2, 0.8, 1.4)
    rep = classify_model(m)
    assert rep.verdict is Verdict.EXPONENTIAL
    o = Observables(m)
    P = 2.0 * m.M * m.T
    marks = [3.0 * P, 4.0 * P, 5.0 * P]
    es = [o.total_energy_quadrature(t, rel_tol=1e-3) for t in marks]
    fitted = 0.5 * (math.log(es[1] / es[0]) + math.log(es[2] / es[1])) / P
    assert fitted == pytest.approx(rep.growth_rate, rel=1e-3)


def test_report_to_dict(hom):
    d = classify_model(hom).to_dict()
    assert d["verdict"] == "exponential"
    assert d["map_kind"] == "hyperbolic"
    assert d["model"]["family"] == "homographic"
    assert len(d["lambda1"]) == 2 and d["lambda1"][1] == 0.0
    assert d["growth_rate"] > 0.0


def test_phase_diagram_layout_and_verdicts():
    pts = phase_diagram_scan((2.0, 3.0), (0.0, 1.0), (11, 21))
    assert len(pts) == 11 * 21
    # row-major over amplitude, frequency fastest
    assert pts[0].omega_ratio == 2.0 and pts[0].amplitude_ratio == 0.0
    assert pts[1].omega_ratio == pytest.approx(2.1) and pts[1].amplitude_ratio == 0.0
    assert pts[11].omega_ratio == 2.0 and pts[11].amplitude_ratio == 0.05
    by = {(round(p.omega_ratio, 9), round(p.amplitude_ratio, 9)): p.verdict
          for p in pts}
    assert by[(2.0, 0.9)] is Verdict.FORBIDDEN       # above the luminal bound
    assert by[(2.5, 0.45)] is Verdict.FORBIDDEN
    assert by[(2.0, 0.2)] is Verdict.POWER_LIKE      # integer resonance line
    assert by[(3.0, 0.1)] is Verdict.POWER_LIKE
    assert by[(2.5, 0.2)] is Verdict.POWER_LIKE      # on the threshold curve
    assert by[(2.5, 0.05)] is Verdict.STABLE
    assert by[(2.5, 0.35)] is Verdict.EXPONENTIAL
    assert by[(2.5, 0.0)] is Verdict.STABLE
    low = phase_diagram_scan((0.5, 1.0), (0.0, 0.2), (2, 2))
    assert all(p.verdict is Verdict.FORBIDDEN for p in low)


def test_phase_diagram_grid_guard():
    with pytest.raises(ValueError, match="need grid >= 2 x 2"):
        phase_diagram_scan((2.0, 3.0), (0.0, 1.0), (1, 5))
