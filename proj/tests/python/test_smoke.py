import math

import numpy as np
import pytest

import periscope as ps


def test_translation_round_trip():
    d1 = ps.Domain.disc([0.0, 0.0], 1.0)
    sys = ps.synthesize(ps.ScalarField.parse("3*x1"), d1, c=2.0)
    assert len(sys["patches"]) == 2
    r = ps.trace(sys, [0.2, 0.1])
    assert r["status"] == "ok"
    assert r["exit_label"] == pytest.approx([3.2, 0.1], abs=1e-10)
    rep = ps.verify(sys, ps.PlaneMap.translation([3.0, 0.0], d1), samples=200)
    assert rep["passed"]


def test_recovered_gradient_of_dilation():
    d1 = ps.Domain.disc([3.0, 0.0], 1.0)
    sys = ps.synthesize(ps.ScalarField.parse("0.5*(x1^2+x2^2)"), d1)
    rec = ps.recover_gradient(sys)
    assert rec["residual"] < 1e-8
    assert rec["potential"].gradient([3.5, 0.2]) == pytest.approx([3.5, 0.2], abs=1e-8)


def test_overlapping_beams_raise_with_code():
    with pytest.raises(ps.PeriscopeError) as exc:
        ps.synthesize(ps.ScalarField.parse("0.05*x1"), ps.Domain.disc([0.0, 0.0], 1.0))
    assert ps.error_code(exc.value) == "domains-not-disjoint"


def test_factor_linear_reassembles():
    f = np.array([[0.0, 1.0], [2.0, 0.0]])
    s1, s2 = ps.factor_linear(f)
    assert np.allclose(s1, s1.T) and np.allclose(s2, s2.T)
    assert np.allclose(s2 @ s1, f, atol=1e-12)


def test_realize_reflection_counts():
    d1 = ps.Domain.disc([-3.0, 0.0], 0.5)
    flip = ps.PlaneMap.linear(np.array([[0.0, 1.0], [1.0, 0.0]]), [0.0, 0.0], d1)
    four = ps.realize(flip, d1)
    assert four["expected_reflections"] == 4
    six = ps.realize(ps.PlaneMap.rotation(0.1, d1), d1)
    assert six["expected_reflections"] == 6
    x = [-3.1, 0.2]
    r = ps.trace(six, x)
    c, s = math.cos(0.1), math.sin(0.1)
    assert r["exit_label"] == pytest.approx([c * x[0] - s * x[1], s * x[0] + c * x[1]], abs=1e-5)


def test_pencil_map_closed_form_matches_trace():
    for c in (0.0, 0.3, 0.9):
        for alpha in (0.4, 1.3, 2.5):
            beta = ps.pencil_map(c, alpha)
            assert ps.pencil_map_geometric(c, alpha) == pytest.approx(beta, abs=1e-10)
            assert math.tan(alpha / 2) * math.tan(beta / 2) == pytest.approx((1 - c) / (1 + c), abs=1e-12)


def test_scene_round_trip():
    sys = ps.synthesize(ps.ScalarField.parse("3*x1"), ps.Domain.disc([0.0, 0.0], 1.0), c=2.0)
    text = ps.serialize_scene(sys, "translation")
    doc = ps.parse_scene(text)
    assert doc["systems"][0]["name"] == "translation"
    entry = {k: v for k, v in doc["systems"][0].items() if k != "name"}
    assert ps.serialize_scene(entry, "translation") == text
    assert "\nv " in ps.patch_obj(sys, 0)
