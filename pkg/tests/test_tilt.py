"""Tests for the tilt function, its identities, and margin certification."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conecert import tilt
from conecert.exact import AngleDeg, Interval

ANGLES_K = [
    (Fraction(100), Fraction(1)),
    (Fraction(120), Fraction(1, 2)),
    (Fraction(135), Fraction(1, 3)),
    (Fraction(150), Fraction(1, 4)),
]


def params_for(theta, k, n):
    return tilt.TiltParams(theta=AngleDeg.from_degrees(theta), k=k, n=n, exploratory=True)


# ---------------------------------------------------------------------------
# Construction and validation
# ---------------------------------------------------------------------------


def test_unit_normal_validation():
    with pytest.raises(ValueError):
        tilt.UnitNormal((1.0, 0.0))  # ambient dimension too small
    with pytest.raises(ValueError):
        tilt.UnitNormal((1.0, 1.0, 0.0))  # not unit
    nu = tilt.UnitNormal.normalized((1.0, 1.0, 1.0, 1.0))
    assert math.isclose(sum(c * c for c in nu.components), 1.0, abs_tol=1e-14)


def test_params_dimensional_restriction():
    with pytest.raises(ValueError):
        tilt.TiltParams(theta=AngleDeg.from_degrees(120), k=Fraction(1), n=4)
    # Same k is allowed in exploratory mode, and for n = 2 unconditionally.
    params_for(120, Fraction(1), 4)
    tilt.TiltParams(theta=AngleDeg.from_degrees(120), k=Fraction(1), n=2)
    with pytest.raises(ValueError):
        tilt.TiltParams(theta=AngleDeg.from_degrees(0), k=Fraction(1), n=2)
    with pytest.raises(ValueError):
        tilt.TiltParams(theta=AngleDeg.from_degrees(120), k=Fraction(2), n=2)


def test_default_k():
    assert tilt.default_k(2) == 1
    assert tilt.default_k(3) == 1
    assert tilt.default_k(4) == Fraction(1, 2)
    assert tilt.default_k(7) == Fraction(1, 5)
    with pytest.raises(ValueError):
        tilt.default_k(1)


# ---------------------------------------------------------------------------
# Pointwise tilt values
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("orientation", ["up", "down"])
@pytest.mark.parametrize("theta,k", ANGLES_K)
def test_tilt_vanishes_exactly_at_reference_normals(theta, k, orientation):
    params = params_for(theta, k, 3)
    nu = tilt.UnitNormal.reference(3, params.theta, orientation)
    # The reference components are floats, so g^2 is zero to ~1e-16 and the
    # tilt value g to its square root.
    assert tilt.g_theta_k(nu, params) <= 1e-7


def test_tilt_positive_away_from_reference():
    params = params_for(120, Fraction(1, 2), 3)
    nu = tilt.UnitNormal.normalized((0.3, 0.5, 0.2, 0.7))
    assert tilt.g_theta_k(nu, params) > 0.1


def test_tilt_dimension_mismatch_rejected():
    params = params_for(120, Fraction(1, 2), 4)
    with pytest.raises(ValueError):
        tilt.g_theta_k(tilt.UnitNormal.normalized((1.0, 1.0, 1.0)), params)


# ---------------------------------------------------------------------------
# Identities: symbolic certificates are the ground truth, sampling corroborates
# ---------------------------------------------------------------------------


def test_symbolic_identity_certificates_all_hold():
    certs = tilt.symbolic_identity_certificates()
    assert certs == {
        "gradient_bound_identity": True,
        "frame_sum_identity": True,
        "wedge_sum_identity": True,
        "signed_gap_identity": True,
    }


@given(
    st.lists(st.floats(-1, 1, allow_nan=False, width=32), min_size=4, max_size=4),
    st.sampled_from(ANGLES_K),
)
@settings(max_examples=100, deadline=None)
def test_gradient_identity_residual_pointwise(raw, angle_k):
    if sum(abs(v) for v in raw) < 1e-3:
        raw = [1.0, 0.0, 0.0, 0.0]
    theta, k = angle_k
    params = params_for(theta, k, 3)
    nu = tilt.UnitNormal.normalized(raw)
    assert abs(tilt.gradient_identity_residual(nu, params)) <= 1e-12


@given(
    st.lists(st.floats(-1, 1, allow_nan=False, width=32), min_size=4, max_size=4),
    st.sampled_from(ANGLES_K),
)
@settings(max_examples=100, deadline=None)
def test_frame_sum_identities_pointwise(raw, angle_k):
    if sum(abs(v) for v in raw) < 1e-3:
        raw = [0.5, 0.5, 0.5, 0.5]
    theta, k = angle_k
    params = params_for(theta, k, 3)
    nu = tilt.UnitNormal.normalized(raw)
    rep = tilt.frame_sums(nu, params)
    if rep.g_squared < 1e-6:
        return  # near the tilt zeros the frame normalisation degenerates
    assert abs(rep.residual_sum) <= 1e-9
    assert abs(rep.residual_wedge) <= 1e-9
    assert -1e-9 <= rep.w <= 1 + 1e-9
    # The two identities are coupled: sum = 1 + wedge-sum.
    assert math.isclose(rep.sum_squares, 1.0 + rep.sum_wedge_squares, rel_tol=0, abs_tol=1e-9)


def test_identity_campaign_residuals_small():
    params = params_for(120, Fraction(1, 2), 3)
    res = tilt.identity_campaign(params, samples=20_000, seed=42)
    assert res.max_gradient_residual <= 1e-12
    assert res.max_frame_sum_residual <= 1e-10
    assert res.max_wedge_sum_residual <= 1e-10
    assert res.max_j_over_g2 <= 1.0 + 1e-10
    assert res.samples == 20_000


def test_identity_campaign_deterministic():
    params = params_for(135, Fraction(1, 3), 4)
    a = tilt.identity_campaign(params, samples=5_000, seed=7)
    b = tilt.identity_campaign(params, samples=5_000, seed=7)
    assert a == b
    c = tilt.identity_campaign(params, samples=5_000, seed=8)
    assert a != c


# ---------------------------------------------------------------------------
# Spectral constant and margin
# ---------------------------------------------------------------------------


def test_f_of_t_exact_at_perfect_square_radicands():
    # f_n(1) = [(n-1)*2 + 2]/(2n) = 1 for every n.
    for n in (2, 3, 5, 9):
        one = tilt.f_of_t(n, 1)
        assert one.lo == one.hi == 1
    # f_2(0) = [1 + 1]/4 = 1/2.
    zero = tilt.f_of_t(2, 0)
    assert zero.lo == zero.hi == Fraction(1, 2)


@given(st.integers(2, 8), st.fractions(min_value=0, max_value=1, max_denominator=64))
@settings(max_examples=60, deadline=None)
def test_f_of_t_enclosure_soundness(n, t):
    enc = tilt.f_of_t(n, t)
    true = ((n - 1) * (1 + t) + math.sqrt(4 * t + (n - 1) ** 2 * (1 - t) ** 2)) / (2 * n)
    assert enc.lo <= Fraction(true).limit_denominator(10**15) + Fraction(1, 10**12)
    assert float(enc.lo) - 1e-12 <= true <= float(enc.hi) + 1e-12
    assert enc.width <= Fraction(1, 10**9)


def test_s_constant_90_degrees_exact():
    # At 90 degrees sin^2 = 1 exactly, so s = f_n(1 - k).
    s = tilt.s_constant(3, Fraction(1), AngleDeg.from_degrees(90))
    # f_3(0) = [2 + 2]/6 = 2/3.
    assert s.lo == s.hi == Fraction(2, 3)


def test_stability_margin_signs():
    # Margin is positive in the certified range and collapses near the poles.
    pos = tilt.stability_margin(3, Fraction(1), AngleDeg.from_degrees(90))
    assert pos.strictly_positive()
    near_pole = tilt.stability_margin(3, Fraction(1), AngleDeg.from_degrees(Fraction(1, 10)))
    assert near_pole.hi < Fraction(1, 100)


def test_margin_polynomial_tracks_margin_sign():
    # sign(P(|cos theta|)) must agree with sign(margin) on a spread of angles.
    for n, k in [(2, Fraction(1)), (4, Fraction(1, 2)), (7, Fraction(1, 5))]:
        for deg in (5, 30, 60, 90, 120, 175):
            theta = AngleDeg.from_degrees(deg)
            v = abs(theta.cos().mid)
            margin = tilt.stability_margin(n, k, theta)
            pval = tilt.margin_polynomial_value(n, k, v)
            if margin.strictly_positive():
                assert pval > 0
            elif margin.strictly_negative():
                assert pval < 0


@pytest.mark.parametrize(
    "n,k",
    [(2, Fraction(1)), (3, Fraction(1)), (4, Fraction(1, 2)),
     (5, Fraction(1, 3)), (6, Fraction(1, 4)), (7, Fraction(1, 5))],
)
def test_margin_certified_positive_on_working_range(n, k):
    rep = tilt.certify_margin_positive(n, k, 1, 179, max_depth=40)
    assert rep.verdict == "certified"
    assert rep.method in ("exact", "interval")


def test_margin_certification_fails_towards_poles():
    # The margin vanishes at the poles, so a range touching 0 cannot certify
    # at any depth; strictly interior ranges still certify.
    rep = tilt.certify_margin_positive(3, Fraction(1), 0, 179, max_depth=8)
    assert rep.verdict == "inconclusive"
    interior = tilt.certify_margin_positive(3, Fraction(1), Fraction(1, 10**6), 179, max_depth=12)
    assert interior.verdict == "certified"


def test_margin_certification_depth_limit_is_honoured():
    shallow = tilt.certify_margin_positive(3, Fraction(1), 0, 179, max_depth=0)
    assert shallow.verdict == "inconclusive"
    assert shallow.provenance["boxes_checked"] == 1
    deeper = tilt.certify_margin_positive(3, Fraction(1), 0, 179, max_depth=6)
    assert deeper.provenance["boxes_checked"] > 1


# ---------------------------------------------------------------------------
# Comparison bounds (ball campaigns around the reference gradient)
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("orientation", ["up", "down"])
def test_appendix_bounds_at_reference_gradient(orientation):
    theta = AngleDeg.from_degrees(120)
    sign = 1.0 if orientation == "up" else -1.0
    cot = float(theta.cos()) / float(theta.sin())
    # The reference graph gradient: normal equals the reference normal.
    Du = (-sign * cot, 0.0)
    rep = tilt.appendix_bounds_check(Du, theta, orientation=orientation)
    assert rep.applicable
    for slack in (
        rep.slack_gradient_shift,
        rep.slack_normal_gap,
        rep.slack_gradient_size,
        rep.slack_tilt_vs_gap,
        rep.signed_gap_slack,
    ):
        assert slack >= -1e-12


@pytest.mark.parametrize("theta_deg", [91, 120, 150])
@pytest.mark.parametrize("orientation", ["up", "down"])
def test_appendix_campaign_clean(theta_deg, orientation):
    res = tilt.appendix_campaign(
        4, AngleDeg.from_degrees(theta_deg), orientation=orientation, samples=5_000, seed=42
    )
    assert res.violation_count == 0
    assert res.all_applicable
    assert res.min_signed_gap_slack >= -1e-12


def test_appendix_campaign_vectorized_matches_pointwise():
    theta = AngleDeg.from_degrees(120)
    res = tilt.appendix_campaign(3, theta, orientation="up", samples=200, seed=11)
    # Recompute the worst slacks with the scalar evaluator on the same ball.
    rng = np.random.default_rng(11)
    cot = float(theta.cos()) / float(theta.sin())
    center = np.array([-cot, 0.0, 0.0])
    raw = rng.standard_normal((200, 3))
    raw /= np.linalg.norm(raw, axis=1)[:, None]
    radii = res.radius * rng.random(200) ** (1 / 3)
    pts = center + radii[:, None] * raw
    worst = min(
        tilt.appendix_bounds_check(tuple(p), theta, orientation="up").signed_gap_slack
        for p in pts
    )
    # Same seed, same sampling scheme: the campaign must reproduce it.
    assert math.isclose(worst, res.min_signed_gap_slack, rel_tol=0, abs_tol=1e-12)
