import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ionscope import polarfit as pf
from ionscope.errors import ComponentCountError, InsufficientDataError, ParseError, RankError

F = np.array([0.002, 0.003, 0.004])


def test_quadratic_fit():
    fit = pf.fit_component_alpha(F, -0.5 - 43.515 * F**2)
    assert fit.alpha == pytest.approx(87.03, rel=1e-10)
    assert not fit.flagged


def test_field_independent():
    assert pf.fit_component_alpha(F, np.full(3, -0.3)).alpha == pytest.approx(0.0, abs=1e-6)


def test_quartic_contamination():
    fit = pf.fit_component_alpha(F, -0.5 - 43.515 * F**2 + 1e-2 * F**4)
    assert abs(fit.alpha / 87.03 - 1) < 1e-4
    assert not fit.flagged


def test_residual_flag():
    fit = pf.fit_component_alpha([0.002, 0.003, 0.004, 0.005], -0.5 - 43.5 * np.array([0.002, 0.003, 0.004, 0.005]) ** 2 + np.array([0, 1e-8, 0, 1e-8]))
    assert fit.flagged


def test_fit_errors():
    with pytest.raises(RankError):
        pf.fit_component_alpha([0.003] * 3, [1.0, 1.0, 1.0])
    with pytest.raises(InsufficientDataError):
        pf.fit_component_alpha([0.002, 0.003], [1.0, 1.0])


def test_linear_diagnostic():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        clean = pf.fit_component_alpha(F, -0.5 - 43.515 * F**2, linear_term=True)
    assert not clean.symmetry_warning and abs(clean.linear) < 1e-9
    with pytest.warns(UserWarning, match="inversion symmetry"):
        dirty = pf.fit_component_alpha(F, -0.5 - 43.515 * F**2 + 1e-3 * F, linear_term=True)
    assert dirty.symmetry_warning and dirty.linear == pytest.approx(1e-3, rel=1e-6)


def test_average_components():
    assert pf.average_components([87.03], 0) == 87.03
    assert pf.average_components([1.0, 4.0, 4.0], 1) == pytest.approx(3.0)
    assert pf.average_components([7.5] * 5, 2) == 7.5
    with pytest.raises(ComponentCountError, match="2l\\+1 = 3"):
        pf.average_components([1.0, 2.0], 1)


def test_total_alpha():
    assert pf.total_alpha(87.03, 5.67) == pytest.approx(92.70)
    assert pf.total_alpha(0.0) == 5.67
    assert pf.total_alpha(-54.87, 5.67) == pytest.approx(-49.2)


def test_report_orders_and_tensor():
    s = pf.synthetic_stark("5p", 1, {0: -60.0, 1: -52.305}, E0=-0.2)
    r = pf.polarizability(s)
    assert r.valence == pytest.approx(-54.87, rel=1e-9)
    assert abs(r.order_difference) < 1e-8
    assert r.tensor_spread == pytest.approx(7.695, rel=1e-8)
    assert r.total == pytest.approx(-49.2, rel=1e-9)


def test_positive_m_only_file(tmp_path):
    p = tmp_path / "s.txt"
    rows = "\n".join(f"{m} {f} {-0.5 * (10.0 if m == 0 else 20.0) * f * f}" for m in (0, 1) for f in F)
    p.write_text("# state: 5p\n# ell: 1\n# core_alpha_au: 5.67\n" + rows + "\n")
    r = pf.polarizability(pf.read_stark(p))
    assert r.valence == pytest.approx(50.0 / 3, rel=1e-9)


def test_stark_file_round_trip_and_errors(tmp_path):
    s = pf.synthetic_stark("4d", 2, {0: 40.0, 1: 45.0, 2: 50.0})
    pf.write_stark(s, tmp_path / "s.txt")
    back = pf.read_stark(tmp_path / "s.txt")
    assert np.array_equal(back.samples, s.samples) and back.ell == 2
    (tmp_path / "bad.txt").write_text("# state: x\n# ell: 0\n0 0.002\n")
    with pytest.raises(ParseError, match="bad.txt:3"):
        pf.read_stark(tmp_path / "bad.txt")
    (tmp_path / "bad2.txt").write_text("# state: x\n# ell: 0\n0 0.002 1\n3 0.003 1\n")
    with pytest.raises(ComponentCountError):
        pf.polarizability(pf.read_stark(tmp_path / "bad2.txt"))


def test_molecular_asymptote():
    R = np.linspace(5, 200, 400)
    L = 205.67
    ma = pf.MolecularAlpha("LiSr+", "X", R, L + 100 / R**3, L - 50 / R**3, L)
    rep = pf.check_molecular_asymptote(ma, tol=1e-4)
    assert rep.passed and rep.ordering_violations == ()
    flat = pf.MolecularAlpha("LiSr+", "X", R, np.full_like(R, L), np.full_like(R, L), L)
    rep = pf.check_molecular_asymptote(flat, tol=1e-12)
    assert rep.parallel_residual == 0 and rep.perpendicular_residual == 0
    perp = L - 50 / R**3
    perp[10] = L + 1.0
    bad = pf.MolecularAlpha("LiSr+", "X", R, L + 100 / R**3, perp, L)
    assert pf.check_molecular_asymptote(bad, tol=1e-4).ordering_violations == (float(R[10]),)
    with pytest.raises(InsufficientDataError):
        pf.MolecularAlpha("x", "X", [], [], [], L)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.floats(1e-3, 1e-2), min_size=3, max_size=6, unique=True),
    st.floats(-3000, 3000),
    st.floats(-1.0, 1.0),
)
def test_exact_on_quadratics(fields, alpha, shift):
    Fs = np.array(fields)
    if Fs.max() / Fs.min() < 1.5:
        Fs = np.append(Fs, 1.6 * Fs.max())
    a = pf.fit_component_alpha(Fs, -0.4 - 0.5 * alpha * Fs**2).alpha
    b = pf.fit_component_alpha(Fs, shift - 0.4 - 0.5 * alpha * Fs**2).alpha
    assert a == pytest.approx(alpha, rel=1e-9, abs=1e-6)
    assert b == pytest.approx(a, rel=1e-9, abs=1e-6)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-500, 500), min_size=5, max_size=5))
def test_permutation_invariance(alphas):
    a = pf.total_alpha(pf.average_components(alphas, 2))
    b = pf.total_alpha(pf.average_components(alphas[::-1], 2))
    assert a == pytest.approx(b, rel=1e-12, abs=1e-12)
