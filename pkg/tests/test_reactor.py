import numpy as np
import pytest

from rfuncds.errors import NonpositiveTemperature
from rfuncds.qmc import scale, sobol
from rfuncds.reactor import (
    DEFAULT_PARAMS,
    Box,
    KineticParams,
    OperatingPoint,
    apply_config,
    batch_cqa,
    cqa_vector,
    integrate,
    rate_constants,
    simulate,
)

# the activation-energy table read as E/R in kelvin; gives a regime where
# both quality attributes are O(1) and the purity threshold crosses the box
KELVIN_PARAMS = KineticParams(r_gas=1.0)

U_CENTER = OperatingPoint(275.0, 275.0)

# regression values pinned from rtol=1e-11/atol=1e-13 runs (Radau and LSODA
# agree to ~1e-9 relative)
PINNED = {
    "default": (1.2770035887964606e-10, -0.0053430303962393524),
    "kelvin": (0.7814622798566331, 269.7391378473544),
}


def sobol_points(n=16):
    return scale(sobol(2, n, 1), [(250, 300), (250, 300)]).points


def test_rate_constants_high_temperature_limit():
    k1, k2 = rate_constants(1e12)
    assert k1 == pytest.approx(DEFAULT_PARAMS.k1_0, rel=1e-9)
    assert k2 == pytest.approx(DEFAULT_PARAMS.k2_0, rel=1e-9)


def test_rate_constants_at_300k():
    k1, k2 = rate_constants(300.0)
    assert k1 == pytest.approx(0.0666 * np.exp(-2500.2 / (8.314 * 300.0)), rel=1e-14)
    assert k2 == pytest.approx(10333.5 * np.exp(-5000.1 / (8.314 * 300.0)), rel=1e-14)


def test_rate_constants_zero_energy():
    params = KineticParams(e1=0.0, e2=0.0)
    for T in (1.0, 250.0, 5000.0):
        k1, k2 = rate_constants(T, params)
        assert k1 == params.k1_0
        assert k2 == params.k2_0


def test_rate_constants_temperature_validation():
    with pytest.raises(NonpositiveTemperature):
        rate_constants(0.0)
    with pytest.raises(NonpositiveTemperature):
        rate_constants(-5.0)


def test_params_validation():
    with pytest.raises(ValueError):
        KineticParams(c_a0=-1.0)
    with pytest.raises(ValueError):
        KineticParams(k1_0=0.0)
    KineticParams(e1=0.0)  # zero energy is allowed


@pytest.mark.parametrize("label,params", [("default", DEFAULT_PARAMS),
                                          ("kelvin", KELVIN_PARAMS)])
def test_pinned_regression_values(label, params):
    purity, profit = PINNED[label]
    out = simulate(U_CENTER, params)
    assert out.purity == pytest.approx(purity, rel=1e-5 if label == "default" else 1e-6)
    assert out.profit == pytest.approx(profit, rel=1e-6)


def test_no_reaction_limit():
    params = KineticParams(k1_0=1e-300)
    out = simulate(OperatingPoint(275.0, 275.0), params)
    assert out.c_a == pytest.approx(params.c_a0, rel=1e-12)
    assert out.c_b <= 1e-30 and out.c_c <= 1e-30
    assert out.purity <= 1e-30
    purity, profit = cqa_vector(OperatingPoint(275.0, 275.0), params)
    assert profit == pytest.approx(-20.0 * params.c_a0 * params.volume / (275.0 + 30.0),
                                   rel=1e-12)


@pytest.mark.parametrize("params", [DEFAULT_PARAMS, KELVIN_PARAMS])
def test_riccati_oracle_and_conservation(params):
    # closed-form solution of the decoupled A equation as an independent check
    for T, t in sobol_points(4):
        u = OperatingPoint(T, t)
        tr = integrate(u, params, dense=True)
        k1, _ = rate_constants(T, params)
        taus = np.linspace(0.05, 1.0, 10)
        a_exact = params.c_a0 / (1.0 + 2.0 * t * k1 * params.c_a0 * taus)
        a_num = tr.interpolant(taus)[0]
        assert np.abs((a_num - a_exact) / a_exact).max() <= 1e-6
        defect = np.abs(tr.states[0] + 2 * (tr.states[1] + tr.states[2]) - params.c_a0)
        assert defect.max() / params.c_a0 <= 1e-6


@pytest.mark.parametrize("params", [DEFAULT_PARAMS, KELVIN_PARAMS])
def test_monotone_decay_and_nonnegativity(params):
    tr = integrate(U_CENTER, params)
    a = tr.states[0]
    assert np.all(np.diff(a) < 0)
    assert tr.states.min() >= -1e-9 * params.c_a0


def test_purity_in_unit_interval():
    for T, t in sobol_points(8):
        out = simulate(OperatingPoint(T, t), KELVIN_PARAMS)
        assert 0.0 <= out.purity <= 1.0


def test_integrator_methods_agree():
    for params in (DEFAULT_PARAMS, KELVIN_PARAMS):
        a = simulate(U_CENTER, params, method="lsoda")
        b = simulate(U_CENTER, params, method="radau")
        scale_c = params.c_a0
        for fa, fb in ((a.c_a, b.c_a), (a.c_b, b.c_b), (a.c_c, b.c_c)):
            assert abs(fa - fb) <= 1e-7 * scale_c


def test_tolerance_halving_stability():
    # in the O(1) regime the CQA values move by far less than 1e-7 relative
    for T, t in sobol_points(16):
        u = OperatingPoint(T, t)
        a = cqa_vector(u, KELVIN_PARAMS, rtol=1e-8, atol=1e-10)
        b = cqa_vector(u, KELVIN_PARAMS, rtol=5e-9, atol=5e-11)
        assert abs(a[0] - b[0]) / abs(b[0]) < 1e-7
        assert abs(a[1] - b[1]) / abs(b[1]) < 1e-7


def test_tolerance_halving_stability_default_regime():
    # default purity sits at the integrator's absolute noise floor (~1e-10),
    # so compare against a mixed relative/absolute yardstick
    for T, t in sobol_points(16):
        u = OperatingPoint(T, t)
        a = cqa_vector(u, rtol=1e-8, atol=1e-10)
        b = cqa_vector(u, rtol=5e-9, atol=5e-11)
        assert abs(a[0] - b[0]) <= 1e-7 * max(abs(b[0]), 1.0)
        assert abs(a[1] - b[1]) <= 1e-7 * max(abs(b[1]), 1.0)


def test_integrate_reports_statistics():
    tr = integrate(U_CENTER, KELVIN_PARAMS)
    assert tr.steps >= 10
    assert tr.nfev > tr.steps
    assert 0 <= tr.conservation_defect <= 1e-6
    out = simulate(U_CENTER, KELVIN_PARAMS)
    assert out.steps == tr.steps
    assert out.error_estimate == tr.conservation_defect


def test_fast_path_matches_generic(rng):
    pts = sobol_points(16)
    for params in (DEFAULT_PARAMS, KELVIN_PARAMS):
        purity, profit, est = batch_cqa(pts[:, 0], pts[:, 1], params)
        assert est <= 1e-8
        for (T, t), p_fast, pr_fast in zip(pts, purity, profit):
            p_ref, pr_ref = cqa_vector(OperatingPoint(T, t), params,
                                       rtol=1e-10, atol=1e-12)
            assert abs(p_fast - p_ref) <= 1e-8 * max(1.0, abs(p_ref))
            assert abs(pr_fast - pr_ref) <= 1e-8 * max(1.0, abs(pr_ref))


def test_fast_path_validation():
    with pytest.raises(NonpositiveTemperature):
        batch_cqa([-1.0], [250.0])
    with pytest.raises(ValueError):
        batch_cqa([250.0], [0.0])
    with pytest.raises(ValueError):
        batch_cqa([250.0, 260.0], [250.0])


def test_apply_config():
    params, box, rtol, atol = apply_config(
        {"r_gas": 1.0, "T_lo": 240.0, "rtol": 1e-9})
    assert params.r_gas == 1.0
    assert params.e1 == DEFAULT_PARAMS.e1
    assert box.T == (240.0, 300.0)
    assert rtol == 1e-9 and atol == 1e-10
    with pytest.raises(KeyError):
        apply_config({"gas_constant": 1.0})


def test_box_contains():
    box = Box()
    assert box.contains(OperatingPoint(250.0, 300.0))
    assert not box.contains(OperatingPoint(249.9, 275.0))
