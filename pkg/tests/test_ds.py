import numpy as np
import pytest

from rfuncds.ds import (
    BoxAxis,
    ConstraintSpec,
    identify,
    joint_expression,
    load_report,
    membership,
    plot_count,
    save_report,
)
from rfuncds.errors import DTooSmall, EmptyConstraintList, OutOfBox
from rfuncds.expr import eval_arrays, eval_expr
from rfuncds.exprtext import parse_infix
from rfuncds.polyfit import BasisSpec
from rfuncds.reactor import CQA_BASIS

BOX = (BoxAxis("T", 250.0, 300.0, unit="K"), BoxAxis("t", 250.0, 300.0, unit="min"))

SUM_SPEC = ConstraintSpec("sum", 550.0, evaluator=lambda p: p[0] + p[1])
PROD_SPEC = ConstraintSpec("product", 75625.0, evaluator=lambda p: p[0] * p[1])


def synthetic_report(**kw):
    return identify([SUM_SPEC, PROD_SPEC], BOX, 32, CQA_BASIS, alpha=1.0, **kw)


def grid_points(n=101):
    T, t = np.meshgrid(np.linspace(250, 300, n), np.linspace(250, 300, n), indexing="ij")
    return T.ravel(), t.ravel()


def test_polynomial_constraints_recovered_exactly():
    report = synthetic_report()
    coeff_sum = dict(zip(CQA_BASIS.monomials, report.constraints[0].fit.coefficients))
    assert coeff_sum[(1, 0)] == pytest.approx(1.0, abs=1e-8)
    assert coeff_sum[(0, 1)] == pytest.approx(1.0, abs=1e-8)
    assert abs(coeff_sum[(2, 0)]) <= 1e-8 and abs(coeff_sum[(1, 1)]) <= 1e-8
    coeff_prod = dict(zip(CQA_BASIS.monomials, report.constraints[1].fit.coefficients))
    assert coeff_prod[(1, 1)] == pytest.approx(1.0, abs=1e-8)
    for c in report.constraints:
        assert c.fit.r_squared >= 1 - 1e-12
        assert c.validation_r_squared >= 1 - 1e-12


def test_joint_membership_matches_threshold_oracle():
    report = synthetic_report()
    T, t = grid_points(101)
    joint = eval_arrays(report.joint.expr, {"T": T, "t": t})
    oracle = (T + t >= 550.0) & (T * t >= 75625.0)
    # this grid hits both thresholds exactly (e.g. T + t == 550 along the
    # anti-diagonal); there the fitted phi is zero up to ~1e-10 coefficient
    # noise and its sign is meaningless, so compare strictly off-threshold
    off = (np.abs(T + t - 550.0) > 1e-6) & (np.abs(T * t - 75625.0) > 1e-6)
    assert np.array_equal((joint >= 0)[off], oracle[off])
    assert off.sum() > 10_000


def test_validation_statistics():
    report = synthetic_report()
    assert report.validation.n_points == 256
    assert report.validation.agreement_rate == 1.0
    assert report.validation.n_disagreements == 0
    assert report.sampling.validation_skip == report.sampling.skip + report.sampling.n_train


def test_single_constraint_joint_is_identity():
    report = identify([SUM_SPEC], BOX, 16, CQA_BASIS)
    phi = report.constraints[0].phi
    T, t = grid_points(21)
    joint_vals = eval_arrays(report.joint.expr, {"T": T, "t": t})
    phi_vals = eval_arrays(phi.expr, {"T": T, "t": t})
    assert np.array_equal(joint_vals, phi_vals)


def test_membership_examples():
    report = synthetic_report()
    assert membership(report, (300.0, 300.0)) == "inside"      # 600 >= 550, 9e4 >= 75625
    assert membership(report, (250.0, 250.0)) == "outside"     # 500 < 550
    assert membership(report, {"T": 300.0, "t": 300.0}) == "inside"


def test_membership_boundary_single_constraint():
    report = identify([SUM_SPEC], BOX, 16, CQA_BASIS)
    assert membership(report, (275.0, 275.0)) == "boundary"    # T + t = 550 exactly


def test_membership_out_of_box():
    report = synthetic_report()
    with pytest.raises(OutOfBox):
        membership(report, (240.0, 275.0))
    with pytest.raises(OutOfBox):
        membership(report, (275.0,))
    with pytest.raises(OutOfBox):
        membership(report, {"T": 275.0})


def test_membership_never_calls_model():
    calls = {"n": 0}

    def counting_sum(p):
        calls["n"] += 1
        return p[0] + p[1]

    report = identify([ConstraintSpec("sum", 550.0, evaluator=counting_sum)],
                      BOX, 16, CQA_BASIS)
    after_identify = calls["n"]
    assert after_identify == 16 + 256
    for u in [(260.0, 280.0), (290.0, 290.0), (275.0, 275.0)]:
        membership(report, u)
    assert calls["n"] == after_identify


def test_order_invariance_of_sign():
    fwd = synthetic_report()
    rev = identify([PROD_SPEC, SUM_SPEC], BOX, 32, CQA_BASIS, alpha=1.0)
    T, t = grid_points(41)
    env = {"T": T, "t": t}
    assert np.array_equal(eval_arrays(fwd.joint.expr, env) >= 0,
                          eval_arrays(rev.joint.expr, env) >= 0)


def test_decomposition_equality_alpha1():
    report = synthetic_report()
    T, t = grid_points(41)
    env = {"T": T, "t": t}
    joint = eval_arrays(report.joint.expr, env)
    phis = np.minimum.reduce([eval_arrays(c.phi.expr, env) for c in report.constraints])
    assert np.array_equal(np.sign(joint), np.sign(phis))


def test_model_shares_runs_across_constraints():
    runs = {"n": 0}

    def model(p):
        runs["n"] += 1
        return (p[0] + p[1], p[0] * p[1])

    specs = [ConstraintSpec("sum", 550.0), ConstraintSpec("product", 75625.0)]
    identify(specs, BOX, 16, CQA_BASIS, model=model)
    assert runs["n"] == 16 + 256


def test_identify_validation_errors():
    with pytest.raises(EmptyConstraintList):
        identify([], BOX, 16, CQA_BASIS)
    with pytest.raises(ValueError):
        identify([ConstraintSpec("sum", 550.0)], BOX, 16, CQA_BASIS)  # no evaluator/model
    bad_basis = BasisSpec(vars=("a", "b"), monomials=((0, 0),))
    with pytest.raises(ValueError):
        identify([SUM_SPEC], BOX, 16, bad_basis)


def test_contours_present_in_2d():
    report = synthetic_report(contour_resolution=64)
    assert set(report.contours) == {"sum", "product", "joint"}
    assert all(len(cs.polylines) >= 1 for cs in report.contours.values())


def test_joint_expression_single_constraint():
    report = identify([SUM_SPEC], BOX, 16, CQA_BASIS)
    text = joint_expression(report, "infix")
    back = parse_infix(text)
    for T, t in [(250.0, 250.0), (275.0, 280.0), (300.0, 265.0)]:
        assert eval_expr(back, {"T": T, "t": t}) == pytest.approx(T + t - 550.0, abs=1e-6)


def test_joint_expression_structure_two_constraints():
    report = synthetic_report()
    abs_text = joint_expression(report, "infix", alpha1_style="abs")
    sqrt_text = joint_expression(report, "infix", alpha1_style="sqrt")
    assert abs_text.count("abs(") == 1 and "sqrt(" not in abs_text
    assert sqrt_text.count("sqrt(") == 1 and "abs(" not in sqrt_text


def test_joint_expression_round_trip(rng):
    from rfuncds.expr import canonicalize_alpha1, desugar_r_nodes
    from rfuncds.exprtext import parse

    report = synthetic_report()
    joint = report.joint.expr
    references = {
        ("infix", "sqrt"): desugar_r_nodes(joint),
        ("infix", "abs"): desugar_r_nodes(canonicalize_alpha1(joint)),
        ("tree", "sqrt"): joint,
    }
    for (fmt, style), reference in references.items():
        text = joint_expression(report, fmt, alpha1_style=style)
        back = parse(text, fmt)
        for _ in range(20):
            T = float(rng.uniform(250, 300))
            t = float(rng.uniform(250, 300))
            env = {"T": T, "t": t}
            assert eval_expr(back, env) == pytest.approx(
                eval_expr(reference, env), abs=1e-12)


def test_plot_count():
    assert plot_count(2) == 1
    assert plot_count(3) == 9
    assert plot_count(4) == 54
    with pytest.raises(DTooSmall):
        plot_count(1)


def test_report_save_load_round_trip(tmp_path):
    report = synthetic_report()
    path = tmp_path / "report.json"
    save_report(report, path, artifacts={"joint_svg": "joint.svg"}, provenance="test run")
    loaded = load_report(path)
    assert [a.name for a in loaded.box] == ["T", "t"]
    assert loaded.box[0].unit == "K"
    assert loaded.alpha == 1.0
    assert loaded.validation.agreement_rate == report.validation.agreement_rate
    assert [c.name for c in loaded.constraints] == ["sum", "product"]
    for c_new, c_old in zip(loaded.constraints, report.constraints):
        assert np.array_equal(c_new.fit.coefficients, c_old.fit.coefficients)
        assert c_new.threshold == c_old.threshold
    for u in [(300.0, 300.0), (250.0, 250.0), (275.0, 275.0), (265.0, 290.0)]:
        assert membership(loaded, u) == membership(report, u)


def test_load_rejects_other_files(tmp_path):
    path = tmp_path / "other.json"
    path.write_text('{"format": "something-else"}')
    with pytest.raises(ValueError):
        load_report(path)
