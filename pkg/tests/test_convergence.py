import math

import pytest

from hyperprey.convergence import (
    ConvergenceStudy,
    heat_kernel_report,
    hyperbolic_study,
    parabolic_study,
)


def test_orders_of_synthetic_study():
    study = ConvergenceStudy("synthetic", [0.04, 0.02, 0.01], [16.0, 4.0, 1.0], [1, 4, 16])
    assert study.orders == pytest.approx([2.0, 2.0])
    assert study.min_order == pytest.approx(2.0)
    df = study.to_frame()
    assert list(df.columns) == ["dx", "steps", "l1_error", "order"]
    assert math.isnan(df["order"].iloc[0])
    assert df["order"].iloc[2] == pytest.approx(2.0)


@pytest.mark.parametrize("a", [0.0, 0.5])
def test_parabolic_second_order(a):
    study = parabolic_study(a=a)
    assert study.errors[0] > study.errors[1] > study.errors[2]
    assert study.min_order >= 1.8
    # dt scales with dx^2
    assert study.steps[2] > 10 * study.steps[0]


def test_hyperbolic_first_order():
    study = hyperbolic_study()
    assert study.errors[0] > study.errors[1] > study.errors[2]
    assert study.min_order >= 0.8


def test_heat_kernel_report():
    df = heat_kernel_report()
    assert len(df) == 2
    assert (abs(df["sampled_l1"] - 1.0) < 1e-6).all()
    assert (df["grad_rel_err"] < 1e-4).all()
