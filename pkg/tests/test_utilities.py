import random

import pytest

from redapt.hrcs import DomainError, eval_utilities


class TestBrightRegime:
    def test_optimal_intervals_give_full_utilities(self):
        u = eval_utilities(4.0, 4.0, 50.0)
        assert (u.u_e, u.u_close, u.u_open, u.u_safety, u.u_pass) == (1.0, 1.0, 1.0, 1.0, 1.0)

    def test_non_optimal_intervals_rejected_when_bright(self):
        with pytest.raises(DomainError):
            eval_utilities(3.0, 4.0, 50.0)
        with pytest.raises(DomainError):
            eval_utilities(4.0, 5.0, 21.0)


class TestDarkRegime:
    def test_optimum_carried_into_darkness_loses_all_safety(self):
        u = eval_utilities(4.0, 4.0, 10.0)
        assert u.u_safety == 0.0
        assert u.u_pass == 1.0

    def test_fully_retimed_point(self):
        u = eval_utilities(1.5, 6.5, 10.0)
        assert u.u_e == 0.0
        assert u.u_close == pytest.approx(1 / 6, abs=1e-15)
        assert u.u_open == pytest.approx(1 / 6, abs=1e-15)
        assert u.u_safety == pytest.approx(5 / 6, abs=1e-15)
        assert u.u_pass == pytest.approx(1 / 6, abs=1e-15)

    def test_boundary_is_dark_at_twenty_lux(self):
        assert eval_utilities(4.0, 4.0, 20.0).u_e == 0.0

    def test_close_interval_domain(self):
        with pytest.raises(DomainError):
            eval_utilities(1.0, 5.0, 10.0)  # open bound excluded
        with pytest.raises(DomainError):
            eval_utilities(4.5, 5.0, 10.0)

    def test_open_interval_domain(self):
        with pytest.raises(DomainError):
            eval_utilities(2.0, 7.0, 10.0)  # upper bound excluded
        with pytest.raises(DomainError):
            eval_utilities(2.0, 3.9, 10.0)


def test_utilities_bounded_over_domain_sweep():
    rng = random.Random(11)
    for _ in range(2000):
        t_close = rng.uniform(1.0001, 4.0)
        t_open = rng.uniform(4.0, 6.9999)
        u = eval_utilities(t_close, t_open, rng.uniform(0.0, 20.0))
        for value in (u.u_e, u.u_close, u.u_open, u.u_safety, u.u_pass):
            assert 0.0 <= value <= 1.0


def test_pareto_identity_dark_unit_sample():
    rng = random.Random(12)
    for _ in range(200):
        u = eval_utilities(rng.uniform(1.001, 4.0), rng.uniform(4.0, 6.999), 5.0)
        assert abs(u.u_pass + u.u_safety - 1.0) <= 1e-12
