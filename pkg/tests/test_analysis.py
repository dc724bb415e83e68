import math
from fractions import Fraction

import pytest

from vtfar import analysis
from vtfar.analysis import (
    compute_bounds,
    count_far_patterns,
    count_patterns,
    delta,
    far_lower_bound,
    far_redundancy_bound,
    fraction_grid_csv,
    prefix_collisions,
    redundancy_table,
    verify_code,
    verify_fraction_bound,
)
from vtfar.decoder import DecodeReport, FAILED, decode
from vtfar.errors import BudgetExceeded
from vtfar.farcode import make_code


def test_delta_values():
    assert delta(6) == 13 / 32
    assert delta(3) > 1
    assert far_redundancy_bound(100, 3) == math.inf


def test_large_n_worked_example():
    r = compute_bounds(10**8, 10, 4000)
    assert r.omega == 1000 and r.P == 1000
    assert r.rate_lower_bound >= 0.88
    assert math.isclose(r.error_prob_bound, 0.044)
    assert all(r.hypotheses.values()) and not r.warnings
    assert any("DISCREPANCY" in x for x in r.notes)
    assert any("consistent" in x and "0.88" in x for x in r.notes)


def test_error_bound_power_law_scaling():
    # t = n^alpha, d = 4 n^alpha log2 n: the error bound times n^(1-3 alpha) is 44 log2 n
    alpha = 0.2
    for n in (10**10, 10**15, 10**20):
        t = round(n ** alpha)
        d = 4 * t * round(math.log2(n))
        r = compute_bounds(n, t, d)
        scaled = r.error_prob_bound * n / t**3
        assert math.isclose(scaled, 11 * d / t, rel_tol=1e-12)
        assert math.isclose(scaled / math.log2(n), 44, rel_tol=0.02)


def test_fractional_block_length_warns():
    r = compute_bounds(1000, 2, 30)
    assert r.P == Fraction(15, 2)
    assert any("not divisible" in w for w in r.warnings)
    assert "P=15/2 (7.5)" in r.lines()


def test_hypothesis_flags():
    r = compute_bounds(1000, 10, 8)
    assert not r.hypotheses["d_ge_4t"]
    assert not r.hypotheses["t_le_cuberoot_n_over_6"]
    assert any("d_ge_4t" in w for w in r.warnings)


def test_counts():
    assert count_patterns(5, 1) == 16
    assert count_patterns(3, 3) == 64
    c = count_far_patterns(6, 2, 3)
    assert (c.total, c.far) == (154, 73)
    assert c.fraction_not_far == Fraction(81, 154)
    assert "far=73" in c.lines()
    assert count_far_patterns(9, 3, 1).far == count_patterns(9, 3)
    assert count_far_patterns(9, 1, 7).fraction_not_far == 0


def test_count_budget():
    with pytest.raises(BudgetExceeded):
        count_patterns(10**7, 2)


def test_fraction_not_far_nonincreasing_in_n():
    for t in (2, 3, 4):
        for Q in (3, 6, 12):
            vals = [count_far_patterns(n, t, Q).fraction_not_far for n in range(Q * t, 400, 7)]
            assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_fraction_bound_grid():
    c = verify_fraction_bound(3000, 2, 48)
    assert c.omega == Fraction(125, 2)
    assert c.bound_42_over_omega == Fraction(42 * 2, 125)
    assert c.hypotheses_ok and c.passed
    assert c.bound_11t2d_over_n == Fraction(44) / c.omega
    t1 = verify_fraction_bound(3000, 1, 48)
    assert t1.exact_fraction == 0 and t1.passed
    with pytest.raises(ValueError):
        verify_fraction_bound(3000, 2, 50)


def test_fraction_csv():
    text = fraction_grid_csv([verify_fraction_bound(3000, 2, 48), verify_fraction_bound(6000, 2, 48)])
    lines = text.strip().splitlines()
    assert lines[0] == "n,t,d,P,omega,exact_fraction,bound_42_over_omega,bound_eq_2_3,pass"
    assert len(lines) == 3 and lines[1].endswith(",true")


def test_redundancy_table_respects_bounds():
    for row in redundancy_table(range(6, 9), 80):
        assert row["redundancy"] <= row["upper"] + 1e-9
        assert row["redundancy"] >= row["lower_64"]


def test_exhaustive_verify_small():
    code = make_code(12, 3)
    rep = verify_code(code, "exhaustive", check_stream=True, check_prefix=True)
    assert rep.ok and rep.trials == code.size * rep.patterns
    assert rep.lines()[-1] == "result=pass"
    assert "stream_delay_violations=0" in rep.lines()


def test_exhaustive_budget():
    with pytest.raises(BudgetExceeded):
        verify_code(make_code(40, 5), "exhaustive", budget=1000)


def test_jobs_give_same_report():
    code = make_code(14, 4)
    one = verify_code(code, "exhaustive")
    two = verify_code(code, "exhaustive", jobs=2)
    assert (one.trials, one.failure_count) == (two.trials, two.failure_count)


def test_sampled_is_deterministic():
    code = make_code(60, 5)
    a = verify_code(code, "sampled", samples=200, seed=11)
    b = verify_code(code, "sampled", samples=200, seed=11)
    assert a.lines() == b.lines()
    assert "seed=11" in a.lines() and a.ok


def test_unknown_mode():
    with pytest.raises(ValueError):
        verify_code(make_code(12, 3), "fuzzy")


def broken_decoder(y, code):
    """Gives up whenever a deletion shortened the word."""
    r = decode(y, code)
    if len(y) < code.n:
        return DecodeReport(None, 1, [], FAILED, reason="broken on purpose")
    return r


def test_broken_decoder_yields_witnesses():
    code = make_code(12, 3)
    rep = verify_code(code, "exhaustive", decoder=broken_decoder)
    assert not rep.ok
    assert rep.failure_count > 0 and len(rep.failures) == analysis.MAX_WITNESSES
    w = rep.failures[0]
    assert "D" in w.pattern and w.got == "-"
    assert any(line.startswith("witness kind=decode x=") for line in rep.lines())
    assert rep.lines()[-1] == "result=fail"


def test_broken_decoder_with_jobs():
    code = make_code(12, 3)
    serial = verify_code(code, "exhaustive", decoder=broken_decoder)
    par = verify_code(code, "exhaustive", decoder=broken_decoder, jobs=2)
    assert par.failure_count == serial.failure_count


def test_prefix_collisions_tiny_codes():
    for n, P in ((17, 3), (14, 3), (11, 2)):
        assert prefix_collisions(make_code(n, P)) == 0


def test_lower_bound_below_upper():
    for P in range(6, 13):
        for n in (240, 10_000, 10**6):
            assert far_lower_bound(n, P) <= far_redundancy_bound(n, P)


def test_prefix_collisions_found_for_dense_patterns():
    from vtfar.bitword import enumerate_far_patterns
    code = make_code(17, 3)
    assert prefix_collisions(code, patterns=list(enumerate_far_patterns(17, 1, 2))) > 0
