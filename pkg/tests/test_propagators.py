import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fib_example import N, X, plus
from wiring_operad import (
    STAR,
    Coord,
    PropagatorError,
    TupleList,
    check_historical,
    compose_propagators,
    coordinate_project,
    delay_propagator,
    drop_last,
    lift_pointwise,
    make_value_domain,
    moore_propagator,
    prefix_propagator,
    product_propagators,
    zip_align,
)
from wiring_operad.propagators import exhaustive_samples, relabel, split, trim_propagator

ABCD = make_value_domain("abcd", "finite", ["a", "b", "c", "d"])
NAT0 = make_value_domain("N0", "naturals", basepoint=0)
x = Coord("x", NAT0)
y = Coord("y", NAT0)
s = Coord("s", ABCD)


def col(coord, values):
    return TupleList.from_columns([(coord, values)])


def running_sum():
    return moore_propagator([x], [y], (0,), lambda row, st: ((st + row[0],), st + row[0]), 0, name="sigma")


class TestMicroExamples:
    def test_plus(self):
        a, b = Coord("a_X", N), Coord("b_X", N)
        ell = TupleList.from_columns([(a, [4, 5, 6, 7]), (b, [1, 1, 3, 7])])
        assert plus()(ell).column("c_X") == [1, 5, 6, 9, 14]

    def test_running_sum(self):
        assert running_sum()(col(x, [1, 3, 5, 7, 10])).column("y") == [0, 1, 4, 9, 16, 26]

    def test_delay_three(self):
        out = delay_propagator(3, [s])(col(s, ["a", "a", "b", STAR, "d"]))
        assert out.column("s") == [STAR, STAR, STAR, "a", "a", "b", STAR, "d"]

    def test_drop_last(self):
        assert drop_last(col(x, [0, 1, 4, 9, 16])).column("x") == [0, 1, 4, 9]


class TestListOperations:
    def test_drop_last_of_empty(self):
        with pytest.raises(PropagatorError):
            drop_last(col(x, []))

    def test_zip_align(self):
        z = zip_align([col(x, [1, 2]), col(s, ["a", "b"])])
        assert z.rows == ((1, "a"), (2, "b"))
        assert z.keys == ("x", "s")

    def test_zip_align_length_mismatch(self):
        with pytest.raises(PropagatorError, match="different lengths"):
            zip_align([col(x, [1]), col(s, [])])

    def test_split_inverts_zip(self):
        a, b = col(x, [1, 2]), col(s, ["a", "b"])
        assert split(zip_align([a, b]), [1, 1]) == [a, b]

    def test_coordinate_project_splits_wires(self):
        ell = TupleList.from_columns([(x, [1, 2]), (Coord("q", ABCD), ["a", "b"])])
        out = coordinate_project(ell, {Coord("u", NAT0): "x", Coord("v", NAT0): "x"})
        assert out.rows == ((1, 1), (2, 2))

    def test_coordinate_project_domain_mismatch(self):
        with pytest.raises(PropagatorError, match="domain mismatch"):
            coordinate_project(col(x, [1]), {Coord("u", ABCD): "x"})

    def test_from_columns_checks_domains(self):
        with pytest.raises(PropagatorError, match="not in domain"):
            col(x, [-1])

    def test_units(self):
        assert TupleList.units(3).rows == ((), (), ())


class TestPropagators:
    def test_delay_zero_is_identity(self):
        assert delay_propagator(0, [x])(col(x, [3, 4])).column("x") == [3, 4]

    def test_lift_pointwise_is_degree_zero(self):
        double = lift_pointwise(lambda r: (2 * r[0],), [x], [y])
        assert double.degree == 0
        assert double(col(x, [1, 2, 3])).column("y") == [2, 4, 6]
        assert check_historical(double, [[(1,), (2,), (5,)]]).ok

    def test_lift_pointwise_domain_checked(self):
        neg = lift_pointwise(lambda r: (-1 - r[0],), [x], [y])
        with pytest.raises(PropagatorError):
            neg(col(x, [1]))

    def test_moore_initial_row_checked(self):
        with pytest.raises(PropagatorError):
            moore_propagator([x], [y], (-1,), lambda r, st: (r, st))

    def test_moore_step_checked(self):
        bad = moore_propagator([x], [y], (0,), lambda r, st: ((-5,), st))
        with pytest.raises(PropagatorError, match="not in domain"):
            bad(col(x, [1]))

    def test_product(self):
        p = product_propagators([running_sum(), relabel(delay_propagator(1, [s]), [s], [Coord("t", ABCD)])])
        ell = TupleList.from_columns([(x, [1, 2]), (s, ["a", "b"])])
        assert p(ell).rows == ((0, STAR), (1, "a"), (3, "b"))
        assert p.degree == 1 and p.is_moore

    def test_product_degree_mismatch(self):
        with pytest.raises(PropagatorError, match="different degrees"):
            product_propagators([running_sum(), delay_propagator(2, [s])])

    def test_empty_product(self):
        p = product_propagators([], degree=1)
        assert p(TupleList((), ((), ()))).rows == ((), (), ())

    def test_sequential_degrees_add(self):
        q = compose_propagators(running_sum(), relabel(delay_propagator(2, [x]), [y], [y]))
        assert q.degree == 3
        assert q(col(x, [1, 2])).column("y") == [0, 0, 0, 1, 3]
        assert check_historical(q, [[(1,), (2,), (3,)]]).ok

    def test_sequential_shape_mismatch(self):
        with pytest.raises(PropagatorError, match="cannot compose"):
            compose_propagators(running_sum(), running_sum())

    def test_trim(self):
        t = trim_propagator(running_sum())
        assert t.degree == 0 and t(col(x, [1, 2])).column("y") == [0, 1]

    def test_call_checks_coordinates(self):
        with pytest.raises(PropagatorError, match="do not match"):
            running_sum()(col(y, [1]))

    def test_stepper_replay_for_prefix_propagator(self):
        p = prefix_propagator([x], [y], 1, lambda rows: [(0,)] + [(max(r[0] for r in rows[: k + 1]),) for k in range(len(rows))])
        st_ = p.stepper()
        seen = [st_.peek()]
        for v in (3, 1, 4):
            st_.feed((v,))
            seen.append(st_.peek())
        assert seen == [(0,), (3,), (3,), (4,)]
        assert not p.is_moore

    def test_stepper_needs_degree_one(self):
        with pytest.raises(PropagatorError):
            delay_propagator(2, [x]).stepper()


class TestHistoricality:
    def test_detects_length_violation(self):
        bad = prefix_propagator([x], [y], 1, lambda rows: list(rows))
        rep = check_historical(bad, [[(1,), (2,)]])
        assert not rep.ok and "length law" in rep.violation

    def test_detects_prefix_violation(self):
        # output depends on the last input retroactively
        bad = prefix_propagator([x], [y], 1, lambda rows: [(rows[-1][0] if rows else 0,)] * (len(rows) + 1))
        rep = check_historical(bad, [[(1,), (2,)]])
        assert not rep.ok and "prefix law" in rep.violation

    def test_exhaustive_for_finite_domains(self):
        d = delay_propagator(1, [s])
        assert len(exhaustive_samples([s], max_len=3)) == 5**3
        rep = check_historical(d, max_len=3)
        assert rep.ok and rep.checked == 4 * 5**3

    def test_infinite_domain_needs_samples(self):
        with pytest.raises(PropagatorError):
            check_historical(running_sum())


naturals = st.integers(min_value=0, max_value=50)


@given(st.lists(naturals, max_size=8), st.integers(min_value=0, max_value=4))
def test_delay_laws(values, n):
    d = delay_propagator(n, [x])
    out = d(col(x, values)).column("x")
    assert out == [0] * n + values
    assert check_historical(d, [[(v,) for v in values]]).ok


@given(st.lists(naturals, min_size=1, max_size=8))
def test_drop_last_commutes_with_running_sum(values):
    ell = col(x, values)
    p = running_sum()
    assert drop_last(p(ell)) == p(drop_last(ell))


@settings(max_examples=50)
@given(st.lists(st.tuples(naturals, naturals), max_size=6))
def test_plus_step_matches_sum(pairs):
    a, b = Coord("a_X", N), Coord("b_X", N)
    ell = TupleList(((a, b)), tuple(pairs))
    out = plus()(ell).column("c_X")
    assert out == [1] + [p + q for p, q in pairs]


@given(st.lists(naturals, max_size=8))
def test_moore_apply_matches_stepper(values):
    p = running_sum()
    st_ = p.stepper()
    got = [st_.peek()]
    for v in values:
        st_.feed((v,))
        got.append(st_.peek())
    assert got == p.apply_rows([(v,) for v in values])


def test_x_box_is_used_by_plus():
    assert [c.key for c in plus().inputs] == [p.label for p in X.inputs]
