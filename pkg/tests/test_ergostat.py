import csv
import io
from fractions import Fraction

import pytest

from config import CircleMapConfig
from errors import BudgetExceededError
from ergostat import (CSV_HEADER, arc_overlap, birkhoff_average, correlation_series, exact_correlation,
                      mixing_report, orbit, preimage_arcs, product_birkhoff, report_rows, write_csv)
from models import Arc, CirclePoint
from observables import ArcIndicator, ProductFunction, Trig, dyadic_arcs
from pa_map import PAMap, rotation_map

F = Fraction
HALF = Arc(CirclePoint(0), F(1, 2))
QUARTER = Arc(CirclePoint(0), F(1, 4))


def test_arc_overlap():
    assert arc_overlap(Arc(CirclePoint(F(3, 4)), F(1, 2)), HALF) == F(1, 4)
    assert arc_overlap(HALF, HALF) == F(1, 2)
    assert arc_overlap(HALF, Arc(CirclePoint(F(1, 2)), F(1, 2))) == 0
    assert arc_overlap(Arc.full(), QUARTER) == F(1, 4)


def test_correlations_of_g_shrink_by_five(g):
    assert exact_correlation(g, HALF, HALF, 0) == F(1, 4)
    assert exact_correlation(g, HALF, HALF, 1) == F(1, 20)
    assert exact_correlation(g, HALF, HALF, 2) == F(1, 100)
    assert exact_correlation(g, HALF, QUARTER, 1) == F(1, 40)
    for a in dyadic_arcs():
        for b in dyadic_arcs():
            corr0 = exact_correlation(g, a, b, 0)
            assert exact_correlation(g, a, b, 3) == corr0 / 125


def test_correlations_of_tent(tent):
    assert exact_correlation(tent, HALF, HALF, 0) == F(1, 4)
    assert exact_correlation(tent, HALF, HALF, 1) == 0
    assert exact_correlation(tent, HALF, HALF, 4) == 0


def test_invariant_arc_never_decorrelates(inv3):
    for n in range(4):
        assert exact_correlation(inv3, HALF, HALF, n) == F(1, 4)


def test_preimage_arcs_keep_measure(g):
    arcs = preimage_arcs(g, HALF, 3)
    assert sum(a.length for a in arcs) == F(1, 2)


def test_component_budget(g):
    config = CircleMapConfig(component_budget=5)
    with pytest.raises(BudgetExceededError) as e:
        exact_correlation(g, HALF, HALF, 3, config)
    assert e.value.depth == 2
    assert e.value.code == "BUDGET_EXCEEDED"


def test_birkhoff_average_on_exact_orbit(tent):
    h = ArcIndicator(Arc(CirclePoint(F(1, 4)), F(1, 2)))
    assert birkhoff_average(tent, h, CirclePoint(F(1, 8)), 10) == pytest.approx(0.2)
    path = orbit(tent, CirclePoint(F(1, 8)), 10)
    assert path.exact_steps == 10
    assert path.exact[:4] == [F(1, 8), F(1, 4), F(1, 2), 0]


def test_product_birkhoff():
    half_turn = rotation_map(F(1, 2))
    h = ProductFunction(Trig("cos", 1), Trig("cos", 1))
    value = product_birkhoff(half_turn, h, CirclePoint(F(1, 8)), CirclePoint(F(1, 8)), 2)
    assert value == pytest.approx(0.5)


def test_orbit_switches_to_float64():
    f = PAMap((0, F(2, 3), 1), (0, 1, 0))
    path = orbit(f, CirclePoint(F(1, 5)), 50, CircleMapConfig(rational_budget_bits=8))
    assert 0 < path.exact_steps < 50
    assert path.exact_steps + path.floats.size == 50
    assert all(0 <= x < 1 for x in path.floats)


def test_birkhoff_rejects_empty_orbit(tent):
    with pytest.raises(ValueError):
        birkhoff_average(tent, Trig("cos", 1), CirclePoint(0), 0)


def test_mixing_report_for_g(g):
    config = CircleMapConfig(birkhoff_length=5000, monte_carlo_starts=20, correlation_depth=2)
    report = mixing_report(g, config)
    assert report.map_name == "g"
    assert report.correlations_decay
    assert report.ergodic_consistent
    assert report.mixing_consistent
    assert not report.truncated_at
    assert [row.n for row in report.birkhoff if row.function == "cos1"] == [10, 100, 1000, 5000]


def test_mixing_report_for_rotation(r_third):
    config = CircleMapConfig(birkhoff_length=1000, monte_carlo_starts=10, correlation_depth=3)
    report = mixing_report(r_third, config)
    assert not report.correlations_decay
    assert not report.ergodic_consistent
    assert not report.mixing_consistent
    assert report.final_defects["cos3"] > 0.3


def test_mixing_report_records_truncation(g):
    config = CircleMapConfig(birkhoff_length=100, monte_carlo_starts=4, correlation_depth=4,
                             component_budget=20)
    report = mixing_report(g, config)
    assert report.truncated_at
    assert all(depth >= 2 for depth in report.truncated_at.values())


def test_write_csv(tent):
    config = CircleMapConfig(birkhoff_length=100, monte_carlo_starts=4, correlation_depth=1)
    text = write_csv(report_rows(mixing_report(tent, config)))
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == list(CSV_HEADER) == ["function", "n", "value", "defect"]
    assert [f"corr{HALF}|{HALF}", "0", "1/4", "0.25"] in rows
    assert [f"corr{HALF}|{HALF}", "1", "0", "0.0"] in rows


def test_product_with_constant_factor_is_a_birkhoff_average(g):
    u = Trig("sin", 2)
    x, y = CirclePoint(F(1, 7)), CirclePoint(F(2, 9))
    config = CircleMapConfig(rational_budget_bits=64)
    single = birkhoff_average(g, u, x, 500, config)
    paired = product_birkhoff(g, ProductFunction(u, Trig("cos", 0)), x, y, 500, config)
    assert paired == pytest.approx(single)


def test_correlation_series_matches_single_depths(g):
    a = Arc(CirclePoint(F(1, 8)), F(1, 4))
    series = correlation_series(g, a, QUARTER, 6)
    assert series == [F(1, 16) / 5 ** n for n in range(7)]
    assert series[3] == exact_correlation(g, a, QUARTER, 3)


def test_component_counts_stay_within_branch_bound(g):
    for n in range(5):
        assert len(preimage_arcs(g, QUARTER, n)) <= g.branch_count() ** n


def test_budget_counts_branches(g):
    with pytest.raises(BudgetExceededError) as e:
        correlation_series(g, HALF, HALF, 2, CircleMapConfig(component_budget=4))
    assert e.value.depth == 1
    assert e.value.components == 5


def test_mixing_report_for_inv3(inv3):
    config = CircleMapConfig(birkhoff_length=2000, monte_carlo_starts=10, correlation_depth=2)
    report = mixing_report(inv3, config)
    assert not report.correlations_decay
    assert not report.ergodic_consistent
    assert not report.mixing_consistent
    assert report.final_defects[f"1{HALF}"] == pytest.approx(0.5)
