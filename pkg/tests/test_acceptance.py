"""The acceptance gate: one test per criterion, each printing its
PASS/FAIL line.  Run with `pytest tests/test_acceptance.py -s` to see
the lines, or `khoco selftest` for the same checks from the CLI."""

import pytest

from khoco import acceptance


def _run(fn, *args, **kwargs):
    ok, detail = fn(*args, **kwargs)
    name = fn.__name__.replace("criterion_", "criterion ")
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, detail


def test_criterion_1_torus_tables():
    _run(acceptance.criterion_1_torus_tables)


def test_criterion_2_hopf_generators():
    _run(acceptance.criterion_2_hopf_generators)


def test_criterion_3_degree_table():
    _run(acceptance.criterion_3_degree_table)


def test_criterion_4_move_calculus():
    _run(acceptance.criterion_4_move_calculus)


def test_criterion_5_genus1_movie():
    _run(acceptance.criterion_5_genus1_movie)


@pytest.mark.slow
def test_criterion_6_theorem_T2q():
    _run(acceptance.criterion_6_theorem_T2q)


def test_criterion_7_spectral():
    _run(acceptance.criterion_7_spectral)


def test_criterion_8_scomplex():
    _run(acceptance.criterion_8_scomplex)


@pytest.mark.slow
def test_criterion_9_property_suite():
    _run(acceptance.criterion_9_property_suite)
