from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.errors import BadEvidence, BadPoint, Inadmissible, InvalidParameter, NotConvertible
from src.models.branch_resolution import Mtuple, RRpoint, resolve
from src.models.duval_planes import (CLASSIFICATION_TABLES, ConicEvidence, DuValConfig, all_dn_configs,
                                     bareiss_rank, build_branch, check_admissible, conic_space_dim,
                                     convert_d0_to_d1, enumerate_classification, irregularity, minimal_ksq,
                                     q_possible, surface_report, table_check)
from tests.oracle import admissible_dn, conic_dim, dn_numbers

CIRCLE  = [(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1), (3, 4, 5), (5, 12, 13)]
GENERIC = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1), (1, 2, 3), (1, -1, 2)]


#%% admissibility
@pytest.mark.parametrize('config', [
    DuValConfig.type_dn(3, 2, 1),
    DuValConfig.type_dn(0, 6),
    DuValConfig.type_dn(1, 4, 1, True),
    DuValConfig.type_b(),
    DuValConfig.type_d(),
])
def test_admissible(config):
    assert check_admissible(config).passed


@pytest.mark.parametrize('config, reason', [
    (DuValConfig.type_dn(0, 0, 1), 'delta2 <= n'),
    (DuValConfig.type_dn(4, 2, 2), '> 6'),
    (DuValConfig.type_dn(7), 'outside 0..6'),
    (DuValConfig.type_dn(2, -1), 'non-negative'),
    (DuValConfig.type_dn(2, gamma_infinitely_near=True), 'n = 1'),
    (DuValConfig('B', 0, 0, 1), 'type D0'),
    (DuValConfig('B', 0, 0, 2), 'genus 2'),
    (DuValConfig('D', 1), 'takes no n'),
])
def test_inadmissible(config, reason):
    report = check_admissible(config)
    assert not report.passed
    assert any(reason in r for r in report.reasons)
    with pytest.raises(Inadmissible):
        build_branch(config)


def test_admissibility_warnings():
    assert any('K^2 = 1' in w for w in check_admissible(DuValConfig.type_dn(1, 4, 1, True)).warnings)
    assert any('<= 0' in w for w in check_admissible(DuValConfig.type_dn(2, 0, 4)).warnings)
    assert check_admissible(DuValConfig.type_dn(2, 4)).warnings == ()
    assert check_admissible(DuValConfig.type_dn(0, 0, 1)).to_dict()['passed'] is False


def test_unknown_variant():
    with pytest.raises(InvalidParameter):
        DuValConfig('E')
    with pytest.raises(InvalidParameter):
        ConicEvidence('maybe')


#%% branch curves
def test_dn_branch():
    branch = build_branch(DuValConfig.type_dn(2, 1, 1))
    assert branch.branch_class.to_list() == [14]
    assert branch.singularities == (Mtuple('gamma', 6), RRpoint('p1', "p1'", 5), RRpoint('p2', "p2'", 5),
                                    RRpoint('q1', "q1'", 3), Mtuple('r1', 4))


def test_gamma_infinitely_near_branch():
    branch = build_branch(DuValConfig.type_dn(1, 2, 0, True))
    assert branch.singularities[0] == RRpoint('p1', "p1'", 5)
    assert branch.singularities[1] == Mtuple('gamma', 4, "p1'")
    cover = resolve(branch)
    assert cover.model.center('gamma').parent == "p1'"


def test_type_b_and_d_branches():
    b = build_branch(DuValConfig.type_b())
    assert b.ambient.kind.e == 2 and b.branch_class.to_list() == [8, 14]
    d = build_branch(DuValConfig.type_d())
    assert d.branch_class.to_list() == [8] and d.singularities == ()


#%% reports
def test_quadric_cone_report():
    r = surface_report(DuValConfig.type_dn(2, 0, 3))
    assert (r.chi, r.pg, r.q, r.ksq_minimal, r.ksq_resolution) == (2, 1, 0, 2, -2)
    assert (r.minus_two_curves, r.k_isolated, r.kr, r.h0_2k_delta) == (4, 4, 4, 0)
    assert (r.bicanonical_degree, r.bicanonical_image_degree, r.torsion_rank_lower) == (4, 2, 1)
    assert r.pencil.to_dict() == {'genus': 3, 'hyperelliptic': True, 'base_points': 0, 'double_fibres': 2,
                                  'h_square': 0, 'h_dot_k': 4, 'h_dot_r': 8}
    assert 'ample_canonical' not in r.to_dict()


def test_irregular_d6_report():
    r = surface_report(DuValConfig.type_dn(6, conic=ConicEvidence.on_conic()))
    assert (r.pg, r.q, r.ksq_minimal, r.torsion_rank_lower) == (1, 1, 8, 5)
    assert r.pencil.double_fibres == 6
    r = surface_report(DuValConfig.type_dn(6))
    assert (r.pg, r.q, r.ksq_minimal, r.k_isolated) == (0, 0, 8, 12)


def test_smooth_octic_and_dectic():
    d = surface_report(DuValConfig.type_d())
    assert (d.pg, d.q, d.ksq_minimal, d.k_isolated, d.pencil, d.ample_canonical) == (3, 0, 2, 0, None, True)
    d0 = surface_report(DuValConfig.type_dn(0))
    assert (d0.pg, d0.ksq_minimal, d0.k_isolated, d0.pencil, d0.ample_canonical) == (6, 8, 0, None, True)
    assert d0.to_dict()['ample_canonical'] is True


def test_non_essential_double_point_spoils_ampleness():
    d0 = surface_report(DuValConfig.type_dn(0), non_essential_double_point=True)
    assert (d0.pg, d0.ksq_minimal, d0.ample_canonical) == (6, 8, False)
    assert d0.to_dict()['ample_canonical'] is False
    assert surface_report(DuValConfig.type_d(), non_essential_double_point=True).ample_canonical is True
    assert surface_report(DuValConfig.type_dn(0, 2), non_essential_double_point=True).ample_canonical is None


def test_type_b_report():
    b = surface_report(DuValConfig.type_b())
    assert (b.pg, b.q, b.ksq_minimal, b.ksq_resolution, b.k_isolated, b.minus_two_curves) == (6, 0, 9, 8, 1, 1)
    assert (b.pencil.genus, b.pencil.base_points, b.pencil.double_fibres) == (3, 1, 0)


def test_gamma_near_pencil_has_a_base_point():
    r = surface_report(DuValConfig.type_dn(1, 3, 0, True))
    assert r.ksq_minimal == 4
    assert (r.pencil.base_points, r.pencil.double_fibres) == (1, 1)


@pytest.mark.parametrize('n, delta1, delta2, near', admissible_dn())
def test_reports_match_oracle(n, delta1, delta2, near):
    config = DuValConfig.type_dn(n, delta1, delta2, near)
    r = surface_report(config)
    chi, ksq_res, ksq_min = dn_numbers(n, delta1, delta2, near)
    assert (r.chi, r.ksq_resolution, r.ksq_minimal) == (chi, ksq_res, ksq_min)
    assert minimal_ksq(config) == ksq_min
    assert (r.pg, r.q) == (chi - 1, 0)
    assert r.pg - r.q == 6 - n - delta1 - delta2
    if config.remark_regime:
        assert r.minus_two_curves == 2 * n + delta1


#%% irregularity
def test_q_possible():
    assert q_possible(DuValConfig.type_dn(1, 5))
    assert q_possible(DuValConfig.type_dn(2, 4))
    assert not q_possible(DuValConfig.type_dn(1, 5, 0, True))
    assert not q_possible(DuValConfig.type_dn(1, 4, 1))
    assert not q_possible(DuValConfig.type_dn(5))
    assert not q_possible(DuValConfig.type_d())


def test_irregularity_from_coordinates():
    circle = DuValConfig.type_dn(6, conic=ConicEvidence.coordinates(CIRCLE))
    assert irregularity(circle) == (1, 1)
    generic = DuValConfig.type_dn(6, conic=ConicEvidence.coordinates(GENERIC))
    assert irregularity(generic) == (0, 0)
    five_one = DuValConfig.type_dn(5, 1, conic=ConicEvidence.coordinates(CIRCLE))
    assert irregularity(five_one) == (1, 1)
    assert surface_report(five_one).ksq_minimal == 7


def test_irregularity_with_a_point_near_gamma():
    points = [(1, 2, 3)] + CIRCLE[1:]
    off = DuValConfig.type_dn(6, conic=ConicEvidence.coordinates(points))
    assert irregularity(off) == (0, 0)
    near = DuValConfig.type_dn(6, conic=ConicEvidence.coordinates(points, gamma=CIRCLE[0], near_gamma=[0]))
    assert irregularity(near) == (1, 1)


def test_irregularity_needs_six_points():
    config = DuValConfig.type_dn(5, conic=ConicEvidence.on_conic())
    assert irregularity(config) == (1, 0)


@pytest.mark.parametrize('evidence', [
    ConicEvidence.coordinates(CIRCLE[:5]),
    ConicEvidence.coordinates(CIRCLE, gamma=(1, 1, 1), near_gamma=[0, 1]),
    ConicEvidence.coordinates(CIRCLE, near_gamma=[0]),
    ConicEvidence.coordinates(CIRCLE, gamma=(1, 1, 1), near_gamma=[6]),
])
def test_bad_evidence(evidence):
    with pytest.raises(BadEvidence):
        irregularity(DuValConfig.type_dn(6, conic=evidence))


def test_bad_points():
    with pytest.raises(BadPoint):
        conic_space_dim([(0, 0, 0)])
    with pytest.raises(BadPoint):
        conic_space_dim([(1, 2)])


def test_conic_fixtures():
    assert conic_space_dim(CIRCLE) == 1
    assert conic_space_dim(GENERIC) == 0
    assert conic_space_dim(GENERIC[:5]) == 1
    assert conic_space_dim([]) == 6
    assert conic_space_dim([(Fraction(1, 2), Fraction(1, 3), 1), (3, 2, 6)]) == 5
    assert bareiss_rank([[2, 4], [1, 2]]) == 1


points = st.tuples(st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6)).filter(lambda p: any(p))


@settings(max_examples=150)
@given(st.lists(points, max_size=7))
def test_conic_dimension_matches_sympy(pts):
    assert conic_space_dim(pts) == conic_dim(pts)


@st.composite
def unimodular(draw):
    """ product of elementary integer matrices, determinant 1 """
    m = np.eye(3, dtype=np.int64)
    for _ in range(draw(st.integers(1, 6))):
        i, j = draw(st.sampled_from([(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]))
        e = np.eye(3, dtype=np.int64)
        e[i, j] = draw(st.integers(-3, 3))
        m = e @ m
    return m


@settings(max_examples=100)
@given(unimodular(), st.sampled_from([CIRCLE, GENERIC, GENERIC[:5], CIRCLE[:4]]))
def test_conic_condition_is_projectively_invariant(m, pts):
    moved = [tuple(int(x) for x in m @ np.array(p)) for p in pts]
    assert conic_space_dim(moved) == conic_space_dim(pts)


#%% classification
def test_all_configs_are_admissible():
    configs = all_dn_configs()
    assert len(configs) == len(admissible_dn())
    assert all(check_admissible(c).passed for c in configs)


@pytest.mark.parametrize('pg, q', list(CLASSIFICATION_TABLES))
def test_every_table_cell_is_realized(pg, q):
    results = enumerate_classification(pg, q, workers=2)
    check = table_check(pg, q, results)
    assert check['passed'] and check['missing'] == []
    assert all((r.pg, r.q) == (pg, q) for _, r in results)


def test_enumeration_with_ksq():
    results = enumerate_classification(1, 1, 8)
    assert [(c.n, c.delta1, c.delta2) for c, _ in results] == [(6, 0, 0)]
    results = enumerate_classification(1, 1, 7)
    assert [(c.n, c.delta1, c.delta2) for c, _ in results] == [(5, 1, 0)]
    results = enumerate_classification(0, 0, 8)
    assert [c.n for c, _ in results] == [6]


def test_enumeration_order_and_warnings():
    results = enumerate_classification(0, 0)
    keys = [(r.ksq_minimal, c.n, c.delta1, c.delta2) for c, r in results]
    assert keys == sorted(keys)
    check = table_check(0, 0, results)
    assert any('K^2 = 1' in w for w in check['warnings'])
    assert table_check(2, 0, [])['table'] is None


def test_irregular_cells_below_two_chi_are_excluded():
    results = enumerate_classification(1, 1)
    check = table_check(1, 1, results)
    assert check['passed']
    assert any('D2(d1=0, d2=4' in x and 'K^2 = 0 <= 2chi = 2' in x for x in check['excluded'])
    assert all('K^2 = 0,' not in w and 'K^2 = 2,' not in w for w in check['warnings'])
    assert len(check['excluded']) == sum(1 for _, r in results if r.ksq_minimal <= 2 * r.chi)
    assert table_check(0, 0, enumerate_classification(0, 0, 1))['excluded'] == []


#%% D0 -> D1
def test_d0_to_d1():
    after = convert_d0_to_d1(DuValConfig.type_dn(0, 6), True)
    assert (after.n, after.delta1, after.delta2, after.gamma_infinitely_near) == (1, 4, 1, False)
    before, now = surface_report(DuValConfig.type_dn(0, 6)), surface_report(after)
    assert (now.chi, now.ksq_resolution) == (before.chi, before.ksq_resolution)
    assert convert_d0_to_d1(DuValConfig.type_dn(0, 2), True).key[1:4] == (1, 0, 1)


def test_d0_to_d1_errors():
    with pytest.raises(Inadmissible):
        convert_d0_to_d1(DuValConfig.type_dn(0, 1), True)
    with pytest.raises(Inadmissible):
        convert_d0_to_d1(DuValConfig.type_dn(2, 2), True)
    with pytest.raises(NotConvertible):
        convert_d0_to_d1(DuValConfig.type_dn(0, 3), False)
