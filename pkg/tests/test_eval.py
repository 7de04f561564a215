from fractions import Fraction

import pytest

from src.eval import (CATALOG, CIRCLE_POINTS, GENERIC_POINTS, TABLE_FEW_LINES, TABLE_MANY_LINES, CheckRecord,
                      h0_identity, summarize, verify_paper)
from src.models.duval_planes import all_dn_configs
from tests.oracle import conic_dim, xiao_conic_bound, xiao_dot


@pytest.fixture(scope='module')
def catalog():
    return verify_paper(workers=4)


def test_every_check_passes(catalog):
    records, _ = catalog
    failed = [(r.id, r.computed, r.expected) for r in records if r.status == 'fail']
    assert failed == []
    assert summarize(records)['passed'] == len(records)


def test_ids_are_unique_and_tagged(catalog):
    records, _ = catalog
    ids = [r.id for r in records]
    assert len(ids) == len(set(ids))
    assert {r.tag for r in records} == {'PAPER', 'TRIVIAL', 'DERIVED'}
    assert all(r.citation for r in records)


def test_expected_groups_are_present(catalog):
    ids = {r.id for r in catalog[0]}
    for name in ('smooth-octic', 'smooth-dectic', 'invariants-chi(2,0,3)', 'minimal-ksq(1,4,1)-near', 'minimal-minus-two-curves(6,0,0)',
                 'minimal-table-many-lines', 'minimal-table-few-lines', 'h0-zero(6)', 'siii-certificate', 'siv-certificate',
                 'siv-conic-bound', 'type-i-plane', 'type-ii(6,F3)', 'd0-to-d1', 'quadric-cone', 'type-b',
                 'irregular-d6', 'classification(1,1)', 'conic-circle', 'cremona-involution', 'pullback-isometry'):
        assert name in ids


def test_extra_table_cells_are_warnings(catalog):
    _, warnings = catalog
    assert warnings == sorted(warnings)
    assert any('n <= 1 configurations also give' in w for w in warnings)
    assert any('outside the table' in w for w in warnings)


def test_catalog_is_deterministic(catalog):
    again, warnings = verify_paper(workers=1, seed=50)
    assert [r.to_dict() for r in again] == [r.to_dict() for r in catalog[0]]
    assert warnings == catalog[1]


def test_only_and_fail_fast():
    records, _ = verify_paper(only='siii-', fail_fast=True)
    assert [r.id for r in records] == ['siii-rational-pencil', 'siii-certificate', 'siii-conic-bound']


def test_record_status_and_dict():
    record = CheckRecord('x', 'citation', Fraction(1, 2), Fraction(1, 2), 'DERIVED')
    assert record.status == 'pass'
    assert record.to_dict()['computed'] == '1/2'
    assert CheckRecord('y', 'c', [Fraction(4, 2)], [3], 'TRIVIAL').to_dict()['computed'] == [2]
    assert CheckRecord('z', 'c', 1, 2, 'PAPER').status == 'fail'
    with pytest.raises(ValueError):
        CheckRecord('w', 'c', 1, 1, 'GUESS')


def test_summary():
    records = [CheckRecord('a', 'c', 1, 1, 'PAPER'), CheckRecord('b', 'c', 1, 2, 'PAPER')]
    assert summarize(records) == {'checks': 2, 'passed': 1, 'failed': ['b']}


def test_tables_and_fixtures_agree_with_oracle():
    assert sum(len(v) for v in TABLE_MANY_LINES.values()) == 1 + 3 + 5 + 7 + 9
    assert TABLE_FEW_LINES[6] == [8] and TABLE_FEW_LINES[0] == [2, 3]
    assert conic_dim(CIRCLE_POINTS) == 1
    assert conic_dim(GENERIC_POINTS) == 0
    assert len(CATALOG) == len({name for name, _ in CATALOG})


def test_xiao_expectations_agree_with_oracle(catalog):
    expected = {r.id: r.expected for r in catalog[0]}
    for case in ('SIII', 'SIV'):
        name = case.lower()
        assert expected[f'{name}-certificate'] == xiao_dot(case)
        assert expected[f'{name}-conic-bound'] == xiao_conic_bound(case)


def test_h0_records_follow_the_implementation(monkeypatch):
    monkeypatch.setattr('src.eval.h0_two_k_plus_delta', lambda cover, chi_base: 7)
    records = h0_identity({})
    assert records and all(r.status == 'fail' for r in records)


def test_group_prefixes_filter_whole_groups(catalog):
    records, _ = catalog
    configs = all_dn_configs()
    sweep = [r for r in records if r.id.startswith('invariants-')]
    assert len(sweep) == 3 * len(configs)
    minimal = {r.id for r in records if r.id.startswith('minimal-')}
    assert {'minimal-table-many-lines', 'minimal-table-few-lines'} <= minimal
    assert len([i for i in minimal if i.startswith('minimal-ksq(')]) == len(configs)
