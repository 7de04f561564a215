import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from src.models.branch_resolution import resolve
from src.models.cover_invariants import (chi_of_cover, chi_on_lattice, h0_closed_form, h0_two_k_plus_delta,
                                         ksq_of_resolution, ksq_on_lattice)
from src.models.duval_planes import (CLASSIFICATION_TABLES, ConicEvidence, DuValConfig, all_dn_configs,
                                     build_branch, conic_space_dim, convert_d0_to_d1, enumerate_classification,
                                     surface_report, table_check)
from src.models.picard_lattice import (InfinitelyNear, SurfaceKind, SurfacePoint, blow_up, intersect, make_class,
                                       make_surface, pullback)
from src.models.ruled_models import (PlaneBranch, PlanePoint, RuledBranch, RuledPoint, convert_type_i,
                                     convert_type_ii, cremona_quadratic, elementary_transform, eliminate_xiao_case)

logger = logging.getLogger(__name__)

TAGS = ('PAPER', 'TRIVIAL', 'DERIVED')

# (chi - 1, K^2) cells of the two minimal-model tables
TABLE_MANY_LINES = {4: [8], 3: [6, 7, 8], 2: [4, 5, 6, 7, 8], 1: [2, 3, 4, 5, 6, 7, 8], 0: list(range(9))}
TABLE_FEW_LINES  = {r: sorted({r + 2, r + 3} if r <= 5 else {r + 2}) for r in range(7)}

CIRCLE_POINTS  = [(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1), (3, 4, 5), (5, 12, 13)]
GENERIC_POINTS = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1), (1, 2, 3), (1, -1, 2)]


@dataclass(frozen=True)
class CheckRecord:
    id: str
    citation: str
    computed: Any
    expected: Any
    tag: str

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f'unknown provenance tag {self.tag!r}')

    @property
    def status(self) -> str:
        return 'pass' if self.computed == self.expected else 'fail'

    def to_dict(self):
        return {'id': self.id, 'citation': self.citation, 'computed': _plain(self.computed),
                'expected': _plain(self.expected), 'tag': self.tag, 'status': self.status}


def _plain(value):
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else str(value)
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    return value


def _label(config: DuValConfig) -> str:
    return f'({config.n},{config.delta1},{config.delta2})' + ('-near' if config.gamma_infinitely_near else '')


#%% catalog
def smooth_branches(ctx) -> List[CheckRecord]:
    out = []
    for cid, config, expected in (('smooth-octic', DuValConfig.type_d(), (3, 0, 2)),
                                  ('smooth-dectic', DuValConfig.type_dn(0), (6, 0, 8))):
        r = surface_report(config)
        out.append(CheckRecord(cid, 'smooth plane branch of degree 8 or 10: (p_g, q, K^2)',
                               (r.pg, r.q, r.ksq_minimal), expected, 'PAPER'))
    return out


def invariant_sweep(ctx) -> List[CheckRecord]:
    out = []
    for config in ctx['configs']:
        cover = resolve(build_branch(config))
        s = config.points_count
        out.append(CheckRecord(f'invariants-chi{_label(config)}', 'chi = 7 - n - delta1 - delta2',
                               chi_of_cover(cover, 1), 7 - s, 'PAPER'))
        out.append(CheckRecord(f'invariants-ksq-resolution{_label(config)}', 'K^2 of the resolution = 8 - 2n - 2delta1 - 2delta2',
                               ksq_of_resolution(cover), 8 - 2 * s, 'PAPER'))
        out.append(CheckRecord(f'invariants-lattice-agreement{_label(config)}', 'chi and K^2 re-read on the blown-up base',
                               (chi_on_lattice(cover, 1), ksq_on_lattice(cover)), (7 - s, 8 - 2 * s), 'DERIVED'))
    return out


def minimal_models(ctx) -> List[CheckRecord]:
    out = []
    many, few = set(), set()
    for config in ctx['configs']:
        r = ctx['reports'][config.key]
        d1, d2 = config.delta1, config.delta2
        if config.remark_regime:
            expected, citation = 8 - d1 - 2 * d2, 'minimal K^2 = 8 - delta1 - 2delta2 (n >= 2, or n = 1 with gamma general)'
            out.append(CheckRecord(f'minimal-minus-two-curves{_label(config)}', 'contracted (-2)-curves = 2n + delta1',
                                   r.ksq_minimal - r.ksq_resolution, 2 * config.n + d1, 'PAPER'))
        else:
            expected, citation = 8 - config.n - d1 - 2 * d2, 'minimal K^2 = 8 - n - delta1 - 2delta2'
        out.append(CheckRecord(f'minimal-ksq{_label(config)}', citation, r.ksq_minimal, expected, 'PAPER'))
        if config.n >= 2:
            out.append(CheckRecord(f'minimal-k-consistency{_label(config)}', 'isolated fixed points k = 2n + delta1 = K^2 - 2chi + 6',
                                   (r.k_isolated, r.k_isolated), (2 * config.n + d1, r.ksq_minimal - 2 * r.chi + 6),
                                   'DERIVED'))
        (many if config.n >= 2 else few).add((r.chi - 1, r.ksq_minimal))

    cells_many = sorted((r, k) for r, ks in TABLE_MANY_LINES.items() for k in ks)
    cells_few  = sorted((r, k) for r, ks in TABLE_FEW_LINES.items() for k in ks)
    out.append(CheckRecord('minimal-table-many-lines', '(chi - 1, K^2) table for n >= 2',
                           sorted(many), cells_many, 'PAPER'))
    out.append(CheckRecord('minimal-table-few-lines', '(chi - 1, K^2) table for n <= 1, every cell realized',
                           sorted(few & set(cells_few)), cells_few, 'PAPER'))
    ctx['warnings'].extend([f'n <= 1 configurations also give (chi - 1, K^2) = {cell}' for cell in sorted(few - set(cells_few))])
    return out


def h0_identity(ctx) -> List[CheckRecord]:
    out = []
    for n in range(2, 7):
        cover = resolve(build_branch(DuValConfig.type_dn(n)))
        closed = Fraction(n * n + n - 2, 2) - Fraction(4 * n * n + 4 * n, 8) + 1
        out.append(CheckRecord(f'h0-zero({n})', 'Riemann-Roch for 2K + Delta: (n^2 + n - 2)/2 - (4n^2 + 4n)/8 + 1 = 0',
                               h0_two_k_plus_delta(cover, 1), closed, 'PAPER'))
        out.append(CheckRecord(f'h0-lattice({n})', 'chi(2K + Delta) on the resolution, closed form and lattice',
                               (h0_closed_form(cover, 1), h0_two_k_plus_delta(cover, 1)), (closed, closed), 'DERIVED'))
    return out


def xiao_certificates(ctx) -> List[CheckRecord]:
    out = []
    for case, dot, bound, tag in (('SIII', 8, (20, 21), 'PAPER'), ('SIV', 12, (26, 27), 'DERIVED')):
        cert = eliminate_xiao_case(case)
        name = case.lower()
        out.append(CheckRecord(f'{name}-rational-pencil', 'the quintic pencil D has D^2 = 0 and D.K = -2',
                               (cert.d_square, cert.d_dot_k, cert.d_dot_e0), (0, -2, 1), 'PAPER'))
        out.append(CheckRecord(f'{name}-certificate', 'D.B is smaller than B.Gamma, so the fibration is not minimal',
                               cert.d_dot_branch, dot, tag))
        out.append(CheckRecord(f'{name}-conic-bound', '(C0 + Gamma).B < 3r: no curve of |C0 + Gamma| through p1, p2, p3',
                               (cert.conic_dot_branch, cert.conic_bound), bound, 'DERIVED'))
    return out


def conversions(ctx) -> List[CheckRecord]:
    out = []
    plane, _ = convert_type_i(1)
    out.append(CheckRecord('type-i-plane', 'the (8, 6) shape on F1 is a degree 10 plane branch with a double point',
                           (plane.degree, plane.multiplicity('gamma')), (10, 2), 'PAPER'))
    plane, _ = convert_type_i(1, section_in_branch=True)
    out.append(CheckRecord('type-i-plane-section', 'C0 in the branch leaves a triple point at gamma',
                           (plane.degree, plane.multiplicity('gamma')), (10, 3), 'DERIVED'))
    branch, _ = convert_type_i(2)
    out.append(CheckRecord('type-i-f2', 'on F2 the branch contains C0 and C0.B = -2',
                           branch.section_dot, -2, 'PAPER'))
    for n in range(2, 7):
        for e in range(0, (6 + n) // 4 + 1):
            plane, steps = convert_type_ii(n, e)
            out.append(CheckRecord(f'type-ii({n},F{e})', 'S_II becomes a degree 10 + 2n plane branch with a (2n+2)-tuple point',
                                   (plane.degree, plane.multiplicity('gamma')), (10 + 2 * n, 2 * n + 2), 'PAPER'))
    before = DuValConfig.type_dn(0, 6)
    after  = convert_d0_to_d1(before, True)
    out.append(CheckRecord('d0-to-d1', 'two [3,3]-points with distinct tangents give type D1 with a 4-tuple point',
                           (after.n, after.delta1, after.delta2), (1, 4, 1), 'PAPER'))
    r0, r1 = surface_report(before), surface_report(after)
    out.append(CheckRecord('d0-to-d1-invariants', 'chi and K^2 of the resolution agree before and after',
                           (r1.chi, r1.ksq_resolution), (r0.chi, r0.ksq_resolution), 'DERIVED'))
    return out


def special_surfaces(ctx) -> List[CheckRecord]:
    r = surface_report(DuValConfig.type_dn(2, 0, 3))
    b = surface_report(DuValConfig.type_b())
    d6 = surface_report(DuValConfig.type_dn(6, conic=ConicEvidence.on_conic()))
    return [
        CheckRecord('quadric-cone', 'p_g = 1, K^2 = 2: the bicanonical map has degree 4 onto a quadric cone',
                    (r.chi, r.pg, r.q, r.ksq_minimal, r.bicanonical_degree, r.bicanonical_image_degree),
                    (2, 1, 0, 2, 4, 2), 'PAPER'),
        CheckRecord('type-b', 'branch on F2 containing C0: p_g = 6, K^2 = 9',
                    (b.pg, b.ksq_minimal, b.k_isolated, b.minus_two_curves), (6, 9, 1, 1), 'PAPER'),
        CheckRecord('irregular-d6', 'six points on a conic: p_g = q = 1, K^2 = 8, 2-torsion of rank 5',
                    (d6.pg, d6.q, d6.ksq_minimal, d6.pencil.double_fibres, d6.torsion_rank_lower),
                    (1, 1, 8, 6, 5), 'PAPER'),
    ]


def classification(ctx) -> List[CheckRecord]:
    out = []
    citations = {(0, 0): 'p_g = 0: K^2 and n as in the table',
                 (1, 0): 'p_g = 1, q = 0: K^2 and n as in the table',
                 (1, 1): 'p_g = q = 1: K^2 = 7 with n = 5 or K^2 = 8 with n = 6'}
    for (pg, q), table in CLASSIFICATION_TABLES.items():
        results = enumerate_classification(pg, q)
        check   = table_check(pg, q, results)
        cells   = sorted((k, n) for k, ns in table.items() for n in ns)
        realized = sorted({(r.ksq_minimal, c.n) for c, r in results} & set(cells))
        out.append(CheckRecord(f'classification({pg},{q})', citations[(pg, q)], realized, cells, 'PAPER'))
        ctx['warnings'].extend(check['warnings'])
    return out


def conic_fixtures(ctx) -> List[CheckRecord]:
    return [
        CheckRecord('conic-circle', 'six points of x^2 + y^2 = z^2 lie on one conic', conic_space_dim(CIRCLE_POINTS), 1, 'DERIVED'),
        CheckRecord('conic-generic-six', 'six points in general position lie on no conic', conic_space_dim(GENERIC_POINTS), 0, 'DERIVED'),
        CheckRecord('conic-generic-five', 'five points in general position lie on one conic', conic_space_dim(GENERIC_POINTS[:5]), 1, 'DERIVED'),
        CheckRecord('conic-empty', 'no conditions', conic_space_dim([]), 6, 'TRIVIAL'),
    ]


def isometry_samples(ctx) -> List[CheckRecord]:
    out = []
    for e in range(0, 5):
        for on_section in ((True, False) if e else (True,)):
            branch = RuledBranch(e, 8, 4 * e + 8, (RuledPoint('p', 3, on_section=on_section),))
            _, step = elementary_transform(branch, branch.points[0])
            out.append(CheckRecord(f'elm-isometry(F{e},{"on" if on_section else "off"})',
                                   'elementary transformation preserves the intersection form',
                                   step.class_map.is_isometry(), True, 'TRIVIAL'))

    branch = PlaneBranch(10, (PlanePoint('a', 3), PlanePoint('b', 3), PlanePoint('c', 2)))
    image, first = cremona_quadratic(branch, branch.points)
    back, second = cremona_quadratic(image, image.points[:3])
    identity = np.eye(4, dtype=np.int64)
    out.append(CheckRecord('cremona-involution', 'the quadratic transformation is an involution and an isometry',
                           (first.class_map.is_isometry(), bool(np.array_equal(second.class_map.compose(first.class_map).matrix, identity)),
                            back.degree), (True, True, 10), 'TRIVIAL'))

    rng = random.Random(ctx['seed'])
    plane = make_surface(SurfaceKind.plane())
    big, _ = blow_up(plane, SurfacePoint('x'))
    big, _ = blow_up(big, InfinitelyNear('x', 'y'))
    failures = 0
    for _ in range(ctx['samples']):
        a = make_class(plane, [rng.randint(-50, 50)])
        b = make_class(plane, [rng.randint(-50, 50)])
        failures += intersect(pullback(a, big), pullback(b, big)) != intersect(a, b)
    out.append(CheckRecord('pullback-isometry', 'total transforms keep intersection numbers', failures, 0, 'TRIVIAL'))
    return out


CATALOG: List[Tuple[str, Callable]] = [
    ('smooth', smooth_branches),
    ('sweep', invariant_sweep),
    ('minimal', minimal_models),
    ('h0', h0_identity),
    ('xiao', xiao_certificates),
    ('conversions', conversions),
    ('special', special_surfaces),
    ('classification', classification),
    ('conic', conic_fixtures),
    ('isometry', isometry_samples),
]


#%% runner
def _context(seed: int, samples: int, workers: int) -> Dict:
    configs = all_dn_configs()
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        reports = dict(zip([c.key for c in configs], pool.map(surface_report, configs)))
    return {'configs': configs, 'reports': reports, 'seed': seed, 'samples': samples, 'warnings': []}


def verify_paper(workers: int = 1, only: Optional[str] = None, seed: int = 50, samples: int = 100,
                 fail_fast: bool = False) -> Tuple[List[CheckRecord], List[str]]:
    """ Return
            (check records in catalog order, warnings)
    """
    ctx = _context(seed, samples, workers)
    groups = [check for _, check in CATALOG]
    if fail_fast:
        batches = []
        for check in groups:
            batch = check(ctx)
            batches.append(batch)
            if any(r.status == 'fail' for r in batch):
                logger.warning('stopping after the first failing group %s', check.__name__)
                break
    else:
        # groups share ctx read-only apart from extending ctx['warnings']
        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            batches = list(pool.map(lambda check: check(ctx), groups))
    records = [r for batch in batches for r in batch]
    if only is not None:
        records = [r for r in records if r.id == only or r.id.startswith(only)]
    return records, sorted(set(ctx['warnings']))


def summarize(records: List[CheckRecord]) -> Dict:
    failed = [r.id for r in records if r.status == 'fail']
    return {'checks': len(records), 'passed': len(records) - len(failed), 'failed': failed}
