import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Dict, List, Optional, Sequence, Tuple

from src.errors import BadEvidence, BadPoint, Inadmissible, InconsistentBranch, InvalidParameter, NotConvertible
from src.models.branch_resolution import (BranchModel, Mtuple, RRpoint, ResolvedCover, exceptional_strict,
                                          minus_two_components, pencil_class, resolve)
from src.models.cover_invariants import (chi_of_cover, cover_invariants, fixed_point_counts,
                                         ksq_of_minimal_from_contractions, pencil_genus)
from src.models.picard_lattice import (SurfaceKind, curve_class, intersect, make_class, make_surface, section,
                                       self_intersection)
from src.models.ruled_models import PlaneBranch, PlanePoint, cremona_quadratic

logger = logging.getLogger(__name__)

Point = Tuple[Fraction, Fraction, Fraction]

#%% configurations
CONIC_KINDS = ('generic', 'on_conic', 'coordinates')


@dataclass(frozen=True)
class ConicEvidence:
    """ Args
            kind       : 'generic' (asserted not on a conic), 'on_conic' (asserted) or 'coordinates'
            points     : homogeneous coordinates of p_1..p_n, q_1..q_d1, r_1..r_d2 in that order
            gamma      : coordinates of gamma, needed when a point of the list is infinitely near to it
            near_gamma : indices into `points` of the points infinitely near to gamma
    """
    kind: str = 'generic'
    points: Tuple[Point, ...] = ()
    gamma: Optional[Point] = None
    near_gamma: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in CONIC_KINDS:
            raise InvalidParameter(f'unknown conic evidence {self.kind!r}', {'kind': self.kind})
        object.__setattr__(self, 'points', tuple(tuple(Fraction(x) for x in p) for p in self.points))
        if self.gamma is not None:
            object.__setattr__(self, 'gamma', tuple(Fraction(x) for x in self.gamma))
        object.__setattr__(self, 'near_gamma', tuple(int(i) for i in self.near_gamma))

    @classmethod
    def generic(cls) -> 'ConicEvidence':
        return cls('generic')

    @classmethod
    def on_conic(cls) -> 'ConicEvidence':
        return cls('on_conic')

    @classmethod
    def coordinates(cls, points, gamma=None, near_gamma=()) -> 'ConicEvidence':
        return cls('coordinates', tuple(points), gamma, tuple(near_gamma))


@dataclass(frozen=True)
class DuValConfig:
    """ Args
            variant               : 'B' (F2), 'D' (smooth octic) or 'Dn'
            n, delta1, delta2     : lines through gamma, [3,3]-points, 4-tuple points
            gamma_infinitely_near : n = 1 only, gamma lies on the exceptional curve over p_1'
            conic                 : evidence about the points of P lying on a conic
    """
    variant: str
    n: int = 0
    delta1: int = 0
    delta2: int = 0
    gamma_infinitely_near: bool = False
    conic: ConicEvidence = field(default_factory=ConicEvidence.generic)

    def __post_init__(self):
        if self.variant not in ('B', 'D', 'Dn'):
            raise InvalidParameter(f'unknown Du Val type {self.variant!r}', {'variant': self.variant})

    @classmethod
    def type_b(cls) -> 'DuValConfig':
        return cls('B')

    @classmethod
    def type_d(cls) -> 'DuValConfig':
        return cls('D')

    @classmethod
    def type_dn(cls, n, delta1=0, delta2=0, gamma_infinitely_near=False, conic=None) -> 'DuValConfig':
        return cls('Dn', n, delta1, delta2, gamma_infinitely_near, conic or ConicEvidence.generic())

    @property
    def points_count(self) -> int:
        return self.n + self.delta1 + self.delta2

    @property
    def remark_regime(self) -> bool:
        """ the n >= 2 formulas: n >= 2, or n = 1 with gamma not infinitely near the [5,5]-point """
        return self.variant == 'Dn' and (self.n >= 2 or (self.n == 1 and not self.gamma_infinitely_near))

    @property
    def key(self):
        return (self.variant, self.n, self.delta1, self.delta2, self.gamma_infinitely_near, self.conic.kind)

    def __str__(self):
        if self.variant != 'Dn':
            return f'type {self.variant}'
        flag = ', gamma near p1\'' if self.gamma_infinitely_near else ''
        return f'D{self.n}(d1={self.delta1}, d2={self.delta2}{flag}, {self.conic.kind})'


@dataclass(frozen=True)
class AdmissibilityReport:
    passed: bool
    reasons: Tuple[str, ...] = ()
    warnings: Tuple[str, ...] = ()

    def to_dict(self):
        return {'passed': self.passed, 'reasons': list(self.reasons), 'warnings': list(self.warnings)}


@dataclass(frozen=True)
class PencilReport:
    genus: int = 3
    hyperelliptic: bool = True
    base_points: int = 0
    double_fibres: int = 0
    # numbers of the pulled back pencil on the resolution
    h_square: int = 0
    h_dot_k: int = 4
    h_dot_r: int = 8

    def to_dict(self):
        return dict(self.__dict__)


@dataclass(frozen=True)
class SurfaceReport:
    pg: int
    q: int
    ksq_minimal: int
    ksq_resolution: int
    chi: int
    k_isolated: int
    kr: int
    h0_2k_delta: int
    minus_two_curves: int
    pencil: Optional[PencilReport]
    torsion_rank_lower: int
    bicanonical_degree: int
    ample_canonical: Optional[bool] = None
    bicanonical_image_degree: Optional[int] = None

    def to_dict(self):
        out = {
            'pg': self.pg, 'q': self.q, 'chi': self.chi,
            'ksq': self.ksq_minimal, 'ksq_resolution': self.ksq_resolution,
            'k_isolated': self.k_isolated, 'kr': self.kr, 'h0_2k_delta': self.h0_2k_delta,
            'minus_two_curves': self.minus_two_curves,
            'pencil': self.pencil.to_dict() if self.pencil is not None else None,
            'torsion_rank_lower': self.torsion_rank_lower,
            'bicanonical_degree': self.bicanonical_degree,
        }
        if self.ample_canonical is not None:
            out['ample_canonical'] = self.ample_canonical
        if self.bicanonical_image_degree is not None:
            out['bicanonical_image_degree'] = self.bicanonical_image_degree
        return out


#%% branch curves
def point_labels(config: DuValConfig) -> Dict[str, List[str]]:
    return {
        'p': [f'p{i}' for i in range(1, config.n + 1)],
        'q': [f'q{j}' for j in range(1, config.delta1 + 1)],
        'r': [f'r{j}' for j in range(1, config.delta2 + 1)],
    }


def _branch_of(config: DuValConfig) -> BranchModel:
    if config.variant == 'B':
        f2 = make_surface(SurfaceKind.hirzebruch(2))
        # C0 + G' with G' in |7C0 + 14 Gamma|; extra 4-tuple points only feed the guard battery
        sings = tuple(Mtuple(f'r{j}', 4) for j in range(1, config.delta2 + 1))
        return BranchModel(f2, make_class(f2, [1, 0]) + make_class(f2, [7, 14]), sings)
    plane = make_surface(SurfaceKind.plane())
    if config.variant == 'D':
        return BranchModel(plane, make_class(plane, [8]), ())
    n      = config.n
    labels = point_labels(config)
    gamma  = Mtuple('gamma', 2 * n + 2, "p1'" if config.gamma_infinitely_near else None)
    sings  = [] if config.gamma_infinitely_near else [gamma]
    sings += [RRpoint(p, f"{p}'", 5) for p in labels['p']]
    if config.gamma_infinitely_near:
        sings.append(gamma)
    sings += [RRpoint(q, f"{q}'", 3) for q in labels['q']]
    sings += [Mtuple(r, 4) for r in labels['r']]
    return BranchModel(plane, make_class(plane, [10 + 2 * n]), tuple(sings))


def standard_case_witnesses(cover: ResolvedCover) -> List[str]:
    """
    Pencils of genus 2 on the resolution: lines (fibres) through one center and,
    on F2, curves of |C0 + 2 Gamma| through two 4-tuple points.
    """
    model = cover.model
    candidates = []
    for c in model.centers:
        if c.parent is None:
            candidates.append((f'pencil through {c.id}', pencil_class(cover, c.id)))
    if not model.kind.is_plane:
        fours = [s.center for s in cover.steps if s.multiplicity == 4 and model.center(s.center).parent is None]
        for a, b in itertools.combinations(fours, 2):
            candidates.append((f'|C0 + 2 Gamma| through {a}, {b}', curve_class(model, [1, 2], {a: 1, b: 1})))
    witnesses = []
    for name, cls in candidates:
        if self_intersection(cls) != 0 or intersect(cls, cover.smooth_class) % 2:
            continue
        if pencil_genus(cover, cls) == 2:
            witnesses.append(name)
    return witnesses


def check_admissible(config: DuValConfig) -> AdmissibilityReport:
    reasons, warnings = [], []
    n, d1, d2 = config.n, config.delta1, config.delta2
    if config.variant in ('B', 'D'):
        if n or d1 or (config.variant == 'D' and d2):
            reasons.append(f'type {config.variant} takes no n or [3,3]-points')
        if config.variant == 'B' and d2 == 1:
            reasons.append('a 4-tuple point on the F2 branch projects to a degree 10 plane branch (type D0)')
    else:
        if not 0 <= n <= 6:
            reasons.append(f'n = {n} outside 0..6')
        if d1 < 0 or d2 < 0:
            reasons.append('delta1 and delta2 must be non-negative')
        if n + d1 + d2 > 6:
            reasons.append(f'n + delta1 + delta2 = {n + d1 + d2} > 6')
        if n <= 1 and d2 > n:
            reasons.append(f'delta2 <= n fails for n = {n}, delta2 = {d2}')
        if config.gamma_infinitely_near and n != 1:
            reasons.append('gamma can only be infinitely near p1\' when n = 1')
    if not reasons:
        witnesses = standard_case_witnesses(resolve(_branch_of(config)))
        reasons += [f'standard case: genus 2 {w}' for w in witnesses]
    if not reasons and config.variant == 'Dn':
        ksq = minimal_ksq(config)
        if ksq <= 0:
            warnings.append(f'minimal K^2 = {ksq} <= 0')
        elif ksq == 1 and config.points_count == 6:
            warnings.append('p_g = q = 0 with K^2 = 1 is not realized by a listed configuration')
    return AdmissibilityReport(not reasons, tuple(reasons), tuple(warnings))


def _require_admissible(config: DuValConfig):
    report = check_admissible(config)
    if not report.passed:
        raise Inadmissible(f'{config} is not admissible: {"; ".join(report.reasons)}',
                           {'reasons': list(report.reasons)})


def build_branch(config: DuValConfig) -> BranchModel:
    _require_admissible(config)
    return _branch_of(config)


def minus_two_candidates(config: DuValConfig, cover: ResolvedCover):
    """ strict transforms of L_1..L_n and of the exceptional curves over first points of odd [r,r]-points """
    model = cover.model
    if config.variant == 'B':
        return [section(model)]
    if config.variant == 'D':
        return []
    labels = point_labels(config)
    lines  = [curve_class(model, [1], {'gamma': 1, p: 1, f"{p}'": 1}) for p in labels['p']]
    curves = [exceptional_strict(cover, x) for x in labels['p'] + labels['q']]
    return lines + curves


#%% invariants of the minimal model
def minimal_ksq(config: DuValConfig) -> int:
    switcher = {'B': 9, 'D': 2}
    if config.variant in switcher:
        return switcher[config.variant]
    if config.remark_regime:
        return 8 - config.delta1 - 2 * config.delta2
    return 8 - config.n - config.delta1 - 2 * config.delta2


def _pencil(config: DuValConfig, cover: ResolvedCover) -> Optional[PencilReport]:
    if config.variant == 'D':
        return None
    if config.variant == 'B':
        genus, base_points, double = pencil_genus(cover, make_class(cover.model, [0, 1])), 1, 0
    elif config.variant == 'Dn' and config.n == 0 and config.delta1 == 0:
        return None
    else:
        through = 'p1' if config.gamma_infinitely_near else 'gamma'
        genus = pencil_genus(cover, pencil_class(cover, through))
        base_points, double = (0 if config.remark_regime else 1), config.n
    if genus != 3:
        raise InconsistentBranch(f'pencil of {config} has genus {genus}', {'genus': genus})
    return PencilReport(genus=genus, base_points=base_points, double_fibres=double)


def surface_report(config: DuValConfig, non_essential_double_point: bool = False) -> SurfaceReport:
    """
    Invariants of the minimal model of the cover branched along the configuration.

    ample_canonical is only decided for the smooth octic and for D0 without [3,3]-points.
    The configuration does not record the double points of the branch, so a D0 branch
    with a non-essential double point has to be flagged by the caller; K is then not ample.
    """
    cover = resolve(build_branch(config))
    chi_base = cover.model.kind.chi
    inv   = cover_invariants(cover, chi_base)
    ksq   = minimal_ksq(config)
    curves = minus_two_components(cover, minus_two_candidates(config, cover))
    if ((config.variant != 'Dn' or config.remark_regime)
            and ksq_of_minimal_from_contractions(inv.ksq_resolution, len(curves)) != ksq):
        raise InconsistentBranch(f'{config}: K^2 {ksq} differs from {inv.ksq_resolution} + {len(curves)} (-2)-curves',
                                 {'ksq': ksq, 'ksq_resolution': inv.ksq_resolution, 'curves': len(curves)})
    pg, q = irregularity(config, cover)
    k, kr = fixed_point_counts(ksq, inv.chi, chi_base, inv.h0_2k_delta)

    ample = None
    if config.variant == 'D':
        ample = True
    elif config.variant == 'Dn' and config.n == 0 and config.delta1 == 0:
        ample = not non_essential_double_point
    bideg, image = 2, None
    if (pg, q, ksq) == (1, 0, 2):
        bideg = 4
        image = 4 * ksq // bideg
    torsion = config.n - 1 if config.variant == 'Dn' and config.n >= 2 else 0
    return SurfaceReport(pg=pg, q=q, ksq_minimal=ksq, ksq_resolution=inv.ksq_resolution, chi=inv.chi,
                         k_isolated=k, kr=kr, h0_2k_delta=inv.h0_2k_delta, minus_two_curves=len(curves),
                         pencil=_pencil(config, cover), torsion_rank_lower=torsion, bicanonical_degree=bideg,
                         ample_canonical=ample, bicanonical_image_degree=image)


#%% irregularity and the conic oracle
def _monomial_row(point: Sequence[Fraction]) -> List[int]:
    coords = [Fraction(x) for x in point]
    if len(coords) != 3:
        raise BadPoint(f'plane points have three coordinates, got {len(coords)}', {'point': [str(x) for x in coords]})
    if all(x == 0 for x in coords):
        raise BadPoint('(0, 0, 0) is not a point of the plane', {'point': [0, 0, 0]})
    scale = lcm(*(x.denominator for x in coords))
    x, y, z = (int(c * scale) for c in coords)
    return [x * x, y * y, z * z, x * y, x * z, y * z]


def bareiss_rank(rows: Sequence[Sequence[int]]) -> int:
    """ rank of an integer matrix by fraction-free elimination """
    m = [list(r) for r in rows]
    if not m:
        return 0
    n_rows, n_cols = len(m), len(m[0])
    prev, rank = 1, 0
    for col in range(n_cols):
        pivot = next((r for r in range(rank, n_rows) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        for r in range(rank + 1, n_rows):
            for c in range(col + 1, n_cols):
                m[r][c] = (m[rank][col] * m[r][c] - m[r][col] * m[rank][c]) // prev
            m[r][col] = 0
        prev = m[rank][col]
        rank += 1
        if rank == n_rows:
            break
    return rank


def conic_space_dim(points: Sequence[Sequence]) -> int:
    """ dimension of the space of conics through the points: 6 - rank of the monomial matrix """
    return 6 - bareiss_rank([_monomial_row(p) for p in points])


def _conic_holds(config: DuValConfig) -> bool:
    evidence = config.conic
    if evidence.kind == 'generic':
        return False
    if evidence.kind == 'on_conic':
        return True
    points = list(evidence.points)
    if len(evidence.near_gamma) > 1:
        raise BadEvidence('at most one point of P may be infinitely near to gamma',
                          {'near_gamma': list(evidence.near_gamma)})
    if evidence.near_gamma:
        j = evidence.near_gamma[0]
        if evidence.gamma is None or not 0 <= j < len(points):
            raise BadEvidence('a point infinitely near to gamma needs gamma coordinates and a valid index',
                              {'near_gamma': j})
        points = [evidence.gamma] + points[:j] + points[j + 1:]
    return conic_space_dim(points) >= 1


def q_possible(config: DuValConfig) -> bool:
    """ configurations where p_g = q = 1 can happen at all """
    if config.variant != 'Dn' or config.points_count != 6:
        return False
    if config.n >= 2:
        return True
    return config.n == 1 and not config.gamma_infinitely_near and (config.delta1, config.delta2) == (5, 0)


def irregularity(config: DuValConfig, cover: Optional[ResolvedCover] = None) -> Tuple[int, int]:
    if cover is None:
        cover = resolve(build_branch(config))
    chi = chi_of_cover(cover, cover.model.kind.chi)
    evidence = config.conic
    if evidence.kind == 'coordinates' and len(evidence.points) != config.points_count:
        raise BadEvidence(f'{len(evidence.points)} coordinate points given, {config} has {config.points_count}',
                          {'given': len(evidence.points), 'expected': config.points_count})
    if q_possible(config) and _conic_holds(config):
        return 1, 1
    return chi - 1, 0


#%% classification
CLASSIFICATION_TABLES = {
    (0, 0): {2: [0, 1, 2, 3], 3: [1, 2, 3], 4: [2, 3, 4], 5: [3, 4], 6: [4, 5], 7: [5], 8: [6]},
    (1, 0): {2: [2], 3: [0, 1, 2], 4: [1, 2, 3], 5: [2, 3], 6: [3, 4], 7: [4], 8: [5]},
    (1, 1): {7: [5], 8: [6]},
}


def all_dn_configs(conic: Optional[ConicEvidence] = None) -> List[DuValConfig]:
    conic = conic or ConicEvidence.generic()
    configs = []
    for n in range(7):
        for d1 in range(7 - n):
            for d2 in range(7 - n - d1):
                for flag in ((False, True) if n == 1 else (False,)):
                    configs.append(DuValConfig.type_dn(n, d1, d2, flag, conic))
    return [c for c in configs if check_admissible(c).passed]


def enumerate_classification(pg: int, q: int, ksq: Optional[int] = None,
                             workers: int = 1) -> List[Tuple[DuValConfig, SurfaceReport]]:
    evidence = ConicEvidence.on_conic() if (pg, q) == (1, 1) else ConicEvidence.generic()
    configs  = [c for c in all_dn_configs(evidence) if 6 - c.points_count == pg - q]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        reports = list(pool.map(surface_report, configs))
    found = [(c, r) for c, r in zip(configs, reports) if (r.pg, r.q) == (pg, q) and (ksq is None or r.ksq_minimal == ksq)]
    found.sort(key=lambda cr: (cr[1].ksq_minimal,) + cr[0].key[1:5])
    return found


def table_check(pg: int, q: int, results: Sequence[Tuple[DuValConfig, SurfaceReport]],
                ksq: Optional[int] = None) -> Dict:
    table = CLASSIFICATION_TABLES.get((pg, q))
    if table is None:
        return {'table': None, 'missing': [], 'warnings': [], 'excluded': [], 'passed': True}
    realized = {(r.ksq_minimal, c.n) for c, r in results}
    cells    = {(k, n) for k, ns in table.items() for n in ns if ksq is None or k == ksq}
    missing  = sorted(cells - realized)
    warnings, excluded = [], []
    for c, r in results:
        if (r.ksq_minimal, c.n) in cells:
            continue
        # irregular minimal surfaces without a genus 2 pencil have K^2 > 2chi
        if q > 0 and r.ksq_minimal <= 2 * r.chi:
            excluded.append(f'{c} gives K^2 = {r.ksq_minimal} <= 2chi = {2 * r.chi}')
        else:
            warnings.append(f'{c} gives K^2 = {r.ksq_minimal}, outside the table')
    return {'table': {str(k): v for k, v in table.items()},
            'missing': [{'ksq': k, 'n': n} for k, n in missing],
            'warnings': warnings, 'excluded': excluded, 'passed': not missing}


#%% D0 -> D1
def convert_d0_to_d1(config: DuValConfig, tangent_lines_distinct: bool) -> DuValConfig:
    """
    A quadratic transformation centered at q1, q1' and q2 turns a D0 branch with two
    [3,3]-points of distinct tangents into a D1 branch with a 4-tuple point.
    """
    if config.variant != 'Dn' or config.n != 0:
        raise Inadmissible(f'{config} is not of type D0', {'variant': config.variant, 'n': config.n})
    if config.delta1 < 2:
        raise Inadmissible(f'D0 needs two [3,3]-points, has {config.delta1}', {'delta1': config.delta1})
    if not tangent_lines_distinct:
        raise NotConvertible('the tangent lines at the [3,3]-points coincide', {'delta1': config.delta1})
    _require_admissible(config)

    labels = point_labels(config)['q']
    points = [PlanePoint('gamma', 2)]
    for q in labels:
        points += [PlanePoint(q, 3), PlanePoint(f"{q}'", 3, near=q, rr=True)]
    centers = [PlanePoint('q1', 3), PlanePoint("q1'", 3, near='q1'), PlanePoint('q2', 3)]
    image, _ = cremona_quadratic(PlaneBranch(10, tuple(points)), centers,
                                 provenance=('tangent lines at q1 and q2 are distinct',))
    new_mults = [image.multiplicity(f'{c.id}*') for c in centers]
    if image.degree + 1 != 10 + 2 * 1 or new_mults != [4, 4, 4]:
        raise InconsistentBranch(f'quadratic transformation gave degree {image.degree} with {new_mults}',
                                 {'degree': image.degree, 'multiplicities': new_mults})
    return DuValConfig.type_dn(1, config.delta1 - 2, 1, False, config.conic)
