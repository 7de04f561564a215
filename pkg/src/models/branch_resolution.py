import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

from src.errors import InvalidCenter, LatticeMismatch, OddBranchClass
from src.models.picard_lattice import (DivisorClass, InfinitelyNear, SurfaceModel, SurfacePoint, blow_up,
                                       canonical_class, exceptional, intersect, make_class, pullback,
                                       self_intersection)

logger = logging.getLogger(__name__)


#%% singularity data
@dataclass(frozen=True)
class Mtuple:
    """ Args
            center : id of the blow-up center
            m      : multiplicity of the branch at the center (>= 2)
            near   : id of the center this point is infinitely near to, None for a point of W0
    """
    center: str
    m: int
    near: Optional[str] = None

    def __post_init__(self):
        if self.m < 2:
            raise InvalidCenter(f'an m-tuple point needs m >= 2, got {self.m} at {self.center!r}',
                                {'center': self.center, 'm': self.m})


@dataclass(frozen=True)
class RRpoint:
    """ Args
            p       : first point of the [r,r]-point
            p_prime : point on the exceptional curve over p where the strict transform keeps multiplicity r
            r       : the common multiplicity (>= 2)
            near    : parent of p when p itself is infinitely near
    """
    p: str
    p_prime: str
    r: int
    near: Optional[str] = None

    def __post_init__(self):
        if self.r < 2:
            raise InvalidCenter(f'an [r,r]-point needs r >= 2, got {self.r} at {self.p!r}',
                                {'center': self.p, 'r': self.r})
        if self.p == self.p_prime:
            raise InvalidCenter(f'[r,r]-point uses {self.p!r} twice', {'center': self.p})


SingularityAssignment = Union[Mtuple, RRpoint]


@dataclass(frozen=True)
class BranchModel:
    """ branch curve B0 on the unblown base W0 with its essential singularities """
    ambient: SurfaceModel
    branch_class: DivisorClass
    singularities: Tuple[SingularityAssignment, ...] = ()

    def __post_init__(self):
        if self.ambient.centers:
            raise LatticeMismatch(f'branch ambient must be an unblown base, got {self.ambient}')
        if self.branch_class.owner != self.ambient:
            raise LatticeMismatch(f'branch class lives on {self.branch_class.owner}, not on {self.ambient}')
        object.__setattr__(self, 'singularities', tuple(self.singularities))


@dataclass(frozen=True)
class ResolutionStep:
    center: str
    multiplicity: int
    half: int
    subtraction: int
    exceptional_in_branch: bool

    def to_dict(self):
        return {'center': self.center, 'multiplicity': self.multiplicity, 'half': self.half,
                'subtraction': self.subtraction, 'exceptional_in_branch': self.exceptional_in_branch}


@dataclass(frozen=True)
class ResolvedCover:
    branch: BranchModel
    model: SurfaceModel
    smooth_class: DivisorClass
    half_class: DivisorClass
    steps: Tuple[ResolutionStep, ...]

    @property
    def halves(self) -> List[int]:
        return [step.half for step in self.steps]

    @property
    def multiplicities(self) -> List[int]:
        return [step.multiplicity for step in self.steps]

    def step(self, center_id: str) -> ResolutionStep:
        for step in self.steps:
            if step.center == center_id:
                return step
        raise InvalidCenter(f'no resolution step at {center_id!r}', {'id': center_id})


#%% canonical resolution
def effective_points(singularities: Sequence[SingularityAssignment]) -> List[Tuple[str, int, Optional[str]]]:
    """
    Flatten the singularity list into (center, effective multiplicity, parent).
    The second point of an [r,r]-point picks up the exceptional curve when r is odd.
    """
    points = []
    for sing in singularities:
        if isinstance(sing, Mtuple):
            points.append((sing.center, sing.m, sing.near))
        elif isinstance(sing, RRpoint):
            points.append((sing.p, sing.r, sing.near))
            points.append((sing.p_prime, sing.r + sing.r % 2, sing.p))
        else:
            raise InvalidCenter(f'unknown singularity {sing!r}')
    ids = [p[0] for p in points]
    if len(set(ids)) != len(ids):
        dup = sorted({i for i in ids if ids.count(i) > 1})
        raise InvalidCenter(f'center ids used twice: {dup}', {'ids': dup})
    for cid, _, parent in points:
        if parent is not None and parent not in ids:
            raise InvalidCenter(f'{cid!r} is infinitely near to unknown center {parent!r}', {'id': cid, 'parent': parent})
    return points


def processing_order(points: Sequence[Tuple[str, int, Optional[str]]]) -> List[int]:
    """ decreasing multiplicity, ties by input order; a point never precedes its parent """
    done, order = set(), []
    pending = list(range(len(points)))
    while pending:
        ready = [i for i in pending if points[i][2] is None or points[i][2] in done]
        if not ready:
            raise InvalidCenter('infinitely-near relation has a cycle', {'ids': [points[i][0] for i in pending]})
        best = min(ready, key=lambda i: (-points[i][1], i))
        order.append(best)
        done.add(points[best][0])
        pending.remove(best)
    return order


def resolve(branch: BranchModel) -> ResolvedCover:
    points = effective_points(branch.singularities)
    model  = branch.ambient
    steps  = []
    for i in processing_order(points):
        cid, m, parent = points[i]
        where = SurfacePoint(cid) if parent is None else InfinitelyNear(parent, cid)
        model, _ = blow_up(model, where)
        half = m // 2
        steps.append(ResolutionStep(cid, m, half, 2 * half, m % 2 == 1))
        logger.debug('blow up %s (m=%d): subtract %d E*', cid, m, 2 * half)

    smooth = pullback(branch.branch_class, model)
    if steps:
        smooth = smooth - make_class(model, [0] * model.kind.base_rank, {s.center: s.subtraction for s in steps})
    if not smooth.is_divisible_by(2):
        odd = [c for c in smooth.to_list() if c % 2]
        raise OddBranchClass(f'smooth branch class {smooth} is not divisible by 2',
                             {'class': smooth.to_list(), 'odd_coefficients': odd})
    return ResolvedCover(branch, model, smooth, smooth.halved(), tuple(steps))


def halve(cls: DivisorClass) -> DivisorClass:
    if not cls.is_divisible_by(2):
        raise OddBranchClass(f'class {cls} has an odd coefficient', {'class': cls.to_list()})
    return cls.halved()


def half_class(cover: Union[ResolvedCover, DivisorClass]) -> DivisorClass:
    if isinstance(cover, DivisorClass):
        return halve(cover)
    return halve(cover.smooth_class)


def base_half_class(branch: BranchModel) -> DivisorClass:
    """ Delta_0 with B0 = 2 Delta_0 on the unblown base """
    return halve(branch.branch_class)


def minus_two_components(cover: ResolvedCover, line_classes: Sequence[DivisorClass]) -> List[DivisorClass]:
    """
    Keep the candidates that are (-2)-curves lying in the smooth branch:
    C^2 = -2 and C.B_s = -2 (a component of a smooth curve meets the rest trivially).
    """
    found = []
    for candidate in line_classes:
        if candidate.owner != cover.model:
            raise LatticeMismatch(f'candidate {candidate} does not live on {cover.model}')
        if self_intersection(candidate) == -2 and intersect(candidate, cover.smooth_class) == -2:
            found.append(candidate)
    return found


def adjoint_class(cover: ResolvedCover) -> DivisorClass:
    """ K_{W_s} + Delta_s """
    return canonical_class(cover.model) + cover.half_class


def pencil_class(cover: ResolvedCover, center_id: str) -> DivisorClass:
    """
    Strict transform of a general line (plane) or fibre (Hirzebruch) through a
    center; an infinitely near center drags its whole parent chain along.
    """
    model = cover.model
    chain, cid = [], center_id
    while cid is not None:
        chain.append(cid)
        cid = model.center(cid).parent
    base = [1] if model.kind.is_plane else [0, 1]
    return make_class(model, base, {c: -1 for c in chain})


def exceptional_strict(cover: ResolvedCover, center_id: str) -> DivisorClass:
    """ strict transform E_c* - sum of E* over the centers blown up on it """
    model = cover.model
    cls = exceptional(model, center_id)
    for child in model.children(center_id):
        cls = cls - exceptional(model, child)
    return cls
