import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple

from src.errors import InvalidParameter, InvalidTransform
from src.models.branch_resolution import BranchModel, Mtuple, RRpoint, ResolvedCover, resolve
from src.models.picard_lattice import (LatticeMap, SurfaceKind, SurfaceModel, SurfacePoint, InfinitelyNear, blow_up,
                                       blow_up_many, canonical_class, contract_last, curve_class, exceptional, fibre,
                                       intersect, make_class, make_surface, pullback, section, self_intersection)

logger = logging.getLogger(__name__)


#%% branch data on ruled surfaces and on the plane
@dataclass(frozen=True)
class RuledPoint:
    """ Args
            id              : point label
            m               : multiplicity of the branch at the point (0 for a point off the branch)
            on_section      : the point lies on the negative section C0
            near            : label of the point it is infinitely near to
            rr              : second point of an [m,m]-point whose first point is `near`
            fibre_in_branch : the fibre through the point is a component of the branch
            fibre_label     : points sharing a label lie on the same fibre
    """
    id: str
    m: int
    on_section: bool = False
    near: Optional[str] = None
    rr: bool = False
    fibre_in_branch: bool = False
    fibre_label: Optional[str] = None

    def __post_init__(self):
        if self.m < 0:
            raise InvalidParameter(f'negative multiplicity at {self.id!r}', {'id': self.id, 'm': self.m})
        if self.rr and self.near is None:
            raise InvalidParameter(f'[r,r] second point {self.id!r} needs a first point', {'id': self.id})


@dataclass(frozen=True)
class RuledBranch:
    """ branch B = a C0 + b Gamma on F_e with its singular points """
    e: int
    a: int
    b: int
    points: Tuple[RuledPoint, ...] = ()

    @property
    def surface(self) -> SurfaceModel:
        return make_surface(SurfaceKind.hirzebruch(self.e))

    @property
    def branch_class(self):
        return make_class(self.surface, [self.a, self.b])

    @property
    def xi(self) -> int:
        return intersect(fibre(self.surface), self.branch_class)

    @property
    def section_dot(self) -> int:
        return intersect(section(self.surface), self.branch_class)

    def point(self, point_id: str) -> RuledPoint:
        for p in self.points:
            if p.id == point_id:
                return p
        raise InvalidTransform(f'no point {point_id!r} on the branch', {'id': point_id})


@dataclass(frozen=True)
class PlanePoint:
    id: str
    m: int
    near: Optional[str] = None
    rr: bool = False


@dataclass(frozen=True)
class PlaneBranch:
    degree: int
    points: Tuple[PlanePoint, ...] = ()

    def multiplicity(self, point_id: str) -> int:
        for p in self.points:
            if p.id == point_id:
                return p.m
        return 0

    def to_branch_model(self) -> BranchModel:
        """ essential points (m >= 2) as singularity assignments on the plane """
        plane  = make_surface(SurfaceKind.plane())
        firsts = {p.near for p in self.points if p.rr}
        sings  = []
        for p in self.points:
            if p.rr:
                sings.append(RRpoint(p.near, p.id, p.m, self._parent_of(p.near)))
            elif p.id in firsts:
                continue
            elif p.m >= 2:
                sings.append(Mtuple(p.id, p.m, p.near))
        return BranchModel(plane, make_class(plane, [self.degree]), tuple(sings))

    def _parent_of(self, point_id):
        for p in self.points:
            if p.id == point_id:
                return p.near
        return None


@dataclass(frozen=True, eq=False)
class TransformStep:
    """ kind is ElementaryTransform, ContractNegativeSection or CremonaQuadratic """
    kind: str
    class_map: LatticeMap
    detail: Dict = field(default_factory=dict)
    provenance: Tuple[str, ...] = ()

    def to_dict(self):
        return {'kind': self.kind, 'detail': dict(self.detail), 'provenance': list(self.provenance),
                'class_map': self.class_map.matrix.tolist(), 'isometry': self.class_map.is_isometry()}


#%% shapes of ruled double covers
@dataclass(frozen=True)
class RuledBranchShape:
    """ Args
            xi       : B.Gamma
            zeta     : B = xi C0 + (xi e / 2 + zeta) Gamma
            e        : index of the Hirzebruch surface
            rr_points: ((r, count), ...) of [r,r]-points
            extra    : ((m, count), ...) of further m-tuple points
    """
    xi: int
    zeta: int
    e: int
    rr_points: Tuple[Tuple[int, int], ...] = ()
    extra: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.e < 0:
            raise InvalidParameter(f'negative e = {self.e}', {'e': self.e})
        if self.xi < 8:
            raise InvalidParameter(f'xi = {self.xi} < 8 is a genus 2 (standard) fibration', {'xi': self.xi})
        if Fraction(self.xi * self.e, 2).denominator != 1:
            raise InvalidParameter('xi e / 2 + zeta must be an integer', {'xi': self.xi, 'e': self.e})
        object.__setattr__(self, 'rr_points', tuple(tuple(x) for x in self.rr_points))
        object.__setattr__(self, 'extra', tuple(tuple(x) for x in self.extra))

    @property
    def b(self) -> int:
        return self.xi * self.e // 2 + self.zeta

    def rr_count(self, r: int) -> int:
        return sum(c for rr, c in self.rr_points if rr == r)

    def extra_count(self, m: int) -> int:
        return sum(c for mm, c in self.extra if mm == m)

    def to_branch(self) -> RuledBranch:
        points = []
        k = 0
        for r, count in self.rr_points:
            for _ in range(count):
                k += 1
                label = f'F{k}'
                points.append(RuledPoint(f'p{k}', r, fibre_in_branch=True, fibre_label=label))
                points.append(RuledPoint(f"p{k}'", r, near=f'p{k}', rr=True, fibre_label=label))
        j = 0
        for m, count in self.extra:
            for _ in range(count):
                j += 1
                points.append(RuledPoint(f'x{j}', m))
        return RuledBranch(self.e, self.xi, self.b, tuple(points))


@dataclass(frozen=True)
class ShapeVerdict:
    kind: str
    i: Optional[int] = None
    case: Optional[str] = None
    reasons: Tuple[str, ...] = ()

    def to_dict(self):
        return {'kind': self.kind, 'i': self.i, 'case': self.case, 'reasons': list(self.reasons)}


def section_dot_branch(shape: RuledBranchShape) -> int:
    """ C0.B on F_e """
    surface = make_surface(SurfaceKind.hirzebruch(shape.e))
    return intersect(section(surface), make_class(surface, [shape.xi, shape.b]))


def strict_section_bound(shape: RuledBranchShape, fibres_in_branch: int) -> Tuple[int, bool]:
    """ every fibre in B meets C0 once and C0 is not in B, so C0.B >= number of such fibres """
    dot = section_dot_branch(shape)
    return dot, fibres_in_branch <= dot


def shape_admissible(shape: RuledBranchShape) -> ShapeVerdict:
    xi, zeta = shape.xi, shape.zeta
    if (xi, zeta) == (8, 6):
        return ShapeVerdict('S_I')
    if xi == 8 and zeta >= 10 and zeta % 2 == 0 and 1 <= (zeta - 8) // 2 <= 5:
        i = (zeta - 8) // 2
        reasons = []
        if shape.rr_count(5) != i + 1:
            reasons.append(f'needs {i + 1} [5,5]-points, has {shape.rr_count(5)}')
        dot, ok = strict_section_bound(shape, i + 1)
        if not ok:
            reasons.append(f'C0.B = {dot} < {i + 1} fibres in the branch (4e <= 7 + i fails for e = {shape.e})')
        if reasons:
            return ShapeVerdict('NotInList', i=i, reasons=tuple(reasons))
        return ShapeVerdict('S_II', i=i)
    if (xi, zeta) == (12, 14) and shape.rr_count(7) == 3:
        return ShapeVerdict('Eliminated', case='SIII', reasons=('no such double cover: see eliminate_xiao_case',))
    if (xi, zeta) == (16, 18) and shape.rr_count(9) == 3 and shape.extra_count(8) >= 1:
        return ShapeVerdict('Eliminated', case='SIV', reasons=('no such double cover: see eliminate_xiao_case',))
    return ShapeVerdict('NotInList', reasons=(f'(xi, zeta) = ({xi}, {zeta}) with {list(shape.rr_points)} is not a listed shape',))


#%% elementary transformation and contraction of C0
def _elm_map(source: SurfaceModel, target: SurfaceModel, on_section: bool) -> LatticeMap:
    # columns: images of C0, Gamma, E in the basis (C0', Gamma', E') of the target
    if on_section:
        columns = [[1, 1, -1], [0, 1, 0], [0, 1, -1]]
    else:
        columns = [[1, 0, -1], [0, 1, 0], [0, 1, -1]]
    return LatticeMap(source, target, [[col[r] for col in columns] for r in range(3)])


def elementary_transform(branch: RuledBranch, center: RuledPoint,
                         fibre_in_branch: Optional[bool] = None) -> Tuple[RuledBranch, TransformStep]:
    """
    Blow up `center` and contract the strict transform of its fibre.

    The branch is replaced by its canonical-resolution transform B_1 = B - 2[m/2] E,
    pushed down to F_{e +- 1}. The contracted fibre becomes a new point whose
    multiplicity is its intersection with the rest of the branch.
    """
    e_new = branch.e + 1 if center.on_section else branch.e - 1
    if e_new < 0:
        raise InvalidTransform(f'elementary transformation off C0 needs e >= 1, got e = {branch.e}',
                               {'e': branch.e, 'center': center.id})
    if fibre_in_branch is None:
        fibre_in_branch = center.fibre_in_branch

    source, _ = blow_up(branch.surface, SurfacePoint(center.id))
    new_id    = f'{center.id}~'
    target, _ = blow_up(make_surface(SurfaceKind.hirzebruch(e_new)), SurfacePoint(new_id))
    cmap      = _elm_map(source, target, center.on_section)

    half   = center.m // 2
    b_one  = pullback(branch.branch_class, source) - 2 * half * exceptional(source, center.id)
    strict = pullback(fibre(branch.surface), source) - exceptional(source, center.id)
    pushed = contract_last(cmap.apply(b_one))
    new_m  = intersect(strict, b_one) + (1 if fibre_in_branch else 0)

    odd   = center.m % 2 == 1
    label = f'F({new_id})'
    kept, moved = [], []
    for p in branch.points:
        if p.id == center.id:
            continue
        if p.near == center.id:
            if fibre_in_branch:
                # p lies on the contracted fibre, so it ends up infinitely near the new point
                moved.append(replace(p, near=new_id, on_section=False, fibre_label=label))
            else:
                moved.append(RuledPoint(p.id, p.m + (1 if odd else 0), fibre_in_branch=odd, fibre_label=label))
        elif center.fibre_label is not None and p.fibre_label == center.fibre_label:
            # absorbed into the contracted fibre
            continue
        else:
            kept.append(p)
    if new_m > 0:
        kept.append(RuledPoint(new_id, new_m, on_section=not center.on_section,
                               fibre_in_branch=odd, fibre_label=label))
    elif any(p.near == new_id for p in moved):
        raise InvalidTransform(f'points near {center.id!r} land on a point off the branch', {'center': center.id})
    points = kept + moved

    a_new, b_new = pushed.base
    result = RuledBranch(e_new, a_new, b_new, tuple(points))
    step = TransformStep('ElementaryTransform', cmap,
                         {'center': center.id, 'on_section': center.on_section, 'e': branch.e, 'e_new': e_new,
                          'multiplicity': center.m, 'new_point': new_id, 'new_multiplicity': new_m})
    logger.debug('elm at %s: F%d (%d, %d) -> F%d (%d, %d)', center.id, branch.e, branch.a, branch.b,
                 e_new, a_new, b_new)
    return result, step


def contract_negative_section(branch: RuledBranch, section_in_branch: bool = False,
                              point_id: str = 'gamma') -> Tuple[PlaneBranch, TransformStep]:
    """ F1 -> P2 contracting C0 to `point_id`; C0 -> E, Gamma -> L - E """
    if branch.e != 1:
        raise InvalidTransform(f'only the (-1)-section of F1 can be contracted, got e = {branch.e}', {'e': branch.e})
    source    = branch.surface
    target, _ = blow_up(make_surface(SurfaceKind.plane()), SurfacePoint(point_id))
    cmap = LatticeMap.from_images(source, target, [exceptional(target, point_id),
                                                   make_class(target, [1], {point_id: -1})])
    residual = branch.branch_class - section(source) if section_in_branch else branch.branch_class
    image    = cmap.apply(residual)
    degree   = image.base[0]
    gamma_m  = -image.coefficient(point_id)

    points = [PlanePoint(point_id, gamma_m)] if gamma_m >= 1 else []
    for p in branch.points:
        near = p.near if p.near is not None else (point_id if p.on_section else None)
        points.append(PlanePoint(p.id, p.m, near, p.rr))
    step = TransformStep('ContractNegativeSection', cmap,
                         {'point': point_id, 'section_in_branch': section_in_branch, 'gamma_multiplicity': gamma_m})
    return PlaneBranch(degree, tuple(points)), step


#%% quadratic transformation of the plane
def cremona_quadratic(branch: PlaneBranch, centers: Sequence[PlanePoint],
                      provenance: Sequence[str] = ()) -> Tuple[PlaneBranch, TransformStep]:
    """ Args
            branch     : plane branch (degree and points)
            centers    : the three base points; the second may be infinitely near the first
            provenance : geometric side conditions asserted by the caller
        Return
            transformed branch: degree 2d - m1 - m2 - m3, multiplicities d - mj - mk
    """
    centers = list(centers)
    if len(centers) < 3 or len({c.id for c in centers[:3]}) < 3:
        raise InvalidTransform('a quadratic transformation needs three distinct centers',
                               {'centers': [c.id for c in centers]})
    centers = centers[:3]
    ids = [c.id for c in centers]

    def plane_with(labels):
        where = []
        for c, label in zip(centers, labels):
            if c.near is not None and c.near in ids:
                where.append(InfinitelyNear(labels[ids.index(c.near)], label))
            else:
                where.append(SurfacePoint(label))
        return blow_up_many(make_surface(SurfaceKind.plane()), where)

    new_ids = [f'{cid}*' for cid in ids]
    source  = plane_with(ids)
    target  = plane_with(new_ids)
    images  = [make_class(target, [2], {nid: -1 for nid in new_ids})]
    for i in range(3):
        images.append(make_class(target, [1], {new_ids[j]: -1 for j in range(3) if j != i}))
    cmap = LatticeMap.from_images(source, target, images)

    mults = {c.id: branch.multiplicity(c.id) if c.m == 0 else c.m for c in centers}
    image = cmap.apply(curve_class(source, [branch.degree], mults))
    points = []
    for nid, c in zip(new_ids, centers):
        near = f'{c.near}*' if c.near in ids else None
        points.append(PlanePoint(nid, -image.coefficient(nid), near))
    points += [p for p in branch.points if p.id not in ids and p.near not in ids]
    step = TransformStep('CremonaQuadratic', cmap, {'centers': ids, 'new_centers': new_ids},
                         tuple(provenance))
    return PlaneBranch(image.base[0], tuple(points)), step


#%% elimination certificates
@dataclass(frozen=True)
class EliminationCertificate:
    case: str
    xi: int
    d_square: int
    d_dot_k: int
    d_dot_e0: int
    d_dot_branch: int
    conic_dot_branch: int
    conic_bound: int
    assumptions: Tuple[str, ...] = ()

    @property
    def holds(self) -> bool:
        return self.d_square == 0 and self.d_dot_k == -2 and self.d_dot_branch < self.xi

    def to_dict(self):
        out = dict(self.__dict__)
        out['assumptions'] = list(self.assumptions)
        out['holds'] = self.holds
        return out


XIAO_SHAPES = {
    'SIII': RuledBranchShape(12, 14, 1, rr_points=((7, 3),)),
    'SIV':  RuledBranchShape(16, 18, 1, rr_points=((9, 3),), extra=((8, 1),)),
}


def plane_model_of_shape(shape: RuledBranchShape) -> Tuple[PlaneBranch, ResolvedCover]:
    """ contract C0 of the F1 model and run the canonical resolution on the plane """
    plane_branch, _ = contract_negative_section(shape.to_branch(), point_id='p0')
    return plane_branch, resolve(plane_branch.to_branch_model())


def conic_through_centres_bound(case: str) -> Tuple[int, int]:
    """ (C0 + Gamma).B against 3r: a curve of |C0 + Gamma| cannot pass through the three first points """
    shape   = XIAO_SHAPES[case]
    surface = make_surface(SurfaceKind.hirzebruch(shape.e))
    conic   = make_class(surface, [1, 1])
    r       = shape.rr_points[0][0]
    return intersect(conic, make_class(surface, [shape.xi, shape.b])), 3 * r


def eliminate_xiao_case(case: str) -> EliminationCertificate:
    """
    D = 5L - E0 - 2 sum (E_pi + E_pi') on the plane blown up at p0 and the three
    [r,r]-pairs: a genus 0 fibration with D.B smaller than xi.
    """
    if case not in XIAO_SHAPES:
        raise InvalidParameter(f'unknown case {case!r}', {'case': case})
    shape = XIAO_SHAPES[case]
    _, cover = plane_model_of_shape(shape)
    model = cover.model
    firsts = [f'p{k}' for k in range(1, 4)]
    mults  = {'p0': 1}
    mults.update({p: 2 for p in firsts})
    mults.update({f"{p}'": 2 for p in firsts})
    d = curve_class(model, [5], mults)
    conic_dot, bound = conic_through_centres_bound(case)
    return EliminationCertificate(
        case=case,
        xi=shape.xi,
        d_square=self_intersection(d),
        d_dot_k=intersect(d, canonical_class(model)),
        d_dot_e0=intersect(d, exceptional(model, 'p0')),
        d_dot_branch=intersect(d, cover.smooth_class),
        conic_dot_branch=conic_dot,
        conic_bound=bound,
        assumptions=('p1, p2, p3 lie on no curve of |C0 + Gamma|',
                     "each p_i' is infinitely near the fibre through p_i",
                     'the branch is minimal among ruled models with B.Gamma = xi'),
    )


#%% conversions of ruled models to double planes
def convert_type_i(e: int, section_in_branch: bool = False):
    """ Return
            (PlaneBranch of degree 10, steps) for e = 1, (RuledBranch on F2 containing C0, []) for e = 2
    """
    if e not in (1, 2):
        raise InvalidTransform(f'the (8, 6) shape lives on F1 or F2, got e = {e}', {'e': e})
    branch = RuledBranch(e, 8, 4 * e + 6)
    if e == 1:
        plane, step = contract_negative_section(branch, section_in_branch)
        return plane, [step]
    if branch.section_dot >= 0:
        raise InvalidTransform('C0.B should be negative on F2')
    return branch, []


def convert_type_ii(n: int, e: int) -> Tuple[PlaneBranch, list]:
    """ S_II with n = i + 1 [5,5]-points on F_e moved to F1 by elementary transformations, then to the plane """
    i = n - 1
    shape = RuledBranchShape(8, 8 + 2 * i, e, rr_points=((5, n),))
    verdict = shape_admissible(shape)
    if verdict.kind != 'S_II':
        raise InvalidTransform(f'not an S_II shape: {", ".join(verdict.reasons)}', {'n': n, 'e': e})
    branch, steps = shape.to_branch(), []
    if e == 0:
        branch = replace(branch, points=tuple(replace(p, on_section=True) if p.id == 'p1' else p
                                              for p in branch.points))
    k = 1
    while branch.e != 1:
        branch, step = elementary_transform(branch, branch.point(f'p{k}'))
        steps.append(step)
        k += 1
    plane, step = contract_negative_section(branch)
    steps.append(step)
    return plane, steps
