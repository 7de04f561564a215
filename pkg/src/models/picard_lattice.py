from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from src.errors import InvalidCenter, InvalidParameter, LatticeMismatch, LatticeOverflow

# every coefficient stays below this bound, every pairing below INT64_SAFE
COEFF_LIMIT = 2 ** 31
INT64_SAFE  = 2 ** 62


#%% surface kinds and blow-up forest
@dataclass(frozen=True)
class SurfaceKind:
    """ Args
            name : 'plane' for P^2, 'hirzebruch' for F_e
            e    : C0^2 = -e, only for the Hirzebruch case
    """
    name: str
    e: Optional[int] = None

    def __post_init__(self):
        switcher = {'plane': 1, 'hirzebruch': 2}
        if self.name not in switcher:
            raise InvalidParameter(f'unknown surface kind {self.name!r}', {'kind': self.name})
        if self.name == 'hirzebruch':
            if self.e is None or int(self.e) != self.e or self.e < 0:
                raise InvalidParameter(f'Hirzebruch surface needs an integer e >= 0, got {self.e}', {'e': self.e})
            if self.e >= 2 ** 16:
                raise LatticeOverflow(f'Hirzebruch index {self.e} too large', {'e': self.e})
        elif self.e is not None:
            raise InvalidParameter('the projective plane takes no parameter e', {'e': self.e})

    @classmethod
    def plane(cls) -> 'SurfaceKind':
        return cls('plane')

    @classmethod
    def hirzebruch(cls, e: int) -> 'SurfaceKind':
        return cls('hirzebruch', e)

    @property
    def is_plane(self) -> bool:
        return self.name == 'plane'

    @property
    def base_rank(self) -> int:
        return 1 if self.is_plane else 2

    @property
    def chi(self) -> int:
        # both bases are rational
        return 1

    def __str__(self):
        return 'P2' if self.is_plane else f'F{self.e}'


@dataclass(frozen=True)
class SurfacePoint:
    """ a point of the current surface, known only by its id """
    id: str


@dataclass(frozen=True)
class InfinitelyNear:
    """ a point on the exceptional curve of the center `parent` """
    parent: str
    id: Optional[str] = None


@dataclass(frozen=True)
class BlowUpCenter:
    id: str
    parent: Optional[str] = None

    @property
    def is_infinitely_near(self) -> bool:
        return self.parent is not None


@dataclass(frozen=True)
class SurfaceModel:
    """
    A rational base surface plus an ordered forest of blow-up centers.

    The lattice basis is (L) or (C0, Gamma) followed by the total transforms
    E_i* of the centers, in the order they were blown up.
    """
    kind: SurfaceKind
    centers: Tuple[BlowUpCenter, ...] = ()

    def __post_init__(self):
        seen = set()
        for center in self.centers:
            if center.id in seen:
                raise InvalidCenter(f'center id {center.id!r} used twice', {'id': center.id})
            if center.parent is not None and center.parent not in seen:
                raise InvalidCenter(f'center {center.id!r} is infinitely near to unknown center {center.parent!r}',
                                    {'id': center.id, 'parent': center.parent})
            seen.add(center.id)

    @property
    def rank(self) -> int:
        return self.kind.base_rank + len(self.centers)

    @property
    def center_ids(self) -> Tuple[str, ...]:
        return tuple(c.id for c in self.centers)

    def index(self, center_id: str) -> int:
        """ position of E_{center_id}* in the coefficient vector """
        for i, center in enumerate(self.centers):
            if center.id == center_id:
                return self.kind.base_rank + i
        raise InvalidCenter(f'no center {center_id!r} on {self}', {'id': center_id})

    def center(self, center_id: str) -> BlowUpCenter:
        return self.centers[self.index(center_id) - self.kind.base_rank]

    def children(self, center_id: str) -> Tuple[str, ...]:
        return tuple(c.id for c in self.centers if c.parent == center_id)

    def extends(self, other: 'SurfaceModel') -> bool:
        return self.kind == other.kind and self.centers[:len(other.centers)] == other.centers

    @cached_property
    def gram(self) -> np.ndarray:
        g = np.zeros((self.rank, self.rank), dtype=np.int64)
        if self.kind.is_plane:
            g[0, 0] = 1
        else:
            g[0, 0] = -self.kind.e
            g[0, 1] = g[1, 0] = 1
        for i in range(self.kind.base_rank, self.rank):
            g[i, i] = -1
        g.setflags(write=False)
        return g

    def __str__(self):
        if not self.centers:
            return str(self.kind)
        return f'{self.kind}[{",".join(self.center_ids)}]'


#%% divisor classes
def _frozen_vector(values) -> np.ndarray:
    values = [int(v) for v in values]
    if any(abs(v) >= COEFF_LIMIT for v in values):
        raise LatticeOverflow(f'coefficient out of range in {values}', {'limit': COEFF_LIMIT})
    vec = np.array(values, dtype=np.int64)
    vec.setflags(write=False)
    return vec


@dataclass(frozen=True, eq=False)
class DivisorClass:
    owner: SurfaceModel
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        vec = _frozen_vector(np.asarray(self.coeffs).tolist())
        if vec.shape != (self.owner.rank,):
            raise LatticeMismatch(f'{len(vec)} coefficients for a lattice of rank {self.owner.rank}',
                                  {'length': int(len(vec)), 'rank': self.owner.rank})
        object.__setattr__(self, 'coeffs', vec)

    def _same_owner(self, other: 'DivisorClass'):
        if not isinstance(other, DivisorClass):
            return NotImplemented
        if other.owner != self.owner:
            raise LatticeMismatch(f'classes live on {self.owner} and {other.owner}',
                                  {'left': str(self.owner), 'right': str(other.owner)})
        return None

    def __add__(self, other):
        if self._same_owner(other) is NotImplemented:
            return NotImplemented
        return DivisorClass(self.owner, self.coeffs + other.coeffs)

    def __sub__(self, other):
        if self._same_owner(other) is NotImplemented:
            return NotImplemented
        return DivisorClass(self.owner, self.coeffs - other.coeffs)

    def __neg__(self):
        return DivisorClass(self.owner, -self.coeffs)

    def __mul__(self, k):
        if isinstance(k, (bool, np.bool_)) or not isinstance(k, (int, np.integer)):
            return NotImplemented
        k = int(k)
        if abs(k) * self.max_abs >= COEFF_LIMIT:
            raise LatticeOverflow(f'scaling by {k} leaves the coefficient range', {'factor': k})
        return DivisorClass(self.owner, self.coeffs * k)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, DivisorClass):
            return NotImplemented
        return self.owner == other.owner and bool(np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.owner, tuple(self.coeffs.tolist())))

    def __repr__(self):
        return f'DivisorClass({self})'

    def __str__(self):
        kind  = self.owner.kind
        base  = self.coeffs[:kind.base_rank].tolist()
        terms = [f'{base[0]}L'] if kind.is_plane else [f'{base[0]}C0', f'{base[1]}G']
        for cid, c in zip(self.owner.center_ids, self.coeffs[kind.base_rank:].tolist()):
            if c:
                terms.append(f'{c:+d}E[{cid}]')
        return ' '.join(terms)

    @property
    def max_abs(self) -> int:
        return int(np.abs(self.coeffs).max()) if len(self.coeffs) else 0

    @property
    def base(self) -> Tuple[int, ...]:
        return tuple(self.coeffs[:self.owner.kind.base_rank].tolist())

    def coefficient(self, center_id: str) -> int:
        return int(self.coeffs[self.owner.index(center_id)])

    def is_divisible_by(self, k: int) -> bool:
        return bool(np.all(self.coeffs % k == 0))

    def halved(self) -> 'DivisorClass':
        """ exact half; the caller checks parity first """
        return DivisorClass(self.owner, self.coeffs // 2)

    def to_list(self):
        return [int(c) for c in self.coeffs.tolist()]


#%% operations
def make_surface(kind: SurfaceKind) -> SurfaceModel:
    return SurfaceModel(kind, ())


def blow_up(surface: SurfaceModel, parent: Union[SurfacePoint, InfinitelyNear]) -> Tuple[SurfaceModel, str]:
    """ Args
            surface : the model to blow up
            parent  : SurfacePoint(id) for a point of the surface, InfinitelyNear(parent_id, id) for a
                      point on the exceptional curve of an earlier center
        Return
            (new model, id of the new center)
    """
    if isinstance(parent, SurfacePoint):
        new_id, near = parent.id, None
    elif isinstance(parent, InfinitelyNear):
        if parent.parent not in surface.center_ids:
            raise InvalidCenter(f'dangling parent id {parent.parent!r}', {'parent': parent.parent})
        new_id, near = parent.id, parent.parent
    else:
        raise InvalidCenter(f'cannot blow up at {parent!r}')
    if new_id is None:
        new_id = f'y{len(surface.centers)}'
    model = SurfaceModel(surface.kind, surface.centers + (BlowUpCenter(new_id, near),))
    return model, new_id


def blow_up_many(surface: SurfaceModel, centers: Iterable[Union[SurfacePoint, InfinitelyNear]]) -> SurfaceModel:
    for parent in centers:
        surface, _ = blow_up(surface, parent)
    return surface


def make_class(model: SurfaceModel, base: Sequence[int], exceptional: Optional[Dict[str, int]] = None) -> DivisorClass:
    """ base coefficients followed by {center id: coefficient of E*} """
    if len(base) != model.kind.base_rank:
        raise LatticeMismatch(f'{model.kind} needs {model.kind.base_rank} base coefficients, got {len(base)}')
    coeffs = list(base) + [0] * len(model.centers)
    for cid, c in (exceptional or {}).items():
        coeffs[model.index(cid)] += c
    return DivisorClass(model, coeffs)


def curve_class(model: SurfaceModel, base: Sequence[int], multiplicities: Optional[Dict[str, int]] = None) -> DivisorClass:
    """ strict transform class  base - sum m_i E_i*  of a curve with multiplicity m_i at the centers """
    return make_class(model, base, {cid: -m for cid, m in (multiplicities or {}).items()})


def exceptional(model: SurfaceModel, center_id: str) -> DivisorClass:
    return make_class(model, [0] * model.kind.base_rank, {center_id: 1})


def line(model: SurfaceModel) -> DivisorClass:
    if not model.kind.is_plane:
        raise LatticeMismatch(f'no line class on {model.kind}')
    return make_class(model, [1])


def section(model: SurfaceModel) -> DivisorClass:
    if model.kind.is_plane:
        raise LatticeMismatch('no negative section on the plane')
    return make_class(model, [1, 0])


def fibre(model: SurfaceModel) -> DivisorClass:
    if model.kind.is_plane:
        raise LatticeMismatch('no fibre class on the plane')
    return make_class(model, [0, 1])


def intersect(a: DivisorClass, b: DivisorClass) -> int:
    if a.owner != b.owner:
        raise LatticeMismatch(f'cannot intersect a class on {a.owner} with a class on {b.owner}',
                              {'left': str(a.owner), 'right': str(b.owner)})
    gram = a.owner.gram
    row  = int(np.abs(gram).sum(axis=1).max())
    if a.max_abs * b.max_abs * row * a.owner.rank >= INT64_SAFE:
        raise LatticeOverflow('intersection number would overflow 64-bit arithmetic')
    return int(a.coeffs @ gram @ b.coeffs)


def self_intersection(a: DivisorClass) -> int:
    return intersect(a, a)


def canonical_class(surface: SurfaceModel) -> DivisorClass:
    if surface.kind.is_plane:
        base = [-3]
    else:
        base = [-2, -(surface.kind.e + 2)]
    return make_class(surface, base, {cid: 1 for cid in surface.center_ids})


def pullback(cls: DivisorClass, model: SurfaceModel) -> DivisorClass:
    """ total transform of `cls` to a model obtained by further blow-ups """
    if not model.extends(cls.owner):
        raise LatticeMismatch(f'{model} is not a blow-up of {cls.owner}')
    return DivisorClass(model, cls.to_list() + [0] * (model.rank - cls.owner.rank))


def contract_last(cls: DivisorClass) -> DivisorClass:
    """ pushforward along the contraction of the last exceptional curve """
    model = cls.owner
    if not model.centers:
        raise LatticeMismatch(f'nothing to contract on {model}')
    smaller = SurfaceModel(model.kind, model.centers[:-1])
    return DivisorClass(smaller, cls.to_list()[:-1])


#%% lattice maps
@dataclass(frozen=True, eq=False)
class LatticeMap:
    """
    Integer matrix sending coefficient vectors on `source` to coefficient
    vectors on `target`; column j is the image of the j-th basis class.
    """
    source: SurfaceModel
    target: SurfaceModel
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=np.int64)
        if mat.shape != (self.target.rank, self.source.rank):
            raise LatticeMismatch(f'map matrix has shape {mat.shape}, expected {(self.target.rank, self.source.rank)}')
        mat.setflags(write=False)
        object.__setattr__(self, 'matrix', mat)

    @classmethod
    def from_images(cls, source: SurfaceModel, target: SurfaceModel, images: Sequence[DivisorClass]) -> 'LatticeMap':
        for image in images:
            if image.owner != target:
                raise LatticeMismatch(f'image class lives on {image.owner}, not on {target}')
        return cls(source, target, np.stack([image.coeffs for image in images], axis=1))

    def apply(self, cls: DivisorClass) -> DivisorClass:
        if cls.owner != self.source:
            raise LatticeMismatch(f'map starts on {self.source}, class lives on {cls.owner}')
        if cls.max_abs * max(int(np.abs(self.matrix).max()), 1) * self.source.rank >= COEFF_LIMIT:
            raise LatticeOverflow('image class leaves the coefficient range')
        return DivisorClass(self.target, self.matrix @ cls.coeffs)

    def compose(self, first: 'LatticeMap') -> 'LatticeMap':
        """ self after first """
        if first.target != self.source:
            raise LatticeMismatch(f'cannot compose a map from {self.source} after a map into {first.target}')
        return LatticeMap(first.source, self.target, self.matrix @ first.matrix)

    def is_isometry(self) -> bool:
        if self.source.rank != self.target.rank:
            return False
        pulled = self.matrix.T @ self.target.gram @ self.matrix
        return bool(np.array_equal(pulled, self.source.gram))


if __name__ == '__main__':
    F1   = make_surface(SurfaceKind.hirzebruch(1))
    left = make_class(F1, [4, 5])
    print(left, '.', make_class(F1, [12, 20]), '=', intersect(left, make_class(F1, [12, 20])))
    P2, _ = blow_up(make_surface(SurfaceKind.plane()), SurfacePoint('p'))
    print('K^2 on', P2, '=', self_intersection(canonical_class(P2)))
