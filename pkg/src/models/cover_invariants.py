from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from src.errors import InconsistentBranch, NotAPencil, OddBranchIntersection
from src.models.branch_resolution import ResolvedCover, adjoint_class, base_half_class
from src.models.picard_lattice import DivisorClass, canonical_class, intersect, self_intersection


@dataclass(frozen=True)
class CoverInvariants:
    """ Args
            chi            : chi(O_{S*})
            ksq_resolution : K^2 of the canonical resolution S*
            pg_minus_q     : chi - 1
            h0_2k_delta    : h^0(2K_{W_s} + Delta_s) as an Euler characteristic
            k_isolated     : isolated fixed points of the covering involution
            kr             : K_S . R_sigma
    """
    chi: int
    ksq_resolution: int
    pg_minus_q: int
    h0_2k_delta: int
    k_isolated: int
    kr: int

    def to_dict(self):
        return dict(self.__dict__)


def _integral(value: Fraction, what: str) -> int:
    if value.denominator != 1:
        raise InconsistentBranch(f'{what} evaluates to {value}, not an integer', {'value': str(value)})
    return int(value)


#%% closed forms over the base and the resolution ledger
def chi_of_cover(cover: ResolvedCover, chi_base: int) -> int:
    """
    chi = 1/2 (K0 + D0).D0 + 2 chi_base - 1/2 sum a_i (a_i - 1),  a_i = [m_i / 2]
    """
    k0    = canonical_class(cover.branch.ambient)
    d0    = base_half_class(cover.branch)
    value = Fraction(intersect(k0 + d0, d0), 2) + 2 * chi_base - Fraction(sum(a * (a - 1) for a in cover.halves), 2)
    return _integral(value, 'chi')


def ksq_of_resolution(cover: ResolvedCover) -> int:
    k0 = canonical_class(cover.branch.ambient)
    d0 = base_half_class(cover.branch)
    return 2 * self_intersection(k0 + d0) - 2 * sum((a - 1) ** 2 for a in cover.halves)


def h0_two_k_plus_delta(cover: ResolvedCover, chi_base: int) -> int:
    """ Riemann-Roch for 2K_s + Delta_s on W_s; the vanishing of h^1, h^2 is the caller's assertion """
    k = canonical_class(cover.model)
    adjoint = adjoint_class(cover)
    value = chi_base + Fraction(intersect(k + adjoint, adjoint), 2)
    return _integral(value, 'chi(2K + Delta)')


def h0_closed_form(cover: ResolvedCover, chi_base: int) -> int:
    """ 1/2 (2K0 + D0).(K0 + D0) - 1/8 sum (s_i - 4)(s_i - 2) + chi_base, s_i = 2[m_i / 2] """
    k0 = canonical_class(cover.branch.ambient)
    d0 = base_half_class(cover.branch)
    value = (Fraction(intersect(k0 + k0 + d0, k0 + d0), 2)
             - Fraction(sum((s.subtraction - 4) * (s.subtraction - 2) for s in cover.steps), 8)
             + chi_base)
    return _integral(value, 'closed form of chi(2K + Delta)')


def chi_on_lattice(cover: ResolvedCover, chi_base: int) -> int:
    """ the same chi read off W_s: 2 chi_base + 1/2 Delta_s.(Delta_s + K_s) """
    delta = cover.half_class
    value = 2 * chi_base + Fraction(intersect(delta, delta + canonical_class(cover.model)), 2)
    return _integral(value, 'chi on W_s')


def ksq_on_lattice(cover: ResolvedCover) -> int:
    return 2 * self_intersection(adjoint_class(cover))


#%% fixed points, pencils, bicanonical map
def fixed_point_counts(ksq_min: int, chi_s: int, chi_sigma: int, h0: int) -> Tuple[int, int]:
    """ Return
            (k, K_S.R_sigma) from k = K^2 - 2chi + 6chi_sigma - 2h0 and k = K_S.R - 4chi + 8chi_sigma
    """
    k = ksq_min - 2 * chi_s + 6 * chi_sigma - 2 * h0
    return k, canonical_dot_ramification(k, chi_s, chi_sigma)


def canonical_dot_ramification(k: int, chi_s: int, chi_sigma: int) -> int:
    return k + 4 * chi_s - 8 * chi_sigma


def ksq_of_minimal_from_contractions(ksq_resolution: int, contracted: int) -> int:
    """ each (-2)-curve of the smooth branch lifts to a (-1)-curve of S* """
    if contracted < 0:
        raise InconsistentBranch(f'cannot contract {contracted} curves', {'contracted': contracted})
    return ksq_resolution + contracted


def pencil_genus(cover: ResolvedCover, fibre: DivisorClass) -> int:
    if self_intersection(fibre) != 0:
        raise NotAPencil(f'{fibre} has self-intersection {self_intersection(fibre)}', {'class': fibre.to_list()})
    dot = intersect(fibre, cover.smooth_class)
    if dot % 2:
        raise OddBranchIntersection(f'fibre meets the branch in {dot} points', {'intersection': dot})
    return (dot - 2) // 2


def bicanonical_factorization_test(cover: ResolvedCover) -> bool:
    return h0_two_k_plus_delta(cover, cover.model.kind.chi) == 0


def cover_invariants(cover: ResolvedCover, chi_base: int, ksq_min: Optional[int] = None,
                     chi_sigma: Optional[int] = None) -> CoverInvariants:
    chi  = chi_of_cover(cover, chi_base)
    ksq  = ksq_of_resolution(cover)
    h0   = h0_two_k_plus_delta(cover, chi_base)
    k, kr = fixed_point_counts(ksq if ksq_min is None else ksq_min, chi,
                               chi_base if chi_sigma is None else chi_sigma, h0)
    return CoverInvariants(chi, ksq, chi - 1, h0, k, kr)
