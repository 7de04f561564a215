import json
from fractions import Fraction
from typing import Any, Dict, Union

from src.errors import ConfigParseError
from src.models.branch_resolution import BranchModel, Mtuple, RRpoint
from src.models.duval_planes import ConicEvidence, DuValConfig, build_branch
from src.models.picard_lattice import SurfaceKind, make_class, make_surface
from src.models.ruled_models import XIAO_SHAPES, RuledBranchShape, plane_model_of_shape

CONFIG_KEYS = {'type', 'n', 'delta1', 'delta2', 'gamma_infinitely_near', 'conic'}


#%% scalar fields
def parse_rational(value) -> Fraction:
    """ integer, [num, den] pair or decimal string """
    if isinstance(value, bool):
        raise ConfigParseError(f'{value!r} is not a rational number', {'value': value})
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, list) and len(value) == 2 and all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        if value[1] == 0:
            raise ConfigParseError('rational with zero denominator', {'value': value})
        return Fraction(value[0], value[1])
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ConfigParseError(f'{value!r} is not a rational number', {'value': value})
    raise ConfigParseError(f'{value!r} is not a rational number', {'value': repr(value)})


def dump_rational(value: Fraction) -> Union[int, list]:
    value = Fraction(value)
    return value.numerator if value.denominator == 1 else [value.numerator, value.denominator]


def _integer(raw: Dict, key: str, default: int = 0) -> int:
    value = raw.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigParseError(f'"{key}" must be an integer, got {value!r}', {'key': key})
    return value


def _point(value) -> tuple:
    if not isinstance(value, list) or len(value) != 3:
        raise ConfigParseError(f'a plane point is a list of three coordinates, got {value!r}', {'value': repr(value)})
    return tuple(parse_rational(x) for x in value)


#%% DuValConfig <-> dict
def parse_conic(value) -> ConicEvidence:
    if value is None or value == 'generic':
        return ConicEvidence.generic()
    if value == 'on_conic':
        return ConicEvidence.on_conic()
    if isinstance(value, dict) and 'points' in value:
        unknown = set(value) - {'points', 'gamma', 'near_gamma'}
        if unknown:
            raise ConfigParseError(f'unknown conic keys {sorted(unknown)}', {'keys': sorted(unknown)})
        if not isinstance(value['points'], list):
            raise ConfigParseError('"points" must be a list', {'key': 'points'})
        gamma = value.get('gamma')
        near  = value.get('near_gamma', [])
        if not isinstance(near, list) or any(isinstance(i, bool) or not isinstance(i, int) for i in near):
            raise ConfigParseError('"near_gamma" must be a list of indices', {'key': 'near_gamma'})
        return ConicEvidence.coordinates([_point(p) for p in value['points']],
                                         None if gamma is None else _point(gamma), near)
    raise ConfigParseError(f'conic evidence must be "generic", "on_conic" or {{"points": ...}}, got {value!r}',
                           {'value': repr(value)})


def config_from_dict(raw: Any) -> DuValConfig:
    if not isinstance(raw, dict):
        raise ConfigParseError('a configuration is a JSON object', {'value': type(raw).__name__})
    unknown = set(raw) - CONFIG_KEYS
    if unknown:
        raise ConfigParseError(f'unknown configuration keys {sorted(unknown)}', {'keys': sorted(unknown)})
    kind = raw.get('type')
    if kind in ('B', 'D'):
        # stray counts are kept so that check_admissible can reject them with a reason
        return DuValConfig(kind, _integer(raw, 'n'), _integer(raw, 'delta1'), _integer(raw, 'delta2'))
    if kind != 'Dn':
        raise ConfigParseError(f'"type" must be "B", "D" or "Dn", got {kind!r}', {'key': 'type'})
    flag = raw.get('gamma_infinitely_near', False)
    if not isinstance(flag, bool):
        raise ConfigParseError('"gamma_infinitely_near" must be a boolean', {'key': 'gamma_infinitely_near'})
    return DuValConfig.type_dn(_integer(raw, 'n'), _integer(raw, 'delta1'), _integer(raw, 'delta2'),
                               flag, parse_conic(raw.get('conic')))


def config_to_dict(config: DuValConfig) -> Dict:
    if config.variant != 'Dn':
        out = {'type': config.variant}
        out.update({k: v for k, v in (('n', config.n), ('delta1', config.delta1), ('delta2', config.delta2)) if v})
        return out
    evidence = config.conic
    if evidence.kind == 'coordinates':
        conic = {'points': [[dump_rational(x) for x in p] for p in evidence.points]}
        if evidence.gamma is not None:
            conic['gamma'] = [dump_rational(x) for x in evidence.gamma]
        if evidence.near_gamma:
            conic['near_gamma'] = list(evidence.near_gamma)
    else:
        conic = evidence.kind
    return {'type': 'Dn', 'n': config.n, 'delta1': config.delta1, 'delta2': config.delta2,
            'gamma_infinitely_near': config.gamma_infinitely_near, 'conic': conic}


#%% files
def _decode(text: str, source: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigParseError(f'{source}: {e.msg} at line {e.lineno} column {e.colno}',
                               {'source': source, 'line': e.lineno, 'column': e.colno})


def _read(path: str) -> str:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return f.read()
    except OSError as e:
        raise ConfigParseError(f'cannot read {path}: {e.strerror}', {'path': path})


def loads_config(text: str, source: str = '<string>') -> DuValConfig:
    return config_from_dict(_decode(text, source))


def dumps_config(config: DuValConfig) -> str:
    return json.dumps(config_to_dict(config), sort_keys=True)


def give_config_file(path: str) -> DuValConfig:
    return loads_config(_read(path), path)


#%% raw branches for the resolution ledger
def _singularity(raw: Any):
    if not isinstance(raw, dict):
        raise ConfigParseError('a singularity is a JSON object', {'value': repr(raw)})
    try:
        if raw.get('kind') == 'mtuple':
            return Mtuple(str(raw['center']), _integer(raw, 'm'), raw.get('near'))
        if raw.get('kind') == 'rr':
            return RRpoint(str(raw['p']), str(raw['p_prime']), _integer(raw, 'r'), raw.get('near'))
    except KeyError as e:
        raise ConfigParseError(f'singularity is missing {e.args[0]!r}', {'key': e.args[0]})
    raise ConfigParseError(f'singularity kind must be "mtuple" or "rr", got {raw.get("kind")!r}', {'key': 'kind'})


def branch_from_dict(raw: Any) -> BranchModel:
    """
    Accepts a Du Val configuration, {"type": "shape", "case": "SIII"} (or xi, zeta, e,
    rr_points, extra) for a ruled branch moved to the plane, or
    {"type": "branch", "ambient": "P2" | "F<e>", "class": [...], "singularities": [...]}.
    """
    if not isinstance(raw, dict):
        raise ConfigParseError('a branch description is a JSON object', {'value': type(raw).__name__})
    kind = raw.get('type')
    if kind == 'shape':
        if 'case' in raw:
            if raw['case'] not in XIAO_SHAPES:
                raise ConfigParseError(f'unknown shape case {raw["case"]!r}', {'case': raw['case']})
            shape = XIAO_SHAPES[raw['case']]
        else:
            pairs = lambda key: tuple((int(a), int(b)) for a, b in raw.get(key, []))
            shape = RuledBranchShape(_integer(raw, 'xi'), _integer(raw, 'zeta'), _integer(raw, 'e'),
                                     pairs('rr_points'), pairs('extra'))
        _, cover = plane_model_of_shape(shape)
        return cover.branch
    if kind == 'branch':
        ambient = raw.get('ambient', 'P2')
        if ambient == 'P2':
            surface = make_surface(SurfaceKind.plane())
        elif isinstance(ambient, str) and ambient.startswith('F') and ambient[1:].isdigit():
            surface = make_surface(SurfaceKind.hirzebruch(int(ambient[1:])))
        else:
            raise ConfigParseError(f'ambient must be "P2" or "F<e>", got {ambient!r}', {'key': 'ambient'})
        coeffs = raw.get('class')
        if not isinstance(coeffs, list) or any(isinstance(c, bool) or not isinstance(c, int) for c in coeffs):
            raise ConfigParseError('"class" must be a list of integers', {'key': 'class'})
        sings = raw.get('singularities', [])
        if not isinstance(sings, list):
            raise ConfigParseError('"singularities" must be a list', {'key': 'singularities'})
        return BranchModel(surface, make_class(surface, coeffs), tuple(_singularity(s) for s in sings))
    return build_branch(config_from_dict(raw))


def give_json_file(path: str) -> Any:
    return _decode(_read(path), path)


def give_branch_file(path: str) -> BranchModel:
    return branch_from_dict(give_json_file(path))
