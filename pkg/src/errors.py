class DuValError(Exception):
    """
    Base exception type

    Every error carries a readable message and an optional details dict that
    ends up in the JSON error object on standard error.
    """
    exit_code = 2

    def __init__(self, message, details=None):
        super(DuValError, self).__init__(message)
        self.message = message
        self.details = dict(details or {})

    def __str__(self):
        return self.message

    def to_dict(self):
        return {'error': type(self).__name__, 'message': self.message, 'details': self.details}


class InvalidParameter(DuValError):
    """
    Raise InvalidParameter when a surface kind is built with a bad parameter,
    e.g. a negative Hirzebruch index
    """
    def __init__(self, message, details=None):
        super(InvalidParameter, self).__init__(message, details)


class InvalidCenter(DuValError):
    """
    Raise InvalidCenter when a blow-up center refers to an unknown parent or
    reuses an id
    """
    def __init__(self, message, details=None):
        super(InvalidCenter, self).__init__(message, details)


class LatticeMismatch(DuValError):
    """
    Raise LatticeMismatch when two classes living on different models are combined
    """
    def __init__(self, message, details=None):
        super(LatticeMismatch, self).__init__(message, details)


class LatticeOverflow(DuValError):
    def __init__(self, message, details=None):
        super(LatticeOverflow, self).__init__(message, details)


class OddBranchClass(DuValError):
    """
    Raise OddBranchClass when the smooth branch class is not divisible by 2
    """
    def __init__(self, message, details=None):
        super(OddBranchClass, self).__init__(message, details)


class InconsistentBranch(DuValError):
    """
    Raise InconsistentBranch when a closed-form invariant does not come out integral
    """
    def __init__(self, message, details=None):
        super(InconsistentBranch, self).__init__(message, details)


class OddBranchIntersection(DuValError):
    def __init__(self, message, details=None):
        super(OddBranchIntersection, self).__init__(message, details)


class NotAPencil(DuValError):
    def __init__(self, message, details=None):
        super(NotAPencil, self).__init__(message, details)


class Inadmissible(DuValError):
    """
    Raise Inadmissible when a Du Val configuration breaks one of the
    admissibility rules; details['reasons'] lists every broken rule
    """
    def __init__(self, message, details=None):
        super(Inadmissible, self).__init__(message, details)


class BadEvidence(DuValError):
    def __init__(self, message, details=None):
        super(BadEvidence, self).__init__(message, details)


class BadPoint(DuValError):
    def __init__(self, message, details=None):
        super(BadPoint, self).__init__(message, details)


class NotConvertible(DuValError):
    def __init__(self, message, details=None):
        super(NotConvertible, self).__init__(message, details)


class InvalidTransform(DuValError):
    """
    Raise InvalidTransform when a birational move is applied where it is not
    defined (wrong e, too few centers)
    """
    def __init__(self, message, details=None):
        super(InvalidTransform, self).__init__(message, details)


class ConfigParseError(DuValError):
    """
    Raise ConfigParseError when a configuration file is not valid JSON or does
    not follow the config schema
    """
    exit_code = 1

    def __init__(self, message, details=None):
        super(ConfigParseError, self).__init__(message, details)
