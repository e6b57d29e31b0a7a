"""Exception hierarchy shared by the curve, protocol, adversary and harness layers."""


class CtakaError(Exception):
    """Base class for every error raised by this package."""


class DivisionByZero(CtakaError, ZeroDivisionError):
    pass


class InvalidPoint(CtakaError, ValueError):
    pass


class DegeneratePoint(CtakaError, ValueError):
    pass


class DegenerateScalar(CtakaError, ValueError):
    pass


class ProfileTooLarge(CtakaError, ValueError):
    pass


class UnknownDomain(CtakaError, KeyError):
    pass


class BadAlpha(CtakaError, ValueError):
    pass


class DuplicateIdentity(CtakaError, KeyError):
    pass


class UnknownIdentity(CtakaError, KeyError):
    pass


class ConfigError(CtakaError, ValueError):
    pass
