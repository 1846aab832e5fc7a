"""Exception hierarchy shared by all hdx modules."""


class HDXError(Exception):
    """Base class for every error raised by hdx."""


class ValidationError(HDXError, ValueError):
    pass


class MixedDimension(ValidationError):
    pass


class NonPositiveWeight(ValidationError):
    pass


class DuplicateTopSimplex(ValidationError):
    pass


class InvalidSimplex(ValidationError):
    pass


class BadDimension(HDXError, ValueError):
    pass


class BadArgs(HDXError, ValueError):
    pass


class BadEpsilon(BadArgs):
    pass


class SimplexNotInComplex(HDXError, KeyError):
    def __init__(self, simplex):
        super().__init__(simplex)
        self.simplex = tuple(simplex)

    def __str__(self):
        return f"simplex {list(self.simplex)} is not a cell of the complex"


class Disconnected(HDXError):
    def __init__(self, components: int):
        super().__init__(f"graph has {components} connected components")
        self.components = components


class DisconnectedLink(HDXError):
    def __init__(self, simplex, components: int):
        super().__init__(
            f"link of {list(simplex)} has a 1-skeleton with {components} components"
        )
        self.simplex = tuple(simplex)
        self.components = components


class EmptyOrFullSubset(HDXError, ValueError):
    pass


class TopDimension(HDXError, ValueError):
    pass


class CapExceeded(HDXError):
    """An exhaustive enumeration would exceed the configured cap."""

    def __init__(self, what: str, dim: int, cap: int):
        super().__init__(f"{what}: 2^{dim} elements exceeds cap {cap}")
        self.what = what
        self.dim = dim
        self.cap = cap


class ZeroCochain(HDXError, ValueError):
    pass


class HypothesisNotMet(HDXError):
    def __init__(self, hypothesis: str, detail: str = ""):
        msg = hypothesis if not detail else f"{hypothesis}: {detail}"
        super().__init__(msg)
        self.hypothesis = hypothesis


class UnsupportedQ(HDXError, ValueError):
    pass


class EmptyTopLevel(HDXError):
    pass


class BadK(BadArgs):
    pass


class ParseError(HDXError, ValueError):
    pass
