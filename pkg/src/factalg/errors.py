"""Exception types shared across the package.

Every check that can fail for a structural reason raises one of these, so the
CLI can tell configuration problems (``SchemaError``, ``RationalParseError``)
apart from mathematical outcomes.
"""


class FactAlgError(Exception):
    """Base class for all package errors."""

    def __init__(self, message: str = "", witness=None):
        super().__init__(message)
        self.witness = witness


# posets and compact sets
class NotContained(FactAlgError):
    pass


class BadConfiguration(FactAlgError):
    pass


class NotAPoset(FactAlgError):
    pass


# linear algebra
class IncoherentDiagram(FactAlgError):
    pass


class ShapeMismatch(FactAlgError):
    pass


# geometry
class OverlapError(FactAlgError):
    pass


class NotDisks(FactAlgError):
    pass


class EmptyCover(FactAlgError):
    pass


class UnsupportedMap(FactAlgError):
    pass


class PreimageUnlisted(FactAlgError):
    pass


# operads of opens
class InvalidComposite(FactAlgError):
    pass


class NotAMorphism(FactAlgError):
    pass


class BlockNotInUniverse(FactAlgError):
    pass


class ComplementNotInUniverse(FactAlgError):
    pass


class MarkedOpenInUniverse(FactAlgError):
    pass


# algebras
class MissingPoint(FactAlgError):
    pass


class MissingIntersection(FactAlgError):
    pass


class ChainNotCofinal(FactAlgError):
    pass


class UniverseMismatch(FactAlgError):
    pass


class NotFactorizing(FactAlgError):
    pass


class ShortcutChoiceDependent(FactAlgError):
    pass


class NoDecompositionListed(FactAlgError):
    pass


class ChoiceDependent(FactAlgError):
    pass


class OverlapMismatch(FactAlgError):
    pass


class AxiomFailure(FactAlgError):
    pass


class MissingOpens(FactAlgError):
    pass


class ModuleAxiomFailure(FactAlgError):
    pass


class UndefinedOperation(FactAlgError):
    pass


# dendroidal
class AssumptionsNotVerified(FactAlgError):
    pass


# configuration
class SchemaError(FactAlgError):
    pass


class RationalParseError(FactAlgError):
    pass
