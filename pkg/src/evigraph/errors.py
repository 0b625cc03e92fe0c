"""Exception types shared across the package."""


class EvigraphError(Exception):
    """Base class for all package errors."""


class ValidationError(EvigraphError):
    """Input failed a structural or domain check."""


class CanonicalizationError(ValidationError):
    """A triple references an entity that is not in the canonical namespace."""


class DuplicateRecordError(ValidationError):
    """A record_id was already committed."""


class VisitOrderError(ValidationError):
    """visit_index did not strictly increase for the subject."""


class VersionError(EvigraphError):
    """Variant versions are inconsistent (regression or gap)."""


class UnknownSubjectError(EvigraphError):
    """The subject has no committed graph."""


class ScoringUnavailableError(EvigraphError):
    """A score-bearing variant was requested before any scoring pass."""


class ScenarioError(EvigraphError):
    """A what-if scenario file could not be parsed or executed."""

    def __init__(self, scenario_name: str, message: str):
        self.scenario_name = scenario_name
        super().__init__(f"scenario {scenario_name!r}: {message}")


class AnswerGenerationError(EvigraphError):
    """Answer generation failed; retrieved evidence is preserved."""

    def __init__(self, message: str, evidence=None):
        self.evidence = list(evidence) if evidence else []
        super().__init__(message)
