# affinefreq/core/errors.py

"""Exception hierarchy for affinefreq.

Every error raised on purpose by the library derives from
:class:`AffineFreqError`, so callers can catch library failures without
swallowing unrelated exceptions.

Example:
    ```python
    from affinefreq import AffineFreqError, get_scenario

    try:
        spec = get_scenario("E9")
    except AffineFreqError as e:
        print(f"affinefreq error occurred: {e}")
    ```
"""

from typing import TYPE_CHECKING, List

if TYPE_CHECKING:  # pragma: no cover
    from ..validation.validators import ValidationIssue


class AffineFreqError(Exception):
    """Base class for exceptions in the affinefreq package."""

    pass


class ValidationError(AffineFreqError):
    """Exception raised when a spec, config or buffer fails validation.

    Attributes:
        issues (List[ValidationIssue]): Validation issues found

    Example:
        ```python
        try:
            generate_three_phase(spec)
        except ValidationError as e:
            for issue in e.issues:
                print(f"{issue.severity}: {issue}")
        ```
    """

    def __init__(self, issues: List["ValidationIssue"]):
        self.issues = issues
        super().__init__(self.__str__())

    def __str__(self) -> str:
        """Returns a formatted string of all validation issues.

        Returns:
            str: Multi-line string containing all validation issues
        """
        return "Validation failed with the following issues:\n" + "\n".join(
            str(issue) for issue in self.issues
        )


class ScenarioNotFoundError(AffineFreqError, KeyError):
    """Raised when a scenario label is not in the catalog."""

    def __init__(self, label: str, available: List[str]):
        self.label = label
        self.available = available
        super().__init__(
            f"Unknown scenario '{label}'. Available: {', '.join(available)}"
        )

    def __str__(self) -> str:
        return self.args[0]


class UnsupportedSpecError(AffineFreqError):
    """Raised when a time function cannot be differentiated symbolically."""

    pass


class WaveformFormatError(AffineFreqError):
    """Base class for problems with the content of waveform, trace and INI files."""

    pass


class ParseError(WaveformFormatError):
    """Raised when a file is empty, non-monotonic or not uniformly sampled."""

    pass


class SchemaError(WaveformFormatError):
    """Raised when required columns are missing from a file."""

    pass
