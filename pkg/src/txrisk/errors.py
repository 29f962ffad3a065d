"""Exception and warning types shared across the package.

Every error carries an ``exit_code`` so the command-line layer can map
failures to distinct process exit codes (documented in ``txrisk --help``).
"""


class TxRiskError(Exception):
    """Base class for all txrisk errors."""

    exit_code = 1


class ConfigError(TxRiskError):
    """Bad run configuration or command usage (missing path, empty range...)."""

    exit_code = 2


class ParseError(TxRiskError):
    """An input file failed to parse."""

    exit_code = 3

    def __init__(self, message, *, path=None, row=None, column=None):
        ctx = []
        if path is not None:
            ctx.append(str(path))
        if row is not None:
            ctx.append(f"row {row}")
        if column is not None:
            ctx.append(f"column {column!r}")
        if ctx:
            message = f"{message} ({', '.join(ctx)})"
        super().__init__(message)
        self.path = path
        self.row = row
        self.column = column


class GapError(TxRiskError):
    """A day has incomplete hourly coverage and gap filling is disabled."""

    exit_code = 4


class EmptyIntersectionError(TxRiskError):
    """Weather, meter, and calendar files share no common coverage."""

    exit_code = 5


class TooFewPointsError(TxRiskError):
    """Asked for more clusters than there are data points."""

    exit_code = 6


class NonConvergenceError(TxRiskError):
    """Daily-cycle thermal iteration did not settle within the sweep cap."""

    exit_code = 7


class NoFeasibleScaleError(TxRiskError):
    """Even zero loading violates a temperature limit (ambient above limit)."""

    exit_code = 8


class FarFromAllClustersError(TxRiskError):
    """Strict-mode estimation refused a query outside the model's support."""

    exit_code = 9


class KeyMismatchError(TxRiskError):
    """Two per-cluster maps disagree on their cluster keys."""

    exit_code = 10


class SchemaMismatchError(TxRiskError):
    """A vector does not line up with the feature schema it is used under."""

    exit_code = 11


class EmptyDatasetError(TxRiskError):
    """An operation that needs at least one record received none."""

    exit_code = 12


class MissingProfileError(TxRiskError):
    """A cluster member has no stored raw 24-hour profile."""

    exit_code = 13


class ZeroServicesError(TxRiskError):
    """Energy-to-load conversion requires at least one service."""

    exit_code = 14


class OutOfRangeError(TxRiskError):
    """An ordinal status order fell outside [1, N]."""

    exit_code = 15


class EmptyMembersError(TxRiskError):
    """Centroid update requires a nonempty member collection."""

    exit_code = 16


class EmptyClusterWarning(UserWarning):
    """A cluster lost all members and its centroid was reseeded."""


class DegenerateFeatureWarning(UserWarning):
    """A numeric feature is constant over the dataset (Min == Max)."""


class DataGapWarning(UserWarning):
    """A day with missing hourly readings was interpolated or dropped."""


class FarQueryWarning(UserWarning):
    """A lenient-mode estimation query is outside the model's support."""


class MissingFeatureWarning(UserWarning):
    """A query lacks schema features; distance used the available subset."""


class ShortCoverageWarning(UserWarning):
    """The dataset spans less than two years; results may not be
    statistically representative."""
