"""Package-wide numerical defaults."""

DEFAULT_CUTOFF = 16
DEFAULT_GUARD = 4
# J second moments and the quartic products behind them reach two levels up
MOMENT_GUARD = 2
GUARD_TOL = 1e-10

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_SLACK = 1e-10

EQUALITY_TOL = 1e-9
Z_THRESHOLD = 3.0

MAX_DIM = 10**6
