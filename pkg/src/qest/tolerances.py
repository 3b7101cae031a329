"""Numerical thresholds shared across modules and the fuzz oracles."""

# model validation
NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-12
GAUGE_TOL = 1e-10

# Fisher information
DET_J_MIN = 1e-14
BETA_SNAP = 1e-9  # beta within this of 0 or 1 is snapped onto the boundary
BETA_MAX_EXCESS = 1e-9

# bound dispatch
BETA_ZERO = 1e-12
EQUAL_S_REL = 1e-14
IMAG_ROOT_REL = 1e-9

# POVM checks
POVM_PSD_TOL = 1e-10
POVM_COMPLETENESS_TOL = 1e-10
PROB_FLOOR = 1e-14

# mixed states
SUPPORT_MIN = 1e-12
LEAK_TOL = 1e-10

# gridstate
TAIL_TOL = 1e-16
MAX_CUTOFF = 200

# oracle acceptance
INEQUALITY_TOL = 1e-9
REGRET_TOL = 1e-9
# relative QFI deficits below this are rounding noise (square roots amplify them)
DEFICIT_FLOOR = 1e-14
QUARTIC_VS_GRID_REL = 1e-9

DEFAULT_SEED = 0xC0FFEE
