from __future__ import annotations

# Tolerances are relative to the scale of the object they test unless noted.
HERM_TOL = 1e-10
NORM_TOL = 1e-10
VEC_TOL = 1e-10
UNIT_TOL = 1e-10
SQRT_TOL = 1e-8
COMM_TOL = 1e-8
RECON_TOL = 1e-8
DIAG_TOL = 1e-8
GAP_TOL = 1e-6
PPT_RTOL = 1e-9  # times trace(rho)

F_CONDITION_CAP = 1e6
WITNESS_SAMPLES = 256
SIMDIAG_MAX_RETRIES = 8

SCHEMA_VERSION = "1"
LOG_LEVEL = "WARNING"
