"""Configuration, numeric defaults and figure presets. No app dependencies (stdlib only)."""

import logging
import os

BASE_OUTPUT_DIR = os.path.join(os.getcwd(), "outputs")

# Numeric defaults (NumericConfig)
REL_TOL = 1e-10
ABS_TOL = 1e-14
MAX_ITER = 200
MAX_SUBDIVISIONS = 60

BRANCH_POINT_GUARD = 1e-12
CCDF_FLOOR = 1e-300

# Monte Carlo
DEFAULT_SEED = 42
DEFAULT_MC_SAMPLES = 100_000
MIN_MC_SAMPLES = 10_000
DEFAULT_SHARDS = 8

# Output
SIG_DIGITS = 12
OUTPUT_FORMATS = ("csv", "json")
FILENAME_MAX_LEN = 20

# Sweep grid (dB)
SNR_DB_START = -30.0
SNR_DB_STOP = 0.0
SNR_DB_STEP = 1.0

THREADS_ENV = "RICIAN_LOWSNR_THREADS"

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3
EXIT_USAGE = 4

METHODS = (
    "exact",
    "asymptotic_regime",
    "asymptotic_simple",
    "awgn_limit",
    "onoff",
    "onoff_mc",
)

CSV_COLUMNS = (
    "snr_db",
    "snr_linear",
    "cap_exact_npcu",
    "cap_asym_regime_npcu",
    "cap_asym_simple_npcu",
    "cap_awgn_npcu",
    "rate_onoff_npcu",
    "rate_onoff_mc_npcu",
    "lambda_exact",
    "lambda_asym",
    "ee_csitr",
    "ee_csir",
    "flags",
)

# Which CSV column each sweep method fills.
METHOD_COLUMNS = {
    "exact": "cap_exact_npcu",
    "asymptotic_regime": "cap_asym_regime_npcu",
    "asymptotic_simple": "cap_asym_simple_npcu",
    "awgn_limit": "cap_awgn_npcu",
    "onoff": "rate_onoff_npcu",
    "onoff_mc": "rate_onoff_mc_npcu",
}

_OMEGA_NOTE = (
    "Omega is not stated for the published figures; Omega = 1 is assumed as the "
    "natural normalization, so absolute values are not claimed to match the plots."
)

PRESETS = {
    "fig1": {
        "name": "Capacity, L=3, K=1",
        "K": 1.0,
        "L": 3,
        "omega": 1.0,
        "snr_db_start": -30.0,
        "snr_db_stop": 0.0,
        "snr_db_step": 1.0,
        "methods": ("exact", "asymptotic_regime", "asymptotic_simple", "awgn_limit", "onoff"),
        "energy": False,
        "description": "Exact, asymptotic, on-off and AWGN-limit capacity versus SNR",
        "assumptions": _OMEGA_NOTE,
    },
    "fig2": {
        "name": "Capacity, L=2, K=2",
        "K": 2.0,
        "L": 2,
        "omega": 1.0,
        "snr_db_start": -30.0,
        "snr_db_stop": 0.0,
        "snr_db_step": 1.0,
        "methods": ("exact", "asymptotic_regime", "asymptotic_simple", "awgn_limit", "onoff"),
        "energy": False,
        "description": "Exact, asymptotic, on-off and AWGN-limit capacity versus SNR",
        "assumptions": _OMEGA_NOTE,
    },
    "fig3": {
        "name": "Energy efficiency, L=3, K=1",
        "K": 1.0,
        "L": 3,
        "omega": 1.0,
        "snr_db_start": -30.0,
        "snr_db_stop": 0.0,
        "snr_db_step": 1.0,
        "methods": ("exact", "asymptotic_simple"),
        "energy": True,
        "description": "Energy per nat with CSI-TR (exact and asymptotic) and CSI-R only",
        "assumptions": _OMEGA_NOTE,
    },
}


def max_workers():
    """Worker cap from RICIAN_LOWSNR_THREADS, or None for the executor default."""
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return None
    try:
        value = int(raw)
    except ValueError:
        logging.getLogger(__name__).warning("Ignoring %s=%r (not an integer)", THREADS_ENV, raw)
        return None
    if value < 1:
        logging.getLogger(__name__).warning("Ignoring %s=%r (must be >= 1)", THREADS_ENV, raw)
        return None
    return value
