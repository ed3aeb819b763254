from __future__ import annotations

DEFAULT_EPS = 1e-9
CI_EPS = 1e-7
DEFAULT_PRECISION = 3
DEFAULT_FORMAT = "ket"
DEFAULT_DATA_DIR = "data"
OUTPUT_FORMATS = ("ket", "json")

QUADRATURE_STEPS = 1024
GAUSSIAN_SUPPORT_SIGMAS = 8.0
DENSITY_NORMALIZATION_TOL = 1e-6

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_MATH = 3

SETTINGS_DEFAULTS = {
    "CHANINF_EPS": DEFAULT_EPS,
    "CHANINF_CI_EPS": CI_EPS,
    "CHANINF_PRECISION": DEFAULT_PRECISION,
    "CHANINF_FORMAT": DEFAULT_FORMAT,
    "CHANINF_QUADRATURE_STEPS": QUADRATURE_STEPS,
    "CHANINF_LOG_LEVEL": "WARNING",
    "CHANINF_API_HOST": "127.0.0.1",
    "CHANINF_API_PORT": 8090,
}
