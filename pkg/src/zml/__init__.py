"""Numerical verification lab for the shifted second moment of zeta.

Modules
-------
complexfn   log Gamma, digamma, chi, two independent zeta evaluators
divisor     shifted divisor sums D_c(x) and their main-term asymptotics
chiprod     the chi-factor product, exact and asymptotic, with error fits
moment      both sides of the shifted-second-moment identity by quadrature
scanlab     grid scans, power-law fits, CSV/manifest persistence
cli         command-line front end (selftest, dsum, chiprod, moment, scan)
"""

__version__ = "0.1.0"

from .complexfn import (  # noqa: F401
    EULER_GAMMA,
    EvalMethod,
    EvalPolicy,
    chi,
    digamma,
    euler_gamma,
    log_gamma,
    stirling_remainder,
    zeta,
    zeta_em,
    zeta_rs,
)
from .shifts import ShiftPair  # noqa: F401
