"""Integrator backends: compiled Cython core with pure-Python fallback.

The compiled module is built as an optional extension; when it is missing
(no compiler at install time) the pure-Python implementation of the same
algorithm is used.  ``backend_name()`` reports which one is active and
``get_integrator(backend)`` lets callers (tests, benchmarks) force one.
"""

from . import _dopri
from ._dopri import (
    STATUS_CAPITAL,
    STATUS_DIVERGED,
    STATUS_OK,
    STATUS_STEP_UNDERFLOW,
)

try:
    from . import _chain_cy

    HAVE_COMPILED = True
except ImportError:  # extension not built; fall back to pure Python
    _chain_cy = None
    HAVE_COMPILED = False


def backend_name():
    return "compiled" if HAVE_COMPILED else "python"


def get_integrator(backend="auto"):
    """Return the integrate_chain callable for the requested backend.

    ``backend`` is "auto" (compiled when available), "compiled" or
    "python".  Requesting "compiled" without the built extension raises
    RuntimeError.
    """
    if backend == "auto":
        return _chain_cy.integrate_chain if HAVE_COMPILED else _dopri.integrate_chain
    if backend == "python":
        return _dopri.integrate_chain
    if backend == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled integrator core is not available")
        return _chain_cy.integrate_chain
    raise ValueError(f"unknown backend {backend!r}")
