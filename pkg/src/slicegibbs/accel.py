"""Numba acceleration switch.

Hot numeric paths in this package exist twice: a compiled numba version and a
pure-numpy version. Selection order:

1. ``SLICEGIBBS_ENGINE`` environment variable: ``auto`` (default), ``numba``,
   or ``numpy``.
2. Whether numba imports at all.
3. Per-call ``engine=`` arguments override the environment.

``SLICEGIBBS_ENGINE=numpy`` disables every compiled path, which is the knob
the engine benchmark uses to time the fallback.
"""

import os

_VALID = ("auto", "numba", "numpy")

ENGINE_ENV_VAR = "SLICEGIBBS_ENGINE"

_requested = os.environ.get(ENGINE_ENV_VAR, "auto").strip().lower() or "auto"
if _requested not in _VALID:
    raise RuntimeError(
        f"{ENGINE_ENV_VAR} must be one of {_VALID}, got {_requested!r}"
    )

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only on stripped installs
    HAVE_NUMBA = False

if _requested == "numba" and not HAVE_NUMBA:
    raise RuntimeError(f"{ENGINE_ENV_VAR}=numba but numba is not importable")

#: compiled paths may be used at all
NUMBA_ENABLED = HAVE_NUMBA and _requested != "numpy"

#: raw environment preference: "auto", "numba", or "numpy"
ENGINE_PREFERENCE = _requested


def resolve_engine(requested: str, kernel_compiled: bool) -> str:
    """Pick the engine for one sampler run.

    ``requested`` is ``auto``/``numba``/``numpy`` from config or CLI.
    ``kernel_compiled`` says whether the target kernel ships compiled
    evaluators; arbitrary Python kernels always run on the numpy path.
    """
    if requested not in _VALID:
        raise ValueError(f"engine must be one of {_VALID}, got {requested!r}")
    if requested == "numpy":
        return "numpy"
    if requested == "numba":
        if not NUMBA_ENABLED:
            raise RuntimeError("numba engine requested but numba is disabled or missing")
        if not kernel_compiled:
            raise RuntimeError("numba engine requested but this kernel has no compiled evaluators")
        return "numba"
    # auto
    if NUMBA_ENABLED and kernel_compiled:
        return "numba"
    return "numpy"
