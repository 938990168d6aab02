"""Hot numerical kernels with a compiled core and a pure-Python fallback.

The flows integrator spends essentially all of its time evaluating chart
gradients of the two main Hamiltonians inside the implicit-midpoint fixed
point.  Those kernels are implemented twice with identical arithmetic:

* ``aadual.kernels._core``  - Cython extension (built by setup.py),
* ``aadual.kernels._ref``   - plain Python/NumPy reference.

The backend is chosen once at import: the extension when it is importable,
the reference otherwise, and the environment variable
``AADUAL_PURE_PYTHON=1`` forces the reference (used by the benchmark and
the cross-backend agreement test).
"""

import os

from . import _ref

KIND_H = 0
KIND_HHAT = 1
KIND_ACTION = 2

if os.environ.get("AADUAL_PURE_PYTHON") == "1":
    _impl = _ref
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _ref

BACKEND = _impl.BACKEND

hamiltonian_value = _impl.hamiltonian_value
hamiltonian_grad = _impl.hamiltonian_grad
sqrt_margin = _impl.sqrt_margin
midpoint_step = _impl.midpoint_step
explicit_step = _impl.explicit_step
advance = _impl.advance


def get_backend(name: str):
    """Return a specific backend module ('python' or 'compiled')."""
    if name == "python":
        return _ref
    if name == "compiled":
        from . import _core  # raises ImportError when the extension is absent

        return _core
    raise ValueError(f"unknown backend {name!r}")
