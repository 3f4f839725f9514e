"""Backend selection: compiled kernels when built, numpy fallback otherwise."""

from __future__ import annotations

from . import _kernels_py

try:
    from . import _kernels  # type: ignore[attr-defined]

    COMPILED_AVAILABLE = True
except ImportError:
    _kernels = None
    COMPILED_AVAILABLE = False

BACKENDS = ("auto", "compiled", "python")


def get_backend(name: str = "auto"):
    """Resolve a backend module by name.

    'auto' prefers the compiled kernels; 'compiled' raises when the
    extension was not built; 'python' always returns the numpy fallback.
    """
    if name == "auto":
        return _kernels if COMPILED_AVAILABLE else _kernels_py
    if name == "compiled":
        if not COMPILED_AVAILABLE:
            raise RuntimeError("compiled kernels are not available in this install")
        return _kernels
    if name == "python":
        return _kernels_py
    raise ValueError(f"backend must be one of {BACKENDS}, got {name!r}")


def available_backends() -> tuple[str, ...]:
    return ("compiled", "python") if COMPILED_AVAILABLE else ("python",)
