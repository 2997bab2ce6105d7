"""Backend selection for the secular-equation kernel.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``OSCEQUIL_PURE_PYTHON`` is set to a non-empty value
other than ``0``, the NumPy implementation is used.
"""
import os

from . import _secular_py

try:
    from . import _secular_ext
except ImportError:  # extension not built
    _secular_ext = None

_BACKENDS = {"python": _secular_py}
if _secular_ext is not None:
    _BACKENDS["compiled"] = _secular_ext


def _default_backend() -> str:
    forced = os.environ.get("OSCEQUIL_PURE_PYTHON", "")
    if forced not in ("", "0") or _secular_ext is None:
        return "python"
    return "compiled"


BACKEND = _default_backend()


def available_backends() -> tuple:
    return tuple(_BACKENDS)


def secular_roots(poles, weights, shift, upper, rtol=1e-13, backend=None):
    """Dispatch to the selected implementation; see ``_secular_ext.secular_roots``."""
    name = BACKEND if backend is None else backend
    try:
        impl = _BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available; have {available_backends()}") from None
    return impl.secular_roots(poles, weights, float(shift), float(upper), rtol)
