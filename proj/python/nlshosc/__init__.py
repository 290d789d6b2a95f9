"""Spectral simulation and verification engine for the energy-critical NLS
with a harmonic oscillator potential."""

try:
    from ._nlshosc import *  # noqa: F401,F403  (installed package layout)
    from . import _nlshosc as _core
except ImportError:  # build-tree layout: extension on sys.path directly
    from _nlshosc import *  # noqa: F401,F403
    import _nlshosc as _core

__all__ = [name for name in dir(_core) if not name.startswith("_")]
__version__ = "1.0.0"
