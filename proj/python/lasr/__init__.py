"""Attention encoder-decoder speech recognition workbench (C++ core)."""

try:
    from ._lasr import *  # noqa: F401,F403
    from ._lasr import __doc__ as _core_doc
except ImportError:  # build-tree layout: extension beside the package dir
    from _lasr import *  # noqa: F401,F403
    from _lasr import __doc__ as _core_doc

__doc__ = _core_doc
__version__ = "0.1.0"
