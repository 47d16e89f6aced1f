"""Python interface to the ncd core.

Self-organizing maps over vector, dissimilarity, kernel and categorical data,
one-hidden-layer autoregression with penalized size selection, Markov-switching
autoregression, and two-scale profile forecasting. All heavy lifting happens in
the compiled extension; this package only re-exports it.
"""

try:
    from ._ncd import *  # noqa: F401,F403  (installed layout)
    from ._ncd import __doc__ as _core_doc, __version__  # noqa: F401
except ImportError:  # pragma: no cover - build-tree layout
    from _ncd import *  # noqa: F401,F403
    from _ncd import __doc__ as _core_doc, __version__  # noqa: F401
