"""Fisher information, reduced metrics on singular statistical models, and
Cramer-Rao gap certification.

The heavy lifting lives in the compiled extension; this package re-exports
its surface.
"""

try:
    from infogeo._infogeo import *  # noqa: F401,F403  (installed layout)
    from infogeo._infogeo import __version__  # noqa: F401
except ImportError:  # pragma: no cover - in-tree builds put the module on sys.path
    from _infogeo import *  # noqa: F401,F403
    from _infogeo import __version__  # noqa: F401
