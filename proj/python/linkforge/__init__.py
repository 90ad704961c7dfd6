"""Record linkage for noisy bibliographic metadata.

Thin wrapper around the native module; see the README for the pipeline
walkthrough and the CLI equivalents of each call.
"""

try:
    from ._linkforge import *  # noqa: F401,F403  (installed package layout)
    from ._linkforge import __version__  # noqa: F401
except ImportError:  # in-tree build: extension sits next to the package on sys.path
    from _linkforge import *  # noqa: F401,F403
    from _linkforge import __version__  # noqa: F401
