"""Optional numba acceleration for the scalar numeric kernels.

The hot loops (Bessel-K evaluation inside density fits) are written as
plain scalar Python and decorated with :func:`maybe_njit`.  When numba is
importable and the environment variable ``RMTLAB_NUMBA`` is unset (or set
to anything other than ``0``/``false``/``off``/``no``), the kernels are
JIT compiled; otherwise the same Python functions run as-is.  Both paths
execute the identical arithmetic, the fallback is just slower.
"""

import os


def _flag_enabled() -> bool:
    value = os.environ.get("RMTLAB_NUMBA", "1").strip().lower()
    return value not in ("0", "false", "off", "no")


USING_NUMBA = False
if _flag_enabled():
    try:
        from numba import njit as _njit

        USING_NUMBA = True
    except ImportError:
        USING_NUMBA = False


if USING_NUMBA:

    def maybe_njit(**kwargs):
        kwargs.setdefault("cache", True)
        return _njit(**kwargs)

else:

    def maybe_njit(**kwargs):
        def wrap(func):
            return func

        return wrap
