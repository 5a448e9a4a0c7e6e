"""Optional numba acceleration for the stepping kernels"""
import logging

logger = logging.getLogger(__name__)

try:
    from numba import njit as _numba_njit
    HAS_NUMBA = True
except ImportError:
    _numba_njit = None
    HAS_NUMBA = False
    logger.warning("numba not installed; kernels run as plain Python (same results, much slower)")


def njit(*args, **kwargs):
    """
    Compile a kernel with numba when available.

    Usable bare (``@njit``) or with options (``@njit(cache=True)``). Without
    numba the function is returned unchanged, so kernels must stay within the
    subset of Python that numba accepts.
    """
    if args and callable(args[0]) and len(args) == 1 and not kwargs:
        func = args[0]
        return _numba_njit(cache=True)(func) if HAS_NUMBA else func

    def decorator(func):
        if not HAS_NUMBA:
            return func
        options = {"cache": True}
        options.update(kwargs)
        return _numba_njit(**options)(func)

    return decorator
