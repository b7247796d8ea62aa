"""Lattice DP kernels with a compiled fast path and a pure-Python fallback.

The compiled extension (``_speed``, built from Cython) is preferred when
importable; otherwise the pure twin takes over transparently.  Set
``BOUNDKIT_KERNELS=pure`` or ``BOUNDKIT_KERNELS=compiled`` to force a
backend (the latter raises if the extension is missing), e.g. for the
benchmark in ``benchmarks/bench_kernels.py``.
"""

import os

from . import _pure

_requested = os.environ.get("BOUNDKIT_KERNELS", "").strip().lower()

if _requested == "pure":
    _impl = _pure
    BACKEND = "pure"
elif _requested == "compiled":
    from . import _speed as _impl  # ImportError here means the ext was not built

    BACKEND = "compiled"
else:
    try:
        from . import _speed as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _pure
        BACKEND = "pure"

viterbi_path = _impl.viterbi_path
expected_counts = _impl.expected_counts
filter_lattice = _impl.filter_lattice

__all__ = ["BACKEND", "viterbi_path", "expected_counts", "filter_lattice"]
