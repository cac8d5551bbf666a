"""Select the compiled kernels when available, else the pure-Python ones.

Set ``MCGWB_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

_impl = _pykernels
if not os.environ.get("MCGWB_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = _impl.BACKEND
free_reduce = _impl.free_reduce
dehn_reduce_linear = _impl.dehn_reduce_linear
cyclic_runs = _impl.cyclic_runs
mat_mul_mod = _impl.mat_mul_mod
gf2_pack = _pykernels.gf2_pack
gf2_mul = _impl.gf2_mul
gf2_closure = _impl.gf2_closure
relator_tables = _pykernels.relator_tables
