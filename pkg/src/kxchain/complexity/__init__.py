"""Program-length complexity estimation by dovetailed enumeration."""

from .arith import compress_bits, compress_proxy, decompress_bits
from .cache import (
    CACHE_ENV_VAR,
    EnumerationCache,
    HaltRecord,
    default_cache_dir,
    dovetail,
    load_cache,
    save_cache,
)
from .estimates import (
    BOLTZMANN_CONSTANT,
    ComplexityEstimate,
    c_upper,
    count_below,
    is_prefix_free,
    k_upper,
    kraft_total,
    landauer_cost,
    m_lower,
    prefix_wrap_bound,
    structural_antichain,
)
from .machine import PLAIN, PREFIX, candidates, run_machine, split_prefix, wrap_prefix

__all__ = [
    "BOLTZMANN_CONSTANT",
    "CACHE_ENV_VAR",
    "ComplexityEstimate",
    "EnumerationCache",
    "HaltRecord",
    "PLAIN",
    "PREFIX",
    "c_upper",
    "candidates",
    "compress_bits",
    "compress_proxy",
    "count_below",
    "decompress_bits",
    "default_cache_dir",
    "dovetail",
    "is_prefix_free",
    "k_upper",
    "kraft_total",
    "landauer_cost",
    "load_cache",
    "m_lower",
    "prefix_wrap_bound",
    "run_machine",
    "save_cache",
    "split_prefix",
    "structural_antichain",
    "wrap_prefix",
]
