"""Counter-based random streams keyed by (seed, stream index).

Every Monte Carlo loop in pfrkit is split into fixed-size blocks; block ``b``
always draws from ``substream(seed, b)``. Blocks can therefore be evaluated in
any order, or in parallel, and still give identical results.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, TypeVar

import numpy as np

from ..core.errors import DomainError

T = TypeVar("T")

_KEY_MASK = (1 << 128) - 1


def substream(seed: int, index: int) -> np.random.Generator:
    """Return the generator for stream ``index`` under ``seed``.

    The stream index occupies the most significant word of the Philox counter,
    which keeps streams 2**192 draws apart.
    """
    if seed < 0 or index < 0:
        raise DomainError(f"seed and stream index must be nonnegative (got {seed}, {index})")
    bit_generator = np.random.Philox(key=seed & _KEY_MASK, counter=[0, 0, 0, index])
    return np.random.Generator(bit_generator)


def block_sizes(total: int, block_size: int) -> List[int]:
    """Split ``total`` draws into blocks of at most ``block_size``."""
    if block_size < 1:
        raise DomainError("block_size must be positive")
    full, rest = divmod(total, block_size)
    return [block_size] * full + ([rest] if rest else [])


def map_blocks(
    func: Callable[[int, int], T],
    total: int,
    block_size: int,
    workers: int = 1,
) -> List[T]:
    """Apply ``func(block_index, block_len)`` to every block, results in block order."""
    sizes = block_sizes(total, block_size)
    if workers <= 1 or len(sizes) <= 1:
        return [func(i, n) for i, n in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, range(len(sizes)), sizes))
