"""Deterministic derivation of labeled RNG substreams from one master seed.

Every command and pipeline takes a single integer seed; independent
consumers (sampler, per-FoM trainers, per-iteration Monte Carlo, ...)
get their own stream via a stable hash of ``(seed, *labels)`` so adding
a consumer never shifts the draws of another.
"""

import hashlib


def substream(seed: int, *labels) -> int:
    """Derive a 63-bit child seed from a master seed and a label path.

    The same ``(seed, labels)`` pair always maps to the same child seed,
    on any platform. Labels may be strings or integers.
    """
    h = hashlib.sha256()
    h.update(str(int(seed)).encode("ascii"))
    for label in labels:
        h.update(b"/")
        h.update(str(label).encode("utf-8"))
    return int.from_bytes(h.digest()[:8], "big") >> 1
