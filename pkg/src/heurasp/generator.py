"""Feasible-by-construction bin-packing instance generator.

Each bin's capacity is randomly partitioned into item sizes that sum to
exactly the capacity, so every generated instance is perfectly packable.
"""

from __future__ import annotations

import random

from .errors import ArgsError


def packable_instance(items, cap, bins, seed=0):
    """Instance text with facts bcap/1, bin/1, item/1, size/2.

    The `items` sizes partition `bins` * `cap` exactly; deterministic per
    seed."""
    if items < 1 or cap < 1 or bins < 1:
        raise ArgsError("items, cap, and bins must all be at least 1")
    if items < bins:
        raise ArgsError(f"cannot spread {items} items over {bins} bins "
                        f"(every bin must receive at least one)")
    if items > bins * cap:
        raise ArgsError(f"{items} items of size >= 1 cannot fit in "
                        f"{bins} bins of capacity {cap}")
    rng = random.Random(seed)

    counts = [1] * bins
    for _ in range(items - bins):
        candidates = [i for i in range(bins) if counts[i] < cap]
        counts[candidates[rng.randrange(len(candidates))]] += 1

    sizes = []
    for count in counts:
        if count == 1:
            sizes.append(cap)
            continue
        cuts = sorted(rng.sample(range(1, cap), count - 1))
        previous = 0
        for cut in cuts:
            sizes.append(cut - previous)
            previous = cut
        sizes.append(cap - previous)

    lines = [f"% generated bin-packing instance: {items} items, "
             f"{bins} bins of capacity {cap} (seed {seed})",
             f"bcap({cap}).",
             f"bin(1..{bins}).",
             f"item(1..{items})."]
    for i, size in enumerate(sizes, start=1):
        lines.append(f"size({i},{size}).")
    return "\n".join(lines) + "\n"
