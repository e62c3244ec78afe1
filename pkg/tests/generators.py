"""Random instance generators shared by the sweeps."""

from repacking.core import Instance
from repacking.smallitems import PreconditionStatus, check_preconditions


def random_pow2_instance(rng, n_range=(2, 5), caps=(8, 16), sizes=(1, 2, 4, 8), fill=3):
    while True:
        n = rng.randint(*n_range)
        cap = rng.choice(caps)
        items = [rng.choice(sizes) for _ in range(rng.randint(0, fill * n))]
        items = [x for x in items if x <= cap]

        def pack():
            bunches = [[] for _ in range(n)]
            for x in items:
                opts = [b for b in bunches if sum(b) + x <= cap]
                if not opts:
                    return None
                rng.choice(opts).append(x)
            return bunches

        s, t = pack(), pack()
        if s is not None and t is not None:
            return Instance(cap, s, t)


def small_instance(rng, capacity, alpha):
    while True:
        n = rng.randint(3, 14)
        top = capacity // alpha
        items = [rng.randint(1, top) for _ in range(rng.randint(0, 3 * n))]

        def pack():
            bunches = [[] for _ in range(n)]
            for x in items:
                opts = [b for b in bunches if sum(b) + x <= capacity]
                if not opts:
                    return None
                rng.choice(opts).append(x)
            return bunches

        s, t = pack(), pack()
        if s is None or t is None:
            continue
        inst = Instance(capacity, s, t)
        if check_preconditions(inst, alpha) is PreconditionStatus.OK:
            return inst


def tight_pow2_instance(rng, n_range=(2, 5), caps=(8, 16), sizes=(1, 2, 4, 8)):
    """Nearly full bunches; the target swaps equal-sum groups between bunches."""
    while True:
        inst = _tight_pow2_attempt(rng, n_range, caps, sizes)
        if inst.source != inst.target:
            return inst


def _tight_pow2_attempt(rng, n_range, caps, sizes):
    n = rng.randint(*n_range)
    cap = rng.choice(caps)
    source = []
    for _ in range(n):
        room = cap - rng.choice([0, 0, 1, 2, 4])
        b = []
        while room:
            x = rng.choice([s for s in sizes if s <= min(room, cap // 2)] or [1])
            b.append(x)
            room -= x
        source.append(b)
    target = [list(b) for b in source]
    for _ in range(rng.randint(1, 4)):
        i, j = rng.sample(range(n), 2)
        if not target[i]:
            continue
        x = rng.choice(target[i])
        # powers of two: greedy largest-first finds a group of sum x when one exists
        group, need = [], x
        for y in sorted(target[j], reverse=True):
            if y <= need and y != x:
                group.append(y)
                need -= y
        if need:
            continue
        target[i].remove(x)
        target[j].append(x)
        for y in group:
            target[j].remove(y)
            target[i].append(y)
    return Instance(cap, source, target)
