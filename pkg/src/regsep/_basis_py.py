"""Backward coverability fixpoint, pure-Python implementation.

Kept line-for-line parallel to ``_basis.pyx`` so both backends take the same
number of steps and return the same basis.
"""

from collections import deque

NOP, INC, DEC, RESET = 0, 1, 2, 3


def _leq(a, b):
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def coverability_fixpoint(num_states, num_counters, edges, targets, init, stop_early=True):
    """Minimal basis of the configurations that can cover one of ``targets``.

    ``edges`` are (src, dst, counter, code) over int states; ``targets`` and
    ``init`` are (state, vector) pairs.  Returns (covered, steps, basis) where
    basis[q] is the antichain of minimal vectors for state q.
    """
    incoming = [[] for _ in range(num_states)]
    for src, dst, counter, code in edges:
        incoming[dst].append((src, counter, code))
    basis = [[] for _ in range(num_states)]
    init_state, init_vec = init
    work = deque()
    steps = 0

    def insert(q, vec):
        row = basis[q]
        for b in row:
            if _leq(b, vec):
                return False
        row[:] = [b for b in row if not _leq(vec, b)]
        row.append(vec)
        work.append((q, vec))
        return True

    for q, vec in targets:
        insert(q, tuple(vec))
    covered = any(_leq(b, init_vec) for b in basis[init_state])
    while work and not (covered and stop_early):
        q, vec = work.popleft()
        if vec not in basis[q]:
            continue  # superseded by a smaller vector
        steps += 1
        for src, counter, code in incoming[q]:
            if code == NOP:
                pre = vec
            elif code == INC:
                pre = vec[:counter] + (max(vec[counter] - 1, 0),) + vec[counter + 1:]
            elif code == DEC:
                pre = vec[:counter] + (vec[counter] + 1,) + vec[counter + 1:]
            else:
                if vec[counter] != 0:
                    continue
                pre = vec
            if insert(src, pre) and src == init_state and _leq(pre, init_vec):
                covered = True
    return covered, steps, basis
