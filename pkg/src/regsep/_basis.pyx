# cython: language_level=3, boundscheck=False, wraparound=False
"""Backward coverability fixpoint, compiled implementation.

Same algorithm and visiting order as ``_basis_py``; vectors live in flat C
int arrays while the fixpoint runs and are converted to tuples at the end.
"""

from libc.stdlib cimport malloc, free, realloc
from libc.string cimport memcpy

cdef enum:
    NOP = 0
    INC = 1
    DEC = 2
    RESET = 3


cdef struct Row:
    int *data      # count * n ints
    char *alive    # tombstones for removed vectors
    int count
    int cap


cdef inline bint leq(int *a, int *b, int n) nogil:
    cdef int i
    for i in range(n):
        if a[i] > b[i]:
            return False
    return True


cdef int row_push(Row *row, int *vec, int n) except -1:
    cdef int newcap
    if row.count == row.cap:
        newcap = row.cap * 2 if row.cap else 8
        row.data = <int *> realloc(row.data, newcap * max(n, 1) * sizeof(int))
        row.alive = <char *> realloc(row.alive, newcap * sizeof(char))
        if row.data == NULL or row.alive == NULL:
            raise MemoryError()
        row.cap = newcap
    if n:
        memcpy(row.data + row.count * n, vec, n * sizeof(int))
    row.alive[row.count] = 1
    row.count += 1
    return row.count - 1


cdef bint _insert(Row *rows, int q, int *vec, int n, list work_state, list work_idx) except -1:
    cdef Row *row = &rows[q]
    cdef int j, idx
    for j in range(row.count):
        if row.alive[j] and leq(row.data + j * n, vec, n):
            return False
    for j in range(row.count):
        if row.alive[j] and leq(vec, row.data + j * n, n):
            row.alive[j] = 0
    idx = row_push(row, vec, n)
    work_state.append(q)
    work_idx.append(idx)
    return True


def coverability_fixpoint(int num_states, int num_counters, edges, targets, init, bint stop_early=True):
    cdef int n = num_counters
    cdef int width = max(n, 1)
    cdef Row *rows = <Row *> malloc(max(num_states, 1) * sizeof(Row))
    cdef int i, j, q, src, counter, code, idx, head, steps = 0
    cdef int *vec
    cdef int *pre = <int *> malloc(width * sizeof(int))
    cdef int *init_vec = <int *> malloc(width * sizeof(int))
    cdef int init_state = init[0]
    cdef bint covered = False, dominated
    # work queue entries are (state, row index)
    work_state = []
    work_idx = []
    incoming = [[] for _ in range(num_states)]
    for e in edges:
        incoming[e[1]].append((e[0], e[2] if e[2] is not None else 0, e[3]))
    for i in range(num_states):
        rows[i].data = NULL
        rows[i].alive = NULL
        rows[i].count = 0
        rows[i].cap = 0
    for i in range(n):
        init_vec[i] = init[1][i]

    try:
        for q, t in targets:
            for i in range(n):
                pre[i] = t[i]
            if _insert(rows, q, pre, n, work_state, work_idx):
                if q == init_state and leq(pre, init_vec, n):
                    covered = True
        head = 0
        while head < len(work_state) and not (covered and stop_early):
            q = work_state[head]
            idx = work_idx[head]
            head += 1
            if not rows[q].alive[idx]:
                continue
            steps += 1
            vec = rows[q].data + idx * n
            for src, counter, code in incoming[q]:
                for i in range(n):
                    pre[i] = vec[i]
                if code == INC:
                    if pre[counter] > 0:
                        pre[counter] -= 1
                elif code == DEC:
                    pre[counter] += 1
                elif code == RESET:
                    if vec[counter] != 0:
                        continue
                if _insert(rows, src, pre, n, work_state, work_idx):
                    if src == init_state and leq(pre, init_vec, n):
                        covered = True
                # the row may have been reallocated by the insert
                vec = rows[q].data + idx * n
        basis = []
        for q in range(num_states):
            row_out = []
            for j in range(rows[q].count):
                if rows[q].alive[j]:
                    row_out.append(tuple(rows[q].data[j * n + i] for i in range(n)))
            basis.append(row_out)
        return covered, steps, basis
    finally:
        for i in range(num_states):
            free(rows[i].data)
            free(rows[i].alive)
        free(rows)
        free(pre)
        free(init_vec)
