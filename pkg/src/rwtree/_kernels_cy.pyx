# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: walk stepping and streaming cascade sums.

Bit-identical twin of ``_kernels_py`` (same key derivation, same float
operation order); see that module for the contracts.
"""

from libc.stdint cimport uint64_t, int64_t
from libc.stdlib cimport malloc, realloc, free

BACKEND = "cython"

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t A_DRAW_SALT = 0xA4093822299F31D0ULL
cdef double INV_2_53 = 1.0 / 9007199254740992.0


cdef inline uint64_t mix64(uint64_t z) nogil:
    z ^= z >> 30
    z *= 0xBF58476D1CE4E5B9ULL
    z ^= z >> 27
    z *= 0x94D049BB133111EBULL
    z ^= z >> 31
    return z


cdef inline double step_u(uint64_t walk_key, uint64_t t) nogil:
    return <double>(mix64(walk_key + t * GOLDEN) >> 11) * INV_2_53


cdef inline double pick(double* values, double* cdf, int n_atoms,
                        double u) nogil:
    cdef int i = 0
    while i < n_atoms - 1 and u >= cdf[i]:
        i += 1
    return values[i]


cdef inline double children_a(uint64_t key, int b, double* values,
                              double* cdf, int n_atoms, bint common,
                              double* out) nogil:
    cdef double s = 0.0
    cdef double a
    cdef double u
    cdef int i
    if common:
        u = <double>(mix64(key ^ A_DRAW_SALT) >> 11) * INV_2_53
        a = pick(values, cdf, n_atoms, u)
        for i in range(b):
            out[i] = a
        return a * b
    for i in range(b):
        u = <double>(mix64(key ^ (A_DRAW_SALT + <uint64_t>i)) >> 11) * INV_2_53
        a = pick(values, cdf, n_atoms, u)
        out[i] = a
        s += a
    return s


cdef struct WalkBuf:
    # growable per-depth stacks: key, child A-row (b doubles each), row sum
    uint64_t* keys
    double* arows
    double* asums
    int* path
    int cap
    int depth      # number of path entries; stacks hold depth+1 levels
    int b


cdef int wb_init(WalkBuf* w, int b, int cap) nogil:
    w.b = b
    w.cap = cap
    w.depth = 0
    w.keys = <uint64_t*>malloc(cap * sizeof(uint64_t))
    w.arows = <double*>malloc(cap * b * sizeof(double))
    w.asums = <double*>malloc(cap * sizeof(double))
    w.path = <int*>malloc(cap * sizeof(int))
    if w.keys == NULL or w.arows == NULL or w.asums == NULL or w.path == NULL:
        return -1
    return 0


cdef int wb_grow(WalkBuf* w) nogil:
    cdef int ncap = w.cap * 2
    w.keys = <uint64_t*>realloc(w.keys, ncap * sizeof(uint64_t))
    w.arows = <double*>realloc(w.arows, ncap * w.b * sizeof(double))
    w.asums = <double*>realloc(w.asums, ncap * sizeof(double))
    w.path = <int*>realloc(w.path, ncap * sizeof(int))
    if w.keys == NULL or w.arows == NULL or w.asums == NULL or w.path == NULL:
        return -1
    w.cap = ncap
    return 0


cdef void wb_free(WalkBuf* w) nogil:
    free(w.keys)
    free(w.arows)
    free(w.asums)
    free(w.path)


cdef int wb_push(WalkBuf* w, uint64_t key, double* values, double* cdf,
                 int n_atoms, bint common) nogil:
    # install level w.depth with the given key and its children A-row
    if w.depth + 1 >= w.cap:
        if wb_grow(w) != 0:
            return -1
    w.keys[w.depth] = key
    w.asums[w.depth] = children_a(key, w.b, values, cdf, n_atoms, common,
                                  w.arows + w.depth * w.b)
    return 0


cdef inline int wb_step(WalkBuf* w, double u, double* values, double* cdf,
                        int n_atoms, bint common) nogil:
    # returns new depth, or -1 on allocation failure
    cdef double* row = w.arows + w.depth * w.b
    cdef double s = w.asums[w.depth]
    cdef double v
    cdef double acc
    cdef int i
    cdef int child = -1
    if w.depth == 0:
        v = u * s
    else:
        v = u * (1.0 + s)
        if v < 1.0:
            w.depth -= 1
            return w.depth
        v -= 1.0
    acc = 0.0
    for i in range(w.b - 1):
        acc += row[i]
        if v < acc:
            child = i
            break
    if child < 0:
        child = w.b - 1
    w.path[w.depth] = child
    cdef uint64_t k = mix64(w.keys[w.depth] ^ <uint64_t>(child + 1))
    w.depth += 1
    if wb_push(w, k, values, cdf, n_atoms, common) != 0:
        return -1
    return w.depth


def walk_stats(int b, double[::1] values, double[::1] cdf, bint common,
               unsigned long long env_key, unsigned long long walk_key,
               long long n_steps, long long[::1] checkpoints):
    """See ``_kernels_py.walk_stats``."""
    cdef int n_atoms = values.shape[0]
    cdef int n_cp = checkpoints.shape[0]
    cdef WalkBuf w
    if wb_init(&w, b, 256) != 0:
        raise MemoryError()
    cdef list max_at_cp = [0] * n_cp
    cdef list ret_at_cp = [0] * n_cp
    cdef int64_t* mcp = <int64_t*>malloc(max(n_cp, 1) * sizeof(int64_t))
    cdef int64_t* rcp = <int64_t*>malloc(max(n_cp, 1) * sizeof(int64_t))
    if mcp == NULL or rcp == NULL:
        wb_free(&w)
        free(mcp)
        free(rcp)
        raise MemoryError()
    cdef int64_t max_depth = 0
    cdef int64_t returns = 0
    cdef int cp_i = 0
    cdef int64_t t
    cdef int d
    cdef int fail = 0
    with nogil:
        if wb_push(&w, env_key, &values[0], &cdf[0], n_atoms, common) != 0:
            fail = 1
        else:
            for t in range(1, n_steps + 1):
                d = wb_step(&w, step_u(walk_key, <uint64_t>t), &values[0],
                            &cdf[0], n_atoms, common)
                if d < 0:
                    fail = 1
                    break
                if d > max_depth:
                    max_depth = d
                if d == 0:
                    returns += 1
                while cp_i < n_cp and t == checkpoints[cp_i]:
                    mcp[cp_i] = max_depth
                    rcp[cp_i] = returns
                    cp_i += 1
    cdef int final_depth = w.depth
    wb_free(&w)
    if fail:
        free(mcp)
        free(rcp)
        raise MemoryError()
    for cp_i in range(n_cp):
        max_at_cp[cp_i] = mcp[cp_i]
        ret_at_cp[cp_i] = rcp[cp_i]
    free(mcp)
    free(rcp)
    return max_at_cp, ret_at_cp, final_depth, returns, max_depth


def hitting_time(int b, double[::1] values, double[::1] cdf, bint common,
                 unsigned long long env_key, unsigned long long walk_key,
                 long long level, long long cap):
    """See ``_kernels_py.hitting_time``."""
    cdef int n_atoms = values.shape[0]
    cdef WalkBuf w
    if wb_init(&w, b, 256) != 0:
        raise MemoryError()
    cdef int64_t t
    cdef int64_t hit = -1
    cdef int d
    cdef int fail = 0
    with nogil:
        if wb_push(&w, env_key, &values[0], &cdf[0], n_atoms, common) != 0:
            fail = 1
        else:
            for t in range(1, cap + 1):
                d = wb_step(&w, step_u(walk_key, <uint64_t>t), &values[0],
                            &cdf[0], n_atoms, common)
                if d < 0:
                    fail = 1
                    break
                if d == level:
                    hit = t
                    break
    wb_free(&w)
    if fail:
        raise MemoryError()
    return hit


def first_return_time(int b, double[::1] values, double[::1] cdf, bint common,
                      unsigned long long env_key, unsigned long long walk_key,
                      long long cap):
    """See ``_kernels_py.first_return_time``."""
    cdef int n_atoms = values.shape[0]
    cdef WalkBuf w
    if wb_init(&w, b, 256) != 0:
        raise MemoryError()
    cdef int64_t t
    cdef int64_t hit = -1
    cdef int d
    cdef int fail = 0
    with nogil:
        if wb_push(&w, env_key, &values[0], &cdf[0], n_atoms, common) != 0:
            fail = 1
        else:
            for t in range(1, cap + 1):
                d = wb_step(&w, step_u(walk_key, <uint64_t>t), &values[0],
                            &cdf[0], n_atoms, common)
                if d < 0:
                    fail = 1
                    break
                if d == 0:
                    hit = t
                    break
    wb_free(&w)
    if fail:
        raise MemoryError()
    return hit


def passage_from_vertex(int b, double[::1] values, double[::1] cdf,
                        bint common, unsigned long long env_key,
                        unsigned long long walk_key, start_path,
                        long long level, long long cap):
    """See ``_kernels_py.passage_from_vertex``."""
    cdef int n_atoms = values.shape[0]
    cdef WalkBuf w
    if wb_init(&w, b, 256) != 0:
        raise MemoryError()
    cdef int fail = 0
    cdef uint64_t k = env_key
    if wb_push(&w, k, &values[0], &cdf[0], n_atoms, common) != 0:
        wb_free(&w)
        raise MemoryError()
    cdef int idx
    for idx in start_path:
        w.path[w.depth] = idx
        k = mix64(w.keys[w.depth] ^ <uint64_t>(idx + 1))
        w.depth += 1
        if wb_push(&w, k, &values[0], &cdf[0], n_atoms, common) != 0:
            wb_free(&w)
            raise MemoryError()
    cdef int stop_up = len(start_path) - 1
    cdef int64_t t
    cdef int outcome = -1
    cdef int64_t steps = cap
    cdef int d
    with nogil:
        for t in range(1, cap + 1):
            d = wb_step(&w, step_u(walk_key, <uint64_t>t), &values[0],
                        &cdf[0], n_atoms, common)
            if d < 0:
                fail = 1
                break
            if d == level:
                outcome = 1
                steps = t
                break
            if d == stop_up:
                outcome = 0
                steps = t
                break
    wb_free(&w)
    if fail:
        raise MemoryError()
    return outcome, steps


def cascade_stream(int b, double[::1] values, double[::1] cdf, bint common,
                   unsigned long long root_key, int depth):
    """See ``_kernels_py.cascade_stream``."""
    if depth <= 0:
        return 1.0
    cdef int n_atoms = values.shape[0]
    cdef uint64_t* keys = <uint64_t*>malloc((depth + 1) * sizeof(uint64_t))
    cdef double* prods = <double*>malloc((depth + 1) * sizeof(double))
    cdef int* nexti = <int*>malloc(depth * sizeof(int))
    cdef double* arows = <double*>malloc(depth * b * sizeof(double))
    if keys == NULL or prods == NULL or nexti == NULL or arows == NULL:
        free(keys)
        free(prods)
        free(nexti)
        free(arows)
        raise MemoryError()
    cdef double total = 0.0
    cdef int d = 0
    cdef int i
    cdef double p
    cdef uint64_t k
    with nogil:
        keys[0] = root_key
        prods[0] = 1.0
        nexti[0] = 0
        children_a(root_key, b, &values[0], &cdf[0], n_atoms, common, arows)
        while d >= 0:
            i = nexti[d]
            if i == b:
                d -= 1
                continue
            nexti[d] = i + 1
            p = prods[d] * arows[d * b + i]
            if d + 1 == depth:
                total += p
            else:
                k = mix64(keys[d] ^ <uint64_t>(i + 1))
                keys[d + 1] = k
                prods[d + 1] = p
                nexti[d + 1] = 0
                children_a(k, b, &values[0], &cdf[0], n_atoms, common,
                           arows + (d + 1) * b)
                d += 1
    free(keys)
    free(prods)
    free(nexti)
    free(arows)
    return total
