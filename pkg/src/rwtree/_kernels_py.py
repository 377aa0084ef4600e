"""Pure-Python kernels: walk stepping and streaming cascade sums.

These are the fallback twins of the compiled kernels in ``_kernels_cy``.
Both implementations must produce bit-identical results; the compiled one is
only faster.  Signatures are shared (see ``kernels`` for selection).

Conventions:
  * ``values``/``cdf`` are the atom table of the A-law (cdf = running sum of
    probabilities, last entry 1.0); a uniform u picks the first i with
    u < cdf[i].
  * ``common`` selects whether the b children of a vertex share one A-draw.
  * ``env_key`` is the root vertex key, ``walk_key`` the walk stream key
    (see ``_bits``).
"""

BACKEND = "python"

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15
A_DRAW_SALT = 0xA4093822299F31D0
_INV_2_53 = 2.0 ** -53


def _mix64(z):
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & MASK64
    z ^= z >> 31
    return z


def _pick(values, cdf, n_atoms, u):
    i = 0
    while i < n_atoms - 1 and u >= cdf[i]:
        i += 1
    return values[i]


def _children_a(key, b, values, cdf, n_atoms, common, out):
    """Fill ``out`` with the A-values of the b children; return their sum."""
    s = 0.0
    if common:
        u = ((_mix64(key ^ A_DRAW_SALT)) >> 11) * _INV_2_53
        a = _pick(values, cdf, n_atoms, u)
        for i in range(b):
            out[i] = a
        return a * b
    for i in range(b):
        u = ((_mix64(key ^ ((A_DRAW_SALT + i) & MASK64))) >> 11) * _INV_2_53
        a = _pick(values, cdf, n_atoms, u)
        out[i] = a
        s += a
    return s


class _WalkState:
    """Current position of a walk: path, per-depth keys, cached child A-rows."""

    __slots__ = ("b", "values", "cdf", "n_atoms", "common",
                 "path", "keys", "arows", "asums")

    def __init__(self, b, values, cdf, common, env_key, start_path=()):
        self.b = b
        self.values = values
        self.cdf = cdf
        self.n_atoms = len(values)
        self.common = common
        self.path = []
        self.keys = [env_key]
        self.arows = []
        self.asums = []
        self._push_row()
        for idx in start_path:
            self.descend(idx)

    def _push_row(self):
        row = [0.0] * self.b
        s = _children_a(self.keys[-1], self.b, self.values, self.cdf,
                        self.n_atoms, self.common, row)
        self.arows.append(row)
        self.asums.append(s)

    def descend(self, idx):
        self.path.append(idx)
        self.keys.append(_mix64(self.keys[-1] ^ (idx + 1)))
        self._push_row()

    def ascend(self):
        self.path.pop()
        self.keys.pop()
        self.arows.pop()
        self.asums.pop()

    def depth(self):
        return len(self.path)

    def step(self, u):
        """Move to a uniformly-selected neighbour; u is uniform in [0,1)."""
        row = self.arows[-1]
        s = self.asums[-1]
        if not self.path:                       # at the root: children only
            v = u * s
        else:
            v = u * (1.0 + s)
            if v < 1.0:
                self.ascend()
                return
            v -= 1.0
        acc = 0.0
        last = self.b - 1
        for i in range(last):
            acc += row[i]
            if v < acc:
                self.descend(i)
                return
        self.descend(last)


def walk_stats(b, values, cdf, common, env_key, walk_key, n_steps,
               checkpoints):
    """Simulate ``n_steps`` steps from the root; record running statistics.

    Returns (max_depth_at_cp, returns_at_cp, final_depth, returns, max_depth)
    where the first two are lists aligned with ``checkpoints`` (a strictly
    increasing list of step counts <= n_steps).
    """
    st = _WalkState(b, values, cdf, common, env_key)
    n_cp = len(checkpoints)
    max_at_cp = [0] * n_cp
    ret_at_cp = [0] * n_cp
    cp_i = 0
    max_depth = 0
    returns = 0
    for t in range(1, n_steps + 1):
        u = ((_mix64((walk_key + t * GOLDEN) & MASK64)) >> 11) * _INV_2_53
        st.step(u)
        d = st.depth()
        if d > max_depth:
            max_depth = d
        if d == 0:
            returns += 1
        while cp_i < n_cp and t == checkpoints[cp_i]:
            max_at_cp[cp_i] = max_depth
            ret_at_cp[cp_i] = returns
            cp_i += 1
    return max_at_cp, ret_at_cp, st.depth(), returns, max_depth


def hitting_time(b, values, cdf, common, env_key, walk_key, level, cap):
    """First step at which the walk from the root reaches depth ``level``.

    Returns the step count, or -1 if not reached within ``cap`` steps.
    """
    st = _WalkState(b, values, cdf, common, env_key)
    for t in range(1, cap + 1):
        u = ((_mix64((walk_key + t * GOLDEN) & MASK64)) >> 11) * _INV_2_53
        st.step(u)
        if st.depth() == level:
            return t
    return -1


def first_return_time(b, values, cdf, common, env_key, walk_key, cap):
    """First step at which the walk revisits the root (-1 if censored)."""
    st = _WalkState(b, values, cdf, common, env_key)
    for t in range(1, cap + 1):
        u = ((_mix64((walk_key + t * GOLDEN) & MASK64)) >> 11) * _INV_2_53
        st.step(u)
        if st.depth() == 0:
            return t
    return -1


def passage_from_vertex(b, values, cdf, common, env_key, walk_key,
                        start_path, level, cap):
    """Walk from an interior vertex until depth ``level`` or its parent.

    Returns (outcome, steps): outcome 1 if depth ``level`` was reached first,
    0 if the parent of the start vertex was reached first, -1 if censored.
    """
    st = _WalkState(b, values, cdf, common, env_key, start_path)
    stop_up = len(start_path) - 1
    for t in range(1, cap + 1):
        u = ((_mix64((walk_key + t * GOLDEN) & MASK64)) >> 11) * _INV_2_53
        st.step(u)
        d = st.depth()
        if d == level:
            return 1, t
        if d == stop_up:
            return 0, t
    return -1, cap


def cascade_stream(b, values, cdf, common, root_key, depth):
    """Sum over all depth-``depth`` descendants of the products of A-values.

    Depth-first accumulation: memory O(depth), no materialization.  The DFS
    visits subtrees left to right so partial sums per root child are
    contiguous.
    """
    if depth <= 0:
        return 1.0
    n_atoms = len(values)
    keys = [0] * (depth + 1)
    prods = [0.0] * (depth + 1)
    nexti = [0] * depth
    arows = [[0.0] * b for _ in range(depth)]
    keys[0] = root_key
    prods[0] = 1.0
    _children_a(root_key, b, values, cdf, n_atoms, common, arows[0])
    total = 0.0
    d = 0
    while d >= 0:
        i = nexti[d]
        if i == b:
            d -= 1
            continue
        nexti[d] = i + 1
        p = prods[d] * arows[d][i]
        if d + 1 == depth:
            total += p
        else:
            k = _mix64(keys[d] ^ (i + 1))
            keys[d + 1] = k
            prods[d + 1] = p
            nexti[d + 1] = 0
            _children_a(k, b, values, cdf, n_atoms, common, arows[d + 1])
            d += 1
    return total
