"""Compiled inner loops: cluster labelling, subset enumeration, profile DP, B&B.

Everything here works on plain integer arrays; the public modules own the
types and the validation.  Set bits in ``uint64`` masks index vertices of a
cluster in increasing vertex-id order ("local" indices).
"""
import numpy as np
from numba import njit

INF = 1 << 30


@njit(cache=True)
def popcount64(x):
    x = np.uint64(x)
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return np.int64((x * np.uint64(0x0101010101010101)) >> np.uint64(56))


@njit(cache=True)
def _find(parent, a):
    root = a
    while parent[root] != root:
        root = parent[root]
    while parent[a] != root:
        nxt = parent[a]
        parent[a] = root
        a = nxt
    return root


@njit(cache=True)
def cluster_labels(n_vertices, ends, bits):
    """Label every vertex by the smallest vertex id of its open cluster."""
    parent = np.arange(n_vertices)
    for e in range(ends.shape[0]):
        if bits[e]:
            ra = _find(parent, ends[e, 0])
            rb = _find(parent, ends[e, 1])
            if ra < rb:
                parent[rb] = ra
            elif rb < ra:
                parent[ra] = rb
    labels = np.empty(n_vertices, dtype=np.int64)
    for v in range(n_vertices):
        labels[v] = _find(parent, v)
    return labels


@njit(cache=True)
def giant_label(labels):
    """Label of the largest cluster; ties go to the smallest contained vertex."""
    sizes = np.zeros(labels.shape[0], dtype=np.int64)
    for v in range(labels.shape[0]):
        sizes[labels[v]] += 1
    best = 0
    for v in range(labels.shape[0]):
        if sizes[v] > sizes[best]:
            best = v
    return best, sizes[best]


@njit(cache=True)
def flip_giants(n_vertices, ends, bits, giant_mask):
    """For every edge e: size of the giant of omega^e and |C(omega) symdiff C(omega^e)|."""
    m = ends.shape[0]
    sizes = np.empty(m, dtype=np.int64)
    symdiff = np.empty(m, dtype=np.int64)
    work = bits.copy()
    for e in range(m):
        work[e] = 1 - work[e]
        labels = cluster_labels(n_vertices, ends, work)
        g, size = giant_label(labels)
        diff = 0
        for v in range(n_vertices):
            if (labels[v] == g) != giant_mask[v]:
                diff += 1
        sizes[e] = size
        symdiff[e] = diff
        work[e] = 1 - work[e]
    return sizes, symdiff


# ---------------------------------------------------------------------------
# exhaustive enumeration


@njit(cache=True)
def brute_profile(adj, deg, c, K):
    """Minimum boundary of every subset size 0..K of a c-vertex graph.

    Walks all 2^c subsets in Gray-code order.  Returns ``(best, witness)``
    where ``witness[k]`` is the lexicographically smallest mask of size k
    attaining ``best[k]``.
    """
    best = np.full(K + 1, INF, dtype=np.int64)
    witness = np.zeros(K + 1, dtype=np.uint64)
    best[0] = 0
    mask = np.uint64(0)
    b = 0
    size = 0
    total = np.uint64(1) << np.uint64(c)
    i = np.uint64(1)
    while i < total:
        v = 0
        while ((i >> np.uint64(v)) & np.uint64(1)) == 0:
            v += 1
        bit = np.uint64(1) << np.uint64(v)
        cnt = popcount64(adj[v] & mask)
        if mask & bit:
            mask ^= bit
            b -= deg[v] - 2 * cnt
            size -= 1
        else:
            mask ^= bit
            b += deg[v] - 2 * cnt
            size += 1
        if size <= K:
            if b < best[size]:
                best[size] = b
                witness[size] = mask
            elif b == best[size]:
                diff = mask ^ witness[size]
                low = diff & (~diff + np.uint64(1))
                if mask & low:
                    witness[size] = mask
        i += np.uint64(1)
    return best, witness


# ---------------------------------------------------------------------------
# transfer-matrix (profile) dynamic programme


@njit(cache=True)
def _choose_cut(d, n, coords, ends, bits, status):
    """Sweep axis and starting slice minimising the number of pinned vertices."""
    best_count = 1 << 62
    best_axis = 0
    best_off = 0
    counts = np.zeros(n, dtype=np.int64)
    V = coords.shape[0]
    for a in range(d):
        counts[:] = 0
        for v in range(V):
            e = v * d + a
            w = ends[e, 1]
            if bits[e] and status[w] == 2:
                counts[coords[w, a]] += 1
        for o in range(n):
            if counts[o] < best_count:
                best_count = counts[o]
                best_axis = a
                best_off = o
    return best_axis, best_off


@njit(cache=True)
def profile_dp(d, n, coords, ends, bits, status, K):
    """Minimum open-edge boundary of every labelled set of size 0..K.

    ``status[v]`` is 0 (label forced 0), 1 (forced 1) or 2 (free).  The torus
    is swept slice by slice along one axis; the state is the label vector of
    the last ``m = n^(d-1)`` sites, and the labels of first-slice sites that
    own an open wrap-around edge are fixed by an outer enumeration.
    """
    V = coords.shape[0]
    m = V // n
    a, off = _choose_cut(d, n, coords, ends, bits, status)

    pos = np.empty(V, dtype=np.int64)
    for v in range(V):
        r = 0
        mult = 1
        for i in range(d):
            if i != a:
                r += coords[v, i] * mult
                mult *= n
        s = (coords[v, a] - off) % n
        pos[v] = s * m + r

    st = np.empty(V, dtype=np.int64)
    for v in range(V):
        st[pos[v]] = status[v]

    nbmask = np.zeros(V, dtype=np.int64)
    wrap_first = np.empty(V, dtype=np.int64)
    wrap_last = np.empty(V, dtype=np.int64)
    n_wrap = 0
    base = 0
    for e in range(ends.shape[0]):
        if not bits[e]:
            continue
        u = ends[e, 0]
        w = ends[e, 1]
        if status[u] == 0 and status[w] == 0:
            continue
        pu = pos[u]
        pw = pos[w]
        if (e % d) == a and pw < m and pu >= V - m:
            wrap_first[n_wrap] = pw
            wrap_last[n_wrap] = pu
            n_wrap += 1
            continue
        if status[u] != 2 and status[w] != 2:
            if status[u] != status[w]:
                base += 1
            continue
        hi = max(pu, pw)
        j = abs(pu - pw)
        nbmask[hi] |= 1 << (m - j)

    pins = np.empty(n_wrap, dtype=np.int64)
    n_pins = 0
    for i in range(n_wrap):
        p = wrap_first[i]
        if st[p] == 2:
            seen = False
            for q in range(n_pins):
                if pins[q] == p:
                    seen = True
            if not seen:
                pins[n_pins] = p
                n_pins += 1

    S = 1 << m
    cur = np.empty((S, K + 1), dtype=np.int64)
    nxt = np.empty((S, K + 1), dtype=np.int64)
    alive = np.zeros(S, dtype=np.bool_)
    alive_n = np.zeros(S, dtype=np.bool_)
    best = np.full(K + 1, INF, dtype=np.int64)
    top = 1 << (m - 1)
    lab = st.copy()

    for assign in range(1 << n_pins):
        for i in range(n_pins):
            lab[pins[i]] = (assign >> i) & 1
        cur[:, :] = INF
        alive[:] = False
        cur[0, 0] = 0
        alive[0] = True
        for t in range(V):
            nxt[:, :] = INF
            alive_n[:] = False
            mask = nbmask[t]
            dg = popcount64(mask)
            allow0 = lab[t] != 1
            allow1 = lab[t] != 0
            for s in range(S):
                if not alive[s]:
                    continue
                c0 = popcount64(s & mask)
                c1 = dg - c0
                ns0 = s >> 1
                ns1 = ns0 | top
                for k in range(K + 1):
                    c = cur[s, k]
                    if c >= INF:
                        continue
                    if allow0:
                        val = c + c0
                        if val < nxt[ns0, k]:
                            nxt[ns0, k] = val
                            alive_n[ns0] = True
                    if allow1 and k < K:
                        val = c + c1
                        if val < nxt[ns1, k + 1]:
                            nxt[ns1, k + 1] = val
                            alive_n[ns1] = True
            cur, nxt = nxt, cur
            alive, alive_n = alive_n, alive
        for s in range(S):
            if not alive[s]:
                continue
            w = base
            for i in range(n_wrap):
                last = (s >> (wrap_last[i] - (V - m))) & 1
                if last != lab[wrap_first[i]]:
                    w += 1
            for k in range(K + 1):
                if cur[s, k] < INF and cur[s, k] + w < best[k]:
                    best[k] = cur[s, k] + w
    return best


# ---------------------------------------------------------------------------
# branch and bound over connected induced subsets


@njit(cache=True)
def _better_than(bnd_lo, k, tmax, dmax, ex, num, den, strict):
    """True if some extension size t in [k, tmax] might beat num/den."""
    for t in range(k, tmax + 1):
        lb = bnd_lo - dmax * (t - k)
        if lb < ex:
            lb = ex
        if lb < 1:
            lb = 1
        if strict:
            if lb * den < num * t:
                return True
        else:
            if lb * den <= num * t:
                return True
    return False


@njit(cache=True)
def _iso_better(bnd_lo, k, tmax, dmax, ex, gamma, target):
    for t in range(k, tmax + 1):
        lb = bnd_lo - dmax * (t - k)
        if lb < ex:
            lb = ex
        if lb < 1:
            lb = 1
        if lb / t ** gamma < target:
            return True
    return False


@njit(cache=True)
def connected_search(adj, deg, c, K, mode, num, den, gamma, fval, budget, out):
    """Depth-first enumeration of connected vertex sets with pruning.

    mode 0: minimise boundary/size; starts from the bound ``num/den``.
    mode 1: record into ``out`` every set whose ratio equals ``num/den``.
    mode 2: minimise boundary/size**gamma; starts from ``fval``.
    Returns ``(num, den, fval, best_mask, n_out, nodes)``; ``nodes < 0``
    signals an exhausted budget or a full ``out`` buffer.
    """
    dmax = 0
    for v in range(c):
        if deg[v] > dmax:
            dmax = deg[v]
    one = np.uint64(1)
    best_mask = np.uint64(0)
    n_out = 0
    nodes = 0
    depth_cap = c + 2
    sS = np.zeros(depth_cap, dtype=np.uint64)
    sX = np.zeros(depth_cap, dtype=np.uint64)
    sF = np.zeros(depth_cap, dtype=np.uint64)
    sk = np.zeros(depth_cap, dtype=np.int64)
    sb = np.zeros(depth_cap, dtype=np.int64)
    sex = np.zeros(depth_cap, dtype=np.int64)
    sstage = np.zeros(depth_cap, dtype=np.int64)
    sv = np.zeros(depth_cap, dtype=np.int64)
    for r in range(c):
        rbit = one << np.uint64(r)
        X0 = rbit - one
        top = 0
        sS[0] = rbit
        sX[0] = X0
        sF[0] = adj[r] & ~X0
        sk[0] = 1
        sb[0] = deg[r]
        sex[0] = popcount64(adj[r] & X0)
        sstage[0] = 0
        # evaluate the root
        k = 1
        b = deg[r]
        if k <= K:
            if mode == 0:
                if b * den < num * k:
                    num = b
                    den = k
                    best_mask = rbit
            elif mode == 1:
                if b * den == num * k:
                    if n_out >= out.shape[0]:
                        return num, den, fval, best_mask, n_out, -1
                    out[n_out] = rbit
                    n_out += 1
            else:
                val = b / k ** gamma
                if val < fval:
                    fval = val
                    best_mask = rbit
        while top >= 0:
            nodes += 1
            if budget > 0 and nodes > budget:
                return num, den, fval, best_mask, n_out, -1
            S = sS[top]
            X = sX[top]
            F = sF[top]
            k = sk[top]
            b = sb[top]
            ex = sex[top]
            stage = sstage[top]
            if stage == 0:
                if k >= K or F == 0:
                    top -= 1
                    continue
                avail = c - popcount64(S | X)
                tmax = k + avail
                if tmax > K:
                    tmax = K
                if mode == 0:
                    ok = _better_than(b, k, tmax, dmax, ex, num, den, True)
                elif mode == 1:
                    ok = _better_than(b, k, tmax, dmax, ex, num, den, False)
                else:
                    ok = _iso_better(b, k, tmax, dmax, ex, gamma, fval)
                if not ok:
                    top -= 1
                    continue
                v = 0
                while ((F >> np.uint64(v)) & one) == 0:
                    v += 1
                sv[top] = v
                sstage[top] = 1
                vbit = one << np.uint64(v)
                cnt = popcount64(adj[v] & S)
                S2 = S | vbit
                k2 = k + 1
                b2 = b + deg[v] - 2 * cnt
                ex2 = ex + popcount64(adj[v] & X)
                F2 = (F | adj[v]) & ~S2 & ~X
                if mode == 0:
                    if k2 <= K and b2 * den < num * k2:
                        num = b2
                        den = k2
                        best_mask = S2
                elif mode == 1:
                    if k2 <= K and b2 * den == num * k2:
                        if n_out >= out.shape[0]:
                            return num, den, fval, best_mask, n_out, -1
                        out[n_out] = S2
                        n_out += 1
                else:
                    if k2 <= K:
                        val = b2 / k2 ** gamma
                        if val < fval:
                            fval = val
                            best_mask = S2
                top += 1
                sS[top] = S2
                sX[top] = X
                sF[top] = F2
                sk[top] = k2
                sb[top] = b2
                sex[top] = ex2
                sstage[top] = 0
            elif stage == 1:
                v = sv[top]
                vbit = one << np.uint64(v)
                sstage[top] = 2
                top += 1
                sS[top] = S
                sX[top] = X | vbit
                sF[top] = F & ~vbit
                sk[top] = k
                sb[top] = b
                sex[top] = ex + popcount64(adj[v] & S)
                sstage[top] = 0
            else:
                top -= 1
    return num, den, fval, best_mask, n_out, nodes
