# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of the pure Python search kernel.

Statement-for-statement port of ``_pysearch``; see that module for the
algorithm description.  Must stay behaviorally identical: the parity
test suite compares both kernels on random instances.
"""

from libc.stdlib cimport free, malloc

cdef int INF = 1 << 30

ST_OK = 0
ST_NOMATCH = 1
ST_BUDGET = 2

MODE_COST = 0
MODE_LEX = 1
MODE_COUNT = 2


cdef int* _ints(object xs) except NULL:
    cdef Py_ssize_t n = len(xs)
    cdef int* p = <int*> malloc((n if n > 0 else 1) * sizeof(int))
    if p == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(n):
        p[i] = xs[i]
    return p


cdef long long* _lls(object xs) except NULL:
    cdef Py_ssize_t n = len(xs)
    cdef long long* p = <long long*> malloc((n if n > 0 else 1) * sizeof(long long))
    if p == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(n):
        p[i] = xs[i]
    return p


cdef class _Ctx:
    cdef int np, nh, ep, eh, nb, nl, mode, cstar
    cdef long long budget, expansions
    cdef int* cand_off
    cdef int* cand_flat
    cdef int* ncost
    cdef int* snmin
    cdef int* pe_src
    cdef int* pe_tgt
    cdef int* pe_lab
    cdef int* semin
    cdef int* ecost
    cdef long long* bkeys
    cdef int* boff
    cdef int* bedges
    cdef int* adj_off
    cdef int* adj_edge
    cdef int* adj_other
    cdef int* order
    cdef int* node_map
    cdef char* used
    cdef int* bucket_used
    cdef int* fin_stack
    cdef int fin_top
    cdef int* leaf_head
    cdef int* leaf_next
    cdef int* leaf_emap
    cdef int* grp_pedges
    cdef int* grp_mins
    cdef int* grp_suffix
    cdef int* grp_pick
    cdef char* grp_taken
    cdef int grp_b, grp_k, grp_best, grp_want
    cdef int* grp_best_pick
    cdef int best, count_found, budget_hit, out_found
    cdef int* out_nmap
    cdef int* out_emap

    def __cinit__(self, inst, int mode, long long budget, int cstar):
        self.np = inst.np
        self.nh = inst.nh
        self.ep = inst.ep
        self.eh = inst.eh
        self.nl = inst.n_labels
        self.nb = len(inst.bucket_keys)
        self.mode = mode
        self.budget = budget
        self.cstar = cstar
        self.expansions = 0
        self.fin_top = 0
        self.best = INF
        self.count_found = 0
        self.budget_hit = 0
        self.out_found = 0
        self.cand_off = _ints(inst.cand_off)
        self.cand_flat = _ints(inst.cand_flat)
        self.ncost = _ints(inst.ncost_flat)
        self.snmin = _ints(inst.static_node_min)
        self.pe_src = _ints(inst.pe_src)
        self.pe_tgt = _ints(inst.pe_tgt)
        self.pe_lab = _ints(inst.pe_lab)
        self.semin = _ints(inst.static_edge_min)
        self.ecost = _ints(inst.ecost_flat)
        self.bkeys = _lls(inst.bucket_keys)
        self.boff = _ints(inst.bucket_off)
        self.bedges = _ints(inst.bucket_edges)
        self.adj_off = _ints(inst.adj_off)
        self.adj_edge = _ints(inst.adj_edge)
        self.adj_other = _ints(inst.adj_other)
        if mode == MODE_COST:
            self.order = _ints(inst.order1)
        else:
            self.order = _ints(list(range(self.np)))
        self.node_map = _ints([-1] * self.np)
        self.used = <char*> malloc(self.nh if self.nh > 0 else 1)
        self.bucket_used = _ints([0] * self.nb)
        self.fin_stack = <int*> malloc((self.ep if self.ep > 0 else 1) * sizeof(int))
        self.leaf_head = <int*> malloc((self.nb if self.nb > 0 else 1) * sizeof(int))
        self.leaf_next = <int*> malloc((self.ep if self.ep > 0 else 1) * sizeof(int))
        self.leaf_emap = <int*> malloc((self.ep if self.ep > 0 else 1) * sizeof(int))
        self.grp_pedges = <int*> malloc((self.ep if self.ep > 0 else 1) * sizeof(int))
        self.grp_mins = <int*> malloc((self.ep if self.ep > 0 else 1) * sizeof(int))
        self.grp_suffix = <int*> malloc((self.ep + 1) * sizeof(int))
        self.grp_pick = <int*> malloc((self.ep if self.ep > 0 else 1) * sizeof(int))
        self.grp_best_pick = <int*> malloc((self.ep if self.ep > 0 else 1) * sizeof(int))
        self.grp_taken = <char*> malloc(self.eh if self.eh > 0 else 1)
        self.out_nmap = <int*> malloc((self.np if self.np > 0 else 1) * sizeof(int))
        self.out_emap = <int*> malloc((self.ep if self.ep > 0 else 1) * sizeof(int))
        if (self.used == NULL or self.fin_stack == NULL or self.leaf_head == NULL
                or self.leaf_next == NULL or self.leaf_emap == NULL
                or self.grp_pedges == NULL or self.grp_mins == NULL
                or self.grp_suffix == NULL or self.grp_pick == NULL
                or self.grp_best_pick == NULL or self.grp_taken == NULL
                or self.out_nmap == NULL or self.out_emap == NULL):
            raise MemoryError()
        cdef int i
        for i in range(self.nh):
            self.used[i] = 0

    def __dealloc__(self):
        free(self.cand_off); free(self.cand_flat); free(self.ncost); free(self.snmin)
        free(self.pe_src); free(self.pe_tgt); free(self.pe_lab); free(self.semin)
        free(self.ecost); free(self.bkeys); free(self.boff); free(self.bedges)
        free(self.adj_off); free(self.adj_edge); free(self.adj_other); free(self.order)
        free(self.node_map); free(self.used); free(self.bucket_used); free(self.fin_stack)
        free(self.leaf_head); free(self.leaf_next); free(self.leaf_emap)
        free(self.grp_pedges); free(self.grp_mins); free(self.grp_suffix)
        free(self.grp_pick); free(self.grp_best_pick); free(self.grp_taken)
        free(self.out_nmap); free(self.out_emap)

    cdef int _find_bucket(self, int hs, int ht, int lab) noexcept:
        cdef long long key = ((<long long> hs) * self.nh + ht) * self.nl + lab
        cdef int lo = 0, hi = self.nb, mid
        while lo < hi:
            mid = (lo + hi) >> 1
            if self.bkeys[mid] < key:
                lo = mid + 1
            else:
                hi = mid
        if lo < self.nb and self.bkeys[lo] == key:
            return lo
        return -1

    cdef int _bucket_min(self, int e, int b) noexcept:
        cdef int row = e * self.eh
        cdef int k, c, best = INF
        for k in range(self.boff[b], self.boff[b + 1]):
            c = self.ecost[row + self.bedges[k]]
            if c < best:
                best = c
        return best

    cdef int _try_assign(self, int x, int y, int* delta_out) noexcept:
        """Validate x -> y; push finalized buckets; return 1 on success."""
        cdef int start = self.fin_top
        cdef int delta = 0
        cdef int k, o, om, e, hs, ht, b, pending, j
        for k in range(self.adj_off[x], self.adj_off[x + 1]):
            o = self.adj_other[k]
            om = y if o == x else self.node_map[o]
            if om < 0:
                continue
            e = self.adj_edge[k]
            hs = y if self.pe_src[e] == x else self.node_map[self.pe_src[e]]
            ht = y if self.pe_tgt[e] == x else self.node_map[self.pe_tgt[e]]
            b = self._find_bucket(hs, ht, self.pe_lab[e])
            if b < 0:
                self.fin_top = start
                return 0
            pending = 1
            for j in range(start, self.fin_top):
                if self.fin_stack[j] == b:
                    pending += 1
            if self.bucket_used[b] + pending > self.boff[b + 1] - self.boff[b]:
                self.fin_top = start
                return 0
            self.fin_stack[self.fin_top] = b
            self.fin_top += 1
            delta += self._bucket_min(e, b) - self.semin[e]
        delta_out[0] = delta
        return 1

    cdef void _grp_go(self, int i, int cost) noexcept:
        cdef int j, f, row
        if cost + self.grp_suffix[i] >= self.grp_best:
            return
        if i == self.grp_k:
            self.grp_best = cost
            if self.grp_want:
                for j in range(self.grp_k):
                    self.grp_best_pick[j] = self.grp_pick[j]
            return
        row = self.grp_pedges[i] * self.eh
        for j in range(self.boff[self.grp_b], self.boff[self.grp_b + 1]):
            if self.grp_taken[j - self.boff[self.grp_b]]:
                continue
            f = self.bedges[j]
            self.grp_taken[j - self.boff[self.grp_b]] = 1
            self.grp_pick[i] = f
            self._grp_go(i + 1, cost + self.ecost[row + f])
            self.grp_taken[j - self.boff[self.grp_b]] = 0

    cdef int _leaf_edges(self, int want_map, int limit) noexcept:
        cdef int e, b, total, i, k, cap
        if self.ep == 0:
            return 0
        for b in range(self.nb):
            self.leaf_head[b] = -1
        # Prepend in reverse so each bucket's list is ascending.
        for e in range(self.ep - 1, -1, -1):
            b = self._find_bucket(
                self.node_map[self.pe_src[e]],
                self.node_map[self.pe_tgt[e]],
                self.pe_lab[e],
            )
            self.leaf_next[e] = self.leaf_head[b]
            self.leaf_head[b] = e
        total = 0
        for b in range(self.nb):
            e = self.leaf_head[b]
            if e < 0:
                continue
            self.grp_k = 0
            while e >= 0:
                self.grp_pedges[self.grp_k] = e
                self.grp_k += 1
                e = self.leaf_next[e]
            self.grp_b = b
            self.grp_want = want_map
            for i in range(self.grp_k):
                self.grp_mins[i] = self._bucket_min(self.grp_pedges[i], b)
            self.grp_suffix[self.grp_k] = 0
            for i in range(self.grp_k - 1, -1, -1):
                self.grp_suffix[i] = self.grp_suffix[i + 1] + self.grp_mins[i]
            cap = self.boff[b + 1] - self.boff[b]
            for i in range(cap):
                self.grp_taken[i] = 0
            self.grp_best = INF
            self._grp_go(0, 0)
            total += self.grp_best
            if total > limit:
                return INF
            if want_map:
                for i in range(self.grp_k):
                    self.leaf_emap[self.grp_pedges[i]] = self.grp_best_pick[i]
        return total

    cdef int _dfs(self, int depth, int node_cost, int rem_node_min, int edge_bound) noexcept:
        """Returns 1 to abort the whole search (success or budget)."""
        cdef int x, idx, y, total, bound, delta, stop, saved_top, j
        if depth == self.np:
            if self.mode == MODE_COST:
                total = self._leaf_edges(0, self.best - node_cost - 1)
                if total < INF and node_cost + total < self.best:
                    self.best = node_cost + total
                return 0
            total = self._leaf_edges(1 if self.mode == MODE_LEX else 0, self.cstar - node_cost)
            if total < INF and node_cost + total == self.cstar:
                if self.mode == MODE_LEX:
                    for j in range(self.np):
                        self.out_nmap[j] = self.node_map[j]
                    for j in range(self.ep):
                        self.out_emap[j] = self.leaf_emap[j]
                    self.out_found = 1
                    return 1
                self.count_found += 1
            return 0
        x = self.order[depth]
        cdef int new_rem = rem_node_min - self.snmin[x]
        cdef int delta_val = 0
        for idx in range(self.cand_off[x], self.cand_off[x + 1]):
            y = self.cand_flat[idx]
            if self.used[y]:
                continue
            self.expansions += 1
            if self.expansions > self.budget:
                self.budget_hit = 1
                return 1
            saved_top = self.fin_top
            if not self._try_assign(x, y, &delta_val):
                continue
            delta = delta_val
            bound = node_cost + self.ncost[idx] + new_rem + edge_bound + delta
            if self.mode == MODE_COST:
                if bound >= self.best:
                    self.fin_top = saved_top
                    continue
            elif bound > self.cstar:
                self.fin_top = saved_top
                continue
            self.node_map[x] = y
            self.used[y] = 1
            for j in range(saved_top, self.fin_top):
                self.bucket_used[self.fin_stack[j]] += 1
            stop = self._dfs(depth + 1, node_cost + self.ncost[idx], new_rem, edge_bound + delta)
            self.node_map[x] = -1
            self.used[y] = 0
            for j in range(saved_top, self.fin_top):
                self.bucket_used[self.fin_stack[j]] -= 1
            self.fin_top = saved_top
            if stop:
                return 1
        return 0


def run(inst, int mode, long long budget, int cstar=-1):
    """Search one encoded instance; see _pysearch.run for the contract."""
    cdef int np_ = inst.np
    cdef int x, e

    if np_ == 0:
        value = 1 if mode == MODE_COUNT else 0
        if mode == MODE_LEX:
            return (ST_OK, value, [], [], 0)
        return (ST_OK, value, None, None, 0)
    for x in range(np_):
        if inst.cand_off[x + 1] == inst.cand_off[x]:
            return (ST_NOMATCH, 0, None, None, 0)
    for e in range(inst.ep):
        if inst.static_edge_min[e] >= INF:
            return (ST_NOMATCH, 0, None, None, 0)

    cdef _Ctx ctx = _Ctx(inst, mode, budget, cstar)
    cdef int total_node = 0
    cdef int total_edge = 0
    for x in range(np_):
        total_node += ctx.snmin[x]
    for e in range(ctx.ep):
        total_edge += ctx.semin[e]
    ctx._dfs(0, 0, total_node, total_edge)

    if ctx.budget_hit:
        value = ctx.count_found if mode == MODE_COUNT else 0
        return (ST_BUDGET, value, None, None, ctx.expansions)
    if mode == MODE_COST:
        if ctx.best >= INF:
            return (ST_NOMATCH, 0, None, None, ctx.expansions)
        return (ST_OK, ctx.best, None, None, ctx.expansions)
    if mode == MODE_LEX:
        if not ctx.out_found:
            return (ST_NOMATCH, 0, None, None, ctx.expansions)
        nmap = [ctx.out_nmap[x] for x in range(np_)]
        emap = [ctx.out_emap[e] for e in range(ctx.ep)]
        return (ST_OK, cstar, nmap, emap, ctx.expansions)
    return (ST_OK, ctx.count_found, None, None, ctx.expansions)
