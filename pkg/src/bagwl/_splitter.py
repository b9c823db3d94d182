"""Array engine behind the restricted refinement.

Tuples are packed into int64 codes, big-endian by coordinate, over a
digit base shared by both graphs of a comparison (graph two's vertices
are offset so the code ranges stay disjoint).  The universe of a graph
is a sorted code array; a coloring is a parallel int64 array.  The
stable partition is computed with a splitter queue: snapshots of color
classes are popped, every tuple reachable from the snapshot by one
substitution is recolored by its witness vectors, and each fragment but
the largest of a split class is enqueued again.

Everything is deterministic: orderings come from sorted codes and
lexicographically sorted descriptor rows, never from object hashes.
"""

from __future__ import annotations

from collections import deque
from math import comb
from typing import Sequence

import numpy as np

from .graphs import EquivalencePartition, Graph, TupleColoring

CHUNK = 1 << 16
DIRECT_INDEX_LIMIT = 1 << 26
PAIR_CHUNK = 1 << 20


class ColorTable:
    """Shared renaming of structured descriptors to fresh integers.

    Color 0 is reserved for tuples outside the universe and is never
    issued.  Interning order is the call order, which callers keep
    deterministic; keys are namespaced so refinement rounds can never
    collide with initial descriptors.
    """

    def __init__(self) -> None:
        self._ids: dict[bytes, int] = {}
        self._next = 1

    def intern(self, key: bytes) -> int:
        got = self._ids.get(key)
        if got is None:
            got = self._next
            self._ids[key] = got
            self._next += 1
        return got

    def grab(self, count: int) -> int:
        """Reserve `count` consecutive fresh ids, returning the first.
        For descriptor streams that are unique by construction, where a
        keyed lookup could never hit."""
        start = self._next
        self._next += count
        return start

    def __len__(self) -> int:
        return self._next - 1


def surjections(positions: int, onto: int) -> int:
    """Number of maps from `positions` slots onto all of `onto` values."""
    return sum(
        (-1) ** i * comb(onto, i) * (onto - i) ** positions
        for i in range(onto + 1)
    )


def universe_size(family: Sequence[frozenset[int]], n: int, k: int, kprime: int) -> int:
    """|V+| for the family over an n-vertex graph, before materializing."""
    if kprime == 0:
        return n ** k if any(len(s) == 0 for s in family) else 0
    prefix = sum(surjections(kprime, len(s)) for s in family)
    return prefix * n ** (k - kprime)


def _weights(base: int, k: int) -> np.ndarray:
    return (base ** np.arange(k - 1, -1, -1)).astype(np.int64)


def build_codes(
    family: Sequence[frozenset[int]],
    n: int,
    k: int,
    kprime: int,
    base: int,
    offset: int,
) -> np.ndarray:
    """Sorted packed codes of every k-tuple whose leading kprime entries
    form exactly a member set of the family."""
    w = _weights(base, k)
    suffix = np.zeros(1, dtype=np.int64)
    for pos in range(kprime, k):
        step = (np.arange(n, dtype=np.int64) + offset) * w[pos]
        suffix = (suffix[:, None] + step[None, :]).ravel()
    blocks = []
    for members in sorted(tuple(sorted(s)) for s in family):
        s = len(members)
        if s == 0:
            if kprime == 0:
                blocks.append(suffix.copy())
            continue
        if s > kprime:
            continue
        seqs = np.arange(s ** kprime, dtype=np.int64)
        digits = np.empty((len(seqs), kprime), dtype=np.int64)
        rest = seqs
        for pos in range(kprime - 1, -1, -1):
            digits[:, pos] = rest % s
            rest = rest // s
        seen = np.zeros(len(seqs), dtype=np.int64)
        for pos in range(kprime):
            seen |= np.int64(1) << digits[:, pos]
        digits = digits[seen == (1 << s) - 1]
        vals = np.asarray(members, dtype=np.int64) + offset
        prefix = (vals[digits] * w[:kprime][None, :]).sum(axis=1)
        blocks.append((prefix[:, None] + suffix[None, :]).ravel())
    if not blocks:
        return np.empty(0, dtype=np.int64)
    codes = np.concatenate(blocks)
    codes.sort()
    return codes


def digits_of(codes: np.ndarray, base: int, k: int) -> np.ndarray:
    out = np.empty((len(codes), k), dtype=np.int64)
    rest = codes
    for pos in range(k - 1, -1, -1):
        out[:, pos] = rest % base
        rest = rest // base
    return out


def _unique_rows(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Lexicographically sorted unique rows plus the inverse map.

    Equivalent to np.unique(mat, axis=0, return_inverse=True) but packs
    runs of columns into uint64 words first; sorting native integers is
    far cheaper than numpy's bytewise row comparisons.  All entries
    must be nonnegative.
    """
    n, width = mat.shape
    if n == 0:
        return mat, np.empty(0, dtype=np.int64)
    packed: list[np.ndarray] = []
    cur: np.ndarray | None = None
    span = 1
    for j in range(width):
        col = mat[:, j].astype(np.uint64, copy=False)
        radix = int(col.max()) + 1
        if cur is None:
            cur, span = col, radix
        elif span * radix < 1 << 64:
            cur = cur * np.uint64(radix) + col
            span *= radix
        else:
            packed.append(cur)
            cur, span = col, radix
    assert cur is not None
    packed.append(cur)
    if len(packed) == 1:
        order = np.argsort(packed[0], kind="stable")
    else:
        order = np.lexsort(tuple(reversed(packed)))
    new_grp = np.zeros(n, dtype=bool)
    for col in packed:
        s = col[order]
        new_grp[1:] |= s[1:] != s[:-1]
    gids = np.cumsum(new_grp)
    inv = np.empty(n, dtype=np.int64)
    inv[order] = gids
    starts = order[np.concatenate(([0], np.flatnonzero(new_grp)))]
    return mat[starts], inv


class GraphState:
    """Per-graph side of a refinement run: universe plus live colors."""

    def __init__(
        self,
        g: Graph,
        family: Sequence[frozenset[int]],
        k: int,
        kprime: int,
        base: int,
        offset: int,
        partition: EquivalencePartition | None = None,
        coloring: TupleColoring | None = None,
        codes: np.ndarray | None = None,
    ):
        self.g = g
        self.k = k
        self.base = base
        self.offset = offset
        self.n = g.n
        self.partition = partition
        self.coloring = coloring
        if codes is None:
            codes = build_codes(family, g.n, k, kprime, base, offset)
        self.codes = codes
        self.colors = np.zeros(len(codes), dtype=np.int64)
        self.weights = _weights(base, k)
        # code -> universe index table; saves a binary search per probe
        self.index: np.ndarray | None = None
        if len(codes) and base**k <= DIRECT_INDEX_LIMIT:
            self.index = np.full(base**k, -1, dtype=np.int32)
            self.index[codes] = np.arange(len(codes), dtype=np.int32)

    def locate(self, codes: np.ndarray) -> np.ndarray:
        """Universe index of each code, -1 for codes outside."""
        if self.index is not None:
            return self.index[codes].astype(np.int64, copy=False)
        out = np.full(len(codes), -1, dtype=np.int64)
        if not len(self.codes) or not len(codes):
            return out
        pos = np.searchsorted(self.codes, codes)
        pos_c = np.minimum(pos, len(self.codes) - 1)
        hit = self.codes[pos_c] == codes
        out[hit] = pos_c[hit]
        return out

    def color_lookup(self, codes: np.ndarray) -> np.ndarray:
        """Current colors of arbitrary codes; 0 for codes outside."""
        idx = self.locate(codes)
        hit = idx >= 0
        out = np.zeros(len(codes), dtype=np.int64)
        out[hit] = self.colors[idx[hit]]
        return out


def _adjacency_lut(states: Sequence[GraphState], base: int) -> np.ndarray:
    lut = np.zeros((base, base), dtype=bool)
    for st in states:
        for u, v in st.g.edges:
            lut[u + st.offset, v + st.offset] = True
            lut[v + st.offset, u + st.offset] = True
    return lut


def _same_class_lut(states: Sequence[GraphState], base: int) -> np.ndarray:
    lut = np.zeros((base, base), dtype=bool)
    for st in states:
        if st.partition is None:
            continue
        for cls in st.partition.classes:
            vs = [v + st.offset for v in cls]
            for a in vs:
                for b in vs:
                    lut[a, b] = True
    return lut


def _pack_bit_rows(digits: np.ndarray, luts: Sequence[np.ndarray]) -> np.ndarray:
    """One packed row per tuple: for every coordinate pair, an equality
    bit then one bit per lookup table, packed into uint64 columns."""
    k = digits.shape[1]
    nbits = (1 + len(luts)) * (k * (k - 1) // 2)
    ncols = max(1, (nbits + 63) // 64)
    rows = np.zeros((len(digits), ncols), dtype=np.uint64)
    bit = 0
    for i in range(k):
        for j in range(i + 1, k):
            feats = [digits[:, i] == digits[:, j]]
            for lut in luts:
                feats.append(lut[digits[:, i], digits[:, j]])
            for feat in feats:
                rows[:, bit // 64] |= feat.astype(np.uint64) << np.uint64(bit % 64)
                bit += 1
    return rows


def _ordering_items(st: GraphState, digit_rows: np.ndarray) -> list[bytes]:
    """Per-tuple byte string of colored-ordering items: every colored
    class ordering whose class lies inside the tuple's entries, encoded
    by the coordinate sets its vertices occupy."""
    col = st.coloring
    assert col is not None
    by_class: dict[int, list[tuple[tuple[int, ...], int]]] = {}
    for (ci, order), color in sorted(col.entries.items()):
        by_class.setdefault(ci, []).append((order, color))
    out = []
    for row in digit_rows:
        entries = set(int(d) - st.offset for d in row)
        items: list[tuple] = []
        for ci, orders in by_class.items():
            if not col.partition.classes[ci] <= entries:
                continue
            for order, color in orders:
                masks = tuple(
                    tuple(int(p) for p in np.flatnonzero(row == v + st.offset))
                    for v in order
                )
                items.append((masks, color))
        items.sort()
        out.append(repr(items).encode())
    return out


def initial_colors(states: Sequence[GraphState], table: ColorTable) -> None:
    """Assign shared initial colors: equal iff the entrywise map is an
    isomorphism of the induced colored subgraphs."""
    base = states[0].base
    luts = [_adjacency_lut(states, base)]
    if any(st.partition is not None for st in states):
        luts.append(_same_class_lut(states, base))
    colored = any(st.coloring is not None and st.coloring.entries for st in states)
    if colored:
        keys: list[list[bytes]] = []
        for st in states:
            mine: list[bytes] = []
            for lo in range(0, len(st.codes), CHUNK):
                digits = digits_of(st.codes[lo : lo + CHUNK], base, st.k)
                packed = _pack_bit_rows(digits, luts)
                if st.coloring is not None and st.coloring.entries:
                    extra = _ordering_items(st, digits)
                else:
                    extra = [b"[]"] * len(digits)
                mine.extend(p.tobytes() + e for p, e in zip(packed, extra))
            keys.append(mine)
        for key in sorted(set().union(*map(set, keys))):
            table.intern(b"i" + key)
        for st, mine in zip(states, keys):
            for i, key in enumerate(mine):
                st.colors[i] = table.intern(b"i" + key)
        return
    mats = []
    for st in states:
        got = [
            _pack_bit_rows(digits_of(st.codes[lo : lo + CHUNK], base, st.k), luts)
            for lo in range(0, len(st.codes), CHUNK)
        ]
        mats.append(
            np.concatenate(got) if got else np.empty((0, 1), dtype=np.uint64)
        )
    width = max(m.shape[1] for m in mats)
    mats = [
        m if m.shape[1] == width else np.pad(m, ((0, 0), (0, width - m.shape[1])))
        for m in mats
    ]
    uniq, inv = _unique_rows(np.concatenate(mats))
    ids = np.array(
        [table.intern(b"i" + row.tobytes()) for row in uniq], dtype=np.int64
    )
    at = 0
    for st in states:
        st.colors[:] = ids[inv[at : at + len(st.codes)]]
        at += len(st.codes)


def _batch_triples(
    st: GraphState, member_codes: np.ndarray, tags: np.ndarray, ntags: int
) -> np.ndarray:
    """Deduplicated (tuple index, witness digit, splitter tag) triples,
    fused into int64 keys (u * base + y) * ntags + tag.  A triple means:
    substituting digit y at some coordinate of universe tuple u lands in
    the tagged splitter.  Generated from the members themselves, since
    u = b[j -> x] lands back on b when its coordinate j is restored."""
    verts = np.arange(st.n, dtype=np.int64) + st.offset
    got: list[np.ndarray] = []
    for lo in range(0, len(member_codes), CHUNK):
        part = member_codes[lo : lo + CHUNK]
        tpart = tags[lo : lo + CHUNK]
        digits = digits_of(part, st.base, st.k)
        for pos in range(st.k):
            wpos = st.weights[pos]
            stripped = part - digits[:, pos] * wpos
            cand = (stripped[:, None] + verts[None, :] * wpos).ravel()
            where = st.locate(cand)
            hit = where >= 0
            if not hit.any():
                continue
            u = where[hit]
            y = np.repeat(digits[:, pos], st.n)[hit]
            t = np.repeat(tpart, st.n)[hit]
            got.append((u * st.base + y) * ntags + t)
        if sum(a.size for a in got) > 8 * PAIR_CHUNK:
            got = [np.unique(np.concatenate(got))]
    if not got:
        return np.empty(0, dtype=np.int64)
    return np.unique(np.concatenate(got))


def _witness_vectors(st: GraphState, u_idx: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Full k-vector of current substituted colors per witness pair."""
    out = np.empty((len(u_idx), st.k), dtype=np.int64)
    for lo in range(0, len(u_idx), PAIR_CHUNK):
        codes = st.codes[u_idx[lo : lo + PAIR_CHUNK]]
        ys = y[lo : lo + PAIR_CHUNK]
        digits = digits_of(codes, st.base, st.k)
        for pos in range(st.k):
            sub = codes + (ys - digits[:, pos]) * st.weights[pos]
            out[lo : lo + PAIR_CHUNK, pos] = st.color_lookup(sub)
    return out


BATCH_CLASSES = 512
BATCH_MEMBERS = 1 << 18


def refine_to_stability(states: Sequence[GraphState], table: ColorTable) -> None:
    """Run the splitter queue to the coarsest stable coloring.

    Seeds cover every initial class in ascending color order.  Queue
    entries are popped in batches and distinguished by per-batch tags;
    splitting by several classes at once is the join of the individual
    splits, so it refines identically.  Stale snapshots are unions of
    current classes, so splitting by them stays sound; completeness
    comes from enqueueing every fragment but the largest.
    """
    empty = np.empty(0, np.int64)
    members: dict[int, list[np.ndarray]] = {}
    class_size: dict[int, int] = {}
    for si, st in enumerate(states):
        if not len(st.colors):
            continue
        order = np.argsort(st.colors, kind="stable")
        cs = st.colors[order]
        cuts = np.flatnonzero(np.diff(cs)) + 1
        starts = np.concatenate(([0], cuts))
        ends = np.concatenate((cuts, [len(cs)]))
        for s, e in zip(starts, ends):
            c = int(cs[s])
            slot = members.setdefault(c, [empty for _ in states])
            slot[si] = np.sort(order[s:e]).astype(np.int64)
            class_size[c] = class_size.get(c, 0) + (e - s)
    queue: deque[list[np.ndarray]] = deque(members[c] for c in sorted(members))

    while queue:
        batch: list[list[np.ndarray]] = [queue.popleft()]
        budget = sum(len(ix) for ix in batch[0])
        while queue and len(batch) < BATCH_CLASSES and budget < BATCH_MEMBERS:
            snap = queue.popleft()
            batch.append(snap)
            budget += sum(len(ix) for ix in snap)
        ntags = len(batch)

        # witness triples and their substitution vectors, per state
        per_state: list[tuple[np.ndarray, np.ndarray, np.ndarray, int]] = []
        vec_blocks: list[np.ndarray] = []
        for si, st in enumerate(states):
            idx_parts = [snap[si] for snap in batch]
            lens = [len(p) for p in idx_parts]
            if sum(lens):
                tags = np.repeat(np.arange(ntags, dtype=np.int64), lens)
                key3 = _batch_triples(
                    st, st.codes[np.concatenate(idx_parts)], tags, ntags
                )
            else:
                key3 = empty
            if len(key3):
                # a size-1 class can never split; drop its rows early
                cols = st.colors[key3 // (ntags * st.base)]
                uc, ic = np.unique(cols, return_inverse=True)
                keep = np.array(
                    [class_size[int(c)] > 1 for c in uc], dtype=bool
                )
                if not keep.all():
                    key3 = key3[keep[ic]]
            if not len(key3):
                per_state.append((empty, empty, empty, 0))
                continue
            t3 = key3 % ntags
            key2 = key3 // ntags
            pairs2, pair_pos = np.unique(key2, return_inverse=True)
            per_state.append((key2 // st.base, t3, pair_pos, len(pairs2)))
            vec_blocks.append(
                _witness_vectors(st, pairs2 // st.base, pairs2 % st.base)
            )
        if not vec_blocks:
            continue
        _, vec_inv = _unique_rows(np.concatenate(vec_blocks))

        # per affected tuple: old color plus sorted (vector id, tag) items
        rows_by_len: dict[int, list[tuple[np.ndarray, int, np.ndarray]]] = {}
        voff = 0
        for si, (u3, t3, pair_pos, npairs) in enumerate(per_state):
            if not len(u3):
                continue
            vids = vec_inv[voff : voff + npairs][pair_pos]
            voff += npairs
            items = vids * ntags + t3
            order = np.lexsort((items, u3))
            u_sorted = u3[order]
            item_sorted = items[order]
            starts = np.concatenate(([0], np.flatnonzero(np.diff(u_sorted)) + 1))
            lens = np.diff(np.concatenate((starts, [len(u_sorted)])))
            run_u = u_sorted[starts]
            for ln in np.unique(lens):
                sel = np.flatnonzero(lens == ln)
                mat = np.empty((len(sel), int(ln) + 1), dtype=np.int64)
                mat[:, 0] = states[si].colors[run_u[sel]]
                mat[:, 1:] = item_sorted[
                    starts[sel][:, None] + np.arange(int(ln))[None, :]
                ]
                rows_by_len.setdefault(int(ln), []).append((mat, si, run_u[sel]))

        # fresh ids per length group; descriptor rows never recur across
        # batches (each round folds in the previous colors), so a bulk
        # reservation matches keyed interning id for id
        all_state: list[np.ndarray] = []
        all_u: list[np.ndarray] = []
        all_old: list[np.ndarray] = []
        all_new: list[np.ndarray] = []
        for ln in sorted(rows_by_len):
            parts = rows_by_len[ln]
            uniq, inv = _unique_rows(np.concatenate([m for m, _, _ in parts]))
            news = table.grab(len(uniq)) + inv
            at = 0
            for mat, si, us in parts:
                all_state.append(np.full(len(mat), si, dtype=np.int64))
                all_u.append(us)
                all_old.append(mat[:, 0])
                all_new.append(news[at : at + len(mat)])
                at += len(mat)
        olds = np.concatenate(all_old)
        news = np.concatenate(all_new)
        stats = np.concatenate(all_state)
        us = np.concatenate(all_u)

        # order rows by class, descriptor group, state, tuple and drop
        # the classes whose members all share one descriptor
        order = np.lexsort((us, stats, news, olds))
        olds, news, stats, us = olds[order], news[order], stats[order], us[order]
        c_cuts = np.flatnonzero(olds[1:] != olds[:-1]) + 1
        c_starts = np.concatenate(([0], c_cuts))
        c_ends = np.concatenate((c_cuts, [len(olds)]))
        seg_len = c_ends - c_starts
        c_list = olds[c_starts].tolist()
        sizes = np.array([class_size[c] for c in c_list], dtype=np.int64)
        no_split = (sizes == seg_len) & (news[c_starts] == news[c_ends - 1])
        if bool(no_split.all()):
            continue
        keep_row = np.repeat(~no_split, seg_len)
        s_olds = olds[keep_row]
        s_news = news[keep_row]
        s_stats = stats[keep_row]
        s_us = us[keep_row]

        # bulk recolor, then carve fragments out of the sorted rows;
        # runs of constant (class, group, state) are views into s_us
        for si, st in enumerate(states):
            mine = s_stats == si
            st.colors[s_us[mine]] = s_news[mine]
        r_cuts = (
            np.flatnonzero(
                (s_olds[1:] != s_olds[:-1])
                | (s_news[1:] != s_news[:-1])
                | (s_stats[1:] != s_stats[:-1])
            )
            + 1
        )
        r_starts = np.concatenate(([0], r_cuts))
        r_ends = np.concatenate((r_cuts, [len(s_olds)]))
        ro = s_olds[r_starts]
        rn = s_news[r_starts]
        new_frag = np.ones(len(r_starts), dtype=bool)
        new_frag[1:] = (ro[1:] != ro[:-1]) | (rn[1:] != rn[:-1])
        f_sizes = np.diff(
            np.concatenate((r_starts[new_frag], [len(s_olds)]))
        ).tolist()
        nstates = len(states)
        frag_by_class: dict[int, list[tuple[int, int, list[np.ndarray]]]] = {}
        cur: list[np.ndarray] = []
        fi = -1
        for a, b, st_i, c, gid, fresh in zip(
            r_starts.tolist(),
            r_ends.tolist(),
            s_stats[r_starts].tolist(),
            ro.tolist(),
            rn.tolist(),
            new_frag.tolist(),
        ):
            if fresh:
                fi += 1
                cur = [empty] * nstates
                members[gid] = cur
                class_size[gid] = f_sizes[fi]
                frag_by_class.setdefault(c, []).append((f_sizes[fi], gid, cur))
            cur[st_i] = s_us[a:b]

        # remainders: per split class, members minus the affected rows
        order3 = np.lexsort((s_us, s_stats, s_olds))
        a_olds = s_olds[order3]
        a_stats = s_stats[order3]
        a_us = s_us[order3]
        a_cuts = (
            np.flatnonzero(
                (a_olds[1:] != a_olds[:-1]) | (a_stats[1:] != a_stats[:-1])
            )
            + 1
        )
        a_starts = np.concatenate(([0], a_cuts))
        a_ends = np.concatenate((a_cuts, [len(a_olds)]))
        affected: dict[int, list[np.ndarray]] = {}
        for asr, aer in zip(a_starts.tolist(), a_ends.tolist()):
            c = int(a_olds[asr])
            slot = affected.setdefault(c, [empty for _ in states])
            slot[int(a_stats[asr])] = a_us[asr:aer]
        for c, slot in affected.items():
            current = members[c]
            stale = class_size[c] - sum(len(a) for a in slot)
            fragments = frag_by_class[c]
            if stale > 0:
                kept = [
                    np.setdiff1d(cur, aff, assume_unique=True)
                    for cur, aff in zip(current, slot)
                ]
                members[c] = kept
                class_size[c] = stale
                fragments.append((stale, c, kept))
            else:
                del members[c]
                del class_size[c]
            fragments.sort(key=lambda t: (-t[0], t[1]))
            for _, _, idxs in fragments[1:]:
                queue.append(idxs)
