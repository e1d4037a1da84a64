"""Link diagrams on the sphere as 4-valent combinatorial maps.

Conventions
-----------
A crossing exposes four half-edge slots numbered 0..3 in counterclockwise
order.  Slots 0 and 2 carry the overstrand, slots 1 and 3 the understrand.
A *dart* is one half-edge slot, encoded as the integer ``4*crossing + slot``.

The map structure is a pairing ``alpha`` (fixed-point-free involution on
darts, one orbit per edge/arc) together with the implicit vertex rotation
``sigma`` (next slot counterclockwise).  Faces are the orbits of
``sigma . alpha``.  With these conventions the face containing dart
``(c, s)`` is the region occupying the corner between slots ``s-1`` and
``s`` of crossing ``c``, i.e. the region on the *right* when leaving ``c``
along slot ``s``.

A diagram is either a connected map with at least one crossing, or the
round unknot (one crossing-free loop, ``free_loop=True``).  Disconnected
diagrams are rejected.  The sphere condition (faces == crossings + 2 for a
connected diagram) is enforced on construction, so every diagram held by
the library is planar/spherical by fiat.

Crossing signs are derived from an automatic traversal: if the understrand
enters at slot ``o+1`` where ``o`` is the overstrand entry slot, the
crossing is positive; entry at ``o+3`` makes it negative.

Diagrams are immutable after construction and safe to share between
threads; every operation here is a pure function of its inputs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class DiagramError(ValueError):
    """Structurally invalid diagram or unparseable/non-realizable code."""


def dart(crossing: int, slot: int) -> int:
    return 4 * crossing + (slot & 3)


def crossing_of(d: int) -> int:
    return d >> 2


def slot_of(d: int) -> int:
    return d & 3


def rot(d: int, k: int) -> int:
    """Dart at the same crossing, k slots counterclockwise from d."""
    return (d & ~3) | ((d + k) & 3)


def dart_str(d: int) -> str:
    return "%d:%d" % (d >> 2, d & 3)


def parse_dart(text: str) -> int:
    c, _, s = text.partition(":")
    return dart(int(c), int(s))


@dataclass(frozen=True)
class Face:
    """One region of the diagram.

    ``darts`` lists the boundary corners in face-walk order starting from
    the smallest dart; its length is the side count (0 for the two regions
    of the round unknot).
    """

    id: int
    darts: tuple[int, ...]

    @property
    def side_count(self) -> int:
        return len(self.darts)

    @property
    def adjacent_crossings(self) -> frozenset[int]:
        return frozenset(d >> 2 for d in self.darts)


class Diagram:
    """Immutable connected link diagram on the sphere.

    Parameters
    ----------
    pairing:
        dict (or iterable of pairs) giving the edge involution on darts.
        Empty for the round unknot.
    free_loop:
        True for the crossing-free unknot diagram.  A free loop cannot
        coexist with crossings (that would be disconnected).
    next_id:
        Allocation high-water mark for crossing ids.  Move applications
        never reuse ids below this, which keeps replays exactly
        reproducible.  Not part of diagram identity.
    """

    __slots__ = ("alpha", "free_loop", "next_id", "crossings", "faces",
                 "_face_of", "_codes", "_components", "_key", "_hash")

    def __init__(self, pairing=None, *, free_loop: bool = False,
                 next_id: int | None = None):
        alpha: dict[int, int] = dict(pairing) if pairing else {}
        if free_loop and alpha:
            raise DiagramError("a free loop cannot coexist with crossings")
        if not free_loop and not alpha:
            raise DiagramError("empty diagram (no crossings, no loop)")
        for d, e in alpha.items():
            if d == e:
                raise DiagramError("pairing has a fixed point at %s" % dart_str(d))
            if alpha.get(e) != d:
                raise DiagramError("pairing is not an involution at %s" % dart_str(d))
        crossings = sorted({d >> 2 for d in alpha})
        for c in crossings:
            for s in range(4):
                if 4 * c + s not in alpha:
                    raise DiagramError("crossing %d is missing slot %d" % (c, s))
        if len(alpha) != 4 * len(crossings):
            raise DiagramError("stray darts in pairing")

        self.alpha = alpha
        self.free_loop = free_loop
        self.crossings = tuple(crossings)
        if next_id is None:
            next_id = crossings[-1] + 1 if crossings else 0
        self.next_id = next_id

        if crossings:
            self._check_connected()
        self.faces = self._compute_faces()
        self._face_of = {d: f.id for f in self.faces for d in f.darts}
        c = len(self.crossings)
        if c and len(self.faces) != c + 2:
            raise DiagramError(
                "map is not spherical: %d crossings but %d faces"
                % (c, len(self.faces)))
        self._codes: dict[bool, bytes] = {}
        self._components: int | None = None
        self._key = hash((frozenset(self.alpha.items()), self.free_loop))
        self._hash = self._key

    # -- construction helpers -------------------------------------------

    @staticmethod
    def unknot() -> "Diagram":
        return Diagram(free_loop=True)

    def _check_connected(self) -> None:
        start = self.crossings[0]
        seen = {start}
        stack = [start]
        while stack:
            c = stack.pop()
            for s in range(4):
                c2 = self.alpha[4 * c + s] >> 2
                if c2 not in seen:
                    seen.add(c2)
                    stack.append(c2)
        if len(seen) != len(self.crossings):
            raise DiagramError("diagram is disconnected")

    def _compute_faces(self) -> tuple[Face, ...]:
        if not self.crossings:
            return (Face(0, ()), Face(1, ()))
        alpha = self.alpha
        unseen = set(alpha)
        orbits = []
        while unseen:
            d0 = min(unseen)
            orbit = []
            d = d0
            while True:
                orbit.append(d)
                unseen.discard(d)
                d = rot(alpha[d], 1)  # sigma . alpha
                if d == d0:
                    break
            orbits.append(tuple(orbit))
        orbits.sort(key=lambda o: o[0])
        return tuple(Face(i, o) for i, o in enumerate(orbits))

    # -- basic queries ---------------------------------------------------

    @property
    def num_crossings(self) -> int:
        return len(self.crossings)

    def darts(self):
        return self.alpha.keys()

    def face_of(self, d: int) -> int:
        """Face id of the region at the corner (slot-1, slot) of d."""
        return self._face_of[d]

    def face(self, fid: int) -> Face:
        return self.faces[fid]

    def edges(self) -> list[tuple[int, int]]:
        """All arcs as (dart, partner) with dart < partner."""
        return [(d, e) for d, e in self.alpha.items() if d < e]

    def num_components(self) -> int:
        """Number of link components (closed strands)."""
        if self._components is None:
            if not self.crossings:
                self._components = 1
            else:
                parent: dict[int, int] = {}

                def find(x):
                    while parent[x] != x:
                        parent[x] = parent[parent[x]]
                        x = parent[x]
                    return x

                for d in self.alpha:
                    parent[d] = d
                for d, e in self.alpha.items():
                    a, b = find(d), find(e)
                    if a != b:
                        parent[a] = b
                    a, b = find(d), find(rot(d, 2))
                    if a != b:
                        parent[a] = b
                self._components = len({find(d) for d in self.alpha})
        return self._components

    def writhe(self) -> int:
        """Sum of crossing signs, for single-component diagrams."""
        if self.num_components() != 1:
            raise DiagramError("writhe needs a knot diagram (or an orientation)")
        if not self.crossings:
            return 0
        over_entry: dict[int, int] = {}
        under_entry: dict[int, int] = {}
        start = min(self.alpha)
        d = start
        while True:
            c, s = d >> 2, d & 3
            if s & 1:
                under_entry[c] = s
            else:
                over_entry[c] = s
            d = self.alpha[rot(d, 2)]
            if d == start:
                break
        w = 0
        for c in self.crossings:
            w += 1 if under_entry[c] == (over_entry[c] + 1) & 3 else -1
        return w

    def crossing_sign(self, c: int) -> int:
        """Sign of one crossing of a knot diagram."""
        if self.num_components() != 1:
            raise DiagramError("crossing signs need a knot diagram")
        start = min(self.alpha)
        d = start
        over = under = None
        while True:
            cc, s = d >> 2, d & 3
            if cc == c:
                if s & 1:
                    under = s
                else:
                    over = s
            d = self.alpha[rot(d, 2)]
            if d == start:
                break
        if over is None or under is None:
            raise DiagramError("crossing %d not in diagram" % c)
        return 1 if under == (over + 1) & 3 else -1

    def monogons(self) -> list[int]:
        """Darts of the single-corner faces (removable kinks)."""
        return [f.darts[0] for f in self.faces if len(f.darts) == 1]

    # -- identity --------------------------------------------------------

    @property
    def key(self) -> int:
        """Structural fingerprint used to bind move sites to a diagram."""
        return self._key

    def __eq__(self, other):
        return (isinstance(other, Diagram) and self.free_loop == other.free_loop
                and self.alpha == other.alpha)

    def __hash__(self):
        return self._hash

    def same_state(self, other: "Diagram") -> bool:
        """Equality including the id allocation mark (exact replay state)."""
        return self == other and self.next_id == other.next_id

    def __repr__(self):
        if self.free_loop:
            return "Diagram(unknot)"
        return "Diagram(%d crossings)" % len(self.crossings)

    # -- canonical form --------------------------------------------------

    def _rooted_code(self, root: int, off0: int, reflect: bool) -> bytes:
        alpha = self.alpha
        label = {root: 0}
        offs = [off0]
        order = [root]
        out = bytearray()
        idx = 0
        while idx < len(order):
            c = order[idx]
            off = offs[idx]
            idx += 1
            base = 4 * c
            for r in range(4):
                s = ((off - r) if reflect else (r - off)) & 3
                d2 = alpha[base + s]
                c2, s2 = d2 >> 2, d2 & 3
                l2 = label.get(c2)
                if l2 is None:
                    l2 = len(order)
                    label[c2] = l2
                    if reflect:
                        o2 = s2 if not s2 & 1 else (s2 + 1) & 3
                    else:
                        o2 = (-s2) & 3 if not s2 & 1 else (1 - s2) & 3
                    order.append(c2)
                    offs.append(o2)
                else:
                    o2 = offs[l2]
                r2 = ((o2 - s2) if reflect else (s2 + o2)) & 3
                out.append(l2)
                out.append(r2)
        return bytes(out)

    def canonical_code(self, mirror: bool = False) -> bytes:
        """Total isomorphism-invariant encoding.

        Minimal rooted code over all roots; two diagrams get equal codes
        exactly when they are isomorphic as maps on the sphere preserving
        the over/under convention.  With ``mirror=True`` both sphere
        orientations are considered, identifying mirror images.
        """
        got = self._codes.get(mirror)
        if got is not None:
            return got
        if not self.crossings:
            code = b"U"
        else:
            n = len(self.crossings)
            if n > 255:
                raise DiagramError("canonical code supports at most 255 crossings")
            reflects = (False, True) if mirror else (False,)
            best = None
            for refl in reflects:
                for c in self.crossings:
                    for off in (0, 2):
                        cand = self._rooted_code(c, off, refl)
                        if best is None or cand < best:
                            best = cand
            code = bytes([n]) + best
        self._codes[mirror] = code
        return code

    def canonical_labeling(self) -> tuple[dict[int, int], list[int]]:
        """Crossing relabeling and slot offsets of the canonical rooted code.

        Returns (label, offs): crossing c becomes label[c], and its slot s
        is renamed (s + offs[label[c]]) mod 4.  Orientation-preserving only,
        so serialization never silently mirrors a diagram.
        """
        if not self.crossings:
            return {}, []
        best = None
        best_root = None
        for c in self.crossings:
            for off in (0, 2):
                cand = self._rooted_code(c, off, False)
                if best is None or cand < best:
                    best, best_root = cand, (c, off)
        root, off0 = best_root
        alpha = self.alpha
        label = {root: 0}
        offs = [off0]
        order = [root]
        idx = 0
        while idx < len(order):
            c = order[idx]
            off = offs[idx]
            idx += 1
            for r in range(4):
                s = (r - off) & 3
                d2 = alpha[4 * c + s]
                c2, s2 = d2 >> 2, d2 & 3
                if c2 not in label:
                    label[c2] = len(order)
                    order.append(c2)
                    offs.append((-s2) & 3 if not s2 & 1 else (1 - s2) & 3)
        return label, offs

    def is_isomorphic(self, other: "Diagram", mirror: bool = False) -> bool:
        return self.canonical_code(mirror) == other.canonical_code(mirror)


# -- parsing and serialization -------------------------------------------

_PD_TERM = re.compile(r"X\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)")
_GAUSS_TOKEN = re.compile(r"([OU])(\d+)([+-])")


def parse_pd(text: str) -> Diagram:
    """Parse a PD code: whitespace-separated ``X(a,b,c,d)`` terms.

    The four labels belong to slots 0..3 of one crossing in counterclockwise
    order (slots 0/2 over, 1/3 under).  Each edge label must appear exactly
    twice across the file; equal labels are paired into arcs.  The literal
    ``unknot`` denotes the crossing-free diagram.
    """
    stripped = text.strip()
    if stripped == "unknot":
        return Diagram.unknot()
    pos = 0
    occurrences: dict[int, list[int]] = {}
    term = 0
    while pos < len(stripped):
        if stripped[pos].isspace():
            pos += 1
            continue
        m = _PD_TERM.match(stripped, pos)
        if not m:
            raise DiagramError("PD syntax error at position %d: %r" %
                               (pos, stripped[pos:pos + 20]))
        for s in range(4):
            occurrences.setdefault(int(m.group(s + 1)), []).append(4 * term + s)
        term += 1
        pos = m.end()
    if term == 0:
        raise DiagramError("empty PD code (use 'unknot' for the trivial diagram)")
    pairing = {}
    for label, ds in occurrences.items():
        if len(ds) != 2:
            raise DiagramError("edge label %d appears %d times (want 2)"
                               % (label, len(ds)))
        pairing[ds[0]] = ds[1]
        pairing[ds[1]] = ds[0]
    return Diagram(pairing)


def parse_gauss(text: str) -> Diagram:
    """Parse a signed Gauss code such as ``O1+U2+O3+U1+O2+U3+``.

    Token ``O<k><sign>``/``U<k><sign>`` records passing crossing k on the
    over/under strand; each crossing index appears once with O and once
    with U, with a consistent sign.  The code is realized with the over
    strand entering slot 0, the under strand entering slot 1 for positive
    crossings and slot 3 for negative ones; sphericality of the resulting
    map is what certifies the code as realizable.
    """
    tokens = []
    pos = 0
    stripped = text.strip()
    while pos < len(stripped):
        if stripped[pos].isspace() or stripped[pos] == ",":
            pos += 1
            continue
        m = _GAUSS_TOKEN.match(stripped, pos)
        if not m:
            raise DiagramError("Gauss syntax error at position %d: %r" %
                               (pos, stripped[pos:pos + 10]))
        tokens.append((m.group(1), int(m.group(2)), 1 if m.group(3) == "+" else -1))
        pos = m.end()
    if not tokens:
        raise DiagramError("empty Gauss code")
    seen: dict[int, dict[str, int]] = {}
    for ou, k, sign in tokens:
        info = seen.setdefault(k, {})
        if ou in info:
            raise DiagramError("crossing %d passed twice on the %s strand" % (k, ou))
        info[ou] = sign
    ids = {}
    for k, info in seen.items():
        if set(info) != {"O", "U"}:
            raise DiagramError("crossing %d missing an O or U passage" % k)
        if info["O"] != info["U"]:
            raise DiagramError("crossing %d has inconsistent signs" % k)
        ids[k] = len(ids)
    entries = []
    exits = []
    for ou, k, sign in tokens:
        c = ids[k]
        if ou == "O":
            entries.append(dart(c, 0))
            exits.append(dart(c, 2))
        elif sign > 0:
            entries.append(dart(c, 1))
            exits.append(dart(c, 3))
        else:
            entries.append(dart(c, 3))
            exits.append(dart(c, 1))
    pairing = {}
    n = len(tokens)
    for i in range(n):
        a, b = exits[i], entries[(i + 1) % n]
        if a in pairing or b in pairing:
            raise DiagramError("Gauss code revisits a half-edge")
        pairing[a] = b
        pairing[b] = a
    try:
        return Diagram(pairing)
    except DiagramError as exc:
        raise DiagramError("Gauss code is not realizable on the sphere: %s" % exc)


def parse(text: str) -> Diagram:
    """Parse either format, sniffing PD ``X(`` terms vs Gauss tokens."""
    stripped = text.strip()
    if stripped == "unknot" or stripped.startswith("X"):
        return parse_pd(text)
    return parse_gauss(text)


def serialize(diagram: Diagram) -> str:
    """Emit a PD code from the canonical labeling.

    Isomorphic diagrams serialize to identical text, and the output
    reparses to an isomorphic diagram.
    """
    if not diagram.crossings:
        return "unknot"
    label, offs = diagram.canonical_labeling()
    by_label = sorted(diagram.crossings, key=label.__getitem__)
    edge_label: dict[int, int] = {}
    nxt = 1
    terms = []
    for c in by_label:
        off = offs[label[c]]
        lbls = []
        for r in range(4):
            d = 4 * c + ((r - off) & 3)
            e = edge_label.get(d)
            if e is None:
                e = nxt
                nxt += 1
                edge_label[d] = e
                edge_label[diagram.alpha[d]] = e
            lbls.append(e)
        terms.append("X(%d,%d,%d,%d)" % tuple(lbls))
    return " ".join(terms)
