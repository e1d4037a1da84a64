"""Reidemeister I and III moves on diagrams, with transport maps.

Four move kinds are supported:

* ``KinkAdd`` inserts a one-crossing curl on an arc (crossing count +1).
* ``KinkRemove`` deletes the crossing of a monogon face (count -1).
* ``TriSlide`` flips an admissible triangle face (count unchanged).
* ``TriSlideStar`` is a TriSlide whose three sides may carry *rectangles*,
  kink chains that ride along when the strands slide.

Every application returns a :class:`MoveRecord` carrying dart and face
correspondences between the old and the new diagram; no move is applied
anonymously.  Sites are value-bound to their anchor diagram: applying a
site to any other diagram raises.

Surgery conventions (see :mod:`ri3.diagram` for the dart encoding):

* A kink created with sign ``+1`` uses loop slots (1, 2) of the new
  crossing, a ``-1`` kink uses slots (0, 1); the strand attaches at the
  remaining two slots, and the new monogon pokes into the face of the
  site's ``side_dart``.
* A triangle face with corner darts ``d0, d1, d2`` (face-walk order) has
  side i running from ``d_i`` to ``rot(d_{i+1}, 3)``.  The slide swaps the
  roles of each corner crossing's slots with their opposites: the flipped
  triangle has corner darts ``rot(d_i, 2)``, the external wires re-attach
  at the old corner slots, and each side's kink chain moves rigidly to the
  new side (its internal pairing is untouched).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagram import Diagram, DiagramError, dart, rot, dart_str, parse_dart


class MoveError(ValueError):
    """Illegal or stale move site."""


# -- sites -----------------------------------------------------------------

@dataclass(frozen=True)
class KinkDesc:
    """One kink of a rectangle: sign, which side of the strand the loop
    pokes to (+1 left / -1 right, walking away from the anchor corner),
    and the chain riding its own loop arc."""
    sign: int
    side: int
    inner: tuple = ()

    def __str__(self):
        s = ("+" if self.sign > 0 else "-") + ("L" if self.side > 0 else "R")
        if self.inner:
            s += "{" + ",".join(str(n) for n in self.inner) + "}"
        return s


RectSpec = tuple  # tuple[KinkDesc, ...]


@dataclass(frozen=True)
class KinkAdd:
    side_dart: int | None
    sign: int
    trivial_side: int = 0
    new_id: int | None = field(default=None, compare=False)
    bound: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class KinkRemove:
    monogon: int  # the monogon face's single dart
    bound: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class TriSlide:
    corners: tuple[int, int, int]  # face-walk order, minimal dart first
    bound: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class TriSlideStar:
    corners: tuple[int, int, int]
    rects: tuple[RectSpec, RectSpec, RectSpec]
    bound: int | None = field(default=None, compare=False)


MoveSite = KinkAdd | KinkRemove | TriSlide | TriSlideStar

KINK_ADD = "kink_add"
KINK_REMOVE = "kink_remove"
TRI_SLIDE = "tri_slide"
TRI_SLIDE_STAR = "tri_slide_star"


def site_kind(site: MoveSite) -> str:
    if isinstance(site, KinkAdd):
        return KINK_ADD
    if isinstance(site, KinkRemove):
        return KINK_REMOVE
    if isinstance(site, TriSlide):
        return TRI_SLIDE
    if isinstance(site, TriSlideStar):
        return TRI_SLIDE_STAR
    raise MoveError("not a move site: %r" % (site,))


def canonical_corners(corners) -> tuple[int, int, int]:
    """Rotate a corner triple so the smallest dart comes first."""
    i = corners.index(min(corners))
    return (corners[i], corners[(i + 1) % 3], corners[(i + 2) % 3])


@dataclass
class MoveRecord:
    """Result of one application: site, both diagrams, transports.

    ``dart_map`` sends each surviving pre-dart to its post-dart;
    ``face_map`` sends each surviving pre-face id to its post-face id.
    Created elements are outside the image, destroyed ones outside the
    domain (a KinkRemove unmaps exactly the monogon and its crossing).
    """
    site: MoveSite
    pre: Diagram
    post: Diagram
    dart_map: dict[int, int]
    face_map: dict[int, int]
    new_crossing: int | None = None
    monogon: int | None = None            # dart of a created monogon face
    removed_crossing: int | None = None
    removed_kink: tuple | None = None     # (anchor dart in post | None, sign)
    new_corners: tuple | None = None      # slid triangle corners in post


# -- kink chains (rectangles) ------------------------------------------------

def _walk_chain(alpha, start: int, stops, budget: list, acc: list):
    """Parse a kink chain, walking the strand away from dart ``start``.

    Every crossing met must be a kink whose loop closes immediately,
    possibly through a nested chain.  Returns ``(nodes, arrival)`` where
    ``arrival`` is the dart in ``stops`` the walk finally reaches.
    """
    nodes = []
    cur = start
    while True:
        if budget[0] <= 0:
            raise MoveError("strand walk does not close into a kink chain")
        budget[0] -= 1
        v = alpha[cur]
        if v in stops:
            return tuple(nodes), v
        t = v & 3
        acc.append(v >> 2)
        inner, ret = _walk_chain(alpha, rot(v, 2), (rot(v, 1), rot(v, 3)),
                                 budget, acc)
        if ret == rot(v, 1):
            # loop slots (t+1, t+2); exits right of the walk
            nodes.append(KinkDesc(1 if not t & 1 else -1, -1, inner))
            cur = rot(v, 3)
        else:
            # loop slots (t+2, t+3); exits left
            nodes.append(KinkDesc(1 if t & 1 else -1, 1, inner))
            cur = rot(v, 1)


def parse_rectangle(diagram: Diagram, from_dart: int, stop_dart: int):
    """Kink chain on the strand from ``from_dart`` up to ``stop_dart``.

    Returns (nodes, crossings met, in walk order).  Raises MoveError if a
    non-kink crossing interrupts the strand.
    """
    acc: list[int] = []
    budget = [4 * len(diagram.crossings) + 8]
    nodes, _ = _walk_chain(diagram.alpha, from_dart, (stop_dart,), budget, acc)
    return nodes, acc


def build_chain(diagram: Diagram, from_dart: int, nodes) -> Diagram:
    """Insert the kinks of ``nodes`` on the arc at ``from_dart``, ordered
    along the strand starting nearest that end.  Test/oracle utility; the
    slide surgery itself never rebuilds chains."""
    d = diagram
    u = from_dart
    for node in nodes:
        w = d.alpha[u]
        h = u if node.side < 0 else w
        d, rec = apply(d, KinkAdd(h, node.sign))
        x = rec.new_crossing
        a = 1 if node.sign > 0 else 0
        if node.side < 0:
            exit_dart = dart(x, a + 2)
            loop_start = dart(x, a + 1)
        else:
            exit_dart = dart(x, a + 3)
            loop_start = dart(x, a)
        if node.inner:
            d = build_chain(d, loop_start, node.inner)
        u = exit_dart
    return d


def detect_rectangle(diagram: Diagram, arc_dart: int):
    """Maximal kink chain along the strand through the arc of ``arc_dart``.

    Returns a tuple of KinkDesc, empty when the neighbouring crossings do
    not form a reducible chain.  Nodes are listed walking away from
    ``arc_dart``'s own crossing.
    """
    if arc_dart not in diagram.alpha:
        raise MoveError("no arc at dart %s" % dart_str(arc_dart))
    alpha = diagram.alpha
    nodes: list[KinkDesc] = []
    seen: set[int] = set()
    cur = arc_dart
    while True:
        v = alpha[cur]
        if v >> 2 in seen or v == arc_dart or rot(v, 2) == arc_dart:
            break
        t = v & 3
        budget = [4 * len(diagram.crossings) + 8]
        try:
            inner, ret = _walk_chain(alpha, rot(v, 2), (rot(v, 1), rot(v, 3)),
                                     budget, [])
        except MoveError:
            break
        seen.add(v >> 2)
        if ret == rot(v, 1):
            nodes.append(KinkDesc(1 if not t & 1 else -1, -1, inner))
            cur = rot(v, 3)
        else:
            nodes.append(KinkDesc(1 if t & 1 else -1, 1, inner))
            cur = rot(v, 1)
    return tuple(nodes)


# -- application -------------------------------------------------------------

def apply(diagram: Diagram, site: MoveSite) -> tuple[Diagram, MoveRecord]:
    """Apply a legal move site, returning the new diagram and its record."""
    bound = getattr(site, "bound", None)
    if bound is not None and bound != diagram.key:
        raise MoveError("stale site: bound to a different diagram value")
    if isinstance(site, KinkAdd):
        return _apply_kink_add(diagram, site)
    if isinstance(site, KinkRemove):
        return _apply_kink_remove(diagram, site)
    if isinstance(site, TriSlide):
        return _apply_slide(diagram, site, site.corners, ((), (), ()))
    if isinstance(site, TriSlideStar):
        return _apply_slide(diagram, site, site.corners, site.rects)
    raise MoveError("unknown move site %r" % (site,))


def _apply_kink_add(d: Diagram, site: KinkAdd):
    if site.sign not in (1, -1):
        raise MoveError("kink sign must be +1 or -1")
    a = 1 if site.sign > 0 else 0
    if site.side_dart is None:
        if not d.free_loop:
            raise MoveError("loop-anchored kink add needs the round unknot")
        if site.trivial_side not in (0, 1):
            raise MoveError("trivial_side must be 0 or 1")
        x = site.new_id if site.new_id is not None else d.next_id
        pairing = {dart(x, a): dart(x, a + 1), dart(x, a + 1): dart(x, a),
                   dart(x, a + 2): dart(x, a + 3), dart(x, a + 3): dart(x, a + 2)}
        post = Diagram(pairing, next_id=max(d.next_id, x + 1))
        face_map = {site.trivial_side: post.face_of(dart(x, a)),
                    1 - site.trivial_side: post.face_of(dart(x, a + 3))}
        rec = MoveRecord(site, d, post, {}, face_map,
                         new_crossing=x, monogon=dart(x, a + 1))
        return post, rec
    h = site.side_dart
    if h not in d.alpha:
        raise MoveError("no arc at dart %s" % dart_str(h))
    x = site.new_id if site.new_id is not None else d.next_id
    if x in set(d.crossings):
        raise MoveError("crossing id %d already in use" % x)
    o = d.alpha[h]
    pairing = dict(d.alpha)
    pairing[h] = dart(x, a + 3)
    pairing[dart(x, a + 3)] = h
    pairing[o] = dart(x, a + 2)
    pairing[dart(x, a + 2)] = o
    pairing[dart(x, a)] = dart(x, a + 1)
    pairing[dart(x, a + 1)] = dart(x, a)
    post = Diagram(pairing, next_id=max(d.next_id, x + 1))
    dart_map = {dd: dd for dd in d.alpha}
    face_map = {f.id: post.face_of(f.darts[0]) for f in d.faces}
    rec = MoveRecord(site, d, post, dart_map, face_map,
                     new_crossing=x, monogon=dart(x, a + 1))
    return post, rec


def _apply_kink_remove(d: Diagram, site: KinkRemove):
    m = site.monogon
    if m not in d.alpha:
        raise MoveError("no dart %s" % dart_str(m))
    if d.faces[d.face_of(m)].side_count != 1:
        raise MoveError("face at %s is not a monogon" % dart_str(m))
    kappa = m >> 2
    a = (m - 1) & 3
    sign = 1 if a & 1 else -1
    p = d.alpha[rot(m, 1)]
    q = d.alpha[rot(m, 2)]
    if p == rot(m, 2):
        # last crossing; the strand closes into the round unknot
        post = Diagram(free_loop=True, next_id=d.next_id)
        face_map = {d.face_of(rot(m, 1)): 0, d.face_of(rot(m, 2)): 1}
        rec = MoveRecord(site, d, post, {}, face_map,
                         removed_crossing=kappa, removed_kink=(None, sign))
        return post, rec
    pairing = dict(d.alpha)
    for s in range(4):
        del pairing[dart(kappa, s)]
    pairing[p] = q
    pairing[q] = p
    post = Diagram(pairing, next_id=d.next_id)
    dart_map = {dd: dd for dd in pairing}
    face_map = {}
    mono_fid = d.face_of(m)
    for f in d.faces:
        if f.id == mono_fid:
            continue
        anchor = next(dd for dd in f.darts if dd >> 2 != kappa)
        face_map[f.id] = post.face_of(anchor)
    rec = MoveRecord(site, d, post, dart_map, face_map,
                     removed_crossing=kappa, removed_kink=(q, sign))
    return post, rec


def _parse_sides(d: Diagram, corners):
    """Chains along the three sides of a (virtual) triangle.

    Returns (rects, side_crossings).  Raises MoveError when the walk meets
    anything other than a reducible kink chain, or when the chains touch
    the corner crossings or each other.
    """
    xset = {c >> 2 for c in corners}
    rects = []
    side_crossings = []
    for i in range(3):
        stop = rot(corners[(i + 1) % 3], 3)
        acc: list[int] = []
        budget = [4 * len(d.crossings) + 8]
        nodes, _ = _walk_chain(d.alpha, corners[i], (stop,), budget, acc)
        if xset & set(acc):
            raise MoveError("triangle side passes through a corner crossing")
        rects.append(nodes)
        side_crossings.append(acc)
    flat = [c for acc in side_crossings for c in acc]
    if len(flat) != len(set(flat)):
        raise MoveError("triangle sides share a kink crossing")
    return tuple(rects), side_crossings


def make_slide_site(d: Diagram, corners) -> TriSlide | TriSlideStar:
    """Site for the (virtual) triangle with the given corner darts,
    deriving the rectangles from the diagram itself."""
    corners = canonical_corners(tuple(corners))
    _validate_corners(d, corners)
    rects, _ = _parse_sides(d, corners)
    if any(rects):
        return TriSlideStar(corners, rects, bound=d.key)
    return TriSlide(corners, bound=d.key)


def _validate_corners(d: Diagram, corners):
    if len(corners) != 3:
        raise MoveError("a triangle needs three corner darts")
    for c in corners:
        if c not in d.alpha:
            raise MoveError("no dart %s" % dart_str(c))
    if len({c >> 2 for c in corners}) != 3:
        raise MoveError("triangle corners must sit at three distinct crossings")
    parities = {c & 1 for c in corners}
    if len(parities) != 2:
        # all-over or all-under around the triangle: the cyclically
        # alternating pattern, where no strand is over (or under) at both
        # of its crossings
        raise MoveError("triangle is not admissible for a slide")


def _apply_slide(d: Diagram, site, corners, declared_rects):
    corners = tuple(corners)
    _validate_corners(d, corners)
    rects, side_crossings = _parse_sides(d, corners)
    if tuple(declared_rects) != rects:
        raise MoveError("declared rectangles do not match the diagram")
    alpha = d.alpha
    xset = {c >> 2 for c in corners}
    chain_set = {c for acc in side_crossings for c in acc}

    pairing = dict(alpha)
    touched = [rot(c, k) for c in corners for k in range(4)]
    partners = [alpha[t] for t in touched]
    for t in touched:
        pairing.pop(t, None)
    for t in partners:
        pairing.pop(t, None)

    # flipped sides: each chain moves rigidly, its ends swapping corners
    for i in range(3):
        di = corners[i]
        dn = corners[(i + 1) % 3]
        end_a = alpha[di]
        bi = rot(di, 2)
        an = rot(dn, 1)
        if end_a == rot(dn, 3):
            pairing[bi] = an
            pairing[an] = bi
        else:
            end_b = alpha[rot(dn, 3)]
            pairing[bi] = end_b
            pairing[end_b] = bi
            pairing[an] = end_a
            pairing[end_a] = an

    # external wires re-plug at the old corner slots
    reloc = {}
    for i in range(3):
        reloc[rot(corners[i], 1)] = corners[(i + 2) % 3]
        reloc[rot(corners[i], 2)] = rot(corners[(i + 1) % 3], 3)
    done = set()
    for port, target in reloc.items():
        if port in done:
            continue
        w = alpha[port]
        if w in reloc:
            done.add(w)
            pairing[target] = reloc[w]
            pairing[reloc[w]] = target
        else:
            pairing[target] = w
            pairing[w] = target

    try:
        post = Diagram(pairing, next_id=d.next_id)
    except DiagramError as exc:  # pragma: no cover - guarded by validation
        raise MoveError("slide produced an invalid diagram: %s" % exc)

    dart_map = {dd: dd for dd in alpha if dd >> 2 not in xset}
    for i in range(3):
        di = corners[i]
        dart_map[di] = rot(di, 2)
        dart_map[rot(di, 3)] = rot(di, 1)
        dart_map[rot(di, 1)] = corners[(i + 2) % 3]
        dart_map[rot(di, 2)] = rot(corners[(i + 1) % 3], 3)

    cls_img = {}
    for i in range(3):
        di = corners[i]
        cls_img[di] = rot(di, 2)
        cls_img[rot(di, 1)] = corners[(i + 2) % 3]
        cls_img[rot(di, 3)] = corners[(i + 1) % 3]
        cls_img[rot(di, 2)] = rot(corners[(i + 1) % 3], 3)
    face_map = {}
    for f in d.faces:
        imgs = set()
        chain_anchor = None
        for dd in f.darts:
            c = dd >> 2
            if c in xset:
                imgs.add(post.face_of(cls_img[dd]))
            elif c in chain_set:
                if chain_anchor is None:
                    chain_anchor = dd
            else:
                imgs.add(post.face_of(dd))
        if imgs:
            if len(imgs) != 1:
                raise RuntimeError("inconsistent face transport in slide")
            face_map[f.id] = imgs.pop()
        else:
            face_map[f.id] = post.face_of(chain_anchor)

    new_corners = canonical_corners(tuple(rot(c, 2) for c in corners))
    rec = MoveRecord(site, d, post, dart_map, face_map, new_corners=new_corners)
    return post, rec


# -- inversion ---------------------------------------------------------------

def invert(rec: MoveRecord) -> MoveSite:
    """Site on the post-diagram undoing the recorded move (up to the
    identity of any re-created crossing)."""
    kind = site_kind(rec.site)
    if kind == KINK_ADD:
        return KinkRemove(rec.monogon, bound=rec.post.key)
    if kind == KINK_REMOVE:
        anchor, sign = rec.removed_kink
        if anchor is None:
            return KinkAdd(None, sign, trivial_side=0, bound=rec.post.key)
        return KinkAdd(anchor, sign, bound=rec.post.key)
    return make_slide_site(rec.post, rec.new_corners)


# -- enumeration ---------------------------------------------------------------

def enumerate_sites(d: Diagram, kind: str | None = None) -> list[MoveSite]:
    """All legal sites of one kind (or of the three basic kinds)."""
    if kind is None:
        return (enumerate_sites(d, KINK_ADD) + enumerate_sites(d, KINK_REMOVE)
                + enumerate_sites(d, TRI_SLIDE))
    if kind == KINK_ADD:
        if d.free_loop:
            return [KinkAdd(None, sg, trivial_side=ts, bound=d.key)
                    for ts in (0, 1) for sg in (1, -1)]
        return [KinkAdd(h, sg, bound=d.key)
                for h in sorted(d.alpha) for sg in (1, -1)]
    if kind == KINK_REMOVE:
        return [KinkRemove(m, bound=d.key) for m in sorted(d.monogons())]
    if kind == TRI_SLIDE:
        sites = []
        for f in d.faces:
            if f.side_count != 3:
                continue
            corners = canonical_corners(f.darts)
            if len({c >> 2 for c in corners}) != 3:
                continue
            if len({c & 1 for c in corners}) != 2:
                continue
            sites.append(TriSlide(corners, bound=d.key))
        sites.sort(key=lambda s: s.corners)
        return sites
    if kind == TRI_SLIDE_STAR:
        from itertools import combinations
        sites = []
        for f in d.faces:
            n = f.side_count
            if n < 3:
                continue
            for pos in combinations(range(n), 3):
                corners = tuple(f.darts[i] for i in pos)
                try:
                    site = make_slide_site(d, corners)
                except MoveError:
                    continue
                if isinstance(site, TriSlide):
                    site = TriSlideStar(site.corners, ((), (), ()), bound=d.key)
                sites.append(site)
        sites.sort(key=lambda s: s.corners)
        return sites
    raise MoveError("unknown move kind %r" % kind)
