"""Triangular color-code patch geometry.

Coordinate frame
----------------

Everything lives on an integer grid.  The patch for distance ``d`` spans
rows ``Y = 0, 2, ..., 2T`` with ``T = 3(d-1)/2``; odd rows hold some
measurement qubits and nothing else.  Writing ``y = Y/2``, row ``y``
contains sites ``X = 2*xh`` for ``xh = y, y+2, ..., 2T-y``, so the patch
is a left-leaning triangle with its long edge on the bottom row.

A site is a face center when ``((xh - y)/2) % 3`` equals the row's
center slot (2, 0, 1 for ``y % 3`` = 0, 1, 2); otherwise it is a data
qubit.  Face members sit at the six offsets (+-4, 0), (+-2, +-2) from
the center; faces cut by the patch edge keep only the members that
exist and have weight 4.  Face colors repeat with the row period:
``y % 3`` = 0, 1, 2 gives green, blue, red bands (encoded 1, 2, 0).

The three patch sides are labeled by the color of the faces they
truncate: the bottom row is the red side, the left edge green, the right
edge blue.  The logical operator of either basis can be supported on the
bottom row of data qubits.

Measurement-qubit placement
---------------------------

superdense families   one pair per face: the Z ancilla on the face
                      center, the X ancilla at center + (1, 0).  The Z
                      ancilla couples the members left of the center,
                      the X ancilla the members right of it, and the two
                      couple each other.

midout families       one pair per face at the midpoints of two of its
                      edges: center + (0, -2), between the two lower
                      members, and center + (-3, +1), between the left
                      and upper-left members.  The pair flanks the
                      lower-left face edge and the two sites couple each
                      other through the (empty) face center.  A
                      measurement site whose own edge lost both data
                      qubits to truncation is dropped.

Adjacency (`neighbors`) is the coupling graph: pairs that may host a
two-qubit gate.  Bulk data qubits have degree 3 in every family.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

Coord = tuple[int, int]

FAMILIES = (
    "midout",
    "semiwiggling_midout",
    "cxswap_midout",
    "superdense",
    "cxswap_superdense",
)

MIDOUT_FAMILIES = ("midout", "semiwiggling_midout", "cxswap_midout")
SUPERDENSE_FAMILIES = ("superdense", "cxswap_superdense")
CXSWAP_FAMILIES = ("cxswap_midout", "cxswap_superdense")

RED, GREEN, BLUE = 0, 1, 2
COLOR_NAMES = ("red", "green", "blue")

_CENTER_SLOT = (2, 0, 1)
_ROW_COLOR = (GREEN, BLUE, RED)
_MEMBER_OFFSETS = ((-4, 0), (-2, -2), (2, -2), (4, 0), (2, 2), (-2, 2))


class Role(Enum):
    DATA = "data"
    MEASURE = "measure"
    AUX = "aux"


class LayoutError(ValueError):
    pass


@dataclass(frozen=True)
class Qubit:
    coord: Coord
    index: int
    role: Role


@dataclass(frozen=True)
class Face:
    """One stabilizer face.

    ``ancillas`` holds the face's measurement sites.  For superdense
    families the order is (Z ancilla, X ancilla).  For midout families
    it is (lower edge midpoint, upper-left edge midpoint), truncated
    sites omitted.
    """

    color: int
    center: Coord
    members: tuple[Coord, ...]
    ancillas: tuple[Coord, ...]


@dataclass(frozen=True)
class Layout:
    d: int
    family: str
    qubits: dict[Coord, Qubit]
    faces: tuple[Face, ...]
    edges: frozenset[frozenset[Coord]]

    def data_qubits(self) -> tuple[Coord, ...]:
        return tuple(c for c, q in sorted(self.qubits.items(), key=_order)
                     if q.role is Role.DATA)

    def measure_qubits(self) -> tuple[Coord, ...]:
        return tuple(c for c, q in sorted(self.qubits.items(), key=_order)
                     if q.role is Role.MEASURE)

    def aux_qubits(self) -> tuple[Coord, ...]:
        return tuple(c for c, q in sorted(self.qubits.items(), key=_order)
                     if q.role is Role.AUX)

    def index_of(self, coord: Coord) -> int:
        return self.qubits[coord].index

    def neighbors(self, coord: Coord) -> tuple[Coord, ...]:
        if coord not in self.qubits:
            raise LayoutError(f"no qubit at {coord}")
        out = []
        for e in self.edges:
            if coord in e:
                (other,) = set(e) - {coord}
                out.append(other)
        return tuple(sorted(out, key=lambda c: (c[1], c[0])))

    def boundary_sides(self, coord: Coord) -> str:
        """Patch sides touching a data coordinate: subset of 'rgb'."""
        x, y = coord
        sides = ""
        if y == 0:
            sides += "r"
        if x == y:
            sides += "g"
        if x == 6 * (self.d - 1) - y:
            sides += "b"
        return sides

    def observable_support(self) -> tuple[Coord, ...]:
        """Data qubits of the bottom row; hosts the logical of either basis."""
        return tuple(c for c in self.data_qubits() if c[1] == 0)

    def to_json(self) -> str:
        qs = sorted(self.qubits.values(), key=lambda q: q.index)
        return json.dumps(
            {
                "d": self.d,
                "family": self.family,
                "qubits": [
                    {"x": q.coord[0], "y": q.coord[1], "index": q.index,
                     "role": q.role.value}
                    for q in qs
                ],
                "faces": [
                    {
                        "color": f.color,
                        "members": [list(m) for m in f.members],
                        "center": list(f.center),
                        "ancillas": [list(a) for a in f.ancillas],
                    }
                    for f in self.faces
                ],
            },
            indent=1,
        )


def _order(item):
    coord, _ = item
    return (coord[1], coord[0])


def neighbors(layout: Layout, coord: Coord) -> tuple[Coord, ...]:
    return layout.neighbors(coord)


def build_layout(d: int, family: str) -> Layout:
    if family not in FAMILIES:
        raise LayoutError(f"unknown family {family!r}")
    if d < 3 or d % 2 == 0:
        raise LayoutError(f"d must be odd and >= 3, got {d}")

    t = 3 * (d - 1) // 2
    data: set[Coord] = set()
    raw_faces: list[tuple[Coord, int]] = []
    for y in range(t + 1):
        for xh in range(y, 2 * t - y + 1, 2):
            site = (2 * xh, 2 * y)
            if ((xh - y) // 2) % 3 == _CENTER_SLOT[y % 3]:
                raw_faces.append((site, _ROW_COLOR[y % 3]))
            else:
                data.add(site)

    faces: list[Face] = []
    edges: set[frozenset[Coord]] = set()
    measure: list[Coord] = []
    for center, color in raw_faces:
        cx, cy = center
        members = tuple(
            (cx + dx, cy + dy)
            for dx, dy in _MEMBER_OFFSETS
            if (cx + dx, cy + dy) in data
        )
        if family in SUPERDENSE_FAMILIES:
            anc_z = center
            anc_x = (cx + 1, cy)
            measure += [anc_z, anc_x]
            edges.add(frozenset((anc_z, anc_x)))
            for m in members:
                edges.add(frozenset((m, anc_z if m[0] < cx else anc_x)))
            ancillas = (anc_z, anc_x)
        else:
            anc: list[Coord] = []
            lower = (cx, cy - 2)
            lower_data = [m for m in ((cx - 2, cy - 2), (cx + 2, cy - 2))
                          if m in data]
            if lower_data:
                anc.append(lower)
                measure.append(lower)
                for m in lower_data:
                    edges.add(frozenset((lower, m)))
            upper = (cx - 3, cy + 1)
            upper_data = [m for m in ((cx - 4, cy), (cx - 2, cy + 2))
                          if m in data]
            if upper_data:
                anc.append(upper)
                measure.append(upper)
                for m in upper_data:
                    edges.add(frozenset((upper, m)))
            if len(anc) == 2:
                edges.add(frozenset(anc))
            # the bare face edges that carry no measurement site
            for a, b in (((cx - 4, cy), (cx - 2, cy - 2)),
                         ((cx + 4, cy), (cx + 2, cy + 2))):
                if a in data and b in data:
                    edges.add(frozenset((a, b)))
            ancillas = tuple(anc)
        faces.append(Face(color, center, members, ancillas))

    qubits: dict[Coord, Qubit] = {}
    idx = 0
    for c in sorted(data, key=lambda c: (c[1], c[0])):
        qubits[c] = Qubit(c, idx, Role.DATA)
        idx += 1
    for c in sorted(measure, key=lambda c: (c[1], c[0])):
        qubits[c] = Qubit(c, idx, Role.MEASURE)
        idx += 1
    for c in _aux_sites(d, family, faces, data):
        qubits[c] = Qubit(c, idx, Role.AUX)
        idx += 1

    expected = (3 * d * d + 1) // 4
    if len([q for q in qubits.values() if q.role is Role.DATA]) != expected:
        raise LayoutError("data-qubit count mismatch; construction bug")
    return Layout(d, family, qubits, tuple(faces), frozenset(edges))


def _aux_sites(d, family, faces, data):
    """Boundary helper qubits for the CXSWAP families.

    Placement is tied to the boundary gate decomposition of those
    builders and is finalized there; non-CXSWAP families have none.
    """
    if family not in CXSWAP_FAMILIES:
        return []
    return []
