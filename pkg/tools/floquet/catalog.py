"""
Built-in Floquet sequences.

Small hand-written instances for tests and docs, plus the honeycomb code on a
brick-wall torus. See docs/HONEYCOMB.md for the honeycomb layout.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Tuple

from tools.stabiliser.group import StabiliserGroup
from tools.stabiliser.locality import Lattice, Region, diameter
from tools.stabiliser.pauli import PauliOperator, parse_pauli, product

from .sequence import FloquetSequence

logger = logging.getLogger(__name__)


def _group(*texts: str) -> StabiliserGroup:
    return StabiliserGroup.from_generators([parse_pauli(t) for t in texts])


def single_qubit_zx() -> FloquetSequence:
    """<Z> -> <X> -> <Z> on one qubit (no logical qubits)."""
    z, x = _group("+Z"), _group("+X")
    return FloquetSequence(isgs=(z, x, z), lattice=Lattice.line(1), l=1.0, name="single_qubit_zx")


def two_qubit_logical() -> FloquetSequence:
    """<Z1> -> <X1> -> <Z1> with the logical qubit on qubit 2."""
    z, x = _group("+ZI"), _group("+XI")
    return FloquetSequence(isgs=(z, x, z), lattice=Lattice.line(2), l=1.0, name="two_qubit_logical")


def double_zx() -> FloquetSequence:
    """<Z1, Z2> -> <X1X2, X2> -> <Z1, Z2>; two conjugate pairs per step."""
    z, x = _group("+ZI", "+IZ"), _group("+XX", "+IX")
    return FloquetSequence(isgs=(z, x, z), lattice=Lattice.line(2), l=1.0, name="double_zx")


def three_qubit_logical() -> FloquetSequence:
    """Two measured qubits next to one logical qubit."""
    z, x = _group("+ZII", "+IZI"), _group("+XXI", "+IXI")
    return FloquetSequence(isgs=(z, x, z), lattice=Lattice.line(3), l=1.0, name="three_qubit_logical")


@dataclass(frozen=True)
class HoneycombLayout:
    """
    Brick-wall embedding of the honeycomb on a W x H torus (W = 2*Lx, H = Ly).

    Site (x, y) is on sublattice A when x - y is even. Each A site has a ZZ
    edge up to (x, y+1), an XX edge right to (x+1, y) and a YY edge left to
    (x-1, y). Hexagons are anchored at A sites and coloured ((x - 3y)/2) mod 3.
    """

    lx: int
    ly: int
    edges: Tuple[Tuple[str, int, int, int], ...]
    plaquettes: Tuple[Tuple[int, Tuple[int, ...]], ...]

    @property
    def width(self) -> int:
        return 2 * self.lx

    @property
    def height(self) -> int:
        return self.ly

    @property
    def n(self) -> int:
        return self.width * self.height

    def qubit(self, x: int, y: int) -> int:
        return (y % self.height) * self.width + (x % self.width)

    def edge_operator(self, index: int) -> PauliOperator:
        letter, u, v, _ = self.edges[index]
        return PauliOperator.from_terms(self.n, {u: letter, v: letter})

    def edges_of_colour(self, colour: int) -> List[int]:
        return [i for i, e in enumerate(self.edges) if e[3] == colour]

    def plaquette_operator(self, index: int) -> PauliOperator:
        colour, edge_ids = self.plaquettes[index]
        first = [self.edge_operator(e) for e in edge_ids if self.edges[e][3] == (colour + 1) % 3]
        second = [self.edge_operator(e) for e in edge_ids if self.edges[e][3] == (colour + 2) % 3]
        return product(first + second, self.n)

    def plaquette_region(self, index: int) -> Region:
        qubits = set()
        for e in self.plaquettes[index][1]:
            qubits.update(self.edges[e][1:3])
        return Region(frozenset(qubits))

    def lattice(self) -> Lattice:
        positions = tuple((q % self.width, q // self.width) for q in range(self.n))
        return Lattice(dim=2, positions=positions, period=(self.width, self.height))


def honeycomb_layout(lx: int, ly: int) -> HoneycombLayout:
    if lx < 3 or lx % 3:
        raise ValueError(f"Lx must be a positive multiple of 3 for a 3-colourable torus, got {lx}")
    if ly < 2 or ly % 2:
        raise ValueError(f"Ly must be even and at least 2, got {ly}")
    width, height = 2 * lx, ly

    def q(x: int, y: int) -> int:
        return (y % height) * width + (x % width)

    anchors = [(x, y) for y in range(height) for x in range(width) if (x - y) % 2 == 0]
    edge_index: Dict[Tuple[str, int, int], int] = {}
    raw_edges: List[Tuple[str, int, int]] = []
    for x, y in anchors:
        for letter, (bx, by) in (("Z", (x, y + 1)), ("X", (x + 1, y)), ("Y", (x - 1, y))):
            edge_index[(letter, x, y)] = len(raw_edges)
            raw_edges.append((letter, q(x, y), q(bx, by)))

    def a_edge(letter: str, x: int, y: int) -> int:
        return edge_index[(letter, x % width, y % height)]

    plaquettes = []
    bordering: Dict[int, List[int]] = {i: [] for i in range(len(raw_edges))}
    for x, y in anchors:
        colour = ((x - 3 * y) // 2) % 3
        ids = (a_edge("Z", x, y), a_edge("Y", x + 1, y + 1), a_edge("X", x + 1, y + 1),
               a_edge("Z", x + 2, y), a_edge("Y", x + 2, y), a_edge("X", x, y))
        for e in ids:
            bordering[e].append(colour)
        plaquettes.append((colour, ids))
    edges = []
    for i, (letter, u, v) in enumerate(raw_edges):
        colours = bordering[i]
        if len(colours) != 2 or colours[0] == colours[1]:
            raise ValueError(f"torus {lx}x{ly} does not admit a valid plaquette colouring")
        edges.append((letter, u, v, (-colours[0] - colours[1]) % 3))
    return HoneycombLayout(lx=lx, ly=ly, edges=tuple(edges), plaquettes=tuple(plaquettes))


def honeycomb_isg(layout: HoneycombLayout, colour: int) -> StabiliserGroup:
    """Checks of one colour plus every plaquette, all with sign +."""
    gens = [layout.edge_operator(e) for e in layout.edges_of_colour(colour)]
    gens += [layout.plaquette_operator(p) for p in range(len(layout.plaquettes))]
    return StabiliserGroup.from_generators(gens, layout.n)


def honeycomb(lx: int = 3, ly: int = 2) -> FloquetSequence:
    """
    Three measurement rounds of the honeycomb code, closed into a period.

    The torus is a brick wall of 2*lx by ly sites, so lx counts hexagon
    columns and must be a positive multiple of 3, and ly must be even and at
    least 2. n = 2*lx*ly; the default gives 12 qubits.
    """
    layout = honeycomb_layout(lx, ly)
    rounds = [honeycomb_isg(layout, c) for c in range(3)]
    lattice = layout.lattice()
    l = diameter(lattice, layout.plaquette_region(0))
    logger.debug(f"honeycomb {lx}x{ly}: n={layout.n}, rank={rounds[0].rank}, l={l}")
    return FloquetSequence(isgs=(rounds[0], rounds[1], rounds[2], rounds[0]),
                           lattice=lattice, l=l, name=f"honeycomb_{lx}x{ly}")


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    description: str
    builder: Callable[..., FloquetSequence]
    defaults: Dict[str, Any] = field(default_factory=dict)

    def build(self, **params: Any) -> FloquetSequence:
        unknown = set(params) - set(self.defaults)
        if unknown:
            raise ValueError(f"unknown parameters for {self.name}: {sorted(unknown)}")
        return self.builder(**{**self.defaults, **params})

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "description": self.description, "parameters": dict(self.defaults)}


CATALOG: Dict[str, CatalogEntry] = {
    entry.name: entry for entry in (
        CatalogEntry("single_qubit_zx", "Z -> X -> Z on one qubit", single_qubit_zx),
        CatalogEntry("two_qubit_logical", "Z1 -> X1 -> Z1 with a logical qubit on qubit 2",
                     two_qubit_logical),
        CatalogEntry("double_zx", "<Z1,Z2> -> <X1X2,X2> -> <Z1,Z2>", double_zx),
        CatalogEntry("three_qubit_logical", "two measured qubits and one logical qubit",
                     three_qubit_logical),
        CatalogEntry("honeycomb", "honeycomb code on a brick-wall torus (lx a multiple of 3, ly even)", honeycomb,
                     {"lx": 3, "ly": 2}),
    )
}


def get_entry(name: str) -> CatalogEntry:
    if name not in CATALOG:
        raise KeyError(f"unknown catalog entry {name!r}; choose from {sorted(CATALOG)}")
    return CATALOG[name]


def build(name: str, **params: Any) -> FloquetSequence:
    return get_entry(name).build(**params)
