"""DOT renderings of the fake pullback grid and of zig-zag relations.

Plain graph description text, deterministic line order.  The grid renders
as three ranked rows

    Q   X   U
    Y   Z   R
    V   S   W

with the input cospan along the right and bottom edges and the result legs
in the top-left corner; E-edges are drawn dashed, M-edges solid.
"""
from __future__ import annotations

from .core import Instance, ObjHandle
from .fakepb import FakePullbackGrid

GRID_ROWS = (("Q", "X", "U"), ("Y", "Z", "R"), ("V", "S", "W"))

# (source node, target node, morphism field) in fixed render order
GRID_EDGES = (
    ("X", "Q", "r"),
    ("X", "U", "i"),
    ("Y", "Q", "s"),
    ("Y", "V", "j"),
    ("Z", "X", "d_bar"),
    ("Z", "Y", "e_bar"),
    ("Z", "R", "n_bar"),
    ("Z", "S", "m_bar"),
    ("R", "U", "d"),
    ("R", "W", "m"),
    ("S", "V", "e"),
    ("S", "W", "n"),
)


def _label(obj: ObjHandle) -> str:
    text = obj.descriptor or str(obj.obj_key)
    return text.replace('"', r"\"")


def _edge_attrs(name: str, cls: str) -> str:
    style = "dashed" if cls == "E" else "solid"
    return f'[label="{name}: {cls}", style={style}]'


def grid_dot(inst: Instance, grid: FakePullbackGrid) -> str:
    lines = [
        "digraph fake_pullback {",
        "  rankdir=TB;",
        "  node [shape=box];",
    ]
    for row in GRID_ROWS:
        for name in row:
            lines.append(f'  {name} [label="{name}: {_label(getattr(grid, name))}"];')
        lines.append("  { rank=same; " + "; ".join(row) + "; }")
    classes = grid.edge_classes()
    for src, dst, name in GRID_EDGES:
        lines.append(f"  {src} -> {dst} {_edge_attrs(name, classes[name])};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def relation_dot(inst: Instance, r) -> str:
    """A zig-zag X <- U ->> Y <<- V -> Z as five ranked nodes."""
    nodes = (
        ("X", r.X), ("U", r.left.apex), ("Y", r.Y), ("V", r.right.apex), ("Z", r.Z),
    )
    lines = [
        "digraph relation {",
        "  rankdir=LR;",
        "  node [shape=box];",
    ]
    for name, obj in nodes:
        lines.append(f'  {name} [label="{name}: {_label(obj)}"];')
    lines.append("  { rank=same; X; U; Y; V; Z; }")
    lines.append(f"  U -> X {_edge_attrs('m', 'M')};")
    lines.append(f"  U -> Y {_edge_attrs('d', 'E')};")
    lines.append(f"  V -> Y {_edge_attrs('e', 'E')};")
    lines.append(f"  V -> Z {_edge_attrs('n', 'M')};")
    lines.append("}")
    return "\n".join(lines) + "\n"
