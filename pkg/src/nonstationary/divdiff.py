"""Incremental divided-difference table over an append-only list of nodes.

Nodes are indexed in the order they are appended, ``x_0, x_1, ..., x_k``.
The table keeps the newest anti-diagonal

    diagonal[i] = f[x_k, x_{k-1}, ..., x_{k-i}],   i = 0..k

which are exactly the coefficients of the Newton interpolation polynomial
written about the newest node first.  Appending ``x_{k+1}`` derives the next
anti-diagonal from the current one with ``k+1`` divisions.
"""

from __future__ import annotations

from dataclasses import dataclass

from .numctx import Real

__all__ = ["DividedDifferenceTable", "DuplicateNode"]


class DuplicateNode(ArithmeticError):
    """A node coincides with one already in the table."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"node coincides with existing node x_{index}")


@dataclass(frozen=True)
class DividedDifferenceTable:
    nodes: tuple = ()
    values: tuple = ()
    diagonal: tuple = ()
    previous: tuple = ()

    def __len__(self) -> int:
        return len(self.nodes)

    def append_node(self, x: Real, fx: Real) -> "DividedDifferenceTable":
        """Return a new table with ``(x, fx)`` appended as the newest node."""
        nodes = self.nodes
        k = len(nodes)
        new = [fx]
        for i in range(1, k + 1):
            h = x - nodes[k - i]
            if not h:
                raise DuplicateNode(k - i)
            new.append((new[i - 1] - self.diagonal[i - 1]) / h)
        return DividedDifferenceTable(
            nodes=nodes + (x,),
            values=self.values + (fx,),
            diagonal=tuple(new),
            previous=self.diagonal,
        )

    def newton_poly_eval(self, x: Real) -> Real:
        """Evaluate the interpolating polynomial through every node at ``x``."""
        if not self.nodes:
            raise ValueError("empty divided-difference table")
        nodes, d = self.nodes, self.diagonal
        n = len(nodes) - 1
        acc = d[n]
        for i in range(n - 1, -1, -1):
            acc = d[i] + (x - nodes[n - i]) * acc
        return acc

    def newton_poly_derivative_at_last(self) -> Real:
        """Derivative of the interpolating polynomial at the newest node.

        Nested form ``d[1] + (x_n - x_{n-1})(d[2] + (x_n - x_{n-2})(d[3] + ...))``.
        """
        n = len(self.nodes) - 1
        if n < 1:
            raise ValueError("derivative needs at least two nodes")
        nodes, d = self.nodes, self.diagonal
        xn = nodes[n]
        acc = d[n]
        for i in range(n - 1, 0, -1):
            acc = d[i] + (xn - nodes[n - i]) * acc
        return acc

    @classmethod
    def from_points(cls, xs, fs) -> "DividedDifferenceTable":
        table = cls()
        for x, fx in zip(xs, fs):
            table = table.append_node(x, fx)
        return table
